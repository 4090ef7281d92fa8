import numpy as np
import pytest

from oprelay.channel import (ChannelRealization, RngSpec, draw_realization, exponential_inverse,
                             load_matrix_csv, load_realization, save_matrix_csv, save_realization)


def test_smallest_realization():
    ch = draw_realization(1, 1, RngSpec(5, 0))
    assert ch.gamma.shape == (1, 1) and ch.xi.shape == (1, 1)
    assert ch.gamma[0, 0] > 0 and ch.xi[0, 0] > 0
    assert (ch.n, ch.m) == (1, 1)


def test_same_stream_same_matrices():
    a = draw_realization(7, 3, RngSpec(99, 4))
    b = draw_realization(7, 3, RngSpec(99, 4))
    assert np.array_equal(a.gamma, b.gamma) and np.array_equal(a.xi, b.xi)


def test_streams_do_not_depend_on_order():
    later_first = draw_realization(5, 2, RngSpec(1, 10))
    for t in range(10):
        draw_realization(5, 2, RngSpec(1, t))
    assert np.array_equal(draw_realization(5, 2, RngSpec(1, 10)).gamma, later_first.gamma)


def test_distinct_streams_differ():
    a = draw_realization(50, 4, RngSpec(3, 0))
    b = draw_realization(50, 4, RngSpec(3, 1))
    assert not np.array_equal(a.gamma, b.gamma)
    assert abs(np.corrcoef(a.gamma.ravel(), b.gamma.ravel())[0, 1]) < 0.2


@pytest.mark.parametrize("n,m", [(0, 1), (1, 0)])
def test_rejects_empty_sizes(n, m):
    with pytest.raises(ValueError):
        draw_realization(n, m, RngSpec(0))


def test_rng_spec_range():
    with pytest.raises(ValueError):
        RngSpec(-1)
    with pytest.raises(ValueError):
        RngSpec(0, 2**64)


def test_exponential_statistics_1e6():
    ch = draw_realization(1000, 1000, RngSpec(2024, 0))
    x = np.sort(ch.gamma.ravel())
    assert 0.99 <= x.mean() <= 1.01
    assert 0.99 <= x.var() <= 1.01
    # Kolmogorov-Smirnov distance to 1 - e^-x
    F = -np.expm1(-x)
    k = np.arange(1, x.size + 1) / x.size
    d = max(np.max(k - F), np.max(F - (k - 1 / x.size)))
    assert d < 0.005
    assert np.all(ch.gamma > 0) and np.all(np.isfinite(ch.gamma))


def test_inverse_transform_stays_positive():
    out = exponential_inverse(np.array([0.0, 0.5, 1 - 2**-53]))
    assert np.all(out > 0)
    assert out[1] == pytest.approx(np.log(2))


def test_realization_validation():
    with pytest.raises(ValueError):
        ChannelRealization(np.ones((2, 3)), np.ones((2, 3)))
    with pytest.raises(ValueError):
        ChannelRealization(np.array([[0.0]]), np.array([[1.0]]))
    with pytest.raises(ValueError):
        ChannelRealization(np.array([[np.inf]]), np.array([[1.0]]))


def test_csv_round_trip(tmp_path):
    ch = draw_realization(4, 3, RngSpec(8, 1))
    save_realization(tmp_path, ch)
    back = load_realization(tmp_path)
    assert np.array_equal(back.gamma, ch.gamma) and np.array_equal(back.xi, ch.xi)
    assert (tmp_path / "gamma.csv").read_text().splitlines()[0] == "4,3"
    assert (tmp_path / "xi.csv").read_text().splitlines()[0] == "4,3"


def test_csv_hand_written_and_bad_shape(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("2,1\n3.0\n0.4\n")
    assert np.array_equal(load_matrix_csv(p), [[3.0], [0.4]])
    p.write_text("2,2\n3.0\n0.4\n")
    with pytest.raises(ValueError):
        load_matrix_csv(p)
    save_matrix_csv(p, np.ones((3, 2)), "xi")
    assert p.read_text().splitlines()[0] == "2,3"
