"""I.i.d. flat Rayleigh fading realizations with reproducible per-trial streams."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class RngSpec:
    """Identifies one independent random stream.

    The generator for ``(master_seed, stream_id)`` is derived through
    ``SeedSequence(master_seed, spawn_key=(stream_id, *sub))`` feeding a
    counter-based Philox bit generator, so stream ``t`` never depends on how
    many other streams were consumed before it.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self, *sub: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id), *sub))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ChannelRealization:
    """Power gains for one fading block.

    ``gamma[i, r]`` is source ``i`` to relay ``r`` (n x m) and ``xi[k, j]`` is
    relay ``k`` to destination ``j`` (m x n).
    """

    gamma: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        x = np.asarray(self.xi, dtype=float)
        if g.ndim != 2 or x.ndim != 2 or g.shape != x.shape[::-1]:
            raise ValueError(f"gain shapes must be (n, m) and (m, n), got {g.shape} and {x.shape}")
        if g.size == 0:
            raise ValueError("n and m must be positive")
        for name, a in (("gamma", g), ("xi", x)):
            if not ((a > 0).all() and (a < np.inf).all()):
                raise ValueError(f"{name} entries must be strictly positive and finite")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "xi", x)

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def m(self) -> int:
        return self.gamma.shape[1]


def exponential_inverse(u: np.ndarray) -> np.ndarray:
    """Unit-mean exponential variates from uniforms on [0, 1) via -log(1 - u).

    ``u == 0`` (probability 2**-53 per draw) maps to the smallest positive
    normal float so every gain stays strictly positive.
    """
    return np.maximum(-np.log1p(-u), _TINY)


def draw_exponential(rng: np.random.Generator, shape) -> np.ndarray:
    return exponential_inverse(rng.random(shape))


def draw_realization(n: int, m: int, rng: RngSpec | np.random.Generator) -> ChannelRealization:
    """Draw fresh S-R and R-D gain matrices with Exp(1) entries."""
    if n < 1 or m < 1:
        raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    gen = rng.generator(0) if isinstance(rng, RngSpec) else rng
    gamma = draw_exponential(gen, (n, m))
    xi = draw_exponential(gen, (m, n))
    return ChannelRealization(gamma, xi)


def save_matrix_csv(path, matrix: np.ndarray, kind: str = "gamma") -> None:
    """Write one gain matrix as CSV, row-major.

    The first line is the system size ``n,m``; ``kind`` says whether the rows
    are sources (``"gamma"``, n x m) or relays (``"xi"``, m x n).
    """
    a = np.asarray(matrix, dtype=float)
    n, m = a.shape if kind == "gamma" else a.shape[::-1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([n, m])
        for row in a:
            w.writerow([repr(float(v)) for v in row])


def load_matrix_csv(path, kind: str = "gamma") -> np.ndarray:
    if kind not in ("gamma", "xi"):
        raise ValueError(f"kind must be 'gamma' or 'xi', got {kind!r}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError(f"{path}: first line must be the system size 'n,m'")
    n, m = (int(v) for v in rows[0])
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    expected = (n, m) if kind == "gamma" else (m, n)
    if data.shape != expected:
        raise ValueError(f"{path}: header says n={n}, m={m}, so a {kind} matrix "
                         f"should be {expected}, found {data.shape}")
    return data


def save_realization(directory, realization: ChannelRealization) -> tuple[Path, Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    pg, px = d / "gamma.csv", d / "xi.csv"
    save_matrix_csv(pg, realization.gamma, "gamma")
    save_matrix_csv(px, realization.xi, "xi")
    return pg, px


def load_realization(directory) -> ChannelRealization:
    d = Path(directory)
    return ChannelRealization(load_matrix_csv(d / "gamma.csv", "gamma"),
                              load_matrix_csv(d / "xi.csv", "xi"))
