"""Command line entry point: ``oprelay {simulate,sweep,optimize-m,analytic,genie}``.

SNRs are given in dB on the command line and converted to linear scale here.
``--config FILE`` reads flat ``key = value`` lines (or a flat JSON object) with
the same names as the long flags; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analytics, genie, harness
from .channel import load_matrix_csv

log = logging.getLogger("oprelay")


def load_config_file(path) -> dict:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            k, v = (p.strip() for p in line.split("=", 1))
            raw[k] = v
    return {k.lstrip("-").replace("-", "_"): v for k, v in raw.items()}


def _int_list(text: str) -> list[int]:
    return [int(float(v)) for v in str(text).replace(",", " ").split()]


def _common(p: argparse.ArgumentParser, *, n_list=False):
    p.add_argument("--config", help="flat key=value or JSON file of flag defaults")
    p.add_argument("--n", type=int, help="number of S-D pairs")
    p.add_argument("--m", type=int, help="number of relays")
    if n_list:
        p.add_argument("--n-list", type=_int_list, help="comma separated n values")
    p.add_argument("--m-grid", type=_int_list, help="comma separated relay counts to search")
    p.add_argument("--snr1-db", type=float, default=harness.DEFAULT_SNR_DB)
    p.add_argument("--snr2-db", type=float, default=harness.DEFAULT_SNR_DB)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["argmax", "threshold"], default="argmax")
    p.add_argument("--s", type=float, default=None, help="phase-1 threshold (default log n - log log n)")
    p.add_argument("--hop1-counting", choices=["distinct", "per-link"], default="distinct")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oprelay", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    subs = {}
    subs["simulate"] = sub.add_parser("simulate", help="run one (n, m) cell")
    _common(subs["simulate"])
    subs["sweep"] = sub.add_parser("sweep", help="throughput vs n, optimized over m")
    _common(subs["sweep"], n_list=True)
    subs["optimize-m"] = sub.add_parser("optimize-m", help="grid search over the relay count")
    _common(subs["optimize-m"])

    p = subs["analytic"] = sub.add_parser("analytic", help="evaluate the closed forms")
    _common(p, n_list=True)
    p.add_argument("--eps", type=float, default=0.1, help="slack for the genie lower count")

    p = subs["genie"] = sub.add_parser("genie", help="full-CSI hop-1 oracle")
    _common(p)
    p.add_argument("--gamma-csv", help="source-to-relay gain matrix file (first line n,m)")
    p.add_argument("--method", choices=["bnb", "exhaustive"], default="bnb")
    parser.set_defaults(_subparsers=subs)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        file_vals = load_config_file(args.config)
        sub = args._subparsers[args.command]
        known = {a.dest: a for a in sub._actions}
        unknown = set(file_vals) - set(known)
        if unknown:
            parser.error(f"unknown keys in {args.config}: {sorted(unknown)}")
        defaults = {}
        for k, v in file_vals.items():
            action = known[k]
            if isinstance(v, str) and action.type is not None:
                v = action.type(v)
            defaults[k] = v
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _config_kw(a) -> dict:
    return dict(mode=a.mode, s=a.s, hop1_counting=a.hop1_counting)


def _require(a, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(a, n, None) is None]
    if missing:
        raise SystemExit(f"oprelay {a.command}: missing {', '.join(missing)}")


def _emit(rows: list[dict], a, columns=None) -> str:
    if a.format == "json":
        return harness.records_to_json(rows)
    return harness.records_to_csv(rows, columns)


def cmd_simulate(a) -> str:
    _require(a, "n", "m")
    cfg = harness.SimConfig(a.n, a.m, a.snr1_db, a.snr2_db, a.beta, a.trials,
                            master_seed=a.seed, **_config_kw(a))
    return _emit([harness.run_experiment(cfg, a.workers).to_dict()], a)


def cmd_optimize_m(a) -> str:
    _require(a, "n")
    m_star, rec = harness.optimize_m(a.n, a.snr1_db, a.snr2_db, a.beta, a.trials, a.m_grid,
                                     a.seed, a.workers, **_config_kw(a))
    row = {"m_star": m_star, **rec.to_dict()}
    return _emit([row], a)


def cmd_sweep(a) -> str:
    n_list = a.n_list or ([a.n] if a.n else [50, 100, 200, 500, 1000])
    recs = harness.sweep_n(n_list, a.snr1_db, a.snr2_db, a.beta, a.trials, a.seed, a.workers,
                           a.m_grid, **_config_kw(a))
    if a.format == "json":
        return harness.records_to_json([harness.sweep_row(r) for r in recs])
    return harness.sweep_csv(recs)


def analytic_rows(n_list, m_list, rho, rho_R, s=None, eps=0.1) -> list[dict]:
    rows = []
    for n in n_list:
        for m in m_list:
            rec = analytics.bound_record(n, m, rho, rho_R, s)
            fb = analytics.feedback_overhead(n, m, 0)
            rows.append({
                "n": n, "m": m, "rho": rho, "rho_R": rho_R, "s": rec.s,
                "pr_exactly_m": analytics.prob_exactly_m_distinct(n, m) if m <= n else 0.0,
                "r1_lower": rec.r1_lower, "r2_closed": rec.r2_exact,
                "p_dest_success": analytics.p_dest_success(m, rho_R),
                "genie_upper": rec.genie_upper,
                "genie_lower": analytics.genie_lower(n, eps) if n >= 2 else float("nan"),
                "coop_upper": rec.coop_upper,
                "optimal_m_phase2": analytics.optimal_m_phase2(n, rho_R) if n >= 3 else float("nan"),
                "fb_bits_hop1": fb.hop1_bits,
            })
    return rows


def cmd_analytic(a) -> str:
    n_list = a.n_list or ([a.n] if a.n else None)
    if not n_list:
        raise SystemExit("oprelay analytic: give --n or --n-list")
    m_list = a.m_grid or ([a.m] if a.m else None)
    if not m_list:
        m_list = [max(1, round(analytics.optimal_m_phase2(n, analytics.db_to_linear(a.snr2_db))))
                  for n in n_list[:1]]
    rows = analytic_rows(n_list, m_list, analytics.db_to_linear(a.snr1_db),
                         analytics.db_to_linear(a.snr2_db), a.s, a.eps)
    return _emit(rows, a)


def cmd_genie(a) -> str:
    rho = analytics.db_to_linear(a.snr1_db)
    if a.gamma_csv:
        gamma = load_matrix_csv(a.gamma_csv, "gamma")
        res = genie.max_concurrent(gamma, rho, a.beta, a.method)
        row = {"n": gamma.shape[0], "m": gamma.shape[1], "k_max": res.k_max,
               "witness": " ".join(f"{i}->{r}" for i, r in sorted(res.witness.items())),
               "nodes_explored": res.nodes_explored, "exact": res.exact}
        return _emit([row], a)
    _require(a, "n", "m")
    mc = genie.genie_throughput_mc(a.n, a.m, rho, a.beta, a.trials, a.seed, a.method)
    row = {"n": a.n, "m": a.m, "trials": a.trials, "seed": a.seed, "k_max_mean": mc.mean,
           "k_max_stderr": mc.stderr, "opportunistic_mean": mc.opportunistic_mean,
           "opportunistic_per_link_mean": float(mc.opportunistic_per_link.mean()),
           "genie_upper": analytics.genie_upper(a.n) if a.n >= 2 else float("nan"),
           "exact": mc.exact}
    return _emit([row], a)


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "optimize-m": cmd_optimize_m,
            "analytic": cmd_analytic, "genie": cmd_genie}


def main(argv=None) -> int:
    a = parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("running %s", a.command)
    out = COMMANDS[a.command](a)
    if a.out:
        Path(a.out).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
