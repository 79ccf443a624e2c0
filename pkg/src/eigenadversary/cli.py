"""Command-line front end.

Exit codes: 0 all checks passed, 1 usage or configuration error,
2 a verification check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds
from .combinatorics import DEFAULT_DIMENSION_CAP, binomial
from .errors import AdversaryError
from .simulator import make_spec, run
from .verification import verify_cell

DEFAULT_SEED = 20050101
OUT_DIR_ENV = "EIGENADVERSARY_OUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> list[int]:
    """'6..10' (inclusive), '6,8,10' or '6'."""
    values: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(x) for x in part.split(".."))
                values.update(range(lo, hi + 1))
            elif part:
                values.add(int(part))
    except ValueError as exc:
        raise ConfigError(f"cannot parse range {text!r}") from exc
    if not values:
        raise ConfigError(f"empty range {text!r}")
    return sorted(values)


@dataclass
class RunConfig:
    command: str
    n: list[int]
    k: list[int]
    algorithm: str = "grover"
    t: int = 1
    seed: int = DEFAULT_SEED
    trials: int = 10
    d_w: int = 2
    j_star: int | None = None
    tolerance: float | None = None
    out_dir: Path | None = None
    fmt: str = "json"
    dim_cap: int = DEFAULT_DIMENSION_CAP
    grid: list[tuple[int, int]] = field(default_factory=list)

    def validate(self) -> None:
        for n in self.n:
            for k in self.k:
                if k < 1 or 2 * k > n:
                    raise ConfigError(f"need 1 <= K <= N/2, got N={n}, K={k}")
                if self.command != "report" and binomial(n, k) > self.dim_cap:
                    raise ConfigError(f"C({n},{k}) = {binomial(n, k)} exceeds the dimension cap {self.dim_cap}")
                self.grid.append((n, k))
        if self.t < 0:
            raise ConfigError("query count must be non-negative")
        if self.tolerance is not None and self.tolerance < 0:
            raise ConfigError("tolerance must be non-negative")
        if self.command in ("simulate", "progress") and len(self.grid) != 1:
            raise ConfigError(f"{self.command} takes a single (N, K)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="eigenadversary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n_default, k_default):
        sp.add_argument("--n", default=n_default, help="N values: 6, 6..10 or 6,8,10")
        sp.add_argument("--k", default=k_default, help="K values, same syntax")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out-dir", type=Path, default=None, help=f"write files here (default: ${OUT_DIR_ENV})")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json", help="stdout format")
        sp.add_argument("--dim-cap", type=int, default=DEFAULT_DIMENSION_CAP)

    v = sub.add_parser("verify", help="structural checks over an (N, K) grid")
    common(v, "6..8", "1..3")
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--tolerance", type=float, default=None, help="override every numeric tolerance")

    for name, helptext in (("simulate", "run an algorithm and check the progress bounds"),
                           ("progress", "run an algorithm and print its p/q profile")):
        s = sub.add_parser(name, help=helptext)
        common(s, "8", "1")
        s.add_argument("--algorithm", choices=("grover", "random", "identity"), default="grover")
        s.add_argument("--t", type=int, default=1, help="number of queries")
        s.add_argument("--d-w", type=int, default=2, help="workspace dimension for random algorithms")
        s.add_argument("--j-star", type=int, default=None)
        s.add_argument("--tolerance", type=float, default=None, help="inequality slack")

    r = sub.add_parser("report", help="closed-form theorem terms over an (N, K) grid")
    common(r, "100", "10")
    return p


def config_from_args(args) -> RunConfig:
    out_dir = args.out_dir
    if out_dir is None and os.environ.get(OUT_DIR_ENV):
        out_dir = Path(os.environ[OUT_DIR_ENV])
    cfg = RunConfig(
        command=args.command,
        n=parse_range(args.n),
        k=parse_range(args.k),
        algorithm=getattr(args, "algorithm", "grover"),
        t=getattr(args, "t", 1),
        seed=args.seed,
        trials=getattr(args, "trials", 10),
        d_w=getattr(args, "d_w", 2),
        j_star=getattr(args, "j_star", None),
        tolerance=getattr(args, "tolerance", None),
        out_dir=out_dir,
        fmt=args.fmt,
        dim_cap=args.dim_cap,
    )
    cfg.validate()
    return cfg


def fmt_num(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def dump_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_num(x) for x in row])
    return buf.getvalue()


def emit(cfg: RunConfig, stem: str, csv_text: str, json_text: str) -> None:
    if cfg.out_dir is not None:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        (cfg.out_dir / f"{stem}.csv").write_text(csv_text)
        (cfg.out_dir / f"{stem}.json").write_text(json_text)
    sys.stdout.write(csv_text if cfg.fmt == "csv" else json_text)


# ---------------------------------------------------------------- commands

VERIFY_HEADER = ["n", "k", "check", "worst", "tolerance", "instances", "passed"]


def cmd_verify(cfg: RunConfig) -> int:
    results = []
    for n, k in cfg.grid:
        results.extend(verify_cell(n, k, cfg.trials, cfg.seed, cfg.tolerance))
    results.sort(key=lambda r: (r.n, r.k, r.name))
    ok = all(r.passed for r in results)
    rows = [[r.n, r.k, r.name, r.worst, r.tolerance, r.instances, r.passed] for r in results]
    summary = {
        "command": "verify",
        "grid": [list(c) for c in cfg.grid],
        "seed": cfg.seed,
        "passed": ok,
        "failed_checks": [f"{r.name}@N={r.n},K={r.k}" for r in results if not r.passed],
        "checks": [r.as_dict() for r in results],
    }
    emit(cfg, "verify", dump_csv(VERIFY_HEADER, rows), dump_json(summary))
    return EXIT_OK if ok else EXIT_FAILED


TRAJECTORY_HEADER = ["t", "j", "p", "q", "recurrence_rhs", "binomial_bound"]


def simulate_once(cfg: RunConfig):
    (n, k), = cfg.grid
    spec = make_spec(cfg.algorithm, n, k, cfg.t, seed=cfg.seed, d_w=cfg.d_w)
    result = run(spec)
    return spec, result, result.profile()


def trajectory_rows(profile) -> list[list]:
    c = bounds.growth_rate(profile.n, profile.k)
    rows = []
    for t in range(profile.steps):
        for j in range(profile.k + 1):
            rec = ""
            if t >= 1 and j >= 1:
                rec = float(profile.q[t - 1, j] + c * profile.q[t - 1, j - 1])
            rows.append([t, j, float(profile.p[t, j]), float(profile.q[t, j]), rec,
                         bounds.binomial_bound(profile.n, profile.k, t, j)])
    return rows


def cmd_simulate(cfg: RunConfig) -> int:
    spec, result, profile = simulate_once(cfg)
    tol = cfg.tolerance if cfg.tolerance is not None else bounds.INEQUALITY_SLACK
    success = result.success_probability()
    checks = {}
    if profile.steps >= 2:
        checks["recurrence"] = bounds.recurrence_check(profile, tol).summary()
    checks["binomial_bound"] = bounds.binomial_bound_check(profile, tol).summary()
    checks["threshold"] = bounds.threshold_check(profile, tol).summary()
    success_bounds = []
    for j_star in ([cfg.j_star] if cfg.j_star is not None else range(spec.k)):
        sb, _, ok = bounds.success_bound_check(profile, success, j_star, tol)
        success_bounds.append({"j_star": sb.j_star, "combinatorial_term": sb.combinatorial_term,
                               "tail": sb.tail, "bound": sb.bound, "passed": ok})
    profile_ok = profile.check()
    passed = profile_ok and all(c["passed"] for c in checks.values()) and all(s["passed"] for s in success_bounds)
    summary = {
        "command": "simulate",
        "algorithm": cfg.algorithm,
        "spec_hash": spec.digest(),
        "seed": cfg.seed,
        "n": spec.n,
        "k": spec.k,
        "T": spec.queries,
        "d_w": spec.d_w,
        "success_probability": success,
        "success_bounds": success_bounds,
        "checks": checks,
        "profile_invariants": {"passed": profile_ok, **profile.invariant_violations()},
        "passed": passed,
    }
    emit(cfg, "trajectory", dump_csv(TRAJECTORY_HEADER, trajectory_rows(profile)), dump_json(summary))
    return EXIT_OK if passed else EXIT_FAILED


def cmd_progress(cfg: RunConfig) -> int:
    spec, result, profile = simulate_once(cfg)
    rows = [[t, j, float(profile.p[t, j]), float(profile.q[t, j])]
            for t in range(profile.steps) for j in range(profile.k + 1)]
    weights = profile.query_weights.tolist()
    summary = {"command": "progress", "algorithm": cfg.algorithm, "spec_hash": spec.digest(), "seed": cfg.seed,
               "n": spec.n, "k": spec.k, "T": spec.queries,
               "p": profile.p.tolist(), "q": profile.q.tolist(), "query_weights": weights}
    emit(cfg, "progress", dump_csv(["t", "j", "p", "q"], rows), dump_json(summary))
    return EXIT_OK if profile.check() else EXIT_FAILED


REPORT_HEADER = ["n", "k", "half", "k_even", "combinatorial_term", "tail_term", "c_threshold",
                 "epsilon", "threshold_rate", "threshold_steps", "query_budget"]


def cmd_report(cfg: RunConfig) -> int:
    terms = [bounds.theorem_terms(n, k).as_dict() for n, k in cfg.grid]
    rows = [[d[h] for h in REPORT_HEADER] for d in terms]
    emit(cfg, "report", dump_csv(REPORT_HEADER, rows), dump_json({"command": "report", "rows": terms}))
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "simulate": cmd_simulate, "progress": cmd_progress, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, AdversaryError) as exc:
        print(f"eigenadversary: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
