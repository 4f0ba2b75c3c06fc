"""Command-line front end.

Exit codes: 0 success, 1 an asserted identity failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import census as census_mod
from .distribution import empirical_moment, ks_discrepancy, ratio_scan, st_moment
from .hurwitz import HurwitzTable, cached_table, kronecker_hurwitz_check, save_table
from .moments import hgtilde_check, moment_report
from .qseries import osaka_check

ENV_CACHE = "FROBMOMENTS_CACHE_DIR"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    cache_dir: Path | None = None
    workers: int = 1
    hurwitz_budget: int = 4_000_000
    exhaustive_budget: int = census_mod.EXHAUSTIVE_BUDGET
    twist_budget: int = census_mod.TWIST_BUDGET_PRIME
    out: str = "csv"
    tolerances: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise UsageError("--threads must be >= 1")
        if min(self.hurwitz_budget, self.exhaustive_budget, self.twist_budget) < 1:
            raise UsageError("budgets must be positive")

    def table(self, n_max: int) -> HurwitzTable:
        if n_max > self.hurwitz_budget:
            raise UsageError(f"Hurwitz table of size {n_max} exceeds budget {self.hurwitz_budget}")
        return cached_table(n_max, self.cache_dir, self.workers)


def fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_range(text: str) -> range:
    try:
        parts = [int(v) for v in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected a:b[:step]") from None
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] < 1):
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected a:b[:step]")
    return range(parts[0], parts[1] + 1, parts[2] if len(parts) == 3 else 1)


def positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=positive, default=1)
    p.add_argument("--cache", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frobmoments", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hurwitz", help="build (and cache) the table of 12*H(n)")
    p.add_argument("--n-max", "--max", dest="n_max", type=int, required=True)
    _common(p)

    p = sub.add_parser("moments", help="H_{nu,m,M}(n) over a range of n")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--M", type=positive, required=True)
    p.add_argument("--n-range", type=parse_range, required=True)
    p.add_argument("--p", type=int, default=None, help="drop terms with p | t")
    _common(p)

    p = sub.add_parser("identity", help="exact identity sweeps")
    p.add_argument("which", choices=("kronecker", "hgtilde", "osaka", "deuring"))
    p.add_argument("--n-range", type=parse_range, default=None)
    p.add_argument("--n-max", type=int, default=None, help="osaka: largest t")
    p.add_argument("--k", type=int, default=None, help="largest k")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--M", type=positive, default=1)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--r", type=positive, default=1)
    p.add_argument("--nu-max", type=int, default=3)
    p.add_argument("--mode", choices=("exhaustive", "twist"), default="twist")
    _common(p)

    p = sub.add_parser("census", help="isomorphism classes over F_{p^r}")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=positive, default=1)
    p.add_argument("--mode", choices=("exhaustive", "twist"), default="twist")
    _common(p)

    p = sub.add_parser("satotate", help="moments and KS discrepancy against Sato-Tate")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=positive, default=1)
    p.add_argument("--M", type=positive, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--nu-max", type=int, default=6)
    p.add_argument("--mode", choices=("exhaustive", "twist"), default="twist")
    _common(p)

    p = sub.add_parser("ratio-scan", help="S_{m,M}(p)/S_{1,1}(p) over p = j mod 4M^2")
    p.add_argument("--M", type=positive, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--n-range", type=parse_range, required=True, help="prime range lo:hi")
    _common(p)
    return parser


class Output:
    """Buffers rows and failures; the coordinator writes everything at the end."""

    def __init__(self, fmt_: str):
        self.fmt = fmt_
        self.tables: list[tuple[str, list[str], list[list]]] = []
        self.failures: list[dict] = []
        self.raw: dict | None = None  # a complete JSON document, written verbatim

    def table(self, name: str, header: list[str]) -> list[list]:
        rows: list[list] = []
        self.tables.append((name, header, rows))
        return rows

    def write(self, stream) -> None:
        if self.fmt == "json":
            doc = {name: [dict(zip(header, row)) for row in rows] for name, header, rows in self.tables}
            json.dump(doc, stream, indent=1, sort_keys=True)
            stream.write("\n")
            return
        writer = csv.writer(stream, lineterminator="\n")
        for i, (name, header, rows) in enumerate(self.tables):
            if len(self.tables) > 1:
                stream.write(("\n" if i else "") + f"# {name}\n")
            writer.writerow(header)
            writer.writerows(rows)


def _dec(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def cmd_hurwitz(args, cfg: RunConfig, out: Output) -> None:
    table = cfg.table(args.n_max)
    path = ""
    if cfg.cache_dir:
        target = cfg.cache_dir / f"hurwitz_{args.n_max}.bin"
        if not target.exists():
            save_table(table, target)
        path = str(target)
    rows = out.table("hurwitz", ["n_max", "path", "sha256"])
    rows.append([table.n_max, path, table.checksum()])


def cmd_moments(args, cfg: RunConfig, out: Output) -> None:
    ns = args.n_range
    table = cfg.table(4 * max(ns))
    rows = out.table("moments", ["n", "value_num", "value_den", "normalized"])
    for n in ns:
        rep = moment_report(args.nu, args.m, args.M, n, table, args.p)
        rows.append([n, rep.value.numerator, rep.value.denominator, _dec(rep.normalized)])


def _check(rows, failures, label: dict, lhs: Fraction, rhs: Fraction) -> None:
    ok = lhs == rhs
    rows.append(list(label.values()) + [fmt(lhs), fmt(rhs), "ok" if ok else "FAIL"])
    if not ok:
        failures.append({**label, "lhs": fmt(lhs), "rhs": fmt(rhs)})


def cmd_identity(args, cfg: RunConfig, out: Output) -> None:
    which = args.which
    if which == "kronecker":
        ns = args.n_range or range(1, 2001)
        table = cfg.table(4 * max(ns))
        rows = out.table("kronecker", ["n", "lhs", "rhs", "status"])
        for n in ns:
            _check(rows, out.failures, {"n": n}, *kronecker_hurwitz_check(n, table))
    elif which == "osaka":
        k_max = 5 if args.k is None else args.k
        t_max = 40 if args.n_max is None else args.n_max
        rows = out.table("osaka", ["k", "t", "s", "lhs", "rhs", "status"])
        for k in range(k_max + 1):
            for t in range(2, t_max + 1):
                for s in range(1, t):
                    _check(rows, out.failures, {"k": k, "t": t, "s": s}, *osaka_check(k, t, s))
    elif which == "hgtilde":
        k_max = 3 if args.k is None else args.k
        ns = args.n_range or range(1, 301)
        table = cfg.table(4 * max(ns))
        ms = range(args.M) if args.m is None else [args.m]
        rows = out.table("hgtilde", ["k", "m", "M", "n", "lhs", "rhs", "status"])
        for k in range(k_max + 1):
            for m in ms:
                for n in ns:
                    label = {"k": k, "m": m, "M": args.M, "n": n}
                    _check(rows, out.failures, label, *hgtilde_check(k, m, args.M, n, table))
    elif which == "deuring":
        if args.p is None:
            raise UsageError("identity deuring needs --p")
        q = args.p**args.r
        table = cfg.table(4 * q)
        field_ = census_mod.PrimePowerField(args.p, args.r)
        cen = census_mod.build_census(field_, args.mode, cfg.workers)
        ms = range(args.M) if args.m is None else [args.m]
        rows = out.table(
            "deuring", ["p", "r", "nu", "m", "M", "two_s", "h_flat", "e", "lhs", "rhs", "status"]
        )
        for nu in range(args.nu_max + 1):
            for m in ms:
                two_s, h_flat, e = census_mod.deuring_check(args.p, args.r, nu, m, args.M, table, cen)
                label = {"p": args.p, "r": args.r, "nu": nu, "m": m, "M": args.M,
                         "two_s": fmt(two_s), "h_flat": fmt(h_flat), "e": fmt(e)}
                _check(rows, out.failures, label, two_s, h_flat + e)


def cmd_census(args, cfg: RunConfig, out: Output) -> None:
    field_ = census_mod.PrimePowerField(args.p, args.r)
    cen = census_mod.build_census(field_, args.mode, cfg.workers)
    if cfg.out == "json":
        out.raw = cen.to_json()
        return
    rows = out.table("census", ["j", "a", "b", "t", "omega"])
    for c in cen.classes:
        rows.append([field_.format(c.j), field_.format(c.a), field_.format(c.b), c.t, c.omega])


def cmd_satotate(args, cfg: RunConfig, out: Output) -> None:
    field_ = census_mod.PrimePowerField(args.p, args.r)
    cen = census_mod.build_census(field_, args.mode, cfg.workers)
    m = args.m % args.M
    rows = out.table("satotate", ["nu", "empirical", "sato_tate", "abs_error"])
    for nu in range(args.nu_max + 1):
        emp = empirical_moment(cen, nu, m, args.M)
        ref = float(st_moment(nu))
        rows.append([nu, _dec(emp), _dec(ref), _dec(abs(emp - ref))])
    disc = out.table("discrepancy", ["m", "M", "ks_decimal"])
    disc.append([m, args.M, _dec(ks_discrepancy(cen, m, args.M))])


def cmd_ratio_scan(args, cfg: RunConfig, out: Output) -> None:
    lo, hi = args.n_range.start, args.n_range.stop - 1
    table = cfg.table(4 * hi)
    scan = ratio_scan(args.M, args.j, args.m, (lo, hi), table, workers=cfg.workers)
    rows = out.table("ratio_scan", ["p", "ratio_num", "ratio_den", "ratio_decimal"])
    for p, r in scan.rows:
        rows.append([p, r.numerator, r.denominator, _dec(float(r))])
    summary = out.table("summary", ["M", "j", "m", "split", "mean_low", "mean_high", "gap"])
    summary.append([args.M, args.j, args.m, scan.split, _dec(scan.mean_low),
                    _dec(scan.mean_high), _dec(scan.batch_gap)])


COMMANDS = {
    "hurwitz": cmd_hurwitz,
    "moments": cmd_moments,
    "identity": cmd_identity,
    "census": cmd_census,
    "satotate": cmd_satotate,
    "ratio-scan": cmd_ratio_scan,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cache = args.cache or (Path(os.environ[ENV_CACHE]) if os.environ.get(ENV_CACHE) else None)
        cfg = RunConfig(cache_dir=cache, workers=args.threads, out=args.out)
        out = Output(cfg.out)
        COMMANDS[args.command](args, cfg, out)
    except (UsageError, ValueError) as exc:
        parser.print_usage(stderr)
        print(f"frobmoments: error: {exc}", file=stderr)
        return 2
    if out.raw is not None:
        json.dump(out.raw, stdout, indent=1)
        stdout.write("\n")
    else:
        out.write(stdout)
    if out.failures:
        json.dump({"failures": out.failures}, stderr)
        stderr.write("\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
