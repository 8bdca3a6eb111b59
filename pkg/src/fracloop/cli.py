"""Command-line entry point.

``verify --suite <name> --config <path> [overrides]`` runs a verification
suite and exits 0 exactly when every check passes.  ``verify scan --axis
<N|K|q>`` emits a long-format CSV of a parameter sweep (optionally with
rendered figures).

Configuration is a flat ``key=value`` file; any command-line flag
overrides the corresponding file entry.  Budgets are validated before any
computation starts, and an invalid budget is refused with a message and
exit code 2.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .suites import SUITES, BudgetError, RunConfig, run_suite, scan, scan_csv

_LIST_INT = ("p_list",)
_LIST_FLOAT = ("q_list",)
_INT = ("window_k", "bandwidth", "n_f", "level", "seed")
_FLOAT = ("k",)
_STR = ("suite", "group_tag", "out", "fmt")


def parse_config_file(path: str) -> dict:
    """Flat key=value file; blank lines and #-comments ignored.

    Tolerance overrides use dotted keys: ``tol.<check-id> = 1e-8``.
    """
    entries: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(
                    f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            entries[key] = val
    return entries


def _parse_list(val: str, conv):
    return tuple(conv(tok) for tok in val.replace(",", " ").split())


def build_config(file_entries: dict, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    tol = dict(cfg.tol)
    merged = dict(file_entries)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    for key, val in merged.items():
        if key.startswith("tol."):
            tol[key[4:]] = float(val)
        elif key in _LIST_INT:
            setattr(cfg, key, _parse_list(str(val), int))
        elif key in _LIST_FLOAT:
            setattr(cfg, key, _parse_list(str(val), float))
        elif key in _INT:
            setattr(cfg, key, int(val))
        elif key in _FLOAT:
            setattr(cfg, key, float(val))
        elif key in _STR:
            setattr(cfg, key, str(val))
        else:
            raise ValueError(f"unknown configuration key {key!r}")
    cfg.tol = tol
    return cfg


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--k", type=float, help="coupling constant k")
    p.add_argument("--p", dest="p_list",
                   help="comma-separated cocycle orders, e.g. 0,1,2")
    p.add_argument("--q", dest="q_list",
                   help="comma-separated fractional exponents, e.g. 0.25,0.5")
    p.add_argument("--window", dest="window_k", type=int,
                   help="base Fourier window radius K")
    p.add_argument("--nf", dest="n_f", type=int,
                   help="fermionic mode cutoff N_f")
    p.add_argument("--seed", type=int, help="master RNG seed")
    p.add_argument("--out", help="write the report/table to this path")
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"),
                   help="report serialization format (default json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verify",
        description="numerical verification of the fractional loop-group "
                    "identity suites")
    sub = parser.add_subparsers(dest="command")

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("--suite", choices=SUITES, default=None,
                    help="suite to run (default all)")
    _add_common(pv)

    ps = sub.add_parser("scan", help="emit a parameter-sweep CSV")
    ps.add_argument("--axis", required=True, choices=("N", "K", "q"),
                    help="sweep axis")
    ps.add_argument("--figures", action="store_true",
                    help="also render one PNG per observable next to the CSV")
    _add_common(ps)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    ov = {
        "k": args.k,
        "p_list": args.p_list,
        "q_list": args.q_list,
        "window_k": args.window_k,
        "n_f": args.n_f,
        "seed": args.seed,
        "out": args.out,
        "fmt": args.fmt,
    }
    if getattr(args, "suite", None) is not None:
        ov["suite"] = args.suite
    return ov


def _load_config(args: argparse.Namespace) -> RunConfig:
    entries = parse_config_file(args.config) if args.config else {}
    return build_config(entries, _overrides(args))


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    cfg.validate()  # refuse bad budgets before any computation
    rep = run_suite(cfg)
    if not cfg.out:
        sys.stdout.write(rep.emit(cfg.fmt))
    else:
        summ = rep.summary()
        print(f"{summ['passed']}/{summ['total']} checks passed; "
              f"report written to {cfg.out}")
    return 0 if rep.all_pass else 1


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    cfg.validate()
    rows = scan(cfg, args.axis)
    csv_text = scan_csv(rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"{len(rows)} rows written to {cfg.out}")
    else:
        sys.stdout.write(csv_text)
    if args.figures:
        from .figures import render_scan
        paths = render_scan(rows, args.axis, cfg.out)
        for p in paths:
            print(f"figure written to {p}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # the plain flag form `verify --suite ...` is the primary interface;
    # route it to the verify subcommand
    if not argv or argv[0] not in ("verify", "scan", "-h", "--help"):
        argv = ["verify"] + argv
    args = build_parser().parse_args(argv)
    try:
        if args.command == "scan":
            return cmd_scan(args)
        return cmd_verify(args)
    except BudgetError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
