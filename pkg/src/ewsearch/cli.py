"""Command-line front end.

    ewsearch wsep --input FILE [--delta D] [--seeds S] [--engine ellipsoid|accp] [--seed N] [--json]
    ewsearch demo NAME [--out DIR] [--json]

Exit status: 0 witness, 1 member, 2 unverified, 3 usage error, 4-8 input errors
(see :mod:`ewsearch.ingest`).  ``EWSEARCH_SEEDS`` sets the default number of
seesaw starts.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass

from .basis import build_basis
from .ingest import IngestError, ingest
from .optimizer import OptConfig
from .report import DEMOS, format_report, run_demo
from .separation import SolverConfig, TargetPoint, wsep

EXIT_WITNESS, EXIT_MEMBER, EXIT_UNVERIFIED, EXIT_USAGE = 0, 1, 2, 3
_EXIT = {"witness": EXIT_WITNESS, "member": EXIT_MEMBER, "unverified": EXIT_UNVERIFIED}

SEEDS_ENV = "EWSEARCH_SEEDS"


class UsageError(Exception):
    pass


def default_seeds() -> int:
    raw = os.environ.get(SEEDS_ENV)
    if raw is None or raw == "":
        return OptConfig.starts
    try:
        val = int(raw)
    except ValueError:
        raise UsageError(f"{SEEDS_ENV} must be a positive integer, got {raw!r}") from None
    if val < 1:
        raise UsageError(f"{SEEDS_ENV} must be a positive integer, got {raw!r}")
    return val


@dataclass(frozen=True)
class RunConfig:
    dims: tuple[int, int] | None = None  # taken from the input file when unset
    delta: float = 0.01
    seeds: int = OptConfig.starts
    tol: float = OptConfig.tol
    max_iter: int = OptConfig.max_iter
    engine_max_iter: int | None = None
    engine: str = "ellipsoid"
    seed: int = 0
    timing: bool = False

    def __post_init__(self):
        if self.dims is not None and min(self.dims) < 2:
            raise UsageError("dims must be at least 2")
        if not self.delta > 0 or not self.tol > 0:
            raise UsageError("delta and tol must be positive")
        if self.seeds < 1 or self.max_iter < 1:
            raise UsageError("seeds and max-iter must be positive")
        if self.engine_max_iter is not None and self.engine_max_iter < 1:
            raise UsageError("engine-max-iter must be positive")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")

    def solver(self) -> SolverConfig:
        opt = OptConfig(starts=self.seeds, max_iter=self.max_iter, tol=self.tol, seed=self.seed)
        try:
            return SolverConfig(opt=opt, engine=self.engine, max_iter=self.engine_max_iter)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def run_wsep(cfg: RunConfig, point: TargetPoint) -> tuple[int, dict]:
    """Solve for ``point`` and return ``(exit status, verdict dict)``."""
    dims = cfg.dims or point.dims
    if point.dims is not None and dims != point.dims:
        raise UsageError(f"dims {dims} disagree with input dims {point.dims}")
    basis = build_basis(*dims)
    if cfg.delta != point.delta:
        point = dataclasses.replace(point, delta=cfg.delta)
    verdict = wsep(point, basis, cfg.solver())
    out = verdict.to_dict(basis, timing=cfg.timing)
    out["dims"] = list(dims)
    out["config"] = {"delta": cfg.delta, "seeds": cfg.seeds, "tol": cfg.tol,
                     "max_iter": cfg.max_iter, "engine": cfg.engine, "seed": cfg.seed}
    return _EXIT[verdict.outcome], out


def _human(out: dict) -> str:
    lines = [f"outcome: {out['outcome']}" + ("  (boundary)" if out["boundary"] else "")]
    w = out.get("witness")
    if w:
        lines.append(f"witness: {w['expression']} > {w['threshold']:.6g}")
        lines.append(f"  threshold b* = {w['b_star']:.6g}, a* = {w['a_star']:.6g}, "
                     f"handedness {w['handedness']}")
        lines.append(f"  margin {w['margin']:.3g}, robust to error bars: {w['robust']}")
    elif out["outcome"] == "member":
        lines.append(f"within {out['delta_effective']:.3g} of the separable projection")
    else:
        lines.append(f"reason: {out['reason']}")
    lines.append(f"iterations {out['iterations']} (cap {out['iteration_cap']}), "
                 f"oracle calls {out['oracle_calls']}, engine {out['engine']}")
    if out["wall_time"] is not None:
        lines.append(f"wall time {out['wall_time']:.3f} s")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ewsearch", description="Entanglement witness search from expectation values.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    w = sub.add_parser("wsep", help="search for a witness in the span of the measured observables")
    w.add_argument("--input", required=True, help="JSON file of expectation records")
    w.add_argument("--delta", type=float, default=0.01, help="weak-separation tolerance")
    w.add_argument("--seeds", type=int, default=None,
                   help=f"seesaw starts (default ${SEEDS_ENV} or {OptConfig.starts})")
    w.add_argument("--engine", choices=["ellipsoid", "accp"], default="ellipsoid")
    w.add_argument("--seed", type=int, default=0, help="rng seed for seesaw starts")
    w.add_argument("--tol", type=float, default=OptConfig.tol, help="seesaw convergence tolerance")
    w.add_argument("--max-iter", type=int, default=OptConfig.max_iter, help="seesaw iteration cap")
    w.add_argument("--engine-max-iter", type=int, default=None,
                   help="cutting-plane iteration cap (lowers the proven bound)")
    w.add_argument("--json", action="store_true", help="print the verdict as JSON")
    w.add_argument("--timing", action="store_true", help="record wall time in the verdict")

    d = sub.add_parser("demo", help="run a built-in scenario")
    d.add_argument("name", choices=DEMOS)
    d.add_argument("--out", default=None, help="directory for CSV, JSON and PNG output")
    d.add_argument("--seeds", type=int, default=None)
    d.add_argument("--json", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        seeds = args.seeds if args.seeds is not None else default_seeds()
        if args.command == "demo":
            cfg = RunConfig(seeds=seeds).solver()
            summary = run_demo(args.name, cfg, args.out)
            print(json.dumps(summary, indent=2, ensure_ascii=False) if args.json
                  else format_report(summary))
            return 0
        cfg = RunConfig(delta=args.delta, seeds=seeds, tol=args.tol, max_iter=args.max_iter,
                        engine_max_iter=args.engine_max_iter, engine=args.engine,
                        seed=args.seed, timing=args.timing)
        point = ingest(args.input, cfg.delta)
        code, out = run_wsep(cfg, point)
    except UsageError as exc:
        print(f"ewsearch: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestError as exc:
        print(f"ewsearch: input error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"ewsearch: cannot read input: {exc}", file=sys.stderr)
        return 4
    print(json.dumps(out, indent=2, ensure_ascii=False) if args.json else _human(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
