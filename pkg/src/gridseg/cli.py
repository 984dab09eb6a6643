"""Command-line interface.

Every command prints one JSON object ``{command, inputs, outputs, method,
verdict?}`` on stdout, except ``curve`` which writes CSV or JSON to a file
and prints its summary record. Exit codes: 0 success, 1 domain or usage
error, 2 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import deterministic as det
from . import montecarlo as mc
from . import stochastic as st
from .grid_core import DomainError, GridSpec, count_visited_tiles

EXIT_OK, EXIT_DOMAIN, EXIT_MISMATCH = 0, 1, 2

CLOSED = "closed-form"
BRUTE = "brute-force"
MONTE = "monte-carlo"

_CONSTANTS = {
    "sqrt2": math.sqrt(2.0),
    "sqrt(2)": math.sqrt(2.0),
    "1/sqrt2": 1 / math.sqrt(2.0),
    "1/sqrt(2)": 1 / math.sqrt(2.0),
}


def parse_real(text: str) -> float:
    """Decimal string, or one of ``sqrt2`` / ``1/sqrt2`` (optionally negated)."""
    t = text.strip().lower().replace(" ", "")
    sign = 1.0
    if t.startswith("-"):
        sign, t = -1.0, t[1:]
    if t in _CONSTANTS:
        return sign * _CONSTANTS[t]
    try:
        value = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return sign * value


def tagged(value, method: str) -> dict:
    return {"value": value, "method": method}


def record(command: str, inputs: dict, outputs: dict, method, verdict=None) -> dict:
    rec = {"command": command, "inputs": inputs, "outputs": outputs, "method": method}
    if verdict is not None:
        rec["verdict"] = verdict
    return rec


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")
    return value


def _grid(args) -> GridSpec:
    return GridSpec(_positive("a", args.a), _positive("b", args.b))


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("GRIDSEG_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"GRIDSEG_SEED must be an integer, got {env!r}") from None
    return 0


def _estimate_json(est: mc.Estimate, reference: float | None) -> dict:
    out = {
        "value": est.mean,
        "std_error": est.std_error,
        "n": est.n,
        "ci95": list(est.ci95),
        "method": MONTE,
    }
    if reference is not None:
        out["reference"] = reference
        out["verdict"] = "PASS" if est.within(reference) else "FAIL"
    return out


def _overall(verdicts) -> str | None:
    verdicts = [v for v in verdicts if v is not None]
    if not verdicts:
        return None
    return "PASS" if all(v == "PASS" for v in verdicts) else "FAIL"


# ---------------------------------------------------------------------------
# commands


def cmd_max_tiles(args):
    grid = _grid(args)
    length = _positive("len", args.len)
    inputs = {"a": grid.a, "b": grid.b, "len": length}
    pair = det.funt_pair(length, grid)
    outputs = {
        "tiles": tagged(pair.tiles, CLOSED),
        "pair": tagged([pair.i, pair.j], CLOSED),
    }
    methods = [CLOSED]
    verdict = None
    if args.witness:
        seg = det.place_witness(pair, grid, length)
        outputs["witness"] = tagged([[seg.p1.x, seg.p1.y], [seg.p2.x, seg.p2.y]], CLOSED)
        outputs["witness_tiles"] = tagged(count_visited_tiles(seg, grid, exact=True), CLOSED)
    if args.oracle:
        tiles, bf_pair = mc.brute_force_max_tiles(length, grid)
        outputs["oracle_tiles"] = tagged(tiles, BRUTE)
        outputs["oracle_pair"] = tagged([bf_pair.i, bf_pair.j], BRUTE)
        methods.append(BRUTE)
        verdict = "PASS" if tiles == pair.tiles else "FAIL"
    return record("max-tiles", inputs, outputs, methods, verdict)


def cmd_min_length(args):
    grid = _grid(args)
    res = det.min_length(args.tiles, grid)
    inputs = {"a": grid.a, "b": grid.b, "tiles": args.tiles}
    outputs = {
        "inf_length": tagged(res.inf_length, CLOSED),
        "pair": tagged([res.pair.i, res.pair.j], CLOSED),
        "rounding_residual": tagged(res.rounding_residual, CLOSED),
        "note": "infimum, not attained: every segment visiting this many tiles is strictly longer",
    }
    return record("min-length", inputs, outputs, [CLOSED])


def cmd_seq(args):
    fn = det.funti_sequence if args.name == "funti" else det.funli_sequence
    terms = fn(args.count)
    return record("seq", {"name": args.name, "count": args.count}, {"terms": tagged(terms, CLOSED)}, [CLOSED])


def cmd_prob(args):
    grid = _grid(args)
    length = _positive("len", args.len)
    inputs = {"kind": args.kind, "a": grid.a, "b": grid.b, "len": length}
    if args.kind == "prob-max" and grid != det.UNIT:
        raise DomainError(
            "prob-max is only available for the unit square grid (a = b = 1); "
            "on rectangular grids the optimal pairs are too irregular for a closed form"
        )
    if args.kind in ("tail-i", "tail-j"):
        if args.n is None:
            raise DomainError(f"{args.kind} requires --n")
        inputs["n"] = args.n
        fn = st.tail_prob_i if args.kind == "tail-i" else st.tail_prob_j
        value = fn(args.n, length, grid)
    elif args.kind == "avg":
        value = st.avg_tiles(length, grid)
    else:
        value = st.prob_max(length)
    outputs = {"value": tagged(value, CLOSED)}
    methods = [CLOSED]
    verdict = None
    if args.simulate:
        cfg = mc.SamplerConfig(grid, length, args.simulate, _seed(args), args.chunks)
        inputs.update(samples=args.simulate, seed=cfg.seed, chunks=cfg.chunks)
        if args.kind == "avg":
            est = mc.estimate_avg_tiles(cfg, workers=args.workers)
        elif args.kind == "tail-i":
            est = mc.estimate_tail_prob_i(cfg, [args.n], workers=args.workers)[args.n]
        elif args.kind == "tail-j":
            est = mc.estimate_tail_prob_j(cfg, [args.n], workers=args.workers)[args.n]
        else:
            est = mc.estimate_prob_max(cfg, workers=args.workers)
        outputs["simulation"] = _estimate_json(est, value)
        methods.append(MONTE)
        verdict = outputs["simulation"]["verdict"]
    return record("prob", inputs, outputs, methods, verdict)


def cmd_simulate(args):
    grid = _grid(args)
    length = _positive("len", args.len)
    cfg = mc.SamplerConfig(grid, length, args.samples, _seed(args), args.chunks)
    n_max_i = math.floor(length / grid.a) + 2
    n_max_j = math.floor(length / grid.b) + 2
    tail_ns = range(1, max(n_max_i, n_max_j) + 1)
    summary = mc.simulate(cfg, tail_ns, workers=args.workers)

    outputs = {
        "max_tiles": tagged(det.funt(length, grid), CLOSED),
        "avg_tiles": _estimate_json(summary.tiles.estimate(), st.avg_tiles(length, grid)),
    }
    ref = st.prob_max(length) if grid == det.UNIT else None
    outputs["prob_at_max"] = _estimate_json(summary.at_max.estimate(), ref)
    outputs["tail_i"] = {
        str(n): _estimate_json(m.estimate(), st.tail_prob_i(n, length, grid))
        for n, m in summary.tail_i.items()
        if n <= n_max_i
    }
    outputs["tail_j"] = {
        str(n): _estimate_json(m.estimate(), st.tail_prob_j(n, length, grid))
        for n, m in summary.tail_j.items()
        if n <= n_max_j
    }
    verdicts = [outputs["avg_tiles"]["verdict"], outputs["prob_at_max"].get("verdict")]
    verdicts += [e["verdict"] for e in outputs["tail_i"].values()]
    verdicts += [e["verdict"] for e in outputs["tail_j"].values()]
    inputs = {
        "a": grid.a,
        "b": grid.b,
        "len": length,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "chunks": cfg.chunks,
    }
    return record("simulate", inputs, outputs, [CLOSED, MONTE], _overall(verdicts))


def _abscissae(lo: float, hi: float, step: float, positive: bool) -> list[float]:
    if not step > 0:
        raise DomainError(f"step must be positive, got {step!r}")
    if hi < lo:
        raise DomainError(f"empty range [{lo!r}, {hi!r}]")
    n = math.floor((hi - lo) / step + 1e-9) + 1
    xs = [lo + k * step for k in range(n)]
    if positive:
        xs = [x for x in xs if x > 0]
    if not xs:
        raise DomainError(f"empty range [{lo!r}, {hi!r}]")
    return xs


def curve_rows(kind: str, grid: GridSpec, lo: float, hi: float, step: float) -> list[tuple]:
    if kind == "funt":
        return [(x, det.funt(x, grid), CLOSED) for x in _abscissae(lo, hi, step, True)]
    if kind == "probmax":
        if grid != det.UNIT:
            raise DomainError("probmax curve is only available for the unit square grid")
        return [(x, st.prob_max(x), CLOSED) for x in _abscissae(lo, hi, step, True)]
    if kind == "ras":
        return [(x, st.asymptotic_ratio(x), CLOSED) for x in _abscissae(lo, hi, step, True)]
    # integer abscissae: tile counts
    t_lo, t_hi = math.ceil(lo), math.floor(hi)
    stride = max(1, round(step))
    if kind == "funl":
        ts = range(max(t_lo, 1), t_hi + 1, stride)
        if not ts:
            raise DomainError(f"empty range [{lo!r}, {hi!r}]")
        return [(T, det.funl(T, grid), CLOSED) for T in ts]
    if kind == "pairs":
        ts = range(max(t_lo, 3), t_hi + 1, stride)
        if not ts:
            raise DomainError(f"empty range [{lo!r}, {hi!r}]")
        pset = det.OptimalPairSet(grid)
        pairs = [pset[T] for T in ts]
        rows = [(p.i, p.j, "optimal-pair") for p in pairs]
        for i in range(min(p.i for p in pairs), max(p.i for p in pairs) + 1):
            rows.append((i, pset.upper_line(i), "upper-bound-line"))
            rows.append((i, pset.lower_line(i), "lower-bound-line"))
        return rows
    raise DomainError(f"unknown curve {kind!r}")


def cmd_curve(args):
    grid = _grid(args)
    lo, hi = args.range
    rows = curve_rows(args.kind, grid, lo, hi, args.step)
    try:
        with open(args.out, "w", newline="") as fh:
            if args.format == "csv":
                w = csv.writer(fh)
                w.writerow(["x", "value", "method"])
                w.writerows(rows)
            else:
                json.dump([{"x": x, "value": v, "method": m} for x, v, m in rows], fh)
    except OSError as exc:
        raise DomainError(f"cannot write {args.out!r}: {exc.strerror}") from None
    inputs = {"kind": args.kind, "a": grid.a, "b": grid.b, "range": [lo, hi], "step": args.step}
    outputs = {"path": args.out, "rows": len(rows), "format": args.format}
    return record("curve", inputs, outputs, [CLOSED])


# ---------------------------------------------------------------------------


def _add_grid(p, need_len=True):
    p.add_argument("--a", type=parse_real, default=1.0, help="tile width")
    p.add_argument("--b", type=parse_real, default=1.0, help="tile height")
    if need_len:
        p.add_argument("--len", type=parse_real, required=True, help="segment length")


def _add_sim(p):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $GRIDSEG_SEED or 0)")
    p.add_argument("--chunks", type=int, default=1)
    p.add_argument("--workers", type=int, default=1, help="threads used to run chunks")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridseg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("max-tiles", help="maximum tiles visitable with a given length")
    _add_grid(p)
    p.add_argument("--witness", action="store_true", help="print a verified witness segment")
    p.add_argument("--oracle", action="store_true", help="cross-check by exhaustive pair search")
    p.set_defaults(func=cmd_max_tiles)

    p = sub.add_parser("min-length", help="infimum length to visit a given number of tiles")
    _add_grid(p, need_len=False)
    p.add_argument("--tiles", type=int, required=True)
    p.set_defaults(func=cmd_min_length)

    p = sub.add_parser("seq", help="integer-length sequences on the unit square grid")
    p.add_argument("name", choices=["funti", "funli"])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--lines", action="store_true", help="print one term per line instead of JSON")
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("prob", help="closed-form probabilities for random segments")
    p.add_argument("kind", choices=["avg", "tail-i", "tail-j", "prob-max"])
    _add_grid(p)
    p.add_argument("--n", type=int, default=None, help="tail threshold for tail-i / tail-j")
    p.add_argument("--simulate", type=int, default=0, metavar="N", help="also run N Monte Carlo samples")
    _add_sim(p)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("curve", help="write curve data for plotting")
    p.add_argument("kind", choices=["funt", "funl", "probmax", "ras", "pairs"])
    _add_grid(p, need_len=False)
    p.add_argument("--range", type=parse_real, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--step", type=parse_real, default=1.0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="Monte Carlo estimates against the closed forms")
    _add_grid(p)
    p.add_argument("--samples", type=int, required=True)
    _add_sim(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv=None) -> tuple[dict | None, int, str | None]:
    """Execute a command; returns ``(record, exit_code, error_message)``."""
    try:
        args = build_parser().parse_args(argv)
        rec = args.func(args)
    except (UsageError, DomainError) as exc:
        return None, EXIT_DOMAIN, str(exc)
    if getattr(args, "lines", False):
        rec["_lines"] = True
    code = EXIT_MISMATCH if rec.get("verdict") == "FAIL" else EXIT_OK
    return rec, code, None


def main(argv=None) -> int:
    rec, code, err = run(argv)
    if err is not None:
        print(f"gridseg: error: {err}", file=sys.stderr)
        return code
    if rec.pop("_lines", False):
        print("\n".join(str(t) for t in rec["outputs"]["terms"]["value"]))
    else:
        print(json.dumps(rec))
    return code


if __name__ == "__main__":
    sys.exit(main())
