"""``walktime`` command-line interface.

Exit status: 0 on success, 1 on a domain error (message on stderr), 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cover as cov
from . import hitting as hit
from .errors import WalktimeError
from .graph import apply_edge_change, read_graph, validate
from .montecarlo import WalkEstimate, simulate_cover, simulate_hitting
from .numerics import format_scalar, get_backend
from .resistance import perturbation_factor, resistance_matrix


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _matrix_strings(M) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in np.asarray(M)]


def _table(M) -> str:
    cells = _matrix_strings(M)
    n = len(cells)
    header = [""] + [str(j) for j in range(1, n + 1)]
    rows = [header] + [[str(i)] + row for i, row in enumerate(cells, start=1)]
    width = max(len(c) for r in rows for c in r)
    return "\n".join(" ".join(c.rjust(width) for c in r) for r in rows)


def _csv(M) -> str:
    return "\n".join(",".join(row) for row in _matrix_strings(M))


def _estimate_dict(e: WalkEstimate) -> dict:
    return {"mean": repr(e.mean), "stddev": repr(e.stddev), "trials": e.trials,
            "ci95": repr(e.ci95), "seed": e.seed}


class Output:
    """Collects named blocks and renders them in the requested format."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.blocks: list[tuple[str | None, str, object]] = []  # (title, kind, payload)
        self.notes: list[str] = []

    def matrix(self, M, title=None):
        self.blocks.append((title, "matrix", M))

    def scalar(self, x, title=None):
        self.blocks.append((title, "scalar", x))

    def record(self, rec: dict, title=None):
        self.blocks.append((title, "record", rec))

    def render_text(self) -> str:
        out = []
        sep = "," if self.fmt == "csv" else " "
        for title, kind, payload in self.blocks:
            if title and len(self.blocks) > 1:
                out.append(f"# {title}")
            if kind == "matrix":
                out.append(_table(payload) if self.fmt == "table" else _csv(payload))
            elif kind == "scalar":
                out.append(format_scalar(payload))
            else:
                for k, v in payload.items():
                    out.append(f"{k}{sep}{v}")
        out += [f"# {n}" for n in self.notes]
        return "\n".join(out) + "\n"

    def json_result(self):
        def conv(kind, payload):
            if kind == "matrix":
                return _matrix_strings(payload)
            if kind == "scalar":
                return format_scalar(payload)
            return payload

        if len(self.blocks) == 1:
            return conv(*self.blocks[0][1:])
        return {title: conv(kind, payload) for title, kind, payload in self.blocks}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _load(args):
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {args.input}")
    return validate(read_graph(path))


def _cap(args):
    return args.state_cap if args.state_cap is not None else cov.default_state_cap()


def cmd_resistance(args, out, backend):
    out.matrix(resistance_matrix(_load(args), backend=backend))


def cmd_hitting(args, out, backend):
    g = _load(args)
    H = hit.hitting_times(g, args.sense, backend)
    if not args.experimental_s34:
        out.matrix(H)
        return
    if args.sense != hit.STEPS:
        raise UsageError("--experimental-s34 compares against --sense steps")
    R = resistance_matrix(g, backend=backend)
    E = backend.zeros((g.n, g.n))
    for i in range(1, g.n + 1):
        for j in range(1, g.n + 1):
            if i != j:
                E[i - 1, j - 1] = hit.experimental_first_sense(g, i, j, backend, R=R).value
    out.matrix(H, "hitting")
    out.matrix(E, "experimental")
    out.matrix(E - H, "difference")
    out.notes.append("caveat: " + hit.EXPERIMENTAL_NOTE)


def cmd_commute(args, out, backend):
    out.matrix(hit.commute_times(_load(args), backend))


def cmd_cover(args, out, backend):
    g = _load(args)
    res = cov.cover_time(g, args.start, args.method, backend, _cap(args))
    out.scalar(res.cover_time)
    return res.states_explored


def cmd_cyclic_cover(args, out, backend):
    res = cov.cyclic_cover_time(_load(args), backend)
    if out.fmt == "json":
        out.record({"value": format_scalar(res.value), "cycle": list(res.cycle)})
    else:
        out.scalar(res.value, "value")
        out.record({"cycle": " ".join(map(str, res.cycle))}, "cycle")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated vertex list, got {text!r}") from None


def cmd_hitting_set(args, out, backend):
    g = _load(args)
    out.scalar(hit.hitting_to_set(g, _int_list(args.targets), args.from_, backend))


def cmd_perturb(args, out, backend):
    g = _load(args)
    i, j, w = args.add
    try:
        i, j, w = int(i), int(j), Fraction(w)
    except (ValueError, ZeroDivisionError):
        raise UsageError("--add expects I J W: two vertices and a weight") from None
    rep = perturbation_factor(g, i, j, w, backend)
    if g.has_edge(i, j):
        g2 = apply_edge_change(g, i, j, g.weight(i, j) + w, mode="reweight")
    else:
        g2 = apply_edge_change(g, i, j, w, mode="add")
    K = hit.commute_times(g, backend)
    K2 = hit.commute_times(g2, backend)
    ratios = [K2[a, b] / K[a, b] for a in range(g.n) for b in range(g.n) if a != b]
    out.record({
        "weight": format_scalar(rep.weight),
        "totalWeight": format_scalar(rep.total_weight),
        "addFactor": format_scalar(rep.add_factor),
        "changeFactor": format_scalar(rep.change_factor),
        "maxCommuteRatio": format_scalar(max(ratios)) if ratios else "1",
    })


def cmd_simulate(args, out, backend):
    if backend.exact:
        raise UsageError("simulate samples in floating point; use --backend float")
    g = _load(args)
    if args.cover:
        out.record(_estimate_dict(simulate_cover(g, args.start, args.trials, args.seed)))
    else:
        steps, weight = simulate_hitting(g, args.start, args.target, args.trials, args.seed)
        if out.fmt == "json":
            out.record({"steps": _estimate_dict(steps), "weightSum": _estimate_dict(weight)})
        else:
            out.record(_estimate_dict(steps), "steps")
            out.record(_estimate_dict(weight), "weightSum")


def cmd_complete_cover(args, out, backend):
    res = cov.complete_graph_cover(args.n)
    total = backend.scalar(res.total)
    stages = [backend.scalar(s) for s in res.stages]
    if out.fmt == "json":
        out.record({"total": format_scalar(total), "stages": [format_scalar(s) for s in stages]})
    else:
        out.scalar(total, "total")
        out.record({f"stage{k}": format_scalar(s) for k, s in enumerate(stages, start=1)}, "stages")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["float", "rational"], default="float")
    common.add_argument("--format", choices=["table", "csv", "json"], default="table")
    common.add_argument("--state-cap", type=_positive_int, default=None,
                        help="maximum cover-time states (default: $WALKTIME_STATE_CAP or 2000000)")
    with_file = argparse.ArgumentParser(add_help=False, parents=[common])
    with_file.add_argument("input", help="edge-list file")

    p = argparse.ArgumentParser(prog="walktime", description="Exact random-walk statistics on weighted graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("resistance", parents=[with_file], help="effective resistance matrix")
    s.set_defaults(func=cmd_resistance)

    s = sub.add_parser("hitting", parents=[with_file], help="hitting time matrix")
    s.add_argument("--sense", choices=[hit.STEPS, hit.WEIGHT], default=hit.STEPS)
    s.add_argument("--experimental-s34", action="store_true",
                   help="also print the experimental potential-sum formula and its deviation")
    s.set_defaults(func=cmd_hitting)

    s = sub.add_parser("commute", parents=[with_file], help="commute time matrix")
    s.set_defaults(func=cmd_commute)

    s = sub.add_parser("cover", parents=[with_file], help="exact cover time from one start")
    s.add_argument("--start", type=int, required=True)
    s.add_argument("--method", choices=["naive", "decomposed"], default="decomposed")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("cyclic-cover", parents=[with_file], help="cyclic cover time and optimal cycle")
    s.set_defaults(func=cmd_cyclic_cover)

    s = sub.add_parser("hitting-set", parents=[with_file], help="hitting time into a vertex set")
    s.add_argument("--targets", required=True, help="comma-separated target vertices")
    s.add_argument("--from", dest="from_", type=int, required=True)
    s.set_defaults(func=cmd_hitting_set)

    s = sub.add_parser("perturb", parents=[with_file], help="commute-time bounds for adding an edge")
    s.add_argument("--add", nargs=3, metavar=("I", "J", "W"), required=True)
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("simulate", parents=[with_file], help="Monte Carlo estimate")
    target = s.add_mutually_exclusive_group(required=True)
    target.add_argument("--target", type=int)
    target.add_argument("--cover", action="store_true")
    s.add_argument("--start", type=int, required=True)
    s.add_argument("--trials", type=_positive_int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("complete-cover", parents=[common], help="closed-form cover time of K_n")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_complete_cover)
    return p


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    backend = get_backend(args.backend)
    out = Output(args.format)
    t0 = time.perf_counter()
    try:
        explored = args.func(args, out, backend)
    except UsageError as e:
        print(f"walktime: error: {e}", file=stderr)
        return 2
    except (WalktimeError, ValueError) as e:
        print(f"walktime: {e}", file=stderr)
        return 1
    if args.format == "json":
        doc = {
            "command": args.command,
            "input": getattr(args, "input", None),
            "backend": str(backend),
            "result": out.json_result(),
            "meta": {"statesExplored": explored,
                     "elapsedMs": round((time.perf_counter() - t0) * 1000, 3)},
        }
        if out.notes:
            doc["meta"]["notes"] = out.notes
        stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        stdout.write(out.render_text())
    return 0


def main():  # pragma: no cover
    sys.exit(run_cli())


if __name__ == "__main__":  # pragma: no cover
    main()
