"""Command-line surface: noise/exponent sweeps, critical-exponent search,
theorem verification suites, figure-data reproduction, and state export.

Exit codes: 0 success, 2 configuration error, 3 measure undefined on a
requested cut, 4 no sign change inside a critical-exponent bracket, 5 a
verification suite found violations. CSV output uses 17-significant-digit
floats so identical configurations produce byte-identical files. The
MONOLAB_THREADS environment variable caps worker threads for grid sweeps.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from . import __version__, measures, monogamy, states, verify
from .measures import MeasureKind, MeasureUndefinedError
from .monogamy import BracketError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MEASURE = 3
EXIT_BRACKET = 4
EXIT_VIOLATION = 5

THEOREM_TAGS = (
    "lemmas",
    "raising",
    "lowering",
    "functional",
    "mixed",
    "strong",
    "hierarchy",
    "probe-high-power",
    "search",
)

# Grids used by the figure reproductions. The plot ranges come from the
# figures themselves; the sampling densities are a recorded choice.
FIGURE_P_GRID = tuple(i / 50.0 for i in range(51))  # p in [0, 1], step 0.02
FIGURE_R_GRID = tuple(1.0 + 0.002 * i for i in range(101))  # r in [1, 1.2]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Echo of one CLI invocation, embedded in JSON outputs for provenance."""

    command: str
    measure: str | None = None
    normalized: bool = False
    state: str | None = None
    state_file: str | None = None
    dims: tuple[int, ...] | None = None
    rank: int | None = None
    focus: int = 0
    r: float | None = None
    r_grid: tuple[float, ...] | None = None
    p_grid: tuple[float, ...] | None = None
    bracket: tuple[float, float] | None = None
    tol: float = 1e-4
    alpha: tuple[float, ...] | None = None
    seed: int = 0
    count: int = 100
    samples: int = 1_000_000
    theorem: str | None = None
    figure: int | None = None
    out: str | None = None
    fmt: str = "csv"

    def provenance(self) -> dict:
        cfg = {
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in asdict(self).items()
            if v is not None
        }
        return {"artifact": "monolab", "version": __version__, "config": cfg}


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, num = text.split(":")
            lo, hi, num = float(lo), float(hi), int(num)
            if num < 1:
                raise ValueError
            if num == 1:
                return (lo,)
            stepped = tuple(lo + (hi - lo) * i / (num - 1) for i in range(num))
            return stepped
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} {text!r}") from exc


def _parse_grid(text: str, what: str) -> tuple[float, ...]:
    grid = _parse_floats(text, what)
    if not grid:
        raise ConfigError(f"{what} must be nonempty")
    if list(grid) != sorted(grid):
        raise ConfigError(f"{what} must be sorted ascending")
    return grid


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse dims {text!r}") from exc
    if not dims or any(d < 2 for d in dims):
        raise ConfigError(f"dims must all be >= 2, got {text!r}")
    return dims


def _measure_kind(cfg: RunConfig) -> MeasureKind:
    if cfg.measure is None:
        raise ConfigError("--measure is required for this command")
    try:
        return MeasureKind(measures.Measure.from_string(cfg.measure), cfg.normalized)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_state(cfg: RunConfig) -> states.MultipartiteState:
    if (cfg.state is None) == (cfg.state_file is None):
        raise ConfigError("exactly one of --state or --state-file is required")
    if cfg.state_file is not None:
        try:
            return states.load_state(cfg.state_file)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot load state file {cfg.state_file}: {exc}") from exc
    name = cfg.state.strip().lower()
    if name in ("random-pure", "random-mixed"):
        dims = cfg.dims or (2, 2, 2)
        if name == "random-pure":
            return states.haar_pure(dims, cfg.seed)
        rank = cfg.rank or math.prod(dims)
        return states.random_mixed(dims, rank, cfg.seed)
    try:
        return states.named_state(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_ensemble(cfg: RunConfig) -> states.EnsembleSpec:
    if cfg.state_file is not None:
        raise ConfigError("verification ensembles use --state, not --state-file")
    name = (cfg.state or "random-pure").strip().lower()
    dims = cfg.dims or (2, 2, 2)
    if name == "random-pure":
        return states.EnsembleSpec("haar_pure", dims, cfg.count, p_grid=cfg.p_grid)
    if name == "random-mixed":
        ranks = (cfg.rank,) if cfg.rank else None
        return states.EnsembleSpec(
            "random_mixed", dims, cfg.count, ranks=ranks, p_grid=cfg.p_grid
        )
    spec = states.EnsembleSpec("named", dims, 1, name=name, p_grid=cfg.p_grid)
    states.named_state(name)  # fail fast on unknown names
    return spec


def _max_workers(njobs: int) -> int:
    raw = os.environ.get("MONOLAB_THREADS", "").strip()
    try:
        cap = int(raw) if raw else 0
    except ValueError:
        raise ConfigError(f"MONOLAB_THREADS must be an integer, got {raw!r}")
    workers = min(njobs, os.cpu_count() or 1, 4)
    if cap > 0:
        workers = min(workers, cap)
    return max(workers, 1)


def _map_ordered(fn, items):
    """Apply fn over items, possibly in parallel, preserving input order."""
    items = list(items)
    workers = _max_workers(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _write_json(path: str | None, obj: dict) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _sweep_rows(kind: MeasureKind, base: states.MultipartiteState, focus: int,
                p_grid, r_grid) -> list[dict]:
    def rows_for_p(p: float) -> list[dict]:
        mixed = states.white_noise_mix(base, p)
        reports = monogamy.power_sweep(kind, mixed, focus, r_grid)
        return [
            {
                "p": p,
                "r": rep.exponent,
                "measure": kind.label(),
                "whole": rep.whole,
                "parts": rep.parts,
                "delta": rep.score,
            }
            for rep in reports
        ]

    out: list[dict] = []
    for chunk in _map_ordered(rows_for_p, p_grid):
        out.extend(chunk)
    return out


def _rows_to_csv(rows: list[dict], n_parts: int) -> str:
    header = ["p", "r", "measure", "whole"]
    header += [f"part_{i + 1}" for i in range(n_parts)]
    header += ["delta"]
    lines = [",".join(header)]
    for row in rows:
        cells = [_fmt(row["p"]), _fmt(row["r"]), row["measure"], _fmt(row["whole"])]
        cells += [_fmt(v) for v in row["parts"]]
        cells += [_fmt(row["delta"])]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _rows_to_json(rows: list[dict], cfg: RunConfig) -> dict:
    return {
        "provenance": cfg.provenance(),
        "rows": [
            {
                "p": row["p"],
                "r": row["r"],
                "measure": row["measure"],
                "whole": row["whole"],
                "parts": list(row["parts"]),
                "delta": row["delta"],
            }
            for row in rows
        ],
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_sweep(cfg: RunConfig) -> int:
    kind = _measure_kind(cfg)
    base = _resolve_state(cfg)
    if cfg.p_grid is None or cfg.r_grid is None:
        raise ConfigError("sweep requires --p-grid and --r-grid")
    rows = _sweep_rows(kind, base, cfg.focus, cfg.p_grid, cfg.r_grid)
    n_parts = base.n_subsystems - 1
    if cfg.fmt == "csv":
        _write_text(cfg.out, _rows_to_csv(rows, n_parts))
    else:
        _write_json(cfg.out, _rows_to_json(rows, cfg))
    return EXIT_OK


def cmd_rstar(cfg: RunConfig) -> int:
    kind = _measure_kind(cfg)
    state = _resolve_state(cfg)
    if cfg.bracket is None:
        raise ConfigError("rstar requires --bracket lo,hi")
    result = monogamy.critical_exponent(kind, state, cfg.focus, cfg.bracket, cfg.tol)
    if cfg.fmt == "json":
        _write_json(
            cfg.out,
            {
                "provenance": cfg.provenance(),
                "r_star": result.r_star,
                "bracket": list(result.bracket),
                "tol": result.tol,
                "score_lo": result.score_lo,
                "score_hi": result.score_hi,
                "trace": [
                    {"lo": lo, "hi": hi, "mid": mid, "score": sc}
                    for lo, hi, mid, sc in result.steps
                ],
            },
        )
    else:
        text = (
            f"r_star = {_fmt(result.r_star)}\n"
            f"delta({_fmt(result.bracket[0])}) = {_fmt(result.score_lo)}\n"
            f"delta({_fmt(result.bracket[1])}) = {_fmt(result.score_hi)}\n"
        )
        _write_text(cfg.out, text)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    tag = cfg.theorem
    kind = None
    if cfg.measure is not None:
        kind = _measure_kind(cfg)
    alphas = cfg.alpha

    if tag == "lemmas":
        summary = verify.check_scalar_lemmas(cfg.samples, cfg.seed)
    elif tag == "raising":
        r = cfg.r if cfg.r is not None else 2.0
        summary = verify.verify_raising(
            kind or MeasureKind(measures.Measure.CONCURRENCE, True),
            _resolve_ensemble(cfg), r, alphas or (r + 0.5, r + 1.0, 2.0 * r), cfg.seed,
        )
    elif tag == "lowering":
        r = cfg.r if cfg.r is not None else 1.0
        summary = verify.verify_lowering(
            kind or MeasureKind(measures.Measure.LOG_NEGATIVITY, True),
            _resolve_ensemble(cfg), r, alphas or (0.5 * r, 0.8 * r), cfg.seed,
        )
    elif tag == "functional":
        m = alphas[0] if alphas else 2.0
        summary = verify.verify_functional_lift(_resolve_ensemble(cfg), m, cfg.seed)
    elif tag == "mixed":
        spec = _resolve_ensemble(cfg) if cfg.state else states.EnsembleSpec(
            "random_mixed", cfg.dims or (2, 2, 2), cfg.count
        )
        summary = verify.verify_mixed_lifting(
            kind or MeasureKind(measures.Measure.NEGATIVITY, True), spec, cfg.seed
        )
    elif tag == "strong":
        alpha = alphas[0] if alphas else 2.0
        summary = verify.verify_strong_chain(
            kind or MeasureKind(measures.Measure.CONCURRENCE, True),
            _resolve_ensemble(cfg), alpha, cfg.seed, cfg.focus,
        )
    elif tag == "hierarchy":
        alpha = alphas[0] if alphas else 2.0
        summary = verify.verify_hierarchy_chain(
            kind or MeasureKind(measures.Measure.CONCURRENCE, True),
            _resolve_ensemble(cfg), alpha, cfg.seed, cfg.focus,
        )
    elif tag == "probe-high-power":
        spec = _resolve_ensemble(cfg) if cfg.state else states.EnsembleSpec(
            "random_mixed", cfg.dims or (2, 2, 2), cfg.count
        )
        rs = cfg.r_grid or (2.0, 3.0, 4.0)
        summary = verify.probe_high_power_mixed(rs, spec, cfg.seed)
    elif tag == "search":
        r = cfg.r if cfg.r is not None else 1.0
        summary = verify.counterexample_search(
            kind or MeasureKind(measures.Measure.LOG_NEGATIVITY),
            r, cfg.dims or (2, 2, 2), cfg.count, cfg.seed,
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown theorem tag {tag!r}")

    payload = {"provenance": cfg.provenance(), "summary": summary.to_json()}
    _write_json(cfg.out, payload)
    if tag in ("probe-high-power", "search"):
        return EXIT_OK
    return EXIT_OK if summary.ok else EXIT_VIOLATION


def cmd_figure(cfg: RunConfig) -> int:
    fid = cfg.figure
    out = cfg.out or f"figure{fid}.csv"
    p_grid = cfg.p_grid or FIGURE_P_GRID
    r_grid = cfg.r_grid or FIGURE_R_GRID
    if fid in (1, 2):
        base = states.ghz(3) if fid == 1 else states.w(3)
        rows: list[dict] = []
        for tag in (measures.Measure.NEGATIVITY, measures.Measure.LOG_NEGATIVITY):
            rows.extend(
                _sweep_rows(MeasureKind(tag), base, cfg.focus, p_grid, (1.0, 2.0))
            )
        grids = {"p_grid": list(p_grid), "r_values": [1.0, 2.0]}
        state_name = "ghz3" if fid == 1 else "w3"
    else:
        base = states.w(3)
        rows = _sweep_rows(
            MeasureKind(measures.Measure.LOG_NEGATIVITY), base, cfg.focus, (0.0,), r_grid
        )
        grids = {"p": 0.0, "r_grid": list(r_grid)}
        state_name = "w3"
    _write_text(out, _rows_to_csv(rows, base.n_subsystems - 1))
    sidecar = {
        "figure": fid,
        "state": state_name,
        "conventions": {
            "negativity_normalized": False,
            "log_base": 2,
            "score": "whole^r - sum_j part_j^r",
        },
        "grids": grids,
        "provenance": cfg.provenance(),
    }
    meta_path = os.path.splitext(out)[0] + ".meta.json"
    _write_json(meta_path, sidecar)
    return EXIT_OK


def cmd_state_export(cfg: RunConfig) -> int:
    state = _resolve_state(cfg)
    payload = states.state_to_json(state)
    _write_json(cfg.out, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, *, state: bool = True) -> None:
    if state:
        p.add_argument("--state", help="named state (ghzN, wN, classical) or random-pure/random-mixed")
        p.add_argument("--state-file", help="JSON state file {dims, rho_re, rho_im}")
        p.add_argument("--dims", help="subsystem dimensions, e.g. 2,2,2")
        p.add_argument("--rank", type=int, help="rank for random-mixed states")
        p.add_argument("--focus", type=int, default=0, help="focus subsystem index (default 0)")
    p.add_argument("--seed", type=int, default=0, help="ensemble seed (default 0)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monolab",
        description="Monogamy scores, critical exponents, and verification suites "
        "for bipartite quantum-correlation measures.",
    )
    parser.add_argument("--version", action="version", version=f"monolab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="monogamy scores over a noise and exponent grid")
    p.add_argument("--measure", required=True)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--r-grid", required=True, help="exponents, e.g. 1,2 or 1:2:11")
    p.add_argument("--p-grid", required=True, help="noise weights, e.g. 0:1:51")
    _add_common(p)

    p = sub.add_parser("rstar", help="bisect the critical exponent of the monogamy score")
    p.add_argument("--measure", required=True)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--bracket", required=True, help="exponent bracket lo,hi")
    p.add_argument("--tol", type=float, default=1e-4)
    _add_common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("theorem", choices=THEOREM_TAGS)
    p.add_argument("--measure")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--r", type=float, help="hypothesis exponent")
    p.add_argument("--r-grid", help="exponent list for the high-power probe")
    p.add_argument("--p-grid", help="optional white-noise grid for the ensemble")
    p.add_argument("--alpha", help="target exponent(s), e.g. 2 or 2.5,3,4")
    p.add_argument("--count", type=int, default=100, help="ensemble size / search restarts")
    p.add_argument("--samples", type=int, default=1_000_000, help="scalar-lemma draws")
    _add_common(p)

    p = sub.add_parser("figure", help="emit the data grid behind one of the figures")
    p.add_argument("figure", type=int, choices=(1, 2, 3))
    p.add_argument("--p-grid", help="override the default 51-point noise grid")
    p.add_argument("--r-grid", help="override the default 101-point exponent grid")
    p.add_argument("--focus", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default figureN.csv; sidecar .meta.json)")

    p = sub.add_parser("state-export", help="write a state as a JSON file")
    _add_common(p)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)
    fmt = get("fmt") or "csv"
    if get("command") == "verify" and get("fmt") is None:
        fmt = "json"
    return RunConfig(
        command=args.command,
        measure=get("measure"),
        normalized=bool(get("normalized", False)),
        state=get("state"),
        state_file=get("state_file"),
        dims=_parse_dims(args.dims) if get("dims") else None,
        rank=get("rank"),
        focus=int(get("focus", 0) or 0),
        r=get("r"),
        r_grid=_parse_grid(args.r_grid, "--r-grid") if get("r_grid") else None,
        p_grid=_parse_grid(args.p_grid, "--p-grid") if get("p_grid") else None,
        bracket=_parse_bracket(args.bracket) if get("bracket") else None,
        tol=float(get("tol", 1e-4) or 1e-4),
        alpha=_parse_floats(args.alpha, "--alpha") if get("alpha") else None,
        seed=int(get("seed", 0) or 0),
        count=int(get("count", 100) or 100),
        samples=int(get("samples", 1_000_000) or 1_000_000),
        theorem=get("theorem"),
        figure=get("figure"),
        out=get("out"),
        fmt=fmt,
    )


def _parse_bracket(text: str) -> tuple[float, float]:
    vals = _parse_floats(text, "--bracket")
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise ConfigError(f"--bracket needs lo,hi with lo < hi, got {text!r}")
    return (vals[0], vals[1])


_COMMANDS = {
    "sweep": cmd_sweep,
    "rstar": cmd_rstar,
    "verify": cmd_verify,
    "figure": cmd_figure,
    "state-export": cmd_state_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for parse errors
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MeasureUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MEASURE
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BRACKET


if __name__ == "__main__":
    sys.exit(main())
