"""``charpath`` command line.

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 compute
limit exceeded.  Settings resolve as flag > environment > config file >
built-in default.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import export
from .dirichlet import TABLE_LIMIT, build_context, is_prime
from .moments import (
    M_limit,
    MomentSpec,
    Mq_direct,
    Mq_full,
    Mq_sigma,
    ParityMismatch,
    TooLarge,
)
from .paths import PathGrid, parse_t, sample_path
from .randomseries import (
    DEFAULT_GRID,
    DEFAULT_TERMS,
    SeriesSpec,
    Truncation,
    ensemble_manifest,
    sample_ensemble,
)
from .stats import increment_report, phi_limit, phi_q, tau_grid
from .steinhaus import DEFAULT_CAPACITY
from .verify import SUITES

FAMILY_LIMIT = 10**6
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class LimitError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    cache_dir: str | None = None
    format: str = "csv"
    terms: int = DEFAULT_TERMS
    grid: int = DEFAULT_GRID
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise UsageError("threads must be at least 1")
        if self.terms < 1:
            raise UsageError("terms must be at least 1")
        if self.format not in ("csv", "json", "svg"):
            raise UsageError(f"unknown format {self.format!r}")


_INT_KEYS = {"seed", "terms", "grid", "threads"}


def read_config(path: str | os.PathLike) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, values may be quoted."""
    known = {f.name for f in fields(RunConfig)}
    out: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        value = value.strip("\"'")
        try:
            out[key] = int(value) if key in _INT_KEYS else value
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {key} must be an integer") from exc
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    env_seed = os.environ.get("CHARPATH_SEED")
    if env_seed:
        try:
            values["seed"] = int(env_seed)
        except ValueError as exc:
            raise UsageError("CHARPATH_SEED must be an integer") from exc
    if os.environ.get("CHARPATH_CACHE_DIR"):
        values["cache_dir"] = os.environ["CHARPATH_CACHE_DIR"]
    for key in ("seed", "cache_dir", "format", "terms", "grid", "threads"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(**values)
    if not 0 <= cfg.seed < 1 << 64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return cfg


# ---------------------------------------------------------------------------
# helpers


def _context(q: int, cfg: RunConfig, family: bool = False):
    if q < 3 or not is_prime(q):
        raise UsageError("modulus must be an odd prime")
    if family and q > FAMILY_LIMIT:
        raise LimitError(f"full-family scans are limited to q <= {FAMILY_LIMIT}")
    if q > TABLE_LIMIT:
        raise LimitError(f"modulus exceeds the table limit {TABLE_LIMIT}")
    return build_context(q, cfg.cache_dir)


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _sidecar(out: str | None, suffix: str) -> Path | None:
    if out in (None, "-"):
        return None
    p = Path(out)
    return p.with_name(p.stem + suffix)


def _grid_arg(text: str, q: int | None = None) -> PathGrid:
    if text == "vertex":
        if q is None:
            raise UsageError("a vertex grid needs a modulus")
        return PathGrid.vertex(q)
    try:
        count = int(text)
    except ValueError as exc:
        raise UsageError("grid must be 'vertex' or a point count") from exc
    if count < 2:
        raise UsageError("grid needs at least 2 points")
    return PathGrid.uniform(count)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _ts(text: str) -> tuple:
    try:
        return tuple(parse_t(v) for v in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad t list {text!r}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_path(args, cfg: RunConfig) -> int:
    ctx = _context(args.q, cfg)
    if not 0 <= args.chi <= args.q - 2:
        raise UsageError(f"character index must lie in [0, {args.q - 2}]")
    grid = _grid_arg(args.grid or "vertex", args.q)
    path = sample_path(ctx.character(args.chi), grid)
    fmt = cfg.format
    if fmt == "svg":
        _emit(export.path_svg(path.values), args.out)
    elif fmt == "csv":
        _emit(export.path_csv(grid.points, path.values), args.out)
    else:
        raise UsageError("path supports csv or svg output")
    if args.plot:
        from .plotting import plot_paths

        plot_paths([(f"q={args.q}, j={args.chi}", path.values)], args.plot)
    return EXIT_OK


def cmd_sample_f(args, cfg: RunConfig) -> int:
    N = cfg.terms
    if N > DEFAULT_CAPACITY:
        raise LimitError(f"terms exceed the sampler capacity {DEFAULT_CAPACITY}")
    if args.count < 1:
        raise UsageError("count must be at least 1")
    grid = _grid_arg(str(cfg.grid))
    spec = SeriesSpec(args.parity, Truncation.symmetric(N), grid)
    samples = sample_ensemble(spec, args.count, cfg.seed, cfg.threads)
    manifest = ensemble_manifest(spec, args.count, cfg.seed)
    fmt = cfg.format
    if fmt == "csv":
        if args.count == 1:
            text = export.path_csv(grid.points, samples[0].values)
        else:
            text = export.ensemble_csv(grid.points, [s.values for s in samples])
    elif fmt == "svg":
        text = export.path_svg(samples[0].values)
    else:
        text = export.to_json(
            {"manifest": manifest, "t": grid.points, "samples": [s.values for s in samples]}
        )
    _emit(text, args.out)
    side = _sidecar(args.out, ".manifest.json")
    if side is not None:
        _emit(export.to_json(manifest), str(side))
    elif fmt != "json":
        sys.stderr.write(export.to_json(manifest))
    if args.plot:
        from .plotting import plot_paths

        plot_paths([(f"{args.parity} sample {i}", s.values) for i, s in enumerate(samples[:4])], args.plot)
    return EXIT_OK


def cmd_moment(args, cfg: RunConfig) -> int:
    try:
        spec = MomentSpec(_ts(args.t), _ints(args.n), _ints(args.m), args.parity)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    method = args.method
    try:
        if method == "limit":
            result = M_limit(spec, args.truncate)
        else:
            if args.q is None:
                raise UsageError(f"--q is required for method {method}")
            if method == "sigma":
                if spec.n_total != spec.m_total:
                    raise UsageError("the sigma method requires |n| == |m|")
                if args.q < 3 or not is_prime(args.q):
                    raise UsageError("modulus must be an odd prime")
                result = Mq_sigma(args.q, spec)
            else:
                ctx = _context(args.q, cfg, family=True)
                if method == "direct":
                    result = Mq_direct(ctx, spec, cfg.threads)
                else:
                    result = Mq_full(ctx, spec)
    except ParityMismatch as exc:
        raise UsageError(str(exc)) from exc
    except TooLarge as exc:
        raise LimitError(str(exc)) from exc
    _emit(export.to_json(result.record()), args.out)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    lines = [f"{'suite':<14} {'check':<40} {'value':>24} {'bound':>24}  result"]
    for name in names:
        for c in SUITES[name]():
            ok &= c.passed
            lines.append(
                f"{name:<14} {c.name:<40} {export.fmt(c.value):>24} {export.fmt(c.bound):>24}  "
                + ("PASS" if c.passed else "FAIL")
            )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_phi(args, cfg: RunConfig) -> int:
    try:
        taus = tau_grid(args.taus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.limit:
        if not args.samples or args.samples < 1:
            raise UsageError("limit mode needs --samples >= 1")
        parity = {"odd": "minus", "even": "plus"}.get(args.parity, args.parity)
        if parity not in ("plus", "minus"):
            raise UsageError("limit mode needs parity plus or minus")
        curve = phi_limit(taus, args.samples, cfg.terms, cfg.grid, parity, cfg.seed, cfg.threads)
    else:
        if args.q is None:
            raise UsageError("character mode needs --q")
        parity = {"minus": "odd", "plus": "even"}.get(args.parity, args.parity)
        ctx = _context(args.q, cfg, family=True)
        curve = phi_q(ctx, taus, parity, cfg.threads)
    _emit(export.tail_csv(curve), args.out)
    if args.plot:
        from .plotting import plot_tails

        plot_tails([curve], args.plot)
    return EXIT_OK


def cmd_report(args, cfg: RunConfig) -> int:
    """Figures plus the delimited tables they were drawn from."""
    from .plotting import plot_increments, plot_paths, plot_tails

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = _context(args.q, cfg, family=True)
    grid = PathGrid.vertex(args.q)
    drawn = []
    for j, label in ((1, "odd"), (2, "even")):
        vals = sample_path(ctx.character(j), grid).values
        (out / f"path_q{args.q}_j{j}.csv").write_text(export.path_csv(grid.points, vals))
        (out / f"path_q{args.q}_j{j}.svg").write_text(export.path_svg(vals))
        drawn.append((f"q={args.q}, j={j} ({label})", vals))
    plot_paths(drawn, out / "paths.png")

    ugrid = PathGrid.uniform(cfg.grid)
    series = []
    for parity in ("plus", "minus"):
        spec = SeriesSpec(parity, Truncation.symmetric(cfg.terms), ugrid)
        s = sample_ensemble(spec, 1, cfg.seed)[0]
        (out / f"series_{parity}.csv").write_text(export.path_csv(ugrid.points, s.values))
        series.append((f"F_{parity}, N={cfg.terms}", s.values))
    plot_paths(series, out / "series.png")

    taus = tau_grid(args.taus)
    curves = [phi_q(ctx, taus, "odd", cfg.threads)]
    if args.samples:
        curves.append(phi_limit(taus, args.samples, cfg.terms, cfg.grid, "minus", cfg.seed, cfg.threads))
    for c, name in zip(curves, ("phi_q", "phi_limit")):
        (out / f"{name}.csv").write_text(export.tail_csv(c))
    plot_tails(curves, out / "phi.png")

    inc_ctx = _context(args.increment_q, cfg, family=True)
    rep = increment_report(inc_ctx)
    (out / "increments.csv").write_text(export.increment_csv(rep))
    (out / "increments.json").write_text(export.to_json(export.increment_summary(rep)))
    plot_increments(rep, out / "increments.png")
    _emit("".join(f"{p.name}\n" for p in sorted(out.iterdir())), None)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--seed", type=int, help="master seed (default: $CHARPATH_SEED, else 0)")
    g.add_argument("--cache-dir", help="directory for discrete-log tables ($CHARPATH_CACHE_DIR)")
    g.add_argument("--config", help="flat key = value config file, e.g. charpath.toml")
    g.add_argument("--threads", type=int, help="worker threads; output does not depend on it")
    g.add_argument("--out", help="output file (default: stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="charpath", description="Character paths, random multiplicative series and their statistics."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("path", parents=[common], help="sample the path of one character")
    p.add_argument("--q", type=int, required=True, help="odd prime modulus")
    p.add_argument("--chi", type=int, default=1, help="character index j in [0, q-2] (default 1)")
    p.add_argument("--grid", help="'vertex' (default) or a uniform point count")
    p.add_argument("--format", choices=["csv", "svg"], help="output format (default csv)")
    p.add_argument("--plot", help="also render a PNG figure to this file")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("sample-f", parents=[common], help="sample the random series on a grid")
    p.add_argument("--parity", choices=["plus", "minus", "general"], default="minus")
    p.add_argument("--terms", type=int, help=f"truncation N (default {DEFAULT_TERMS})")
    p.add_argument("--grid", type=int, help=f"uniform grid size (default {DEFAULT_GRID})")
    p.add_argument("--count", type=int, default=1, help="number of samples (streams 0..count-1)")
    p.add_argument("--format", choices=["csv", "json", "svg"])
    p.add_argument("--plot", help="also render a PNG figure to this file")
    p.set_defaults(func=cmd_sample_f)

    p = sub.add_parser("moment", parents=[common], help="moment of character paths or of the limit")
    p.add_argument("--method", choices=["direct", "sigma", "limit", "full"], default="direct")
    p.add_argument("--q", type=int, help="odd prime modulus (not needed for limit)")
    p.add_argument("--t", required=True, help="comma-separated t values, decimals or j/q")
    p.add_argument("--n", required=True, help="comma-separated exponents of f")
    p.add_argument("--m", required=True, help="comma-separated exponents of conj(f)")
    p.add_argument("--parity", choices=["odd", "even"], default="odd")
    p.add_argument("--truncate", type=int, default=100_000, help="cutoff A for the limit sum")
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=[*SUITES, "all"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("phi", parents=[common], help="tail curve of the path maximum")
    p.add_argument("--q", type=int, help="odd prime modulus (character mode)")
    p.add_argument("--limit", action="store_true", help="Monte Carlo for the limiting series")
    p.add_argument("--parity", choices=["odd", "even", "all", "plus", "minus"], default="odd")
    p.add_argument("--taus", default="0.25:2.0:8", help="start:end:count, inclusive")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count (limit mode)")
    p.add_argument("--terms", type=int, help=f"truncation N (default {DEFAULT_TERMS})")
    p.add_argument("--grid", type=int, help="grid size for the series maximum")
    p.add_argument("--plot", help="also render a PNG figure to this file")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("report", parents=[common], help="write figures and their CSV tables")
    p.add_argument("--out-dir", required=True, help="directory for PNG, CSV, SVG and JSON files")
    p.add_argument("--q", type=int, default=10007, help="modulus for paths and the tail curve")
    p.add_argument("--increment-q", type=int, default=1009, help="modulus for the increment fit")
    p.add_argument("--taus", default="0.25:2.0:8")
    p.add_argument("--samples", type=int, default=0, help="add a Monte Carlo tail curve")
    p.add_argument("--terms", type=int)
    p.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"charpath: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LimitError as exc:
        print(f"charpath: compute limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
