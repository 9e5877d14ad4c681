"""Command-line front end.

Commands: ``analyze``, ``verify``, ``toeplitz`` and ``plot``.  Exit codes:
0 success, 1 failed verification, 2 bad configuration, 3 computation
failure, 4 position beyond the materialised Toeplitz depth.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import logging
import os
import sys
import tempfile
import time
import zlib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, estimation, separation, toeplitz, verify
from .separation import RESULT_COLUMNS
from .systems import DEFAULT_EPS, DEFAULT_N_MAX, DEFAULT_RADIUS, GOLDEN, make_system

log = logging.getLogger("slowentropy")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_COMPUTE, EXIT_DEPTH = 0, 1, 2, 3, 4

ESTIMATE_COLUMNS = ("system", "quantity", "delta", "slope", "intercept", "r_squared",
                    "n_min", "n_max")
SYSTEMS = ("rotation", "torus", "skew", "toeplitz", "regular-toeplitz", "sturmian")


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

# field name -> config section
_SECTIONS = {
    "system": "system", "rho": "system", "eps": "system", "plateau_depth": "system",
    "radius": "system", "a1": "system", "b": "system", "depth": "system",
    "quantity": "experiment", "deltas": "experiment", "nus": "experiment",
    "n_min": "experiment", "n_max": "experiment", "horizon": "experiment",
    "method": "experiment", "witness": "experiment", "blocks": "experiment",
    "exact_limit": "experiment",
    "sampler": "sampler", "candidates": "sampler", "random_candidates": "sampler",
    "center_step": "sampler", "seed": "sampler",
    "out": "output", "threads": "output",
}


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one ``analyze`` run."""

    system: str = "rotation"
    rho: float = GOLDEN
    eps: float = DEFAULT_EPS
    plateau_depth: int = DEFAULT_N_MAX
    radius: int = DEFAULT_RADIUS
    a1: int = 2
    b: tuple = ()
    depth: int = 8
    quantity: str = "pow"
    deltas: tuple = estimation.DEFAULT_DELTAS
    nus: tuple = (0.25, 0.125, 0.0625, 0.03125, 0.015625)
    n_min: int = 16
    n_max: int = 1024
    horizon: int = 4096
    method: str = "greedy"
    witness: bool = False
    blocks: str = "3..7"
    exact_limit: int = separation.EXACT_LIMIT
    sampler: str = "auto"
    candidates: int = 256
    random_candidates: int = 0
    center_step: int = 1
    seed: int = 0
    out: str = "results"
    threads: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}")
        if self.quantity not in ("pow", "mod", "ac"):
            raise ConfigError("quantity must be pow, mod or ac")
        if self.method not in ("greedy", "exact"):
            raise ConfigError("method must be greedy or exact")
        if not self.deltas or any(d <= 0 for d in self.deltas):
            raise ConfigError("deltas must be positive")
        if any(not 0 < v < 1 for v in self.nus):
            raise ConfigError("nus must lie in (0, 1)")
        if self.n_min < 1 or self.n_max < self.n_min * 4:
            raise ConfigError("need 1 <= n_min and n_max >= 4 * n_min")
        if self.horizon < 4 or self.candidates < 1 or self.threads < 1:
            raise ConfigError("horizon, candidates and threads must be positive")
        if self.witness and self.system != "skew":
            raise ConfigError("witness samples exist only for the skew product")
        return self

    @property
    def ns(self) -> list[int]:
        out, n = [], self.n_min
        while n <= self.n_max:
            out.append(n)
            n *= 2
        return out

    # -- file format -------------------------------------------------------

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        for f in fields(self):
            section = _SECTIONS[f.name]
            if not parser.has_section(section):
                parser.add_section(section)
            parser.set(section, f.name, _format_value(getattr(self, f.name)))
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        values = asdict(base or cls())
        known = {f.name: f for f in fields(cls)}
        for section in parser.sections():
            for key, raw in parser.items(section):
                if key not in known:
                    raise ConfigError(f"unknown key {section}.{key}")
                values[key] = _parse_value(known[key].default, raw, key)
        return cls(**values)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    return str(v)


def _parse_value(default, raw: str, key: str):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            if not raw:
                return ()
            parts = [p.strip() for p in raw.split(",")]
            as_int = key in ("b",)
            return tuple(int(p) if as_int else float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def derive_seed(seed: int, label: str) -> int:
    """Per-experiment seed from the root seed and a stable label hash."""
    ss = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(label.encode()),))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def build_system(cfg: ExperimentConfig):
    if cfg.system == "toeplitz":
        spec = toeplitz.ToeplitzSpec(a1=cfg.a1, b=cfg.b or None, depth=cfg.depth)
        return make_system("toeplitz", spec=spec, radius=cfg.radius)
    return make_system(cfg.system, rho=cfg.rho, eps=cfg.eps, n_max=cfg.plateau_depth,
                       radius=cfg.radius)


def build_candidates(cfg: ExperimentConfig, system):
    sampler = cfg.sampler
    if sampler == "auto":
        sampler = {"rotation": "grid", "torus": "xgrid", "skew": "grid"}.get(cfg.system, "centers")
    seed = derive_seed(cfg.seed, f"candidates/{cfg.system}")
    if sampler == "grid":
        if system.dim == 1:
            cs = separation.grid_candidates(system, cfg.candidates)
        else:
            side = max(1, min(16, cfg.candidates))
            cs = separation.grid_candidates(system, (side, max(1, cfg.candidates // side)))
    elif sampler == "xgrid":
        cs = separation.xgrid_candidates(system, cfg.candidates)
    elif sampler == "random":
        cs = separation.random_candidates(system, cfg.candidates, seed)
    elif sampler == "centers":
        if system.kind != "symbolic":
            raise ConfigError("centers sampler needs a shift system")
        cs = separation.center_candidates(cfg.candidates, cfg.random_candidates, seed,
                                          span=1 << 40, step=cfg.center_step)
    else:
        raise ConfigError(f"unknown sampler {sampler!r}")
    cs.seed = cfg.seed
    return cs


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def estimate_row(system: str, quantity: str, delta, est) -> dict:
    return {
        "system": system, "quantity": quantity, "delta": repr(float(delta)),
        "slope": repr(est.slope), "intercept": repr(est.intercept),
        "r_squared": repr(est.r_squared),
        "n_min": repr(est.window[0]), "n_max": repr(est.window[1]),
    }


@dataclass
class RunManifest:
    config: ExperimentConfig
    files: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_clock: float = 0.0
    version: str = __version__

    def to_text(self) -> str:
        lines = [f"version = {self.version}", f"wall_clock_seconds = {self.wall_clock:.3f}"]
        for key, path in sorted(self.files.items()):
            lines.append(f"file.{key} = {path}")
        for chk in self.checks:
            lines.append(f"check.{chk.name} = {'pass' if chk.passed else 'fail'}")
        lines.append("")
        lines.append(self.config.to_ini())
        return "\n".join(lines)

    def write(self, path: Path) -> Path:
        _atomic_write(path, self.to_text())
        return path


def run_analyze(cfg: ExperimentConfig) -> RunManifest:
    cfg.validate()
    t0 = time.perf_counter()
    try:
        system = build_system(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    label = cfg.system
    results, estimates = [], []
    if cfg.witness:
        blocks = verify.parse_range(cfg.blocks)
        res, est = estimation.witness_growth(blocks, system)
        results.extend(res)
        estimates.append(estimate_row(label, cfg.quantity, 0.25, est))
    elif cfg.quantity == "ac":
        cs = build_candidates(cfg, system)
        for d in cfg.deltas:
            est, res = estimation.amorphic_estimate(system, d, cfg.nus, cs, cfg.horizon, cfg.method)
            results.extend(res)
            estimates.append(estimate_row(label, "ac", d, est))
    else:
        cs = build_candidates(cfg, system)
        ent = estimation.entropy_estimate(system, cfg.quantity, cfg.deltas, cfg.ns, cs,
                                          cfg.method, cfg.threads)
        results.extend(ent.results)
        for d, est in ent.per_delta.items():
            estimates.append(estimate_row(label, cfg.quantity, d, est))

    out = Path(cfg.out)
    manifest = RunManifest(cfg)
    paths = {"results": out / "results.csv", "estimates": out / "estimates.csv",
             "plot": out / "plot_estimates.py", "config": out / "config.ini"}
    _atomic_write(paths["results"], _csv_text(RESULT_COLUMNS, [r.to_row(label) for r in results]))
    _atomic_write(paths["estimates"], _csv_text(ESTIMATE_COLUMNS, estimates))
    _atomic_write(paths["config"], cfg.to_ini())
    emit_plot_script(paths["estimates"], paths["plot"])
    manifest.files = {k: str(v) for k, v in paths.items()}
    manifest.wall_clock = time.perf_counter() - t0
    log.info("analyze %s finished in %.1f s", label, manifest.wall_clock)
    manifest.write(out / "manifest.txt")
    for row in estimates:
        print(f"{row['system']} {row['quantity']} delta={row['delta']} slope={float(row['slope']):.4f} "
              f"r2={float(row['r_squared']):.4f}")
    return manifest


# --------------------------------------------------------------------------
# plot script
# --------------------------------------------------------------------------

_PLOT_TEMPLATE = '''\
"""Log-log separation counts with fitted power laws.

Generated by slowentropy {version}; run with ``python {script}``.
"""
{warning}
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.backends.backend_pdf import PdfPages

HERE = Path(__file__).resolve().parent
ESTIMATES = HERE / {estimates!r}
RESULTS = ESTIMATES.with_name("results.csv")
# series expected in the estimates file
SERIES = {series!r}


def read(path):
    if not path.exists():
        return []
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def main(output=HERE / "plot_estimates.pdf"):
    estimates = read(ESTIMATES)
    points = defaultdict(list)
    for row in read(RESULTS):
        key = float(row["nu"]) if row["nu"] else None
        x = 1.0 / key if key else float(row["n"])
        points[(row["system"], float(row["delta"]))].append((x, int(row["count"])))
    systems = sorted({{row["system"] for row in estimates}}) or [None]
    with PdfPages(output) as pdf:
        for system in systems:
            fig, ax = plt.subplots(figsize=(6, 4.5))
            for row in estimates:
                if row["system"] != system:
                    continue
                delta = float(row["delta"])
                pts = sorted(points.get((system, delta), []))
                if pts:
                    xs, ys = zip(*pts)
                    line, = ax.loglog(xs, ys, "o", label=f"delta={{delta:g}}")
                    color = line.get_color()
                else:
                    color = None
                lo, hi = float(row["n_min"]), float(row["n_max"])
                slope, icpt = float(row["slope"]), float(row["intercept"])
                grid = [lo * (hi / lo) ** (i / 20) for i in range(21)]
                ax.loglog(grid, [2.718281828459045 ** icpt * g ** slope for g in grid], "-",
                          color=color, label=f"fit slope={{slope:.3f}}")
            ax.set_xlabel("n (or 1/nu)")
            ax.set_ylabel("separated count")
            ax.set_title(system or "no estimates")
            if ax.lines:
                ax.legend(fontsize="small")
            pdf.savefig(fig)
            plt.close(fig)
    return output


if __name__ == "__main__":
    print(main())
'''


def emit_plot_script(estimates_csv, script_path=None) -> Path:
    """Write a matplotlib script that renders one page per system in the CSV."""
    estimates_csv = Path(estimates_csv)
    if not estimates_csv.is_file():
        raise FileNotFoundError(f"no estimates file at {estimates_csv}")
    with estimates_csv.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        rows = list(reader)
    if header is not None and tuple(header) != ESTIMATE_COLUMNS:
        raise ConfigError(f"{estimates_csv} does not have the estimates columns")
    script_path = Path(script_path) if script_path else estimates_csv.with_name("plot_estimates.py")
    rel = os.path.relpath(estimates_csv.resolve(), script_path.resolve().parent)
    series = sorted({(r["system"], r["quantity"], r["delta"]) for r in rows})
    warning = "" if rows else "# warning: the estimates file has no rows; the plot will be empty\n"
    text = _PLOT_TEMPLATE.format(version=__version__, script=script_path.name, warning=warning,
                                 estimates=rel, series=series)
    _atomic_write(script_path, text)
    return script_path


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _global_flags(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="root random seed")
    parser.add_argument("--out", default=default, help="output directory")
    parser.add_argument("--threads", type=int, default=default, help="worker threads")
    parser.add_argument("--config", default=default, help="INI configuration file")


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slowentropy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="estimate growth exponents")
    _global_flags(an, suppress=True)
    an.add_argument("--system", choices=SYSTEMS)
    an.add_argument("--quantity", choices=("pow", "mod", "ac"))
    an.add_argument("--deltas", type=_floats)
    an.add_argument("--nus", type=_floats)
    an.add_argument("--n-min", dest="n_min", type=int)
    an.add_argument("--n-max", dest="n_max", type=int)
    an.add_argument("--horizon", type=int)
    an.add_argument("--method", choices=("greedy", "exact"))
    an.add_argument("--exact-limit", dest="exact_limit", type=int)
    an.add_argument("--sampler", choices=("auto", "grid", "xgrid", "random", "centers"))
    an.add_argument("--candidates", type=int)
    an.add_argument("--random-candidates", dest="random_candidates", type=int)
    an.add_argument("--center-step", dest="center_step", type=int)
    an.add_argument("--witness", action="store_const", const=True)
    an.add_argument("--blocks")
    an.add_argument("--rho", type=float)
    an.add_argument("--eps", type=float)
    an.add_argument("--plateau-depth", dest="plateau_depth", type=int)
    an.add_argument("--radius", type=int)
    an.add_argument("--a1", type=int)
    an.add_argument("--b", type=_ints)
    an.add_argument("--depth", type=int)

    ve = sub.add_parser("verify", help="run a verification suite")
    _global_flags(ve, suppress=True)
    ve.add_argument("target", choices=sorted(verify.TARGETS))
    ve.add_argument("--blocks", default=None, help="range such as 3..6")
    ve.add_argument("--depth", type=int, default=4)
    ve.add_argument("--probe-range", dest="probe_range", type=int, default=10_000)
    ve.add_argument("--pairs", type=int, default=1000)
    ve.add_argument("--n-max", dest="n_max", type=int, default=1024)
    ve.add_argument("--horizon", type=int, default=4096)

    tp = sub.add_parser("toeplitz", help="dump a Toeplitz sequence and its densities")
    _global_flags(tp, suppress=True)
    tp.add_argument("--a1", type=int, default=2)
    tp.add_argument("--b", type=_ints, default=None)
    tp.add_argument("--depth", type=int, default=None)
    tp.add_argument("--regular", action="store_true")
    tp.add_argument("--print", dest="print_range", default=None, help="range such as -5..5")
    tp.add_argument("--export", default=None, help="write the symbols to this file")
    tp.add_argument("--densities", default=None, help="write the density table as CSV")

    pl = sub.add_parser("plot", help="emit a plotting script for an estimates CSV")
    _global_flags(pl, suppress=True)
    pl.add_argument("estimates", help="estimates.csv path")
    pl.add_argument("--script", default=None, help="script path (default next to the CSV)")
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        cfg = ExperimentConfig.from_ini(path.read_text())
    overrides = {f.name: getattr(args, f.name) for f in fields(ExperimentConfig)
                 if getattr(args, f.name, None) is not None}
    return ExperimentConfig(**{**asdict(cfg), **overrides})


def _cmd_analyze(args) -> int:
    cfg = _load_config(args).validate()
    manifest = run_analyze(cfg)
    print(f"wrote {manifest.files['results']}, {manifest.files['estimates']}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = _load_config(args)
    target = args.target
    out_dir = Path(cfg.out)
    if target == "counterexample":
        checks = verify.counterexample(verify.parse_range(args.blocks or "3..6"))
    elif target == "toeplitz-irregular":
        checks = verify.toeplitz_irregular(args.depth, args.probe_range)
    elif target == "toeplitz-regular":
        checks = verify.toeplitz_regular(n_max=args.n_max, seed=derive_seed(cfg.seed, target))
    elif target == "inequalities":
        checks = verify.inequalities(args.pairs, cfg.seed)
    else:
        blocks = verify.parse_range(args.blocks or "3..8")
        checks = verify.star_to_bowen(blocks, horizon=args.horizon)
    for chk in checks:
        print(chk.line())
    ok = all(c.passed for c in checks)
    print(f"{target}: {'PASS' if ok else 'FAIL'} ({sum(c.passed for c in checks)}/{len(checks)})")
    manifest = RunManifest(cfg, checks=checks)
    manifest.write(out_dir / f"verify-{target}.txt")
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_toeplitz(args) -> int:
    if args.regular:
        source = toeplitz.RegularToeplitz()
        spec = None
    else:
        spec = toeplitz.ToeplitzSpec(a1=args.a1, b=args.b, depth=args.depth)
        source = spec
    header = source.describe()
    rng = verify.parse_range(args.print_range) if args.print_range else range(0)
    print(f"# {header}" + (f" positions {args.print_range}" if args.print_range else ""))
    if len(rng):
        syms = source.symbols(np.arange(rng.start, rng.stop, dtype=np.int64))
        print("symbols: " + ",".join(str(int(s)) for s in syms))
    if args.export and args.print_range:
        toeplitz.export_sequence(source, rng.start, rng.stop - 1, args.export)
    if spec is not None:
        print("n,period,density,bound")
        acc = 0
        for n, term in enumerate(toeplitz.density_bound_terms(spec, spec.depth), start=1):
            acc += term
            print(f"{n},{spec.a(n + 1)},{toeplitz.periodic_density(spec, n)},{acc}")
        if args.densities:
            toeplitz.export_densities(spec, args.densities)
    return EXIT_OK


def _cmd_plot(args) -> int:
    path = emit_plot_script(args.estimates, args.script)
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {"analyze": _cmd_analyze, "verify": _cmd_verify, "toeplitz": _cmd_toeplitz,
            "plot": _cmd_plot}


def _glue_ranges(argv):
    # "--print -5..5" would otherwise be read as an unknown option
    out = []
    for tok in argv:
        if out and out[-1] in ("--print", "--blocks") and tok.startswith("-"):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_ranges(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except toeplitz.DepthExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEPTH
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, RuntimeError, MemoryError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
