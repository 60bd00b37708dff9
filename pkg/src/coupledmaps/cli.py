"""Command-line experiment runner.

Every subcommand is a pure function of its RunConfig: values come from an
optional flat ``key = value`` config file, overridden by command-line flags.
Output is a CSV with a header row (or JSON); CSV runs written to a file also
get a ``<out>.meta.json`` sidecar recording the config and RNG algorithm.

Exit codes: 0 ok, 2 config error, 3 numerical error during the run.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .dimension import (
    ORACLE_KINDS,
    RNG_ALGORITHM,
    SPECTRUM_CSV_COLUMNS,
    estimate_spectrum,
    oracle_samples,
)
from .ergodic import SampleSet, bifurcation_scan, lyapunov_master, lyapunov_slave
from .errors import (
    DegenerateSample,
    EmptyBall,
    InvalidModel,
    PoorFitWarning,
    SingularOrbit,
)
from .maps import QuadraticMap, SkewSystem, iterate_master, iterate_skew
from .mfmodels import AffineCantorModel, toy_dq, toy_spectrum
from .randan import HISTOGRAM_CSV_COLUMNS, build_noise_sampler, iterate_noisy, stationary_histogram
from .sync import CSV_COLUMNS as SYNC_CSV_COLUMNS
from .sync import sync_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("sync", "lyapunov", "bifurcation", "dq", "randan", "toy")
DQ_SOURCES = ORACLE_KINDS + ("master", "slave")

COLUMNS = {
    "sync": SYNC_CSV_COLUMNS,
    "lyapunov": ("c", "k", "lambda", "n"),
    "bifurcation": ("c", "lyapunov", "classification", "x"),
    "dq": SPECTRUM_CSV_COLUMNS + ("flag",),
    "randan": HISTOGRAM_CSV_COLUMNS,
    "toy_spectrum": ("alpha", "f"),
    "toy_dq": ("q", "dq"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    n: int = 1_000_000
    burn_in: int = 10_000
    out: Optional[str] = None
    format: str = "csv"
    c1: list = field(default_factory=lambda: [0.89])
    c2: list = field(default_factory=lambda: [0.8373351])
    k: Optional[list] = None
    c: Optional[list] = None
    c_min: Optional[float] = None
    c_max: Optional[float] = None
    c_steps: Optional[int] = None
    q_min: float = -5.0
    q_max: float = 5.0
    q_steps: int = 11
    x0: Optional[float] = None
    y0: Optional[float] = None
    tail_start: int = 0
    variant: str = "literal"
    source: str = "slave"
    bins: int = 100
    keep: int = 200
    lambda0: float = math.log(4.0)
    lambda2: float = math.log(4.0)
    alpha: float = 0.3
    n_lambda: int = 101
    table: str = "spectrum"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.n < 2 or self.burn_in < 0 or self.tail_start < 0:
            raise ConfigError("need n >= 2, burn_in >= 0, tail_start >= 0")
        if self.tail_start >= self.n:
            raise ConfigError("tail_start must be below n")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        for name in ("c1", "c2", "c"):
            for v in getattr(self, name) or []:
                if not 0 < v <= 1:
                    raise ConfigError(f"{name}={v} outside (0, 1]")
        for v in self.k or []:
            if not 0 <= v <= 1:
                raise ConfigError(f"k={v} outside [0, 1]")
        for name in ("x0", "y0"):
            v = getattr(self, name)
            if v is not None and not -1 <= v <= 1:
                raise ConfigError(f"{name}={v} outside [-1, 1]")
        if self.variant not in ("literal", "slave_form"):
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.source not in DQ_SOURCES:
            raise ConfigError(f"source must be one of {DQ_SOURCES}")
        if self.table not in ("spectrum", "dq"):
            raise ConfigError("table must be spectrum or dq")
        if self.q_steps < 1 or self.bins < 1 or self.keep < 1 or self.n_lambda < 1:
            raise ConfigError("q_steps, bins, keep and n_lambda must be positive")
        return self

    def c_grid(self) -> list:
        if self.c is not None:
            return sorted(self.c)
        if self.c_min is not None and self.c_max is not None:
            steps = self.c_steps or 101
            return np.linspace(self.c_min, self.c_max, steps).tolist()
        return [self.c1[0]]

    def q_grid(self) -> list:
        return np.linspace(self.q_min, self.q_max, self.q_steps).tolist()

    def initial_conditions(self) -> tuple[float, float]:
        """x0, y0 from the config, else uniform on (-1, 1) from the seed."""
        child = np.random.SeedSequence(self.seed).spawn(1)[0]
        u = np.random.Generator(np.random.PCG64(child)).uniform(-1.0, 1.0, size=2)
        x0 = self.x0 if self.x0 is not None else float(u[0])
        y0 = self.y0 if self.y0 is not None else float(u[1])
        return x0, y0


_LIST_FIELDS = {"c1", "c2", "k", "c"}
_INT_FIELDS = {"seed", "n", "burn_in", "c_steps", "q_steps", "tail_start", "bins", "keep", "n_lambda"}
_FLOAT_FIELDS = {"c_min", "c_max", "q_min", "q_max", "x0", "y0", "lambda0", "lambda2", "alpha"}
_STR_FIELDS = {"out", "format", "variant", "source", "table"}


def _convert(key: str, raw: str):
    try:
        if key in _LIST_FIELDS:
            return [float(v) for v in raw.split(",") if v.strip()]
        if key in _INT_FIELDS:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    if key in _STR_FIELDS:
        return raw.strip()
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = _convert(key, raw)
    return values


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    for name in sorted(_INT_FIELDS | _FLOAT_FIELDS | _STR_FIELDS | _LIST_FIELDS):
        flag = "--" + name.replace("_", "-")
        common.add_argument(flag, dest=name, default=None, metavar=name.upper())
    parser = argparse.ArgumentParser(prog="coupledmaps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub.add_parser(command, parents=[common])
    return parser


def build_config(argv) -> RunConfig:
    parser = _parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise ConfigError("could not parse arguments") from None
    if extra:
        raise ConfigError(f"unrecognized arguments: {' '.join(extra)}")
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    for key, raw in vars(args).items():
        if key in ("command", "config") or raw is None:
            continue
        values[key] = _convert(key, raw)
    values.pop("command", None)
    return RunConfig(command=args.command, **values).validate()


def _run_sync(cfg: RunConfig):
    x0, y0 = cfg.initial_conditions()
    rows = []
    for c1 in sorted(cfg.c1):
        for c2 in sorted(cfg.c2):
            for k in sorted(cfg.k if cfg.k is not None else [0.9]):
                traj = iterate_skew(SkewSystem(c1, c2, k), x0, y0, cfg.n, cfg.burn_in)
                rows.append(sync_report(traj, cfg.tail_start).as_row())
    return COLUMNS["sync"], rows


def _run_lyapunov(cfg: RunConfig):
    x0, y0 = cfg.initial_conditions()
    rows = []
    for c in cfg.c_grid():
        est = lyapunov_master(QuadraticMap(c), x0, cfg.n, cfg.burn_in)
        rows.append({"c": c, "k": "", "lambda": est.value, "n": est.n})
        for k in sorted(cfg.k or []):
            est = lyapunov_slave(SkewSystem(c, cfg.c2[0], k), x0, y0, cfg.n, cfg.burn_in)
            rows.append({"c": c, "k": k, "lambda": est.value, "n": est.n})
    return COLUMNS["lyapunov"], rows


def _run_bifurcation(cfg: RunConfig):
    x0, _ = cfg.initial_conditions()
    rows = []
    for row in bifurcation_scan(cfg.c_grid(), x0, cfg.n, cfg.burn_in, cfg.keep):
        for x in row.attractor_samples:
            rows.append(
                {
                    "c": row.c,
                    "lyapunov": row.lyapunov,
                    "classification": row.classification.value,
                    "x": float(x),
                }
            )
    return COLUMNS["bifurcation"], rows


def _dq_samples(cfg: RunConfig) -> SampleSet:
    if cfg.source in ORACLE_KINDS:
        return oracle_samples(cfg.source, cfg.n, cfg.seed)
    x0, y0 = cfg.initial_conditions()
    if cfg.source == "master":
        return SampleSet(iterate_master(QuadraticMap(cfg.c1[0]), x0, cfg.n, cfg.burn_in))
    k = (cfg.k or [0.9])[0]
    traj = iterate_skew(SkewSystem(cfg.c1[0], cfg.c2[0], k), x0, y0, cfg.n, cfg.burn_in)
    return SampleSet(traj.ys)


def _run_dq(cfg: RunConfig):
    samples = _dq_samples(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PoorFitWarning)
        spectrum = estimate_spectrum(samples, cfg.q_grid())
    rows = []
    for row, fit in zip(spectrum.rows(), spectrum.fits):
        row["flag"] = "POOR_FIT" if fit.poor_fit else ""
        rows.append(row)
    return COLUMNS["dq"], rows


def _run_randan(cfg: RunConfig):
    x0, _ = cfg.initial_conditions()
    sampler = build_noise_sampler(cfg.c2[0], cfg.n, cfg.burn_in, seed=cfg.seed, x0=x0)
    rows = []
    for k in sorted(cfg.k if cfg.k is not None else [0.5]):
        run = iterate_noisy(sampler, k, x0, cfg.n + cfg.burn_in, cfg.variant)
        hist = stationary_histogram(run, cfg.bins, cfg.burn_in)
        for left, right, mass in zip(hist.edges[:-1], hist.edges[1:], hist.masses):
            rows.append(
                {
                    "bin_left": float(left),
                    "bin_right": float(right),
                    "mass": float(mass),
                    "variant": run.variant.value,
                    "k": k,
                    "seed": cfg.seed,
                }
            )
    return COLUMNS["randan"], rows


def _run_toy(cfg: RunConfig):
    model = AffineCantorModel(cfg.lambda0, cfg.lambda2, cfg.alpha)
    if cfg.table == "spectrum":
        spec = toy_spectrum(model, cfg.n_lambda)
        rows = [{"alpha": a, "f": f} for a, f in spec.points()]
        return COLUMNS["toy_spectrum"], rows
    qs = [q for q in cfg.q_grid() if q != 1]
    result = toy_dq(model, qs, cfg.n_lambda)
    rows = [{"q": float(q), "dq": float(d)} for q, d in zip(result.qs, result.dqs)]
    return COLUMNS["toy_dq"], rows


RUNNERS = {
    "sync": _run_sync,
    "lyapunov": _run_lyapunov,
    "bifurcation": _run_bifurcation,
    "dq": _run_dq,
    "randan": _run_randan,
    "toy": _run_toy,
}


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if value == "":
        return None
    return value


def metadata(cfg: RunConfig) -> dict:
    return {
        "package": "coupledmaps",
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "numpy": np.__version__,
        "config": cfg.to_dict(),
    }


def render(cfg: RunConfig, columns, rows) -> str:
    if cfg.format == "json":
        payload = {
            "meta": metadata(cfg),
            "columns": list(columns),
            "rows": [{c: _json_value(row[c]) for c in columns} for row in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def run(cfg: RunConfig) -> str:
    """Execute a validated config and return the rendered table."""
    columns, rows = RUNNERS[cfg.command](cfg)
    return render(cfg, columns, rows)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = build_config(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = run(cfg)
    except (SingularOrbit, DegenerateSample, EmptyBall, InvalidModel, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
        if cfg.format == "csv":
            with open(cfg.out + ".meta.json", "w") as fh:
                fh.write(json.dumps(metadata(cfg), indent=2) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
