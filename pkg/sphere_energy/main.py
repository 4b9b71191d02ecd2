"""
CLI entry point for Sphere Energy.
Provides commands: energy, verify, construct, kernel, predict, sweep, fit
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Literal, Optional, Sequence

import pandas as pd
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from sphere_energy.asymptotics.sweep import parse_kind
from sphere_energy.config import settings
from sphere_energy.core.errors import DomainError, FitError, PointSetFormatError, SingularInputError
from sphere_energy.core.generators import generate_fibonacci, generate_random_uniform
from sphere_energy.core.geometry import PointSet, load_point_set
from sphere_energy.designs.constructor import ConstructionOptions
from sphere_energy.orchestrator import Orchestrator

log = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_SINGULAR = 3

def setup_logging(verbose: bool = False, log_file: Optional[str] = None):
    """Route structlog through stdlib logging to stderr (stdout carries results)."""
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    log_file = log_file or settings.log_file
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format="%(message)s", handlers=handlers, force=True)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.format_exc_info,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def load_json_file(filepath: str) -> dict:
    """Load JSON configuration file."""
    path = Path(filepath)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {filepath}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DomainError(f"Invalid JSON in {filepath}: {e}")


class RunConfig(BaseModel):
    """Validated arguments of one CLI invocation."""

    model_config = ConfigDict(extra="ignore")

    command: Literal["energy", "verify", "construct", "kernel", "predict", "sweep", "fit"]

    # point-set input
    file: Optional[str] = None
    generator: Optional[Literal["fibonacci", "random"]] = None

    d: int = Field(default=2, ge=2)
    t: Optional[int] = Field(default=None, ge=0)
    N: Optional[int] = Field(default=None, ge=1)
    s: Optional[float] = Field(default=None, gt=0)
    lam: Optional[float] = Field(default=None, gt=0)
    nmax: Optional[int] = Field(default=None, ge=1)
    kind: Optional[str] = None
    seed: int = 0

    tolerance: Optional[float] = Field(default=None, gt=0)
    spot_checks: int = Field(default=8, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)
    deterministic: Optional[bool] = None
    persist: Optional[bool] = None
    cache_dir: Optional[str] = None

    output: Optional[str] = None
    format: Literal["json", "csv"] = "json"

    # construct
    options: Optional[str] = None
    save: Optional[str] = None
    reuse: bool = True

    # kernel
    grid: int = Field(default=101, ge=1)

    # sweep
    source: Literal["designs", "files", "fibonacci", "random"] = "designs"
    kinds: List[str] = Field(default_factory=list)
    t_values: List[int] = Field(default_factory=list)
    N_values: List[int] = Field(default_factory=list)
    files: List[str] = Field(default_factory=list)
    fit: bool = False

    # fit
    input: Optional[str] = None
    fit_kind: Optional[str] = None
    model: Literal["power", "log_trend"] = "power"
    normalize: float = 2.0

    @field_validator("kind")
    @classmethod
    def check_kind(cls, v):
        if v is not None and v not in ("log", "riesz"):
            raise ValueError(f"kind must be 'log' or 'riesz', got {v!r}")
        return v

    @field_validator("kinds")
    @classmethod
    def check_kinds(cls, v):
        for label in v:
            parse_kind(label)
        return v

    @field_validator("fit_kind")
    @classmethod
    def check_fit_kind(cls, v):
        if v is not None:
            parse_kind(v)
        return v

    @field_validator("t_values")
    @classmethod
    def check_t_values(cls, v):
        if any(t < 1 for t in v):
            raise ValueError("sweep t values must be >= 1")
        return v

    @field_validator("N_values")
    @classmethod
    def check_N_values(cls, v):
        if any(n < 2 for n in v):
            raise ValueError("sweep N values must be >= 2")
        return v

    @model_validator(mode="after")
    def check_command(self):
        c = self.command
        if c in ("energy", "verify") and not (self.file or self.generator):
            raise ValueError(f"{c} needs --file or --generator")
        if self.generator and self.N is None and c in ("energy", "verify"):
            raise ValueError("--generator needs --N")
        if c in ("energy", "kernel", "predict") and self.kind is None:
            raise ValueError(f"{c} needs --kind")
        if self.kind == "riesz" and c in ("energy", "kernel", "predict") and self.s is None:
            raise ValueError("riesz kind needs --s")
        if c in ("verify", "construct") and (self.t is None or self.t < 1):
            raise ValueError(f"{c} needs --t >= 1")
        if c == "kernel" and self.t is None:
            raise ValueError("kernel needs --t")
        if c == "predict" and self.N is None:
            raise ValueError("predict needs --N")
        if c == "sweep" and not self.kinds:
            raise ValueError("sweep needs at least one --kinds entry")
        if c == "fit" and not self.input:
            raise ValueError("fit needs --input")
        if self.t is not None and self.nmax is not None and self.nmax < self.t:
            raise ValueError(f"nmax={self.nmax} must be >= t={self.t}")
        if self.lam is not None and c in ("energy", "kernel"):
            if self.kind == "riesz" and (self.lam <= self.s - 1 or self.lam - self.s / 2 + 0.5 <= 0):
                raise ValueError(f"lambda={self.lam} violates lambda > s - 1 for s={self.s}")
            if self.kind == "log" and self.lam <= self.d + 1:
                raise ValueError(f"log expansion needs lambda > d + 1, got {self.lam}")
        return self


# ============================================================
# OUTPUT
# ============================================================

def emit(payload: Any, fmt: str = "json", output: Optional[str] = None):
    """Write a result as JSON or CSV to output (or stdout)."""
    if isinstance(payload, pd.DataFrame):
        text = payload.to_csv(index=False) if fmt == "csv" else payload.to_json(orient="records", indent=2)
    elif fmt == "csv":
        text = pd.json_normalize(payload).to_csv(index=False)
    else:
        text = json.dumps(payload, indent=2)

    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n")
        log.info("result_written", path=str(path))
    else:
        print(text)


def resolve_point_set(config: RunConfig) -> PointSet:
    if config.file:
        return load_point_set(config.file, config.d)
    if config.generator == "fibonacci":
        return generate_fibonacci(config.N, config.d)
    return generate_random_uniform(config.d, config.N, config.seed)


def construction_options(config: RunConfig) -> ConstructionOptions:
    data = load_json_file(config.options) if config.options else {}
    if config.tolerance is not None:
        data["tolerance"] = config.tolerance
    if config.threads is not None:
        data["threads"] = config.threads
    return ConstructionOptions(**data)


# ============================================================
# COMMANDS
# ============================================================

def cmd_energy(config: RunConfig, orchestrator: Orchestrator):
    """Run energy command."""
    X = resolve_point_set(config)
    return orchestrator.run_energy(X, config.kind, config.s, config.t, config.lam, config.nmax)


def cmd_verify(config: RunConfig, orchestrator: Orchestrator):
    """Run verify command."""
    X = resolve_point_set(config)
    return orchestrator.run_verify(X, config.t, config.tolerance, config.spot_checks, config.seed)


def cmd_construct(config: RunConfig, orchestrator: Orchestrator):
    """Run construct command."""
    return orchestrator.run_construct(
        d=config.d,
        t=config.t,
        N=config.N,
        seed=config.seed,
        options=construction_options(config),
        output=config.save,
        reuse=config.reuse,
    )


def cmd_kernel(config: RunConfig, orchestrator: Orchestrator):
    """Run kernel command."""
    return orchestrator.run_kernel(config.kind, config.d, config.t, config.s, config.lam, config.nmax, config.grid)


def cmd_predict(config: RunConfig, orchestrator: Orchestrator):
    """Run predict command."""
    return orchestrator.run_predict(config.kind, config.d, config.N, config.s, config.t)


def cmd_sweep(config: RunConfig, orchestrator: Orchestrator):
    """Run sweep command."""
    records, fits = orchestrator.run_sweep(
        source=config.source,
        d=config.d,
        kinds=config.kinds,
        t_values=config.t_values,
        N_values=config.N_values,
        paths=config.files,
        seed=config.seed,
        options=construction_options(config) if config.source == "designs" else None,
        threads=config.threads or 1,
        fit=config.fit,
    )
    failed = sum(1 for r in records if r.error)
    if failed:
        log.warning("sweep_records_failed", failed=failed, total=len(records))
    if fits:
        for label, fit in fits.items():
            log.info("sweep_fit", kind=label, **fit)
    frame = orchestrator.records_frame(records)
    if config.format == "csv":
        return frame
    return {"records": orchestrator.to_safe_json(frame.to_dict(orient="records")), "fits": fits}


def cmd_fit(config: RunConfig, orchestrator: Orchestrator):
    """Run fit command."""
    if not Path(config.input).exists():
        raise FileNotFoundError(f"File not found: {config.input}")
    result = orchestrator.run_fit(config.input, config.model, config.fit_kind, config.normalize)
    return result.to_dict()


COMMAND_HANDLERS = {
    "energy": cmd_energy,
    "verify": cmd_verify,
    "construct": cmd_construct,
    "kernel": cmd_kernel,
    "predict": cmd_predict,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
}


# ============================================================
# PARSER
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Sphere Energy - energies, t-designs and asymptotics on S^d',
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable verbose logging')
    parser.add_argument('--log-file', help='Also write logs to this file')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--d', type=int, help='Sphere dimension (default: 2)')
    common.add_argument('--seed', type=int, help='Random seed (default: 0)')
    common.add_argument('--threads', type=int, help='Worker threads')
    common.add_argument('--deterministic', action=argparse.BooleanOptionalAction, default=None,
                        help='Fixed reduction order for pairwise sums')
    common.add_argument('--persist', action=argparse.BooleanOptionalAction, default=None,
                        help='Store and reuse runs in the database')
    common.add_argument('--cache-dir', dest='cache_dir', help='Kernel-coefficient cache directory')
    common.add_argument('--output', help='Write the result to this file instead of stdout')
    common.add_argument('--format', choices=['json', 'csv'], help='Output format (default: json)')
    common.add_argument('--config', help='JSON file with defaults for this command')

    points = argparse.ArgumentParser(add_help=False)
    points.add_argument('--file', help='Point-set file')
    points.add_argument('--generator', choices=['fibonacci', 'random'], help='Generate the point set instead')
    points.add_argument('--N', type=int, help='Number of generated points')

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument('--kind', choices=['log', 'riesz'], help='Energy kind')
    series.add_argument('--s', type=float, help='Riesz exponent')
    series.add_argument('--lambda', dest='lam', type=float, help='Expansion parameter lambda')
    series.add_argument('--nmax', type=int, help='Series truncation degree')

    subparsers = parser.add_subparsers(dest='command', help='Command to run')

    energy_parser = subparsers.add_parser('energy', parents=[common, points, series], help='Energy of a point set')
    energy_parser.add_argument('--t', type=int, help='Also split the kernel at degree t')

    verify_parser = subparsers.add_parser('verify', parents=[common, points], help='Certify a t-design')
    verify_parser.add_argument('--t', type=int, required=True, help='Design strength')
    verify_parser.add_argument('--tolerance', type=float, help='Total residual tolerance')
    verify_parser.add_argument('--spot-checks', dest='spot_checks', type=int, help='Random monomials to cross-check')

    construct_parser = subparsers.add_parser('construct', parents=[common], help='Construct a t-design')
    construct_parser.add_argument('--t', type=int, required=True, help='Design strength')
    construct_parser.add_argument('--N', type=int, help='Number of points (default: (t+1)^d)')
    construct_parser.add_argument('--options', help='Construction options JSON')
    construct_parser.add_argument('--tolerance', type=float, help='Total residual tolerance')
    construct_parser.add_argument('--save', help='Write the point set to this file')
    construct_parser.add_argument('--no-reuse', dest='reuse', action='store_false', default=None,
                                  help='Construct even if a stored design exists')

    kernel_parser = subparsers.add_parser('kernel', parents=[common, series], help='Tabulate the kernel split')
    kernel_parser.add_argument('--t', type=int, required=True, help='Split degree')
    kernel_parser.add_argument('--grid', type=int, help='Grid points in (-1, 1)')

    predict_parser = subparsers.add_parser('predict', parents=[common], help='Asymptotic energy prediction')
    predict_parser.add_argument('--kind', choices=['log', 'riesz'], help='Energy kind')
    predict_parser.add_argument('--s', type=float, help='Riesz exponent')
    predict_parser.add_argument('--N', type=int, help='Number of points')
    predict_parser.add_argument('--t', type=int, help='Design strength (needed for s = d)')

    sweep_parser = subparsers.add_parser('sweep', parents=[common], help='Measured against predicted energies')
    sweep_parser.add_argument('--source', choices=['designs', 'files', 'fibonacci', 'random'], help='Point-set source')
    sweep_parser.add_argument('--kinds', nargs='+', help="Energy kinds: 'log', 'riesz:<s>'")
    sweep_parser.add_argument('--t-values', dest='t_values', nargs='+', type=int, help='Design strengths')
    sweep_parser.add_argument('--N-values', dest='N_values', nargs='+', type=int, help='Point counts')
    sweep_parser.add_argument('--files', nargs='+', help='Point-set files')
    sweep_parser.add_argument('--options', help='Construction options JSON')
    sweep_parser.add_argument('--tolerance', type=float, help='Design tolerance')
    sweep_parser.add_argument('--fit', action='store_true', default=None, help='Fit the residual exponent per kind')

    fit_parser = subparsers.add_parser('fit', parents=[common], help='Fit a sweep CSV')
    fit_parser.add_argument('--input', help='Sweep CSV')
    fit_parser.add_argument('--model', choices=['power', 'log_trend'], help='Fit model')
    fit_parser.add_argument('--kind', dest='fit_kind', help="Restrict to one kind: 'log' or 'riesz:<s>'")
    fit_parser.add_argument('--normalize', type=float, help='log_trend divides the residual by N^normalize')

    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    """Merge --config defaults with the explicit flags and validate."""
    data = load_json_file(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if key in ("config", "verbose", "log_file") or value is None:
            continue
        data[key] = value
    data["command"] = args.command
    return RunConfig(**data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_INVALID

    # Setup logging
    setup_logging(args.verbose, args.log_file)

    # Execute command
    try:
        config = make_config(args)
        orchestrator = Orchestrator(
            persist=config.persist,
            threads=config.threads,
            deterministic=config.deterministic,
            cache_dir=config.cache_dir,
        )
        result = COMMAND_HANDLERS[config.command](config, orchestrator)
        emit(result, config.format, config.output)
        return EXIT_OK
    except SingularInputError as e:
        log.error("singular_input", command=args.command, error=str(e), pairs=e.pairs[:10])
        return EXIT_SINGULAR
    except (DomainError, PointSetFormatError, FitError, ValidationError, FileNotFoundError) as e:
        log.error("invalid_input", command=args.command, error=str(e))
        return EXIT_INVALID
    except KeyboardInterrupt:
        log.info("cancelled_by_user", command=args.command)
        return EXIT_OK
    except Exception as e:
        log.exception("command_failed", command=args.command, error=str(e))
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
