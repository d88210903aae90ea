"""stable-info command line front end."""

from __future__ import annotations

import contextlib
import logging
import math
import sys
import typing as t
from dataclasses import dataclass, field, replace
from importlib import metadata
from pathlib import Path

import click
import numpy as np
import simplejson
from singer_sdk import typing as th
from singer_sdk.exceptions import ConfigValidationError
from singer_sdk.plugin_base import PluginBase

from stable_fisher import asymptotics, density, fisher, oracle
from stable_fisher.exceptions import (
    DomainError,
    InvalidParameterError,
    NonConvergenceError,
    SingularPointError,
    UnderflowError,
)
from stable_fisher.params import ALPHA_MAX, StableParams
from stable_fisher.quadrature import QuadConfig
from stable_fisher.sinks import json_value, make_sink

if t.TYPE_CHECKING:
    from collections.abc import Iterator, Sequence
    from pathlib import PurePath

THREADS_ENV = "STABLE_INFO_THREADS"

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_NONCONVERGED = 3

COMMANDS = (
    "density",
    "score",
    "fisher",
    "compare-asymptotics",
    "table1",
    "sweep",
    "verify",
)

Grid = tuple[float, float, int]


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, after all config sources are merged."""

    command: str
    params: StableParams = field(default_factory=StableParams)
    grid: Grid | None = None
    deltas: tuple[float, ...] = ()
    entry: tuple[str, str] = ("alpha", "alpha")
    output: str | None = None
    format: str = "csv"
    quad: QuadConfig = field(default_factory=QuadConfig)
    delta_knob: float = asymptotics.DEFAULT_DELTA_KNOB
    plan_T: float = fisher.DEFAULT_T
    threads: int = 1
    asymptotic: bool = False
    include_fisher: bool = False

    def __post_init__(self) -> None:
        """Check the fields that depend on the command."""
        if self.command not in COMMANDS:
            msg = f"unknown command {self.command!r}"
            raise ValueError(msg)
        if self.format not in ("csv", "json"):
            msg = f"--format must be csv or json, got {self.format!r}"
            raise ValueError(msg)
        if self.grid is not None:
            check_grid(self.grid)

    def xs(self) -> np.ndarray:
        """Grid points in order."""
        if self.grid is None:
            msg = f"{self.command} needs --grid"
            raise click.UsageError(msg)
        start, stop, n = self.grid
        return np.linspace(start, stop, n)


def check_grid(grid: Grid) -> None:
    """Reject a degenerate ``start:stop:n`` grid."""
    start, stop, n = grid
    if n < 1:
        msg = f"--grid needs at least one point, got n={n}"
        raise ValueError(msg)
    if n == 1 and start != stop:
        msg = "--grid with one point needs start == stop"
        raise ValueError(msg)
    if n > 1 and not stop > start:
        msg = f"--grid needs start < stop, got {start}:{stop}"
        raise ValueError(msg)


def parse_grid(text: str) -> Grid:
    """Parse ``start:stop:n``."""
    parts = text.split(":")
    if len(parts) != 3:
        msg = f"--grid expects start:stop:n, got {text!r}"
        raise ValueError(msg)
    grid = (float(parts[0]), float(parts[1]), int(parts[2]))
    check_grid(grid)
    return grid


def _version() -> str:
    try:
        return metadata.version(StableInfo.package_name)
    except metadata.PackageNotFoundError:
        return "0.0.0"


def emit_comparison(
    xs: Sequence[float],
    alpha: float,
    beta: float,
    delta_knob: float = asymptotics.DEFAULT_DELTA_KNOB,
    cfg: QuadConfig | None = None,
) -> list[dict[str, t.Any]]:
    """Exact density and derivative next to the core plus tail approximation.

    Columns: x, regime, f_exact, g_approx, rel_err, fprime_exact,
    gprime_approx, rel_err_prime. The derivative cells are nan at x = zeta.
    """
    quad = cfg or QuadConfig()
    rows = []
    for x in xs:
        x = float(x)
        regime = asymptotics.classify(x, alpha, delta_knob, beta).kind.value
        f = density.density_std(x, alpha, beta, quad).value
        g = asymptotics.g_density(x, alpha, beta)
        try:
            fp = density.density_deriv_std(x, alpha, beta, quad).value
        except SingularPointError:
            fp = math.nan
        gp = asymptotics.g_deriv(x, alpha, beta)
        rows.append(
            {
                "x": x,
                "regime": regime,
                "f_exact": f,
                "g_approx": g,
                "rel_err": _relative(f, g),
                "fprime_exact": fp,
                "gprime_approx": gp,
                "rel_err_prime": _relative(fp, gp),
            }
        )
    return rows


def _relative(exact: float, approx: float) -> float:
    if not (math.isfinite(exact) and math.isfinite(approx)) or approx == 0.0:
        return math.nan
    return exact / approx - 1.0


class StableInfo(PluginBase):
    """Runner behind the ``stable-info`` command."""

    name = "stable-info"
    package_name = "stable-fisher"
    cli: t.ClassVar[click.Group]

    config_jsonschema = th.PropertiesList(
        th.Property("alpha", th.NumberType, default=2.0, description="Exponent in (1, 2]"),
        th.Property("beta", th.NumberType, default=0.0, description="Skewness, |beta| <= 0.999"),
        th.Property("mu", th.NumberType, default=0.0, description="Location"),
        th.Property("sigma", th.NumberType, default=1.0, description="Scale, positive"),
        th.Property(
            "abs_tol",
            th.NumberType,
            default=1e-10,
            description="Absolute tolerance of every quadrature call",
        ),
        th.Property(
            "rel_tol",
            th.NumberType,
            default=1e-8,
            description="Relative tolerance of every quadrature call",
        ),
        th.Property(
            "max_subdivisions",
            th.IntegerType,
            default=2000,
            description="Subinterval limit handed to the adaptive driver",
        ),
        th.Property(
            "max_evaluations",
            th.IntegerType,
            description="Optional cap on integrand evaluations per quadrature call",
        ),
        th.Property(
            "delta_knob",
            th.NumberType,
            default=asymptotics.DEFAULT_DELTA_KNOB,
            description="Width d of the crossover band, in (0, 1)",
        ),
        th.Property(
            "plan_T",
            th.NumberType,
            default=fisher.DEFAULT_T,
            description="First cut point of the Fisher interval plan",
        ),
        th.Property(
            "strict",
            th.BooleanType,
            default=True,
            description=(
                "Fail with exit code 3 on a non-converged quadrature. "
                + "In lenient mode the failure is logged and the best estimate kept."
            ),
        ),
        th.Property(
            "format",
            th.StringType,
            default="csv",
            allowed_values=["csv", "json"],
            description="Output format",
        ),
        th.Property(
            "threads",
            th.IntegerType,
            default=1,
            description=f"Worker threads; {THREADS_ENV} supplies the default",
        ),
    ).to_dict()

    def __init__(
        self,
        config: dict | PurePath | str | list[PurePath | str] | None = None,
        parse_env_config: bool = False,
        validate_config: bool = True,
        overrides: dict[str, t.Any] | None = None,
    ) -> None:
        """Layer config files, environment and command line values.

        Args:
            config: Settings as a dictionary, one path to a JSON file or a list
                of paths; later files win.
            parse_env_config: Whether to read ``STABLE_INFO_<SETTING>``
                environment variables, which override the files.
            validate_config: True to require validation of config settings.
            overrides: Command line values, applied last; None entries are
                skipped.
        """
        super().__init__(
            config=config,
            parse_env_config=parse_env_config,
            validate_config=False,
        )
        self._config.update(
            {key: value for key, value in (overrides or {}).items() if value is not None}
        )
        _coerce_text(self._config, self.config_jsonschema)
        for key, prop in self.config_jsonschema["properties"].items():
            if "default" in prop:
                self._config.setdefault(key, prop["default"])
        if validate_config:
            self._validate_config(raise_errors=True)

        assert self.config["abs_tol"] > 0 or self.config["rel_tol"] > 0, (
            "abs_tol or rel_tol must be positive"
        )
        assert self.config["threads"] >= 1, "threads must be at least 1"
        assert 0.0 < self.config["delta_knob"] < 1.0, "delta_knob must lie in (0, 1)"
        assert self.config["plan_T"] > 0, "plan_T must be positive"

    def quad_config(self) -> QuadConfig:
        """Quadrature settings from the merged config."""
        return QuadConfig(
            abs_tol=self.config["abs_tol"],
            rel_tol=self.config["rel_tol"],
            max_subdivisions=self.config["max_subdivisions"],
            max_evaluations=self.config.get("max_evaluations"),
            strict=self.config["strict"],
        )

    def params(self) -> StableParams:
        """Parameters from the merged config."""
        return StableParams(
            mu=self.config["mu"],
            sigma=self.config["sigma"],
            alpha=self.config["alpha"],
            beta=self.config["beta"],
        )

    def run_config(self, command: str, **options: t.Any) -> RunConfig:
        """Build the RunConfig for one command."""
        return RunConfig(
            command=command,
            params=self.params(),
            format=self.config["format"],
            quad=self.quad_config(),
            delta_knob=self.config["delta_knob"],
            plan_T=self.config["plan_T"],
            threads=self.config["threads"],
            **options,
        )

    def meta(self, cfg: RunConfig, args: dict[str, t.Any]) -> dict[str, t.Any]:
        """Metadata written ahead of every table; nothing time dependent."""
        rendered = " ".join(
            f"{k}={v}" for k, v in sorted(args.items()) if v is not None and v != ()
        )
        return {
            "program": f"{self.name} {_version()}",
            "command": cfg.command,
            "args": rendered,
            "abs_tol": cfg.quad.abs_tol,
            "rel_tol": cfg.quad.rel_tol,
            "strict": cfg.quad.strict,
        }

    def run(self, cfg: RunConfig, args: dict[str, t.Any] | None = None) -> int:
        """Execute one command and write its table.

        Returns:
            0 on success, 2 on parameter errors, 3 on a non-converged
            quadrature in strict mode (and on a failed check in ``verify``).
        """
        try:
            if cfg.command == "verify":
                return self._verify(cfg)
            columns, rows = self._table(cfg)
        except (InvalidParameterError, DomainError) as exc:
            click.echo(f"Error: {exc}", err=True)
            return EXIT_PARAMETER
        except NonConvergenceError as exc:
            click.echo(
                f"Error: {exc} (best estimate {exc.best_estimate!r}, "
                f"error {exc.abs_error!r})",
                err=True,
            )
            return EXIT_NONCONVERGED
        with _open_output(cfg.output) as stream:
            sink = make_sink(cfg.format, stream, columns, self.meta(cfg, args or {}))
            sink.write_all(rows)
        self.logger.info("wrote %d rows for %s", len(rows), cfg.command)
        return EXIT_OK

    def _table(self, cfg: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        handlers = {
            "density": self._density,
            "score": self._score,
            "fisher": self._fisher,
            "compare-asymptotics": self._compare,
            "table1": self._table1,
            "sweep": self._sweep,
        }
        return handlers[cfg.command](cfg)

    def _density(self, cfg: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        xs = cfg.xs()
        values = density.density_grid(xs, cfg.params, cfg.quad, cfg.threads)
        rows = [
            {
                "x": float(x),
                "density": r.value,
                "abs_error": r.abs_error,
                "method": r.method.value,
            }
            for x, r in zip(xs, values)
        ]
        return ["x", "density", "abs_error", "method"], rows

    def _score(self, cfg: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        p = cfg.params
        point_cfg = replace(fisher.POINT_CONFIG, strict=cfg.quad.strict)
        rows = []
        for x in cfg.xs():
            x_std = (float(x) - p.mu) / p.sigma
            try:
                s = fisher.score_vector(x_std, p.alpha, p.beta, point_cfg)
                values = (s.s_mu / p.sigma, s.s_sigma / p.sigma, s.s_alpha, s.s_beta)
            except UnderflowError as exc:
                self.logger.warning("%s", exc)
                values = (math.nan,) * 4
            rows.append(
                {"x": float(x), **dict(zip(("s_mu", "s_sigma", "s_alpha", "s_beta"), values))}
            )
        return ["x", "s_mu", "s_sigma", "s_alpha", "s_beta"], rows

    def _fisher_quad(self, cfg: RunConfig) -> QuadConfig:
        return replace(
            fisher.FISHER_CONFIG,
            strict=cfg.quad.strict,
            max_evaluations=cfg.quad.max_evaluations,
        )

    def _plan(self, cfg: RunConfig, alpha: float) -> fisher.IntervalPlan | None:
        if alpha == ALPHA_MAX:
            return None
        return fisher.make_interval_plan(alpha, cfg.plan_T, cfg.delta_knob)

    def _fisher(self, cfg: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        p = cfg.params
        if cfg.asymptotic:
            matrix = fisher.fisher_asymptotic(p.alpha, p.beta)
        else:
            matrix = fisher.fisher_matrix(
                p.alpha,
                p.beta,
                self._plan(cfg, p.alpha),
                self._fisher_quad(cfg),
                cfg.threads,
            )
        return ["row", "col", "value", "abs_error", "provenance", "order"], matrix.as_rows()

    def _table1(self, _: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        rows = fisher.table1_limits().as_rows()
        return ["row", "col", "value", "provenance"], rows

    def _compare(self, cfg: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        p = cfg.params
        rows = emit_comparison(cfg.xs(), p.alpha, p.beta, cfg.delta_knob, cfg.quad)
        columns = [
            "x",
            "regime",
            "f_exact",
            "g_approx",
            "rel_err",
            "fprime_exact",
            "gprime_approx",
            "rel_err_prime",
        ]
        return columns, rows

    def _sweep(self, cfg: RunConfig) -> tuple[list[str], list[dict[str, t.Any]]]:
        if not cfg.deltas:
            msg = "sweep needs --deltas"
            raise click.UsageError(msg)
        i, j = cfg.entry
        beta = cfg.params.beta
        rows = []
        for delta in cfg.deltas:
            alpha = ALPHA_MAX - delta
            exact, error = fisher.fisher_entry(
                i, j, alpha, beta, self._plan(cfg, alpha), self._fisher_quad(cfg)
            )
            approx = fisher.fisher_asymptotic(alpha, beta).entry(i, j)
            rows.append(
                {
                    "delta": delta,
                    "exact": exact,
                    "abs_error": error,
                    "asymptotic": approx,
                    "ratio": exact / approx if approx != 0.0 else math.nan,
                }
            )
        return ["delta", "exact", "abs_error", "asymptotic", "ratio"], rows

    def _verify(self, cfg: RunConfig) -> int:
        failed = 0
        with _open_output(cfg.output) as stream:
            for report in oracle.verify_all(include_fisher=cfg.include_fisher):
                line = simplejson.dumps(
                    json_value(report.to_record()), use_decimal=True, sort_keys=True
                )
                stream.write(line + "\n")
                if not report.passed:
                    failed += 1
                    self.logger.warning("check failed: %s", report.quantity)
        if failed and cfg.quad.strict:
            return EXIT_NONCONVERGED
        return EXIT_OK


@contextlib.contextmanager
def _open_output(path: str | None) -> Iterator[t.TextIO]:
    """Yield stdout, or a file opened for writing."""
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        yield handle


def _coerce_text(settings: dict[str, t.Any], schema: dict[str, t.Any]) -> None:
    """Convert settings that arrived as text, as environment values do, to their type.

    Text that does not parse is left alone for validation to reject.
    """
    for key, prop in schema["properties"].items():
        value = settings.get(key)
        if not isinstance(value, str):
            continue
        kinds = prop.get("type", ())
        kinds = (kinds,) if isinstance(kinds, str) else tuple(kinds)
        with contextlib.suppress(ValueError):
            if "integer" in kinds:
                settings[key] = int(value)
            elif "number" in kinds:
                settings[key] = float(value)
            elif "boolean" in kinds and value.lower() in ("true", "false"):
                settings[key] = value.lower() == "true"


def _grid_option(_: click.Context, __: click.Parameter, value: str | None) -> Grid | None:
    if value is None:
        return None
    try:
        return parse_grid(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


def _deltas_option(
    _: click.Context, __: click.Parameter, value: str | None
) -> tuple[float, ...]:
    if value is None:
        return ()
    try:
        deltas = tuple(float(v) for v in value.split(","))
    except ValueError:
        msg = f"expected comma separated numbers, got {value!r}"
        raise click.BadParameter(msg) from None
    if any(not 0.0 < d < 1.0 for d in deltas):
        msg = "every delta must lie in (0, 1)"
        raise click.BadParameter(msg)
    return deltas


def _entry_option(_: click.Context, __: click.Parameter, value: str) -> tuple[str, str]:
    parts = value.split(",")
    if len(parts) != 2:
        msg = f"expected two parameter names like alpha,alpha, got {value!r}"
        raise click.BadParameter(msg)
    for name in parts:
        try:
            fisher.param_index(name)
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from None
    return parts[0], parts[1]


_SHARED_OPTIONS = [
    click.option("--alpha", type=float, help="Characteristic exponent in (1, 2]."),
    click.option("--beta", type=float, help="Skewness, |beta| <= 0.999."),
    click.option("--mu", type=float, help="Location."),
    click.option("--sigma", type=float, help="Scale."),
    click.option("--format", "output_format", type=click.Choice(["csv", "json"])),
    click.option("--output", type=click.Path(dir_okay=False), help="File, default stdout."),
    click.option("--strict/--lenient", "strict", default=None),
    click.option("--threads", type=int, help=f"Worker threads (default ${THREADS_ENV})."),
    click.option("--abs-tol", "abs_tol", type=float),
    click.option("--rel-tol", "rel_tol", type=float),
    click.option("--delta-knob", "delta_knob", type=float),
    click.option(
        "--config",
        "config_paths",
        multiple=True,
        type=click.Path(exists=True, dir_okay=False),
        help="JSON config file; may be repeated, later files win.",
    ),
]


def _shared(func: t.Callable) -> t.Callable:
    for option in reversed(_SHARED_OPTIONS):
        func = option(func)
    return func


_FLAG_KEYS = (
    "alpha",
    "beta",
    "mu",
    "sigma",
    "strict",
    "threads",
    "abs_tol",
    "rel_tol",
    "delta_knob",
)


def _invoke(command: str, shared: dict[str, t.Any], **options: t.Any) -> None:
    """Layer config sources, run the command and exit with its code."""
    overrides = {key: shared.get(key) for key in _FLAG_KEYS}
    overrides["format"] = shared.get("output_format")
    try:
        runner = StableInfo(
            config=list(shared.pop("config_paths", ())),
            parse_env_config=True,
            overrides=overrides,
        )
        cfg = runner.run_config(command, output=shared.get("output"), **options)
    except (
        AssertionError,
        ConfigValidationError,
        InvalidParameterError,
        ValueError,
    ) as exc:
        raise click.UsageError(str(exc)) from None
    # plugin setup may reconfigure the root logger
    log_level = click.get_current_context().find_root().params["log_level"]
    logging.getLogger().setLevel(log_level)
    args = {k: v for k, v in shared.items() if k != "output"}
    args.update({k: v for k, v in options.items() if k != "grid"})
    if cfg.grid is not None:
        args["grid"] = ":".join(str(v) for v in cfg.grid)
    sys.exit(runner.run(cfg, args))


def build_cli() -> click.Group:
    """Assemble the click group."""

    @click.group(name=StableInfo.name)
    @click.version_option(package_name=StableInfo.package_name)
    @click.option(
        "--log-level",
        type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]),
        default="WARNING",
        show_default=True,
    )
    def cli(log_level: str) -> None:
        """Stable densities, scores and Fisher information."""
        logging.basicConfig(
            level=log_level,
            stream=sys.stderr,
            format="%(asctime)s %(name)s %(levelname)s %(message)s",
        )

    @cli.command("density")
    @click.option("--grid", callback=_grid_option, default="-5:5:11", show_default=True)
    @_shared
    def density_cmd(grid: Grid, **shared: t.Any) -> None:
        """Density on a grid of x values."""
        _invoke("density", shared, grid=grid)

    @cli.command("score")
    @click.option("--grid", callback=_grid_option, default="-5:5:11", show_default=True)
    @_shared
    def score_cmd(grid: Grid, **shared: t.Any) -> None:
        """Score vector on a grid of x values."""
        _invoke("score", shared, grid=grid)

    @cli.command("fisher")
    @click.option("--asymptotic", is_flag=True, help="Leading-order matrix instead.")
    @_shared
    def fisher_cmd(asymptotic: bool, **shared: t.Any) -> None:
        """The 4x4 information matrix."""
        _invoke("fisher", shared, asymptotic=asymptotic)

    @cli.command("compare-asymptotics")
    @click.option("--grid", callback=_grid_option, default="-10:10:21", show_default=True)
    @_shared
    def compare_cmd(grid: Grid, **shared: t.Any) -> None:
        """Exact density against the core plus tail approximation."""
        _invoke("compare-asymptotics", shared, grid=grid)

    @cli.command("table1")
    @_shared
    def table1_cmd(**shared: t.Any) -> None:
        """Limits of the information matrix as alpha -> 2."""
        _invoke("table1", shared)

    @cli.command("sweep")
    @click.option("--entry", callback=_entry_option, default="alpha,alpha", show_default=True)
    @click.option("--deltas", callback=_deltas_option, required=True)
    @_shared
    def sweep_cmd(entry: tuple[str, str], deltas: tuple[float, ...], **shared: t.Any) -> None:
        """One information entry against its asymptote over several deltas."""
        _invoke("sweep", shared, entry=entry, deltas=deltas)

    @cli.command("verify")
    @click.option("--fisher", "include_fisher", is_flag=True, help="Also check the matrix.")
    @_shared
    def verify_cmd(include_fisher: bool, **shared: t.Any) -> None:
        """Compare the pipeline with independent references, as JSON lines."""
        _invoke("verify", shared, include_fisher=include_fisher)

    return cli


StableInfo.cli = build_cli()
