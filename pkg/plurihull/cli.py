import logging
from time import perf_counter

from click import UsageError, argument, command, option
from dotenv import load_dotenv

from .config import COMMANDS, CURRENT_CONFIG_VERSION, ConfigError, RunConfig, parse_config
from .workflows import get_workflow


def _step(message: str):
    """Render a progress message with the default checkmark prefix."""

    logging.info("✓ %s", message)


def _success(message: str):
    """Render a completion message with a heavier checkmark icon."""

    logging.info("✅ %s", message)


def _config_version(config: RunConfig) -> int | None:
    version = getattr(config, "config_version", None)
    if version in (None, ""):
        return None
    try:
        return int(version)
    except (TypeError, ValueError):
        return None


def _warn_about_config_version(config: RunConfig):
    if (_config_version(config) or 0) >= CURRENT_CONFIG_VERSION:
        return

    logging.warning(
        "plurihull compatibility warning: this run config does not declare "
        "config_version: %d. Check tolerance names before reusing older files.",
        CURRENT_CONFIG_VERSION,
    )


def _joined(values: tuple) -> str | None:
    return ",".join(values) if values else None


def _tolerances(pairs: tuple) -> dict | None:
    if not pairs:
        return None
    tolerances = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--tol expects name=value, got {pair!r}")
        tolerances[name.strip()] = value.strip()
    return tolerances


def _degrees(degrees: str | None, dk: int | None, dmax: int | None) -> str | None:
    given = [value for value in (degrees, dk, dmax) if value is not None]
    if len(given) > 1:
        raise UsageError("Use only one of --degrees, --dk and --dmax")
    return str(given[0]) if given else None


def run(conf: RunConfig):
    """Run the configured command and report its progress messages."""
    try:
        started_at = perf_counter()
        workflow = get_workflow(conf.command)
        for message in workflow.run(conf):
            _step(message)

        elapsed = perf_counter() - started_at
        _success(f"{conf.command} completed in {elapsed:.1f}s")
    except Exception:
        logging.exception("Error running %s", conf.command)
        exit(1)


@command()
@argument("cmd", required=True)
@option("--phi", default=None, help="Boundary data: builtin:<name> or a CSV path")
@option("--set", "set_kind", default=None, help="circle, interval, graph or csv:<path>")
@option("--z", "points", multiple=True, help="Evaluation point(s), e.g. 2+0i")
@option("--w", "w_grid", multiple=True, help="Second coordinate(s) for graph sweeps")
@option("--lam", "lambdas", multiple=True, help="Interior value(s) λ, or 'extend'")
@option("--dk", type=int, default=None, help="Denominator degree for extend")
@option("--dmax", type=int, default=None, help="Maximal polynomial degree")
@option("--degrees", default=None, help="Comma separated degree sweep")
@option("--N", "n_samples", type=int, default=None, help="Circle samples (power of two)")
@option("--radii", default=None, help="Comma separated radii for pole-order")
@option("--n-theta", type=int, default=None, help="Angles per circle for pole-order")
@option("--annulus", default=None, help="r0,r1,n_r,n_theta harmonicity grid")
@option("--config", "config_path", default=None, help="JSON or YAML run configuration")
@option("--output", default=None, help="Output directory. Default: $PLURIHULL_OUTPUT_DIR")
@option("--threads", type=int, default=None, help="Worker cap for grid sweeps")
@option("--phase-count", type=int, default=None, help="Polygon phases per constraint")
@option("--tol", "tolerances", multiple=True, help="Tolerance override name=value")
@option("--seed", type=int, default=None, help="Seed for the corpus property suites")
@option("--verbose", is_flag=True, help="Enable verbose logging", default=False)
def main(
    cmd,
    phi=None,
    set_kind=None,
    points=(),
    w_grid=(),
    lambdas=(),
    dk=None,
    dmax=None,
    degrees=None,
    n_samples=None,
    radii=None,
    n_theta=None,
    annulus=None,
    config_path=None,
    output=None,
    threads=None,
    phase_count=None,
    tolerances=(),
    seed=None,
    verbose=False,
):
    # Configure logging
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
    )
    load_dotenv()

    cmd = cmd.strip().lower().replace("_", "-")
    if cmd not in COMMANDS:
        raise UsageError(f"Invalid command: {cmd} (expected one of {', '.join(COMMANDS)})")

    overrides = {
        "command": cmd,
        "input": phi,
        "set": set_kind,
        "points": _joined(points),
        "w_grid": _joined(w_grid),
        "lambdas": _joined(lambdas),
        "degrees": _degrees(degrees, dk, dmax),
        "N": n_samples,
        "radii": radii,
        "n_theta": n_theta,
        "annulus": annulus,
        "output": output,
        "threads": threads,
        "phase_count": phase_count,
        "tolerances": _tolerances(tolerances),
        "seed": seed,
    }
    try:
        conf = parse_config(config_path, overrides)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc

    if config_path:
        _warn_about_config_version(conf)
    run(conf)
