from os import environ, path

from yaml import YAMLError, safe_load

from .core import MIN_SAMPLES


CURRENT_CONFIG_VERSION = 1

COMMANDS = (
    "extremal",
    "module-constants",
    "classify",
    "extend",
    "hull-slice",
    "pole-order",
    "corpus",
)

CONFIG_KEYS = {
    "config_version",
    "command",
    "input",
    "N",
    "degrees",
    "points",
    "lambdas",
    "w_grid",
    "radii",
    "n_theta",
    "annulus",
    "set",
    "output",
    "tolerances",
    "threads",
    "phase_count",
    "seed",
}

TOLERANCES = {
    "pivot_tol": 1e-11,
    "feas_tol": 1e-10,
    "max_iter": 20000,
    "refine_rounds": 16,
    "null_tol": 1e-11,
    "eps_div": 1e-10,
    "pole_margin": 1e-6,
    "cluster_radius": 1e-4,
    "removable_tol": 1e-8,
    "eps_res": 1e-8,
    "stability_tol": 1e-3,
    "plateau_factor": 1e3,
    "growth_ratio": 1.5,
    "rudin_tol": 1e-6,
}

INTEGER_TOLERANCES = {"max_iter", "refine_rounds"}

DEFAULT_DEGREES = {
    "extremal": [8],
    "module-constants": [4, 8, 16, 24],
    "classify": [4, 8, 16, 24],
    "extend": [4],
    "hull-slice": [6],
    "pole-order": [6],
    "corpus": [],
}

DEFAULT_POINTS = {
    "extremal": [2.0],
    "module-constants": [0.5],
    "classify": [0.5],
    "hull-slice": [0.5],
}

DEFAULT_RADII = [0.3, 0.4, 0.5, 0.6, 0.7]

NEEDS_INPUT = {"module-constants", "classify", "extend", "hull-slice", "pole-order"}

SET_KINDS = {"circle", "interval", "graph"}


class ConfigError(ValueError):
    """Raised for unknown keys or out-of-range values in a run configuration."""


def parse_complex(value) -> complex:
    """Parse `2`, `0.5`, `2+0i`, `-1-0.5j` or a two-item [re, im] list."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return complex(value)
    try:
        return complex(str(value).strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"Not a complex number: {value!r}") from exc


def _split(value) -> list:
    if isinstance(value, str):
        return [item for item in value.replace(";", ",").split(",") if item.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


class RunConfig(object):
    """Settings for a single plurihull run."""

    def __init__(self):
        self._config_finalized = False

    def update_dict(self, data):
        """Update the configuration with the given key-value pairs overwriting previous values."""
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
        self.__dict__.update(**data)
        self._clean()

    def _clean(self):
        """Normalize list-valued fields given as comma separated strings."""
        for key in ("degrees", "radii", "annulus"):
            if isinstance(getattr(self, key, None), str):
                setattr(self, key, _split(getattr(self, key)))

        for key in ("points", "w_grid"):
            if hasattr(self, key) and getattr(self, key) is not None:
                value = getattr(self, key)
                items = [value] if isinstance(value, (int, float, complex)) else _split(value)
                setattr(self, key, [parse_complex(item) for item in items])

        if hasattr(self, "lambdas") and getattr(self, "lambdas") is not None:
            setattr(
                self,
                "lambdas",
                [
                    "extend" if str(item).strip() == "extend" else parse_complex(item)
                    for item in _split(self.lambdas)
                ],
            )

    @staticmethod
    def _positive_int(name: str, value) -> int:
        try:
            number = int(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name} must be an integer, got {value!r}") from exc
        if number < 1 or number != float(value):
            raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        return number

    def _finalize_tolerances(self):
        overrides = getattr(self, "tolerances", None) or {}
        if not isinstance(overrides, dict):
            raise ConfigError("tolerances must be a mapping of name to value")
        unknown = sorted(set(overrides) - set(TOLERANCES))
        if unknown:
            raise ConfigError(f"Unknown tolerances: {', '.join(unknown)}")

        tolerances = dict(TOLERANCES)
        for name, value in overrides.items():
            try:
                number = float(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"Tolerance {name} must be numeric, got {value!r}") from exc
            if number <= 0:
                raise ConfigError(f"Tolerance {name} must be positive, got {value!r}")
            tolerances[name] = int(number) if name in INTEGER_TOLERANCES else number
        if tolerances["growth_ratio"] <= 1.0:
            raise ConfigError(f"growth_ratio must exceed 1, got {tolerances['growth_ratio']}")
        setattr(self, "tolerances", tolerances)

    def finalize_config(self):
        """Apply defaults and range checks once."""
        if self._config_finalized:
            return

        self._config_finalized = True
        self._clean()

        if not hasattr(self, "config_version"):
            setattr(self, "config_version", None)

        command = str(getattr(self, "command", "") or "").strip().lower().replace("_", "-")
        if command not in COMMANDS:
            raise ConfigError(f"Unsupported command: {command or '<missing>'}")
        setattr(self, "command", command)

        source = getattr(self, "input", None)
        if command in NEEDS_INPUT and not source:
            raise ConfigError(f"{command} needs an input (builtin:<name> or a CSV path)")
        if source and not str(source).startswith("builtin:") and not path.exists(source):
            raise ConfigError(f"Input file does not exist: {source}")
        setattr(self, "input", source)

        N = self._positive_int("N", getattr(self, "N", None) or 256)
        if N < MIN_SAMPLES or N & (N - 1):
            raise ConfigError(f"N must be a power of two >= {MIN_SAMPLES}, got {N}")
        setattr(self, "N", N)

        degrees = getattr(self, "degrees", None) or DEFAULT_DEGREES[command]
        degrees = [self._positive_int("degree", d) for d in _split(degrees)]
        if any(b <= a for a, b in zip(degrees, degrees[1:])):
            raise ConfigError(f"degrees must be strictly increasing, got {degrees}")
        setattr(self, "degrees", degrees)

        if not getattr(self, "points", None):
            setattr(self, "points", [complex(z) for z in DEFAULT_POINTS.get(command, [])])
        if not getattr(self, "lambdas", None):
            setattr(self, "lambdas", ["extend"])
        if len(self.lambdas) not in (1, len(self.points)):
            raise ConfigError(
                f"lambdas needs one value or one per point, got {len(self.lambdas)} "
                f"for {len(self.points)} points"
            )
        if not getattr(self, "w_grid", None):
            setattr(self, "w_grid", [])

        radii = [float(r) for r in _split(getattr(self, "radii", None) or DEFAULT_RADII)]
        if any(not 0.0 < r < 1.0 for r in radii):
            raise ConfigError(f"radii must lie inside (0, 1), got {radii}")
        setattr(self, "radii", radii)
        setattr(self, "n_theta", self._positive_int("n_theta", getattr(self, "n_theta", 8)))

        annulus = getattr(self, "annulus", None)
        if annulus:
            annulus = _split(annulus)
            if len(annulus) != 4:
                raise ConfigError(f"annulus needs r0,r1,n_r,n_theta, got {annulus}")
            annulus = (
                float(annulus[0]),
                float(annulus[1]),
                self._positive_int("n_r", annulus[2]),
                self._positive_int("n_theta", annulus[3]),
            )
        setattr(self, "annulus", annulus or None)

        kind = str(getattr(self, "set", None) or "circle")
        if kind not in SET_KINDS and not kind.startswith("csv:"):
            raise ConfigError(f"Unsupported set: {kind}")
        if kind == "graph" and not source:
            raise ConfigError("set graph needs an input function")
        setattr(self, "set", kind)

        phase_count = self._positive_int("phase_count", getattr(self, "phase_count", 64))
        if phase_count < 8 or phase_count % 2:
            raise ConfigError(f"phase_count must be even and >= 8, got {phase_count}")
        setattr(self, "phase_count", phase_count)

        threads = getattr(self, "threads", None) or environ.get("PLURIHULL_THREADS") or 1
        setattr(self, "threads", self._positive_int("threads", threads))

        output = getattr(self, "output", None) or environ.get("PLURIHULL_OUTPUT_DIR")
        setattr(self, "output", output or "./plurihull-out")

        seed = getattr(self, "seed", None)
        setattr(self, "seed", 0 if seed is None else int(seed))

        self._finalize_tolerances()


def create_run_config(file_values: dict, overrides: dict) -> RunConfig:
    """Build a run config from file values and flag overrides, in that order."""
    config = RunConfig()

    # Load file values first
    config.update_dict(file_values)

    # CLI flags win over the file, tolerance by tolerance
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if isinstance(file_values.get("tolerances"), dict) and "tolerances" in overrides:
        overrides["tolerances"] = {**file_values["tolerances"], **overrides["tolerances"]}
    config.update_dict(overrides)

    config.finalize_config()

    return config


def parse_config(config_path: str | None, overrides: dict | None = None) -> RunConfig:
    """Load a run configuration from a JSON or YAML file and apply flag overrides."""
    file_values = {}
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as f:
                file_values = safe_load(f) or {}
        except (OSError, YAMLError) as exc:
            raise ConfigError(f"Cannot read config {config_path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError(f"Config {config_path} must contain a mapping")

    return create_run_config(file_values, overrides or {})
