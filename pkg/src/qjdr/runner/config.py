"""Sweep configuration.

Configuration files are INI documents whose sections mirror
:class:`SweepConfig`. Unknown sections or keys are rejected. Lists are
comma separated; ``start:stop:step`` expands to an inclusive grid.

Example::

    [sweep]
    magnitudes = 0.05:1.0:0.05
    temperatures_kelvin = 0.001, 1.0
    codebook = parity_3_2

    [transduction]
    frequency_hz = 10e9
    efficiency = 1.0

    [train]
    restarts = 8
    seed = 0
"""

import configparser
from dataclasses import dataclass, field, fields, replace
import math
from pathlib import Path

from ..exceptions import ConfigError
from ..transduction import DEFAULT_COUPLING_TIME, DEFAULT_FOCK_CUTOFF, DEFAULT_FREQUENCY_HZ, TransductionParams
from ..vqc import AnsatzSpec, TrainConfig


def default_magnitudes():
    return [round(0.05 * k, 10) for k in range(1, 21)]


@dataclass(frozen=True)
class DiscriminationConfig:
    tol: float = 1e-12
    max_iter: int = 10000
    shift: float = 1e-3


@dataclass(frozen=True)
class SweepConfig:
    magnitudes: tuple = field(default_factory=lambda: tuple(default_magnitudes()))
    temperatures_kelvin: tuple = (0.001, 1.0)
    frequency_hz: float = DEFAULT_FREQUENCY_HZ
    efficiency: float = 1.0
    fock_cutoff: int = DEFAULT_FOCK_CUTOFF
    coupling_time: float = DEFAULT_COUPLING_TIME
    num_layers: int = 3
    train: TrainConfig = field(default_factory=TrainConfig)
    discrimination: DiscriminationConfig = field(default_factory=DiscriminationConfig)
    codebook: str = "parity_3_2"
    info_pulses: int = 2
    output: str = "sweep.csv"

    def __post_init__(self):
        object.__setattr__(self, "magnitudes", tuple(float(m) for m in self.magnitudes))
        object.__setattr__(self, "temperatures_kelvin", tuple(float(t) for t in self.temperatures_kelvin))
        if not self.magnitudes or not self.temperatures_kelvin:
            raise ConfigError("magnitude and temperature grids must be non-empty")
        if any(not math.isfinite(m) or m < 0 for m in self.magnitudes):
            raise ConfigError(f"magnitudes must be finite and >= 0, got {self.magnitudes}")
        if any(not t > 0 for t in self.temperatures_kelvin):
            raise ConfigError(f"temperatures must be > 0, got {self.temperatures_kelvin}")
        if not self.frequency_hz > 0:
            raise ConfigError(f"frequency_hz must be > 0, got {self.frequency_hz}")
        if self.info_pulses < 1:
            raise ConfigError(f"info_pulses must be >= 1, got {self.info_pulses}")
        try:
            self.transduction_params(0.0)
            AnsatzSpec(1, self.num_layers)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def transduction_params(self, nbar):
        return TransductionParams(self.efficiency, nbar, self.fock_cutoff, self.coupling_time)


def _float_list(text):
    items = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            start, stop, step = (float(x) for x in part.split(":"))
            if step <= 0:
                raise ValueError(f"range step must be > 0 in {part!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            items.extend(round(start + k * step, 10) for k in range(max(count, 0)))
        else:
            items.append(float(part))
    return items


def _str(text):
    return text.strip()


# section -> {key: (target, parser)}; dotted targets address nested configs
SCHEMA = {
    "sweep": {
        "magnitudes": ("magnitudes", _float_list),
        "temperatures_kelvin": ("temperatures_kelvin", _float_list),
        "codebook": ("codebook", _str),
        "info_pulses": ("info_pulses", int),
        "output": ("output", _str),
    },
    "transduction": {
        "frequency_hz": ("frequency_hz", float),
        "efficiency": ("efficiency", float),
        "fock_cutoff": ("fock_cutoff", int),
        "coupling_time": ("coupling_time", float),
    },
    "ansatz": {
        "num_layers": ("num_layers", int),
    },
    "train": {
        "restarts": ("train.restarts", int),
        "max_outer_iters": ("train.max_outer_iters", int),
        "optimizer": ("train.optimizer", _str),
        "step_size": ("train.step_size", float),
        "seed": ("train.seed", int),
        "convergence_tol": ("train.convergence_tol", float),
        "inner_steps": ("train.inner_steps", int),
        "spsa_a": ("train.spsa_a", float),
        "spsa_c": ("train.spsa_c", float),
        "spsa_alpha": ("train.spsa_alpha", float),
        "spsa_gamma": ("train.spsa_gamma", float),
    },
    "discrimination": {
        "tol": ("discrimination.tol", float),
        "max_iter": ("discrimination.max_iter", int),
        "shift": ("discrimination.shift", float),
    },
}


def _parse_value(section, key, raw, where):
    if section not in SCHEMA:
        raise ConfigError(f"{where}: unknown section [{section}]; expected one of {sorted(SCHEMA)}")
    if key not in SCHEMA[section]:
        raise ConfigError(f"{where}: unknown key {key!r} in [{section}]; expected one of {sorted(SCHEMA[section])}")
    target, parser = SCHEMA[section][key]
    try:
        return target, parser(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {section}.{key}: {exc}") from None


def _apply(config, updates):
    top, nested = {}, {"train": {}, "discrimination": {}}
    for target, value in updates.items():
        if "." in target:
            group, name = target.split(".", 1)
            nested[group][name] = value
        else:
            top[target] = value
    try:
        if nested["train"]:
            top["train"] = replace(config.train, **nested["train"])
        if nested["discrimination"]:
            top["discrimination"] = replace(config.discrimination, **nested["discrimination"])
        return replace(config, **top)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text, source="<config>"):
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    updates = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]; expected one of {sorted(SCHEMA)}")
        for key, raw in parser.items(section):
            target, value = _parse_value(section, key, raw, source)
            updates[target] = value
    return _apply(SweepConfig(), updates)


def load_config(path=None, overrides=()):
    """Load a config file (or defaults) and apply ``section.key=value`` overrides."""
    if path is None:
        config = SweepConfig()
    else:
        text = Path(path).read_text(encoding="utf-8")
        config = parse_config(text, source=str(path))
    return apply_overrides(config, overrides)


def apply_overrides(config, overrides):
    updates = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        name, raw = item.split("=", 1)
        if "." not in name:
            raise ConfigError(f"--set key must be qualified as section.key, got {name!r}")
        section, key = name.strip().split(".", 1)
        target, value = _parse_value(section, key, raw, "--set")
        updates[target] = value
    return _apply(config, updates) if updates else config


def format_config(config):
    """Render a config back to INI text (round-trips through ``parse_config``)."""
    t, d = config.train, config.discrimination
    lines = [
        "[sweep]",
        "magnitudes = " + ", ".join(repr(m) for m in config.magnitudes),
        "temperatures_kelvin = " + ", ".join(repr(x) for x in config.temperatures_kelvin),
        f"codebook = {config.codebook}",
        f"info_pulses = {config.info_pulses}",
        f"output = {config.output}",
        "",
        "[transduction]",
        f"frequency_hz = {config.frequency_hz!r}",
        f"efficiency = {config.efficiency!r}",
        f"fock_cutoff = {config.fock_cutoff}",
        f"coupling_time = {config.coupling_time!r}",
        "",
        "[ansatz]",
        f"num_layers = {config.num_layers}",
        "",
        "[train]",
    ]
    for f in fields(TrainConfig):
        value = getattr(t, f.name)
        lines.append(f"{f.name} = {value.value if f.name == 'optimizer' else repr(value)}")
    lines += ["", "[discrimination]"]
    lines += [f"{f.name} = {getattr(d, f.name)!r}" for f in fields(DiscriminationConfig)]
    return "\n".join(lines) + "\n"


def grid_points(config):
    """``(temperature, magnitude)`` pairs in emission order."""
    return [(t, m) for t in sorted(config.temperatures_kelvin) for m in sorted(config.magnitudes)]
