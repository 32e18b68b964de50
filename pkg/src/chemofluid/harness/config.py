"""Run configuration: typed sections, flat ``section.key = value`` text format."""

import dataclasses
import math
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..model import PRESETS, ModelParams

INIT_PRESETS = ("gaussian-blob", "stratified", "random-perturbation", "uniform")
DT_POLICIES = ("auto", "fixed")


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    t = text.strip().lower()
    return None if t in ("", "none") else float(text)


def _format(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class GridSection:
    n: tuple = (64, 64)
    lengths: tuple = (1.0, 1.0)
    bc: str = "box"


@dataclass(frozen=True)
class ModelSection:
    m: float = 2.0
    diff_coeff: float = 1.0
    eps: float = 1e-2
    kappa: float = 1.0
    kinetics: str = "linear"
    phi_grad: tuple = (0.0, -0.1)
    energy_weight: float = 1.0
    c_floor: float = 1e-12


@dataclass(frozen=True)
class InitSection:
    preset: str = "gaussian-blob"
    mass: float = 1.0
    width: float = 0.1
    center: tuple = ()
    floor: float = 1e-3
    c0: float = 1.0
    c_bottom: float = 0.2
    amplitude: float = 0.2
    modes: int = 4
    u_amplitude: float = 0.0


@dataclass(frozen=True)
class RunSection:
    seed: int = 0
    t_final: float = 1.0
    dt_policy: str = "auto"
    dt: float = 1e-4
    safety: float = 0.4
    max_steps: int = 10_000_000
    record_every: int = 10
    record_interval: float = None
    snapshot_times: tuple = ()


@dataclass(frozen=True)
class SolverSection:
    tol: float = 1e-10
    method: str = "direct"
    maxiter: int = 10_000


@dataclass(frozen=True)
class OutputSection:
    dir: str = "out"
    csv_name: str = "diagnostics.csv"
    snapshots: bool = True


_CONVERTERS = {
    ("grid", "n"): _ints,
    ("grid", "lengths"): _floats,
    ("model", "phi_grad"): _floats,
    ("init", "center"): _floats,
    ("run", "snapshot_times"): _floats,
    ("run", "record_interval"): _opt_float,
}


def _converter(section, key, default):
    if (section, key) in _CONVERTERS:
        return _CONVERTERS[(section, key)]
    if isinstance(default, bool):
        return _bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    return str


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run, including the random seed."""

    grid: GridSection = field(default_factory=GridSection)
    model: ModelSection = field(default_factory=ModelSection)
    init: InitSection = field(default_factory=InitSection)
    run: RunSection = field(default_factory=RunSection)
    solver: SolverSection = field(default_factory=SolverSection)
    output: OutputSection = field(default_factory=OutputSection)

    SECTIONS = ("grid", "model", "init", "run", "solver", "output")

    def replace(self, **dotted):
        """Copy with ``section__key=value`` or ``{"section.key": value}`` overrides."""
        changes = {}
        for k, v in dotted.items():
            sec, _, key = k.replace("__", ".").partition(".")
            changes.setdefault(sec, {})[key] = v
        kw = {}
        for sec, vals in changes.items():
            if sec not in self.SECTIONS:
                raise ConfigError(f"unknown section {sec!r}")
            kw[sec] = dataclasses.replace(getattr(self, sec), **vals)
        out = dataclasses.replace(self, **kw)
        out.validate()
        return out

    def model_params(self):
        s = self.model
        try:
            return ModelParams(m=s.m, diff_coeff=s.diff_coeff, eps=s.eps, kappa=s.kappa,
                               kinetics=s.kinetics, phi_grad=s.phi_grad,
                               energy_weight=s.energy_weight, c_floor=s.c_floor)
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        g, r, i = self.grid, self.run, self.init
        if len(g.n) not in (2, 3):
            raise ConfigError("grid.n must list 2 or 3 sizes")
        if g.lengths and len(g.lengths) != len(g.n):
            raise ConfigError("grid.lengths must match grid.n")
        if g.bc not in ("box", "periodic"):
            raise ConfigError("grid.bc must be 'box' or 'periodic'")
        if len(self.model.phi_grad) != len(g.n):
            raise ConfigError("model.phi_grad must have one entry per axis")
        if self.model.kinetics not in PRESETS:
            raise ConfigError(f"unknown kinetics preset {self.model.kinetics!r}")
        if i.preset not in INIT_PRESETS:
            raise ConfigError(f"unknown initial preset {i.preset!r}; choose from {INIT_PRESETS}")
        if i.center and len(i.center) != len(g.n):
            raise ConfigError("init.center must match the grid dimension")
        if not (i.mass > 0 and i.width > 0 and i.floor > 0 and i.c0 >= 0):
            raise ConfigError("init.mass, init.width, init.floor must be positive and init.c0 nonnegative")
        if not 0.0 <= i.c_bottom <= 1.0 or not 0.0 <= i.amplitude < 1.0:
            raise ConfigError("init.c_bottom must lie in [0, 1] and init.amplitude in [0, 1)")
        if not (math.isfinite(r.t_final) and r.t_final > 0):
            raise ConfigError("run.t_final must be positive")
        if r.dt_policy not in DT_POLICIES:
            raise ConfigError(f"run.dt_policy must be one of {DT_POLICIES}")
        if not (r.dt > 0 and 0 < r.safety <= 1):
            raise ConfigError("run.dt must be positive and run.safety in (0, 1]")
        if r.record_every < 1 or r.max_steps < 1:
            raise ConfigError("run.record_every and run.max_steps must be at least 1")
        if r.record_interval is not None and not r.record_interval > 0:
            raise ConfigError("run.record_interval must be positive")
        if any(not 0 <= s <= r.t_final for s in r.snapshot_times):
            raise ConfigError("run.snapshot_times must lie in [0, t_final]")
        if not self.solver.tol > 0:
            raise ConfigError("solver.tol must be positive")
        if self.solver.method not in ("direct", "cg"):
            raise ConfigError("solver.method must be 'direct' or 'cg'")
        self.model_params()
        return self

    # -- text format -------------------------------------------------------

    def dumps(self):
        lines = []
        for sec in self.SECTIONS:
            obj = getattr(self, sec)
            for f in dataclasses.fields(obj):
                lines.append(f"{sec}.{f.name} = {_format(getattr(obj, f.name))}")
            lines.append("")
        return "\n".join(lines)

    @classmethod
    def loads(cls, text, require_seed=True):
        """Parse the flat format; unknown keys and malformed values raise ConfigError."""
        values = {s: {} for s in cls.SECTIONS}
        seen_seed = False
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected 'section.key = value'")
            sec, dot, name = key.strip().partition(".")
            if not dot or sec not in cls.SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section in {key.strip()!r}")
            defaults = {f.name: f.default for f in dataclasses.fields(_SECTION_TYPES[sec])}
            if name not in defaults:
                raise ConfigError(f"line {lineno}: unknown key {key.strip()!r}")
            try:
                values[sec][name] = _converter(sec, name, defaults[name])(val.strip())
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key.strip()}: {exc}") from exc
            seen_seed |= (sec, name) == ("run", "seed")
        if require_seed and not seen_seed:
            raise ConfigError("run.seed is mandatory")
        cfg = cls(**{s: _SECTION_TYPES[s](**values[s]) for s in cls.SECTIONS})
        return cfg.validate()

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.loads(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())


_SECTION_TYPES = {
    "grid": GridSection, "model": ModelSection, "init": InitSection,
    "run": RunSection, "solver": SolverSection, "output": OutputSection,
}


def default_config(**overrides):
    """The desk-scale gravity scenario, optionally with dotted overrides."""
    cfg = RunConfig().validate()
    return cfg.replace(**overrides) if overrides else cfg
