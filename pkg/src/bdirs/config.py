"""Experiment configuration: INI-style ``[section]`` / ``key = value`` files.

Example::

    [scenario]
    carrier_freq_hz = 1e11
    n_bs = 16
    m_irs = 16
    p_dbm = 10

    [sweep]
    n_values = 8, 16, 32
    p_dbm_values = 10, 20, 30

    [run]
    seeds = 0..99
    variant = both
    l_bits = 1

Unknown sections or keys are rejected so typos do not silently fall back to
defaults.
"""

import configparser
from dataclasses import asdict, dataclass, field, fields, replace
import hashlib
import json

from bdirs.channel import DEFAULT_CARRIER_HZ, DEFAULT_MU_ABS, SPEED_OF_LIGHT, ChannelParams, Geometry
from bdirs.errors import ConfigError
from bdirs.objective import noise_power
from bdirs.optimizer import OptimizerConfig, VARIANTS
from bdirs.phase_design import DesignerConfig
from bdirs.precoder import SolverConfig
from bdirs.quantizer import QuantSpec, dbm_to_watts


@dataclass(frozen=True)
class ScenarioConfig:
    carrier_freq_hz: float = DEFAULT_CARRIER_HZ
    mu_abs_per_m: float = DEFAULT_MU_ABS
    c_mps: float = SPEED_OF_LIGHT
    antenna_spacing_m: float | None = None
    n_bs: int = 150
    m_irs: int = 150
    p_dbm: float = 10.0
    bandwidth_hz: float = 1e6
    noise_dbm_hz: float = -174.0
    area_m: float = 10.0
    bs_x: float = 0.0
    bs_y: float = 0.0
    irs_x: float = 5.0
    irs_y: float = 5.0
    min_distance_m: float = 1.0
    d1_m: float | None = None
    d2_m: float | None = None

    def base_params(self, n_bs=None, m_irs=None):
        return ChannelParams(carrier_freq_hz=self.carrier_freq_hz,
                             mu_abs_per_m=self.mu_abs_per_m,
                             antenna_spacing_m=self.antenna_spacing_m,
                             c_mps=self.c_mps,
                             n_bs=self.n_bs if n_bs is None else n_bs,
                             m_irs=self.m_irs if m_irs is None else m_irs)

    def geometry(self):
        return Geometry(area_m=self.area_m, bs_xy=(self.bs_x, self.bs_y),
                        irs_xy=(self.irs_x, self.irs_y),
                        min_distance_m=self.min_distance_m,
                        d1_m=self.d1_m, d2_m=self.d2_m)

    @property
    def noise_power_w(self):
        return noise_power(self.noise_dbm_hz, self.bandwidth_hz)


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple = (64, 128, 256, 512)
    p_dbm_values: tuple = (10.0, 20.0, 30.0)


@dataclass(frozen=True)
class RunConfig:
    seeds: tuple = tuple(range(10))
    master_seed: int = 0
    variant: str = "both"
    l_bits: int = 1
    xi_amp: float = 1.0
    workers: int = 1


@dataclass(frozen=True)
class OuterConfig:
    eps: float = 1e-4
    max_outer: int = 50


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "results"
    convergence_csv: str = "convergence.csv"
    convergence_json: str = "convergence_summary.json"
    sweep_csv: str = "sweep.csv"
    sweep_json: str = "sweep_summary.json"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    run: RunConfig = field(default_factory=RunConfig)
    precoder: SolverConfig = field(default_factory=SolverConfig)
    phase_designer: DesignerConfig = field(default_factory=DesignerConfig)
    optimizer: OuterConfig = field(default_factory=OuterConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self):
        r, s, sc = self.run, self.sweep, self.scenario
        if not r.seeds:
            raise ConfigError("seed list is empty")
        if len(set(r.seeds)) != len(r.seeds):
            raise ConfigError("seed list contains duplicates")
        if r.variant not in VARIANTS + ("both",):
            raise ConfigError(f"variant must be bd, diag or both, got {r.variant!r}")
        if r.l_bits < 1:
            raise ConfigError(f"l_bits must be >= 1, got {r.l_bits}")
        if r.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {r.workers}")
        if not s.n_values or not s.p_dbm_values:
            raise ConfigError("sweep lists must be non-empty")
        if any(n < 1 for n in s.n_values) or sc.n_bs < 1 or sc.m_irs < 1:
            raise ConfigError("array sizes must be >= 1")
        if sc.bandwidth_hz <= 0 or sc.carrier_freq_hz <= 0:
            raise ConfigError("bandwidth and carrier frequency must be > 0")
        if self.optimizer.eps <= 0 or self.optimizer.max_outer < 1:
            raise ConfigError("optimizer eps must be > 0 and max_outer >= 1")
        if self.phase_designer.max_sweeps < 1 or self.phase_designer.ab_iters < 0:
            raise ConfigError("phase_designer max_sweeps must be >= 1 and ab_iters >= 0")
        try:
            self.quant()
            self.scenario.base_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def variants(self):
        return VARIANTS if self.run.variant == "both" else (self.run.variant,)

    def quant(self):
        return QuantSpec(l_bits=self.run.l_bits, xi_amp=self.run.xi_amp)

    def optimizer_config(self, p_dbm):
        return OptimizerConfig(eps=self.optimizer.eps, max_outer=self.optimizer.max_outer,
                               p_tot_w=dbm_to_watts(p_dbm), precoder=self.precoder,
                               designer=self.phase_designer, quant=self.quant())

    def semantic_dict(self):
        """Everything that can change a result; output paths and worker count excluded."""
        d = asdict(self)
        d.pop("output")
        d["run"].pop("workers")
        return _canonical(d)

    def config_hash(self):
        blob = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _canonical(obj):
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    return float(obj)


def parse_seeds(text):
    """``"0..9"`` (inclusive) or a comma list ``"1, 5, 7"``."""
    text = str(text).strip()
    if not text:
        return ()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ConfigError(f"empty seed range {text!r}")
            return tuple(range(lo, hi + 1))
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse seeds {text!r}") from exc


def _as_int(raw):
    as_float = float(raw)
    if as_float != int(as_float):
        raise ValueError(raw)
    return int(as_float)


def _parse_value(raw, current, key):
    raw = raw.strip()
    try:
        if key == "seeds":
            return parse_seeds(raw)
        if isinstance(current, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(current, tuple):
            items = [s for s in raw.split(",") if s.strip()]
            kind = type(current[0]) if current else float
            conv = _as_int if kind is int else kind
            return tuple(conv(s.strip()) for s in items)
        if current is None:
            return None if raw.lower() in ("", "none") else float(raw)
        if isinstance(current, int):
            return _as_int(raw)
        if isinstance(current, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


_SECTIONS = ("scenario", "sweep", "run", "precoder", "phase_designer", "optimizer", "output")


def _build_section(cls, default, items, name):
    known = {f.name for f in fields(cls) if f.init}
    kwargs = {}
    for key, raw in items:
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in section [{name}]")
        kwargs[key] = _parse_value(raw, getattr(default, key), key)
    try:
        return cls(**{**{k: getattr(default, k) for k in known}, **kwargs})
    except ValueError as exc:
        raise ConfigError(f"[{name}] {exc}") from exc


def loads(text) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for sec in cp.sections():
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
    default = ExperimentConfig()
    parts = {}
    for sec in _SECTIONS:
        cur = getattr(default, sec)
        items = cp.items(sec) if cp.has_section(sec) else []
        parts[sec] = _build_section(type(cur), cur, items, sec)
    return ExperimentConfig(**parts).validate()


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def with_overrides(cfg: ExperimentConfig, seeds=None, variant=None, l_bits=None, out=None):
    run = cfg.run
    if seeds is not None:
        run = replace(run, seeds=tuple(seeds))
    if variant is not None:
        run = replace(run, variant=variant)
    if l_bits is not None:
        run = replace(run, l_bits=int(l_bits))
    output = cfg.output if out is None else replace(cfg.output, dir=str(out))
    return replace(cfg, run=run, output=output).validate()
