"""Config-driven sweeps and the oracle verification harness.

Config files are INI with three sections::

    [scenario]      ; any Scenario field, e.g. snr_db = 20
    [sweep]         ; variable, from, to, steps, log_scale, schemes
    [output]        ; path

Command-line overrides use ``section.key=value`` or a bare ``key=value`` when
the key name is unambiguous.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import oracle, secrecy
from .channel import LinkMethod, capa_gain_closed, correlation_chebyshev
from .errors import CapaError, InfeasibleTargetError
from .geometry import ApertureKind, QuadratureRule, make_grid
from .scenario import DEFAULT_SCENARIO, Scenario

__all__ = [
    "SweepSpec",
    "ExperimentConfig",
    "load_config",
    "run_sweep",
    "sweep_rows",
    "format_csv",
    "VerifyCheck",
    "VerifyReport",
    "run_verify",
    "SWEEP_VARIABLES",
    "SCHEMES",
]

SWEEP_VARIABLES = ("power_dB", "aperture_area", "aor", "target_rate")
SCHEMES = ("optimal", "mrt", "zf")
VERIFY_TOLERANCE = 1e-3
DEFAULT_RESOLUTIONS = (16, 32, 64)


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "power_dB"
    start: float = -10.0
    stop: float = 40.0
    steps: int = 51
    log_scale: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise CapaError(f"unknown sweep variable {self.variable!r}; choose from {SWEEP_VARIABLES}")
        if self.steps < 2:
            raise CapaError("a sweep needs at least 2 steps")
        if not self.start < self.stop:
            raise CapaError(f"sweep must increase (from={self.start}, to={self.stop})")
        if self.log_scale and self.start <= 0:
            raise CapaError("log-scale sweeps need a positive start")

    def values(self) -> np.ndarray:
        if self.log_scale:
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario = DEFAULT_SCENARIO
    sweep: SweepSpec = field(default_factory=SweepSpec)
    schemes: tuple[str, ...] = SCHEMES
    output_path: str | None = None

    def __post_init__(self):
        if not self.schemes:
            raise CapaError("at least one scheme is required")
        bad = set(self.schemes) - set(SCHEMES)
        if bad:
            raise CapaError(f"unknown schemes {sorted(bad)}; choose from {SCHEMES}")

    def resolved(self) -> dict:
        """Plain-data view of every setting, used for the CSV provenance line."""
        return {
            "scenario": self.scenario.as_dict(),
            "sweep": dataclasses.asdict(self.sweep),
            "schemes": list(self.schemes),
        }


_SCENARIO_FIELDS = {f.name: f for f in dataclasses.fields(Scenario)}
_SWEEP_KEYS = {"variable", "from", "to", "steps", "log_scale", "schemes"}


def _coerce(name: str, raw: str):
    f = _SCENARIO_FIELDS[name]
    raw = raw.strip()
    if f.type in ("str",):
        return raw
    if raw.lower() in ("none", ""):
        if "None" in str(f.type):
            return None
        raise CapaError(f"{name} cannot be empty")
    if f.type == "int":
        try:
            return int(raw)
        except ValueError:
            raise CapaError(f"{name} must be an integer, got {raw!r}") from None
    return _number(raw)


def _number(raw: str) -> float:
    """Parse a float, allowing ``pi`` expressions such as ``pi/6``."""
    text = raw.strip().replace("pi", repr(math.pi))
    if not set(text) <= set("0123456789.eE+-*/() "):
        raise CapaError(f"not a number: {raw!r}")
    try:
        return float(eval(text, {"__builtins__": {}}, {}))  # restricted to arithmetic by the check above
    except Exception as exc:
        raise CapaError(f"not a number: {raw!r}") from exc


def _split_override(item: str) -> tuple[str, str, str]:
    if "=" not in item:
        raise CapaError(f"override {item!r} is not key=value")
    key, value = item.split("=", 1)
    key = key.strip()
    if "." in key:
        section, key = key.split(".", 1)
        return section, key, value
    in_scenario = key in _SCENARIO_FIELDS
    in_sweep = key in _SWEEP_KEYS
    if in_scenario and not in_sweep:
        return "scenario", key, value
    if in_sweep and not in_scenario:
        return "sweep", key, value
    if key == "path":
        return "output", key, value
    raise CapaError(f"unknown setting {key!r}")


def load_config(path: str | Path | None = None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Read an INI config (optional) and apply ``key=value`` overrides on top."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
    parser.optionxform = str
    if path is not None:
        text = Path(path).read_text()
        parser.read_string(text, source=str(path))
    for item in overrides:
        section, key, value = _split_override(item)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)
    known = {"scenario", "sweep", "output"}
    extra = set(parser.sections()) - known
    if extra:
        raise CapaError(f"unknown config sections {sorted(extra)}")

    scen = {}
    if parser.has_section("scenario"):
        for key, raw in parser.items("scenario"):
            if key not in _SCENARIO_FIELDS:
                raise CapaError(f"unknown scenario setting {key!r}")
            scen[key] = _coerce(key, raw)
    scenario = DEFAULT_SCENARIO.replace(**scen)

    sweep_kw, schemes = {}, SCHEMES
    if parser.has_section("sweep"):
        for key, raw in parser.items("sweep"):
            if key == "variable":
                sweep_kw["variable"] = raw.strip()
            elif key == "from":
                sweep_kw["start"] = _number(raw)
            elif key == "to":
                sweep_kw["stop"] = _number(raw)
            elif key == "steps":
                sweep_kw["steps"] = int(raw)
            elif key == "log_scale":
                sweep_kw["log_scale"] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif key == "schemes":
                schemes = tuple(s.strip() for s in raw.split(",") if s.strip())
            else:
                raise CapaError(f"unknown sweep setting {key!r}")
    if "variable" in sweep_kw:
        if sweep_kw["variable"] not in _SWEEP_DEFAULTS:
            raise CapaError(f"unknown sweep variable {sweep_kw['variable']!r}; choose from {SWEEP_VARIABLES}")
        sweep_kw = {**_SWEEP_DEFAULTS[sweep_kw["variable"]], **sweep_kw}
    out = parser.get("output", "path", fallback=None)
    return ExperimentConfig(scenario, SweepSpec(**sweep_kw), schemes, out)


# per-variable fallbacks for whatever a config leaves unset
_SWEEP_DEFAULTS = {
    "power_dB": dict(start=-10.0, stop=40.0, steps=51, log_scale=False),
    "aperture_area": dict(start=0.01, stop=1e4, steps=61, log_scale=True),
    "aor": dict(start=0.05, stop=1.0, steps=20, log_scale=False),
    "target_rate": dict(start=0.5, stop=10.0, steps=20, log_scale=False),
}


def _safe(fn, *args):
    try:
        return fn(*args).value
    except InfeasibleTargetError:
        return math.inf


def _rate(scheme: str, link, radio) -> float:
    if scheme == "optimal":
        return secrecy.msr(link, radio).value
    if scheme == "mrt":
        return secrecy.mrt_rate(link, radio).value
    return secrecy.zf_rate(link, radio).value


def _power(scheme: str, link, noise, R0: float) -> float:
    if R0 <= 0:
        return 0.0
    if scheme == "optimal":
        return _safe(secrecy.mrp, link, noise, R0)
    if scheme == "mrt":
        return _safe(secrecy.mrt_power, link, noise, R0)
    return _safe(secrecy.zf_power, link, noise, R0)


def _asymptotes(s: Scenario) -> dict[str, float]:
    radio = s.radio
    lim = secrecy.asymptotic_limits(s.channel, radio, radio, s.aor, s.target_rate)
    return {
        "asymptote_msr_capa": lim.msr_capa,
        "asymptote_msr_spda": lim.msr_spda,
        "asymptote_mrp_capa": lim.mrp_capa,
        "asymptote_mrp_spda": lim.mrp_spda,
    }


def _scheme_columns(schemes: Sequence[str], metrics: Sequence[str], prefix: str = "") -> list[str]:
    return [f"{prefix}{s}_{m}" for s in schemes for m in metrics]


def _point(schemes, metrics, link, scenario: Scenario, prefix: str = "") -> dict[str, float]:
    radio = scenario.radio
    row = {}
    for s in schemes:
        for m in metrics:
            v = _rate(s, link, radio) if m == "rate" else _power(s, link, radio, scenario.target_rate)
            row[f"{prefix}{s}_{m}"] = v
    return row


def sweep_rows(config: ExperimentConfig) -> tuple[list[str], list[list[float]]]:
    """Evaluate the sweep; returns the header and one row of floats per point."""
    sp, base, schemes = config.sweep, config.scenario, config.schemes
    xs = sp.values()
    rows = []
    if sp.variable == "power_dB":
        header = ["x", *_scheme_columns(schemes, ["rate"])]
        link = base.link()
        for x in xs:
            s = base.replace(snr_db=float(x))
            rows.append([x, *_point(schemes, ["rate"], link, s).values()])
    elif sp.variable == "target_rate":
        header = ["x", *_scheme_columns(schemes, ["power"])]
        link = base.link()
        for x in xs:
            s = base.replace(target_rate=float(x))
            rows.append([x, *_point(schemes, ["power"], link, s).values()])
    elif sp.variable == "aperture_area":
        metrics = ["rate", "power"]
        asym = _asymptotes(base)
        header = ["x", *_scheme_columns(schemes, metrics), *asym]
        for x in xs:
            L = math.sqrt(x)
            s = base.replace(Lx=L, Lz=L)
            rows.append([x, *_point(schemes, metrics, s.link(), s).values(), *asym.values()])
    else:  # aor
        metrics = ["rate", "power"]
        capa = base.replace(array="capa")
        capa_row = _point(schemes, metrics, capa.link(), capa, "capa_")
        header = ["x", *_scheme_columns(schemes, metrics), *capa_row, *_asymptotes(base)]
        for x in xs:
            s = base.replace(array="spda", aor=float(x))
            rows.append([x, *_point(schemes, metrics, s.link(), s).values(), *capa_row.values(), *_asymptotes(s).values()])
    return header, rows


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def format_csv(config: ExperimentConfig, header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config.resolved(), sort_keys=True) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def run_sweep(config: ExperimentConfig, out: str | Path | None = None) -> str:
    """Run the sweep and return the CSV text, also writing it when a path is given."""
    header, rows = sweep_rows(config)
    text = format_csv(config, header, rows)
    target = out if out is not None else config.output_path
    if target is not None:
        Path(target).write_text(text)
    return text


@dataclass(frozen=True)
class VerifyCheck:
    name: str
    resolution: int
    oracle: float
    closed: float

    @property
    def delta(self) -> float:
        return abs(self.oracle - self.closed) / abs(self.closed)


@dataclass
class VerifyReport:
    checks: list[VerifyCheck]
    tolerance: float = VERIFY_TOLERANCE
    elapsed: float = 0.0

    @property
    def final_resolution(self) -> int:
        return max(c.resolution for c in self.checks)

    def failures(self) -> list[VerifyCheck]:
        top = self.final_resolution
        return [c for c in self.checks if c.resolution == top and not c.delta < self.tolerance]

    @property
    def passed(self) -> bool:
        return not self.failures()

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 2

    def render(self) -> str:
        lines = []
        top = self.final_resolution
        for c in self.checks:
            status = ""
            if c.resolution == top:
                status = "PASS" if c.delta < self.tolerance else "FAIL"
            lines.append(
                f"{c.name:<16} N={c.resolution:>3}x{c.resolution:<3} oracle={c.oracle:.12g} "
                f"closed={c.closed:.12g} delta={c.delta:.3e} {status}".rstrip()
            )
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"verify {verdict}: {len(self.failures())} failing check(s) at tolerance {self.tolerance:g} ({self.elapsed:.1f}s)")
        return "\n".join(lines)


def run_verify(
    scenario: Scenario = DEFAULT_SCENARIO,
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    target_rates: Sequence[float] = (0.5, 2.0, 6.0),
    tolerance: float = VERIFY_TOLERANCE,
    gain_b_factor: float = 1.0,
) -> VerifyReport:
    """Cross-check closed forms against the discretised oracle at each resolution.

    ``gain_b_factor`` deliberately corrupts Bob's closed-form gain, which lets
    the harness prove it can fail.
    """
    if ApertureKind(scenario.array) is not ApertureKind.CAPA:
        raise CapaError("verify runs on continuous apertures")
    t0 = time.perf_counter()
    params, bob, eve, ap, radio = scenario.channel, scenario.bob, scenario.eve, scenario.aperture, scenario.radio
    link = scenario.link(LinkMethod.CLOSED_FORM)
    if gain_b_factor != 1.0:
        link = link.scaled(g_b=gain_b_factor)
    gb_closed = capa_gain_closed(params, bob, ap) * gain_b_factor
    ge_closed = capa_gain_closed(params, eve, ap)
    rho_closed = correlation_chebyshev(params, bob, eve, ap, scenario.chebyshev_T)
    msr_closed = secrecy.msr(link, radio).value
    mrp_closed = {R: secrecy.mrp(link, radio, R).value for R in target_rates}

    checks = []
    for n in resolutions:
        fld = oracle.discretize(params, bob, eve, ap, make_grid(ap, QuadratureRule.MIDPOINT, n, n))
        checks.append(VerifyCheck("gain_b", n, fld.gain_b, gb_closed))
        checks.append(VerifyCheck("gain_e", n, fld.gain_e, ge_closed))
        checks.append(VerifyCheck("|rho|", n, abs(fld.correlation), abs(rho_closed)))
        checks.append(VerifyCheck("msr", n, oracle.oracle_msr(fld, radio).value, msr_closed))
        for R, ref in mrp_closed.items():
            checks.append(VerifyCheck(f"mrp(R0={R:g})", n, oracle.oracle_mrp(fld, radio, R).value, ref))
    return VerifyReport(checks, tolerance, time.perf_counter() - t0)
