"""Scenario runner: config files in, deterministic CSV tables out.

Seven scenario kinds cover the package's standard numerical experiments:

* ``evolve``     — one undriven trajectory from the maximum-entropy state,
                   per-frame currents / entropy / entropy production.
* ``driven``     — same table for a driven run, plus the two
                   effective-temperature deviation columns.
* ``steady``     — undriven steady state: covariance, density matrix,
                   steady currents and entropy production rate.
* ``sweep_boundary`` — steady Σ̇ over a (T₁/T₂, ε₁/ε₂) grid.
* ``sweep_detuning`` — steady J₁ versus the splitting difference Δε.
* ``sweep_scaling``  — |J₁| versus ζ² (or λ²) for power-law fits.
* ``relaxation``     — τ₀, τ_r and their ratio versus ζ².

Sweep points run in separate processes when ``threads`` allows; results are
gathered in grid order, so the emitted CSV is byte-identical regardless of
the worker count.  A failed sweep point becomes a row with NaN values and
an ``error:<Type>`` status instead of aborting the sweep.
"""

from __future__ import annotations

import configparser
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .baths import BathParams
from .dynamics import IntegratorConfig, integrate, steady_state_by_integration
from .errors import ConfigError
from .gaussian import (
    covariance_from_density,
    drift_diffusion,
    relaxation_time,
    steady_covariance,
    steady_heat_currents,
)
from .model import QubitParams, SystemConfig, maximum_entropy_state
from .thermo import effective_temperature_check, find_tau0, thermo_record

KINDS = (
    "evolve", "steady", "sweep_boundary", "sweep_detuning",
    "sweep_scaling", "relaxation", "driven",
)
SCALING_AXES = ("zeta2", "lambda2")
DEFAULT_HORIZONS = {"evolve": 12.0, "driven": 10.0}
#: drift eigenvalue gap under which the Lyapunov path yields to integration
DEGENERATE_DRIFT_GAP = 1e-10

EVOLVE_HEADER = (
    "t", "J1", "J2", "Js1", "JI1", "Js2", "JI2", "S", "Sigma_dot",
    "min_eig", "rate_neg_flag",
)
DRIVEN_HEADER = EVOLVE_HEADER + ("efftemp_dev1", "efftemp_dev2")


@dataclass
class CsvTable:
    """Header plus rectangular rows of numbers (and a status string column)."""

    header: tuple
    rows: list

    def __post_init__(self):
        self.header = tuple(self.header)
        for k, row in enumerate(self.rows):
            if len(row) != len(self.header):
                raise ValueError(
                    f"row {k} has {len(row)} cells, header has {len(self.header)}"
                )


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario: physical system, integrator knobs, grids."""

    kind: str
    system: SystemConfig
    integrator: IntegratorConfig
    horizon: float | None = None
    out: str | None = None
    threads: int | None = None
    t_ratio_grid: tuple = ()
    eps_ratio_grid: tuple = ()
    detuning_grid: tuple = ()
    scaling_axis: str = "zeta2"
    scaling_grid: tuple = ()
    relaxation_grid: tuple = ()


def kind_violations(kind: str, system: SystemConfig) -> list:
    """Mismatches between the scenario kind and the drive settings."""
    if kind not in KINDS:
        return [f"scenario.kind must be one of {', '.join(KINDS)}; got {kind!r}"]
    if kind == "driven" and not system.is_driven:
        return ["scenario.kind=driven requires nonzero drive amplitude and frequency"]
    if kind != "driven" and system.is_driven:
        return [f"scenario.kind={kind} requires an undriven configuration "
                "(use the driven scenario for nonzero drives)"]
    return []


class _Reader:
    """Typed key access over a parsed config that records every problem."""

    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser
        self.problems: list = []
        self.seen: dict = {}

    def _raw(self, section, key, required, default):
        self.seen.setdefault(section, set()).add(key)
        if not self.parser.has_option(section, key):
            if required:
                self.problems.append(f"missing required key {section}.{key}")
            return None if required else default
        return self.parser.get(section, key)

    def floatval(self, section, key, required=False, default=None):
        raw = self._raw(section, key, required, None)
        if raw is None:
            return default
        try:
            val = float(raw)
        except ValueError:
            self.problems.append(f"{section}.{key} is not a number: {raw!r}")
            return default
        if not math.isfinite(val):
            self.problems.append(f"{section}.{key} must be finite, got {raw!r}")
            return default
        return val

    def intval(self, section, key, required=False, default=None):
        raw = self._raw(section, key, required, None)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            self.problems.append(f"{section}.{key} is not an integer: {raw!r}")
            return default

    def strval(self, section, key, required=False, default=None):
        raw = self._raw(section, key, required, None)
        return default if raw is None else raw.strip()

    def positive(self, section, key, required=False, default=None):
        val = self.floatval(section, key, required, default)
        if val is not None and not val > 0:
            self.problems.append(f"{section}.{key} must be positive, got {val}")
            return default
        return val

    def check_unknown_keys(self):
        for section in self.parser.sections():
            known = self.seen.get(section)
            if known is None:
                self.problems.append(f"unknown section [{section}]")
                continue
            for key in self.parser.options(section):
                if key not in known:
                    self.problems.append(f"unknown key {section}.{key}")


def _grid(reader: _Reader, prefix: str, lo_default, hi_default, n_default,
          spacing: str = "linear"):
    lo = reader.floatval("scenario", f"{prefix}_min", default=lo_default)
    hi = reader.floatval("scenario", f"{prefix}_max", default=hi_default)
    n = reader.intval("scenario", f"{prefix}_count", default=n_default)
    if lo is None or hi is None or n is None:
        return ()
    if n < 1:
        reader.problems.append(f"scenario.{prefix}_count must be >= 1, got {n}")
        return ()
    if hi < lo:
        reader.problems.append(
            f"scenario.{prefix}_max must be >= scenario.{prefix}_min"
        )
        return ()
    if spacing == "log":
        if lo <= 0:
            reader.problems.append(
                f"scenario.{prefix}_min must be positive for a log grid, got {lo}"
            )
            return ()
        return tuple(float(x) for x in np.geomspace(lo, hi, n))
    return tuple(float(x) for x in np.linspace(lo, hi, n))


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file, reporting every violation at once."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)

    reader = _Reader(parser)
    problems = reader.problems
    for section in ("system", "bath1", "bath2"):
        if not parser.has_section(section):
            problems.append(f"missing required section [{section}]")
    if problems:
        raise ConfigError(problems)

    eps1 = reader.positive("system", "epsilon1", required=True)
    eps2 = reader.positive("system", "epsilon2", required=True)
    coupling = reader.floatval("system", "coupling", required=True)
    zeta2 = reader.floatval("system", "zeta2", required=True)
    if coupling is not None and coupling < 0:
        problems.append(f"system.coupling must be non-negative, got {coupling}")
    if zeta2 is not None and zeta2 < 0:
        problems.append(f"system.zeta2 must be non-negative, got {zeta2}")

    baths = []
    for name in ("bath1", "bath2"):
        t = reader.positive(name, "temperature", required=True)
        kappa = reader.positive(name, "kappa", required=True)
        cutoff = reader.positive(name, "cutoff", required=True)
        k_b = reader.positive(name, "k_B", default=1.0)
        baths.append((t, kappa, cutoff, k_b))

    amp = [0.0, 0.0]
    freq = [0.0, 0.0]
    if parser.has_section("drive"):
        for i in (0, 1):
            amp[i] = reader.floatval("drive", f"amplitude{i + 1}", default=0.0)
            freq[i] = reader.floatval("drive", f"frequency{i + 1}", default=0.0)
            if amp[i] < 0:
                problems.append(
                    f"drive.amplitude{i + 1} must be non-negative, got {amp[i]}"
                )
            if freq[i] < 0:
                problems.append(
                    f"drive.frequency{i + 1} must be non-negative, got {freq[i]}"
                )

    kind = "evolve"
    horizon = None
    out = None
    threads = None
    t_ratio = eps_ratio = detuning = scaling = relax = ()
    scaling_axis = "zeta2"
    if parser.has_section("scenario"):
        kind = reader.strval("scenario", "kind", default="evolve")
        horizon = reader.positive("scenario", "horizon")
        out = reader.strval("scenario", "out")
        threads = reader.intval("scenario", "threads")
        if threads is not None and threads < 1:
            problems.append(f"scenario.threads must be >= 1, got {threads}")
        scaling_axis = reader.strval("scenario", "scaling_axis", default="zeta2")
        if scaling_axis not in SCALING_AXES:
            problems.append(
                f"scenario.scaling_axis must be one of {', '.join(SCALING_AXES)};"
                f" got {scaling_axis!r}"
            )
            scaling_axis = "zeta2"
        t_ratio = _grid(reader, "t_ratio", 1.0, 3.0, 41)
        eps_ratio = _grid(reader, "eps_ratio", 0.5, 3.0, 41)
        detuning = _grid(reader, "delta", 0.0, 10.0, 101)
        scaling = _grid(reader, "scaling", 1e-4, 1.0, 13, spacing="log")
        relax = _grid(reader, "relax_zeta2", 0.1, 1.0, 7, spacing="log")
    else:
        t_ratio = tuple(float(x) for x in np.linspace(1.0, 3.0, 41))
        eps_ratio = tuple(float(x) for x in np.linspace(0.5, 3.0, 41))
        detuning = tuple(float(x) for x in np.linspace(0.0, 10.0, 101))
        scaling = tuple(float(x) for x in np.geomspace(1e-4, 1.0, 13))
        relax = tuple(float(x) for x in np.geomspace(0.1, 1.0, 7))

    step = record_stride = t_max = None
    steady_tol = 1e-10
    positivity_tol = 1e-8
    if parser.has_section("integrator"):
        step = reader.positive("integrator", "step")
        record_stride = reader.intval("integrator", "record_stride")
        if record_stride is not None and record_stride < 1:
            problems.append(
                f"integrator.record_stride must be >= 1, got {record_stride}"
            )
            record_stride = None
        t_max = reader.positive("integrator", "t_max")
        steady_tol = reader.positive("integrator", "steady_tol", default=1e-10)
        positivity_tol = reader.positive(
            "integrator", "positivity_tol", default=1e-8
        )
    reader.check_unknown_keys()

    if eps2 is not None and detuning and eps2 + min(detuning) <= 0:
        problems.append(
            "scenario.delta_min would make epsilon1 = epsilon2 + delta non-positive"
        )

    system = None
    if not problems:
        try:
            system = SystemConfig(
                qubit1=QubitParams(eps1, amp[0], freq[0]),
                qubit2=QubitParams(eps2, amp[1], freq[1]),
                bath1=BathParams(*baths[0]),
                bath2=BathParams(*baths[1]),
                coupling=coupling,
                zeta2=zeta2,
            )
        except ValueError as exc:
            problems.append(str(exc))
    if system is not None:
        problems.extend(kind_violations(kind, system))
    if problems:
        raise ConfigError(problems)

    return ScenarioConfig(
        kind=kind,
        system=system,
        integrator=IntegratorConfig(
            step=step, record_stride=record_stride, t_max=t_max,
            steady_tol=steady_tol, positivity_tol=positivity_tol,
        ),
        horizon=horizon,
        out=out,
        threads=threads,
        t_ratio_grid=t_ratio,
        eps_ratio_grid=eps_ratio,
        detuning_grid=detuning,
        scaling_axis=scaling_axis,
        scaling_grid=scaling,
        relaxation_grid=relax,
    )


# ---------------------------------------------------------------------------
# steady-state helpers (shared by sweeps)

def _robust_steady_cov(system: SystemConfig) -> np.ndarray:
    """Lyapunov steady covariance, integrating instead if W is near-degenerate."""
    dd = drift_diffusion(system)
    ws = np.linalg.eigvals(dd.drift)
    if abs(ws[0] - ws[1]) < DEGENERATE_DRIFT_GAP:
        rho = steady_state_by_integration(maximum_entropy_state(), system)
        return covariance_from_density(rho)
    return steady_covariance(dd)


def _steady_sigma(system: SystemConfig) -> float:
    j1, j2 = steady_heat_currents(_robust_steady_cov(system), system)
    return -(system.bath1.beta * j1 + system.bath2.beta * j2)


# ---------------------------------------------------------------------------
# sweep workers (module level so process pools can pickle them)

def _boundary_point(args):
    t_ratio, eps_ratio, base = args
    try:
        system = replace(
            base,
            bath1=replace(base.bath1, temperature=t_ratio * base.bath2.temperature),
            qubit1=replace(base.qubit1, epsilon=eps_ratio * base.qubit2.epsilon),
        )
        return (t_ratio, eps_ratio, _steady_sigma(system), "ok")
    except Exception as exc:
        return (t_ratio, eps_ratio, math.nan, f"error:{type(exc).__name__}")


def _detuning_point(args):
    delta, base = args
    try:
        system = replace(
            base,
            qubit1=replace(base.qubit1, epsilon=base.qubit2.epsilon + delta),
        )
        j1, _ = steady_heat_currents(_robust_steady_cov(system), system)
        return (delta, j1, "ok")
    except Exception as exc:
        return (delta, math.nan, f"error:{type(exc).__name__}")


def _scaling_point(args):
    value, axis, base = args
    try:
        if axis == "zeta2":
            system = replace(base, zeta2=value)
        else:
            system = replace(base, coupling=math.sqrt(value))
        j1, _ = steady_heat_currents(_robust_steady_cov(system), system)
        return (value, abs(j1), "ok")
    except Exception as exc:
        return (value, math.nan, f"error:{type(exc).__name__}")


def _relaxation_point(args):
    zeta2, base, horizon, icfg = args
    try:
        system = replace(base, zeta2=zeta2)
        tau_r = relaxation_time(drift_diffusion(system))
        span = 8.0 * tau_r if horizon is None else horizon
        traj = integrate(maximum_entropy_state(), span, system, icfg)
        res = find_tau0(traj, system, icfg)
        if not res.found:
            return (zeta2, math.nan, tau_r, math.nan, f"error:{res.reason}")
        return (zeta2, res.tau0, tau_r, res.tau0 / tau_r, "ok")
    except Exception as exc:
        return (zeta2, math.nan, math.nan, math.nan, f"error:{type(exc).__name__}")


def _run_points(worker, args, threads):
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(args) <= 1:
        return [worker(a) for a in args]
    workers = min(threads, len(args))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(args) // (4 * workers))
        return list(pool.map(worker, args, chunksize=chunk))


# ---------------------------------------------------------------------------
# scenario implementations

def _trajectory_table(cfg: ScenarioConfig, driven: bool) -> CsvTable:
    system = cfg.system
    horizon = cfg.horizon
    if horizon is None:
        horizon = DEFAULT_HORIZONS["driven" if driven else "evolve"]
    traj = integrate(maximum_entropy_state(), horizon, system, cfg.integrator)
    rows = []
    for t, state, low, neg in zip(
        traj.times, traj.states, traj.min_eigenvalues, traj.rate_negative
    ):
        t = float(t)
        rec = thermo_record(state, t, system)
        row = (
            rec.t, rec.j1, rec.j2, rec.js1, rec.ji1, rec.js2, rec.ji2,
            rec.entropy, rec.sigma_dot, float(low), int(bool(neg)),
        )
        if driven:
            row = row + (
                effective_temperature_check(1, t, system),
                effective_temperature_check(2, t, system),
            )
        rows.append(row)
    return CsvTable(DRIVEN_HEADER if driven else EVOLVE_HEADER, rows)


def _steady_table(cfg: ScenarioConfig) -> CsvTable:
    system = cfg.system
    cov = _robust_steady_cov(system)
    rho = steady_state_by_integration(
        maximum_entropy_state(), system, cfg.integrator
    )
    j1, j2 = steady_heat_currents(cov, system)
    sigma = -(system.bath1.beta * j1 + system.bath2.beta * j2)
    header = []
    row = []
    for i in (1, 2):
        for j in (1, 2):
            val = complex(cov[i - 1, j - 1])
            header += [f"C{i}{j}_re", f"C{i}{j}_im"]
            row += [val.real, val.imag]
    for i in range(4):
        for j in range(4):
            val = complex(rho[i, j])
            header += [f"rho_{i}{j}_re", f"rho_{i}{j}_im"]
            row += [val.real, val.imag]
    header += ["J1", "J2", "Sigma_dot"]
    row += [j1, j2, sigma]
    return CsvTable(tuple(header), [tuple(row)])


def _boundary_table(cfg: ScenarioConfig) -> CsvTable:
    args = [
        (tr, er, cfg.system)
        for tr in cfg.t_ratio_grid
        for er in cfg.eps_ratio_grid
    ]
    rows = _run_points(_boundary_point, args, cfg.threads)
    return CsvTable(
        ("T1_over_T2", "eps1_over_eps2", "Sigma_dot_ss", "status"), rows
    )


def _detuning_table(cfg: ScenarioConfig) -> CsvTable:
    args = [(d, cfg.system) for d in cfg.detuning_grid]
    rows = _run_points(_detuning_point, args, cfg.threads)
    return CsvTable(("delta_eps", "J1_ss", "status"), rows)


def _scaling_table(cfg: ScenarioConfig) -> CsvTable:
    args = [(v, cfg.scaling_axis, cfg.system) for v in cfg.scaling_grid]
    rows = _run_points(_scaling_point, args, cfg.threads)
    return CsvTable((cfg.scaling_axis, "J1_ss_abs", "status"), rows)


def _relaxation_table(cfg: ScenarioConfig) -> CsvTable:
    args = [
        (z, cfg.system, cfg.horizon, cfg.integrator)
        for z in cfg.relaxation_grid
    ]
    rows = _run_points(_relaxation_point, args, cfg.threads)
    return CsvTable(("zeta2", "tau0", "tau_r", "ratio", "status"), rows)


def run_scenario(cfg: ScenarioConfig) -> CsvTable:
    """Execute the scenario and return its table (nothing is written here)."""
    bad = kind_violations(cfg.kind, cfg.system)
    if bad:
        raise ConfigError(bad)
    if cfg.kind == "evolve":
        return _trajectory_table(cfg, driven=False)
    if cfg.kind == "driven":
        return _trajectory_table(cfg, driven=True)
    if cfg.kind == "steady":
        return _steady_table(cfg)
    if cfg.kind == "sweep_boundary":
        return _boundary_table(cfg)
    if cfg.kind == "sweep_detuning":
        return _detuning_table(cfg)
    if cfg.kind == "sweep_scaling":
        return _scaling_table(cfg)
    return _relaxation_table(cfg)


# ---------------------------------------------------------------------------
# CSV emission

def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    text = str(value)
    if any(ch in text for ch in (",", '"', "\n")):
        return '"' + text.replace('"', '""') + '"'
    return text


def emit_csv(table: CsvTable, path) -> None:
    """Write header + rows, LF line endings, floats at 17 significant digits."""
    lines = [",".join(table.header)]
    for row in table.rows:
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
