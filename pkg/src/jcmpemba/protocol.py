"""Single-step versus two-step relaxation and the Pontus-Mpemba predicate.

The single-step protocol relaxes at constant cavity loss ``kappa``.  The
two-step protocol keeps the loss at ``kappa1`` for a time ``tau`` (about half a
Rabi period in the N-excitation manifold, pi / (2 g sqrt(N))) and then switches
to ``kappa``.  Both start from the same state; the effect is present when the
two-step trace distance to equilibrium at the observation time ``t_star`` is
smaller.
"""
from __future__ import annotations

import dataclasses
import enum
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .hilbert import BasisLabel, DensityMatrix, ModelParams, atomic_excitation, hs_distance, \
    photon_number, trace_distance
from .integrator import DEFAULT_ATOL, DEFAULT_RTOL, Trajectory, integrate, make_schedule
from .liouvillian import GeneratorKind, check_kind, default_kind, stationary_state

DEFAULT_T_STAR = 8.0  # in units of 1/g
DEFAULT_T_MAX = 10.0  # in units of 1/g
DEFAULT_SAMPLES = 2001
TIE_EPSILON = 1e-9
WORKERS_ENV = "JCMPEMBA_WORKERS"

# sweepable axes, each expressed as a ratio: tau/tau0, delta/g, gamma/g, kappa1/g
AXES = ("tau", "delta", "gamma", "kappa1")


class ProtocolKind(enum.Enum):
    SINGLE_STEP = "single"
    TWO_STEP = "two"


class ProtocolError(ValueError):
    pass


def half_rabi_time(g: float, N: int = 1) -> float:
    """pi / (2 g sqrt(N)): time for |e,N-1> to turn into |g,N> without loss."""
    if g <= 0:
        raise ValueError("half Rabi time needs g > 0")
    return np.pi / (2 * g * np.sqrt(N))


def excited_initial_state(N: int) -> DensityMatrix:
    """|e, N-1><e, N-1|: excited atom with N-1 photons."""
    return DensityMatrix.pure(BasisLabel("e", N - 1), N)


def ground_state(N: int) -> DensityMatrix:
    return DensityMatrix.pure(BasisLabel("g", 0), N)


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """One relaxation run.

    ``tau`` defaults to the half Rabi period, ``t_max`` to 10/g and ``initial``
    to |e,N-1><e,N-1|.  ``reference`` picks the equilibrium the distances are
    measured against: the stationary state of the final generator, or the
    zero-temperature ground state |g,0><g,0|.
    """

    kind: ProtocolKind
    model: ModelParams
    tau: float | None = None
    t_max: float | None = None
    initial: DensityMatrix | None = None
    generator: GeneratorKind | None = None
    reference: Literal["stationary", "ground"] = "stationary"

    def __post_init__(self):
        m = self.model
        if m.g <= 0:
            raise ProtocolError("protocols need g > 0 (g sets the time unit)")
        kind = ProtocolKind(self.kind)
        object.__setattr__(self, "kind", kind)
        gen = default_kind(m) if self.generator is None else GeneratorKind(self.generator)
        check_kind(gen, m)
        object.__setattr__(self, "generator", gen)
        if self.t_max is None:
            object.__setattr__(self, "t_max", DEFAULT_T_MAX / m.g)
        if kind is ProtocolKind.TWO_STEP and self.tau is None:
            object.__setattr__(self, "tau", half_rabi_time(m.g, m.N))
        if self.tau is not None and not 0 <= self.tau < self.t_max:
            raise ProtocolError(f"tau={self.tau} must satisfy 0 <= tau < t_max={self.t_max}")
        if self.initial is None:
            object.__setattr__(self, "initial", excited_initial_state(m.N))
        elif not isinstance(self.initial, DensityMatrix):
            object.__setattr__(self, "initial", DensityMatrix(self.initial))
        if self.initial.N != m.N:
            raise ProtocolError(f"initial state has N={self.initial.N}, model has N={m.N}")
        if self.reference not in ("stationary", "ground"):
            raise ProtocolError(f"unknown equilibrium reference {self.reference!r}")

    @property
    def tau0(self) -> float:
        return half_rabi_time(self.model.g, self.model.N)

    def replace(self, **changes) -> "ProtocolSpec":
        return dataclasses.replace(self, **changes)

    def single_step(self) -> "ProtocolSpec":
        return self.replace(kind=ProtocolKind.SINGLE_STEP, tau=None)

    def two_step(self, tau: float | None = None) -> "ProtocolSpec":
        return self.replace(kind=ProtocolKind.TWO_STEP, tau=tau if tau is not None else self.tau)


def equilibrium_state(spec: ProtocolSpec) -> DensityMatrix:
    """Relaxation target: stationary state of the post-switch generator (or |g,0>)."""
    if spec.reference == "ground":
        return ground_state(spec.model.N)
    return stationary_state(spec.generator, spec.model)


@dataclass(frozen=True, eq=False)
class RelaxationRecord:
    times: np.ndarray
    p_e: np.ndarray
    n_ph: np.ndarray
    d_tr: np.ndarray
    d_hs: np.ndarray
    spec: ProtocolSpec
    equilibrium: DensityMatrix
    trajectory: Trajectory

    @property
    def segment(self) -> np.ndarray:
        return self.trajectory.params_at

    def d_tr_at(self, t: float) -> float:
        if not self.times[0] <= t <= self.times[-1]:
            raise ProtocolError(f"t={t} is outside the sampled range [{self.times[0]}, {self.times[-1]}]")
        return float(np.interp(t, self.times, self.d_tr))


def run_protocol(spec: ProtocolSpec, sample_count: int = DEFAULT_SAMPLES, *,
                 sample_times=None, equilibrium: DensityMatrix | None = None,
                 tol: tuple[float, float] = (DEFAULT_RTOL, DEFAULT_ATOL)) -> RelaxationRecord:
    """Integrate one protocol and record P_e, n_ph and both distances to equilibrium.

    Samples are ``sample_count`` uniform points on ``[0, t_max]`` unless
    ``sample_times`` is given.  Passing ``equilibrium`` skips the stationary-state
    solve (sweeps share one solve between the two protocols).
    """
    if sample_times is None:
        if sample_count < 2:
            raise ValueError("sample_count must be >= 2")
        sample_times = np.linspace(0.0, spec.t_max, sample_count)
    schedule = make_schedule(spec)
    traj = integrate(spec.generator, spec.initial, schedule, sample_times, tol=tol)
    eq = equilibrium_state(spec) if equilibrium is None else equilibrium
    states = traj.states
    return RelaxationRecord(
        times=traj.times,
        p_e=np.array([atomic_excitation(s) for s in states]),
        n_ph=np.array([photon_number(s) for s in states]),
        d_tr=np.array([trace_distance(s, eq) for s in states]),
        d_hs=np.array([hs_distance(s, eq) for s in states]),
        spec=spec,
        equilibrium=eq,
        trajectory=traj,
    )


@dataclass(frozen=True)
class MpembaVerdict:
    effect: bool
    t_star: float
    d_tr_single: float
    d_tr_two: float
    margin: float


def _shared_model(m: ModelParams) -> ModelParams:
    return dataclasses.replace(m, kappa1=0.0)


def detect_pontus_mpemba(single: RelaxationRecord, two: RelaxationRecord, t_star: float | None = None,
                         tie_epsilon: float = TIE_EPSILON) -> MpembaVerdict:
    """Compare trace distances at ``t_star`` (default 8/g); ties count as no effect.

    ``margin = d_tr_single - d_tr_two`` is positive when the two-step run is closer
    to equilibrium.
    """
    if _shared_model(single.spec.model) != _shared_model(two.spec.model):
        raise ProtocolError("records were produced with different model parameters")
    if not np.array_equal(single.spec.initial.entries, two.spec.initial.entries):
        raise ProtocolError("records start from different initial states")
    if not single.equilibrium.allclose(two.equilibrium.entries):
        raise ProtocolError("records use different equilibrium references")
    if t_star is None:
        t_star = DEFAULT_T_STAR / two.spec.model.g
    if two.spec.tau is not None and t_star <= two.spec.tau:
        raise ProtocolError(f"t_star={t_star} must come after the switching time tau={two.spec.tau}")
    d1 = single.d_tr_at(t_star)
    d2 = two.d_tr_at(t_star)
    return MpembaVerdict(bool(d2 < d1 - tie_epsilon), float(t_star), d1, d2, d1 - d2)


def compare_protocols(spec: ProtocolSpec, t_star: float | None = None, sample_count: int = DEFAULT_SAMPLES,
                      tie_epsilon: float = TIE_EPSILON):
    """Run both protocols from ``spec`` and return ``(verdict, single, two)``."""
    t_star = DEFAULT_T_STAR / spec.model.g if t_star is None else t_star
    single_spec = spec.single_step()
    two_spec = spec.two_step()
    eq = equilibrium_state(single_spec)
    times = np.linspace(0.0, spec.t_max, sample_count)
    if not times[0] <= t_star <= times[-1]:
        raise ProtocolError(f"t_star={t_star} lies outside [0, t_max={spec.t_max}]")
    single = run_protocol(single_spec, sample_times=times, equilibrium=eq)
    two = run_protocol(two_spec, sample_times=times, equilibrium=eq)
    return detect_pontus_mpemba(single, two, t_star, tie_epsilon), single, two


@dataclass(frozen=True)
class Axis:
    """Sweep axis: ``name`` in :data:`AXES`, values ``linspace(lo, hi, steps)``."""

    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.name not in AXES:
            raise ProtocolError(f"unknown sweep axis {self.name!r}; choose from {AXES}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ProtocolError("axis range must be finite")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ProtocolError(f"axis needs at least 2 steps, got {self.steps}")

    @classmethod
    def coerce(cls, spec) -> "Axis":
        if isinstance(spec, Axis):
            return spec
        name, (lo, hi), steps = spec
        return cls(name, float(lo), float(hi), int(steps))

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True, eq=False)
class PhaseDiagram:
    """Effect flags and margins on a grid; ``effect[iy, ix]`` sits at ``(x[ix], y[iy])``."""

    x_axis: Axis
    y_axis: Axis
    effect: np.ndarray
    margin: np.ndarray
    t_star: float
    base: ProtocolSpec

    @property
    def x(self) -> np.ndarray:
        return self.x_axis.values

    @property
    def y(self) -> np.ndarray:
        return self.y_axis.values

    def cells(self):
        """Row-major iteration: y outer, x inner."""
        for iy, yv in enumerate(self.y):
            for ix, xv in enumerate(self.x):
                yield float(xv), float(yv), bool(self.effect[iy, ix]), float(self.margin[iy, ix])

    def at(self, x: float, y: float) -> tuple[bool, float]:
        ix = int(np.argmin(np.abs(self.x - x)))
        iy = int(np.argmin(np.abs(self.y - y)))
        return bool(self.effect[iy, ix]), float(self.margin[iy, ix])


def _apply(base: ProtocolSpec, assignment: dict[str, float]) -> ProtocolSpec:
    g = base.model.g
    fields = {name: value * g for name, value in assignment.items() if name != "tau"}
    model = dataclasses.replace(base.model, **fields)
    tau = assignment["tau"] * half_rabi_time(g, model.N) if "tau" in assignment else base.tau
    if tau is None:
        tau = half_rabi_time(g, model.N)
    return base.replace(kind=ProtocolKind.TWO_STEP, model=model, tau=tau)


def _sweep_row(base: ProtocolSpec, x_axis: Axis, y_name: str, y_value: float, t_star: float,
               tie_epsilon: float):
    cache = {}
    effects, margins = [], []
    times = [0.0, t_star]
    for xv in x_axis.values:
        two_spec = _apply(base, {x_axis.name: float(xv), y_name: y_value})
        single_spec = two_spec.single_step()
        key = _shared_model(single_spec.model)
        if key not in cache:
            eq = equilibrium_state(single_spec)
            cache[key] = (eq, run_protocol(single_spec, sample_times=times, equilibrium=eq))
        eq, single = cache[key]
        two = run_protocol(two_spec, sample_times=times, equilibrium=eq)
        verdict = detect_pontus_mpemba(single, two, t_star, tie_epsilon)
        effects.append(verdict.effect)
        margins.append(verdict.margin)
    return effects, margins


def _sweep_row_star(args):
    return _sweep_row(*args)


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def sweep_phase_diagram(base: ProtocolSpec, x_axis, y_axis, t_star: float | None = None,
                        workers: int | None = None, tie_epsilon: float = TIE_EPSILON) -> PhaseDiagram:
    """Evaluate the predicate on a 2-D grid of two of ``tau``, ``delta``, ``gamma``, ``kappa1``.

    Values are ratios (tau/tau0, delta/g, gamma/g, kappa1/g); ``base`` supplies
    everything else.  Rows (fixed y) are independent work items, and the result
    does not depend on ``workers``.
    """
    x_axis, y_axis = Axis.coerce(x_axis), Axis.coerce(y_axis)
    if x_axis.name == y_axis.name:
        raise ProtocolError(f"both axes sweep {x_axis.name!r}")
    t_star = DEFAULT_T_STAR / base.model.g if t_star is None else float(t_star)
    if t_star > base.t_max:
        raise ProtocolError(f"t_star={t_star} exceeds t_max={base.t_max}")
    jobs = [(base, x_axis, y_axis.name, float(yv), t_star, tie_epsilon) for yv in y_axis.values]
    workers = resolve_workers(workers)
    if workers == 1:
        rows = [_sweep_row_star(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row_star, jobs))
    effect = np.array([r[0] for r in rows], dtype=bool)
    margin = np.array([r[1] for r in rows], dtype=float)
    return PhaseDiagram(x_axis, y_axis, effect, margin, t_star, base)
