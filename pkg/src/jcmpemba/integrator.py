"""Time integration over piecewise-constant dissipation schedules.

Each segment of a :class:`QuenchSchedule` is integrated separately with an
adaptive explicit Runge-Kutta method, so the instant at which parameters jump
is always a step boundary.  The state is propagated in real Hermitian
coordinates (:func:`jcmpemba.liouvillian.pack`), which keeps every sampled
density matrix exactly Hermitian.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .hilbert import TRACE_TOL, DensityMatrix, InvalidStateError, ModelParams
from .liouvillian import Generator, GeneratorKind, pack, unpack

if TYPE_CHECKING:
    from .protocol import ProtocolSpec

# rank-deficient states (pure atom-photon superpositions) need these to keep
# interpolated samples inside the -1e-9 positivity floor
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
MAX_STEP_RATES = 2.0
DEFAULT_METHOD = "DOP853"
RENORMALIZE_THRESHOLD = 1e-12


class IntegrationError(RuntimeError):
    """The ODE solver failed or produced an unphysical state."""


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class QuenchSchedule:
    """Contiguous segments ``[(t_start, params), ...]`` covering ``[0, t_max]``."""

    segments: tuple[tuple[float, ModelParams], ...]
    t_max: float

    def __post_init__(self):
        segs = tuple((float(t), p) for t, p in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ScheduleError("schedule needs at least one segment")
        if segs[0][0] != 0.0:
            raise ScheduleError(f"first segment must start at t=0, got {segs[0][0]}")
        starts = [t for t, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ScheduleError(f"segment start times must be strictly increasing: {starts}")
        if not self.t_max > starts[-1]:
            raise ScheduleError(f"t_max={self.t_max} must exceed the last segment start {starts[-1]}")
        if len({p.N for _, p in segs}) != 1:
            raise ScheduleError("all segments must share the excitation cap N")

    def bounds(self, i: int) -> tuple[float, float]:
        t0 = self.segments[i][0]
        t1 = self.segments[i + 1][0] if i + 1 < len(self.segments) else self.t_max
        return t0, t1

    def segment_index(self, t) -> np.ndarray:
        starts = np.array([s for s, _ in self.segments])
        return np.searchsorted(starts, np.asarray(t, dtype=float), side="right") - 1

    @property
    def final_params(self) -> ModelParams:
        return self.segments[-1][1]


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    params_at: np.ndarray
    renormalization: np.ndarray
    schedule: QuenchSchedule

    def __len__(self):
        return len(self.times)

    def observable(self, fn) -> np.ndarray:
        return np.array([fn(s) for s in self.states])


def make_schedule(protocol: "ProtocolSpec") -> QuenchSchedule:
    """One segment at ``kappa`` (single step), or ``kappa1`` on ``[0, tau)`` then ``kappa``."""
    from .protocol import ProtocolKind

    model = protocol.model
    t_max = protocol.t_max
    if protocol.kind is ProtocolKind.SINGLE_STEP or not protocol.tau:
        return QuenchSchedule(((0.0, model),), t_max)
    if protocol.tau < 0 or protocol.tau >= t_max:
        raise ScheduleError(f"switching time tau={protocol.tau} must lie in [0, t_max={t_max})")
    low_loss = dataclasses.replace(model, kappa=model.kappa1)
    return QuenchSchedule(((0.0, low_loss), (protocol.tau, model)), t_max)


def integrate(kind: GeneratorKind, rho0, schedule: QuenchSchedule,
              sample_times: Sequence[float], tol: tuple[float, float] = (DEFAULT_RTOL, DEFAULT_ATOL),
              method: str = DEFAULT_METHOD) -> Trajectory:
    """Integrate the Lindblad equation along ``schedule`` and sample at ``sample_times``.

    ``sample_times`` must be sorted and lie in ``[0, t_max]``.  A sample exactly
    at a switching time is attributed to the later segment (the state itself is
    continuous there).
    """
    rtol, atol = tol
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    times = np.asarray(sample_times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("sample_times must be a non-empty 1-D sequence")
    if np.any(np.diff(times) < 0):
        raise ValueError("sample_times must be sorted")
    if times[0] < 0 or times[-1] > schedule.t_max:
        raise ValueError(f"sample_times must lie in [0, {schedule.t_max}]")
    if rho0.N != schedule.final_params.N:
        raise ValueError(f"initial state has N={rho0.N}, schedule has N={schedule.final_params.N}")

    seg_of = schedule.segment_index(times)
    packed = np.empty((times.size, rho0.dim ** 2))
    y = pack(rho0.entries)
    for i, (_, params) in enumerate(schedule.segments):
        t0, t1 = schedule.bounds(i)
        mask = seg_of == i
        gen = Generator(kind, params)
        M = gen.packed
        t_eval = times[mask]
        last = i + 1 == len(schedule.segments)
        if t_eval.size == 0 and last:
            break
        # interior segments also need their end state to seed the next one
        t_req = t_eval if last else np.append(t_eval, t1)
        rate = params.max_rate()
        if rate > 0:
            first_step, max_step = min(0.1 / rate, t1 - t0), MAX_STEP_RATES / rate
        else:
            first_step, max_step = None, np.inf
        sol = solve_ivp(lambda t, v: M @ v, (t0, t1), y, method=method, t_eval=t_req,
                        rtol=rtol, atol=atol, first_step=first_step, max_step=max_step)
        if not sol.success:
            raise IntegrationError(f"segment {i} [{t0}, {t1}] failed: {sol.message}")
        packed[mask] = sol.y.T[:t_eval.size]
        y = sol.y[:, -1]

    states, renorm = [], np.zeros(times.size)
    for k, vec in enumerate(packed):
        rho = unpack(vec, rho0.dim)
        drift = np.trace(rho).real - 1.0
        if abs(drift) > TRACE_TOL:
            raise IntegrationError(f"trace drift {drift:.3g} at t={times[k]} exceeds {TRACE_TOL}")
        if abs(drift) > RENORMALIZE_THRESHOLD:
            rho = rho / (1.0 + drift)
            renorm[k] = drift
        try:
            states.append(DensityMatrix(rho))
        except InvalidStateError as exc:
            raise IntegrationError(f"unphysical state at t={times[k]}: {exc}") from exc
    return Trajectory(times, tuple(states), seg_of, renorm, schedule)

