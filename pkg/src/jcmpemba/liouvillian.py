"""Lindblad right-hand sides for the three model families and their steady states.

* ``SINGLE_EXCITATION``: the zero-temperature N = 1 sector (|e,0>, |g,1>, |g,0>).
* ``N_MANIFOLD``: zero temperature, at most N excitations, dimension 2N+1.
* ``THERMAL_RESTRICTED``: the N = 1 sector with thermal photons and thermal
  atomic excitation, projected onto the same three states.

All functions act on matrices in the canonical ordering of :mod:`jcmpemba.hilbert`.
Detuning phases use the frame in which the level energies are
``eps(g, n) = -delta (n + 1) / 2`` and ``eps(e, n) = -delta n / 2``; this is the
rotating-frame Hamiltonian shifted by ``-delta/2`` times the excitation number,
which leaves every population, distance and stationary state unchanged.
"""
from __future__ import annotations

import enum
from functools import cached_property

import numpy as np

from .hilbert import E0, G0, G1, DensityMatrix, ModelParams, hermitize


class GeneratorKind(enum.Enum):
    SINGLE_EXCITATION = "single"
    N_MANIFOLD = "n-manifold"
    THERMAL_RESTRICTED = "thermal"


class GeneratorError(ValueError):
    """Parameters incompatible with the requested generator family."""


class DegenerateNullSpaceError(ArithmeticError):
    """The generator has more than one stationary state."""


def default_kind(params: ModelParams) -> GeneratorKind:
    if params.thermal:
        return GeneratorKind.THERMAL_RESTRICTED
    if params.N == 1:
        return GeneratorKind.SINGLE_EXCITATION
    return GeneratorKind.N_MANIFOLD


def check_kind(kind: GeneratorKind, params: ModelParams) -> None:
    if kind is GeneratorKind.SINGLE_EXCITATION:
        if params.thermal:
            raise GeneratorError("single-excitation generator needs n_th = n_th_atom = 0; use THERMAL_RESTRICTED")
        if params.N != 1:
            raise GeneratorError(f"single-excitation generator needs N = 1, got N = {params.N}")
    elif kind is GeneratorKind.THERMAL_RESTRICTED:
        if params.N != 1:
            raise GeneratorError(f"thermal generator is restricted to the N = 1 states, got N = {params.N}")
    elif kind is GeneratorKind.N_MANIFOLD:
        if params.thermal:
            raise GeneratorError("N-manifold generator is zero-temperature only")
    else:
        raise GeneratorError(f"unknown generator kind {kind!r}")


def _three_state(rho) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {rho.shape}")
    return rho


def _assemble_three_state(d11, d22, d33, d12, d13, d23) -> np.ndarray:
    out = np.zeros((3, 3), dtype=complex)
    out[E0, E0], out[G1, G1], out[G0, G0] = d11, d22, d33
    out[E0, G1], out[G1, E0] = d12, np.conj(d12)
    out[E0, G0], out[G0, E0] = d13, np.conj(d13)
    out[G1, G0], out[G0, G1] = d23, np.conj(d23)
    return out


def rhs_single_excitation(rho, p: ModelParams) -> np.ndarray:
    """d(rho)/dt in the zero-temperature single-excitation sector."""
    if p.thermal:
        raise GeneratorError("thermal occupations are nonzero; use rhs_thermal")
    rho = _three_state(rho)
    g, k, gam, dlt = p.g, p.kappa, p.gamma, p.delta
    r11, r22 = rho[E0, E0].real, rho[G1, G1].real
    r12, r21 = rho[E0, G1], rho[G1, E0]
    r13, r23 = rho[E0, G0], rho[G1, G0]

    d11 = (-1j * g * (r21 - r12)).real - gam * r11
    d22 = (1j * g * (r21 - r12)).real - k * r22
    d33 = gam * r11 + k * r22
    d12 = -1j * dlt * r12 - 1j * g * (r22 - r11) - 0.5 * (gam + k) * r12
    d13 = -0.5j * dlt * r13 - 1j * g * r23 - 0.5 * gam * r13
    d23 = 0.5j * dlt * r23 - 1j * g * r13 - 0.5 * k * r23
    return _assemble_three_state(d11, d22, d33, d12, d13, d23)


def rhs_thermal(rho, p: ModelParams) -> np.ndarray:
    """d(rho)/dt on the three N = 1 states with weak thermal baths for cavity and atom."""
    rho = _three_state(rho)
    g, k, gam, dlt = p.g, p.kappa, p.gamma, p.delta
    n, na = p.n_th, p.n_th_atom
    r11, r22, r33 = rho[E0, E0].real, rho[G1, G1].real, rho[G0, G0].real
    r12, r21 = rho[E0, G1], rho[G1, E0]
    r13, r23 = rho[E0, G0], rho[G1, G0]

    d11 = (-1j * g * (r21 - r12)).real - gam * (1 + na) * r11 + gam * na * r33
    d22 = (1j * g * (r21 - r12)).real - k * (1 + n) * r22 + k * n * r33
    d33 = gam * (1 + na) * r11 + k * (1 + n) * r22 - (gam * na + k * n) * r33
    d12 = (-1j * dlt * r12 - 1j * g * (r22 - r11)
           - 0.5 * gam * (1 + 2 * na) * r12 - 0.5 * k * (1 + n) * r12)
    d13 = (-0.5j * dlt * r13 - 1j * g * r23
           - 0.5 * gam * (1 + na) * r13 - 0.5 * k * n * r13)
    d23 = (0.5j * dlt * r23 - 1j * g * r13
           - 0.5 * k * (1 + 2 * n) * r23 - 0.5 * gam * na * r23)
    return _assemble_three_state(d11, d22, d33, d12, d13, d23)


def _n_manifold_raw(rho: np.ndarray, p: ModelParams, N: int) -> np.ndarray:
    # every entry from its own family equation; no Hermitian mirroring
    g, k, gam, dlt = p.g, p.kappa, p.gamma, p.delta
    top = {"g": N, "e": N - 1}
    offset = {"g": 0, "e": N + 1}

    def el(a, n, b, m):
        if n < 0 or m < 0 or n > top[a] or m > top[b]:
            return 0.0
        return rho[offset[a] + n, offset[b] + m]

    def energy(a, n):
        return -0.5 * dlt * (n + 1) if a == "g" else -0.5 * dlt * n

    out = np.zeros_like(rho, dtype=complex)
    sq = np.sqrt
    for a in ("g", "e"):
        for n in range(top[a] + 1):
            for b in ("g", "e"):
                for m in range(top[b] + 1):
                    loss = k * (sq((n + 1) * (m + 1)) * el(a, n + 1, b, m + 1) - 0.5 * (n + m) * el(a, n, b, m))
                    phase = -1j * (energy(a, n) - energy(b, m)) * el(a, n, b, m)
                    if a == "g" and b == "g":
                        coh = -1j * g * (sq(n) * el("e", n - 1, "g", m) - sq(m) * el("g", n, "e", m - 1))
                        emit = gam * el("e", n, "e", m)
                    elif a == "e" and b == "e":
                        coh = -1j * g * (sq(n + 1) * el("g", n + 1, "e", m) - sq(m + 1) * el("e", n, "g", m + 1))
                        emit = -gam * el("e", n, "e", m)
                    elif a == "e":
                        coh = -1j * g * (sq(n + 1) * el("g", n + 1, "g", m) - sq(m) * el("e", n, "e", m - 1))
                        emit = -0.5 * gam * el("e", n, "g", m)
                    else:
                        coh = -1j * g * (sq(n) * el("e", n - 1, "e", m) - sq(m + 1) * el("g", n, "g", m + 1))
                        emit = -0.5 * gam * el("g", n, "e", m)
                    out[offset[a] + n, offset[b] + m] = phase + coh + loss + emit
    return out


def rhs_n_manifold(rho, p: ModelParams, N: int | None = None) -> np.ndarray:
    """d(rho)/dt in the manifold of at most ``N`` excitations (zero temperature).

    Ladder terms whose indices fall outside the truncated ranges are dropped.
    """
    N = p.N if N is None else N
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if p.thermal:
        raise GeneratorError("N-manifold equations are zero-temperature only")
    rho = np.asarray(rho)
    if rho.shape != (2 * N + 1, 2 * N + 1):
        raise ValueError(f"expected a {(2 * N + 1,) * 2} matrix for N = {N}, got {rho.shape}")
    return hermitize(_n_manifold_raw(rho, p, N))


def pack(rho) -> np.ndarray:
    """Real coordinates of a Hermitian matrix: diagonal, then Re/Im of the strict upper triangle."""
    rho = np.asarray(rho)
    iu = np.triu_indices(rho.shape[0], 1)
    upper = rho[iu]
    return np.concatenate([np.diag(rho).real, upper.real, upper.imag])


def unpack(vec, dim: int) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    iu = np.triu_indices(dim, 1)
    n_off = len(iu[0])
    rho = np.zeros((dim, dim), dtype=complex)
    rho[iu] = vec[dim:dim + n_off] + 1j * vec[dim + n_off:]
    rho = rho + rho.conj().T
    rho[np.diag_indices(dim)] = vec[:dim]
    return rho


class Generator:
    """Lindblad generator for one parameter set; validated once, then reusable.

    ``packed`` is the real matrix acting on :func:`pack` coordinates (the form
    the integrator propagates); ``superoperator`` is the complex matrix acting on
    the column-stacked density matrix.
    """

    def __init__(self, kind: GeneratorKind, params: ModelParams):
        check_kind(kind, params)
        self.kind = kind
        self.params = params
        self.N = params.N
        self.dim = 2 * params.N + 1
        if kind is GeneratorKind.SINGLE_EXCITATION:
            self._rhs = lambda rho: rhs_single_excitation(rho, params)
        elif kind is GeneratorKind.THERMAL_RESTRICTED:
            self._rhs = lambda rho: rhs_thermal(rho, params)
        else:
            self._rhs = lambda rho: rhs_n_manifold(rho, params, params.N)

    def __repr__(self):
        return f"Generator({self.kind.name}, {self.params!r})"

    def rhs(self, rho) -> np.ndarray:
        return self._rhs(np.asarray(rho))

    @cached_property
    def packed(self) -> np.ndarray:
        d2 = self.dim ** 2
        cols = [pack(self._rhs(unpack(e, self.dim))) for e in np.eye(d2)]
        return np.array(cols).T

    @cached_property
    def superoperator(self) -> np.ndarray:
        d = self.dim
        L = np.zeros((d * d, d * d), dtype=complex)
        for col in range(d * d):
            a, b = col % d, col // d
            E = np.zeros((d, d), dtype=complex)
            E[a, b] = 1.0
            sym = 0.5 * (E + E.conj().T)
            anti = -0.5j * (E - E.conj().T)
            L[:, col] = (self._rhs(sym) + 1j * self._rhs(anti)).reshape(-1, order="F")
        return L

    def apply(self, rho) -> np.ndarray:
        """Superoperator times the column-stacked ``rho``, reshaped back."""
        rho = np.asarray(rho)
        d = rho.shape[0]
        return (self.superoperator @ rho.reshape(-1, order="F")).reshape(d, d, order="F")

    def stationary_state(self, rel_tol: float = 1e-10) -> DensityMatrix:
        evals, evecs = np.linalg.eig(self.superoperator)
        order = np.argsort(np.abs(evals))
        scale = np.abs(evals).max()
        if scale == 0.0 or np.abs(evals[order[1]]) < rel_tol * scale:
            raise DegenerateNullSpaceError(
                f"{self.kind.name} generator has a degenerate null space for {self.params}"
            )
        if np.abs(evals[order[0]]) >= rel_tol * scale:
            raise ArithmeticError(
                f"no null vector found: smallest |eigenvalue| {np.abs(evals[order[0]]):.3g}"
            )
        rho = evecs[:, order[0]].reshape(self.dim, self.dim, order="F")
        rho = rho / np.trace(rho)
        return DensityMatrix(rho)


def make_generator(params: ModelParams, kind: GeneratorKind | None = None) -> Generator:
    return Generator(default_kind(params) if kind is None else kind, params)


def stationary_state(kind: GeneratorKind, p: ModelParams) -> DensityMatrix:
    """Unit-trace null vector of the generator (the relaxation target)."""
    return Generator(kind, p).stationary_state()
