"""Basis conventions, density matrices, observables and state distances.

The truncated atom-cavity space with at most ``N`` excitations is ordered as

    |g,0>, |g,1>, ..., |g,N>, |e,0>, ..., |e,N-1>

so ``|g,n>`` sits at index ``n`` and ``|e,n>`` at ``N + 1 + n``.  The three
single-excitation states used throughout the N = 1 equations,
``|1> = |e,0>``, ``|2> = |g,1>`` and ``|3> = |g,0>``, therefore live at
indices 2, 1 and 0 (see :data:`E0`, :data:`G1`, :data:`G0`).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

TRACE_TOL = 1e-9
POSITIVITY_TOL = -1e-9
HERMITICITY_TOL = 1e-9
THERMAL_WARN_LEVEL = 0.2

# single-excitation labels |1>, |2>, |3> in the canonical N = 1 ordering
E0, G1, G0 = 2, 1, 0
SINGLE_EXCITATION_INDEX = (E0, G1, G0)


class InvalidStateError(ValueError):
    """A matrix fails the density-matrix invariants."""


@dataclass(frozen=True)
class BasisLabel:
    atom: Literal["g", "e"]
    photons: int

    def __post_init__(self):
        if self.atom not in ("g", "e"):
            raise ValueError(f"atom must be 'g' or 'e', got {self.atom!r}")
        if int(self.photons) != self.photons or self.photons < 0:
            raise ValueError(f"photon number must be a non-negative integer, got {self.photons!r}")

    def __str__(self):
        return f"|{self.atom},{self.photons}>"


def dimension(N: int) -> int:
    if N < 1:
        raise ValueError(f"excitation cap N must be >= 1, got {N}")
    return 2 * N + 1


def basis_index(label: BasisLabel, N: int) -> int:
    """Position of ``label`` in the canonical ordering for excitation cap ``N``."""
    dimension(N)
    n = label.photons
    if label.atom == "g":
        if n > N:
            raise ValueError(f"{label} is outside the N={N} manifold")
        return n
    if n > N - 1:
        raise ValueError(f"{label} is outside the N={N} manifold")
    return N + 1 + n


def basis_labels(N: int) -> list[BasisLabel]:
    dimension(N)
    return [BasisLabel("g", n) for n in range(N + 1)] + [BasisLabel("e", n) for n in range(N)]


def excitation_cap(dim: int) -> int:
    if dim < 3 or dim % 2 == 0:
        raise ValueError(f"dimension {dim} is not of the form 2N+1 with N >= 1")
    return (dim - 1) // 2


def _atom_mask(N: int) -> np.ndarray:
    mask = np.zeros(2 * N + 1)
    mask[N + 1:] = 1.0
    return mask


def _photon_counts(N: int) -> np.ndarray:
    return np.concatenate([np.arange(N + 1), np.arange(N)]).astype(float)


def excitation_counts(N: int) -> np.ndarray:
    """Total excitation number a^dag a + sigma^+ sigma^- on each basis state."""
    return _photon_counts(N) + _atom_mask(N)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite state in the canonical basis.

    Only the upper triangle of ``entries`` is trusted; the lower triangle is
    rebuilt as its conjugate, so the stored matrix is Hermitian exactly.
    The array is read-only.
    """

    entries: np.ndarray

    def __init__(self, entries, *, trace_tol: float = TRACE_TOL,
                 positivity_tol: float = POSITIVITY_TOL,
                 hermiticity_tol: float = HERMITICITY_TOL, validate: bool = True):
        rho = np.array(entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
        excitation_cap(rho.shape[0])
        if validate:
            skew = np.abs(rho - rho.conj().T).max()
            if skew > hermiticity_tol:
                raise InvalidStateError(f"matrix is not Hermitian (max |rho - rho^dag| = {skew:.3g})")
        rho = hermitize(rho)
        if validate:
            tr = np.trace(rho).real
            if abs(tr - 1.0) > trace_tol:
                raise InvalidStateError(f"trace {tr!r} differs from 1 by more than {trace_tol}")
            lowest = np.linalg.eigvalsh(rho)[0]
            if lowest < positivity_tol:
                raise InvalidStateError(f"smallest eigenvalue {lowest:.3g} is below {positivity_tol}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return excitation_cap(self.dim)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def allclose(self, other, atol: float = 1e-9) -> bool:
        other = np.asarray(other)
        return other.shape == self.entries.shape and np.allclose(self.entries, other, rtol=0, atol=atol)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.entries, self.entries)))

    @classmethod
    def pure(cls, label: BasisLabel, N: int) -> "DensityMatrix":
        rho = np.zeros((2 * N + 1,) * 2, dtype=complex)
        i = basis_index(label, N)
        rho[i, i] = 1.0
        return cls(rho)

    @classmethod
    def diagonal(cls, weights: dict[BasisLabel, float], N: int) -> "DensityMatrix":
        rho = np.zeros((2 * N + 1,) * 2, dtype=complex)
        for label, w in weights.items():
            i = basis_index(label, N)
            rho[i, i] += w
        return cls(rho)


def hermitize(rho: np.ndarray) -> np.ndarray:
    """Copy of ``rho`` with the lower triangle replaced by the conjugated upper one."""
    out = np.triu(rho)
    out = out + np.triu(rho, 1).conj().T
    np.fill_diagonal(out, np.diag(rho).real)
    return out


def atomic_excitation(rho) -> float:
    """Excited-state probability P_e = Tr(|e><e| rho)."""
    rho = np.asarray(rho)
    N = excitation_cap(rho.shape[0])
    return float(np.diag(rho).real @ _atom_mask(N))


def photon_number(rho) -> float:
    """Mean intracavity photon number Tr(a^dag a rho)."""
    rho = np.asarray(rho)
    N = excitation_cap(rho.shape[0])
    return float(np.diag(rho).real @ _photon_counts(N))


def excitation_number(rho) -> float:
    rho = np.asarray(rho)
    N = excitation_cap(rho.shape[0])
    return float(np.diag(rho).real @ excitation_counts(N))


def _difference(rho, sigma) -> np.ndarray:
    a, b = np.asarray(rho), np.asarray(sigma)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return hermitize(a - b)


def trace_distance(rho, sigma) -> float:
    """D_tr = 1/2 Tr|rho - sigma|, via the eigenvalues of the Hermitian difference."""
    return 0.5 * float(np.abs(np.linalg.eigvalsh(_difference(rho, sigma))).sum())


def hs_distance(rho, sigma) -> float:
    """Hilbert-Schmidt distance sqrt(Tr[(rho - sigma)^2])."""
    diff = _difference(rho, sigma)
    return float(np.sqrt(max(np.real(np.vdot(diff, diff)), 0.0)))


@dataclass(frozen=True)
class DistancePair:
    d_tr: float
    d_hs: float


def distances(rho, sigma) -> DistancePair:
    return DistancePair(trace_distance(rho, sigma), hs_distance(rho, sigma))


@dataclass(frozen=True)
class ModelParams:
    """Physical rates of the dissipative Jaynes-Cummings model.

    Rates are in the same (arbitrary) unit; ``g`` conventionally sets the
    time unit 1/g.  ``kappa1`` is only read by two-step protocols.
    """

    g: float = 1.0
    kappa: float = 0.0
    kappa1: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    n_th: float = 0.0
    n_th_atom: float = 0.0
    N: int = 1

    def __post_init__(self):
        for name in ("g", "kappa", "kappa1", "gamma", "delta", "n_th", "n_th_atom"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        # g = 0 is accepted: the purely dissipative limit is a useful check
        for name in ("g", "kappa", "kappa1", "gamma", "n_th", "n_th_atom"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"excitation cap N must be an integer >= 1, got {self.N!r}")
        for name in ("n_th", "n_th_atom"):
            if getattr(self, name) > THERMAL_WARN_LEVEL:
                warnings.warn(
                    f"{name}={getattr(self, name)} is outside the small-occupation regime "
                    "where the three-state thermal model is reliable",
                    stacklevel=3,
                )

    @property
    def thermal(self) -> bool:
        return self.n_th > 0 or self.n_th_atom > 0

    def max_rate(self) -> float:
        return max(self.g * np.sqrt(self.N), self.kappa, self.kappa1, self.gamma, abs(self.delta))
