"""Spectrum of the 4x4 dynamical matrix of the resonant single-excitation sector.

With ``delta = gamma = 0`` the vector ``r = (rho_11, rho_22, rho_12, rho_21)``
(three-state labels |1> = |e,0>, |2> = |g,1>) obeys ``dr/dt = R r`` with a
complex-symmetric ``R``.  Its spectrum has a doubly degenerate eigenvalue
``-kappa/2`` and the pair ``-kappa/2 +- sqrt(kappa^2/4 - 4 g^2)``, which
coalesce at the exceptional point ``kappa = 4 g``.

Because ``R == R.T``, left eigenvectors are the complex conjugates of the right
ones.  Right eigenvectors are scaled so that ``v.T @ v == 1``; that makes
``u_i = conj(v_i)`` exactly and ``u_i^dag v_j = delta_ij``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .hilbert import E0, G1

DEFAULT_EP_TOL = 1e-3
EXCEPTIONAL_RATIO = 4.0


class Regime(enum.Enum):
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


class ExceptionalPointError(ArithmeticError):
    """Modal data requested at (or too close to) the exceptional point."""


@dataclass(frozen=True, eq=False)
class DynamicalMatrix:
    entries: np.ndarray
    g: float
    kappa: float


def build_dynamical_matrix(g: float, kappa: float) -> DynamicalMatrix:
    if g < 0 or kappa < 0:
        raise ValueError(f"rates must be non-negative, got g={g}, kappa={kappa}")
    ig = 1j * g
    R = np.array([
        [0, 0, ig, -ig],
        [0, -kappa, -ig, ig],
        [ig, -ig, -kappa / 2, 0],
        [-ig, ig, 0, -kappa / 2],
    ], dtype=complex)
    R.setflags(write=False)
    return DynamicalMatrix(R, float(g), float(kappa))


def _split(g, kappa):
    return np.sqrt(complex(kappa ** 2 / 4 - 4 * g ** 2))


def closed_form_eigenvalues(g: float, kappa: float) -> np.ndarray:
    """``(-k/2, -k/2, -k/2 + s, -k/2 - s)`` with ``s = sqrt(k^2/4 - 4 g^2)``.

    Below the exceptional point ``s`` is imaginary, so lambda_3 carries the
    positive Rabi frequency.  Above it lambda_3 is the slow (Purcell) mode.
    """
    s = _split(g, kappa)
    half = -kappa / 2
    return np.array([half, half, half + s, half - s], dtype=complex)


def numerical_eigenvalues(R: DynamicalMatrix) -> np.ndarray:
    return np.linalg.eigvals(np.asarray(R.entries))


def classify_regime(g: float, kappa: float, ep_tol: float = DEFAULT_EP_TOL) -> Regime:
    if g <= 0 or ep_tol <= 0:
        raise ValueError("need g > 0 and ep_tol > 0")
    ratio = kappa / g
    if abs(ratio - EXCEPTIONAL_RATIO) <= ep_tol:
        return Regime.CRITICAL
    return Regime.UNDERDAMPED if ratio < EXCEPTIONAL_RATIO else Regime.OVERDAMPED


def _bilinear_normalize(v: np.ndarray) -> np.ndarray:
    v = v / np.sqrt(v @ v)
    # sqrt leaves a sign free: make the largest component point into Re > 0
    # (Im > 0 when it is purely imaginary)
    lead = v[np.argmax(np.abs(v))]
    key = lead.real if abs(lead.real) > 1e-12 * abs(lead) else lead.imag
    return -v if key < 0 else v


def right_eigenvectors(g: float, kappa: float) -> np.ndarray:
    """Columns v_1..v_4 in closed form (unnormalised).

    ``v_1 = (0, 0, 1, 1)`` and ``v_2 = (1, 1, i k/4g, -i k/4g)`` span the
    ``-kappa/2`` eigenspace and are already bilinearly orthogonal; for the
    non-degenerate pair ``v = (1, -l/(k+l), 2ig/(k+l), -2ig/(k+l))``.
    """
    if g <= 0:
        raise ValueError("closed-form eigenvectors need g > 0")
    lam = closed_form_eigenvalues(g, kappa)
    V = np.zeros((4, 4), dtype=complex)
    V[:, 0] = (0, 0, 1, 1)
    V[:, 1] = (1, 1, 1j * kappa / (4 * g), -1j * kappa / (4 * g))
    for col in (2, 3):
        lt = lam[col]
        c = 2j * g / (kappa + lt)
        V[:, col] = (1, -lt / (kappa + lt), c, -c)
    return V


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray | None
    left_vectors: np.ndarray | None
    regime: Regime
    ep_flag: bool
    g: float
    kappa: float

    def biorthogonality_error(self) -> float:
        self._require_modes()
        gram = self.left_vectors.conj().T @ self.right_vectors
        return float(np.abs(gram - np.eye(4)).max())

    def _require_modes(self):
        if self.ep_flag:
            raise ExceptionalPointError(
                f"kappa/g = {self.kappa / self.g:.6g} is at the exceptional point; "
                "the eigenbasis is defective, integrate the equations of motion instead"
            )


def eigen_decompose(R: DynamicalMatrix, ep_tol: float = DEFAULT_EP_TOL) -> SpectralDecomposition:
    regime = classify_regime(R.g, R.kappa, ep_tol)
    lam = closed_form_eigenvalues(R.g, R.kappa)
    if regime is Regime.CRITICAL:
        return SpectralDecomposition(lam, None, None, regime, True, R.g, R.kappa)
    V = right_eigenvectors(R.g, R.kappa)
    V = np.column_stack([_bilinear_normalize(V[:, i]) for i in range(4)])
    return SpectralDecomposition(lam, V, V.conj(), regime, False, R.g, R.kappa)


def mode_overlaps(r0, dec: SpectralDecomposition) -> np.ndarray:
    """Coefficients c_i = <u_i | r0>, so that r0 = sum_i c_i v_i."""
    dec._require_modes()
    return dec.left_vectors.conj().T @ np.asarray(r0, dtype=complex)


def propagate_spectral(r0, dec: SpectralDecomposition, t) -> np.ndarray:
    """r(t) = sum_i v_i <u_i|r0> exp(lambda_i t); ``t`` may be an array (rows = times)."""
    c = mode_overlaps(r0, dec)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("propagation time must be non-negative")
    weights = np.exp(np.multiply.outer(t, dec.eigenvalues)) * c
    return weights @ dec.right_vectors.T


def r_vector(rho) -> np.ndarray:
    """(rho_11, rho_22, rho_12, rho_21) from an N = 1 density matrix."""
    rho = np.asarray(rho)
    return np.array([rho[E0, E0], rho[G1, G1], rho[E0, G1], rho[G1, E0]], dtype=complex)
