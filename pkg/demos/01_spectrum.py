#
# Eigenvalues of the 4x4 dynamical matrix of the single-excitation sector
# as the cavity loss grows.  Below kappa/g = 4 every mode decays at -kappa/2
# and the Rabi pair oscillates at +-i*sqrt(4g^2 - kappa^2/4).  Above it the
# pair splits into a slow Purcell mode and a fast cavity mode.
#
import numpy as np

from jcmpemba import build_dynamical_matrix, closed_form_eigenvalues, eigen_decompose, mode_overlaps
from jcmpemba.spectral import numerical_eigenvalues


def run():
    g = 1.0
    print(" kappa/g   Re l3      Re l4      Im l3     |closed - numeric|")
    for ratio in np.linspace(0, 12, 13):
        lam = closed_form_eigenvalues(g, ratio * g)
        num = numerical_eigenvalues(build_dynamical_matrix(g, ratio * g))
        # pair each closed-form value with its nearest numerical one
        err = max(np.abs(num - z).min() for z in lam)
        print(f"{ratio:7.1f}  {lam[2].real:9.5f}  {lam[3].real:9.5f}  {lam[2].imag:8.5f}   {err:.1e}")

    # near the exceptional point the numerical pair only meets to sqrt(eps)
    print("\nat kappa/g = 4:", numerical_eigenvalues(build_dynamical_matrix(g, 4.0)).round(6))

    # an excited atom is mostly the slow mode once the cavity is lossy
    dec = eigen_decompose(build_dynamical_matrix(g, 8.0))
    c = mode_overlaps([1, 0, 0, 0], dec)
    print("\nkappa/g = 8, r0 = (1,0,0,0)")
    for i, (lam, ci) in enumerate(zip(dec.eigenvalues, c), 1):
        print(f"  mode {i}: lambda = {lam.real:8.4f}  contribution to rho_11 = {(ci * dec.right_vectors[0, i - 1]).real:8.4f}")
    print(f"  biorthogonality error {dec.biorthogonality_error():.1e}")


if __name__ == "__main__":
    run()
