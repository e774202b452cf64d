#
# Weak thermal baths.  The relaxation target is no longer |g,0> but the
# stationary state of the thermal generator, found as the null vector of the
# superoperator.
#
import numpy as np

from jcmpemba import GeneratorKind, ModelParams, ProtocolKind, ProtocolSpec, compare_protocols, rhs_thermal
from jcmpemba import stationary_state
from jcmpemba.hilbert import E0, G0, G1


def run():
    model = ModelParams(g=1.0, kappa=8.0, gamma=0.1, n_th=0.05, n_th_atom=0.1)
    ss = stationary_state(GeneratorKind.THERMAL_RESTRICTED, model)
    print("stationary populations  e0 %.5f  g1 %.5f  g0 %.5f" %
          (ss[E0, E0].real, ss[G1, G1].real, ss[G0, G0].real))
    print("residual |L rho_ss| = %.1e" % np.linalg.norm(rhs_thermal(ss.entries, model)))

    # for comparison, detailed balance of the uncoupled system
    uncoupled = stationary_state(GeneratorKind.THERMAL_RESTRICTED, ModelParams(g=0.0, kappa=8.0, gamma=0.1,
                                                                                n_th=0.05, n_th_atom=0.1))
    print("g = 0 populations       e0 %.5f  g1 %.5f  g0 %.5f" %
          (uncoupled[E0, E0].real, uncoupled[G1, G1].real, uncoupled[G0, G0].real))

    spec = ProtocolSpec(ProtocolKind.TWO_STEP, model)
    verdict, _, _ = compare_protocols(spec)
    print(f"\nD_tr at t* = 8/g: single {verdict.d_tr_single:.5f}, two-step {verdict.d_tr_two:.5f}")
    print("effect:", verdict.effect)

    ground = compare_protocols(spec.replace(reference="ground"))[0]
    print(f"measured against |g,0> instead: single {ground.d_tr_single:.5f}, two-step {ground.d_tr_two:.5f}")


if __name__ == "__main__":
    run()
