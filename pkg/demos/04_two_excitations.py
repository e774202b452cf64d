#
# Two excitations: start from |e,1>.  The Rabi frequency in this manifold is
# 2g*sqrt(2), so the lossless stage is shorter, and at its end the state is
# |g,2> with both quanta in the cavity.
#
import math

from jcmpemba import ModelParams, ProtocolKind, ProtocolSpec, compare_protocols, run_protocol


def run():
    spec = ProtocolSpec(ProtocolKind.TWO_STEP, ModelParams(g=1.0, kappa=8.0, N=2))
    print(f"tau = pi/(2 sqrt(2) g) = {spec.tau:.4f}  (check {math.pi / (2 * math.sqrt(2)):.4f})")

    at_tau = run_protocol(spec, sample_times=[spec.tau])
    print(f"at tau: P_e = {at_tau.p_e[0]:.2e}, n_ph = {at_tau.n_ph[0]:.8f}")

    verdict, single, two = compare_protocols(spec)
    print(f"D_tr at t* = 8/g: single {verdict.d_tr_single:.5f}, two-step {verdict.d_tr_two:.5f}")
    print("effect:", verdict.effect)


if __name__ == "__main__":
    run()
