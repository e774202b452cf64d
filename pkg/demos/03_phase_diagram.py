#
# Where does the two-step protocol win?  Sweep the switching time against the
# detuning and print the grid ('#' = effect).  Set JCMPEMBA_WORKERS to use
# more processes.
#
from jcmpemba import ModelParams, ProtocolKind, ProtocolSpec, sweep_phase_diagram


def run():
    base = ProtocolSpec(ProtocolKind.TWO_STEP, ModelParams(g=1.0, kappa=8.0))
    d = sweep_phase_diagram(base, ("tau", (0, 2), 21), ("delta", (-1, 1), 21))

    print("rows: delta/g from +1 (top) to -1; columns: tau/tau0 from 0 to 2\n")
    for iy in reversed(range(len(d.y))):
        row = "".join("#" if e else "." for e in d.effect[iy])
        print(f"{d.y[iy]:+5.1f}  {row}")
    print("       " + "0" + " " * 9 + "1" + " " * 9 + "2")

    best = d.margin.max()
    print(f"\nlargest margin {best:.4f} (D_tr single minus D_tr two-step at t* = 8/g)")


if __name__ == "__main__":
    run()
