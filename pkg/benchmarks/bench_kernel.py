"""Compare the compiled and pure-Python step kernels.

    python3 benchmarks/bench_kernel.py [--repeat 5]
"""
import argparse
import time

from pidrate import kernel, sim
from pidrate.controller import ControllerConfig
from pidrate.fixed import fx


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    cfg = ControllerConfig()
    ramp = sim.Scenario(cfg, fx("1.6"), fx(1_000_000), sim.RampHold(fx("0.5"), fx("0.7"), fx("0.01")), fx(5))
    hold = sim.Scenario(ControllerConfig(k_i_fixed=fx("1.5")), fx("1.5"), fx(1_000_000), sim.Constant(fx("0.7")), fx(10))
    ratios = sim.parse_range("1.2:1.6:0.05")

    cases = {
        "ramp-and-hold run": lambda b: sim.run(ramp, backend=b),
        "K_I = 1.5 run": lambda b: sim.run(hold, backend=b),
        "phi sweep, 9 ratios": lambda b: sim.sweep_phi(ratios, fx(1), fx("0.7"), cfg, backend=b),
    }
    backends = sorted(kernel.BACKENDS)
    print(f"{'case':<22}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        row = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
        line = f"{name:<22}" + "".join(f"{row[b] * 1e3:>10.1f}ms" for b in backends)
        if "compiled" in row:
            line += f"{row['python'] / row['compiled']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
