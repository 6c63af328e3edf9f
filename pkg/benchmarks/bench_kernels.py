"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 8,10,12,14] [--repeats 5]

Times the two hot kernels (two-qubit gate application and Pauli-sum matvec)
on both backends and prints a speedup table. The compiled backend must have
been built (pip install -e . --no-build-isolation) to appear.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from easym.circuit import sample_haar_unitary
from easym.kernels import _python
from easym.pauli import HamiltonianParams, build_hamiltonian

try:
    from easym.kernels import _core
except ImportError:
    _core = None


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_gate(impl, amps, gate, pairs, repeats):
    def run():
        for i, j in pairs:
            impl.apply_two_qubit_inplace(amps, gate, i, j)

    return _time(run, repeats)


def bench_matvec(impl, compiled, amps, out, repeats):
    coeffs, flips, signs = compiled

    def run():
        out[:] = 0
        impl.pauli_matvec(coeffs, flips, signs, amps, out)

    return _time(run, repeats)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,10,12,14", help="comma-separated chain lengths")
    parser.add_argument("--repeats", type=int, default=5, help="repeats per measurement")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = [("python", _python)]
    if _core is not None:
        backends.append(("cython", _core))
    else:
        print("note: compiled backend not built; showing the fallback only\n")

    rng = np.random.default_rng(0)
    gate = sample_haar_unitary(4, rng)

    print(f"{'L':>3} {'kernel':<12}", *(f"{name:>12}" for name, _ in backends), sep="")
    for L in sizes:
        dim = 1 << L
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        amps /= np.linalg.norm(amps)
        pairs = [(j, (j + 1) % L) for j in range(L)]
        h = build_hamiltonian(HamiltonianParams(L=L, gamma=0.5, delta1=0.4, delta2=0.05))
        compiled = h.compiled()
        out = np.zeros_like(amps)

        gate_times = [bench_gate(impl, amps.copy(), gate, pairs, args.repeats) for _, impl in backends]
        matvec_times = [bench_matvec(impl, compiled, amps, out, args.repeats) for _, impl in backends]

        for label, times in ((f"gate x{L}", gate_times), ("pauli matvec", matvec_times)):
            cells = "".join(f"{t * 1e3:>10.3f}ms" for t in times)
            speedup = f"  ({times[0] / times[-1]:.1f}x)" if len(times) > 1 else ""
            print(f"{L:>3} {label:<12}{cells}{speedup}")


if __name__ == "__main__":
    main()
