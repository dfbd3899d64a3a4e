#!/usr/bin/env python3
"""Benchmark the sieve kernels: compiled extension vs pure-Python fallback.

Usage:
    python3 benchmarks/bench_sieve.py [--limit 1000000] [--repeat 3]

The kernels are the hot loops behind the multiperfect scan and the
aliquot growth-window sampler; everything else in the package is
arbitrary-precision work that a fixed-width kernel cannot take over.
"""

import argparse
import time

from sigmalab.kernels import available_backends


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--limit", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    cases = [
        ("spf_sieve", lambda mod: mod.spf_sieve(args.limit)),
        ("sigma_sieve", lambda mod: mod.sigma_sieve(args.limit)),
        ("sigma_segment", lambda mod: mod.sigma_segment(args.limit // 2, args.limit)),
    ]

    print(f"limit = {args.limit:,}, best of {args.repeat}")
    print(f"{'kernel':<14} " + " ".join(f"{name:>12}" for name in backends) + "  speedup")
    sample = {}
    for label, call in cases:
        row = {}
        for name, mod in backends.items():
            row[name] = best_of(lambda m=mod: call(m), args.repeat)
            sample[(label, name)] = call(mod)
        line = f"{label:<14} " + " ".join(f"{row[name]:>11.3f}s" for name in backends)
        if "compiled" in row and "pure" in row:
            line += f"  {row['pure'] / row['compiled']:>6.1f}x"
        print(line)

    # backends must agree bit for bit before timings mean anything
    for label, _ in cases:
        outputs = [list(sample[(label, name)]) for name in backends]
        assert all(o == outputs[0] for o in outputs), f"{label}: backends disagree"
    print("all backends agree on every kernel output")


if __name__ == "__main__":
    main()
