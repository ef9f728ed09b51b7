#!/usr/bin/env python3
"""Build the standing instance corpus and tabulate its invariants.

For every instance: cohomology dimensions, smoothness certificate, and the
spectrum of the symplectic Gram matrix on the parabolic tangent space.
"""

import argparse
import time

import numpy as np

from surfrep import build_corpus, gram_matrix


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=4,
                        help="instances per (genus, rank, punctures) shape")
    args = parser.parse_args()

    t0 = time.perf_counter()
    corpus = build_corpus(seeds_per_shape=args.seeds)
    build_time = time.perf_counter() - t0

    header = (f"{'instance':<14} {'h1':>3} {'tan':>4} {'exp':>4} {'h2':>3} "
              f"{'rank':>5} {'s_min':>10} {'ratio':>10}")
    print(header)
    print("-" * len(header))
    for inst in corpus:
        rep = inst.report
        gram = gram_matrix(inst.representation, report=rep)
        if gram.basis_dim:
            svals = np.linalg.svd(gram.entries, compute_uv=False)
            smin, ratio = f"{svals[-1]:10.3e}", f"{svals[-1] / svals[0]:10.3e}"
        else:
            smin, ratio = f"{'-':>10}", f"{'-':>10}"
        print(f"{inst.name:<14} {rep.h1_dim:>3} {rep.tangent_dim:>4} "
              f"{rep.expected_dim:>4} {rep.relative_h2_dim:>3} "
              f"{gram.rank:>5} {smin} {ratio}")

    print(f"\n{len(corpus)} instances, all certified smooth and irreducible, "
          f"built in {build_time:.2f}s")


if __name__ == "__main__":
    main()
