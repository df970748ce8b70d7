"""Certified spectral norms on tensors with a known answer.

Builds orthogonally decomposable test tensors, whose spectral norm is the
largest weight by construction, then shrinks the target error and watches
the certified interval [value, value/theta] tighten around the truth.
"""

import numpy as np

from tensornorms import best_rank_one, gen_orthogonal_test, spectral_norm_fptas


def main():
    T, dec = gen_orthogonal_test(4, 10, 10, 4, seed=7)
    truth = max(t[0] for t in dec.terms)
    print(f"4x10x10 orthogonal test tensor, true spectral norm {truth:.6f}\n")

    print(f"{'eps':>8} {'q':>4} {'points':>7} {'value':>12} "
          f"{'upper':>12} {'exact err':>10} {'sec':>7}")
    for eps in (1e-1, 1e-2, 1e-3):
        est = spectral_norm_fptas(T, eps)
        err = abs(est.value - truth) / truth
        print(f"{eps:8.0e} {est.q:4d} {est.grid_points_used:7d} "
              f"{est.value:12.6f} {est.upper:12.6f} {err:10.2e} "
              f"{est.seconds:7.2f}")

    # the witness of the last run gives the best rank-one approximation
    est = spectral_norm_fptas(T, 1e-3)
    lam, x, y, z, resid = best_rank_one(T, est)
    identity = np.sqrt(T.frobenius_norm() ** 2 - lam**2)
    print(f"\nbest rank-one term: lambda = {lam:.6f}")
    print(f"residual {resid:.6f} vs sqrt(||T||_F^2 - lambda^2) = {identity:.6f}")


if __name__ == "__main__":
    main()
