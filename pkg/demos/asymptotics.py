"""Relative deviation of the deformed Bethe family from its t -> infinity limit.

Along z = t*u the rescaled generators approach Vandermonde combinations of the
factor-wise limits at rate O(1/t); the ratio dev(100)/dev(1000) therefore sits near 10.
"""
from gtlimit import exactnum as xn
from gtlimit.spectral import DeformedFamily, convergence_ratio, relative_deviation, vandermonde_matrix
from gtlimit.yangian import MINUS, EvaluationFactor, TensorModule


def main():
    u = (1, 2, 3)
    mod = TensorModule(MINUS, tuple(EvaluationFactor(1, 0) for _ in u))
    fam = DeformedFamily(mod, u)
    print(f"Vandermonde determinant for u={u}: {xn.det(vandermonde_matrix(u))}")
    for m in range(1, len(u)):
        devs = [relative_deviation(fam, m, t) for t in (10, 100, 1000)]
        print(f"m={m}: deviations " + ", ".join(f"{d:.3e}" for d in devs)
              + f"; ratio {convergence_ratio(fam, m):.3f}")


if __name__ == "__main__":
    main()
