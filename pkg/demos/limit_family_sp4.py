"""Limit Bethe family on the sp4 irrep with highest weight (0, -2).

Builds the module, checks exact commutation of the limit family, and prints its
joint spectrum together with the Gelfand-Tsetlin pattern labeling each eigenline.
"""
from fractions import Fraction

from gtlimit.liealg import AlgebraKind, build_irrep
from gtlimit.spectral import PathSpec, label_irrep, verify_theorem_a


def main():
    rep = build_irrep(AlgebraKind("C", 2), (Fraction(0), Fraction(-2)))
    report = verify_theorem_a(rep)
    print(f"{rep.kind.name}{tuple(str(x) for x in rep.hw)}: dim {rep.dim}")
    print(f"  commuting={report.commuting} min_gap={report.min_gap:.3g} refines={report.refines}")
    print(f"  degrees {report.degrees} vs exponents {report.exponents}")
    labels = label_irrep(rep, PathSpec())
    print(f"  labeling is a bijection: {labels.is_bijection()}")
    for line, pat in zip(labels.lines, labels.patterns):
        vals = " ".join(f"{v.real:9.4f}" for v in line.values)
        print(f"  {str(pat):34} | {vals}")


if __name__ == "__main__":
    main()
