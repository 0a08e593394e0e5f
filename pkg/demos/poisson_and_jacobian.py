"""Classical checks: shift-of-argument commutativity and the independence Jacobian."""
from gtlimit import soa
from gtlimit.centralizer import independence_jacobian
from gtlimit.liealg import AlgebraKind


def main():
    for family in "CB":
        for n in (1, 2):
            kind = AlgebraKind(family, n)
            rep = soa.verify_commutativity(soa.shift_family(kind, soa.regular_diagonal(kind)))
            print(f"{kind.name}: {rep.count} shift generators, {rep.pairs_checked} brackets, ok={rep.ok}")
        for n in (1, 2, 3):
            jac = independence_jacobian(AlgebraKind(family, n))
            print(f"  Jacobian {family}{n}: rank {jac.rank} (expected {jac.expected})")


if __name__ == "__main__":
    main()
