"""Built-in corpus of small algebras used by tests and shipped as JSON."""

from __future__ import annotations

from itertools import permutations

from .algebras import FinAlgebra, Signature
from .relations import Carrier


def z2() -> FinAlgebra:
    """The 2-element group written additively: mul is xor."""
    return FinAlgebra("z2", Carrier(2), Signature((("mul", 2),)), ((0, 1, 1, 0),))


def z4() -> FinAlgebra:
    table = tuple((a + b) % 4 for a in range(4) for b in range(4))
    return FinAlgebra("z4", Carrier(4), Signature((("add", 2),)), (table,))


def klein() -> FinAlgebra:
    """Z2 x Z2 as bitwise xor on {0,1,2,3}."""
    table = tuple(a ^ b for a in range(4) for b in range(4))
    labels = ("00", "01", "10", "11")
    return FinAlgebra("klein", Carrier(4, labels), Signature((("mul", 2),)), (table,))


def s3() -> FinAlgebra:
    """Symmetric group on 3 letters with e, inv, mul; composition acts
    left-to-right on points: (p*q)(x) = q(p(x))."""
    perms = sorted(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    mul = tuple(index[tuple(q[p[x]] for x in range(3))]
                for p in perms for q in perms)
    inv = tuple(index[tuple(sorted(range(3), key=lambda x: p[x]))] for p in perms)
    labels = tuple("".join(map(str, p)) for p in perms)
    sig = Signature((("e", 0), ("inv", 1), ("mul", 2)))
    return FinAlgebra("s3", Carrier(6, labels), sig,
                      ((index[(0, 1, 2)],), inv, mul))


def implication2() -> FinAlgebra:
    """imp(a, b) = 1 if a = 0 else b."""
    return FinAlgebra("impl2", Carrier(2), Signature((("imp", 2),)), ((1, 1, 0, 1),))


def chain2() -> FinAlgebra:
    """The 2-chain lattice: meet and join on {0 < 1}."""
    return FinAlgebra("lattice2", Carrier(2),
                      Signature((("meet", 2), ("join", 2))),
                      ((0, 0, 0, 1), (0, 1, 1, 1)))


def semilattice2() -> FinAlgebra:
    return FinAlgebra("semilattice2", Carrier(2), Signature((("meet", 2),)),
                      ((0, 0, 0, 1),))


def bool2() -> FinAlgebra:
    return FinAlgebra("bool2", Carrier(2),
                      Signature((("and", 2), ("or", 2), ("not", 1))),
                      ((0, 0, 0, 1), (0, 1, 1, 1), (1, 0)))


def not2() -> FinAlgebra:
    return FinAlgebra("not2", Carrier(2), Signature((("not", 1),)), ((1, 0),))


def bare(n: int) -> FinAlgebra:
    return FinAlgebra(f"set{n}", Carrier(n), Signature(()), ())


def one() -> FinAlgebra:
    return FinAlgebra("one", Carrier(1), Signature(()), ())


def two_element_corpus() -> list[FinAlgebra]:
    """Every 2-element algebra shipped in the corpus."""
    return [z2(), implication2(), chain2(), bare(2), semilattice2(), bool2(),
            not2()]


def full_corpus() -> list[FinAlgebra]:
    return two_element_corpus() + [z4(), klein(), s3(), bare(3), bare(4), one()]
