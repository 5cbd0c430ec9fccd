"""Seeded random diagram families for the property suites.

Instances are built from quotients of random subalgebras of powers of a
base algebra.  Split epis are manufactured as product projections
(section through an idempotent element), then transported along random
surjections of the base via the pushout construction; an optional extra
quotient of the received point makes the squares generic rather than
pushout-exact.  Everything is driven by a caller-supplied
``random.Random`` so families replay bit-for-bit.
"""

from __future__ import annotations

import random

from .algebras import (FinAlgebra, Homomorphism, cg, kernel_pair, product,
                       quotient, subalgebra, subuniverse_generate)
from .diagrams import Cube, Point, SplitEpiSquare, beta_shriek
from .errors import InputError


def rand_congruence(alg: FinAlgebra, rng: random.Random, max_pairs: int = 2):
    k = rng.randint(0, max_pairs)
    pairs = [(rng.randrange(alg.size), rng.randrange(alg.size)) for _ in range(k)]
    return cg(alg, pairs)


def rand_subquotient(base: FinAlgebra, rng: random.Random, max_power: int = 2,
                     size_cap: int = 12) -> FinAlgebra:
    """A quotient of a random subalgebra of a small power of base."""
    for _ in range(24):
        p = rng.randint(1, max_power)
        alg = base if p == 1 else product(base, base)
        gens = {rng.randrange(alg.size) for _ in range(rng.randint(1, 3))}
        sub, _ = subuniverse_generate(alg, gens).as_algebra()
        if sub.size > 4 * size_cap:
            continue
        c = rand_congruence(sub, rng)
        q, _ = quotient(sub, c, check=False)
        if 1 <= q.size <= size_cap:
            return q
    # a quotient of the base itself always fits
    q, _ = quotient(base, cg(base, [(0, base.size - 1)]), check=False)
    return q


def rand_point_over(y: FinAlgebra, base: FinAlgebra, rng: random.Random,
                    factor_cap: int = 6) -> Point:
    """A split epi onto y: project from y x B, splitting through an
    idempotent of B."""
    for _ in range(24):
        b = rand_subquotient(base, rng, size_cap=factor_cap)
        idem = b.idempotent_elements()
        if idem:
            b0 = rng.choice(idem)
            total = product(y, b)
            f = Homomorphism(total, y, tuple(p // b.size for p in range(total.size)))
            i = Homomorphism(y, total, tuple(v * b.size + b0 for v in range(y.size)))
            return Point(f, i)
    return Point(Homomorphism(y, y, tuple(range(y.size))),
                 Homomorphism(y, y, tuple(range(y.size))))


def quotient_point(pt: Point, psi) -> tuple[Point, Homomorphism]:
    """Quotient the total object of a point by psi <= Eq(f)."""
    if not psi.leq(kernel_pair(pt.f)):
        raise InputError("psi does not refine the kernel of the split epi")
    q, proj = quotient(pt.total, psi, check=False)
    mapping = [None] * q.size
    for u in range(pt.total.size):
        mapping[proj(u)] = pt.f(u)
    new_f = Homomorphism(q, pt.base, tuple(mapping))
    return Point(new_f, pt.i.then(proj)), proj


def _transport(pt: Point, beta: Homomorphism, rng: random.Random,
               extra_quotient: bool) -> SplitEpiSquare:
    """Square from transporting pt along beta, optionally followed by a
    random quotient of the received point (keeps the family generic
    rather than pushout-exact)."""
    received, po = beta_shriek(pt, beta)
    alpha = po.from_top
    if extra_quotient:
        eq_g = kernel_pair(received.f)
        fibers: dict[int, list[int]] = {}
        for u in range(received.total.size):
            fibers.setdefault(received.f(u), []).append(u)
        pairs = []
        for _ in range(rng.randint(0, 2)):
            block = rng.choice(list(fibers.values()))
            if len(block) >= 2:
                pairs.append(tuple(rng.sample(block, 2)))
        if pairs:
            psi = cg(received.total, pairs)
            if psi.leq(eq_g):
                received, proj = quotient_point(received, psi)
                alpha = alpha.then(proj)
    return SplitEpiSquare(pt, received, alpha, beta)


def rand_square_over(pt: Point, rng: random.Random,
                     extra_quotient: bool = True) -> SplitEpiSquare:
    beta_c = rand_congruence(pt.base, rng)
    _, beta = quotient(pt.base, beta_c, check=False)
    return _transport(pt, beta, rng, extra_quotient)


def rand_square(base: FinAlgebra, rng: random.Random) -> SplitEpiSquare:
    y = rand_subquotient(base, rng)
    pt = rand_point_over(y, base, rng)
    return rand_square_over(pt, rng)


def rand_cube(base: FinAlgebra, rng: random.Random) -> Cube:
    """Two independent points over a shared base, transported along the
    same surjection."""
    y = rand_subquotient(base, rng)
    pt1 = rand_point_over(y, base, rng)
    pt2 = rand_point_over(y, base, rng)
    beta_c = rand_congruence(y, rng)
    _, beta = quotient(y, beta_c, check=False)
    return Cube(_transport(pt1, beta, rng, True), _transport(pt2, beta, rng, True))


def rand_cospan(base: FinAlgebra, rng: random.Random) -> tuple[Point, Point]:
    y = rand_subquotient(base, rng)
    return rand_point_over(y, base, rng), rand_point_over(y, base, rng)


def rand_beck_chevalley_instance(base: FinAlgebra, rng: random.Random):
    y = rand_subquotient(base, rng)
    pt = rand_point_over(y, base, rng)
    sq = rand_square_over(rand_point_over(y, base, rng), rng)
    return sq, pt


def rand_product_preservation_instance(base: FinAlgebra, rng: random.Random):
    y = rand_subquotient(base, rng)
    pt1 = rand_point_over(y, base, rng)
    pt2 = rand_point_over(y, base, rng)
    beta_c = rand_congruence(y, rng)
    _, beta = quotient(y, beta_c, check=False)
    return beta, pt1, pt2


# ---------------------------------------------------------------------------
# a deterministic failing square over bare sets

def bare_counterexample_square() -> SplitEpiSquare:
    """Over sets (empty signature) the kernel-pair comparison need not be
    surjective; this square misses the pair ([1], [3])."""
    from .zoo import bare

    x, y, u, w = bare(4), bare(2), bare(3), bare(1)
    f = Homomorphism(x, y, (0, 0, 1, 1))
    i = Homomorphism(y, x, (0, 2))
    g = Homomorphism(u, w, (0, 0, 0))
    j = Homomorphism(w, u, (0,))
    alpha = Homomorphism(x, u, (0, 1, 0, 2))
    beta = Homomorphism(y, w, (0, 0))
    return SplitEpiSquare(Point(f, i), Point(g, j), alpha, beta)


def bare_counterexample_cube() -> Cube:
    """The kernel-pair cube of the counterexample square: its pullback
    comparison fails exactly like the square does."""
    sq = bare_counterexample_square()
    return Cube(sq, sq)
