"""Reflectors into identity-defined subvarieties, and Galois pregroupoids.

The reflector quotients by the congruence generated by all ground
instances of the defining identities, iterating until the quotient
satisfies them (one pass suffices for ground instances; the loop guards
nested-term corner cases).  Preservation checks compare the reflected
pullback with the pullback of the reflected maps through the canonical
comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .algebras import (FinAlgebra, Homomorphism, Term, cg, identity_hom,
                       quotient, term_table)
from .diagrams import Point, Pullback, pullback
from .errors import InputError
from .verdicts import Verdict, fails, holds


@dataclass(frozen=True)
class IdentitySet:
    """Pairs of terms read as equations lhs = rhs over shared variables."""

    identities: tuple[tuple[Term, Term], ...]

    def variables(self, i: int) -> list[str]:
        lhs, rhs = self.identities[i]
        out = lhs.free_vars()
        for v in rhs.free_vars():
            if v not in out:
                out.append(v)
        return out


def identity_instances(alg: FinAlgebra, ids: IdentitySet):
    """All element pairs (lhs(a), rhs(a)) over all assignments, skipping
    pairs that already agree."""
    pairs = []
    for i, (lhs, rhs) in enumerate(ids.identities):
        names = ids.variables(i)
        lt = term_table(lhs, alg, names)
        rt = term_table(rhs, alg, names)
        pairs.extend((a, b) for a, b in zip(lt, rt) if a != b)
    return pairs


def satisfies(alg: FinAlgebra, ids: IdentitySet) -> bool:
    return not identity_instances(alg, ids)


def reflect(alg: FinAlgebra, ids: IdentitySet):
    """Quotient onto the largest image satisfying the identities.

    Returns (reflected algebra, unit surjection).  Iterates
    instantiate/close/quotient to a fixpoint; terminates because the
    carrier strictly shrinks on every nontrivial round.
    """
    current = alg
    eta = identity_hom(alg)
    while True:
        pairs = identity_instances(current, ids)
        if not pairs:
            return current, eta
        c = cg(current, pairs)
        current, proj = quotient(current, c, check=False)
        eta = eta.then(proj)


def reflect_hom(h: Homomorphism, ids: IdentitySet) -> Homomorphism:
    """The induced map between the reflections; functoriality on arrows."""
    ia, eta_a = reflect(h.src, ids)
    ib, eta_b = reflect(h.dst, ids)
    mapping = [None] * ia.size
    for x in range(h.src.size):
        cls = eta_a(x)
        val = eta_b(h(x))
        if mapping[cls] is None:
            mapping[cls] = val
        elif mapping[cls] != val:
            raise InputError("reflected map is not well defined on classes")
    return Homomorphism(ia, ib, tuple(mapping))


def _comparison_verdict(pb: Pullback, eta_left: Homomorphism,
                        eta_right: Homomorphism, reflected_pb: Pullback,
                        eta_apex: Homomorphism) -> Verdict:
    """Bijectivity of I(P) -> I(X) x_{I(Y)} I(Z), [ (x,z) ] -> ([x],[z])."""
    i_apex = eta_apex.dst
    mapping = [None] * i_apex.size
    for t, (x, z) in enumerate(pb.pairs):
        cls = eta_apex(t)
        target = reflected_pb.index[(eta_left(x), eta_right(z))]
        if mapping[cls] is None:
            mapping[cls] = target
        elif mapping[cls] != target:
            return fails({
                "reason": "not-well-defined",
                "element": cls,
                "element_labels": [i_apex.label(cls)],
            })
    seen: dict[int, int] = {}
    for a, b in enumerate(mapping):
        if b in seen:
            return fails({
                "reason": "not-injective",
                "elements": [seen[b], a],
                "element_labels": [i_apex.label(seen[b]), i_apex.label(a)],
            })
        seen[b] = a
    for b in range(reflected_pb.apex.size):
        if b not in seen:
            return fails({
                "reason": "not-surjective",
                "pair": list(reflected_pb.pairs[b]),
                "missing_label": reflected_pb.apex.label(b),
            })
    return holds()


def check_split_pullback_preservation(pt1: Point, pt2: Point,
                                      ids: IdentitySet) -> Verdict:
    """Does reflecting commute with the pullback of two split epis?"""
    if pt1.base != pt2.base:
        raise InputError("cospan points must share their base")
    pb = pullback(pt1.f, pt2.f)
    _, eta_p = reflect(pb.apex, ids)
    if1 = reflect_hom(pt1.f, ids)
    if2 = reflect_hom(pt2.f, ids)
    _, eta_x = reflect(pt1.total, ids)
    _, eta_z = reflect(pt2.total, ids)
    rpb = pullback(if1, if2)
    return _comparison_verdict(pb, eta_x, eta_z, rpb, eta_p)


def check_regular_pullback_preservation(p: Homomorphism, gpt: Point,
                                        ids: IdentitySet) -> Verdict:
    """Same comparison for the pullback of a split epi along a surjection."""
    if not p.is_surjective():
        raise InputError("p must be surjective")
    if gpt.base != p.dst:
        raise InputError("the split epi must land in the codomain of p")
    pb = pullback(p, gpt.f)
    _, eta_p = reflect(pb.apex, ids)
    ip = reflect_hom(p, ids)
    ig = reflect_hom(gpt.f, ids)
    _, eta_a = reflect(p.src, ids)
    _, eta_c = reflect(gpt.total, ids)
    rpb = pullback(ip, ig)
    return _comparison_verdict(pb, eta_a, eta_c, rpb, eta_p)


# ---------------------------------------------------------------------------
# internal precategories and the Galois pregroupoid

@dataclass(frozen=True)
class PreCategory:
    """Objects P2 (composable pairs), P1 (arrows), P0 (objects) with the
    usual source/target/unit and composition-shape maps."""

    p0: FinAlgebra
    p1: FinAlgebra
    p2: FinAlgebra
    d1: Homomorphism   # P1 -> P0, source
    d2: Homomorphism   # P1 -> P0, target
    s: Homomorphism    # P0 -> P1, unit
    pr1: Homomorphism  # P2 -> P1
    pr2: Homomorphism  # P2 -> P1
    m: Homomorphism    # P2 -> P1, composite

    def __post_init__(self):
        def eq(name, a, b):
            if a.mapping != b.mapping:
                raise InputError(f"precategory axiom fails: {name}")

        eq("d1 . s = 1", self.s.then(self.d1), identity_hom(self.p0))
        eq("d2 . s = 1", self.s.then(self.d2), identity_hom(self.p0))
        eq("d2 . pr1 = d1 . pr2", self.pr1.then(self.d2), self.pr2.then(self.d1))
        eq("d1 . pr1 = d1 . m", self.pr1.then(self.d1), self.m.then(self.d1))
        eq("d2 . pr2 = d2 . m", self.pr2.then(self.d2), self.m.then(self.d2))


def kernel_pair_groupoid(f: Homomorphism) -> PreCategory:
    """The composable-pairs precategory of the kernel pair of f."""
    if not f.is_surjective():
        raise InputError("extensions are surjections")
    eq_pb = pullback(f, f, name=f"Eq({f.src.name})")
    e = eq_pb.apex
    a_alg = f.src
    s = Homomorphism(a_alg, e, tuple(eq_pb.index[(a, a)] for a in range(a_alg.size)))
    comp_pb = pullback(eq_pb.to_right, eq_pb.to_left,
                       name=f"Eq({f.src.name})^2")
    m = Homomorphism(comp_pb.apex, e, tuple(
        eq_pb.index[(eq_pb.pairs[q][0], eq_pb.pairs[r][1])]
        for q, r in comp_pb.pairs))
    return PreCategory(a_alg, e, comp_pb.apex, eq_pb.to_left, eq_pb.to_right,
                       s, comp_pb.to_left, comp_pb.to_right, m)


def galois_pregroupoid(f: Homomorphism, ids: IdentitySet) -> PreCategory:
    """Reflect the kernel-pair groupoid of f objectwise."""
    kp = kernel_pair_groupoid(f)
    i0, _ = reflect(kp.p0, ids)
    return PreCategory(
        i0,
        reflect(kp.p1, ids)[0],
        reflect(kp.p2, ids)[0],
        reflect_hom(kp.d1, ids),
        reflect_hom(kp.d2, ids),
        reflect_hom(kp.s, ids),
        reflect_hom(kp.pr1, ids),
        reflect_hom(kp.pr2, ids),
        reflect_hom(kp.m, ids),
    )


def groupoid_check(pc: PreCategory) -> Verdict:
    """Is the precategory an internal groupoid?

    Stage 1: the comparison P2 -> P1 x_{P0} P1 through (pr1, pr2) must
    be bijective, so composition is defined exactly on composable pairs.
    Stage 2: with composition realized elementwise, unit laws,
    associativity and two-sided inverses are checked by enumeration.
    """
    composable = [(q, r) for q in range(pc.p1.size) for r in range(pc.p1.size)
                  if pc.d2(q) == pc.d1(r)]
    comp_index = {qr: i for i, qr in enumerate(composable)}
    seen: dict[tuple[int, int], int] = {}
    for t in range(pc.p2.size):
        key = (pc.pr1(t), pc.pr2(t))
        if key not in comp_index:
            return fails({"stage": "comparison", "reason": "not-composable",
                          "element": t})
        if key in seen:
            return fails({"stage": "comparison", "reason": "not-injective",
                          "elements": [seen[key], t]})
        seen[key] = t
    for qr in composable:
        if qr not in seen:
            return fails({"stage": "comparison", "reason": "not-surjective",
                          "pair": list(qr),
                          "pair_labels": [pc.p1.label(qr[0]), pc.p1.label(qr[1])]})

    def comp(q, r):
        return pc.m(seen[(q, r)])

    for q in range(pc.p1.size):
        if comp(pc.s(pc.d1(q)), q) != q:
            return fails({"stage": "left-unit", "arrow": q,
                          "arrow_label": pc.p1.label(q)})
        if comp(q, pc.s(pc.d2(q))) != q:
            return fails({"stage": "right-unit", "arrow": q,
                          "arrow_label": pc.p1.label(q)})
    for q, r in composable:
        for t in range(pc.p1.size):
            if pc.d2(r) != pc.d1(t):
                continue
            if comp(comp(q, r), t) != comp(q, comp(r, t)):
                return fails({"stage": "associativity", "arrows": [q, r, t]})
    for q in range(pc.p1.size):
        if not any(pc.d1(qi) == pc.d2(q) and pc.d2(qi) == pc.d1(q)
                   and comp(q, qi) == pc.s(pc.d1(q))
                   and comp(qi, q) == pc.s(pc.d2(q))
                   for qi in range(pc.p1.size)):
            return fails({"stage": "inverses", "arrow": q,
                          "arrow_label": pc.p1.label(q)})
    return holds()
