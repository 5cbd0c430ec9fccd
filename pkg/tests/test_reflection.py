import random

import pytest

from goursat import diagrams as D
from goursat import randgen as RG
from goursat import reflection as R
from goursat import zoo
from goursat.algebras import (Homomorphism, app, cg, enumerate_homs,
                              identity_hom, product, quotient, var)
from goursat.errors import InputError

from conftest import congruences_by_enumeration


ABELIAN = R.IdentitySet(((app("mul", var("x"), var("y")),
                          app("mul", var("y"), var("x"))),))
EMPTY_IDS = R.IdentitySet(())


def sign_map():
    s3 = zoo.s3()
    theta = cg(s3, [(0, 4)])      # collapses the 3-cycles onto the identity
    q, sign = quotient(s3, theta)
    return s3, q, sign


def abelian_for(sig):
    # commutativity identity written against the algebra's operation name
    opname = next(name for name, arity in sig.ops if arity == 2)
    return R.IdentitySet(((app(opname, var("x"), var("y")),
                           app(opname, var("y"), var("x"))),))


# ---------------------------------------------------------------------------
# the reflector

def test_reflect_is_identity_when_already_satisfied():
    alg = zoo.klein()
    reflected, eta = R.reflect(alg, ABELIAN)
    assert eta.is_injective() and eta.is_surjective()
    assert reflected.tables == alg.tables


def test_reflect_empty_identity_set():
    alg = zoo.s3()
    reflected, eta = R.reflect(alg, EMPTY_IDS)
    assert eta.is_injective() and reflected.size == alg.size


def test_reflect_s3_abelianization_matches_bruteforce():
    s3 = zoo.s3()
    reflected, eta = R.reflect(s3, ABELIAN)
    assert reflected.size == 2
    assert R.satisfies(reflected, ABELIAN)
    # oracle: the least congruence whose quotient is commutative
    best = None
    for c in congruences_by_enumeration(s3):
        q, _ = quotient(s3, c)
        if R.satisfies(q, ABELIAN):
            best = c if best is None or c.leq(best) else best
    assert best is not None
    from goursat.algebras import kernel_pair
    assert kernel_pair(eta) == best


def test_reflect_idempotent():
    s3 = zoo.s3()
    reflected, _ = R.reflect(s3, ABELIAN)
    again, eta = R.reflect(reflected, ABELIAN)
    assert eta.is_injective() and eta.is_surjective()


def test_reflect_universal_property_desk_scale():
    # every homomorphism into a small commutative target factors uniquely
    s3 = zoo.s3()
    reflected, eta = R.reflect(s3, ABELIAN)
    target, _ = quotient(s3, cg(s3, [(0, 4)]))     # a 2-element group
    assert R.satisfies(target, ABELIAN)
    for h in enumerate_homs(s3, target):
        factor = {}
        for x in range(s3.size):
            cls = eta(x)
            assert factor.setdefault(cls, h(x)) == h(x)
        through = Homomorphism(reflected, target,
                               tuple(factor[i] for i in range(reflected.size)))
        assert eta.then(through).mapping == h.mapping


def test_reflect_hom_identity_surjection_and_sign():
    s3, q, sign = sign_map()
    assert R.reflect_hom(identity_hom(s3), ABELIAN).mapping == (0, 1)
    rs = R.reflect_hom(sign, ABELIAN)
    assert rs.is_surjective() and rs.is_injective()   # iso after reflection


# ---------------------------------------------------------------------------
# pullback preservation

def test_split_pullback_preservation_empty_ids():
    y = zoo.klein()
    pt1 = D.Point(*_proj(y, zoo.z2()))
    pt2 = D.Point(*_proj(y, zoo.klein()))
    assert R.check_split_pullback_preservation(pt1, pt2, EMPTY_IDS).holds


def _proj(y, b, b0=0):
    total = product(y, b)
    f = Homomorphism(total, y, tuple(p // b.size for p in range(total.size)))
    i = Homomorphism(y, total, tuple(v * b.size + b0 for v in range(y.size)))
    return f, i


def test_split_pullback_preservation_abelian_cospan():
    # already-abelian inputs: the unit is an iso, comparison trivially so
    y = zoo.klein()
    pt1 = D.Point(*_proj(y, zoo.z2()))
    pt2 = D.Point(*_proj(y, zoo.z2()))
    assert R.check_split_pullback_preservation(pt1, pt2, ABELIAN).holds


def test_split_pullback_preservation_s3_cospan():
    # groups 3-permute, so the reflector preserves these pullbacks
    s3 = zoo.s3()
    ids = abelian_for(s3.sig)
    pt1 = D.Point(*_proj(s3, s3))
    q, _ = quotient(s3, cg(s3, [(0, 4)]))
    pt2 = D.Point(*_proj(s3, q))
    assert R.check_split_pullback_preservation(pt1, pt2, ids).holds


def test_regular_pullback_preservation_cases():
    s3, b, sign = sign_map()
    ids = abelian_for(s3.sig)
    # p an iso
    gpt = D.Point(*_proj(b, b))
    assert R.check_regular_pullback_preservation(identity_hom(b), gpt, ids).holds
    # empty identity set
    assert R.check_regular_pullback_preservation(sign, gpt, EMPTY_IDS).holds
    # the sign surjection against a split epi of abelian algebras
    assert R.check_regular_pullback_preservation(sign, gpt, ids).holds


def test_regular_pullback_requires_surjection():
    s3, b, sign = sign_map()
    gpt = D.Point(*_proj(b, b))
    with pytest.raises(InputError):
        R.check_regular_pullback_preservation(
            Homomorphism(b, b, (0, 0)), gpt, ABELIAN)


# ---------------------------------------------------------------------------
# precategories and the Galois pregroupoid

def test_kernel_pair_groupoid_is_groupoid():
    s3, b, sign = sign_map()
    pc = R.kernel_pair_groupoid(sign)
    assert R.groupoid_check(pc).holds


def test_galois_of_iso_is_degenerate():
    s3 = zoo.s3()
    pc = R.galois_pregroupoid(identity_hom(s3), abelian_for(s3.sig))
    assert pc.p0.size == pc.p1.size == pc.p2.size == 2
    assert R.groupoid_check(pc).holds


def test_galois_with_empty_ids_is_kernel_pair_groupoid():
    s3, b, sign = sign_map()
    pc = R.galois_pregroupoid(sign, EMPTY_IDS)
    kp = R.kernel_pair_groupoid(sign)
    assert (pc.p0.size, pc.p1.size, pc.p2.size) == (kp.p0.size, kp.p1.size,
                                                    kp.p2.size)
    assert R.groupoid_check(pc).holds


def test_galois_of_sign_under_abelianization():
    s3, b, sign = sign_map()
    pc = R.galois_pregroupoid(sign, abelian_for(s3.sig))
    v = R.groupoid_check(pc)
    assert v.holds


def test_precategory_axioms_validated():
    # over bare sets any map is a homomorphism, so a constant unit map
    # reaches the axiom check and trips it
    f = Homomorphism(zoo.bare(3), zoo.bare(2), (0, 0, 1))
    kp = R.kernel_pair_groupoid(f)
    bad_s = Homomorphism(kp.p0, kp.p1, (0,) * kp.p0.size)
    with pytest.raises(InputError, match="axiom"):
        R.PreCategory(kp.p0, kp.p1, kp.p2, kp.d1, kp.d2, bad_s,
                      kp.pr1, kp.pr2, kp.m)


def test_groupoid_check_fails_when_composables_missing():
    # drop one composable pair from a bare-set kernel-pair groupoid
    f = Homomorphism(zoo.bare(3), zoo.bare(2), (0, 0, 1))
    kp = R.kernel_pair_groupoid(f)
    from goursat.algebras import subalgebra
    smaller, _ = subalgebra(kp.p2, tuple(range(kp.p2.size - 1)))
    restrict = lambda h: Homomorphism(smaller, h.dst,
                                      h.mapping[:smaller.size])
    pc = R.PreCategory(kp.p0, kp.p1, smaller, kp.d1, kp.d2, kp.s,
                       restrict(kp.pr1), restrict(kp.pr2), restrict(kp.m))
    v = R.groupoid_check(pc)
    assert not v.holds
    assert v.witness["stage"] == "comparison"
    assert v.witness["reason"] == "not-surjective"


def test_reflector_pullbacks_on_sampled_group_cospans():
    rng = random.Random(31)
    s3 = zoo.s3()
    ids = abelian_for(s3.sig)
    for _ in range(8):
        pt1, pt2 = RG.rand_cospan(s3, rng)
        assert R.check_split_pullback_preservation(pt1, pt2, ids).holds


def test_groupoid_check_on_sampled_group_surjections():
    rng = random.Random(77)
    for base in (zoo.s3(), zoo.klein(), zoo.z4()):
        ids = abelian_for(base.sig)
        for _ in range(4):
            alg = RG.rand_subquotient(base, rng, size_cap=8)
            c = RG.rand_congruence(alg, rng)
            _, f = quotient(alg, c, check=False)
            pc = R.galois_pregroupoid(f, ids)
            assert R.groupoid_check(pc).holds, base.name
