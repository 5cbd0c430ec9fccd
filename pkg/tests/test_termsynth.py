from itertools import product as iproduct

import pytest

from goursat import termsynth as T
from goursat import zoo
from goursat.algebras import eval_term
from goursat.errors import InputError


def eval_over_all_triples(fn, alg):
    """Recompute a ternary table by evaluating the derivation term."""
    n = alg.size
    out = []
    for a, b, c in iproduct(range(n), repeat=3):
        out.append(eval_term(fn.derivation, alg,
                             {"x1": a, "x2": b, "x3": c}))
    return tuple(out)


# ---------------------------------------------------------------------------
# free algebra generation

def test_singleton_base_has_one_function():
    free = T.generate_free_algebra(zoo.one(), 3)
    assert free.generation_complete and len(free.functions) == 1


def test_chain2_ternary_clone_is_monotone_normalized():
    # oracle: lattice terms over {0,1} are exactly the monotone functions
    # fixing both constant tuples
    free = T.generate_free_algebra(zoo.chain2(), 3)
    assert free.generation_complete

    def monotone(t):
        for i in range(8):
            for j in range(8):
                if i | j == j and t[i] > t[j]:
                    return False
        return True

    want = set()
    for bits in range(256):
        t = tuple(bits >> i & 1 for i in range(8))
        if monotone(t) and t[0] == 0 and t[7] == 1:
            want.add(t)
    got = {f.table for f in free.functions}
    assert got == want
    assert len(got) == 18


def test_z2_clone_contains_xor3():
    free = T.generate_free_algebra(zoo.z2(), 3)
    tables = {f.table for f in free.functions}
    assert tuple(a ^ b ^ c
                 for a, b, c in iproduct(range(2), repeat=3)) in tables


def test_functions_sorted_canonically_and_projections_present():
    free = T.generate_free_algebra(zoo.chain2(), 2)
    tables = [f.table for f in free.functions]
    assert tables == sorted(tables)
    assert (0, 0, 1, 1) in tables and (0, 1, 0, 1) in tables


def test_derivations_reproduce_tables():
    for base in (zoo.z2(), zoo.chain2(), zoo.implication2(), zoo.bool2()):
        free = T.generate_free_algebra(base, 3)
        for fn in free.functions:
            assert eval_over_all_triples(fn, base) == fn.table, base.name


def test_generation_needs_positive_arity():
    with pytest.raises(InputError):
        T.generate_free_algebra(zoo.z2(), 0)


# ---------------------------------------------------------------------------
# Mal'tsev synthesis

def test_maltsev_on_xor_group():
    res = T.find_maltsev(zoo.z2())
    assert res.found is not None
    fn = res.found
    assert fn.table == tuple(a ^ b ^ c for a, b, c in iproduct(range(2), repeat=3))
    table = eval_over_all_triples(fn, zoo.z2())
    for x in range(2):
        for y in range(2):
            assert table[(x * 2 + y) * 2 + y] == x
            assert table[(x * 2 + x) * 2 + y] == y


def test_maltsev_on_singleton_is_the_unique_function():
    res = T.find_maltsev(zoo.one())
    assert res.found is not None and res.found.table == (0,)


def test_maltsev_none_on_implication_is_exhaustive():
    res = T.find_maltsev(zoo.implication2())
    assert res.found is None and res.complete
    # oracle: scan the complete clone directly
    free = T.generate_free_algebra(zoo.implication2(), 3)
    assert free.generation_complete
    for f in free.functions:
        assert not T._maltsev_ok(f.table, 2)


def test_maltsev_inconclusive_when_capped():
    res = T.find_maltsev(zoo.s3(), cap=4)
    assert res.found is None and not res.complete


# ---------------------------------------------------------------------------
# Hagemann-Mitschke synthesis

def test_hm_pair_on_implication_algebra():
    res = T.find_hm_pair(zoo.implication2())
    r, s = res.found
    alg = zoo.implication2()
    rt = eval_over_all_triples(r, alg)
    st = eval_over_all_triples(s, alg)
    for x in range(2):
        for y in range(2):
            assert rt[(x * 2 + y) * 2 + y] == x           # r(x,y,y) = x
            assert st[(x * 2 + x) * 2 + y] == y           # s(x,x,y) = y
            assert rt[(x * 2 + x) * 2 + y] == st[(x * 2 + y) * 2 + y]


def test_hm_from_maltsev_bases():
    for base in (zoo.z2(), zoo.klein(), zoo.s3(), zoo.bool2()):
        res = T.find_hm_pair(base)
        assert res.found is not None, base.name
        assert T.verify_hm_identities(res.found[0], res.found[1], base.size)


def test_hm_none_on_chain_and_friends():
    for base in (zoo.chain2(), zoo.semilattice2(), zoo.bare(2), zoo.not2()):
        res = T.find_hm_pair(base)
        assert res.found is None and res.complete, base.name


def test_hm_search_is_deterministic():
    a = T.find_hm_pair(zoo.implication2())
    b = T.find_hm_pair(zoo.implication2())
    assert a.found[0].table == b.found[0].table
    assert a.found[0].derivation == b.found[0].derivation
    assert a.found[1].derivation == b.found[1].derivation


# ---------------------------------------------------------------------------
# the free-algebra cube

def test_remark_cube_on_xor_group():
    rep = T.remark_cube_report(zoo.z2())
    assert rep.complete
    assert rep.lambda_verdict.holds
    assert rep.fiber_nonempty and rep.fiber_pair is not None
    assert rep.hm_agrees
    assert rep.sizes == {"X": 2, "2X": 4, "3X": 8}


def test_remark_cube_on_chain2():
    rep = T.remark_cube_report(zoo.chain2())
    assert rep.complete
    assert not rep.fiber_nonempty and rep.hm_agrees
    assert not rep.lambda_verdict.holds


def test_remark_cube_on_singleton():
    rep = T.remark_cube_report(zoo.one())
    assert rep.complete and rep.lambda_verdict.holds and rep.fiber_nonempty


def test_remark_cube_agrees_with_hm_on_two_element_corpus():
    corpus = zoo.two_element_corpus()
    assert len(corpus) >= 6
    for base in corpus:
        rep = T.remark_cube_report(base)
        assert rep.complete, base.name
        hm = T.find_hm_pair(base)
        assert rep.fiber_nonempty == (hm.found is not None), base.name
        assert rep.hm_agrees


def test_fiber_pair_satisfies_identities():
    rep = T.remark_cube_report(zoo.z2())
    r_term, s_term = rep.fiber_pair
    alg = zoo.z2()
    for x in range(2):
        for y in range(2):
            env = {"x1": x, "x2": y, "x3": y}
            assert eval_term(r_term, alg, env) == x
            env = {"x1": x, "x2": x, "x3": y}
            assert eval_term(s_term, alg, env) == y
