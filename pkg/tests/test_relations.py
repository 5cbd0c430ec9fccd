import random

import pytest

from goursat.errors import InputError
from goursat.relations import BinRel, Carrier

from conftest import all_relations, compose_pairs_oracle, random_relation


C2 = Carrier(2)
C3 = Carrier(3)


def test_compose_single_pairs():
    r = BinRel.from_pairs(C3, C3, [(0, 1)])
    s = BinRel.from_pairs(C3, C3, [(1, 2)])
    assert set(r.compose(s).pairs()) == {(0, 2)}


def test_compose_identity_is_neutral():
    rng = random.Random(1)
    for _ in range(50):
        r = random_relation(rng, 4, 4)
        assert r.compose(BinRel.identity(Carrier(4))) == r
        assert BinRel.identity(Carrier(4)).compose(r) == r


def test_equivalences_need_not_commute():
    # R collapses {0,1}, S collapses {1,2}: brute force says RS != SR
    r = BinRel.from_pairs(C3, C3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)])
    s = BinRel.from_pairs(C3, C3, [(0, 0), (1, 1), (2, 2), (1, 2), (2, 1)])
    rs = compose_pairs_oracle(r.pairs(), s.pairs())
    sr = compose_pairs_oracle(s.pairs(), r.pairs())
    assert (0, 2) in rs and (0, 2) not in sr
    assert set(r.compose(s).pairs()) == rs
    assert set(s.compose(r).pairs()) == sr
    assert r.compose(s) != s.compose(r)


def test_compose_matches_pair_oracle_random(rng):
    for _ in range(200):
        n1, n2, n3 = rng.randint(0, 5), rng.randint(0, 5), rng.randint(0, 5)
        r = random_relation(rng, n1, n2)
        s = random_relation(rng, n2, n3)
        assert set(r.compose(s).pairs()) == compose_pairs_oracle(r.pairs(),
                                                                 s.pairs())


def test_compose_dimension_mismatch():
    r = BinRel.from_pairs(C2, C3, [(0, 2)])
    with pytest.raises(InputError):
        r.compose(r)


def test_associativity_exhaustive_size2():
    rels = list(all_relations(2))
    assert len(rels) == 16
    for r in rels:
        for s in rels:
            rs = r.compose(s)
            for t in rels:
                assert rs.compose(t) == r.compose(s.compose(t))


def test_associativity_sampled_size4(rng):
    for _ in range(150):
        r = random_relation(rng, 4, 4)
        s = random_relation(rng, 4, 4)
        t = random_relation(rng, 4, 4)
        assert r.compose(s).compose(t) == r.compose(s.compose(t))


def test_contravariance(rng):
    for _ in range(150):
        r = random_relation(rng, 4, 3)
        s = random_relation(rng, 3, 5)
        assert (r.compose(s).opposite()
                == s.opposite().compose(r.opposite()))


def test_opposite_involution(rng):
    assert BinRel.from_pairs(C3, C3, [(0, 1)]).opposite() == \
        BinRel.from_pairs(C3, C3, [(1, 0)])
    assert BinRel.identity(C3).opposite() == BinRel.identity(C3)
    for _ in range(80):
        r = random_relation(rng, 5, 3)
        assert r.opposite().opposite() == r


def test_meet_properties(rng):
    for _ in range(80):
        r = random_relation(rng, 4, 4)
        s = random_relation(rng, 4, 4)
        t = random_relation(rng, 4, 4)
        assert r.meet(r) == r
        assert r.meet(BinRel.full(Carrier(4), Carrier(4))) == r
        assert r.meet(s) == s.meet(r)
        assert r.meet(s).meet(t) == r.meet(s.meet(t))


def test_meet_of_orders_is_identity():
    le = BinRel.from_pairs(C2, C2, [(0, 0), (0, 1), (1, 1)])
    ge = le.opposite()
    assert le.meet(ge) == BinRel.identity(C2)


def test_is_contained():
    le = BinRel.from_pairs(C2, C2, [(0, 0), (0, 1), (1, 1)])
    ok, _ = le.is_contained(le)
    assert ok
    ok, _ = BinRel.empty(C2, C2).is_contained(le)
    assert ok
    # the order relation is transitive, so EE = E and E* escapes it at (1,0)
    assert le.compose(le) == le
    ok, witness = le.opposite().is_contained(le.compose(le))
    assert not ok and witness == (1, 0)


def test_is_contained_partial_order(rng):
    for _ in range(80):
        r = random_relation(rng, 3, 4)
        s = random_relation(rng, 3, 4)
        r_in_s, _ = r.is_contained(s)
        s_in_r, _ = s.is_contained(r)
        if r_in_s and s_in_r:
            assert r == s
        t = random_relation(rng, 3, 4)
        s_in_t, _ = s.is_contained(t)
        if r_in_s and s_in_t:
            assert r.is_contained(t)[0]


def test_transitive_closure_basics(rng):
    le = BinRel.from_pairs(C2, C2, [(0, 0), (0, 1), (1, 1)])
    assert le.transitive_closure() == le
    chain = BinRel.from_pairs(C3, C3, [(0, 1), (1, 2)])
    assert set(chain.transitive_closure().pairs()) == {(0, 1), (1, 2), (0, 2)}
    for _ in range(60):
        r = random_relation(rng, 5, 5)
        rc = r.transitive_closure()
        assert rc.transitive_closure() == rc          # idempotent
        assert r.is_contained(rc)[0]                  # extensive
        s = random_relation(rng, 5, 5)
        if r.is_contained(s)[0]:
            assert rc.is_contained(s.transitive_closure())[0]   # monotone


def test_empty_carriers_degrade():
    c0 = Carrier(0)
    empty = BinRel.empty(c0, c0)
    assert empty.compose(empty) == empty
    assert empty.opposite() == empty
    assert empty.meet(empty) == empty
    assert BinRel.identity(c0) == empty
    assert empty.transitive_closure() == empty


def test_carrier_label_validation():
    with pytest.raises(InputError):
        Carrier(2, ("only-one",))
    assert Carrier(2, ("a", "b")).label(1) == "b"
    assert Carrier(2).label(1) == "1"
