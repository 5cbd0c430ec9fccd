"""Shared brute-force oracles for the suite.

Everything here is deliberately independent of the package's fast
paths: relation composition by pair scanning, congruence enumeration by
filtering all set partitions.
"""

import random

import pytest

from goursat.algebras import (Congruence, FinAlgebra, all_partitions,
                              compatible_partition_witness)
from goursat.relations import BinRel, Carrier


def compose_pairs_oracle(pairs_r, pairs_s):
    pairs_r, pairs_s = list(pairs_r), list(pairs_s)
    return {(x, z) for x, y in pairs_r for y2, z in pairs_s if y == y2}


def relation_from_pairs(n_src, n_dst, pairs):
    return BinRel.from_pairs(Carrier(n_src), Carrier(n_dst), pairs)


def random_relation(rng, n_src, n_dst):
    rows = tuple(rng.getrandbits(n_dst) for _ in range(n_src))
    return BinRel(Carrier(n_src), Carrier(n_dst), rows)


def all_relations(n):
    """Every relation on an n-element carrier (use only for tiny n)."""
    c = Carrier(n)
    total = n * n
    for bits in range(1 << total):
        rows = tuple((bits >> (x * n)) & ((1 << n) - 1) for x in range(n))
        yield BinRel(c, c, rows)


def congruences_by_enumeration(alg: FinAlgebra):
    """All congruences of alg, by filtering every partition of the carrier."""
    out = []
    for reps in all_partitions(alg.size):
        if compatible_partition_witness(alg, reps) is None:
            out.append(Congruence(alg, reps))
    return out


@pytest.fixture
def rng():
    return random.Random(0xA1EB)
