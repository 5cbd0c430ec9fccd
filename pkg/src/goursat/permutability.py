"""Permutability, modularity, shifting and relational condition checks.

All quantifier loops iterate congruences in the canonical order of
``con_lattice`` and elements ascending, so the first witness found is
the stable one.  A failing verdict is sound outright.  A holding
verdict from the relation sweeps is exhaustive only within the seed
budget and says so in its budget note; the congruence-based checks are
exhaustive for the input algebra itself.
"""

from __future__ import annotations

from itertools import combinations, product as iproduct

from .algebras import FinAlgebra, con_lattice
from .errors import BudgetExceeded, InputError
from .kernels import close_vectors
from .relations import BinRel, Carrier
from .verdicts import Budget, Verdict, fails, holds, inconclusive


def _least_sym_diff(a: BinRel, b: BinRel):
    """Least (x, y) in exactly one of the relations, plus which side."""
    for x, (ra, rb) in enumerate(zip(a.rows, b.rows)):
        diff = ra ^ rb
        if diff:
            y = (diff & -diff).bit_length() - 1
            return (x, y), (ra >> y) & 1
    return None, None


def check_permutable(alg: FinAlgebra, n: int, budget: Budget = Budget()) -> Verdict:
    """n = 2: RS = SR for all congruence pairs; n = 3: RSR = SRS."""
    if n not in (2, 3):
        raise ValueError("only 2- and 3-permutability are supported")
    try:
        lat = con_lattice(alg, budget.max_congruences)
    except BudgetExceeded as exc:
        return inconclusive(str(exc))
    rels = [c.as_binrel() for c in lat.congruences]
    for i, j in combinations(range(len(rels)), 2):
        r, s = rels[i], rels[j]
        if n == 2:
            lhs, rhs = r.compose(s), s.compose(r)
            names = ("RS", "SR")
        else:
            lhs, rhs = r.compose(s).compose(r), s.compose(r).compose(s)
            names = ("RSR", "SRS")
        pair, in_lhs = _least_sym_diff(lhs, rhs)
        if pair is not None:
            return fails({
                "n": n,
                "R": list(lat.congruences[i].reps),
                "S": list(lat.congruences[j].reps),
                "pair": list(pair),
                "pair_labels": [alg.label(pair[0]), alg.label(pair[1])],
                "side": names[0] if in_lhs else names[1],
            })
    return holds()


def check_modularity(alg: FinAlgebra, budget: Budget = Budget()) -> Verdict:
    """R <= T  implies  R v (S ^ T) = (R v S) ^ T, over all triples."""
    try:
        lat = con_lattice(alg, budget.max_congruences)
    except BudgetExceeded as exc:
        return inconclusive(str(exc))
    congs = lat.congruences
    for r in congs:
        for t in congs:
            if not r.leq(t):
                continue
            for s in congs:
                lhs = r.join(s.meet(t))
                rhs = r.join(s).meet(t)
                if lhs.reps != rhs.reps:
                    pair, in_lhs = _least_sym_diff(lhs.as_binrel(), rhs.as_binrel())
                    return fails({
                        "R": list(r.reps), "S": list(s.reps), "T": list(t.reps),
                        "pair": list(pair),
                        "pair_labels": [alg.label(pair[0]), alg.label(pair[1])],
                        "side": "R|(S&T)" if in_lhs else "(R|S)&T",
                    })
    return holds()


def check_shifting_lemma(alg: FinAlgebra, budget: Budget = Budget()) -> Verdict:
    """For R ^ S <= T: edges (x,y) in R^T, (x,t),(y,z) in S, (t,z) in R
    force (t,z) in T."""
    try:
        lat = con_lattice(alg, budget.max_congruences)
    except BudgetExceeded as exc:
        return inconclusive(str(exc))
    congs = lat.congruences
    n = alg.size
    for r in congs:
        for s in congs:
            rs = r.meet(s)
            for t_c in congs:
                if not rs.leq(t_c):
                    continue
                for x in range(n):
                    for y in range(n):
                        if not (r.contains(x, y) and t_c.contains(x, y)):
                            continue
                        for t in range(n):
                            if not s.contains(x, t):
                                continue
                            for z in range(n):
                                if (s.contains(y, z) and r.contains(t, z)
                                        and not t_c.contains(t, z)):
                                    return fails({
                                        "R": list(r.reps), "S": list(s.reps),
                                        "T": list(t_c.reps),
                                        "elements": [x, y, t, z],
                                        "element_labels": [alg.label(v)
                                                           for v in (x, y, t, z)],
                                    })
    return holds()


# ---------------------------------------------------------------------------
# relational conditions, enumerated from generated compatible relations

def generate_relation(alg: FinAlgebra, seed_pairs, reflexive: bool,
                      budget: Budget = Budget()) -> BinRel:
    """The compatible relation (subalgebra of A x A) generated by the
    seed pairs, with the diagonal adjoined first when reflexive."""
    if alg.size > 256:
        raise InputError("relation sweeps need carriers of at most 256 elements")
    seeds = [bytes(p) for p in seed_pairs]
    if reflexive:
        seeds = [bytes((a, a)) for a in range(alg.size)] + seeds
    vectors, _, complete = close_vectors(alg.size, alg.byte_ops, seeds,
                                         cap=budget.cap, width=2)
    assert complete, "pair closure should not hit the cap"
    return BinRel.from_pairs(alg.carrier, alg.carrier,
                             [(v[0], v[1]) for v in vectors])


def _seed_sets(alg: FinAlgebra, max_pairs: int, include_diagonal_pairs: bool):
    n = alg.size
    all_pairs = [(a, b) for a in range(n) for b in range(n)
                 if include_diagonal_pairs or a != b]
    for k in range(max_pairs + 1):
        yield from combinations(all_pairs, k)


def check_reflexive_goursat(alg: FinAlgebra, budget: Budget = Budget()) -> Verdict:
    """opposite(E) <= E E for every generated reflexive compatible E."""
    seen = set()
    scanned = 0
    truncated = False
    for seed in _seed_sets(alg, budget.seed_pairs, include_diagonal_pairs=False):
        if scanned >= budget.max_relations:
            truncated = True
            break
        e = generate_relation(alg, seed, reflexive=True, budget=budget)
        if e.rows in seen:
            continue
        seen.add(e.rows)
        scanned += 1
        ok, pair = e.opposite().is_contained(e.compose(e))
        if not ok:
            return fails({
                "seed_pairs": [list(p) for p in seed],
                "pair": list(pair),
                "pair_labels": [alg.label(pair[0]), alg.label(pair[1])],
                "relation": sorted([x, y] for x, y in e.pairs()),
            })
    note = (f"exhausted reflexive relations from <= {budget.seed_pairs} seed pairs"
            if not truncated else
            f"stopped after {budget.max_relations} generated relations")
    return holds(budget_note=note)


def check_relation_condition_iii(alg: FinAlgebra, budget: Budget = Budget()) -> Verdict:
    """(1 ^ T) T* (1 ^ T) <= T T for every generated compatible T."""
    ident = BinRel.identity(alg.carrier)
    seen = set()
    scanned = 0
    truncated = False
    for seed in _seed_sets(alg, budget.seed_pairs, include_diagonal_pairs=True):
        for reflexive in (False, True):
            if scanned >= budget.max_relations:
                truncated = True
                break
            t = generate_relation(alg, seed, reflexive=reflexive, budget=budget)
            if t.rows in seen:
                continue
            seen.add(t.rows)
            scanned += 1
            corner = ident.meet(t)
            lhs = corner.compose(t.opposite()).compose(corner)
            ok, pair = lhs.is_contained(t.compose(t))
            if not ok:
                return fails({
                    "seed_pairs": [list(p) for p in seed],
                    "reflexive": reflexive,
                    "pair": list(pair),
                    "pair_labels": [alg.label(pair[0]), alg.label(pair[1])],
                    "relation": sorted([x, y] for x, y in t.pairs()),
                })
        if truncated:
            break
    note = (f"exhausted relations from <= {budget.seed_pairs} seed pairs"
            if not truncated else
            f"stopped after {budget.max_relations} generated relations")
    return holds(budget_note=note)


def generate_hetero_relation(alg: FinAlgebra, seed_vectors, left_power: int,
                             right_power: int, budget: Budget = Budget()) -> BinRel:
    """Compatible relation from A^left_power to A^right_power generated by
    the seed vectors (each of width left_power + right_power)."""
    if alg.size > 256:
        raise InputError("relation sweeps need carriers of at most 256 elements")
    width = left_power + right_power
    seeds = [bytes(v) for v in seed_vectors]
    vectors, _, complete = close_vectors(alg.size, alg.byte_ops, seeds,
                                         cap=budget.cap, width=width)
    assert complete, "vector closure should not hit the cap"
    n = alg.size

    def encode(v, k, off):
        idx = 0
        for i in range(k):
            idx = idx * n + v[off + i]
        return idx

    src = Carrier(n**left_power)
    dst = Carrier(n**right_power)
    return BinRel.from_pairs(src, dst, [
        (encode(v, left_power, 0), encode(v, right_power, left_power))
        for v in vectors])


def check_relation_condition_iv(alg: FinAlgebra, budget: Budget = Budget(),
                                left_power: int = 2, right_power: int = 1) -> Verdict:
    """P P* P P* <= P P* for generated heterogeneous relations P.

    The default shape is A^2 -> A; there is no canonical finite family
    of heterogeneous relations to sweep, so the powers are caller
    options and the verdict carries a budget note.
    """
    n = alg.size
    width = left_power + right_power
    vectors = [tuple(v) for v in iproduct(range(n), repeat=width)]
    seen = set()
    scanned = 0
    truncated = False
    for k in range(budget.seed_pairs + 1):
        if truncated:
            break
        for seed in combinations(vectors, k):
            if scanned >= budget.max_relations:
                truncated = True
                break
            p = generate_hetero_relation(alg, seed, left_power, right_power, budget)
            if p.rows in seen:
                continue
            seen.add(p.rows)
            scanned += 1
            ppo = p.compose(p.opposite())
            ok, pair = ppo.compose(ppo).is_contained(ppo)
            if not ok:
                return fails({
                    "seed_vectors": [list(v) for v in seed],
                    "left_power": left_power, "right_power": right_power,
                    "pair": list(pair),
                })
    note = (f"exhausted relations from <= {budget.seed_pairs} seed vectors"
            if not truncated else
            f"stopped after {budget.max_relations} generated relations")
    return holds(budget_note=note)
