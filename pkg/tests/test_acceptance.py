"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import json
import random
from itertools import product as iproduct
from pathlib import Path

import pytest

from goursat import cli, diagrams as D, permutability as P, randgen as RG
from goursat import reflection as R, termsynth as T, zoo
from goursat.algebras import (Congruence, Homomorphism, app, cg, con_lattice,
                              eval_term, kernel_pair, product, quotient,
                              term_from_sexpr, var)
from goursat.relations import BinRel, Carrier

from conftest import (compose_pairs_oracle, congruences_by_enumeration,
                      random_relation)

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run_cli(argv):
    return cli.run(argv)


def check_all_hm_identities(r_term, s_term, alg):
    n = alg.size
    for x, y in iproduct(range(n), repeat=2):
        if eval_term(r_term, alg, {"x1": x, "x2": y, "x3": y}) != x:
            return False
        if eval_term(s_term, alg, {"x1": x, "x2": x, "x3": y}) != y:
            return False
        lhs = eval_term(r_term, alg, {"x1": x, "x2": x, "x3": y})
        rhs = eval_term(s_term, alg, {"x1": x, "x2": y, "x3": y})
        if lhs != rhs:
            return False
    return True


def test_criterion_1_maltsev_synthesis(capsys):
    report, code = run_cli(["terms", "maltsev", str(CORPUS / "z2.json")])
    assert code == 0
    want = [a ^ b ^ c for a, b, c in iproduct(range(2), repeat=3)]
    assert report["table"] == want
    term = term_from_sexpr(report["term"], zoo.z2().sig)
    for x, y in iproduct(range(2), repeat=2):
        assert eval_term(term, zoo.z2(), {"x1": x, "x2": y, "x3": y}) == x
        assert eval_term(term, zoo.z2(), {"x1": x, "x2": x, "x3": y}) == y
    with capsys.disabled():
        print("\nACCEPTANCE 1 maltsev-synthesis: PASS")


def test_criterion_2_hm_synthesis(capsys):
    alg = zoo.implication2()
    report, code = run_cli(["terms", "hm", str(CORPUS / "impl2.json")])
    assert code == 0
    r_term = term_from_sexpr(report["terms"]["r"], alg.sig)
    s_term = term_from_sexpr(report["terms"]["s"], alg.sig)
    assert check_all_hm_identities(r_term, s_term, alg)
    report, code = run_cli(["terms", "maltsev", str(CORPUS / "impl2.json")])
    assert code == 1
    assert report["complete"] and report["scanned"] <= 256
    with capsys.disabled():
        print("ACCEPTANCE 2 hm-synthesis: PASS")


def test_criterion_3_negative_control(capsys):
    report, code = run_cli(["terms", "hm", str(CORPUS / "lattice2.json")])
    assert code == 1 and report["complete"]
    report, code = run_cli(["check", "goursat-relations", "ii",
                            str(CORPUS / "lattice2.json")])
    assert code == 1
    assert report["witness"]["pair"] == [1, 0]
    assert report["witness"]["relation"] == [[0, 0], [0, 1], [1, 1]]
    with capsys.disabled():
        print("ACCEPTANCE 3 negative-control: PASS")


def test_criterion_4_permutability_ladder(tmp_path, capsys):
    for name in ("z2", "s3", "impl2"):
        report, code = run_cli(["terms", "hm", str(CORPUS / f"{name}.json")])
        assert code == 0, name
        for check in (["check", "perm", "--n", "3"], ["check", "modularity"],
                      ["check", "shifting"]):
            _, code = run_cli(check + [str(CORPUS / f"{name}.json")])
            assert code == 0, (name, check)
    for check in (["check", "modularity"], ["check", "shifting"]):
        out = tmp_path / "rep.json"
        report, code = run_cli(check + [str(CORPUS / "set4.json"),
                                        "--out", str(out)])
        assert code == 1, check
        _, code = run_cli(["replay", str(out)])
        assert code == 0, check
    with capsys.disabled():
        print("ACCEPTANCE 4 permutability-ladder: PASS")


def test_criterion_5_remark_cube_agreement(capsys):
    corpus = zoo.two_element_corpus()
    assert len(corpus) >= 6
    for alg in corpus:
        remark, _ = run_cli(["remark-cube", str(CORPUS / f"{alg.name}.json")])
        hm, hm_code = run_cli(["terms", "hm", str(CORPUS / f"{alg.name}.json")])
        assert remark["remark"]["fiber_nonempty"] == (hm_code == 0), alg.name
        assert remark["remark"]["agrees_with_hm_search"], alg.name
    with capsys.disabled():
        print(f"ACCEPTANCE 5 remark-cube-agreement ({len(corpus)} algebras): PASS")


def test_criterion_6_diagram_theorems(tmp_path, capsys):
    rng = random.Random(20240810)
    bases = [zoo.z2(), zoo.klein(), zoo.s3(), zoo.implication2()]
    squares = cubes = 0
    for i in range(32):
        base = bases[i % len(bases)]
        sq = RG.rand_square(base, rng)
        assert D.goursat_pushout_check(sq).holds, (i, base.name)
        squares += 1
        cube = RG.rand_cube(base, rng)
        assert D.cube_lambda_check(cube).holds, (i, base.name)
        cubes += 1
        sq2, pt = RG.rand_beck_chevalley_instance(base, rng)
        assert D.beck_chevalley_check(sq2, pt).holds, (i, base.name)
        beta, p1, p2 = RG.rand_product_preservation_instance(base, rng)
        assert D.check_product_preservation(beta, p1, p2).holds, (i, base.name)
    assert squares + cubes >= 50

    # the bare-set family must produce a replayable failure of each check
    def replay_failing(kind, payload):
        path = tmp_path / f"fail-{kind}.json"
        path.write_text(json.dumps(payload))
        out = tmp_path / f"fail-{kind}-report.json"
        cmd = {"square": ["check", "pushout-square"],
               "cube": ["check", "cube"],
               "bc": ["check", "beck-chevalley"],
               "pp": ["check", "product-preservation"]}[kind]
        _, code = run_cli(cmd + [str(path), "--out", str(out)])
        assert code == 1, kind
        _, code = run_cli(["replay", str(out)])
        assert code == 0, kind

    rng = random.Random(7)
    found = {}
    found["square"] = cli.square_to_diagram(RG.bare_counterexample_square())
    found["cube"] = cli.cube_to_diagram(RG.bare_counterexample_cube())
    for i in range(400):
        if "bc" in found and "pp" in found:
            break
        base = zoo.bare(rng.randint(2, 4))
        beta, p1, p2 = RG.rand_product_preservation_instance(base, rng)
        if "pp" not in found and not D.check_product_preservation(
                beta, p1, p2).holds:
            found["pp"] = cli.product_preservation_to_diagram(beta, p1, p2)
        sq2, pt = RG.rand_beck_chevalley_instance(base, rng)
        if "bc" not in found and not D.beck_chevalley_check(sq2, pt).holds:
            found["bc"] = cli.beck_chevalley_to_diagram(sq2, pt)
    assert set(found) == {"square", "cube", "bc", "pp"}
    for kind, payload in found.items():
        replay_failing(kind, payload)
    with capsys.disabled():
        print(f"ACCEPTANCE 6 diagram-theorems ({squares} squares, {cubes} cubes,"
              " 4 failing bare-set instances replayed): PASS")


def test_criterion_7_cube_equivalence(capsys):
    rng = random.Random(20240811)
    cubes = [RG.bare_counterexample_cube()]
    bases = [zoo.z2(), zoo.klein(), zoo.s3(), zoo.implication2(),
             zoo.bare(3), zoo.bare(4)]
    for i in range(36):
        cubes.append(RG.rand_cube(bases[i % len(bases)], rng))
    disagreements = 0
    failures = 0
    for cube in cubes:
        lam = D.cube_lambda_check(cube)
        rf = D.cube_right_face_check(D.image_factorized_general_cube(cube))
        disagreements += lam.holds != rf.holds
        failures += not lam.holds
    assert disagreements == 0 and failures > 0
    with capsys.disabled():
        print(f"ACCEPTANCE 7 cube-equivalence ({len(cubes)} cubes, "
              f"{failures} negative): PASS")


def test_criterion_8_reflection_suite(tmp_path, capsys):
    s3 = zoo.s3()
    abelian = R.IdentitySet(((app("mul", var("x"), var("y")),
                              app("mul", var("y"), var("x"))),))
    reflected, _ = R.reflect(s3, abelian)
    assert reflected.size == 2
    # brute-force oracle: least congruence with commutative quotient
    best = None
    for c in congruences_by_enumeration(s3):
        q, _ = quotient(s3, c)
        if R.satisfies(q, abelian):
            best = c if best is None or c.leq(best) else best
    assert best.num_classes == 2

    rng = random.Random(41)
    group_bases = {"s3": (s3, abelian),
                   "klein": (zoo.klein(), abelian),
                   "z4": (zoo.z4(), R.IdentitySet(((app("add", var("x"), var("y")),
                                                    app("add", var("y"), var("x"))),)))}
    cospans = 0
    for i in range(21):
        base, ids = list(group_bases.values())[i % 3]
        pt1, pt2 = RG.rand_cospan(base, rng)
        assert R.check_split_pullback_preservation(pt1, pt2, ids).holds
        cospans += 1
    assert cospans >= 20

    q, sign = quotient(s3, cg(s3, [(0, 4)]))
    ext = {"kind": "extension",
           "algebras": {"A": cli.serialize_algebra(s3),
                        "B": cli.serialize_algebra(q)},
           "arrows": {"f": list(sign.mapping)}}
    path = tmp_path / "sign.json"
    path.write_text(json.dumps(ext))
    report, code = run_cli(["galois", str(path), str(CORPUS / "abelian.json")])
    assert code == 0
    with capsys.disabled():
        print(f"ACCEPTANCE 8 reflection-suite ({cospans} cospans): PASS")


def test_criterion_9_core_invariants(capsys):
    # relation calculus: exhaustive on 2 elements, sampled on 4
    from conftest import all_relations
    rels = list(all_relations(2))
    for r in rels:
        for s in rels:
            assert set(r.compose(s).pairs()) == compose_pairs_oracle(
                r.pairs(), s.pairs())
            assert r.compose(s).opposite() == s.opposite().compose(r.opposite())
            for t in rels:
                assert r.compose(s).compose(t) == r.compose(s.compose(t))
    rng = random.Random(3)
    for _ in range(100):
        r = random_relation(rng, 4, 4)
        s = random_relation(rng, 4, 4)
        t = random_relation(rng, 4, 4)
        assert r.compose(s).compose(t) == r.compose(s.compose(t))
        assert r.compose(s).opposite() == s.opposite().compose(r.opposite())

    # congruence generation minimality against partition enumeration
    checked = 0
    for alg in zoo.full_corpus():
        if alg.size > 4:
            continue
        congs = congruences_by_enumeration(alg)
        for a in range(alg.size):
            for b in range(alg.size):
                got = cg(alg, [(a, b)])
                containing = [d for d in congs if d.contains(a, b)]
                least = containing[0]
                for d in containing[1:]:
                    least = least.meet(d)
                assert got == least
                checked += 1

    # quotient / kernel-pair round trip up to six elements
    for alg in zoo.full_corpus():
        if alg.size > 6:
            continue
        for c in con_lattice(alg).congruences:
            _, proj = quotient(alg, c)
            assert kernel_pair(proj) == c
    with capsys.disabled():
        print(f"ACCEPTANCE 9 core-invariants ({checked} cg seeds): PASS")
