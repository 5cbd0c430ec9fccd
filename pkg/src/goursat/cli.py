"""Command-line front end: file formats, dispatch, reports, replay.

File formats (JSON throughout; all integers are carrier indices):

  algebra:    {"name": str, "size": int,
               "operations": {op: {"arity": int, "table": nested-lists}},
               "labels": [str, ...]?}
              A table of arity k is nested k deep, index order =
              argument order; arity 0 is a bare int.

  identities: {"identities": [{"lhs": sexpr, "rhs": sexpr}, ...]}
              where sexpr is ["op", arg, ...] and a bare string is a
              variable (or a constant if it names an arity-0 op).

  diagram:    {"kind": ..., "algebras": {role: path-or-inline-algebra},
               "arrows": {name: [int, ...]}} -- see _DIAGRAM_KINDS for
              the roles and arrows each kind requires.

Exit codes: 0 holds, 1 fails (witness emitted), 2 inconclusive (budget),
3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import diagrams, permutability, reflection, termsynth
from .algebras import (Congruence, FinAlgebra, Homomorphism, Signature,
                       compatible_partition_witness, term_from_sexpr)
from .errors import BudgetExceeded, InputError
from .kernels import BACKEND
from .relations import BinRel, Carrier
from .verdicts import Budget, FAILS, HOLDS, INCONCLUSIVE, Verdict

EXIT_BY_STATUS = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}
EXIT_INPUT_ERROR = 3


# ---------------------------------------------------------------------------
# algebra files

def parse_algebra(data, where: str = "algebra") -> FinAlgebra:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected a JSON object")
    try:
        name = data["name"]
        size = data["size"]
        operations = data["operations"]
    except KeyError as exc:
        raise InputError(f"{where}: missing field {exc}") from None
    if not isinstance(size, int) or size < 0:
        raise InputError(f"{where}: size must be a non-negative integer")
    ops = []
    tables = []
    for opname, spec in operations.items():
        if not isinstance(spec, dict) or "arity" not in spec or "table" not in spec:
            raise InputError(f"{where}: operation {opname!r} needs arity and table")
        arity = spec["arity"]
        flat: list[int] = []

        def walk(node, depth, path):
            if depth == 0:
                if not isinstance(node, int):
                    raise InputError(
                        f"{where}: operation {opname!r}: table{path} is not an "
                        f"integer")
                if not (0 <= node < size):
                    raise InputError(
                        f"{where}: operation {opname!r}: table{path} = {node} "
                        f"out of range 0..{size - 1}")
                flat.append(node)
                return
            if not isinstance(node, list) or len(node) != size:
                raise InputError(
                    f"{where}: operation {opname!r}: table{path} must be a "
                    f"list of length {size}")
            for i, sub in enumerate(node):
                walk(sub, depth - 1, f"{path}[{i}]")

        walk(spec["table"], arity, "")
        ops.append((opname, arity))
        tables.append(tuple(flat))
    labels = data.get("labels")
    if labels is not None:
        labels = tuple(str(x) for x in labels)
    return FinAlgebra(str(name), Carrier(size, labels), Signature(tuple(ops)),
                      tuple(tables))


def serialize_algebra(alg: FinAlgebra) -> dict:
    def nest(table, arity):
        if arity == 0:
            return table[0]
        n = alg.size
        step = len(table) // n if n else 0
        return [nest(table[i * step:(i + 1) * step], arity - 1) for i in range(n)]

    out = {"name": alg.name, "size": alg.size, "operations": {
        opname: {"arity": arity, "table": nest(table, arity)}
        for (opname, arity), table in zip(alg.sig.ops, alg.tables)}}
    if alg.carrier.labels is not None:
        out["labels"] = list(alg.carrier.labels)
    return out


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None


def file_sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def load_algebra(path: str) -> FinAlgebra:
    return parse_algebra(load_json(path), where=path)


def load_identities(path: str, sig: Signature) -> reflection.IdentitySet:
    data = load_json(path)
    if not isinstance(data, dict) or "identities" not in data:
        raise InputError(f"{path}: expected an object with an 'identities' list")
    pairs = []
    for i, item in enumerate(data["identities"]):
        try:
            lhs = term_from_sexpr(item["lhs"], sig)
            rhs = term_from_sexpr(item["rhs"], sig)
        except (KeyError, TypeError):
            raise InputError(f"{path}: identity {i} needs lhs and rhs") from None
        pairs.append((lhs, rhs))
    return reflection.IdentitySet(tuple(pairs))


# ---------------------------------------------------------------------------
# diagram files

_DIAGRAM_KINDS = {
    "point": (("X", "Y"), ("f", "i")),
    "square": (("X", "Y", "U", "W"), ("f", "i", "g", "j", "alpha", "beta")),
    "cube": (("X", "Y", "Z", "U", "V", "W"),
             ("f", "i", "l", "k", "g", "j", "h", "j2", "alpha", "beta", "gamma")),
    "beck-chevalley": (("X", "Y", "U", "W", "Z"),
                       ("f", "i", "g", "j", "alpha", "beta", "l", "k")),
    "product-preservation": (("Y", "W", "X1", "X2"),
                             ("beta", "f1", "i1", "f2", "i2")),
    "cospan": (("X", "Z", "Y"), ("f", "i", "l", "k")),
    "regular-cospan": (("A", "B", "C"), ("p", "g", "j")),
    "extension": (("A", "B"), ("f",)),
}


class DiagramFile:
    def __init__(self, path: str):
        data = load_json(path)
        self.path = path
        self.kind = data.get("kind")
        if self.kind not in _DIAGRAM_KINDS:
            raise InputError(
                f"{path}: unknown diagram kind {self.kind!r}; expected one of "
                f"{sorted(_DIAGRAM_KINDS)}")
        roles, arrows = _DIAGRAM_KINDS[self.kind]
        self.algebras: dict[str, FinAlgebra] = {}
        self.referenced_files: list[str] = []
        base = Path(path).parent
        for role in roles:
            try:
                spec = data["algebras"][role]
            except (KeyError, TypeError):
                raise InputError(f"{path}: missing algebra {role!r}") from None
            if isinstance(spec, str):
                target = str(base / spec)
                self.referenced_files.append(target)
                self.algebras[role] = load_algebra(target)
            else:
                self.algebras[role] = parse_algebra(spec, where=f"{path}:{role}")
        self.arrows_raw: dict[str, tuple[int, ...]] = {}
        for arrow in arrows:
            try:
                mapping = data["arrows"][arrow]
            except (KeyError, TypeError):
                raise InputError(f"{path}: missing arrow {arrow!r}") from None
            if not isinstance(mapping, list) or not all(
                    isinstance(v, int) for v in mapping):
                raise InputError(f"{path}: arrow {arrow!r} must be an int list")
            self.arrows_raw[arrow] = tuple(mapping)

    def hom(self, arrow: str, src_role: str, dst_role: str) -> Homomorphism:
        try:
            return Homomorphism(self.algebras[src_role], self.algebras[dst_role],
                                self.arrows_raw[arrow])
        except InputError as exc:
            raise InputError(f"{self.path}: arrow {arrow!r}: {exc}") from None

    def point(self, f: str, i: str, total: str, base: str) -> diagrams.Point:
        return diagrams.Point(self.hom(f, total, base), self.hom(i, base, total))

    def square(self) -> diagrams.SplitEpiSquare:
        return diagrams.SplitEpiSquare(
            self.point("f", "i", "X", "Y"), self.point("g", "j", "U", "W"),
            self.hom("alpha", "X", "U"), self.hom("beta", "Y", "W"))

    def cube(self) -> diagrams.Cube:
        front = diagrams.SplitEpiSquare(
            self.point("f", "i", "X", "Y"), self.point("g", "j", "U", "W"),
            self.hom("alpha", "X", "U"), self.hom("beta", "Y", "W"))
        back = diagrams.SplitEpiSquare(
            self.point("l", "k", "Z", "Y"), self.point("h", "j2", "V", "W"),
            self.hom("gamma", "Z", "V"), self.hom("beta", "Y", "W"))
        return diagrams.Cube(front, back)


def square_to_diagram(sq: diagrams.SplitEpiSquare) -> dict:
    return {"kind": "square",
            "algebras": {"X": serialize_algebra(sq.left.total),
                         "Y": serialize_algebra(sq.left.base),
                         "U": serialize_algebra(sq.right.total),
                         "W": serialize_algebra(sq.right.base)},
            "arrows": {"f": list(sq.left.f.mapping), "i": list(sq.left.i.mapping),
                       "g": list(sq.right.f.mapping), "j": list(sq.right.i.mapping),
                       "alpha": list(sq.alpha.mapping),
                       "beta": list(sq.beta.mapping)}}


def cube_to_diagram(c: diagrams.Cube) -> dict:
    front, back = c.front, c.back
    return {"kind": "cube",
            "algebras": {"X": serialize_algebra(front.left.total),
                         "Y": serialize_algebra(front.left.base),
                         "Z": serialize_algebra(back.left.total),
                         "U": serialize_algebra(front.right.total),
                         "V": serialize_algebra(back.right.total),
                         "W": serialize_algebra(front.right.base)},
            "arrows": {"f": list(front.left.f.mapping),
                       "i": list(front.left.i.mapping),
                       "l": list(back.left.f.mapping),
                       "k": list(back.left.i.mapping),
                       "g": list(front.right.f.mapping),
                       "j": list(front.right.i.mapping),
                       "h": list(back.right.f.mapping),
                       "j2": list(back.right.i.mapping),
                       "alpha": list(front.alpha.mapping),
                       "beta": list(front.beta.mapping),
                       "gamma": list(back.alpha.mapping)}}


def beck_chevalley_to_diagram(sq: diagrams.SplitEpiSquare,
                              pt: diagrams.Point) -> dict:
    out = square_to_diagram(sq)
    out["kind"] = "beck-chevalley"
    out["algebras"]["Z"] = serialize_algebra(pt.total)
    out["arrows"]["l"] = list(pt.f.mapping)
    out["arrows"]["k"] = list(pt.i.mapping)
    return out


def product_preservation_to_diagram(beta: Homomorphism, pt1: diagrams.Point,
                                    pt2: diagrams.Point) -> dict:
    return {"kind": "product-preservation",
            "algebras": {"Y": serialize_algebra(beta.src),
                         "W": serialize_algebra(beta.dst),
                         "X1": serialize_algebra(pt1.total),
                         "X2": serialize_algebra(pt2.total)},
            "arrows": {"beta": list(beta.mapping),
                       "f1": list(pt1.f.mapping), "i1": list(pt1.i.mapping),
                       "f2": list(pt2.f.mapping), "i2": list(pt2.i.mapping)}}


# ---------------------------------------------------------------------------
# reports

def strip_label_keys(report: dict) -> dict:
    """Witness labels are display sugar; JSON reports omit them unless
    --witness-labels asks for them (all indices stay either way)."""
    witness = report.get("witness")
    if not witness:
        return report
    out = dict(report)
    out["witness"] = {k: v for k, v in witness.items()
                      if not k.endswith("labels") and not k.endswith("label")}
    return out


def make_report(command: str, files: dict[str, str], flags: dict, verdict: Verdict,
                extras: dict | None = None, started: float = 0.0) -> dict:
    report = {
        "command": command,
        "input": {
            "files": files,
            "hashes": {p: file_sha256(p) for p in files.values()},
            "flags": flags,
        },
        "status": verdict.status,
        "witness": verdict.witness,
        "budget": {"note": verdict.budget_note} if verdict.budget_note else {},
        "assumptions": [],
        "backend": BACKEND,
        "elapsed_ms": round((time.time() - started) * 1000, 3),
    }
    if extras:
        report.update(extras)
    return report


def print_report(report: dict, as_json: bool, witness_labels: bool = False):
    if as_json:
        json.dump(report if witness_labels else strip_label_keys(report),
                  sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return
    print(f"{report['command']}: {report['status']}")
    if report.get("witness"):
        print("witness:")
        for key, val in report["witness"].items():
            print(f"  {key}: {val}")
    for key in ("term", "terms", "result"):
        if report.get(key) is not None:
            print(f"{key}: {json.dumps(report[key])}")
    if report.get("remark"):
        for key, val in report["remark"].items():
            print(f"  {key}: {val}")
    if report["budget"]:
        print(f"budget: {report['budget']['note']}")
    for note in report["assumptions"]:
        print(f"assumption: {note}")


# ---------------------------------------------------------------------------
# command handlers

def _budget_from_args(args) -> Budget:
    return Budget(seed_pairs=args.seed_pairs, max_congruences=args.max_congruences,
                  max_relations=args.max_relations, cap=args.cap)


def cmd_check_perm(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    verdict = permutability.check_permutable(alg, args.n, _budget_from_args(args))
    report = make_report("check perm", {"algebra": args.algebra},
                         {"n": args.n}, verdict, started=started)
    report["assumptions"].append(
        "verdict concerns the congruences of this algebra, not its whole variety")
    return report


def cmd_check_modularity(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    verdict = permutability.check_modularity(alg, _budget_from_args(args))
    return make_report("check modularity", {"algebra": args.algebra}, {},
                       verdict, started=started)


def cmd_check_shifting(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    verdict = permutability.check_shifting_lemma(alg, _budget_from_args(args))
    return make_report("check shifting", {"algebra": args.algebra}, {},
                       verdict, started=started)


def cmd_check_goursat_relations(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    budget = _budget_from_args(args)
    if args.condition == "ii":
        verdict = permutability.check_reflexive_goursat(alg, budget)
    elif args.condition == "iii":
        verdict = permutability.check_relation_condition_iii(alg, budget)
    else:
        verdict = permutability.check_relation_condition_iv(
            alg, budget, args.left_power, args.right_power)
    report = make_report("check goursat-relations", {"algebra": args.algebra},
                         {"condition": args.condition,
                          "seed_pairs": args.seed_pairs,
                          "left_power": args.left_power,
                          "right_power": args.right_power},
                         verdict, started=started)
    if verdict.status == HOLDS:
        report["assumptions"].append(
            "holds is exhaustive only within the generated-relation budget")
    return report


def cmd_terms(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    if args.which == "maltsev":
        res = termsynth.find_maltsev(alg, cap=args.cap)
    else:
        res = termsynth.find_hm_pair(alg, cap=args.cap)
    extras: dict = {"scanned": res.scanned, "complete": res.complete}
    if res.found is not None:
        verdict = Verdict(HOLDS)
        if args.which == "maltsev":
            extras["term"] = res.found.derivation.to_sexpr()
            extras["table"] = list(res.found.table)
        else:
            r, s = res.found
            extras["terms"] = {"r": r.derivation.to_sexpr(),
                               "s": s.derivation.to_sexpr()}
            extras["tables"] = {"r": list(r.table), "s": list(s.table)}
    elif res.complete:
        wanted = ("Mal'tsev term" if args.which == "maltsev"
                  else "Hagemann-Mitschke pair")
        verdict = Verdict(FAILS, {
            "exhaustive": f"no {wanted} in the ternary clone "
                          f"({res.scanned} functions scanned)"})
    else:
        verdict = Verdict(INCONCLUSIVE, None,
                          f"generation cap {args.cap} hit after {res.scanned} functions")
    return make_report(f"terms {args.which}", {"algebra": args.algebra},
                       {"cap": args.cap}, verdict, extras, started)


def cmd_remark_cube(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    rep = termsynth.remark_cube_report(alg, cap=args.cap)
    if not rep.complete:
        verdict = Verdict(INCONCLUSIVE, None,
                          f"clone generation hit the cap {args.cap}")
        extras = {}
    else:
        verdict = rep.lambda_verdict
        extras = {"remark": {
            "lambda_surjective": rep.lambda_verdict.holds,
            "fiber_nonempty": rep.fiber_nonempty,
            "fiber_pair": [t.to_sexpr() for t in rep.fiber_pair]
            if rep.fiber_pair else None,
            "agrees_with_hm_search": rep.hm_agrees,
            "sizes": rep.sizes,
        }}
    report = make_report("remark-cube", {"algebra": args.algebra},
                         {"cap": args.cap}, verdict, extras, started)
    report["assumptions"].append(
        "clone algebras are the free algebras of the variety generated by "
        "this algebra; surjectivity is reported for this instance only")
    return report


def cmd_check_pushout_square(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    verdict = diagrams.goursat_pushout_check(diag.square())
    return make_report("check pushout-square", _diag_files(args, diag), {},
                       verdict, started=started)


def cmd_check_cube(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    verdict = diagrams.cube_lambda_check(diag.cube())
    return make_report("check cube", _diag_files(args, diag), {},
                       verdict, started=started)


def cmd_check_cube_general(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    gc = diagrams.image_factorized_general_cube(diag.cube())
    verdict = diagrams.cube_right_face_check(gc)
    report = make_report("check cube-general", _diag_files(args, diag), {},
                         verdict, started=started)
    report["assumptions"].append(
        "the comparison is taken through the image factorization of the "
        "pullback comparison of the cube")
    return report


def cmd_check_beck_chevalley(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    sq = diag.square()
    pt = diag.point("l", "k", "Z", "Y")
    verdict = diagrams.beck_chevalley_check(sq, pt)
    report = make_report("check beck-chevalley", _diag_files(args, diag), {},
                         verdict, started=started)
    report["assumptions"].append(
        "the comparison checked is the canonical one induced by the pushout "
        "universal property, object by object")
    return report


def cmd_check_product_preservation(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    beta = diag.hom("beta", "Y", "W")
    pt1 = diag.point("f1", "i1", "X1", "Y")
    pt2 = diag.point("f2", "i2", "X2", "Y")
    verdict = diagrams.check_product_preservation(beta, pt1, pt2)
    return make_report("check product-preservation", _diag_files(args, diag), {},
                       verdict, started=started)


def cmd_reflect(args) -> dict:
    started = time.time()
    alg = load_algebra(args.algebra)
    ids = load_identities(args.identities, alg.sig)
    reflected, eta = reflection.reflect(alg, ids)
    extras = {"result": serialize_algebra(reflected), "eta": list(eta.mapping),
              "iso": eta.is_injective()}
    return make_report("reflect",
                       {"algebra": args.algebra, "identities": args.identities},
                       {}, Verdict(HOLDS), extras, started)


def cmd_check_reflector_pullbacks(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    if diag.kind == "cospan":
        sig = diag.algebras["X"].sig
        ids = load_identities(args.identities, sig)
        pt1 = diag.point("f", "i", "X", "Y")
        pt2 = diag.point("l", "k", "Z", "Y")
        verdict = reflection.check_split_pullback_preservation(pt1, pt2, ids)
    elif diag.kind == "regular-cospan":
        sig = diag.algebras["A"].sig
        ids = load_identities(args.identities, sig)
        p = diag.hom("p", "A", "B")
        gpt = diag.point("g", "j", "C", "B")
        verdict = reflection.check_regular_pullback_preservation(p, gpt, ids)
    else:
        raise InputError(
            f"{args.diagram}: reflector-pullbacks expects a cospan or "
            f"regular-cospan diagram, got {diag.kind!r}")
    files = _diag_files(args, diag)
    files["identities"] = args.identities
    report = make_report("check reflector-pullbacks", files,
                         {"kind": diag.kind}, verdict, started=started)
    report["assumptions"].append(
        "for the regular-cospan variant, exactness of the ambient variety "
        "is assumed, not verified")
    return report


def cmd_galois(args) -> dict:
    started = time.time()
    diag = DiagramFile(args.diagram)
    if diag.kind != "extension":
        raise InputError(f"{args.diagram}: galois expects an extension diagram")
    f = diag.hom("f", "A", "B")
    if not f.is_surjective():
        raise InputError(f"{args.diagram}: arrow 'f' must be surjective")
    ids = load_identities(args.identities, diag.algebras["A"].sig)
    pc = reflection.galois_pregroupoid(f, ids)
    verdict = reflection.groupoid_check(pc)
    files = _diag_files(args, diag)
    files["identities"] = args.identities
    extras = {"result": {"P0": pc.p0.size, "P1": pc.p1.size, "P2": pc.p2.size}}
    report = make_report("galois", files, {}, verdict, extras, started)
    report["assumptions"].append(
        "groupoid criterion: pullback comparison bijective plus elementwise "
        "unit/associativity/inverse laws")
    return report


def _diag_files(args, diag: DiagramFile) -> dict[str, str]:
    files = {"diagram": args.diagram}
    for i, ref in enumerate(diag.referenced_files):
        files[f"ref{i}"] = ref
    return files


# ---------------------------------------------------------------------------
# replay

def _relation_from_witness(alg, witness, reflexive):
    return permutability.generate_relation(
        alg, [tuple(p) for p in witness["seed_pairs"]], reflexive=reflexive)


def _congruence_from_reps(alg, reps):
    reps = tuple(reps)
    c = Congruence.from_partition(alg, reps)
    if c.reps != reps:
        raise InputError("witness partition is not in canonical form")
    if compatible_partition_witness(alg, reps) is not None:
        raise InputError("witness partition is no longer a congruence")
    return c


def _strip_labels(witness):
    if witness is None:
        return None
    return {k: v for k, v in witness.items()
            if not k.endswith("labels") and not k.endswith("label")}


def _same_witness(verdict_witness, recorded) -> bool:
    return _strip_labels(verdict_witness) == _strip_labels(recorded)


def replay_report(report: dict) -> bool:
    """Re-evaluate the recorded violation; True iff it reproduces."""
    command = report.get("command")
    witness = report.get("witness")
    files = report["input"]["files"]
    flags = report["input"].get("flags", {})
    if command == "check perm":
        alg = load_algebra(files["algebra"])
        r = _congruence_from_reps(alg, witness["R"]).as_binrel()
        s = _congruence_from_reps(alg, witness["S"]).as_binrel()
        if flags.get("n", witness.get("n")) == 2:
            sides = {"RS": r.compose(s), "SR": s.compose(r)}
        else:
            sides = {"RSR": r.compose(s).compose(r),
                     "SRS": s.compose(r).compose(s)}
        x, y = witness["pair"]
        other = next(k for k in sides if k != witness["side"])
        return sides[witness["side"]].holds(x, y) and not sides[other].holds(x, y)
    if command == "check modularity":
        alg = load_algebra(files["algebra"])
        r = _congruence_from_reps(alg, witness["R"])
        s = _congruence_from_reps(alg, witness["S"])
        t = _congruence_from_reps(alg, witness["T"])
        if not r.leq(t):
            raise InputError("witness triple no longer satisfies R <= T")
        lhs = r.join(s.meet(t))
        rhs = r.join(s).meet(t)
        x, y = witness["pair"]
        return lhs.contains(x, y) != rhs.contains(x, y)
    if command == "check shifting":
        alg = load_algebra(files["algebra"])
        r = _congruence_from_reps(alg, witness["R"])
        s = _congruence_from_reps(alg, witness["S"])
        t = _congruence_from_reps(alg, witness["T"])
        x, y, tt, z = witness["elements"]
        return (r.meet(s).leq(t) and r.contains(x, y) and t.contains(x, y)
                and s.contains(x, tt) and s.contains(y, z) and r.contains(tt, z)
                and not t.contains(tt, z))
    if command == "check goursat-relations":
        alg = load_algebra(files["algebra"])
        cond = flags["condition"]
        x, y = witness["pair"]
        if cond == "ii":
            e = _relation_from_witness(alg, witness, reflexive=True)
            return (e.opposite().holds(x, y)
                    and not e.compose(e).holds(x, y))
        if cond == "iii":
            t = _relation_from_witness(alg, witness,
                                       reflexive=witness.get("reflexive", False))
            corner = BinRel.identity(alg.carrier).meet(t)
            lhs = corner.compose(t.opposite()).compose(corner)
            return lhs.holds(x, y) and not t.compose(t).holds(x, y)
        p = permutability.generate_hetero_relation(
            alg, [tuple(v) for v in witness["seed_vectors"]],
            witness["left_power"], witness["right_power"])
        ppo = p.compose(p.opposite())
        return (ppo.compose(ppo).holds(x, y) and not ppo.holds(x, y))
    if command in ("terms maltsev", "terms hm"):
        alg = load_algebra(files["algebra"])
        which = command.split()[1]
        res = (termsynth.find_maltsev if which == "maltsev"
               else termsynth.find_hm_pair)(alg, cap=flags.get("cap", 10**6))
        return res.found is None and res.complete
    if command == "remark-cube":
        alg = load_algebra(files["algebra"])
        rep = termsynth.remark_cube_report(alg, cap=flags.get("cap", 10**6))
        return (rep.complete and rep.lambda_verdict.status == FAILS
                and _same_witness(rep.lambda_verdict.witness, witness))
    if command == "check pushout-square":
        diag = DiagramFile(files["diagram"])
        sq = diag.square()
        u1, u2 = witness["pair"]
        if sq.right.f(u1) != sq.right.f(u2):
            raise InputError("witness pair is not in the kernel pair any more")
        f, alpha = sq.left.f, sq.alpha
        return not any(
            alpha(a) == u1 and alpha(b) == u2
            for a in range(f.src.size) for b in range(f.src.size)
            if f(a) == f(b))
    if command == "check cube":
        diag = DiagramFile(files["diagram"])
        c = diag.cube()
        u, v = witness["pair"]
        f, l = c.front.left.f, c.back.left.f
        if c.front.right.f(u) != c.back.right.f(v):
            raise InputError("witness pair is not in the target pullback")
        return not any(
            c.front.alpha(x) == u and c.back.alpha(z) == v
            for x in range(f.src.size) for z in range(l.src.size)
            if f(x) == l(z))
    # deterministic recompute-and-compare for the constructed comparisons
    if command == "check cube-general":
        diag = DiagramFile(files["diagram"])
        gc = diagrams.image_factorized_general_cube(diag.cube())
        return _same_witness(diagrams.cube_right_face_check(gc).witness, witness)
    if command == "check beck-chevalley":
        diag = DiagramFile(files["diagram"])
        verdict = diagrams.beck_chevalley_check(diag.square(),
                                                diag.point("l", "k", "Z", "Y"))
        return _same_witness(verdict.witness, witness)
    if command == "check product-preservation":
        diag = DiagramFile(files["diagram"])
        verdict = diagrams.check_product_preservation(
            diag.hom("beta", "Y", "W"), diag.point("f1", "i1", "X1", "Y"),
            diag.point("f2", "i2", "X2", "Y"))
        return _same_witness(verdict.witness, witness)
    if command == "check reflector-pullbacks":
        diag = DiagramFile(files["diagram"])
        if diag.kind == "cospan":
            ids = load_identities(files["identities"], diag.algebras["X"].sig)
            verdict = reflection.check_split_pullback_preservation(
                diag.point("f", "i", "X", "Y"), diag.point("l", "k", "Z", "Y"), ids)
        else:
            ids = load_identities(files["identities"], diag.algebras["A"].sig)
            verdict = reflection.check_regular_pullback_preservation(
                diag.hom("p", "A", "B"), diag.point("g", "j", "C", "B"), ids)
        return _same_witness(verdict.witness, witness)
    if command == "galois":
        diag = DiagramFile(files["diagram"])
        ids = load_identities(files["identities"], diag.algebras["A"].sig)
        pc = reflection.galois_pregroupoid(diag.hom("f", "A", "B"), ids)
        return _same_witness(reflection.groupoid_check(pc).witness, witness)
    raise InputError(f"cannot replay command {command!r}")


def cmd_replay(args) -> int:
    report = load_json(args.report)
    if not isinstance(report, dict) or "command" not in report:
        print("replay: not a report file", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if report.get("status") != FAILS or not report.get("witness"):
        print("replay: nothing to replay (report does not record a failure)")
        return EXIT_INPUT_ERROR
    for path, digest in report["input"].get("hashes", {}).items():
        try:
            current = file_sha256(path)
        except OSError:
            print(f"replay: stale input: {path} missing", file=sys.stderr)
            return EXIT_INPUT_ERROR
        if current != digest:
            print(f"replay: stale input: {path} changed", file=sys.stderr)
            return EXIT_INPUT_ERROR
    try:
        reproduced = replay_report(report)
    except InputError as exc:
        print(f"replay: stale witness: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if reproduced:
        print("replay: violation reproduces")
        return 0
    print("replay: violation did NOT reproduce")
    return 1


# ---------------------------------------------------------------------------
# argument parsing

class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def _common_flags(p):
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--witness-labels", action="store_true",
                   help="include element labels in witnesses")
    p.add_argument("--out", help="also write the JSON report to this file")
    p.add_argument("--cap", type=int, default=10**6,
                   help="clone generation cap (number of term functions)")
    p.add_argument("--seed-pairs", type=int, default=2,
                   help="max seed pairs when generating relations")
    p.add_argument("--max-congruences", type=int, default=10000)
    p.add_argument("--max-relations", type=int, default=4096)


def build_parser() -> Parser:
    parser = Parser(prog="goursat",
                    description="Decide and witness 2-/3-permutability "
                                "properties of finite algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run a property check")
    csub = check.add_subparsers(dest="check_command", required=True)

    p = csub.add_parser("perm", help="congruence n-permutability")
    p.add_argument("--n", type=int, choices=(2, 3), required=True)
    p.add_argument("algebra")
    _common_flags(p)
    p.set_defaults(handler=cmd_check_perm)

    p = csub.add_parser("modularity", help="congruence lattice modular law")
    p.add_argument("algebra")
    _common_flags(p)
    p.set_defaults(handler=cmd_check_modularity)

    p = csub.add_parser("shifting", help="the shifting lemma")
    p.add_argument("algebra")
    _common_flags(p)
    p.set_defaults(handler=cmd_check_shifting)

    p = csub.add_parser("goursat-relations",
                        help="relational conditions on generated relations")
    p.add_argument("condition", choices=("ii", "iii", "iv"))
    p.add_argument("algebra")
    p.add_argument("--left-power", type=int, default=2)
    p.add_argument("--right-power", type=int, default=1)
    _common_flags(p)
    p.set_defaults(handler=cmd_check_goursat_relations)

    for name, handler in (("pushout-square", cmd_check_pushout_square),
                          ("cube", cmd_check_cube),
                          ("cube-general", cmd_check_cube_general),
                          ("beck-chevalley", cmd_check_beck_chevalley),
                          ("product-preservation", cmd_check_product_preservation)):
        p = csub.add_parser(name)
        p.add_argument("diagram")
        _common_flags(p)
        p.set_defaults(handler=handler)

    p = csub.add_parser("reflector-pullbacks",
                        help="reflector preserves the pullback of a cospan")
    p.add_argument("diagram")
    p.add_argument("identities")
    _common_flags(p)
    p.set_defaults(handler=cmd_check_reflector_pullbacks)

    p = sub.add_parser("terms", help="synthesize characteristic ternary terms")
    p.add_argument("which", choices=("maltsev", "hm"))
    p.add_argument("algebra")
    _common_flags(p)
    p.set_defaults(handler=cmd_terms)

    p = sub.add_parser("remark-cube",
                       help="the free-algebra cube on clone algebras")
    p.add_argument("algebra")
    _common_flags(p)
    p.set_defaults(handler=cmd_remark_cube)

    p = sub.add_parser("reflect", help="reflect into an identity-defined subvariety")
    p.add_argument("algebra")
    p.add_argument("identities")
    _common_flags(p)
    p.set_defaults(handler=cmd_reflect)

    p = sub.add_parser("galois",
                       help="Galois pregroupoid of an extension, plus groupoid check")
    p.add_argument("diagram")
    p.add_argument("identities")
    _common_flags(p)
    p.set_defaults(handler=cmd_galois)

    p = sub.add_parser("replay", help="re-evaluate a recorded failure witness")
    p.add_argument("report")
    p.set_defaults(handler=None)

    return parser


def run(argv) -> tuple[dict | None, int]:
    """Parse and execute; returns (report, exit code)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, exc.code if isinstance(exc.code, int) else EXIT_INPUT_ERROR
    if args.command == "replay":
        return None, cmd_replay(args)
    try:
        report = args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_INPUT_ERROR
    except BudgetExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return None, EXIT_BY_STATUS[INCONCLUSIVE]
    print_report(report, args.json, args.witness_labels)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            json.dump(report if args.witness_labels else strip_label_keys(report),
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report, EXIT_BY_STATUS[report["status"]]


def main():
    _, code = run(sys.argv[1:])
    raise SystemExit(code)


if __name__ == "__main__":
    main()
