"""Split-epimorphism diagram machinery.

Points are split epis with a chosen section; squares and cubes of
points are validated strictly at construction (every face, sections
included), so the theorem checks below can assume well-formed input and
name the failing face otherwise.

Pushouts are computed only along surjections: the quotient of the top
object by the congruence generated by gluing the section images of each
fiber.  That is the only pushout shape needed here, and the one that is
guaranteed to stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .algebras import (Congruence, FinAlgebra, Homomorphism, cg, identity_hom,
                       image_factorize, quotient)
from .errors import InputError
from .relations import Carrier
from .verdicts import Verdict, fails, holds


@dataclass(frozen=True)
class Point:
    """A split epimorphism f with a fixed section i."""

    f: Homomorphism
    i: Homomorphism

    def __post_init__(self):
        if self.i.src != self.f.dst or self.i.dst != self.f.src:
            raise InputError("section endpoints do not match the split epi")
        for y in range(self.f.dst.size):
            if self.f(self.i(y)) != y:
                raise InputError(
                    f"section is not split: f(i({y})) = {self.f(self.i(y))}")

    @property
    def total(self) -> FinAlgebra:
        return self.f.src

    @property
    def base(self) -> FinAlgebra:
        return self.f.dst


def trivial_point(alg: FinAlgebra) -> Point:
    h = identity_hom(alg)
    return Point(h, h)


def _check_face(name: str, lhs: Homomorphism, rhs: Homomorphism):
    if lhs.src != rhs.src or lhs.dst != rhs.dst or lhs.mapping != rhs.mapping:
        raise InputError(f"face does not commute: {name}")


@dataclass(frozen=True)
class SplitEpiSquare:
    """A morphism of points: (alpha, beta) from the left point to the right."""

    left: Point
    right: Point
    alpha: Homomorphism
    beta: Homomorphism

    def __post_init__(self):
        if self.alpha.src != self.left.total or self.alpha.dst != self.right.total:
            raise InputError("alpha endpoints do not match the square")
        if self.beta.src != self.left.base or self.beta.dst != self.right.base:
            raise InputError("beta endpoints do not match the square")
        _check_face("g . alpha = beta . f", self.alpha.then(self.right.f),
                    self.left.f.then(self.beta))
        _check_face("alpha . i = j . beta", self.left.i.then(self.alpha),
                    self.beta.then(self.right.i))

    def require_surjective(self):
        if not self.alpha.is_surjective():
            raise InputError("alpha must be surjective for this check")
        if not self.beta.is_surjective():
            raise InputError("beta must be surjective for this check")


@dataclass(frozen=True)
class Cube:
    """Two squares of points over a common base arrow beta.

    Front: (f,i): X->Y mapped to (g,j): U->W by (alpha, beta).
    Back:  (l,k): Z->Y mapped to (h,j2): V->W by (gamma, beta).
    The left and right faces are the induced pullbacks.
    """

    front: SplitEpiSquare
    back: SplitEpiSquare

    def __post_init__(self):
        if (self.front.beta.src != self.back.beta.src
                or self.front.beta.dst != self.back.beta.dst
                or self.front.beta.mapping != self.back.beta.mapping):
            raise InputError("front and back squares disagree on beta")

    @property
    def beta(self) -> Homomorphism:
        return self.front.beta

    def require_surjective(self):
        self.front.require_surjective()
        self.back.require_surjective()


# ---------------------------------------------------------------------------
# pullbacks

@dataclass(frozen=True)
class Pullback:
    """The subalgebra {(x, z) : f(x) = l(z)} of X x Z, in pair order."""

    apex: FinAlgebra
    to_left: Homomorphism
    to_right: Homomorphism
    pairs: tuple[tuple[int, int], ...]

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        return {p: i for i, p in enumerate(self.pairs)}


def pullback(f: Homomorphism, l: Homomorphism, name: str | None = None) -> Pullback:
    if f.dst != l.dst:
        raise InputError("pullback needs a common codomain")
    x_alg, z_alg = f.src, l.src
    pairs = tuple((x, z) for x in range(x_alg.size) for z in range(z_alg.size)
                  if f(x) == l(z))
    index = {p: i for i, p in enumerate(pairs)}
    tables = []
    for opi, (opname, arity) in enumerate(x_alg.sig.ops):
        tx = x_alg.tables[opi]
        tz = z_alg.tables[opi]
        entries = []
        m = len(pairs)
        if arity == 0:
            # constants always pair up: f and l agree on them
            entries.append(index[(tx[0], tz[0])])
        elif m > 0:
            idxs = [0] * arity
            while True:
                ix = iz = 0
                for t in idxs:
                    px, pz = pairs[t]
                    ix = ix * x_alg.size + px
                    iz = iz * z_alg.size + pz
                entries.append(index[(tx[ix], tz[iz])])
                j = arity - 1
                while j >= 0:
                    idxs[j] += 1
                    if idxs[j] < m:
                        break
                    idxs[j] = 0
                    j -= 1
                if j < 0:
                    break
        tables.append(tuple(entries))
    labels = tuple(f"({x_alg.label(x)},{z_alg.label(z)})" for x, z in pairs)
    apex = FinAlgebra(name or f"{x_alg.name}*_{f.dst.name}*{z_alg.name}",
                      Carrier(len(pairs), labels), x_alg.sig, tuple(tables))
    to_left = Homomorphism(apex, x_alg, tuple(x for x, _ in pairs))
    to_right = Homomorphism(apex, z_alg, tuple(z for _, z in pairs))
    return Pullback(apex, to_left, to_right, pairs)


def pullback_point(f: Homomorphism, pt: Point) -> tuple[Point, Pullback]:
    """Change of base along f: the point (Z,l,k) over Y pulled back to one
    over X = f.src, with section x -> (x, k(f(x)))."""
    if pt.base != f.dst:
        raise InputError("point is not over the codomain of f")
    pb = pullback(f, pt.f)
    section = Homomorphism(f.src, pb.apex, tuple(
        pb.index[(x, pt.i(f(x)))] for x in range(f.src.size)))
    return Point(pb.to_left, section), pb


def point_product(pt1: Point, pt2: Point) -> tuple[Point, Pullback]:
    """Binary product in the category of points over the common base."""
    if pt1.base != pt2.base:
        raise InputError("points live over different bases")
    pb = pullback(pt1.f, pt2.f)
    f = pb.to_left.then(pt1.f)
    section = Homomorphism(pt1.base, pb.apex, tuple(
        pb.index[(pt1.i(y), pt2.i(y))] for y in range(pt1.base.size)))
    return Point(f, section), pb


# ---------------------------------------------------------------------------
# kernel-pair comparison (Goursat pushout) and the cube checks

def _eq_pairs(h: Homomorphism):
    return [(a, b) for a in range(h.src.size) for b in range(h.src.size)
            if h(a) == h(b)]


def goursat_pushout_check(sq: SplitEpiSquare) -> Verdict:
    """Is the induced map on kernel pairs Eq(f) -> Eq(g) surjective?"""
    sq.require_surjective()
    alpha, f, g = sq.alpha, sq.left.f, sq.right.f
    image = {(alpha(a), alpha(b)) for a, b in _eq_pairs(f)}
    u_alg = sq.right.total
    for u1, u2 in _eq_pairs(g):
        if (u1, u2) not in image:
            return fails({
                "pair": [u1, u2],
                "pair_labels": [u_alg.label(u1), u_alg.label(u2)],
            })
    return holds()


def cube_lambda_check(c: Cube) -> Verdict:
    """Is the induced comparison of the pullback faces surjective?"""
    c.require_surjective()
    f, l = c.front.left.f, c.back.left.f
    g, h = c.front.right.f, c.back.right.f
    alpha, gamma = c.front.alpha, c.back.alpha
    image = {(alpha(x), gamma(z))
             for x in range(f.src.size) for z in range(l.src.size)
             if f(x) == l(z)}
    u_alg, v_alg = g.src, h.src
    for u in range(u_alg.size):
        for v in range(v_alg.size):
            if g(u) == h(v) and (u, v) not in image:
                return fails({
                    "pair": [u, v],
                    "pair_labels": [u_alg.label(u), v_alg.label(v)],
                })
    return holds()


@dataclass(frozen=True)
class GeneralCube:
    """A cube whose top comparison has been replaced by a surjection onto
    an intermediate object A, as in the image factorization of the
    pullback comparison."""

    cube: Cube
    left: Pullback
    apex: FinAlgebra
    delta: Homomorphism      # left.apex -> apex, surjective
    a_u: Homomorphism        # apex -> U
    a_v: Homomorphism        # apex -> V
    sect_u: Homomorphism | None = None

    def __post_init__(self):
        if not self.delta.is_surjective():
            raise InputError("delta must be surjective")
        _check_face("a_u . delta = alpha . pi_X",
                    self.delta.then(self.a_u),
                    self.left.to_left.then(self.cube.front.alpha))
        _check_face("a_v . delta = gamma . pi_Z",
                    self.delta.then(self.a_v),
                    self.left.to_right.then(self.cube.back.alpha))
        _check_face("g . a_u = h . a_v",
                    self.a_u.then(self.cube.front.right.f),
                    self.a_v.then(self.cube.back.right.f))
        if self.sect_u is not None:
            if any(self.a_u(self.sect_u(u)) != u
                   for u in range(self.cube.front.right.total.size)):
                raise InputError("sect_u does not split a_u")


def image_factorized_general_cube(c: Cube) -> GeneralCube:
    """Factor the pullback comparison through its image."""
    c.require_surjective()
    f, l = c.front.left.f, c.back.left.f
    g, h = c.front.right.f, c.back.right.f
    alpha, gamma = c.front.alpha, c.back.alpha
    left = pullback(f, l)
    right = pullback(g, h)
    lam = Homomorphism(left.apex, right.apex, tuple(
        right.index[(alpha(x), gamma(z))] for x, z in left.pairs))
    delta, mono = image_factorize(lam)
    a_u = mono.then(right.to_left)
    a_v = mono.then(right.to_right)
    j2 = c.back.right.i
    members = {q: i for i, q in enumerate(mono.mapping)}
    sect_u = Homomorphism(g.src, delta.dst, tuple(
        members[right.index[(u, j2(g(u)))]] for u in range(g.src.size)))
    return GeneralCube(c, left, delta.dst, delta, a_u, a_v, sect_u)


def cube_right_face_check(gc: GeneralCube) -> Verdict:
    """Is the right face a pullback, i.e. is A -> U x_W V bijective?"""
    g = gc.cube.front.right.f
    h = gc.cube.back.right.f
    u_alg, v_alg = g.src, h.src
    seen: dict[tuple[int, int], int] = {}
    for a in range(gc.apex.size):
        key = (gc.a_u(a), gc.a_v(a))
        if key in seen:
            return fails({
                "reason": "not-injective",
                "elements": [seen[key], a],
                "element_labels": [gc.apex.label(seen[key]), gc.apex.label(a)],
            })
        seen[key] = a
    for u in range(u_alg.size):
        for v in range(v_alg.size):
            if g(u) == h(v) and (u, v) not in seen:
                return fails({
                    "reason": "not-surjective",
                    "pair": [u, v],
                    "pair_labels": [u_alg.label(u), v_alg.label(v)],
                })
    return holds()


# ---------------------------------------------------------------------------
# pushouts along split monos and the left adjoint of change of base

@dataclass(frozen=True)
class Pushout:
    apex: FinAlgebra
    from_top: Homomorphism     # X -> apex (regular epi, image of beta)
    from_base: Homomorphism    # W -> apex (image of the split mono)
    glue: Congruence


def pushout_along_split_mono(beta: Homomorphism, i: Homomorphism) -> Pushout:
    """Pushout of the surjection beta: Y -> W along i: Y -> X.

    The apex is X modulo the congruence generated by identifying the
    i-images of each beta-fiber.  General pushouts of finite algebras
    can be infinite; this shape stays finite, and it is the only one the
    point machinery needs.
    """
    if beta.src != i.src:
        raise InputError("pushout span must share its source")
    if not beta.is_surjective():
        raise InputError("pushouts are only computed along surjections")
    x_alg = i.dst
    fibers: dict[int, int] = {}
    pairs = []
    for y in range(beta.src.size):
        w = beta(y)
        if w in fibers:
            pairs.append((i(fibers[w]), i(y)))
        else:
            fibers[w] = y
    glue = cg(x_alg, pairs)
    apex, proj = quotient(x_alg, glue, check=False)
    from_base = Homomorphism(beta.dst, apex, tuple(
        proj(i(fibers[w])) for w in range(beta.dst.size)))
    return Pushout(apex, proj, from_base, glue)


def beta_shriek(pt: Point, beta: Homomorphism) -> tuple[Point, Pushout]:
    """Transport a point over Y along a surjection beta: Y -> W."""
    if pt.base != beta.src:
        raise InputError("point is not over the domain of beta")
    po = pushout_along_split_mono(beta, pt.i)
    mapping = [None] * po.apex.size
    for x in range(pt.total.size):
        target = beta(pt.f(x))
        cls = po.from_top(x)
        if mapping[cls] is None:
            mapping[cls] = target
        elif mapping[cls] != target:
            raise InputError(
                "induced split epi is not constant on classes; "
                "the input square does not commute")
    new_f = Homomorphism(po.apex, beta.dst, tuple(mapping))
    return Point(new_f, po.from_base), po


def _bijectivity_verdict(mapping, src_alg: FinAlgebra, dst_alg: FinAlgebra,
                         dst_pairs=None) -> Verdict:
    seen: dict[int, int] = {}
    for a, b in enumerate(mapping):
        if b in seen:
            return fails({
                "reason": "not-injective",
                "elements": [seen[b], a],
                "element_labels": [src_alg.label(seen[b]), src_alg.label(a)],
            })
        seen[b] = a
    for b in range(dst_alg.size):
        if b not in seen:
            witness = {"reason": "not-surjective", "missing": b,
                       "missing_label": dst_alg.label(b)}
            if dst_pairs is not None:
                witness["pair"] = list(dst_pairs[b])
            return fails(witness)
    return holds()


def check_product_preservation(beta: Homomorphism, pt1: Point, pt2: Point) -> Verdict:
    """Does transporting along beta preserve the binary product of points?"""
    if pt1.base != beta.src or pt2.base != beta.src:
        raise InputError("points are not over the domain of beta")
    if not beta.is_surjective():
        raise InputError("beta must be surjective")
    prod_pt, prod_pb = point_product(pt1, pt2)
    lhs_pt, lhs_po = beta_shriek(prod_pt, beta)
    r1, po1 = beta_shriek(pt1, beta)
    r2, po2 = beta_shriek(pt2, beta)
    rhs = pullback(r1.f, r2.f)
    mapping = [None] * lhs_po.apex.size
    for t, (x1, x2) in enumerate(prod_pb.pairs):
        cls = lhs_po.from_top(t)
        target = rhs.index[(po1.from_top(x1), po2.from_top(x2))]
        if mapping[cls] is None:
            mapping[cls] = target
        elif mapping[cls] != target:
            return fails({
                "reason": "not-well-defined",
                "element": cls,
                "element_labels": [lhs_po.apex.label(cls)],
            })
    return _bijectivity_verdict(mapping, lhs_po.apex, rhs.apex, rhs.pairs)


def beck_chevalley_check(sq: SplitEpiSquare, pt: Point) -> Verdict:
    """Compare transport-then-pullback against pullback-then-transport.

    Left side: pull pt back along f, then transport along alpha.  Right
    side: transport pt along beta, then pull back along g.  The square
    provides the canonical comparison; the verdict is whether it is
    bijective.
    """
    sq.require_surjective()
    if pt.base != sq.left.base:
        raise InputError("point is not over the base of the square")
    fstar_pt, fstar_pb = pullback_point(sq.left.f, pt)
    lhs_pt, lhs_po = beta_shriek(fstar_pt, sq.alpha)
    rhs_pt, rhs_po = beta_shriek(pt, sq.beta)
    rhs = pullback(sq.right.f, rhs_pt.f)
    mapping = [None] * lhs_po.apex.size
    for t, (x, z) in enumerate(fstar_pb.pairs):
        cls = lhs_po.from_top(t)
        target = rhs.index[(sq.alpha(x), rhs_po.from_top(z))]
        if mapping[cls] is None:
            mapping[cls] = target
        elif mapping[cls] != target:
            return fails({
                "reason": "not-well-defined",
                "element": cls,
                "element_labels": [lhs_po.apex.label(cls)],
            })
    return _bijectivity_verdict(mapping, lhs_po.apex, rhs.apex, rhs.pairs)
