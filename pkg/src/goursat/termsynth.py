"""Clone slices and ternary term synthesis.

The k-generated free algebra of the variety generated by a finite
algebra A is realized concretely: its elements are the k-ary term
functions of A, i.e. byte vectors of length |A|**k closed pointwise
under the operations, generated by BFS from the projections.  A
Mal'tsev term is a ternary p with p(x,y,y)=x and p(x,x,y)=y; a
Hagemann-Mitschke pair is (r, s) with r(x,y,y)=x, r(x,x,y)=s(x,y,y)
and s(x,x,y)=y.

Soundness convention: a successful synthesis is sound regardless of
whether generation ran to a fixpoint; "no such term" is sound only when
``complete`` is set (for 2-element algebras the ternary clone has at
most 256 members, so generation always completes there).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .algebras import FinAlgebra, Homomorphism, Signature, Term, app, eval_term, var
from .errors import InputError
from .kernels import DEFAULT_APP_BUDGET, DEFAULT_CAP, close_vectors
from .relations import Carrier
from . import diagrams
from .verdicts import Verdict, fails, holds, inconclusive


@dataclass(frozen=True)
class TermFunction:
    """A k-ary operation table plus one term that derives it.

    Table index is mixed-radix over the arguments, last argument
    fastest.
    """

    arity: int
    table: tuple[int, ...]
    derivation: Term

    def size(self) -> int:
        return self.derivation.size()


@dataclass(frozen=True)
class FreeAlgebraK:
    base: FinAlgebra
    k: int
    functions: tuple[TermFunction, ...]
    generation_complete: bool

    @cached_property
    def by_table(self) -> dict[tuple[int, ...], TermFunction]:
        return {f.table: f for f in self.functions}


def projection_vectors(n: int, k: int) -> list[bytes]:
    out = []
    for i in range(k):
        stride = n ** (k - 1 - i)
        out.append(bytes((t // stride) % n for t in range(n**k)))
    return out


class _CloneRun:
    """Canonical BFS over k-ary term functions with derivation tracking."""

    def __init__(self, base: FinAlgebra, k: int, cap: int, app_budget: int):
        if k < 1:
            raise InputError("free algebra generation needs k >= 1")
        if base.size > 256:
            raise InputError(f"carrier too large for clone search: {base.size}")
        self.base = base
        self.k = k
        self.cap = cap
        self.app_budget = app_budget
        self.seed_names: list[str] = []
        seeds = []
        seen = set()
        for i, vec in enumerate(projection_vectors(base.size, k)):
            if vec not in seen:
                seen.add(vec)
                seeds.append(vec)
                self.seed_names.append(f"x{i + 1}")
        self.seeds = seeds
        self.vectors: list[bytes] = []
        self.parents: list = []
        self.complete = False
        self._derivs: dict[int, Term] = {}
        self._sizes: dict[int, int] = {}

    def run(self, on_new=None):
        """Generate; ``on_new(index)`` may return truthy to stop early."""

        def on_layer(start, vectors, parents):
            self.vectors = vectors
            self.parents = parents
            if on_new is None:
                return False
            for idx in range(start, len(vectors)):
                if on_new(idx):
                    return True
            return False

        self.vectors, self.parents, self.complete = close_vectors(
            self.base.size, self.base.byte_ops, self.seeds,
            cap=self.cap, app_budget=self.app_budget,
            on_layer=on_layer, width=self.base.size**self.k)
        return self

    def derivation(self, idx: int) -> Term:
        cached = self._derivs.get(idx)
        if cached is not None:
            return cached
        parent = self.parents[idx]
        if parent is None:
            t = var(self.seed_names[idx])
        else:
            opi, args = parent
            opname = self.base.sig.ops[opi][0]
            t = app(opname, *(self.derivation(a) for a in args))
        self._derivs[idx] = t
        return t

    def deriv_size(self, idx: int) -> int:
        cached = self._sizes.get(idx)
        if cached is not None:
            return cached
        parent = self.parents[idx]
        if parent is None:
            s = 1
        else:
            _, args = parent
            s = 1 + sum(self.deriv_size(a) for a in args)
        self._sizes[idx] = s
        return s

    def term_function(self, idx: int) -> TermFunction:
        return TermFunction(self.k, tuple(self.vectors[idx]), self.derivation(idx))


def generate_free_algebra(base: FinAlgebra, k: int, cap: int = DEFAULT_CAP,
                          app_budget: int = DEFAULT_APP_BUDGET) -> FreeAlgebraK:
    """BFS the k-ary term functions of base to a fixpoint (or the cap).

    Output order is canonical: functions sorted lexicographically by
    table, independent of generation schedule.
    """
    run = _CloneRun(base, k, cap, app_budget).run()
    funcs = [run.term_function(i) for i in range(len(run.vectors))]
    funcs.sort(key=lambda f: f.table)
    return FreeAlgebraK(base, k, tuple(funcs), run.complete)


@dataclass(frozen=True)
class SynthResult:
    """Outcome of a term search.

    ``found`` carries the synthesized function(s); when it is None,
    ``complete`` tells whether "no such term exists in the variety
    generated by the input" is a sound conclusion or just a budget
    truncation.
    """

    found: object
    complete: bool
    scanned: int


def _maltsev_ok(vec, n: int) -> bool:
    for a in range(n):
        an = a * n
        for b in range(n):
            if vec[(an + b) * n + b] != a:   # p(a,b,b) = a
                return False
            if vec[(an + a) * n + b] != b:   # p(a,a,b) = b
                return False
    return True


def _is_r_candidate(vec, n: int) -> bool:
    return all(vec[(a * n + b) * n + b] == a for a in range(n) for b in range(n))


def _is_s_candidate(vec, n: int) -> bool:
    return all(vec[(a * n + a) * n + b] == b for a in range(n) for b in range(n))


def _trace_xxy(vec, n: int) -> tuple[int, ...]:
    return tuple(vec[(a * n + a) * n + b] for a in range(n) for b in range(n))


def _trace_xyy(vec, n: int) -> tuple[int, ...]:
    return tuple(vec[(a * n + b) * n + b] for a in range(n) for b in range(n))


def find_maltsev(base: FinAlgebra, cap: int = DEFAULT_CAP,
                 app_budget: int = DEFAULT_APP_BUDGET) -> SynthResult:
    """Scan the ternary clone for p with p(x,y,y)=x and p(x,x,y)=y."""
    n = base.size
    run = _CloneRun(base, 3, cap, app_budget)
    hit: list[int] = []

    def on_new(idx):
        if _maltsev_ok(run.vectors[idx] if run.vectors else run.seeds[idx], n):
            hit.append(idx)
            return True
        return False

    run.run(on_new=on_new)
    if hit:
        return SynthResult(run.term_function(hit[0]), run.complete, len(run.vectors))
    return SynthResult(None, run.complete, len(run.vectors))


def find_hm_pair(base: FinAlgebra, cap: int = DEFAULT_CAP,
                 app_budget: int = DEFAULT_APP_BUDGET) -> SynthResult:
    """Hash-join search for a Hagemann-Mitschke pair (r, s).

    r-candidates (r(x,y,y)=x) are keyed by the binary trace of
    r(x,x,y); s-candidates (s(x,x,y)=y) by the trace of s(x,y,y); a key
    match is exactly the middle identity r(x,x,y)=s(x,y,y).  The first
    pair completed in canonical BFS order wins; among partners the
    least (derivation size, table) is kept.
    """
    n = base.size
    run = _CloneRun(base, 3, cap, app_budget)
    r_by_key: dict[tuple[int, ...], int] = {}
    s_by_key: dict[tuple[int, ...], int] = {}
    found: list[tuple[int, int]] = []

    def better(i, j):
        ki = (run.deriv_size(i), run.vectors[i])
        kj = (run.deriv_size(j), run.vectors[j])
        return i if ki <= kj else j

    def on_new(idx):
        vec = run.vectors[idx]
        candidates = []
        if _is_r_candidate(vec, n):
            partner = s_by_key.get(_trace_xxy(vec, n))
            if partner is not None:
                candidates.append((idx, partner))
        if _is_s_candidate(vec, n):
            partner = r_by_key.get(_trace_xyy(vec, n))
            if partner is not None:
                candidates.append((partner, idx))
        if candidates:
            best = min(candidates, key=lambda rs: (
                run.deriv_size(rs[0]) + run.deriv_size(rs[1]),
                run.vectors[rs[0]], run.vectors[rs[1]]))
            found.append(best)
            return True
        if _is_r_candidate(vec, n):
            key = _trace_xxy(vec, n)
            old = r_by_key.get(key)
            r_by_key[key] = idx if old is None else better(idx, old)
        if _is_s_candidate(vec, n):
            key = _trace_xyy(vec, n)
            old = s_by_key.get(key)
            s_by_key[key] = idx if old is None else better(idx, old)
        return False

    run.run(on_new=on_new)
    if found:
        r, s = found[0]
        pair = (run.term_function(r), run.term_function(s))
        return SynthResult(pair, run.complete, len(run.vectors))
    return SynthResult(None, run.complete, len(run.vectors))


def verify_hm_identities(r: TermFunction, s: TermFunction, n: int) -> bool:
    return (_is_r_candidate(r.table, n) and _is_s_candidate(s.table, n)
            and _trace_xxy(r.table, n) == _trace_xyy(s.table, n))


# ---------------------------------------------------------------------------
# the free-algebra cube

def clone_algebra(free: FreeAlgebraK, name: str | None = None) -> FinAlgebra:
    """Realize a complete clone slice as a finite algebra acting pointwise."""
    if not free.generation_complete:
        raise InputError("clone algebra needs a complete generation")
    funcs = free.functions
    index = {f.table: i for i, f in enumerate(funcs)}
    n = free.base.size
    tables = []
    for (opname, arity), table in zip(free.base.sig.ops, free.base.tables):
        entries = []
        if arity == 0:
            const = (table[0],) * (n**free.k)
            entries.append(index[const])
        else:
            idxs = [0] * arity
            while True:
                cols = [funcs[i].table for i in idxs]
                acc = cols[0]
                for col in cols[1:]:
                    acc = tuple(i * n + x for i, x in zip(acc, col))
                entries.append(index[tuple(table[i] for i in acc)])
                j = arity - 1
                while j >= 0:
                    idxs[j] += 1
                    if idxs[j] < len(funcs):
                        break
                    idxs[j] = 0
                    j -= 1
                if j < 0:
                    break
        tables.append(tuple(entries))
    labels = tuple(str(f.derivation) for f in funcs)
    return FinAlgebra(name or f"{free.k}-clone({free.base.name})",
                      Carrier(len(funcs), labels), free.base.sig, tuple(tables))


@dataclass(frozen=True)
class RemarkCubeReport:
    """Surjectivity report for the codiagonal cube on clone algebras."""

    complete: bool
    lambda_verdict: Verdict | None
    fiber_nonempty: bool | None
    fiber_pair: tuple[Term, Term] | None
    hm_agrees: bool | None
    sizes: dict


def remark_cube_report(base: FinAlgebra, cap: int = DEFAULT_CAP,
                       app_budget: int = DEFAULT_APP_BUDGET) -> RemarkCubeReport:
    """Build the cube of codiagonal maps on the 1-, 2- and 3-generated
    clone algebras, check that the pullback comparison onto the kernel
    pair of the codiagonal is surjective, and inspect the fiber over the
    projection pair -- nonempty exactly when a Hagemann-Mitschke pair
    exists, which is cross-checked against the direct search.
    """
    n = base.size
    free1 = generate_free_algebra(base, 1, cap, app_budget)
    free2 = generate_free_algebra(base, 2, cap, app_budget)
    free3 = generate_free_algebra(base, 3, cap, app_budget)
    if not (free1.generation_complete and free2.generation_complete
            and free3.generation_complete):
        return RemarkCubeReport(False, None, None, None, None, {})
    x1 = clone_algebra(free1)
    x2 = clone_algebra(free2)
    x3 = clone_algebra(free3)
    idx1 = {f.table: i for i, f in enumerate(free1.functions)}
    idx2 = {f.table: i for i, f in enumerate(free2.functions)}
    idx3 = {f.table: i for i, f in enumerate(free3.functions)}

    def mapping3to2(extract):
        return tuple(idx2[extract(f.table)] for f in free3.functions)

    def tr_xyy(t):
        return tuple(t[(a * n + b) * n + b] for a in range(n) for b in range(n))

    def tr_xxy(t):
        return tuple(t[(a * n + a) * n + b] for a in range(n) for b in range(n))

    one_plus_nabla = Homomorphism(x3, x2, mapping3to2(tr_xyy))
    nabla_plus_one = Homomorphism(x3, x2, mapping3to2(tr_xxy))
    nabla = Homomorphism(x2, x1, tuple(
        idx1[tuple(f.table[a * n + a] for a in range(n))] for f in free2.functions))
    sec23 = Homomorphism(x2, x3, tuple(
        idx3[tuple(f.table[b * n + c]
                   for a in range(n) for b in range(n) for c in range(n))]
        for f in free2.functions))
    sec12 = Homomorphism(x2, x3, tuple(
        idx3[tuple(f.table[a * n + b]
                   for a in range(n) for b in range(n) for c in range(n))]
        for f in free2.functions))
    sec_y = Homomorphism(x1, x2, tuple(
        idx2[tuple(f.table[b] for a in range(n) for b in range(n))]
        for f in free1.functions))
    sec_x = Homomorphism(x1, x2, tuple(
        idx2[tuple(f.table[a] for a in range(n) for b in range(n))]
        for f in free1.functions))

    front = diagrams.SplitEpiSquare(
        left=diagrams.Point(nabla_plus_one, sec23),
        right=diagrams.Point(nabla, sec_y),
        alpha=one_plus_nabla, beta=nabla)
    back = diagrams.SplitEpiSquare(
        left=diagrams.Point(one_plus_nabla, sec12),
        right=diagrams.Point(nabla, sec_x),
        alpha=nabla_plus_one, beta=nabla)
    cube = diagrams.Cube(front, back)
    lam = diagrams.cube_lambda_check(cube)

    proj1 = idx2[tuple(a for a in range(n) for _ in range(n))]
    proj2 = idx2[tuple(b for _ in range(n) for b in range(n))]
    fiber_pair = None
    s_by_key: dict[tuple[int, ...], int] = {}
    for i, f in enumerate(free3.functions):
        if nabla_plus_one.mapping[i] == proj2:        # s(x,x,y) = y
            s_by_key.setdefault(tr_xyy(f.table), i)
    for i, f in enumerate(free3.functions):
        if one_plus_nabla.mapping[i] == proj1:        # r(x,y,y) = x
            partner = s_by_key.get(tr_xxy(f.table))   # r(x,x,y) = s(x,y,y)
            if partner is not None:
                fiber_pair = (free3.functions[i].derivation,
                              free3.functions[partner].derivation)
                break
    hm = find_hm_pair(base, cap, app_budget)
    agrees = (fiber_pair is not None) == (hm.found is not None)
    sizes = {"X": x1.size, "2X": x2.size, "3X": x3.size}
    return RemarkCubeReport(True, lam, fiber_pair is not None, fiber_pair,
                            agrees, sizes)
