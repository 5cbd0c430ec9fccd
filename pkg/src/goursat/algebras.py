"""Finite algebras over a finite signature.

Carriers are ``0..n-1``; an operation table of arity ``k`` is a flat
tuple of ``n**k`` entries in mixed-radix order (last argument fastest).
Products, quotients, subalgebras and congruence generation all use
canonical element encodings so that witnesses reproduce bit-for-bit:
``product`` pairs via ``x * |b| + y``, quotient classes are ordered by
least representative, subalgebra carriers list members ascending.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

from .errors import BudgetExceeded, InputError
from .kernels import close_vectors
from .relations import BinRel, Carrier


@dataclass(frozen=True)
class Signature:
    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.ops]
        if len(set(names)) != len(names):
            raise InputError("duplicate operation names in signature")
        for name, arity in self.ops:
            if arity < 0:
                raise InputError(f"operation {name!r} has negative arity")

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.ops)

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise InputError(f"unknown operation {name!r}") from None


EMPTY_SIGNATURE = Signature(())


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Term:
    head: str
    args: tuple["Term", ...] = ()
    is_var: bool = False

    def size(self) -> int:
        return 1 + sum(a.size() for a in self.args)

    def free_vars(self) -> list[str]:
        seen: list[str] = []

        def walk(t):
            if t.is_var:
                if t.head not in seen:
                    seen.append(t.head)
            else:
                for a in t.args:
                    walk(a)

        walk(self)
        return seen

    def to_sexpr(self):
        if self.is_var:
            return self.head
        return [self.head] + [a.to_sexpr() for a in self.args]

    def __str__(self):
        if self.is_var:
            return self.head
        if not self.args:
            return self.head
        return f"{self.head}({', '.join(str(a) for a in self.args)})"


def var(name: str) -> Term:
    return Term(name, (), True)


def app(op: str, *args: Term) -> Term:
    return Term(op, tuple(args), False)


def term_from_sexpr(obj, sig: Signature) -> Term:
    """Parse ["mul", ["mul", "x1", "x2"], "x3"]-style nested lists.

    A bare string is a variable unless it names an arity-0 operation of
    the signature, in which case it denotes that constant.
    """
    if isinstance(obj, str):
        if sig.arities.get(obj) == 0:
            return app(obj)
        return var(obj)
    if isinstance(obj, list) and obj and isinstance(obj[0], str):
        return app(obj[0], *(term_from_sexpr(a, sig) for a in obj[1:]))
    raise InputError(f"malformed term s-expression: {obj!r}")


def eval_term(t: Term, alg: "FinAlgebra", env: dict[str, int]) -> int:
    if t.is_var:
        try:
            return env[t.head]
        except KeyError:
            raise InputError(f"unbound variable {t.head!r}") from None
    arity = alg.sig.arity(t.head)
    if arity != len(t.args):
        raise InputError(
            f"operation {t.head!r} expects {arity} arguments, got {len(t.args)}")
    args = [eval_term(a, alg, env) for a in t.args]
    return alg.apply(t.head, args)


def term_table(t: Term, alg: "FinAlgebra", varnames) -> tuple[int, ...]:
    """Table of the induced term function over all assignments of varnames.

    Mixed-radix assignment index, last variable fastest; computed
    pointwise bottom-up, one vector per subterm.
    """
    n = alg.size
    v = len(varnames)
    width = n**v
    pos = {name: i for i, name in enumerate(varnames)}

    def walk(t):
        if t.is_var:
            i = pos.get(t.head)
            if i is None:
                raise InputError(f"unbound variable {t.head!r}")
            stride = n ** (v - 1 - i)
            return tuple((idx // stride) % n for idx in range(width))
        arity = alg.sig.arity(t.head)
        if arity != len(t.args):
            raise InputError(
                f"operation {t.head!r} expects {arity} arguments, got {len(t.args)}")
        table = alg.op(t.head)
        if arity == 0:
            return (table[0],) * width
        cols = [walk(a) for a in t.args]
        acc = cols[0]
        for col in cols[1:]:
            acc = tuple(i * n + x for i, x in zip(acc, col))
        return tuple(table[i] for i in acc)

    return walk(t)


# ---------------------------------------------------------------------------
# algebras

@dataclass(frozen=True)
class FinAlgebra:
    name: str
    carrier: Carrier
    sig: Signature
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.carrier.size
        if len(self.tables) != len(self.sig.ops):
            raise InputError("one table per signature operation required")
        for (opname, arity), table in zip(self.sig.ops, self.tables):
            if len(table) != n**arity:
                raise InputError(
                    f"operation {opname!r}: table has {len(table)} entries, "
                    f"expected {n**arity}")
            for i, val in enumerate(table):
                if not (0 <= val < n):
                    raise InputError(
                        f"operation {opname!r}: entry {i} is {val}, "
                        f"outside 0..{n - 1}")

    @property
    def size(self) -> int:
        return self.carrier.size

    @cached_property
    def _op_index(self) -> dict[str, int]:
        return {name: i for i, (name, _) in enumerate(self.sig.ops)}

    def op(self, name: str) -> tuple[int, ...]:
        try:
            return self.tables[self._op_index[name]]
        except KeyError:
            raise InputError(f"unknown operation {name!r}") from None

    def apply(self, name: str, args) -> int:
        table = self.op(name)
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return table[idx]

    @cached_property
    def byte_ops(self) -> list[tuple[int, bytes]]:
        """(arity, flat-table-bytes) per op, for the closure kernels."""
        if self.size > 256:
            raise InputError(f"carrier too large for byte tables: {self.size}")
        return [(arity, bytes(table))
                for (_, arity), table in zip(self.sig.ops, self.tables)]

    def constants(self) -> list[int]:
        return [table[0] for (_, arity), table in zip(self.sig.ops, self.tables)
                if arity == 0]

    def idempotent_elements(self) -> list[int]:
        """Elements e whose singleton {e} is a subalgebra."""
        out = []
        for e in range(self.size):
            if all(table[sum(e * self.size**i for i in range(arity))] == e
                   if arity else table[0] == e
                   for (_, arity), table in zip(self.sig.ops, self.tables)):
                out.append(e)
        return out

    def label(self, i: int) -> str:
        return self.carrier.label(i)


# ---------------------------------------------------------------------------
# homomorphisms

def is_homomorphism(src: FinAlgebra, dst: FinAlgebra, mapping):
    """Full-enumeration check; returns (True, None) or (False, (op, tuple))."""
    if src.sig != dst.sig:
        return False, ("signature", ())
    if len(mapping) != src.size:
        return False, ("length", ())
    if any(not (0 <= y < dst.size) for y in mapping):
        return False, ("range", ())
    for (opname, arity), s_table in zip(src.sig.ops, src.tables):
        d_table = dst.op(opname)
        for flat, args in enumerate(iproduct(range(src.size), repeat=arity)):
            img = 0
            for a in args:
                img = img * dst.size + mapping[a]
            if mapping[s_table[flat]] != d_table[img]:
                return False, (opname, args)
    return True, None


@dataclass(frozen=True)
class Homomorphism:
    src: FinAlgebra
    dst: FinAlgebra
    mapping: tuple[int, ...]

    def __post_init__(self):
        ok, witness = is_homomorphism(self.src, self.dst, self.mapping)
        if not ok:
            raise InputError(
                f"not a homomorphism {self.src.name} -> {self.dst.name}: "
                f"fails at {witness[0]}{witness[1]}")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def then(self, other: "Homomorphism") -> "Homomorphism":
        if self.dst is not other.src and self.dst != other.src:
            raise InputError("cannot compose: middle algebras differ")
        return Homomorphism(self.src, other.dst,
                            tuple(other.mapping[y] for y in self.mapping))

    def is_surjective(self) -> bool:
        return len(set(self.mapping)) == self.dst.size

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == self.src.size

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.mapping)))


def identity_hom(alg: FinAlgebra) -> Homomorphism:
    return Homomorphism(alg, alg, tuple(range(alg.size)))


# ---------------------------------------------------------------------------
# congruences

def _normalize_reps(reps) -> tuple[int, ...]:
    least: dict[int, int] = {}
    for x, r in enumerate(reps):
        if r not in least:
            least[r] = x
    return tuple(least[r] for r in reps)


def compatible_partition_witness(alg: FinAlgebra, reps):
    """None if reps is a compatible partition, else (op, tuple) breaking it.

    Uses the quotient criterion: the class of f(t) must depend only on
    the classes of t.
    """
    for (opname, arity), table in zip(alg.sig.ops, alg.tables):
        expected: dict[tuple[int, ...], int] = {}
        for flat, args in enumerate(iproduct(range(alg.size), repeat=arity)):
            key = tuple(reps[a] for a in args)
            cls = reps[table[flat]]
            prev = expected.setdefault(key, cls)
            if prev != cls:
                return opname, args
    return None


@dataclass(frozen=True)
class Congruence:
    """A compatible partition, stored as least-representative array."""

    alg: FinAlgebra
    reps: tuple[int, ...]

    def __post_init__(self):
        if len(self.reps) != self.alg.size:
            raise InputError("representative array length differs from carrier")
        if self.reps != _normalize_reps(self.reps):
            raise InputError("representative array not in least-element form")

    @staticmethod
    def diagonal(alg: FinAlgebra) -> "Congruence":
        return Congruence(alg, tuple(range(alg.size)))

    @staticmethod
    def full(alg: FinAlgebra) -> "Congruence":
        return Congruence(alg, (0,) * alg.size) if alg.size else Congruence(alg, ())

    @staticmethod
    def from_partition(alg: FinAlgebra, reps) -> "Congruence":
        return Congruence(alg, _normalize_reps(tuple(reps)))

    def contains(self, a: int, b: int) -> bool:
        return self.reps[a] == self.reps[b]

    @cached_property
    def num_classes(self) -> int:
        return len(set(self.reps))

    def blocks(self) -> list[list[int]]:
        by_rep: dict[int, list[int]] = {}
        for x, r in enumerate(self.reps):
            by_rep.setdefault(r, []).append(x)
        return [by_rep[r] for r in sorted(by_rep)]

    def leq(self, other: "Congruence") -> bool:
        return all(other.reps[x] == other.reps[r] for x, r in enumerate(self.reps))

    def meet(self, other: "Congruence") -> "Congruence":
        least: dict[tuple[int, int], int] = {}
        out = []
        for x, key in enumerate(zip(self.reps, other.reps)):
            out.append(least.setdefault(key, x))
        return Congruence(self.alg, tuple(out))

    def join(self, other: "Congruence") -> "Congruence":
        parent = list(range(self.alg.size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in range(self.alg.size):
            for r in (self.reps[x], other.reps[x]):
                rx, rr = find(x), find(r)
                if rx != rr:
                    parent[max(rx, rr)] = min(rx, rr)
        return Congruence(self.alg, _normalize_reps([find(x) for x in parent]))

    def as_binrel(self) -> BinRel:
        masks: dict[int, int] = {}
        for x, r in enumerate(self.reps):
            masks[r] = masks.get(r, 0) | (1 << x)
        return BinRel(self.alg.carrier, self.alg.carrier,
                      tuple(masks[r] for r in self.reps))

    def as_subuniverse(self) -> "SubUniverse":
        """The congruence as a subuniverse of alg x alg (pair encoding
        x * |alg| + y)."""
        n = self.alg.size
        members = tuple(x * n + y for x in range(n) for y in range(n)
                        if self.reps[x] == self.reps[y])
        return SubUniverse(product(self.alg, self.alg), members)

    def is_compatible(self) -> bool:
        return compatible_partition_witness(self.alg, self.reps) is None


def cg(alg: FinAlgebra, pairs) -> Congruence:
    """Least congruence containing the pairs.

    Union-find seeded with the pairs; a worklist replays every merge
    through every operation, one argument position at a time, to a
    fixpoint.
    """
    n = alg.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    work: list[tuple[int, int]] = []

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            work.append((ra, rb))

    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise InputError(f"pair ({a}, {b}) outside the carrier")
        union(a, b)

    positional = [(arity, table) for (_, arity), table in zip(alg.sig.ops, alg.tables)
                  if arity >= 1]
    while work:
        a, b = work.pop()
        for arity, table in positional:
            for pos in range(arity):
                for rest in iproduct(range(n), repeat=arity - 1):
                    ia = ib = 0
                    for j in range(arity):
                        if j == pos:
                            xa, xb = a, b
                        else:
                            xa = xb = rest[j if j < pos else j - 1]
                        ia = ia * n + xa
                        ib = ib * n + xb
                    union(table[ia], table[ib])
    return Congruence(alg, _normalize_reps([find(x) for x in range(n)]))


def kernel_pair(h: Homomorphism) -> Congruence:
    least: dict[int, int] = {}
    out = []
    for x, y in enumerate(h.mapping):
        out.append(least.setdefault(y, x))
    return Congruence(h.src, tuple(out))


# ---------------------------------------------------------------------------
# subalgebras

@dataclass(frozen=True)
class SubUniverse:
    parent: FinAlgebra
    members: tuple[int, ...]

    def as_algebra(self, name: str | None = None):
        return subalgebra(self.parent, self.members,
                          name or f"sub({self.parent.name})")


def subuniverse_generate(alg: FinAlgebra, gens) -> SubUniverse:
    """Least subuniverse containing gens (closed under all ops, constants
    included)."""
    gens = sorted(set(gens))
    for g in gens:
        if not (0 <= g < alg.size):
            raise InputError(f"generator {g} outside the carrier")
    if alg.size <= 256:
        seeds = [bytes([g]) for g in gens]
        vectors, _, complete = close_vectors(alg.size, alg.byte_ops, seeds, width=1)
        assert complete
        members = sorted(v[0] for v in vectors)
        return SubUniverse(alg, tuple(members))
    # generic lane for large carriers
    members = set(gens)
    for (_, arity), table in zip(alg.sig.ops, alg.tables):
        if arity == 0:
            members.add(table[0])
    frontier_set = set(members)
    while frontier_set:
        new = set()
        current = sorted(members)
        for (_, arity), table in zip(alg.sig.ops, alg.tables):
            if arity == 0:
                continue
            for args in iproduct(current, repeat=arity):
                if not any(a in frontier_set for a in args):
                    continue
                idx = 0
                for a in args:
                    idx = idx * alg.size + a
                val = table[idx]
                if val not in members:
                    members.add(val)
                    new.add(val)
        frontier_set = new
    return SubUniverse(alg, tuple(sorted(members)))


def subalgebra(alg: FinAlgebra, members, name: str | None = None):
    """Realize a closed member set as an algebra plus its inclusion."""
    members = tuple(sorted(set(members)))
    index = {x: i for i, x in enumerate(members)}
    m = len(members)
    tables = []
    for (opname, arity), table in zip(alg.sig.ops, alg.tables):
        new_table = []
        for args in iproduct(members, repeat=arity):
            idx = 0
            for a in args:
                idx = idx * alg.size + a
            val = table[idx]
            if val not in index:
                raise InputError(
                    f"member set not closed: {opname}{args} = {val} is outside")
            new_table.append(index[val])
        tables.append(tuple(new_table))
    labels = tuple(alg.label(x) for x in members)
    sub = FinAlgebra(name or f"sub({alg.name})", Carrier(m, labels), alg.sig,
                     tuple(tables))
    inclusion = Homomorphism(sub, alg, members)
    return sub, inclusion


# ---------------------------------------------------------------------------
# products and quotients

def product(a: FinAlgebra, b: FinAlgebra, name: str | None = None) -> FinAlgebra:
    """Direct product; element (x, y) is encoded as x * |b| + y."""
    if a.sig != b.sig:
        raise InputError("product requires a common signature")
    na, nb = a.size, b.size
    n = na * nb
    tables = []
    for (opname, arity), ta in zip(a.sig.ops, a.tables):
        tb = b.op(opname)
        if arity == 0:
            tables.append((ta[0] * nb + tb[0],))
            continue
        table = []
        for args in iproduct(range(n), repeat=arity):
            ia = ib = 0
            for p in args:
                x, y = divmod(p, nb)
                ia = ia * na + x
                ib = ib * nb + y
            table.append(ta[ia] * nb + tb[ib])
        tables.append(tuple(table))
    labels = tuple(f"({a.label(x)},{b.label(y)})"
                   for x in range(na) for y in range(nb))
    return FinAlgebra(name or f"{a.name}x{b.name}", Carrier(n, labels), a.sig,
                      tuple(tables))


def power(alg: FinAlgebra, k: int) -> FinAlgebra:
    if k < 1:
        raise InputError("power expects k >= 1")
    out = alg
    for _ in range(k - 1):
        out = product(out, alg)
    return out


def quotient(alg: FinAlgebra, c: Congruence, check: bool = True):
    """Quotient algebra plus the canonical surjection.

    Classes are ordered by least representative; labels are the
    bracketed representative labels.
    """
    if c.alg != alg:
        raise InputError("congruence belongs to a different algebra")
    if check:
        witness = compatible_partition_witness(alg, c.reps)
        if witness is not None:
            raise InputError(
                f"partition is not compatible: breaks {witness[0]}{witness[1]}")
    class_reps = sorted(set(c.reps))
    index = {r: i for i, r in enumerate(class_reps)}
    proj = tuple(index[r] for r in c.reps)
    m = len(class_reps)
    tables = []
    for (opname, arity), table in zip(alg.sig.ops, alg.tables):
        new_table = []
        for args in iproduct(class_reps, repeat=arity):
            idx = 0
            for a in args:
                idx = idx * alg.size + a
            new_table.append(proj[table[idx]])
        tables.append(tuple(new_table))
    labels = tuple(f"[{alg.label(r)}]" for r in class_reps)
    quot = FinAlgebra(f"{alg.name}/~", Carrier(m, labels), alg.sig, tuple(tables))
    return quot, Homomorphism(alg, quot, proj)


def image_factorize(h: Homomorphism):
    """h = inclusion . surjection through the image subalgebra."""
    members = tuple(sorted(set(h.mapping)))
    img, inclusion = subalgebra(h.dst, members, name=f"im->{h.dst.name}")
    index = {x: i for i, x in enumerate(members)}
    surjection = Homomorphism(h.src, img, tuple(index[y] for y in h.mapping))
    return surjection, inclusion


# ---------------------------------------------------------------------------
# the congruence lattice

@dataclass(frozen=True)
class ConLattice:
    alg: FinAlgebra
    congruences: tuple[Congruence, ...]
    meet_table: tuple[tuple[int, ...], ...]
    join_table: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.congruences)

    def index(self, c: Congruence) -> int:
        return self.congruences.index(c)


def con_lattice(alg: FinAlgebra, max_congruences: int = 10000) -> ConLattice:
    """All congruences: principal ones closed under pairwise join.

    Canonical order: finer first (class count descending), then by
    representative array.  Every quantifier loop downstream iterates in
    this order, which keeps reported witnesses stable.
    """
    found: dict[tuple[int, ...], Congruence] = {}
    diag = Congruence.diagonal(alg)
    found[diag.reps] = diag
    frontier = [diag]
    for a in range(alg.size):
        for b in range(a + 1, alg.size):
            c = cg(alg, [(a, b)])
            if c.reps not in found:
                found[c.reps] = c
                frontier.append(c)
    while frontier:
        if len(found) > max_congruences:
            raise BudgetExceeded(
                f"congruence lattice of {alg.name} exceeds {max_congruences}")
        new = []
        current = list(found.values())
        for c in frontier:
            for d in current:
                j = c.join(d)
                if j.reps not in found:
                    found[j.reps] = j
                    new.append(j)
        frontier = new
    if len(found) > max_congruences:
        raise BudgetExceeded(
            f"congruence lattice of {alg.name} exceeds {max_congruences}")
    congs = sorted(found.values(), key=lambda c: (-c.num_classes, c.reps))
    pos = {c.reps: i for i, c in enumerate(congs)}
    meet_t = []
    join_t = []
    for c in congs:
        meet_t.append(tuple(pos[c.meet(d).reps] for d in congs))
        join_t.append(tuple(pos[c.join(d).reps] for d in congs))
    return ConLattice(alg, tuple(congs), tuple(meet_t), tuple(join_t))


# ---------------------------------------------------------------------------
# brute-force helpers (oracles, universal-property checks)

def enumerate_homs(src: FinAlgebra, dst: FinAlgebra, limit: int | None = None):
    """All homomorphisms src -> dst by backtracking; desk scale only."""
    n = src.size
    out: list[Homomorphism] = []
    mapping = [0] * n

    def extend(i):
        if limit is not None and len(out) >= limit:
            return
        if i == n:
            ok, _ = is_homomorphism(src, dst, mapping)
            if ok:
                out.append(Homomorphism(src, dst, tuple(mapping)))
            return
        for y in range(dst.size):
            mapping[i] = y
            if _partial_ok(src, dst, mapping, i):
                extend(i + 1)

    def _partial_ok(src, dst, mapping, upto):
        for (opname, arity), table in zip(src.sig.ops, src.tables):
            for args in iproduct(range(upto + 1), repeat=arity):
                idx = 0
                for a in args:
                    idx = idx * n + a
                val = table[idx]
                if val > upto:
                    continue
                img = 0
                for a in args:
                    img = img * dst.size + mapping[a]
                if mapping[val] != dst.op(opname)[img]:
                    return False
        return True

    extend(0)
    return out


def all_partitions(n: int):
    """All partitions of range(n) as least-representative arrays."""
    if n == 0:
        yield ()
        return
    reps = [0] * n

    def extend(i, blocks):
        if i == n:
            yield tuple(reps)
            return
        for b in blocks:
            reps[i] = b
            yield from extend(i + 1, blocks)
        reps[i] = i
        yield from extend(i + 1, blocks + [i])

    yield from extend(1, [0])
