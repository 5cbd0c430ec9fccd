"""Pure-Python bit kernels.

Compiled twin: ``goursat._kernels`` (Cython).  Both lanes implement the
same three entry points with identical semantics and identical output
order, so results never depend on which backend got imported.

Representation conventions:
  * a binary relation row is a Python int used as a bit mask
    (bit ``y`` of ``rows[x]`` set  <=>  the pair ``(x, y)`` is present);
  * a carrier vector (clone/subuniverse element) is a ``bytes`` object,
    one byte per coordinate, which caps carriers at 256 elements -- the
    closure callers stay far below that;
  * an operation table is flat ``bytes`` in mixed-radix order, last
    argument fastest.
"""

from itertools import product

BACKEND = "python"


def compose_bits(rows_r, rows_s, n_out):
    """Boolean matrix product: (x,z) iff some y with x->y in r and y->z in s."""
    out = []
    for row in rows_r:
        acc = 0
        while row:
            low = row & -row
            acc |= rows_s[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return out


def transitive_closure_bits(rows):
    rows = list(rows)
    n = len(rows)
    for k in range(n):
        bit = 1 << k
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rows[k]
    return rows


def _arg_tuples(m, start, arity):
    # all tuples in range(m)^arity with max(tuple) >= start, lex order
    if arity == 1:
        for i in range(start, m):
            yield (i,)
        return
    if arity == 2:
        for i in range(m):
            for j in range(start if i < start else 0, m):
                yield (i, j)
        return
    for first in range(m):
        if first >= start:
            for rest in product(range(m), repeat=arity - 1):
                yield (first,) + rest
        else:
            for rest in _arg_tuples(m, start, arity - 1):
                yield (first,) + rest


def expand_layer(size, ops, vectors, known, frontier_start, cap, app_budget):
    """One BFS layer of pointwise closure under the given operations.

    Applies every op to every argument tuple of current ``vectors`` that
    touches the frontier (index >= ``frontier_start``), in canonical
    order: ops in signature order, argument tuples lexicographic.
    New vectors are deduplicated against ``known`` (mutated in place).

    Returns ``(new_vectors, new_parents, truncated, apps)`` where
    ``new_parents[i]`` is ``(op_index, arg_tuple)``, and ``truncated``
    reports that the vector cap or the application budget stopped the
    scan early (so the closure must be treated as incomplete).
    """
    if size > 256:
        raise ValueError(f"carrier too large for byte vectors: {size}")
    if any(op[0] > 16 for op in ops):
        raise ValueError("operation arity above 16 unsupported")
    m = len(vectors)
    width = len(vectors[0]) if vectors else 0
    new_vecs = []
    new_parents = []
    apps = 0
    total = len(known)
    for opi, (arity, table) in enumerate(ops):
        if arity == 0:
            if frontier_start > 0:
                continue
            apps += 1
            cand = bytes([table[0]]) * width
            if cand not in known:
                known.add(cand)
                new_vecs.append(cand)
                new_parents.append((opi, ()))
                total += 1
                if total >= cap:
                    return new_vecs, new_parents, True, apps
            continue
        if arity == 1:
            trans = bytes(table) + bytes(256 - size)
            for i in range(frontier_start, m):
                if apps >= app_budget:
                    return new_vecs, new_parents, True, apps
                apps += 1
                cand = vectors[i].translate(trans)
                if cand not in known:
                    known.add(cand)
                    new_vecs.append(cand)
                    new_parents.append((opi, (i,)))
                    total += 1
                    if total >= cap:
                        return new_vecs, new_parents, True, apps
            continue
        for args in _arg_tuples(m, frontier_start, arity):
            if apps >= app_budget:
                return new_vecs, new_parents, True, apps
            apps += 1
            if arity == 2:
                va = vectors[args[0]]
                vb = vectors[args[1]]
                cand = bytes([table[x * size + y] for x, y in zip(va, vb)])
            else:
                vs = [vectors[a] for a in args]
                idx = list(vs[0])
                for v in vs[1:]:
                    idx = [i * size + x for i, x in zip(idx, v)]
                cand = bytes([table[i] for i in idx])
            if cand not in known:
                known.add(cand)
                new_vecs.append(cand)
                new_parents.append((opi, args))
                total += 1
                if total >= cap:
                    return new_vecs, new_parents, True, apps
    return new_vecs, new_parents, False, apps
