"""Backend selection and the shared closure driver.

The compiled extension is preferred when present; set ``GOURSAT_PURE=1``
to force the pure-Python lane (the benchmark and the cross-lane tests
use this).
"""

import os

if os.environ.get("GOURSAT_PURE"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
compose_bits = _impl.compose_bits
transitive_closure_bits = _impl.transitive_closure_bits
expand_layer = _impl.expand_layer

DEFAULT_CAP = 10**6
DEFAULT_APP_BUDGET = 2 * 10**7


def close_vectors(size, ops, seeds, cap=DEFAULT_CAP, app_budget=DEFAULT_APP_BUDGET,
                  on_layer=None, width=None):
    """Close the seed vectors under pointwise operations, layer by layer.

    ``ops`` is a list of ``(arity, flat-table-bytes)``; seeds and results
    are byte vectors.  Returns ``(vectors, parents, complete)`` where
    ``parents[i]`` is ``None`` for a seed and ``(op_index, arg_tuple)``
    otherwise (argument indices refer to earlier vectors), and
    ``complete`` means a fixpoint was reached within the budgets.

    ``on_layer(new_start, vectors, parents)`` is called after each layer;
    returning a truthy value stops the generation early (reported as
    incomplete, since the closure was not exhausted).

    ``width`` is only needed when ``seeds`` may be empty: the layer step
    infers the vector width from the first seed, so constants of
    nullary operations are seeded here explicitly in that case.
    """
    vectors = []
    parents = []
    known = set()
    for s in seeds:
        if s not in known:
            known.add(s)
            vectors.append(s)
            parents.append(None)
    if not vectors:
        if width is None:
            raise ValueError("width required when no seeds are given")
        for opi, (arity, table) in enumerate(ops):
            if arity == 0:
                s = bytes([table[0]]) * width
                if s not in known:
                    known.add(s)
                    vectors.append(s)
                    parents.append((opi, ()))
    if len(vectors) >= cap:
        return vectors, parents, False
    if on_layer is not None and on_layer(0, vectors, parents):
        return vectors, parents, False
    frontier_start = 0
    budget = app_budget
    while True:
        m_before = len(vectors)
        new, newpar, truncated, apps = expand_layer(
            size, ops, vectors, known, frontier_start, cap, budget)
        budget -= apps
        vectors.extend(new)
        parents.extend(newpar)
        frontier_start = m_before
        if truncated:
            return vectors, parents, False
        if not new:
            return vectors, parents, True
        if on_layer is not None and on_layer(m_before, vectors, parents):
            return vectors, parents, False
