"""Workbench for 2-/3-permutability of finite algebras.

Decides and witnesses congruence permutability, modularity and the
shifting lemma; synthesizes Mal'tsev and Hagemann-Mitschke terms from
generated clones; checks kernel-pair, cube, product-preservation and
Beck-Chevalley comparisons for diagrams of split epimorphisms; and
computes Birkhoff-style reflections and Galois pregroupoids.
"""

from .algebras import (Congruence, FinAlgebra, Homomorphism, Signature,
                       SubUniverse, Term, app, cg, con_lattice, eval_term,
                       identity_hom, image_factorize, is_homomorphism,
                       kernel_pair, product, power, quotient, subalgebra,
                       subuniverse_generate, term_from_sexpr, term_table, var)
from .errors import BudgetExceeded, InputError
from .kernels import BACKEND
from .relations import BinRel, Carrier
from .verdicts import Budget, Verdict

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BinRel", "Budget", "BudgetExceeded", "Carrier", "Congruence",
    "FinAlgebra", "Homomorphism", "InputError", "Signature", "SubUniverse",
    "Term", "Verdict", "app", "cg", "con_lattice", "eval_term", "identity_hom",
    "image_factorize", "is_homomorphism", "kernel_pair", "power", "product",
    "quotient", "subalgebra", "subuniverse_generate", "term_from_sexpr",
    "term_table", "var",
]
