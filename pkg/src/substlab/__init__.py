"""substlab: integer substitution systems, brute-force oracles and CNF probes."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .exact import (  # noqa: F401
    IntMatrix,
    adjugate,
    bareiss,
    det,
    integer_inverse,
    minor_bound_check,
    size_matrix,
    size_scalar,
    size_vector,
)
from .subst import (  # noqa: F401
    EliminationTrace,
    PolyBound,
    SubstInstance,
    SubstSystem,
    back_substitute,
    derive_boxes,
    forward_eliminate,
    generate_descending,
    generate_note1,
    instance_for,
    intermediate_size_check,
    r2_normalize,
    size_bound_check,
    verify_cardinality_link,
    verify_r1,
)
from .oracle import (  # noqa: F401
    build_table,
    enum_x,
    enum_y_bruteforce,
    independence_witness,
    throughput_report,
    tighten_L1,
    verify_bijection,
)
from .cnf import (  # noqa: F401
    CardinalitySpec,
    CnfFormula,
    dpll,
    encode_cpp,
    equiv_check,
    from_dimacs,
    min_cnf_growth,
    prime_implicates_cardinality,
    to_dimacs,
    transposition_check,
)
