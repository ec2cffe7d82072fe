"""Exact sweeping of filtered 2-dimensional Novikov complexes over Z((t))."""

from .cancellation import detect_orbits, flow_family, pivots_agree, run_rca
from .complex import (
    FilteredComplex,
    IndexPartition,
    NovikovMatrix,
    classify_column,
    classify_row,
    generate_example,
    parse_complex,
    random_complex,
    render_complex,
    validate_differential,
)
from .ring import LaurentPoly, NovikovScalar, classify_scalar, is_unit, parse_poly, parse_scalar, truncate_series
from .spectral import compute_sequence, cycle_generators, page_differential, page_module, verify_convergence
from .sssa import check_block_invariants, check_final_matrix, check_sweep, run_sssa

__version__ = "0.1.0"
