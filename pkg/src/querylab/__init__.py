"""Exact query-complexity measures for small Boolean functions."""

from .boolfn import (
    Block,
    MultilinearPoly,
    PartialAssignment,
    SpecError,
    TruthTable,
    parse_spec,
    to_polynomial,
)
from .measures import (
    approximate_degree,
    block_sensitivity,
    certificate_complexity,
    construct_ndeg_witness,
    degree,
    deterministic_complexity,
    measure_report,
    nondeterministic_degree,
    sensitivity,
)
from .derandomize import derandomize, extract_tree, value_f
from .amplify import amplify_zero_error, builtin_algorithms, repetitions_needed
from .atlas import atlas, verify

__version__ = "0.1.0"
