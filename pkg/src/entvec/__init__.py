"""Entropy-vector witnesses for multipartite entanglement structure.

Detects non-decomposability, k-separability, entanglement depth and
entanglement dimensionality of small multi-qudit density matrices from a
handful of density-matrix entries, with a local-filtering normal form to
sharpen detection.
"""

from .entropy import (
    EntropyVector, dimension_from_witness, entropy_vector_pure, linear_entropy, renyi_entropy,
    s2_bound_from_witness,
)
from .errors import EntvecError, InvariantViolation, NoAdmissiblePairs, ParseError, SingularMarginal
from .normalform import FilterSet, apply_filters, marginal_flatness, normal_form
from .partitions import (
    PartitionFamily, all_bipartitions, depth_family, gamma, parse_family, single_parties,
    subsets_of_size, swap_pair,
)
from .tensor import (
    DensityMatrix, PureState, hermitian_spectrum, inv_sqrt_psd, normalize, partial_trace,
    tensor_product,
)
from .witness import (
    PairSet, WitnessResult, coherence_budget, dimensionality_vector_bound, entanglement_depth,
    k_separability_scan, not_decomposable, select_pairs, witness,
)

__version__ = "0.1.0"
