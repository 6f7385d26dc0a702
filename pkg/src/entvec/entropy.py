"""Renyi and linear entropies, pure-state entropy vectors, witness conversions.

Two unit systems are used and never mixed: Renyi entropies in bits, and the
linear entropy S_L = sqrt(2 (1 - Tr rho^2)). ``EntropyVector.measure`` records
which one a vector carries.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2, sqrt
from typing import Union

import numpy as np

from .errors import EntvecError
from .partitions import PartitionFamily
from .tensor import DensityMatrix, PureState, as_density, hermitian_spectrum, partial_trace

LINEAR = "linear"
Measure = Union[float, str]

RANK_TOL = 1e-8
# keeps w exactly at sqrt(2(1-1/d)) from rounding up to d+1
STEP_GUARD = 1e-12
# eigenvalues below this are rounding noise; for alpha < 1 they would add
# lam**alpha >> lam to the sum
NOISE_FLOOR = 1e-13


def renyi_entropy(rho, alpha: float, rank_tol: float = RANK_TOL) -> float:
    """Renyi-alpha entropy in bits; alpha=0 counts eigenvalues above rank_tol."""
    if alpha < 0:
        raise EntvecError(f"Renyi order must be >= 0, got {alpha}")
    lam = np.clip(hermitian_spectrum(as_density(rho)), 0.0, None)
    if alpha == 0:
        return log2(int(np.count_nonzero(lam > rank_tol)))
    lam = lam[lam > NOISE_FLOOR]
    if alpha == 1:
        return float(max(-np.sum(lam * np.log2(lam)), 0.0))
    if np.isinf(alpha):
        return float(-log2(lam[0]))
    return float(max(log2(float(np.sum(lam ** alpha))) / (1 - alpha), 0.0))


def purity(rho) -> float:
    m = as_density(rho).entries
    return float(np.vdot(m, m).real)


def linear_entropy(rho) -> float:
    """S_L = sqrt(2 (1 - Tr rho^2))."""
    return sqrt(max(2.0 * (1.0 - purity(rho)), 0.0))


def linear_to_s2(s_lin: float) -> float:
    """Exact conversion for a single state: S_2 = -log2(1 - S_L^2 / 2)."""
    return -log2(max(1.0 - s_lin * s_lin / 2.0, 1e-300))


def _entropy(rho: DensityMatrix, measure: Measure) -> float:
    if measure == LINEAR:
        return linear_entropy(rho)
    return renyi_entropy(rho, float(measure))


@dataclass(frozen=True)
class EntropyVector:
    values: tuple[float, ...]
    family: PartitionFamily
    measure: Measure

    def __post_init__(self):
        if len(self.values) != len(self.family):
            raise EntvecError("entropy vector length differs from its family")

    def __getitem__(self, j):
        return self.values[j]

    def __len__(self):
        return len(self.values)


def reduction_entropies(psi, family: PartitionFamily, measure: Measure = LINEAR) -> np.ndarray:
    """Unsorted entropies of the reductions rho_r, in family order."""
    rho = as_density(psi)
    if family.n != rho.n_parties:
        raise EntvecError(f"family is for {family.n} parties, state has {rho.n_parties}")
    return np.array([_entropy(partial_trace(rho, r), measure) for r in family])


def entropy_vector_pure(psi: PureState, family: PartitionFamily, measure: Measure = LINEAR) -> EntropyVector:
    """Reduction entropies over ``family``, sorted non-increasing."""
    if not isinstance(psi, PureState):
        raise TypeError("entropy_vector_pure expects a PureState")
    vals = np.sort(reduction_entropies(psi, family, measure))[::-1]
    return EntropyVector(tuple(float(v) for v in vals), family, measure)


def _check_witness_value(w: float) -> None:
    if w >= sqrt(2.0):
        raise EntvecError(f"witness value {w!r} >= sqrt(2) is impossible for a valid state")


def s2_bound_from_witness(w: float) -> float:
    """Lower bound on the Renyi-2 entry certified by a linear-entropy witness."""
    _check_witness_value(w)
    if w <= 0:
        return 0.0
    return linear_to_s2(w)


def dimension_from_witness(w: float) -> int:
    """Smallest d whose linear-entropy ceiling sqrt(2(1 - 1/d)) reaches w."""
    _check_witness_value(w)
    if w <= 0:
        return 1
    return max(1, ceil(1.0 / (1.0 - w * w / 2.0) - STEP_GUARD))


def linear_entropy_ceiling(d: int) -> float:
    return sqrt(2.0 * (1.0 - 1.0 / d))
