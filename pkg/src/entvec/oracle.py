"""Brute-force references for validating the witnesses.

Nothing here is used by the witness engine; these are independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Optional, Sequence

import numpy as np

from .entropy import LINEAR, EntropyVector, Measure, reduction_entropies
from .errors import EntvecError
from .partitions import PartitionFamily
from .tensor import DensityMatrix, PureState, as_density, check_dims, permute_parties

RECON_TOL = 1e-10


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    dims = check_dims(dims)
    v = rng.normal(size=prod(dims)) + 1j * rng.normal(size=prod(dims))
    return PureState(dims, v / np.linalg.norm(v))


def random_density_matrix(dims: Sequence[int], rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Ginibre-distributed mixed state (full rank unless ``rank`` is given)."""
    dims = check_dims(dims)
    total = prod(dims)
    k = total if rank is None else rank
    g = rng.normal(size=(total, k)) + 1j * rng.normal(size=(total, k))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m).real)


@dataclass(frozen=True)
class DecompositionSample:
    weights: np.ndarray
    states: np.ndarray  # rows are normalized pure states
    vector: np.ndarray  # weighted average of the sorted pure-state vectors

    def reconstruction_error(self, rho) -> float:
        m = (self.states.T * self.weights) @ self.states.conj()
        return float(np.linalg.norm(m - as_density(rho).entries))


def sample_decomposition(rho, family: PartitionFamily, isometry: np.ndarray,
                         measure: Measure = LINEAR, rank_tol: float = 1e-12) -> DecompositionSample:
    """Decomposition rho = sum_k p_k |psi_k><psi_k| generated by an isometry.

    With rho = sum_i lam_i |e_i><e_i|, the unnormalized states are
    sum_i V[k, i] sqrt(lam_i) |e_i>. Every decomposition arises this way.
    """
    rho = as_density(rho)
    lam, vec = np.linalg.eigh(rho.entries)
    keep = lam > rank_tol
    lam, vec = lam[keep], vec[:, keep]
    if isometry.shape[1] != lam.size:
        raise EntvecError(f"isometry has {isometry.shape[1]} columns, rho has rank {lam.size}")
    raw = isometry @ (np.sqrt(lam)[:, None] * vec.T)
    weights = np.sum(np.abs(raw) ** 2, axis=1)
    nz = weights > 1e-15
    weights, raw = weights[nz], raw[nz]
    states = raw / np.sqrt(weights)[:, None]
    vectors = np.array([
        np.sort(reduction_entropies(PureState(rho.dims, s, normalized=False), family, measure))[::-1]
        for s in states
    ])
    weights = weights / weights.sum()
    return DecompositionSample(weights, states, weights @ vectors)


def roof_upper_bound(rho, family: PartitionFamily, trials: int = 50, measure: Measure = LINEAR,
                     seed=None) -> EntropyVector:
    """Entrywise minimum over sampled decompositions of the average sorted entropy vector.

    The spectral decomposition is always the first sample; the rest come
    from Haar isometries into rank(rho) + 2 outcomes.
    """
    if trials < 1:
        raise EntvecError("need at least one trial")
    rho = as_density(rho)
    rank = int(np.count_nonzero(np.linalg.eigvalsh(rho.entries) > 1e-12))
    rng = np.random.default_rng(seed)
    best = sample_decomposition(rho, family, np.eye(rank), measure).vector
    for _ in range(trials - 1):
        v = haar_unitary(rank + 2, rng)[:, :rank]
        best = np.minimum(best, sample_decomposition(rho, family, v, measure).vector)
    return EntropyVector(tuple(float(x) for x in best), family, measure)


def random_block_partition(n: int, k: int, rng: np.random.Generator) -> list[list[int]]:
    """Uniform set partition of parties 1..n into exactly k nonempty blocks."""
    if not 1 <= k <= n:
        raise EntvecError(f"k must lie in 1..{n}, got {k}")
    # uniform surjections map k!-to-one onto set partitions
    while True:
        labels = rng.integers(0, k, size=n)
        if len(np.unique(labels)) == k:
            break
    return [[p + 1 for p in range(n) if labels[p] == b] for b in range(k)]


def random_k_separable(dims: Sequence[int], k: int, terms: int, seed=None) -> DensityMatrix:
    """Dirichlet mixture of pure states, each a product over a random k-block partition."""
    dims = check_dims(dims)
    n = len(dims)
    if not 1 <= k <= n:
        raise EntvecError(f"k must lie in 1..{n}, got {k}")
    if terms < 1:
        raise EntvecError("need at least one term")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    total = prod(dims)
    m = np.zeros((total, total), dtype=complex)
    for w in weights:
        blocks = random_block_partition(n, k, rng)
        vec = np.ones(1, dtype=complex)
        for block in blocks:
            vec = np.kron(vec, random_pure_state([dims[p - 1] for p in block], rng).amplitudes)
        order = [p for block in blocks for p in block]
        proj = np.outer(vec, vec.conj())
        m += w * permute_parties(proj, [dims[p - 1] for p in order], [order.index(i + 1) for i in range(n)])
    return DensityMatrix(dims, (m + m.conj().T) / 2)
