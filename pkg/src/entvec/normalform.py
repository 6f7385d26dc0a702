"""Local filtering and the normal form with maximally mixed single-party marginals."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import EntvecError, InvariantViolation
from .tensor import DensityMatrix, as_density, inv_sqrt_psd, partial_trace

log = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class FilterSet:
    """One invertible operator per party, each scaled to |det| = 1."""

    operators: tuple[np.ndarray, ...]
    steps: int = 0
    flatness: float = float("nan")
    converged: bool = True

    @classmethod
    def identity(cls, dims: Sequence[int]) -> FilterSet:
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))

    def condition_numbers(self) -> list[float]:
        return [float(np.linalg.cond(a)) for a in self.operators]


def _det_normalized(a: np.ndarray) -> np.ndarray:
    det = abs(np.linalg.det(a))
    if not np.isfinite(det) or det == 0:
        raise EntvecError("filter is not invertible")
    return a / det ** (1.0 / a.shape[0])


def _apply_local(m: np.ndarray, dims, party: int, a: np.ndarray) -> np.ndarray:
    """(A on party) m (A on party)^dag without forming the full Kronecker product."""
    n = len(dims)
    t = m.reshape(dims + dims)
    t = np.moveaxis(np.tensordot(a, t, axes=([1], [party])), 0, party)
    t = np.moveaxis(np.tensordot(t, a.conj(), axes=([n + party], [1])), -1, n + party)
    return t.reshape(m.shape)


def apply_filters(rho, filters: FilterSet) -> DensityMatrix:
    """(⊗A_i) rho (⊗A_i)^dag, renormalized to unit trace."""
    rho = as_density(rho)
    ops = filters.operators
    if len(ops) != rho.n_parties or any(a.shape != (d, d) for a, d in zip(ops, rho.dims)):
        raise EntvecError(f"filter shapes {[a.shape for a in ops]} do not match dims {rho.dims}")
    m = rho.entries
    for i, a in enumerate(ops):
        m = _apply_local(m, rho.dims, i, a)
    tr = float(np.trace(m).real)
    if tr <= 1e-14:
        raise InvariantViolation("trace", "filtered operator has zero trace")
    m = m / tr
    return DensityMatrix(rho.dims, (m + m.conj().T) / 2, check=False)


def marginal_flatness(rho) -> float:
    """max_i ||rho_i - I/d_i||_F over single-party marginals."""
    rho = as_density(rho)
    worst = 0.0
    for i, d in enumerate(rho.dims, start=1):
        red = partial_trace(rho, [i]).entries / rho.trace()
        worst = max(worst, float(np.linalg.norm(red - np.eye(d) / d)))
    return worst


def normal_form(rho, tol: float = 1e-10, max_iter: int = 500) -> tuple[DensityMatrix, FilterSet]:
    """Filter rho until every single-party marginal is proportional to the identity.

    Each sweep visits the parties in order and applies (d_i rho_i)^(-1/2) on
    party i. Iteration stops once marginal_flatness <= tol or after max_iter
    sweeps; in the latter case the result is returned with
    ``converged=False``. A marginal eigenvalue below SINGULAR_TOL raises
    SingularMarginal, since the normal form then is zero or lives on a
    subspace.
    """
    rho = as_density(rho)
    dims = rho.dims
    m = rho.entries / rho.trace()
    acc = [np.eye(d, dtype=complex) for d in dims]
    steps = 0
    flat = marginal_flatness(DensityMatrix(dims, m, check=False))
    while flat > tol and steps < max_iter:
        for i, d in enumerate(dims):
            red = partial_trace(DensityMatrix(dims, m, check=False), [i + 1]).entries
            f = inv_sqrt_psd(d * red, tol=SINGULAR_TOL * d)
            m = _apply_local(m, dims, i, f)
            m = m / np.trace(m).real
            m = (m + m.conj().T) / 2
            acc[i] = f @ acc[i]
        # keep the accumulated filters well scaled
        acc = [_det_normalized(a) for a in acc]
        steps += 1
        flat = marginal_flatness(DensityMatrix(dims, m, check=False))
    converged = flat <= tol
    if not converged:
        log.warning("normal form not converged after %d sweeps (flatness %.3g)", steps, flat)
    filters = FilterSet(tuple(acc), steps, flat, converged)
    return DensityMatrix(dims, m, check=False), filters
