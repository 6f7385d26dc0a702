"""State families used to exercise the witnesses, with closed-form witness values.

Party order for the Choi states is A, A', B, B' with |phi+> on (A A') and on
(B B'); the label ``0000`` means all four qubits in |0>.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isclose, prod, sqrt
from typing import Optional, Sequence

import numpy as np

from .errors import EntvecError, InvariantViolation
from .partitions import gamma
from .tensor import DensityMatrix, PureState, normalize, permute_parties, tensor_product

PARAM_TOL = 1e-12


def ghz(n: int, d: int = 2, coeffs: Optional[Sequence[complex]] = None) -> PureState:
    """sum_i coeffs[i] |i>^{⊗n}; balanced over all d levels by default."""
    if coeffs is None:
        coeffs = [1 / sqrt(d)] * d
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) > d:
        raise EntvecError(f"{len(coeffs)} coefficients for local dimension {d}")
    dims = (d,) * n
    amps = np.zeros(d ** n, dtype=complex)
    step = sum(d ** k for k in range(n))  # flat index of |i i ... i> is i * step
    amps[np.arange(len(coeffs)) * step] = coeffs
    return PureState(dims, amps)


def psi_epsilon(eps: float) -> PureState:
    """sqrt(1-2eps)|000> + sqrt(eps)|111> + sqrt(eps)|222>."""
    if not 0 <= eps <= 0.5:
        raise InvariantViolation("params", f"eps must lie in [0, 1/2], got {eps}")
    return ghz(3, 3, [sqrt(1 - 2 * eps), sqrt(eps), sqrt(eps)])


def bell(d: int = 2) -> PureState:
    return ghz(2, d)


def identity_state(dims: Sequence[int]) -> DensityMatrix:
    total = prod(dims)
    return DensityMatrix(dims, np.eye(total) / total)


def _check_probs(name: str, values: Sequence[float]) -> None:
    if any(v < -PARAM_TOL for v in values):
        raise InvariantViolation("params", f"{name}: weights must be >= 0, got {tuple(values)}")


@dataclass(frozen=True)
class Rho1Params:
    p_a: float
    p_b: float
    p_c: float
    p_abc: float

    def __post_init__(self):
        vals = (self.p_a, self.p_b, self.p_c, self.p_abc)
        _check_probs("rho1", vals)
        if abs(sum(vals) - 1) > PARAM_TOL:
            raise InvariantViolation("params", f"rho1 weights sum to {sum(vals)!r}, expected 1")


@dataclass(frozen=True)
class Rho2Params:
    n: int
    alpha: float
    beta: float
    p: float
    q: float

    def __post_init__(self):
        if self.n < 2:
            raise InvariantViolation("params", f"rho2 needs N >= 2, got {self.n}")
        if abs(self.alpha ** 2 + self.beta ** 2 - 1) > PARAM_TOL:
            raise InvariantViolation("params", "rho2 needs alpha^2 + beta^2 = 1")
        if not (-PARAM_TOL <= self.q <= self.p + PARAM_TOL and self.p <= 1 + PARAM_TOL):
            raise InvariantViolation("params", f"rho2 needs 0 <= q <= p <= 1, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class Rho3Params:
    p: float
    q: float

    def __post_init__(self):
        _check_probs("rho3", (self.p, self.q))
        if self.p + self.q > 1 + PARAM_TOL:
            raise InvariantViolation("params", f"rho3 needs p + q <= 1, got {self.p + self.q}")


def _embed(dims, parts: Sequence[tuple[Sequence[int], np.ndarray]]) -> np.ndarray:
    """Kronecker product of operators on disjoint party groups, reordered to 1..n.

    ``parts`` lists (1-based parties, operator) with operators in the listed
    party order.
    """
    order = [p for parties, _ in parts for p in parties]
    mat = parts[0][1]
    for _, op in parts[1:]:
        mat = np.kron(mat, op)
    cur_dims = [dims[p - 1] for p in order]
    # factor k of the result sits at position order.index(k+1) of mat
    return permute_parties(mat, cur_dims, [order.index(k + 1) for k in range(len(dims))])


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, np.conj(v))


def rho1(params: Rho1Params) -> DensityMatrix:
    """Bell pairs with a maximally mixed third party, mixed with GHZ."""
    dims = (2, 2, 2)
    bell2 = _proj(bell(2).amplitudes)
    half = np.eye(2) / 2
    m = (params.p_a * _embed(dims, [([1], half), ([2, 3], bell2)])
         + params.p_b * _embed(dims, [([2], half), ([1, 3], bell2)])
         + params.p_c * _embed(dims, [([3], half), ([1, 2], bell2)])
         + params.p_abc * _proj(ghz(3).amplitudes))
    return DensityMatrix(dims, m)


def ghz_balanced(n: int, alpha: float, beta: float) -> PureState:
    return ghz(n, 2, [alpha, beta])


def rho2(params: Rho2Params) -> DensityMatrix:
    """(1-p) GHZ + q dephased GHZ + (p-q) white noise on N qubits."""
    n = params.n
    g = _proj(ghz_balanced(n, params.alpha, params.beta).amplitudes)
    dep = np.diag(np.diag(g))
    total = 2 ** n
    m = (1 - params.p) * g + params.q * dep + (params.p - params.q) * np.eye(total) / total
    return DensityMatrix((2,) * n, m)


def rho3(params: Rho3Params) -> DensityMatrix:
    """Three parties of dimension 5: GHZ, (I/5) ⊗ two-party GHZ, white noise."""
    dims = (5, 5, 5)
    g3 = _proj(ghz(3, 5).amplitudes)
    g2 = np.kron(np.eye(5) / 5, _proj(ghz(2, 5).amplitudes))
    m = (1 - params.p - params.q) * g3 + params.p * g2 + params.q * np.eye(125) / 125
    return DensityMatrix(dims, m)


def sigma_filtered(params: Rho1Params) -> DensityMatrix:
    """Unnormalized locally filtered version of rho1; normalize() before use."""
    dims = (2, 2, 2)
    chi = _proj(np.array([sqrt(2), 0, 0, sqrt(2) / 4]))
    omega = np.zeros(8)
    omega[0], omega[7] = 2.0, 0.25
    mm = np.diag([1.0, 0.25])
    m = (params.p_a * _embed(dims, [([1], mm), ([2, 3], chi)])
         + params.p_b * _embed(dims, [([2], mm), ([1, 3], chi)])
         + params.p_c * _embed(dims, [([3], mm), ([1, 2], chi)])
         + params.p_abc * _proj(omega))
    return DensityMatrix(dims, m, normalized=False)


def _check_unit(name: str, x: float) -> None:
    if not -PARAM_TOL <= x <= 1 + PARAM_TOL:
        raise InvariantViolation("params", f"{name} must lie in [0, 1], got {x}")


def cj_depolarizing(q1: Optional[float] = None, q2: Optional[float] = None, *,
                    q: Optional[float] = None) -> DensityMatrix:
    """Choi state of two-qubit depolarizing channels, parties (A, A', B, B').

    ``q=...`` gives the global channel; ``q1, q2`` the product of local ones.
    """
    dims = (2, 2, 2, 2)
    phi = _proj(bell(2).amplitudes)
    noise2 = np.eye(4) / 4
    if q is not None:
        if q1 is not None or q2 is not None:
            raise EntvecError("give either q or (q1, q2), not both")
        _check_unit("q", q)
        m = q * np.kron(phi, phi) + (1 - q) * np.eye(16) / 16
        return DensityMatrix(dims, m)
    if q1 is None or q2 is None:
        raise EntvecError("local channel needs both q1 and q2")
    _check_unit("q1", q1)
    _check_unit("q2", q2)
    a = q1 * phi + (1 - q1) * noise2
    b = q2 * phi + (1 - q2) * noise2
    return DensityMatrix(dims, np.kron(a, b))


# closed forms ---------------------------------------------------------------

def analytic_w2_rho1(params: Rho1Params) -> float:
    """W_2 of rho1 over {A, B} with C = {(000,111), (000,110), (001,111)}."""
    pa, pb, pc, pabc = params.p_a, params.p_b, params.p_c, params.p_abc
    return (pc - 2 * sqrt(pa * pb) + pabc - (pa + pb) / 2) / sqrt(3)


def analytic_wgamma_rho2(params: Rho2Params, k: int) -> float:
    """W_gamma(k) of rho2 over all bipartitions with C = {(0^N, 1^N)}."""
    n = params.n
    return 2 * ((1 - params.p) * params.alpha * params.beta - gamma(n, k) * (params.p - params.q) / 2 ** n)


CJ_CONVENTION_FACTOR = 2.0


def analytic_w2_cj(q: Optional[float] = None, q1: Optional[float] = None,
                   q2: Optional[float] = None, *, published: bool = False) -> float:
    """W_2 of the Choi state over {A, B} with C = {(0000, 1111)}.

    ``published=True`` returns (3q - 1)/8, the literature normalisation; the
    default matches this library's ordered-pair convention, which is
    ``CJ_CONVENTION_FACTOR`` times larger.
    """
    x = q if q is not None else q1 * q2
    value = (3 * x - 1) / 8
    return value if published else CJ_CONVENTION_FACTOR * value


def analytic_w_filtered(params: Rho1Params) -> float:
    """Left-hand side of the {A|BC, B|AC} condition evaluated on the filtered state."""
    pa, pb, pc, pabc = params.p_a, params.p_b, params.p_c, params.p_abc
    return pabc + 1.25 * pc - 0.5 * (pa + pb) - 2.5 * sqrt(pa * pb)
