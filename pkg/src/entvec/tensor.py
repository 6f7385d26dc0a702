"""Dense linear algebra on multipartite Hilbert spaces.

Basis convention: a computational-basis multi-index ``(i_1, ..., i_n)`` maps to
the flat row-major index with party 1 most significant, i.e. what
``np.ravel_multi_index(digits, dims)`` returns. Party labels are 1-based
throughout the library.
"""

from __future__ import annotations

from functools import reduce
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import EntvecError, InvariantViolation, SingularMarginal

MAX_PARTIES = 12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9
NORM_TOL = 1e-12


def check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    """Validate a list of local dimensions and return it as a tuple."""
    dims = tuple(int(d) for d in dims)
    if not 1 <= len(dims) <= MAX_PARTIES:
        raise InvariantViolation("dims", f"need 1..{MAX_PARTIES} parties, got {len(dims)}")
    if any(d < 2 for d in dims):
        raise InvariantViolation("dims", f"local dimensions must be >= 2, got {dims}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


class PureState:
    """State vector on ``dims`` with amplitudes in row-major order."""

    __slots__ = ("dims", "amplitudes", "normalized")

    def __init__(self, dims, amplitudes, *, normalized: bool = True):
        self.dims = check_dims(dims)
        amps = _frozen(np.ravel(amplitudes))
        if amps.shape != (prod(self.dims),):
            raise InvariantViolation("shape", f"expected {prod(self.dims)} amplitudes, got {amps.shape[0]}")
        if normalized:
            norm = float(np.vdot(amps, amps).real)
            if abs(norm - 1.0) > NORM_TOL:
                raise InvariantViolation("norm", f"squared amplitudes sum to {norm!r}")
        self.amplitudes = amps
        self.normalized = normalized

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()),
                             normalized=self.normalized, check=False)

    def __repr__(self):
        return f"PureState(dims={self.dims})"


class DensityMatrix:
    """Hermitian PSD operator on a tensor-product space.

    Construction validates the invariants; pass ``check=False`` only for
    matrices produced by this library from already validated inputs.
    """

    __slots__ = ("dims", "entries", "normalized")

    def __init__(self, dims, entries, *, normalized: bool = True, check: bool = True):
        self.dims = check_dims(dims)
        m = _frozen(entries)
        total = prod(self.dims)
        if m.shape != (total, total):
            raise InvariantViolation("shape", f"expected {total}x{total} matrix, got {m.shape}")
        self.entries = m
        self.normalized = normalized
        if check:
            self.validate()

    def validate(self) -> None:
        m = self.entries
        herm = float(np.max(np.abs(m - m.conj().T), initial=0.0))
        if herm > HERMITIAN_TOL:
            raise InvariantViolation("hermitian", f"max |rho - rho^dag| = {herm:.3g}")
        if self.normalized:
            tr = complex(np.trace(m))
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvariantViolation("trace", f"trace is {tr.real:.12g}, expected 1")
        lam = np.linalg.eigvalsh(m)[0]
        if lam < PSD_TOL:
            raise InvariantViolation("psd", f"smallest eigenvalue {lam:.3g}")

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims}, normalized={self.normalized})"


def tensor_product(ops: Sequence):
    """Kronecker product of pure states or of density matrices.

    >>> tensor_product([ket(2, 0), ket(2, 1)]).amplitudes.nonzero()[0]
    array([1])
    """
    ops = list(ops)
    if not ops:
        raise EntvecError("tensor_product needs at least one operand")
    if all(isinstance(o, PureState) for o in ops):
        amps = reduce(np.kron, (o.amplitudes for o in ops))
        return PureState(sum((o.dims for o in ops), ()), amps,
                         normalized=all(o.normalized for o in ops))
    if all(isinstance(o, DensityMatrix) for o in ops):
        mat = reduce(np.kron, (o.entries for o in ops))
        return DensityMatrix(sum((o.dims for o in ops), ()), mat,
                             normalized=all(o.normalized for o in ops), check=False)
    raise EntvecError("tensor_product operands must all be PureState or all DensityMatrix")


def ket(d: int, i: int) -> PureState:
    """Computational basis vector |i> of a single d-level party."""
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return PureState((d,), v)


def basis_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(digits), tuple(dims)))


def as_density(state) -> DensityMatrix:
    if isinstance(state, PureState):
        return state.density()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def _check_parties(parties, n: int) -> list[int]:
    parties = sorted(set(int(p) for p in parties))
    if not parties:
        raise EntvecError("party subset must be nonempty")
    if parties[0] < 1 or parties[-1] > n:
        raise EntvecError(f"party labels must lie in 1..{n}, got {parties}")
    return parties


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduced state on the (1-based) parties in ``keep``.

    The kept parties stay in their original relative order.
    """
    rho = as_density(rho)
    n = rho.n_parties
    keep = _check_parties(keep, n)
    dims = rho.dims
    if len(keep) == n:
        return rho
    t = rho.entries.reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for p in range(1, n + 1):
        if p not in keep:
            col[p - 1] = row[p - 1]
    out = [row[p - 1] for p in keep] + [col[p - 1] for p in keep]
    kd = tuple(dims[p - 1] for p in keep)
    red = np.einsum(t, row + col, out).reshape(prod(kd), prod(kd))
    return DensityMatrix(kd, red, normalized=rho.normalized, check=False)


def permute_parties(op: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator.

    ``order[k]`` is the (0-based) position in ``op`` of the factor that becomes
    factor ``k`` of the result.
    """
    dims = tuple(dims)
    n = len(dims)
    t = np.asarray(op).reshape(dims + dims)
    t = t.transpose(list(order) + [n + o for o in order])
    total = prod(dims)
    return t.reshape(total, total)


def hermitian_spectrum(h) -> np.ndarray:
    """Eigenvalues of a Hermitian operator, sorted descending."""
    m = h.entries if isinstance(h, DensityMatrix) else np.asarray(h)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise InvariantViolation("hermitian", "spectrum requested for a non-Hermitian operator")
    return np.linalg.eigvalsh(m)[::-1]


def inv_sqrt_psd(rho, tol: float = 1e-12) -> np.ndarray:
    """X = rho^(-1/2), so that X rho X = I.

    Raises SingularMarginal if any eigenvalue is <= tol.
    """
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    lam, vec = np.linalg.eigh(m)
    if lam[0] <= tol:
        raise SingularMarginal(f"eigenvalue {lam[0]:.3g} <= {tol:.3g}; inverse square root undefined")
    return (vec / np.sqrt(lam)) @ vec.conj().T


def normalize(rho: DensityMatrix) -> DensityMatrix:
    tr = rho.trace()
    if tr <= 1e-14:
        raise InvariantViolation("trace", f"cannot normalize operator with trace {tr:.3g}")
    return DensityMatrix(rho.dims, rho.entries / tr)
