"""Entropy-vector witnesses and the classification procedures built on them.

The witness W_j(rho, C, R) lower-bounds the j-th largest entry of the
linear-entropy vector of rho over the family R. For every listed pair
(eta, eta') it compares the coherence |<eta|rho|eta'>| with geometric means of
populations whose digits on a subset r in R have been exchanged.

Counting convention: the sum runs over ordered pairs, so each unordered pair
in C contributes twice, while the prefactor is 1/sqrt(number of unordered
pairs). This is the convention under which the linear-entropy bound holds for
pure states. Published values for the Choi-state example are half of what
this convention gives; signs and thresholds are identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, sqrt
from typing import Optional, Sequence, Union

import numpy as np

from .entropy import dimension_from_witness, s2_bound_from_witness
from .errors import EntvecError, NoAdmissiblePairs, ParseError
from .partitions import (
    PartitionFamily, all_bipartitions, depth_family, format_bipartition, gamma,
    single_parties, swap_pair,
)
from .tensor import DensityMatrix, as_density

MultiIndex = tuple[int, ...]

POSITIVE_TOL = 1e-12
COHERENCE_TOL = 1e-10
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def format_value(w: float) -> str:
    """Witness value rounded to 12 decimals, always with a decimal point."""
    return repr(round(float(w), 12))


def _fmt_index(eta: Sequence[int]) -> str:
    return "".join(_DIGITS[d] for d in eta)


@dataclass(frozen=True)
class PairSet:
    """Unordered pairs of distinct multi-indices selecting coherences of rho."""

    pairs: tuple[tuple[MultiIndex, MultiIndex], ...]

    def __post_init__(self):
        norm = []
        for a, b in self.pairs:
            a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)
            if len(a) != len(b):
                raise EntvecError(f"pair {a}-{b} mixes party counts")
            if a == b:
                raise EntvecError(f"pair {_fmt_index(a)}-{_fmt_index(b)} is diagonal")
            norm.append((a, b) if a < b else (b, a))
        if not norm:
            raise EntvecError("pair set is empty")
        if len(set(norm)) != len(norm):
            raise EntvecError("pair set contains duplicates")
        if len({len(a) for a, _ in norm}) != 1:
            raise EntvecError("pairs have inconsistent lengths")
        object.__setattr__(self, "pairs", tuple(norm))

    @classmethod
    def parse(cls, text: str) -> PairSet:
        """Parse ``"000-111,000-110"``."""
        pairs = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            parts = item.split("-")
            if len(parts) != 2:
                raise ParseError(f"bad pair {item!r}; expected e.g. 000-111")
            try:
                pairs.append(tuple(tuple(_DIGITS.index(ch) for ch in p.strip().lower()) for p in parts))
            except ValueError:
                raise ParseError(f"bad digit in pair {item!r}") from None
        try:
            return cls(tuple(pairs))
        except EntvecError as exc:
            raise ParseError(str(exc)) from exc

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __str__(self):
        return ",".join(f"{_fmt_index(a)}-{_fmt_index(b)}" for a, b in self.pairs)


@dataclass(frozen=True)
class PairDetail:
    pair: tuple[MultiIndex, MultiIndex]
    coherence: float
    subsets: tuple[frozenset, ...]
    terms: tuple[float, ...]

    @property
    def contribution(self) -> float:
        """Ordered-pair contribution before the 1/sqrt(|C|) prefactor."""
        return 2.0 * (self.coherence - sum(self.terms))


@dataclass(frozen=True)
class WitnessResult:
    value: float
    j: int
    pairs: PairSet
    family: PartitionFamily
    details: tuple[PairDetail, ...]

    @property
    def positive(self) -> bool:
        return self.value > POSITIVE_TOL

    def resum(self) -> float:
        return sum(d.contribution for d in self.details) / sqrt(len(self.pairs))

    def s2_bound(self) -> float:
        return s2_bound_from_witness(self.value)

    def to_dict(self) -> dict:
        n = self.family.n
        return {
            "value": self.value,
            "j": self.j,
            "C": str(self.pairs),
            "R": self.family.labels(),
            "pairs": [
                {
                    "pair": f"{_fmt_index(d.pair[0])}-{_fmt_index(d.pair[1])}",
                    "coherence": d.coherence,
                    "min_subsets": [format_bipartition(r, n) for r in d.subsets],
                    "min_terms": list(d.terms),
                }
                for d in self.details
            ],
        }


@lru_cache(maxsize=64)
def _family_masks(family: PartitionFamily) -> np.ndarray:
    """Boolean (|R|, n) matrix marking the parties of each subset."""
    masks = np.zeros((len(family), family.n), dtype=bool)
    for i, r in enumerate(family):
        masks[i, [p - 1 for p in r]] = True
    masks.setflags(write=False)
    return masks


@lru_cache(maxsize=256)
def _index_tables(dims: tuple[int, ...], pairs: PairSet, family: PartitionFamily):
    """Flat indices of the pairs and of their swapped images, shape (P,) and (P, |R|)."""
    a = np.array([p[0] for p in pairs], dtype=np.intp)
    b = np.array([p[1] for p in pairs], dtype=np.intp)
    if np.any(a >= np.array(dims)) or np.any(b >= np.array(dims)):
        raise EntvecError(f"pair digits exceed local dimensions {dims}")
    masks = _family_masks(family)
    sa = np.where(masks[None], b[:, None, :], a[:, None, :])
    sb = np.where(masks[None], a[:, None, :], b[:, None, :])
    flat = lambda x: np.ravel_multi_index(tuple(np.moveaxis(x, -1, 0)), dims)
    out = (flat(a), flat(b), flat(sa), flat(sb))
    for arr in out:
        arr.setflags(write=False)
    return out


def _pair_terms(m: np.ndarray, dims, pairs: PairSet, family: PartitionFamily):
    ia, ib, sa, sb = _index_tables(tuple(dims), pairs, family)
    diag = np.clip(np.diagonal(m).real, 0.0, None)
    coh = np.abs(m[ia, ib])
    terms = np.sqrt(diag[sa] * diag[sb])
    return coh, terms


def _check_inputs(rho: DensityMatrix, family: PartitionFamily, j: int) -> None:
    if family.n != rho.n_parties:
        raise EntvecError(f"family is for {family.n} parties, state has {rho.n_parties}")
    if not 1 <= j <= len(family):
        raise EntvecError(f"level j must lie in 1..{len(family)}, got {j}")


def _evaluate(coh: np.ndarray, terms: np.ndarray, j: int):
    """Witness value and the j subsets (columns) minimising the swapped sum."""
    cols = terms.sum(axis=0)
    chosen = np.argsort(cols, kind="stable")[:j]
    value = 2.0 * (coh.sum() - cols[chosen].sum()) / sqrt(len(coh))
    return float(value), chosen


def witness(rho, pairs: PairSet, family: PartitionFamily, j: int) -> WitnessResult:
    """Evaluate W_j(rho, C, R).

    The j subsets of R are chosen once for the whole pair set, minimising
    the total of the swapped-population terms. Choosing them separately per
    pair can overshoot the entropy it is meant to bound.
    """
    rho = as_density(rho)
    _check_inputs(rho, family, j)
    if len(pairs.pairs[0][0]) != rho.n_parties:
        raise EntvecError(f"pairs have {len(pairs.pairs[0][0])} digits, state has {rho.n_parties} parties")
    coh, terms = _pair_terms(rho.entries, rho.dims, pairs, family)
    value, chosen = _evaluate(coh, terms, j)
    subsets = tuple(family.subsets[k] for k in chosen)
    details = tuple(
        PairDetail(p, float(coh[i]), subsets, tuple(float(t) for t in terms[i, chosen]))
        for i, p in enumerate(pairs)
    )
    return WitnessResult(value, j, pairs, family, details)


def _digits(flat: np.ndarray, dims) -> np.ndarray:
    return np.stack(np.unravel_index(flat, tuple(dims)), axis=-1)


def admissible_pairs(rho, family: PartitionFamily, tol: float = COHERENCE_TOL) -> list:
    """Coherent pairs that no subset in ``family`` maps onto themselves.

    A swap that leaves the pair unchanged, or merely exchanges its two
    members, can only subtract from the witness. Returned in lexicographic
    order of (eta, eta').
    """
    rho = as_density(rho)
    m = rho.entries
    rows, cols = np.nonzero(np.triu(np.abs(m) > tol, 1))
    if rows.size == 0:
        return []
    a, b = _digits(rows, rho.dims), _digits(cols, rho.dims)
    same = (a == b)[:, None, :]
    mask = _family_masks(family)[None]
    fixed = np.all(same | ~mask, axis=2)
    exchanged = np.all(same | mask, axis=2)
    ok = ~np.any(fixed | exchanged, axis=1)
    return [(tuple(int(x) for x in a[i]), tuple(int(x) for x in b[i])) for i in np.nonzero(ok)[0]]


def select_pairs(rho, family: PartitionFamily, j: int, max_pairs: Optional[int] = None) -> PairSet:
    """Greedily build the pair set C that maximises W_j(rho, C, R).

    Starting from the single best admissible pair, the pair giving the
    largest witness is added until no addition helps or ``max_pairs`` is
    reached (default twice the largest local dimension). Ties go to the
    lexicographically first pair, so the result depends on rho only.
    """
    rho = as_density(rho)
    _check_inputs(rho, family, j)
    cands = admissible_pairs(rho, family)
    if not cands:
        raise NoAdmissiblePairs(f"no admissible coherence above {COHERENCE_TOL:g} for R={family}")
    if max_pairs is None:
        max_pairs = 2 * max(rho.dims)
    coh, terms = _pair_terms(rho.entries, rho.dims, PairSet(tuple(cands)), family)

    picked: list[int] = []
    avail = np.ones(len(cands), dtype=bool)
    coh_sum, col_sum, current = 0.0, np.zeros(len(family)), -np.inf
    while len(picked) < max_pairs and avail.any():
        trial = col_sum[None, :] + terms
        if j < trial.shape[1]:
            low = np.partition(trial, j - 1, axis=1)[:, :j].sum(axis=1)
        else:
            low = trial.sum(axis=1)
        vals = 2.0 * (coh_sum + coh - low) / sqrt(len(picked) + 1)
        vals[~avail] = -np.inf
        best = int(np.argmax(vals))
        if picked and not vals[best] > current:
            break
        picked.append(best)
        avail[best] = False
        coh_sum += coh[best]
        col_sum = col_sum + terms[best]
        current = vals[best]
    return PairSet(tuple(cands[i] for i in sorted(picked)))


def _resolve(rho, family, j, pairs) -> Optional[PairSet]:
    if pairs is None or (isinstance(pairs, str) and pairs == "auto"):
        try:
            return select_pairs(rho, family, j)
        except NoAdmissiblePairs:
            return None
    if isinstance(pairs, str):
        return PairSet.parse(pairs)
    return pairs


def _maybe_witness(rho, family, j, pairs) -> Optional[WitnessResult]:
    c = _resolve(rho, family, j, pairs)
    return None if c is None else witness(rho, c, family, j)


PairsArg = Union[PairSet, str, None]


@dataclass(frozen=True)
class Decomposability:
    """Outcome of the test "rho is not a mixture of states separable across some r in R"."""

    family: PartitionFamily
    result: Optional[WitnessResult]

    @property
    def not_decomposable(self) -> bool:
        return self.result is not None and self.result.positive


def not_decomposable(rho, family: PartitionFamily, pairs: PairsArg = "auto") -> Decomposability:
    rho = as_density(rho)
    return Decomposability(family, _maybe_witness(rho, family, len(family), pairs))


@dataclass(frozen=True)
class KSeparability:
    n: int
    results: dict  # k -> Optional[WitnessResult], evaluated at j = gamma(k)

    @property
    def at_most(self) -> Optional[int]:
        """Smallest k with a positive witness: rho is not (k+1)-separable."""
        ks = [k for k, r in self.results.items() if r is not None and r.positive]
        return min(ks) if ks else None

    @property
    def gme(self) -> bool:
        return self.at_most == 1

    def describe(self) -> str:
        k = self.at_most
        if k is None:
            return "no certificate"
        w = self.results[k].value
        if k == 1:
            return f"not 2-separable (GME), W={format_value(w)}"
        return f"not {k + 1}-separable (at most {k}-separable), W={format_value(w)}"


def k_separability_scan(rho, pairs: PairsArg = "auto") -> KSeparability:
    """Evaluate W_gamma(k) over all bipartitions for k = N-1 down to 1."""
    rho = as_density(rho)
    n = rho.n_parties
    family = all_bipartitions(n)
    results = {}
    for k in range(n - 1, 0, -1):
        results[k] = _maybe_witness(rho, family, gamma(n, k), pairs)
    return KSeparability(n, results)


@dataclass(frozen=True)
class Depth:
    n: int
    results: tuple  # Optional[WitnessResult] per level m, in order

    @property
    def levels_positive(self) -> int:
        count = 0
        for r in self.results:
            if r is None or not r.positive:
                break
            count += 1
        return count

    @property
    def n_partite(self) -> bool:
        return self.levels_positive == self.n // 2

    @property
    def depth(self) -> Optional[int]:
        """Certified k for "at least k-partite entangled", or None."""
        if self.n_partite:
            return self.n
        m = self.levels_positive
        return None if m == 0 else ceil(self.n / 2) + m - 1

    def describe(self) -> str:
        if self.n_partite:
            return f"{self.n}-partite entangled"
        if self.depth is None:
            return "no certificate"
        return f"at least {self.depth}-partite entangled (not {self.depth - 1}-producible)"


def entanglement_depth(rho, pairs: PairsArg = "auto", full: bool = False) -> Depth:
    """Walk the families G_0, G_1, ... until the witness stops being positive.

    With ``full`` every level is evaluated (useful for tabulating raw values);
    the certified depth is the same.
    """
    rho = as_density(rho)
    n = rho.n_parties
    results = []
    for m in range(n // 2):
        family = depth_family(n, m)
        r = _maybe_witness(rho, family, len(family), pairs)
        results.append(r)
        if not full and (r is None or not r.positive):
            break
    return Depth(n, tuple(results))


@dataclass(frozen=True)
class Dimensionality:
    family: PartitionFamily
    dims: tuple[int, ...]
    s2: tuple[float, ...]
    results: tuple  # Optional[WitnessResult] per j


def dimensionality_vector_bound(rho, family: Optional[PartitionFamily] = None,
                                pairs: PairsArg = "auto") -> Dimensionality:
    """Certified entanglement dimension for each entry j = 1..|R| of the vector."""
    rho = as_density(rho)
    if family is None:
        family = single_parties(rho.n_parties)
    results, dims, s2 = [], [], []
    for j in range(1, len(family) + 1):
        r = _maybe_witness(rho, family, j, pairs)
        w = r.value if r is not None else 0.0
        results.append(r)
        dims.append(dimension_from_witness(w))
        s2.append(s2_bound_from_witness(w))
    return Dimensionality(family, tuple(dims), tuple(s2), tuple(results))


def coherence_budget(pairs: PairSet, family: PartitionFamily, j: int) -> int:
    """Distinct density-matrix entries the witness reads.

    |C| off-diagonal entries plus every distinct swapped population. All of R
    is needed to locate the minimising subsets, so the count does not depend
    on j.
    """
    if not 1 <= j <= len(family):
        raise EntvecError(f"level j must lie in 1..{len(family)}, got {j}")
    diag = set()
    for a, b in pairs:
        for r in family:
            diag.update(swap_pair(a, b, r))
    return len(pairs) + len(diag)
