import numpy as np
import pytest

from entvec.entropy import entropy_vector_pure
from entvec.errors import EntvecError
from entvec.oracle import (
    haar_unitary, random_block_partition, random_density_matrix, random_k_separable, random_pure_state,
    roof_upper_bound, sample_decomposition,
)
from entvec.partitions import all_bipartitions, single_parties
from entvec.tensor import hermitian_spectrum, permute_parties
from entvec.witness import select_pairs, witness


def test_haar_unitary_is_unitary(rng):
    u = haar_unitary(5, rng)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_random_density_rank(rng):
    rho = random_density_matrix((2, 3), rng, rank=2)
    assert np.count_nonzero(hermitian_spectrum(rho) > 1e-12) == 2


def test_sample_decomposition_reconstructs(rng):
    fam = all_bipartitions(3)
    for _ in range(20):
        rho = random_density_matrix((2, 2, 2), rng, rank=3)
        v = haar_unitary(6, rng)[:, :3]
        sample = sample_decomposition(rho, fam, v)
        assert sample.reconstruction_error(rho) < 1e-10
        assert sample.weights.sum() == pytest.approx(1)
    with pytest.raises(EntvecError):
        sample_decomposition(rho, fam, np.eye(2))


def test_roof_of_pure_state_is_exact(rng):
    fam = all_bipartitions(3)
    psi = random_pure_state((2, 2, 2), rng)
    roof = roof_upper_bound(psi.density(), fam, trials=5, seed=1)
    np.testing.assert_allclose(roof.values, entropy_vector_pure(psi, fam).values, atol=1e-10)


def test_roof_is_seeded(rng):
    rho = random_density_matrix((3, 3), rng)
    fam = single_parties(2)
    assert roof_upper_bound(rho, fam, seed=7).values == roof_upper_bound(rho, fam, seed=7).values


def test_block_partition(rng):
    for _ in range(50):
        blocks = random_block_partition(5, 3, rng)
        assert len(blocks) == 3 and all(blocks)
        assert sorted(p for b in blocks for p in b) == [1, 2, 3, 4, 5]


def _partial_transpose(m, dims, party):
    n = len(dims)
    t = m.reshape(tuple(dims) * 2)
    t = np.swapaxes(t, party, n + party)
    return t.reshape(m.shape)


def test_fully_separable_is_ppt():
    for seed in range(20):
        rho = random_k_separable((2, 2, 3), 3, 4, seed=seed)
        assert rho.trace() == pytest.approx(1)
        for party in range(3):
            assert np.linalg.eigvalsh(_partial_transpose(rho.entries, rho.dims, party)).min() > -1e-12


def test_k_separable_rank_and_seed():
    a = random_k_separable((2, 2, 2), 2, 3, seed=5)
    b = random_k_separable((2, 2, 2), 2, 3, seed=5)
    np.testing.assert_array_equal(a.entries, b.entries)
    assert np.count_nonzero(hermitian_spectrum(a) > 1e-10) <= 3


def test_permute_parties_roundtrip(rng):
    rho = random_density_matrix((2, 3, 2), rng)
    moved = permute_parties(rho.entries, (2, 3, 2), [2, 0, 1])
    back = permute_parties(moved, (2, 2, 3), [1, 2, 0])
    np.testing.assert_allclose(back, rho.entries)


def test_sandwich_small(rng):
    fam = all_bipartitions(3)
    for _ in range(10):
        rho = random_density_matrix((2, 2, 2), rng, rank=2)
        roof = roof_upper_bound(rho, fam, trials=20, measure=2, seed=0)
        for j in range(1, 4):
            res = witness(rho, select_pairs(rho, fam, j), fam, j)
            assert res.s2_bound() <= roof.values[j - 1] + 1e-8


def test_roof_non_increasing_in_trials(rng):
    rho = random_density_matrix((2, 2, 2), rng, rank=3)
    fam = all_bipartitions(3)
    prev = None
    for trials in (1, 5, 20, 60):
        cur = np.array(roof_upper_bound(rho, fam, trials=trials, seed=3).values)
        if prev is not None:
            assert np.all(cur <= prev + 1e-15)
        prev = cur
