"""Acceptance gate: each criterion runs at seed 7 with 100 cases.

The suites live in ``cstar_inv.properties`` and are the same ones run by
``cstar-inv check-properties``. Each test also checks the instance count so a
suite cannot pass by shrinking. ``conftest.py`` prints one line per criterion.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.linalg import block_diag

from cstar_inv import sampling as smp
from cstar_inv.algebra import DEFAULT_TOL
from cstar_inv.equations import verify_sts
from cstar_inv.operators import moore_penrose
from cstar_inv.properties import run_suites
from cstar_inv.spectral import eigen_submodule, find_hyperinvariant, spectrum
from cstar_inv.submodules import Submodule, is_invariant

SEED, CASES = 7, 100


@pytest.fixture(scope="module")
def suites():
    start = time.perf_counter()
    results = {s.key: s for s in run_suites(SEED, CASES)}
    return results, time.perf_counter() - start


def _assert_suite(suites, key, count):
    results, _ = suites
    s = results[key]
    assert s.count == count
    failed = [(c.name, c.residual, c.threshold) for c in s.checks if not c.passed]
    assert not failed, failed


def test_criterion_01_cstar_axioms(suites):
    _assert_suite(suites, "cstar_axioms", 200)
    # oracle: the element norm is the largest singular value over blocks
    rng = np.random.default_rng([SEED, 101])
    for _ in range(200):
        shape, _k = smp.random_shape_rank(rng)
        a, b = smp.random_element(rng, shape), smp.random_element(rng, shape)
        na = max(np.linalg.svd(x, compute_uv=False)[0] for x in a.blocks)
        nb = max(np.linalg.svd(x, compute_uv=False)[0] for x in b.blocks)
        naa = max(np.linalg.svd(x.conj().T @ x, compute_uv=False)[0] for x in a.blocks)
        nab = max(np.linalg.svd(x @ y, compute_uv=False)[0] for x, y in zip(a.blocks, b.blocks))
        assert abs(naa - na ** 2) <= 1e-9 + 1e-7 * na ** 2
        assert nab <= na * nb + 1e-9 + 1e-7 * na * nb


def test_criterion_02_penrose(suites):
    _assert_suite(suites, "penrose", 200)
    # second oracle: numpy's own pseudo-inverse on the block-diagonal matrix
    rng = np.random.default_rng([SEED, 102])
    for j in range(200):
        shape, k = smp.random_shape_rank(rng)
        T = (smp.random_rank_deficient if j % 2 else smp.random_operator)(rng, shape, k)
        X = block_diag(*moore_penrose(T).blocks)
        ref = np.linalg.pinv(block_diag(*T.blocks))
        assert np.linalg.norm(X - ref, 2) <= 1e-6 * max(np.linalg.norm(ref, 2), 1e-300)


def test_criterion_03_invariance_equivalence(suites):
    _assert_suite(suites, "invariance_equivalence", 100)
    rng = np.random.default_rng([SEED, 103])
    disagreements = 0
    for j in range(100):
        shape, k = smp.random_shape_rank(rng, min_total=2)
        if j % 2:
            T = smp.random_operator(rng, shape, k)
            ranks = smp.random_projection_ranks(rng, shape, k)
            P = smp.projection_from_frame(smp.random_frame(rng, shape, k), ranks, shape, k)
        else:
            T, P, _, _ = smp.random_invariant_pair(rng, shape, k)
        W = Submodule(P)
        t, p = block_diag(*T.blocks), block_diag(*P.blocks)
        direct = np.linalg.norm(p @ t @ p - t @ p, 2) <= DEFAULT_TOL.threshold(np.linalg.norm(t, 2))
        disagreements += not (is_invariant(T, W) == direct == verify_sts(P, T).solves)
    assert disagreements == 0


def test_criterion_04_sts_family(suites):
    _assert_suite(suites, "sts_family", 100)


def test_criterion_05_douglas(suites):
    _assert_suite(suites, "douglas", 100)
    results, _ = suites
    margin = next(c for c in results["douglas"].checks if "min_residual" in c.name)
    # the check stores 10 / min(residual / threshold); below 1 means every residual >= 10 tol
    assert margin.residual <= 1.0


def test_criterion_06_kernel_tower(suites):
    _assert_suite(suites, "kernel_tower", 50)


def test_criterion_07_block_roundtrip(suites):
    _assert_suite(suites, "block_decomposition", 200)


def test_criterion_08_unitary_corner_norm(suites):
    _assert_suite(suites, "contraction_unitary_corner", 50)


def test_criterion_09_mp_reducing(suites):
    _assert_suite(suites, "mp_reducing", 100)
    results, _ = suites
    missing = next(c for c in results["mp_reducing"].checks if c.name == "inverse_subcase.missing")
    assert missing.residual == 0


def test_criterion_10_eigen_submodules(suites):
    _assert_suite(suites, "eigen_submodules", 100)
    # oracle: every nonzero eigenvalue of a block has a nonzero eigenvector there
    rng = np.random.default_rng([SEED, 110])
    for _ in range(100):
        shape, k = smp.random_shape_rank(rng)
        K = smp.random_operator(rng, shape, k)
        spec = spectrum(K)
        numpy_eigs = np.concatenate([np.linalg.eigvals(b) for b in K.blocks])
        for lam in spec.nonzero():
            assert np.min(np.abs(numpy_eigs - lam)) <= 1e-8
            W = eigen_submodule(K, lam, spec=spec)
            assert W.projection.norm() >= 1 - 1e-9


def test_criterion_11_hyperinvariant(suites):
    _assert_suite(suites, "hyperinvariant", 100)
    # planted nilpotents: Ker K is returned and is proper and nonzero
    rng = np.random.default_rng([SEED, 111])
    for _ in range(25):
        shape, k = smp.random_shape_rank(rng, min_dim=2)
        K = smp.random_nilpotent(rng, shape, k)
        W, kind = find_hyperinvariant(K)
        assert kind == "kernel"
        assert W.nontrivial()
        assert (K @ W.projection).norm() <= DEFAULT_TOL.threshold(K.norm())


def test_criterion_12_unitary_transport(suites):
    _assert_suite(suites, "unitary_transport", 50)


def _cli(*args):
    env = dict(os.environ)
    env.pop("CSTAR_INV_SEED", None)
    return subprocess.run([sys.executable, "-m", "cstar_inv", *args], capture_output=True, env=env, timeout=300)


def test_criterion_13_determinism(suites):
    args = ("check-properties", "--seed", str(SEED), "--cases", str(CASES), "--format", "machine")
    start = time.perf_counter()
    first = _cli(*args)
    elapsed = time.perf_counter() - start
    second = _cli(*args)
    assert first.returncode == 0, first.stderr
    assert second.returncode == 0, second.stderr
    assert first.stdout == second.stdout
    assert elapsed < 60
    _, in_process = suites
    assert in_process < 60
