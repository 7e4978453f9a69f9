"""The numba kernels and the pure-numpy fallback must agree and both be selectable."""

import os
import subprocess
import sys

import numpy as np
import pytest

from dpconv import _kernels_numba as knb
from dpconv import _kernels_numpy as knp

RNG = np.random.default_rng(99)


def test_h1_log_min_agreement():
    for _ in range(100):
        alpha = float(np.exp(RNG.uniform(np.log(1.1), np.log(64.0))))
        eps = float(RNG.uniform(0.0, 3.0))
        delta = float(RNG.uniform(1e-6, 0.9))
        va, pa = knb.h1_log_min(alpha, eps, delta, 1e-10, 200)
        vb, pb = knp.h1_log_min(alpha, eps, delta, 1e-10, 200)
        assert va == pytest.approx(vb, abs=1e-10)
        assert np.isnan(pa) == np.isnan(pb)
        if not np.isnan(pa):
            assert pa == pytest.approx(pb, abs=1e-8)


def test_gamma_exact_batch_agreement():
    n = 500
    alphas = np.exp(RNG.uniform(np.log(1.05), np.log(64.0), n))
    epss = RNG.uniform(0.0, 3.0, n)
    deltas = RNG.uniform(0.0, 0.9, n)
    ga, _ = knb.gamma_exact_batch(alphas, epss, deltas, 1e-10, 200)
    gb, _ = knp.gamma_exact_batch(alphas, epss, deltas, 1e-10, 200)
    assert np.allclose(ga, gb, atol=1e-9, rtol=0.0)


def test_region_boundary_agreement():
    taus = np.linspace(1e-6, 1.0 - 1e-6, 257)
    for alpha, gamma in ((0.0, 0.125), (2.0, 0.25), (8.0, 1.0), (64.0, 7.5)):
        ba = knb.region_boundary_batch(alpha, gamma, taus)
        bb = knp.region_boundary_batch(alpha, gamma, taus)
        assert np.allclose(ba, bb, atol=1e-12, rtol=0.0)
        for t in (1e-6, 0.25, 0.9):
            assert knb.region_boundary(alpha, gamma, t) == pytest.approx(
                knp.region_boundary(alpha, gamma, t), abs=1e-12)


def test_binary_divergence_batches_agree():
    n = 1000
    a = RNG.uniform(1e-6, 1 - 1e-6, n)
    b = RNG.uniform(1e-6, 1 - 1e-6, n)
    alphas = np.exp(RNG.uniform(np.log(1.01), np.log(100.0), n))
    lam = np.exp(RNG.uniform(0.0, 3.0, n))
    assert np.allclose(knb.renyi_binary_batch(a, b, alphas),
                       knp.renyi_binary_batch(a, b, alphas), atol=1e-11, rtol=1e-11)
    assert np.allclose(knb.hockey_stick_batch(a, b, lam),
                       knp.hockey_stick_batch(a, b, lam), atol=0.0, rtol=0.0)


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_env_flag_selects_backend(backend):
    env = dict(os.environ, DPCONV_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", "import dpconv; print(dpconv.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == backend


def test_env_flag_rejects_unknown():
    env = dict(os.environ, DPCONV_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import dpconv"],
        capture_output=True, text=True, env=env)
    assert out.returncode != 0
    assert "DPCONV_BACKEND" in out.stderr
