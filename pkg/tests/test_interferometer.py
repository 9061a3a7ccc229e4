import math

import numpy as np
import pytest

from cswap_estimator import _rng
from cswap_estimator.interferometer import (
    InterferometerRun,
    estimate_tr_rho_u,
    overlap,
    prob_zero_exact,
    run,
    sample_zero_count,
)
from cswap_estimator.linalg import swap_operator, validate_density
from cswap_estimator.random_states import random_density, random_pure_state, random_unitary

KET0 = np.diag([1.0, 0.0])
KET1 = np.diag([0.0, 1.0])
PLUS = np.full((2, 2), 0.5)


def circuit_prob_zero(u, rho, phi):
    """Brute-force the full circuit on control (x) target: H, c-U, phase on |1>, H, measure."""
    d = rho.shape[0]
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    cu = np.block([[np.eye(d), np.zeros((d, d))], [np.zeros((d, d)), u]])
    phase = np.diag([1.0, np.exp(1j * phi)])
    gate = np.kron(h, np.eye(d)) @ np.kron(phase, np.eye(d)) @ cu @ np.kron(h, np.eye(d))
    state = gate @ np.kron(KET0, rho) @ gate.conj().T
    return np.trace(state[:d, :d]).real


class TestProbZeroExact:
    def test_identity(self, rng):
        assert prob_zero_exact(np.eye(3), random_density(3, rng)) == pytest.approx(1.0)

    def test_swap_on_mixed_pair(self):
        rho = np.kron(np.eye(2) / 2, np.eye(2) / 2)
        assert prob_zero_exact(swap_operator(2), rho) == pytest.approx(0.75, abs=1e-15)

    def test_zero_overlap(self):
        assert prob_zero_exact(np.diag([1, -1]), PLUS) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("phi", [0.0, 0.3, -math.pi / 2, 2.0, math.pi])
    def test_matches_gate_level_circuit(self, rng, phi):
        u = random_unitary(3, rng)
        rho = random_density(3, rng).matrix
        assert prob_zero_exact(u, rho, phi) == pytest.approx(circuit_prob_zero(u, rho, phi), abs=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            prob_zero_exact(np.diag([1.0, 0.5]), np.eye(2) / 2)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            prob_zero_exact(np.eye(3), np.eye(2) / 2)


class TestRun:
    def test_identical_pure_states(self):
        est = run(InterferometerRun(swap_operator(2), np.kron(KET0, KET0)))
        assert est.v == pytest.approx(1.0)
        assert est.stderr_p0 == 0.0
        assert est.shots_used == 0

    def test_orthogonal_states(self):
        est = run(InterferometerRun(swap_operator(2), np.kron(KET0, KET1)))
        assert est.v == pytest.approx(0.0, abs=1e-15)
        assert est.p0 == pytest.approx(0.5)

    def test_sampled_orthogonal(self):
        shots = 10**6
        est = run(InterferometerRun(swap_operator(2), np.kron(KET0, KET1), shots=shots, seed=11))
        assert abs(est.v) <= 4 / math.sqrt(shots)
        assert est.stderr_p0 == pytest.approx(math.sqrt(est.p0 * (1 - est.p0) / shots))
        assert est.shots_used == shots

    def test_deterministic(self, rng):
        rho = np.kron(random_density(2, rng).matrix, random_density(2, rng).matrix)
        a = run(InterferometerRun(swap_operator(2), rho, shots=1000, seed=5))
        b = run(InterferometerRun(swap_operator(2), rho, shots=1000, seed=5))
        c = run(InterferometerRun(swap_operator(2), rho, shots=1000, seed=6))
        assert a == b
        assert a != c

    def test_sampled_requires_shots(self):
        with pytest.raises(ValueError):
            InterferometerRun(np.eye(2), np.eye(2) / 2, shots=0, mode="sampled")
        with pytest.raises(ValueError):
            InterferometerRun(np.eye(2), np.eye(2) / 2, shots=-1)

    def test_invalid_state_rejected(self):
        with pytest.raises(ValueError):
            InterferometerRun(np.eye(2), np.diag([1.5, -0.5]))


@pytest.mark.parametrize("shots", [10**3, 10**4, 10**5, 10**6])
def test_sampling_consistency_hoeffding(shots):
    u = swap_operator(2)
    rho = np.kron(KET0, PLUS)
    p0 = prob_zero_exact(u, rho)
    hits = 0
    for seed in range(200):
        est = run(InterferometerRun(u, rho, shots=shots, seed=seed))
        hits += abs(est.p0 - p0) <= 2 / math.sqrt(shots)
    assert hits >= 198


def test_sample_zero_count_distribution():
    # binomial mean and variance from the inverse-CDF sampler
    rng = np.random.default_rng(0)
    counts = np.array([sample_zero_count(0.3, 50, rng) for _ in range(20000)])
    assert counts.mean() == pytest.approx(15.0, abs=0.1)
    assert counts.var() == pytest.approx(50 * 0.3 * 0.7, rel=0.05)
    assert counts.min() >= 0 and counts.max() <= 50


def test_sample_zero_count_monotone_coupling():
    for seed in range(50):
        lo = sample_zero_count(0.40, 1000, _rng.stream(seed, "x"))
        hi = sample_zero_count(0.41, 1000, _rng.stream(seed, "x"))
        assert lo <= hi


class TestTraceEstimate:
    def test_global_phase(self):
        est = estimate_tr_rho_u(np.exp(1j * math.pi / 4) * np.eye(2), np.eye(2) / 2)
        assert est.v == pytest.approx(1.0, abs=1e-12)
        assert est.alpha == pytest.approx(math.pi / 4, abs=1e-12)

    def test_swap_product_is_real(self, rng):
        a = random_density(2, rng).matrix
        b = random_density(2, rng).matrix
        est = estimate_tr_rho_u(swap_operator(2), np.kron(a, b))
        assert est.alpha == pytest.approx(0.0, abs=1e-12)
        assert est.v == pytest.approx(np.trace(a @ b).real, abs=1e-12)

    def test_random_unitary(self, rng):
        for d in (2, 3, 5):
            u = random_unitary(d, rng)
            rho = random_density(d, rng).matrix
            est = estimate_tr_rho_u(u, rho)
            assert abs(est.value - np.trace(rho @ u)) <= 1e-12

    def test_alpha_range(self):
        est = estimate_tr_rho_u(-np.eye(2), np.eye(2) / 2)
        assert est.alpha == pytest.approx(math.pi)

    def test_sampled(self, rng):
        u = random_unitary(2, rng)
        rho = random_density(2, rng).matrix
        est = estimate_tr_rho_u(u, rho, shots=10**6, seed=1)
        assert abs(est.value - np.trace(rho @ u)) <= 6 * max(est.stderr_re, est.stderr_im)
        assert est.shots_used == 2 * 10**6


def test_fringe_sweep_recovers_visibility_and_phase(rng):
    u = random_unitary(3, rng)
    rho = random_density(3, rng).matrix
    t = np.trace(rho @ u)
    phis = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    probs = np.array([prob_zero_exact(u, rho, phi) for phi in phis])
    # Pr(phi) = 1/2 + (a cos phi - b sin phi)/2 with a + ib = v e^{i alpha}
    design = np.column_stack([np.cos(phis), -np.sin(phis)]) / 2
    (a, b), *_ = np.linalg.lstsq(design, probs - 0.5, rcond=None)
    assert math.hypot(a, b) == pytest.approx(abs(t), abs=1e-9)
    assert math.atan2(b, a) == pytest.approx(np.angle(t), abs=1e-9)


class TestOverlap:
    def test_maximally_mixed(self):
        assert overlap(np.eye(2) / 2, np.eye(2) / 2).v == pytest.approx(0.5)

    def test_pure_with_itself(self, rng):
        psi = random_pure_state(3, rng)
        assert overlap(psi, psi).v == pytest.approx(1.0, abs=1e-12)

    def test_random_qutrits(self, rng):
        for _ in range(20):
            a = random_density(3, rng)
            b = random_density(3, rng)
            assert abs(overlap(a, b).v - np.trace(a.matrix @ b.matrix).real) <= 1e-12

    def test_mismatch(self):
        with pytest.raises(ValueError):
            overlap(np.eye(2) / 2, np.eye(3) / 3)

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            overlap(np.diag([0.6, 0.6]), np.eye(2) / 2)

    def test_density_operator_passthrough(self):
        rho = validate_density(np.eye(2) / 2)
        assert overlap(rho, rho, shots=100, seed=1).shots_used == 100
