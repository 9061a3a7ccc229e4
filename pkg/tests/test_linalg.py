import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cswap_estimator.linalg import (
    HermiticityError,
    NormError,
    PositivityError,
    PureState,
    TraceError,
    eig_hermitian,
    kron,
    max_entangled_state,
    partial_trace,
    partial_transpose,
    swap_operator,
    validate_density,
)
from cswap_estimator.random_states import random_density, random_hermitian, random_pure_state


def loop_kron(a, b):
    p, q = a.shape
    r, s = b.shape
    out = np.zeros((p * r, q * s), dtype=complex)
    for i in range(p):
        for j in range(q):
            for k in range(r):
                for l in range(s):
                    out[r * i + k, s * j + l] = a[i, j] * b[k, l]
    return out


def loop_partial_trace(m, d_a, d_b, keep):
    if keep == "A":
        out = np.zeros((d_a, d_a), dtype=complex)
        for i in range(d_a):
            for j in range(d_a):
                out[i, j] = sum(m[i * d_b + k, j * d_b + k] for k in range(d_b))
    else:
        out = np.zeros((d_b, d_b), dtype=complex)
        for k in range(d_b):
            for l in range(d_b):
                out[k, l] = sum(m[i * d_b + k, i * d_b + l] for i in range(d_a))
    return out


def loop_partial_transpose_b(m, d_a, d_b):
    out = np.zeros_like(m)
    for i in range(d_a):
        for k in range(d_b):
            for j in range(d_a):
                for l in range(d_b):
                    out[i * d_b + k, j * d_b + l] = m[i * d_b + l, j * d_b + k]
    return out


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_basis_projector(self):
        out = kron(np.diag([1, 0]), np.diag([0, 1]))
        expected = np.zeros((4, 4))
        expected[1, 1] = 1
        np.testing.assert_array_equal(out, expected)

    def test_index_formula(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        np.testing.assert_allclose(kron(a, b), loop_kron(a, b), atol=1e-15)

    def test_rectangular(self, rng):
        a = rng.normal(size=(2, 3))
        b = rng.normal(size=(3, 1))
        np.testing.assert_allclose(kron(a, b), loop_kron(a, b), atol=1e-15)


class TestSwap:
    def test_one_dimensional(self):
        np.testing.assert_array_equal(swap_operator(1), [[1]])

    def test_qubit(self):
        expected = np.eye(4)[[0, 2, 1, 3]]
        np.testing.assert_array_equal(swap_operator(2), expected)

    def test_product_states_d3(self, rng):
        v = swap_operator(3)
        for _ in range(100):
            psi = random_pure_state(3, rng).amplitudes
            phi = random_pure_state(3, rng).amplitudes
            np.testing.assert_allclose(v @ np.kron(psi, phi), np.kron(phi, psi), atol=1e-14)

    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 8])
    def test_involution_and_hermitian(self, d):
        v = swap_operator(d)
        assert np.max(np.abs(v @ v - np.eye(d * d))) <= 1e-14
        assert np.max(np.abs(v - v.conj().T)) <= 1e-14

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_trace_identity(self, rng, d):
        v = swap_operator(d)
        for _ in range(100):
            a = random_density(d, rng).matrix
            b = random_density(d, rng).matrix
            assert abs(np.trace(v @ np.kron(a, b)) - np.trace(a @ b)) <= 1e-12

    def test_rejects_zero_dim(self):
        with pytest.raises(ValueError):
            swap_operator(0)


class TestMaxEntangled:
    def test_trivial(self):
        np.testing.assert_array_equal(max_entangled_state(1).amplitudes, [1])

    def test_qubit(self):
        np.testing.assert_allclose(max_entangled_state(2).amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_reduced_states_maximally_mixed(self, d):
        p = max_entangled_state(d).projector()
        np.testing.assert_allclose(loop_partial_trace(p, d, d, "A"), np.eye(d) / d, atol=1e-15)
        np.testing.assert_allclose(loop_partial_trace(p, d, d, "B"), np.eye(d) / d, atol=1e-15)


class TestPartialTranspose:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_swap_is_scaled_partial_transpose_of_p_plus(self, d):
        # the index identity sum_ij |i><j| (x) |j><i| = V fixes the constant: V = d * P+^{T_B}
        p = max_entangled_state(d).projector()
        np.testing.assert_allclose(partial_transpose(d * p, d, d, "B"), swap_operator(d), atol=1e-15)
        np.testing.assert_allclose(partial_transpose(swap_operator(d), d, d, "B"), d * p, atol=1e-15)
        assert np.trace(swap_operator(d)).real == pytest.approx(d)
        assert np.trace(partial_transpose(p, d, d, "B")).real == pytest.approx(1.0)

    @pytest.mark.parametrize("d", [2, 3])
    def test_trace_v_rho_against_p_plus(self, rng, d):
        p = max_entangled_state(d).projector()
        v = swap_operator(d)
        for _ in range(20):
            rho = random_density(d * d, rng).matrix
            lhs = np.trace(v @ rho)
            rhs = d * np.trace(partial_transpose(rho, d, d, "B") @ p)
            assert abs(lhs - rhs) <= 1e-12

    def test_product(self, rng):
        a = random_density(2, rng).matrix
        b = random_density(3, rng).matrix
        np.testing.assert_allclose(partial_transpose(np.kron(a, b), 2, 3, "B"), np.kron(a, b.T), atol=1e-15)
        np.testing.assert_allclose(partial_transpose(np.kron(a, b), 2, 3, "A"), np.kron(a.T, b), atol=1e-15)

    def test_against_loops(self, rng):
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        np.testing.assert_allclose(partial_transpose(m, 2, 3, "B"), loop_partial_transpose_b(m, 2, 3))

    @pytest.mark.parametrize("sub", ["A", "B"])
    def test_involution(self, rng, sub):
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        np.testing.assert_array_equal(partial_transpose(partial_transpose(m, 3, 2, sub), 3, 2, sub), m)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            partial_transpose(np.eye(5), 2, 2)

    def test_bad_subsystem(self):
        with pytest.raises(ValueError):
            partial_transpose(np.eye(4), 2, 2, "C")


class TestPartialTrace:
    def test_product(self, rng):
        a = random_density(2, rng).matrix
        b = random_density(3, rng).matrix
        np.testing.assert_allclose(partial_trace(np.kron(a, b), 2, 3, "A"), a, atol=1e-15)
        np.testing.assert_allclose(partial_trace(np.kron(a, b), 2, 3, "B"), b, atol=1e-15)

    def test_bell_reduction(self):
        p = max_entangled_state(2).projector()
        np.testing.assert_allclose(partial_trace(p, 2, 2, "B"), np.eye(2) / 2, atol=1e-15)

    def test_trace_preserved(self, rng):
        for _ in range(20):
            rho = random_density(4, rng)
            assert abs(np.trace(partial_trace(rho, 2, 2, "A")) - 1) <= 1e-12

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (4, 2)])
    @pytest.mark.parametrize("keep", ["A", "B"])
    def test_against_loops(self, rng, dims, keep):
        n = dims[0] * dims[1]
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        np.testing.assert_allclose(partial_trace(m, *dims, keep), loop_partial_trace(m, *dims, keep), atol=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            partial_trace(np.eye(6), 2, 2)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    d_a=st.integers(1, 4),
    d_b=st.integers(1, 4),
)
def test_partial_trace_recovers_kron_factors(seed, d_a, d_b):
    rng = np.random.default_rng(seed)
    a = random_density(d_a, rng).matrix
    b = random_density(d_b, rng).matrix
    joint = kron(a, b)
    np.testing.assert_allclose(partial_trace(joint, d_a, d_b, "A"), a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(joint, d_a, d_b, "B"), b, atol=1e-12)


class TestEig:
    def test_identity(self):
        lam, _ = eig_hermitian(np.eye(2))
        np.testing.assert_allclose(lam, [1, 1])

    def test_diagonal(self):
        lam, _ = eig_hermitian(np.diag([0.75, 0.25]))
        np.testing.assert_allclose(lam, [0.25, 0.75])

    def test_reconstruction(self, rng):
        h = random_hermitian(6, rng)
        lam, vecs = eig_hermitian(h)
        assert np.all(np.diff(lam) >= 0)
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(6))) <= 1e-12
        recon = sum(l * np.outer(vecs[:, i], vecs[:, i].conj()) for i, l in enumerate(lam))
        assert np.linalg.norm(h - recon) <= 1e-9

    def test_deterministic(self, rng):
        h = random_hermitian(5, rng)
        a, va = eig_hermitian(h)
        b, vb = eig_hermitian(h.copy())
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(va, vb)

    def test_rejects_non_hermitian(self):
        with pytest.raises(HermiticityError):
            eig_hermitian(np.array([[0, 1], [0, 0]]))


class TestValidateDensity:
    def test_accepts_mixed(self):
        rho = validate_density(np.eye(2) / 2)
        assert rho.dim == 2
        assert not rho.matrix.flags.writeable

    def test_negative_eigenvalue(self):
        with pytest.raises(PositivityError) as info:
            validate_density(np.diag([1.5, -0.5]))
        assert info.value.magnitude == pytest.approx(-0.5)
        assert info.value.invariant == "positivity"

    def test_bad_trace(self):
        with pytest.raises(TraceError) as info:
            validate_density(np.diag([0.6, 0.6]))
        assert info.value.magnitude == pytest.approx(1.2)

    def test_not_hermitian(self):
        with pytest.raises(HermiticityError) as info:
            validate_density(np.array([[0.5, 0.1], [0.3, 0.5]]))
        assert info.value.magnitude == pytest.approx(0.2)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            validate_density(np.array([[np.nan, 0], [0, 1]]))

    def test_not_square(self):
        with pytest.raises(ValueError):
            validate_density(np.ones((2, 3)) / 2)


def test_pure_state_norm():
    with pytest.raises(NormError):
        PureState([1.0, 1.0])
    psi = PureState.normalized([1.0, 1.0j])
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)
