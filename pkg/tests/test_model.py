import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dksweep.model import (
    BlockSystem,
    PhysicalParams,
    block_coeffs,
    block_hamiltonian,
    detuning,
    full_hamiltonian,
    pair_indices,
    reduce_to_block,
    unpaired_indices,
)
from dksweep.tdse import integrate_schrodinger


def bare(k=1.0, t_ramp=1.0, **kw):
    return PhysicalParams(k=k, t_ramp=t_ramp, **kw)


class TestParams:
    def test_rejects_nonpositive_chi(self):
        with pytest.raises(ValueError):
            PhysicalParams(chi=0.0)
        with pytest.raises(ValueError):
            PhysicalParams(chi=-1.0)

    def test_rejects_bad_sweep(self):
        with pytest.raises(ValueError):
            PhysicalParams(k=0.0)
        with pytest.raises(ValueError):
            PhysicalParams(t_ramp=-1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PhysicalParams(omega_b=math.nan)
        with pytest.raises(ValueError):
            PhysicalParams(u_x=math.inf)

    def test_derived_accessors(self):
        p = PhysicalParams(omega_b=1.0, omega_f=2.0, u_f=0.5, u_x=0.3, u_b=0.4,
                           k=2.0, t_ramp=1.0)
        assert p.detuning_base == 2 * 2.0 - 1.0 + 0.5
        assert p.Omega_f == 2.0 + 0.25
        assert p.m_scatter == 0.3 - 0.2
        # Omega_b tracks the time-dependent detuning
        assert p.Omega_b(0.0) == pytest.approx(1.0 + p.detuning_base + 0.3)


class TestDetuning:
    def test_zero_at_zero_time(self):
        assert detuning(0.0, bare()) == 0.0

    def test_asymptote(self):
        # tanh saturates to 1.0 exactly in floats well before |t| = 30 T
        assert detuning(30.0, bare(k=1.0)) == pytest.approx(-2.0, abs=1e-12)
        assert detuning(-30.0, bare(k=1.0)) == pytest.approx(2.0, abs=1e-12)

    def test_operating_window_value(self):
        # |tanh(2)| = 0.9640...: the sweep is 96% done at t = 2 T
        p = bare(k=3.0, t_ramp=1.5)
        assert detuning(3.0, p) == pytest.approx(-2 * 3.0 * math.tanh(2.0))
        assert math.tanh(2.0) == pytest.approx(0.9640, abs=5e-5)

    def test_monotone_decreasing_and_odd(self):
        p = bare(k=2.5, omega_b=0.3, omega_f=0.1, u_f=0.2)
        ts = np.linspace(-8, 8, 201)
        vals = detuning(ts, p)
        assert np.all(np.diff(vals) < 0)
        centered = vals - p.detuning_base
        assert np.allclose(centered, -centered[::-1], atol=1e-14)

    def test_step_profile_at_zero_ramp(self):
        p = bare(k=4.0, t_ramp=0.0)
        assert detuning(1e-9, p) == -8.0
        assert detuning(-1e-9, p) == 8.0
        assert detuning(0.0, p) == 0.0


class TestBlockCoeffs:
    def test_vacuum_level(self):
        p = bare(u_x=3.0, u_b=1.7, chi=2.5)
        assert block_coeffs(0, p) == (0.0, 2.5)

    def test_direct_arithmetic(self):
        p = bare(u_x=1.0, u_b=1.0, chi=2.0)
        a, c = block_coeffs(3, p)
        assert a == pytest.approx(1.5)
        assert c == pytest.approx(4.0)

    def test_cancellation_case(self):
        p = bare(u_x=0.5, u_b=1.0, chi=1.0)
        a, c = block_coeffs(5, p)
        assert a == 0.0
        assert c == pytest.approx(math.sqrt(6.0))

    def test_rejects_negative_level(self):
        with pytest.raises(ValueError):
            block_coeffs(-1, bare())

    def test_coupling_increasing_offset_linear(self):
        p = bare(u_x=0.7, u_b=0.2)
        coeffs = [block_coeffs(n, p) for n in range(12)]
        cs = [c for _, c in coeffs]
        assert all(c2 > c1 for c1, c2 in zip(cs, cs[1:]))
        for n, (a, _) in enumerate(coeffs):
            assert a == pytest.approx(n * p.m_scatter, abs=1e-14)


class TestBlockHamiltonian:
    def test_resonant_vacuum_block(self):
        sys = BlockSystem.from_params(bare(chi=1.3, k=5.0), 0)
        h = block_hamiltonian(sys, 0.0)
        assert np.allclose(h, [[0, 1.3], [1.3, 0]])

    def test_asymptotic_form(self):
        p = bare(u_x=0.5, k=7.0, t_ramp=2.0)
        sys = BlockSystem.from_params(p, 3)
        h = block_hamiltonian(sys, -60.0 * p.t_ramp)
        d_expected = sys.a - p.k
        assert h[0, 0] == pytest.approx(d_expected, abs=1e-12)
        assert h[1, 1] == pytest.approx(-d_expected, abs=1e-12)
        assert h[0, 1] == h[1, 0] == sys.c

    def test_hermitian_traceless_random(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = PhysicalParams(u_x=rng.uniform(-2, 2), u_b=rng.uniform(-2, 2),
                               k=rng.uniform(0.1, 50), t_ramp=rng.uniform(0, 5))
            sys = BlockSystem.from_params(p, int(rng.integers(0, 9)))
            h = block_hamiltonian(sys, rng.uniform(-20, 20))
            assert np.allclose(h, h.conj().T, atol=0)
            assert h[0, 0] + h[1, 1] == 0.0


class TestFullHamiltonian:
    def test_coupling_entries(self):
        p = bare(chi=1.7, k=3.0, u_x=0.4, u_b=0.1, omega_b=0.2)
        h = full_hamiltonian(6, 0.8, p)
        for n in range(6):
            i, j = pair_indices(n)
            assert h[i, j] == pytest.approx(1.7 * math.sqrt(n + 1))
            assert h[j, i] == h[i, j]

    def test_no_cross_subspace_coupling(self):
        p = bare(chi=2.0, k=4.0, u_x=0.3)
        h = full_hamiltonian(5, -0.3, p)
        dim = h.shape[0]
        allowed = {(i, i) for i in range(dim)}
        for n in range(5):
            i, j = pair_indices(n)
            allowed |= {(i, j), (j, i)}
        for i in range(dim):
            for j in range(dim):
                if (i, j) not in allowed:
                    assert h[i, j] == 0.0

    def test_half_difference_matches_block_offset(self):
        # derived identity: half the diagonal gap in V_n is a(n) + k tanh(t/T)
        rng = np.random.default_rng(11)
        for _ in range(50):
            p = PhysicalParams(
                omega_b=rng.uniform(-3, 3), omega_f=rng.uniform(-3, 3),
                u_f=rng.uniform(-2, 2), u_x=rng.uniform(-2, 2),
                u_b=rng.uniform(-2, 2), k=rng.uniform(0.5, 30),
                t_ramp=rng.uniform(0.1, 4))
            n_b = int(rng.integers(0, 7))
            t = rng.uniform(-15, 15)
            h = full_hamiltonian(8, t, p)
            i, j = pair_indices(n_b)
            half_diff = 0.5 * (h[i, i] - h[j, j]).real
            a, _ = block_coeffs(n_b, p)
            expected = a + p.k * math.tanh(t / p.t_ramp)
            assert half_diff == pytest.approx(expected, abs=1e-12)

    def test_rejects_small_truncation(self):
        with pytest.raises(ValueError):
            full_hamiltonian(0, 0.0, bare())

    def test_unpaired_edges(self):
        assert unpaired_indices(4) == (0, 9)
        with pytest.raises(ValueError):
            unpaired_indices(0)


class TestReduceToBlock:
    def test_matches_block_hamiltonian(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            p = PhysicalParams(
                omega_b=rng.uniform(-3, 3), omega_f=rng.uniform(-3, 3),
                u_f=rng.uniform(-2, 2), u_x=rng.uniform(-2, 2),
                u_b=rng.uniform(-2, 2), chi=rng.uniform(0.2, 3),
                k=rng.uniform(0.5, 50), t_ramp=rng.uniform(0.0, 4))
            n_max = int(rng.integers(2, 9))
            n_b = int(rng.integers(0, n_max))
            t = rng.uniform(-12, 12)
            block = reduce_to_block(full_hamiltonian(n_max, t, p), n_b)
            direct = block_hamiltonian(BlockSystem.from_params(p, n_b), t)
            assert np.max(np.abs(block - direct)) <= 1e-12

    def test_trace_shift_is_global_phase(self):
        # populations agree whether or not the mean diagonal is removed
        p = PhysicalParams(omega_b=1.2, omega_f=-0.7, u_f=0.4, u_x=0.6,
                           u_b=0.3, k=6.0, t_ramp=0.8)
        n_b = 1
        i, j = pair_indices(n_b)

        def h_shifted(t):
            full = full_hamiltonian(4, t, p)
            return np.array([[full[i, i], full[i, j]], [full[j, i], full[j, j]]])

        def h_traceless(t):
            return block_hamiltonian(BlockSystem.from_params(p, n_b), t)

        psi0 = np.array([1.0, 0.0], dtype=complex)
        span = 6.0 * p.t_ramp
        y_a, _ = integrate_schrodinger(h_shifted, -span, span, psi0, tol=1e-11)
        y_b, _ = integrate_schrodinger(h_traceless, -span, span, psi0, tol=1e-11)
        assert abs(abs(y_a[0]) ** 2 - abs(y_b[0]) ** 2) < 1e-8
        assert abs(abs(y_a[1]) ** 2 - abs(y_b[1]) ** 2) < 1e-8

    def test_out_of_range_level(self):
        h = full_hamiltonian(3, 0.0, bare())
        with pytest.raises(IndexError):
            reduce_to_block(h, 3)
        with pytest.raises(ValueError):
            reduce_to_block(h, -1)


@given(
    n_b=st.integers(min_value=0, max_value=20),
    k=st.floats(min_value=0.05, max_value=80),
    t_over_ramp=st.floats(min_value=-30, max_value=30),
    u_x=st.floats(min_value=-3, max_value=3),
    u_b=st.floats(min_value=-3, max_value=3),
)
def test_block_is_hermitian_traceless(n_b, k, t_over_ramp, u_x, u_b):
    p = PhysicalParams(u_x=u_x, u_b=u_b, k=k, t_ramp=1.0)
    h = block_hamiltonian(BlockSystem.from_params(p, n_b), t_over_ramp)
    assert h[0, 1] == h[1, 0]
    assert h[0, 0] == -h[1, 1]
    assert np.all(np.isfinite(h))
