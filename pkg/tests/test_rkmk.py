"""Integrator-step tests: tableau data, exactness limits, free-motion
invariants, and the independent action-gradient oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forced_ep import so3
from forced_ep.errors import UnknownTableau
from forced_ep.rkmk import (VARIATIONAL_METHODS, initial_record, residual,
                            rk4_baseline_step, step, tableau)
from forced_ep.systems import free_rigid_body, lie_poisson_rhs
from forced_ep.verify import check_action_gradient

ALL_METHODS = VARIATIONAL_METHODS + ("rk4",)

STAGE_COUNTS = {"gauss1": 1, "gauss2": 2, "gauss3": 3,
                "lobatto2": 2, "lobatto3": 3, "rk4": 4}

COLLOCATION_METHODS = VARIATIONAL_METHODS  # rk4 is not a collocation scheme


class TestTableaus:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_stage_count_and_weight_sum(self, method):
        tab = tableau(method)
        assert tab.stages == STAGE_COUNTS[method]
        assert abs(tab.b.sum() - 1.0) < 1e-14
        assert np.all(tab.b != 0.0)

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_quadrature_exact_to_advertised_order(self, method):
        tab = tableau(method)
        c = tab.c
        for k in range(1, tab.order + 1):
            assert abs(np.sum(tab.b * c ** (k - 1)) - 1.0 / k) < 1e-13, k

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_quadrature_order_is_sharp(self, method):
        tab = tableau(method)
        k = tab.order + 1
        assert abs(np.sum(tab.b * tab.c ** (k - 1)) - 1.0 / k) > 1e-4

    @pytest.mark.parametrize("method", COLLOCATION_METHODS)
    def test_collocation_stage_consistency(self, method):
        tab = tableau(method)
        c = tab.c
        for k in range(1, tab.stages + 1):
            lhs = tab.a @ c ** (k - 1)
            assert np.max(np.abs(lhs - c ** k / k)) < 1e-13, k

    def test_unknown_tableau_raises(self):
        with pytest.raises(UnknownTableau):
            tableau("midpointish")


class TestFreeMotion:
    @pytest.mark.parametrize("method", ALL_METHODS)
    @pytest.mark.parametrize("ret_name", ["exp", "cay"])
    def test_momentum_coadjoint_transport_exact(self, free_system, omega0,
                                                method, ret_name):
        tab = tableau(method)
        r = so3.get_retraction(ret_name)
        rec0 = initial_record(free_system, np.eye(3), omega0)
        rec1 = step(free_system, tab, r, 0.05, rec0)
        expected = r.tau(rec1.stage_state.xi).T @ rec0.momentum
        assert np.max(np.abs(rec1.momentum - expected)) < 1e-14
        assert abs(np.linalg.norm(rec1.momentum)
                   - np.linalg.norm(rec0.momentum)) < 1e-13

    def test_casimir_exact_over_long_run(self, free_system, omega0):
        tab = tableau("gauss2")
        r = so3.CAYLEY
        rec = initial_record(free_system, np.eye(3), omega0)
        c0 = rec.casimirs[0]
        for _ in range(200):
            rec = step(free_system, tab, r, 0.05, rec)
            assert abs(rec.casimirs[0] - c0) < 1e-12 * max(abs(c0), 1.0)

    def test_spatial_momentum_invariant(self, free_system, omega0):
        tab = tableau("lobatto3")
        r = so3.EXP
        rec = initial_record(free_system, np.eye(3), omega0)
        spatial0 = rec.g @ rec.momentum
        for _ in range(100):
            rec = step(free_system, tab, r, 0.05, rec)
        assert np.max(np.abs(rec.g @ rec.momentum - spatial0)) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(eta=st.tuples(*[st.floats(-2.0, 2.0) for _ in range(3)]),
           method=st.sampled_from(ALL_METHODS),
           ret_name=st.sampled_from(["exp", "cay"]))
    def test_casimir_exact_property(self, eta, method, ret_name):
        system = free_rigid_body()
        eta0 = np.asarray(eta)
        if np.linalg.norm(eta0) < 0.1:
            eta0 = eta0 + np.array([0.5, 0.0, 0.0])
        rec0 = initial_record(system, np.eye(3), eta0)
        rec1 = step(system, tableau(method),
                    so3.get_retraction(ret_name), 0.01, rec0)
        scale = max(abs(rec0.casimirs[0]), 1.0)
        assert abs(rec1.casimirs[0] - rec0.casimirs[0]) < 1e-12 * scale


class TestConsistency:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_zero_step_residual_vanishes(self, llg_system, omega0, method):
        tab = tableau(method)
        lam = llg_system.dl(omega0)
        H = np.tile(omega0, (tab.stages, 1))
        res = residual(llg_system, tab, so3.CAYLEY, 0.0, lam, H)
        assert np.max(np.abs(res)) < 1e-15

    @pytest.mark.parametrize("method", ALL_METHODS)
    @pytest.mark.parametrize("ret_name", ["exp", "cay"])
    def test_newton_converges_quickly(self, llg_system, omega0, method,
                                      ret_name):
        tab = tableau(method)
        r = so3.get_retraction(ret_name)
        rec0 = initial_record(llg_system, np.eye(3), omega0)
        rec1 = step(llg_system, tab, r, 0.1, rec0)
        assert rec1.newton_iters <= 10
        assert rec1.residual <= 1e-12

    def test_one_step_tracks_continuous_equation(self, llg_system, omega0):
        h = 1e-3
        rec0 = initial_record(llg_system, np.eye(3), omega0)
        rec1 = step(llg_system, tableau("gauss2"), so3.CAYLEY, h, rec0)
        rate = (rec1.momentum - rec0.momentum) / h
        assert np.linalg.norm(rate - lie_poisson_rhs(llg_system, rec0.momentum)) < 0.01

    def test_llg_energy_non_increasing(self, llg_system, omega0):
        rec = initial_record(llg_system, np.eye(3), omega0)
        prev = rec.energy
        for _ in range(50):
            rec = step(llg_system, tableau("gauss2"), so3.CAYLEY, 0.01, rec)
            assert rec.energy <= prev + 1e-10
            prev = rec.energy

    def test_relaxed_energy_flat_casimir_grows(self, relaxed_system, omega0):
        rec = initial_record(relaxed_system, np.eye(3), omega0)
        e0 = rec.energy
        prev_c = rec.casimirs[0]
        for _ in range(50):
            rec = step(relaxed_system, tableau("gauss2"), so3.CAYLEY, 0.01, rec)
            assert rec.casimirs[0] >= prev_c - 1e-10
            prev_c = rec.casimirs[0]
        assert abs(rec.energy - e0) < 1e-8


class TestActionGradientOracle:
    def test_all_cases_match_duplicated_action_gradient(self):
        results = check_action_gradient()
        assert len(results) == 24
        failures = [r.line() for r in results if not r.passed]
        assert not failures, "\n".join(failures)


class TestBaseline:
    def test_rk4_baseline_matches_classical_scheme(self, llg_system, omega0):
        h = 0.02
        rec0 = initial_record(llg_system, np.eye(3), omega0)
        rec1 = rk4_baseline_step(llg_system, h, rec0)

        def rhs(mu):
            return lie_poisson_rhs(llg_system, mu)

        mu = rec0.momentum
        k1 = rhs(mu)
        k2 = rhs(mu + 0.5 * h * k1)
        k3 = rhs(mu + 0.5 * h * k2)
        k4 = rhs(mu + h * k3)
        expected = mu + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        assert np.max(np.abs(rec1.momentum - expected)) < 1e-14

    def test_rk4_baseline_fourth_order(self, llg_system, omega0):
        def final_momentum(h, n):
            rec = initial_record(llg_system, np.eye(3), omega0)
            for _ in range(n):
                rec = rk4_baseline_step(llg_system, h, rec)
            return rec.momentum

        coarse = final_momentum(0.02, 25)
        mid = final_momentum(0.01, 50)
        fine = final_momentum(0.005, 100)
        ratio = (np.linalg.norm(coarse - fine) - np.linalg.norm(mid - fine)) \
            / np.linalg.norm(mid - fine)
        err_coarse = np.linalg.norm(coarse - mid)
        err_mid = np.linalg.norm(mid - fine)
        order = np.log2(err_coarse / err_mid)
        assert 3.5 < order < 4.6, (order, ratio)
