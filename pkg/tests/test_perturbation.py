import numpy as np
import pytest

from floqheat import SI, occupation
from floqheat.master import assemble_Mn, power_matrix
from floqheat.perturbation import (CLOSED_FORM_ORIENTATION, assemble_Npert,
                                   chain_contrasts, delta_n14_closed_form,
                                   delta_n14_general,
                                   delta_power_weak_coupling,
                                   perturbation_result, power_second_order,
                                   write_perturbation_csv)

from conftest import COUPLING, DRIVE, KAPPA, OMEGA0, T_HOT, chain


def exact_delta(beta_frac, theta_pi, n_max=15):
    net, mod = chain(beta_frac, theta_pi)
    p14 = power_matrix(net.with_hot_bath(0, T_HOT), mod, n_max).P[0, 3]
    p41 = power_matrix(net.with_hot_bath(3, T_HOT), mod, n_max).P[3, 0]
    return p14, p41


class TestAssembleNpert:
    def test_zero_drive_reduces_to_static_block(self):
        net, mod = chain(0.0)
        assert np.array_equal(assemble_Npert(net, mod), assemble_Mn(net, 0, mod.Omega))

    def test_real_contrasts_keep_reciprocity(self):
        from floqheat.master import moment_index_map
        imap = moment_index_map(4)
        for theta_pi in (0.0, 1.0):
            net, mod = chain(0.03, theta_pi)
            ninv = np.linalg.inv(assemble_Npert(net, mod))
            a = ninv[imap.index(3, 3), imap.index(0, 0)]
            b = ninv[imap.index(0, 0), imap.index(3, 3)]
            assert a == pytest.approx(b, rel=1e-12)

    def test_complex_contrasts_break_reciprocity(self):
        from floqheat.master import moment_index_map
        imap = moment_index_map(4)
        net, mod = chain(0.03, 0.5)
        ninv = np.linalg.inv(assemble_Npert(net, mod))
        a = ninv[imap.index(3, 3), imap.index(0, 0)].real
        b = ninv[imap.index(0, 0), imap.index(3, 3)].real
        assert abs(a - b) > 1e-6 * abs(a)


class TestPowerSecondOrder:
    def test_zero_drive_matches_static_solver(self):
        net, mod = chain(0.0)
        for variant in ("matrix_inverse", "neumann"):
            p14, p41 = power_second_order(net, mod, variant, T_hot=T_HOT)
            exact14, exact41 = exact_delta(0.0, 0.5, n_max=2)
            assert p14 == pytest.approx(exact14, rel=1e-10)
            assert p41 == pytest.approx(exact41, rel=1e-10)

    def test_small_drive_tracks_exact_power(self):
        exact14, _ = exact_delta(0.02, 0.5)
        net, mod = chain(0.02, 0.5)
        p14_a, _ = power_second_order(net, mod, "matrix_inverse", T_HOT)
        assert p14_a == pytest.approx(exact14, rel=0.05)

    def test_both_variants_within_ten_percent_at_weak_drive(self):
        exact14, exact41 = exact_delta(0.01, 0.5)
        d_exact = exact14 - exact41
        net, mod = chain(0.01, 0.5)
        for variant in ("matrix_inverse", "neumann"):
            p14, p41 = power_second_order(net, mod, variant, T_HOT)
            assert (p14 - p41) == pytest.approx(d_exact, rel=0.10)

    def test_full_inverse_outlasts_neumann(self):
        # the direct inverse stays useful to larger drive than the
        # first-order expansion
        for beta_frac in (0.04, 0.06):
            exact14, _ = exact_delta(beta_frac, 0.5)
            net, mod = chain(beta_frac, 0.5)
            err_a = abs(power_second_order(net, mod, "matrix_inverse", T_HOT)[0]
                        / exact14 - 1)
            err_n = abs(power_second_order(net, mod, "neumann", T_HOT)[0]
                        / exact14 - 1)
            assert err_a < err_n

    def test_unknown_variant(self):
        net, mod = chain(0.01)
        with pytest.raises(ValueError):
            power_second_order(net, mod, "bogus")


class TestClosedForms:
    def test_both_printed_forms_are_identical(self):
        # the flat form and the kernel-plus-prefactor form must agree to
        # roundoff for any inputs
        rng = np.random.default_rng(3)
        for _ in range(50):
            omega0 = 10 ** rng.uniform(13, 15)
            kappa = omega0 * rng.uniform(0.001, 0.05)
            g = kappa * rng.uniform(0.001, 0.1)
            beta = omega0 * rng.uniform(0.0, 0.08)
            drive = omega0 * rng.uniform(0.01, 0.2)
            theta = rng.uniform(-np.pi, np.pi)
            n_occ = rng.uniform(0.001, 2.0)
            flat = delta_power_weak_coupling(omega0, n_occ, g, kappa, beta,
                                             drive, theta)
            viaN = (4.0 * SI.hbar * omega0 * n_occ * kappa**2
                    * delta_n14_closed_form(g, kappa, beta, drive, theta))
            assert flat == pytest.approx(viaN, rel=1e-12, abs=1e-300)

    def test_general_kernel_reduces_to_chain_form(self):
        for theta in (-2.0, -0.5, 0.3, 1.2, 2.9):
            _, mod = chain(0.02, theta / np.pi)
            eta = chain_contrasts(mod)
            general = delta_n14_general(COUPLING, KAPPA, mod.beta, DRIVE, eta)
            closed = delta_n14_closed_form(COUPLING, KAPPA, mod.beta, DRIVE, theta)
            assert general == pytest.approx(closed, rel=1e-12, abs=1e-300)

    def test_sine_law(self):
        vals = []
        for theta in (0.2, 0.9, 1.4, 2.2, -1.1):
            v = delta_n14_closed_form(COUPLING, KAPPA, 0.02 * OMEGA0, DRIVE, theta)
            vals.append(v / np.sin(theta))
        assert np.ptp(vals) <= 1e-12 * abs(vals[0])

    def test_zeros(self):
        # zero to machine precision: sin(pi) itself carries ~1e-16
        ref_n = abs(delta_n14_closed_form(COUPLING, KAPPA, 1e12, DRIVE,
                                          0.5 * np.pi))
        ref_p = abs(delta_power_weak_coupling(OMEGA0, 0.01, COUPLING, KAPPA,
                                              1e12, DRIVE, 0.5 * np.pi))
        for theta in (0.0, np.pi, -np.pi):
            assert abs(delta_n14_closed_form(COUPLING, KAPPA, 1e12, DRIVE,
                                             theta)) <= 1e-14 * ref_n
            assert abs(delta_power_weak_coupling(OMEGA0, 0.01, COUPLING, KAPPA,
                                                 1e12, DRIVE, theta)) <= 1e-14 * ref_p

    def test_static_drive_limit_vanishes(self):
        assert delta_n14_closed_form(COUPLING, KAPPA, 1e12, 1e-30, 0.5 * np.pi) == \
            pytest.approx(0.0, abs=1e-40)

    def test_quadratic_in_drive(self):
        v1 = delta_n14_closed_form(COUPLING, KAPPA, 1e12, DRIVE, 1.0)
        v2 = delta_n14_closed_form(COUPLING, KAPPA, 2e12, DRIVE, 1.0)
        assert v2 == pytest.approx(4.0 * v1, rel=1e-12)


class TestOrientationCrossCheck:
    def test_printed_form_orientation_against_exact(self):
        # the mandated numerical cross-check: which sign of the printed
        # closed form matches the full solvers in the small-drive limit
        exact14, exact41 = exact_delta(0.005, 0.5)
        d_exact = exact14 - exact41
        n_occ = occupation(T_HOT, OMEGA0)
        printed = delta_power_weak_coupling(OMEGA0, n_occ, COUPLING, KAPPA,
                                            0.005 * OMEGA0, DRIVE, 0.5 * np.pi)
        oriented = CLOSED_FORM_ORIENTATION * printed
        print(f"\norientation report: exact dP = {d_exact:+.6e} W, "
              f"printed form = {printed:+.6e} W, "
              f"orientation factor = {CLOSED_FORM_ORIENTATION:+g}")
        assert oriented == pytest.approx(d_exact, rel=0.05)
        assert printed == pytest.approx(-d_exact, rel=0.05)

    def test_result_estimates_cohere_at_weak_drive(self):
        net, mod = chain(0.01, 0.5)
        res = perturbation_result(net, mod, T_HOT)
        estimates = [res.deltaP_matrixform, res.deltaP_expansion,
                     res.deltaP_closedform]
        mid = np.mean(estimates)
        assert all(abs(e / mid - 1) <= 0.10 for e in estimates)
        assert res.P14 > res.P41  # recorded sign at theta = +pi/2

    def test_asymptotic_agreement_improves(self):
        ratios = []
        for beta_frac in (0.02, 0.01, 0.005):
            exact14, exact41 = exact_delta(beta_frac, 0.5)
            net, mod = chain(beta_frac, 0.5)
            res = perturbation_result(net, mod, T_HOT)
            ratios.append(abs(res.deltaP_closedform / (exact14 - exact41) - 1))
        assert ratios[0] > ratios[1] > ratios[2]


class TestResultPlumbing:
    def test_requires_symmetric_chain(self):
        from floqheat import ModulationProtocol, ResonatorNetwork
        net = ResonatorNetwork(omega=[OMEGA0] * 3, g=np.zeros((3, 3)),
                               kappa=[KAPPA] * 3, T=[0.0] * 3)
        mod = ModulationProtocol(beta=0.0, Omega=DRIVE, theta=np.zeros(3),
                                 mask=[0, 1, 0])
        with pytest.raises(ValueError):
            perturbation_result(net, mod)

    def test_csv_format(self, tmp_path):
        path = tmp_path / "pert.csv"
        write_perturbation_csv(path, [(1e12, 0.5, 1e-23, 1.1e-23, 1.2e-23, 0.9e-23)])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "beta,theta,dP_exact_W,dP_pa1_W,dP_pa2_W,dP_closed_W"
        assert len(lines) == 2
