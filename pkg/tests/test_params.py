"""Parameter records, threshold current and the eta-kappa calibration."""

from fractions import Fraction

import numpy as np
import pytest

import lkchaos as lk
from lkchaos.params import ParamError, configs_from_dict, parse_param_file


def threshold_oracle_mA():
    """Exact-rational recomputation of the threshold closed form."""
    e = Fraction(1602176634, 10 ** 28)
    tau_n = Fraction(23, 10 ** 10)
    tau_p = Fraction(25, 10 ** 13)
    g_n = Fraction(25600)  # 2.56e4 per second
    n0 = Fraction(135, 1000) * 10 ** 9
    jth = e * (1 / tau_n) * (n0 + 1 / (g_n * tau_p))
    return float(jth) * 1000


def test_threshold_default_value():
    jth = lk.threshold_current(lk.LaserParams())
    assert jth == pytest.approx(10.5e-3, abs=0.05e-3)


def test_threshold_matches_rational_oracle():
    jth_mA = lk.threshold_current(lk.LaserParams()) * 1000
    oracle = threshold_oracle_mA()
    assert jth_mA == pytest.approx(oracle, rel=1e-12)
    assert round(oracle, 2) == 10.49


def test_threshold_contrived_unit_identity():
    # bracket chosen to cancel: N0 negligible and 1/(g_n tau_p) = tau_n / e
    p = lk.LaserParams(n0=1e-30,
                       g_n=lk.E_CHARGE / (2.3e-9 * 2.5e-12))
    assert lk.threshold_current(p) == pytest.approx(1.0, rel=1e-12)


def test_threshold_scaling_properties():
    p = lk.LaserParams()
    base = lk.threshold_current(p)
    # linear in 1/tau_n
    assert lk.threshold_current(
        lk.LaserParams(tau_n=p.tau_n / 2)) == pytest.approx(2 * base, rel=1e-12)
    # doubling both N0 and 1/(g_n tau_p) doubles the result
    doubled = lk.LaserParams(n0=2 * p.n0, g_n=p.g_n / 2)
    assert lk.threshold_current(doubled) == pytest.approx(2 * base, rel=1e-12)


def test_carrier_injection_rate_identities():
    p = lk.LaserParams()
    at_threshold = lk.carrier_injection_rate(p, lk.DriveConfig(rho=1.0))
    assert at_threshold == pytest.approx(
        (1 / p.tau_n) * (p.n0 + 1 / (p.g_n * p.tau_p)), rel=1e-14)
    assert at_threshold * p.e_charge == pytest.approx(
        lk.threshold_current(p), rel=1e-14)
    assert lk.carrier_injection_rate(p, lk.DriveConfig(rho=0.0)) == 0.0
    # rho = 1.5 against the exact-rational oracle
    oracle = 1.5 * threshold_oracle_mA() / 1000 / 1.602176634e-19
    assert lk.carrier_injection_rate(
        p, lk.DriveConfig(rho=1.5)) == pytest.approx(oracle, rel=1e-12)


class TestEtaKappa:
    cal = lk.DEFAULT_CALIBRATION

    def test_table_points_exact(self):
        assert lk.eta_to_kappa(self.cal, 0.25) == 20e9
        assert lk.eta_to_kappa(self.cal, 0.031) == 5.5e9
        assert lk.eta_to_kappa(self.cal, 0.063) == 7e9
        assert lk.eta_to_kappa(self.cal, 0.125) == 11e9

    def test_midpoint_interpolation(self):
        assert lk.eta_to_kappa(self.cal, 0.1875) == pytest.approx(15.5e9)

    def test_monotone(self):
        etas = np.linspace(0.031, 0.25, 97)
        kappas = [lk.eta_to_kappa(self.cal, e) for e in etas]
        assert all(b >= a for a, b in zip(kappas, kappas[1:]))

    def test_round_trip_on_calibration_points(self):
        for kappa, eta in self.cal.points:
            assert lk.kappa_to_eta(self.cal, kappa) == eta
            assert lk.eta_to_kappa(self.cal, eta) == kappa

    def test_out_of_range_names_interval(self):
        with pytest.raises(ParamError, match=r"0.031.*0.25"):
            lk.eta_to_kappa(self.cal, 0.4)

    def test_bad_table_rejected(self):
        with pytest.raises(ParamError):
            lk.EtaKappaCalibration(points=((5.5e9, 0.1), (7e9, 0.05)))


class TestValidation:
    def test_laser_params_positive(self):
        with pytest.raises(ParamError):
            lk.LaserParams(alpha=-1)
        with pytest.raises(ParamError):
            lk.LaserParams(tau_p=0)
        with pytest.raises(ParamError):
            lk.LaserParams(epsilon=-1e-9)

    def test_feedback_phase_normalized(self):
        f = lk.FeedbackConfig(kappa=1e9, phase_c=7.0)
        assert 0 <= f.phase_c < 2 * np.pi
        assert f.phase_c == pytest.approx(7.0 - 2 * np.pi)

    def test_feedback_invalid(self):
        with pytest.raises(ParamError):
            lk.FeedbackConfig(kappa=-1)
        with pytest.raises(ParamError):
            lk.FeedbackConfig(tau_ext=0)

    def test_drive_invalid(self):
        with pytest.raises(ParamError):
            lk.DriveConfig(rho=-0.5)


class TestParamFile:
    def test_load_round_trip(self, tmp_path):
        path = tmp_path / "laser.cfg"
        path.write_text(
            "# device\n"
            "alpha = 5\n"
            "tau_p_ps = 2.5\n"
            "tau_n_ns = 2.3\n"
            "g_n_per_ps = 2.56e-8\n"
            "n0 = 1.35e8\n"
            "epsilon = 5e-7\n"
            "lambda_um = 1.55\n"
            "kappa_per_ns = 50  # strong feedback\n"
            "tau_ext_ns = 99.85\n"
            "phase_c_rad = 0\n"
            "rho = 1.5\n")
        laser, feedback, drive = lk.load_param_file(path)
        assert laser == lk.LaserParams()
        assert feedback.kappa == 50e9
        assert feedback.tau_ext == pytest.approx(99.85e-9)
        assert drive.rho == 1.5

    def test_eta_key_maps_through_calibration(self, tmp_path):
        path = tmp_path / "laser.cfg"
        path.write_text("eta_percent = 12.8\nrho = 1.5\n")
        _, feedback, _ = lk.load_param_file(path)
        assert feedback.kappa == pytest.approx(11.216e9)

    def test_unknown_key_is_hard_error(self, tmp_path):
        path = tmp_path / "laser.cfg"
        path.write_text("alpha = 5\nbogus_key = 1\n")
        with pytest.raises(ParamError, match="bogus_key"):
            parse_param_file(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "laser.cfg"
        path.write_text("alpha = 5\nalpha = 6\n")
        with pytest.raises(ParamError, match="duplicate"):
            parse_param_file(path)

    def test_kappa_and_eta_conflict(self, tmp_path):
        path = tmp_path / "laser.cfg"
        path.write_text("kappa_per_ns = 20\neta_percent = 25\n")
        with pytest.raises(ParamError, match="not both"):
            parse_param_file(path)

    def test_dict_unknown_key(self):
        with pytest.raises(ParamError):
            configs_from_dict({"not_a_key": 1.0})
