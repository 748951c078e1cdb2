"""Shared fixtures: default records and session-cached chaotic traces.

The 10 us production traces take about a second each to integrate, so the
modules that need them share session-scoped fixtures.  Wall-clock spent
inside the integrator is recorded on the trace metadata for the runtime
assertions of the acceptance suite.
"""

import time

import numpy as np
import pytest

import lkchaos as lk


@pytest.fixture(scope="session")
def laser():
    return lk.LaserParams()


@pytest.fixture(scope="session")
def drive15():
    return lk.DriveConfig(rho=1.5)


def timed_integrate(laser, feedback, drive, sim):
    t0 = time.perf_counter()
    tr = lk.integrate(laser, feedback, drive, sim)
    tr.meta["wall_s"] = time.perf_counter() - t0
    return tr


def _production_trace(laser, kappa, rho=1.5):
    sim = lk.SimConfig(t_transient=4e-6, t_record=10e-6)
    return timed_integrate(laser, lk.FeedbackConfig(kappa=kappa),
                           lk.DriveConfig(rho=rho), sim)


@pytest.fixture(scope="session")
def trace_k35(laser):
    return _production_trace(laser, 35e9)


@pytest.fixture(scope="session")
def trace_k50(laser):
    return _production_trace(laser, 50e9)


@pytest.fixture(scope="session")
def trace_k65(laser):
    return _production_trace(laser, 65e9)


@pytest.fixture(scope="session")
def trace_fig3(laser):
    """Operating point of the bandwidth and counting studies:
    rho = 1.5, kappa interpolated for a 12.8% feedback fraction."""
    kappa = lk.eta_to_kappa(lk.DEFAULT_CALIBRATION, 0.128)
    return _production_trace(laser, kappa)


@pytest.fixture(scope="session")
def steady_trace(laser, drive15):
    """Settled solitary-laser trace: kappa = 0, last 100 ns recorded."""
    sim = lk.SimConfig(t_transient=0.5e-6, t_record=0.1e-6,
                       record="full")
    return timed_integrate(laser, lk.FeedbackConfig(kappa=0.0), drive15, sim)


@pytest.fixture()
def constant_trace():
    """Synthetic strictly constant intensity trace."""
    return lk.Trace(dt=2e-12, intensity=np.full(200_000, 3.25))
