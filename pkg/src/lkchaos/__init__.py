"""Chaotic semiconductor laser dynamics and photon statistics toolkit."""

__version__ = "0.1.0"

from .params import (E_CHARGE, DEFAULT_CALIBRATION, DriveConfig,
                     EtaKappaCalibration, FeedbackConfig, LaserParams,
                     ParamError, carrier_injection_rate, eta_to_kappa,
                     kappa_to_eta, load_param_file, threshold_current)
from .integrator import (AMPLITUDE_FLOOR, BelowThresholdError,
                         IntegrationDivergedError, LaserState, SimConfig,
                         Trace, delay_steps, derivatives, integrate,
                         relaxation_oscillation_frequency,
                         solitary_steady_state)
from .metrics import (AcfCurve, DegenerateTraceError, EchoReport, G2Curve,
                      Spectrum, autocorrelation, bandwidth_80, coherence_time,
                      echo_height, g2_from_intensity, power_spectrum)
from .counting import (CountSeries, DetectorConfig, Pnd, bose_einstein_pmf,
                       calibrate_attenuation, distribution_distance,
                       hbt_coincidence_g2, pnd_from_counts, poisson_pmf,
                       sample_counts, sample_timestamps)
from .trace_io import read_trace, trace_to_csv, write_trace
from .experiment import SweepSpec, SweepResult, reproduce_figure, run_sweep
