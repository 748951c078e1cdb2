"""Intensity-domain statistics: coherence, autocorrelation, spectra.

The second-order coherence of a stationary intensity record is estimated by
time averaging,

    g2(tau) = <I(t) I(t+tau)> / <I>^2,

an ergodic surrogate for ensemble averaging over realizations (the sweep
module provides an ensemble mode to validate the substitution).  Each
estimator exists in two routes: a fast FFT-based correlation and a direct
O(N L) summation used to verify it.

The echo height h is the maximum of |C(tau)| near the external-cavity delay
and serves as the time-delay signature of the dynamics; the 80% bandwidth is
the smallest frequency below which the averaged periodogram accumulates 80%
of its total power.
"""

from dataclasses import dataclass

import numpy as np

from .integrator import Trace


class DegenerateTraceError(ValueError):
    """The trace has no usable fluctuations (zero mean or zero variance)."""


@dataclass
class G2Curve:
    """Second-order coherence on a lag grid; values are dimensionless."""

    lags: np.ndarray
    values: np.ndarray
    mean_intensity: float

    @property
    def zero_lag(self):
        return float(self.values[np.argmin(np.abs(self.lags))])


@dataclass
class AcfCurve:
    """Normalized intensity autocorrelation C(tau) with C(0) = 1."""

    lags: np.ndarray
    values: np.ndarray


@dataclass
class Spectrum:
    """One-sided power spectral density; DC bin excluded."""

    freqs: np.ndarray
    psd: np.ndarray
    rbw: float


@dataclass
class EchoReport:
    """Peak |C| near the first delay echo and its lag."""

    h: float
    tau_peak: float


def _intensity_of(tr):
    return tr.intensity if isinstance(tr, Trace) else np.asarray(tr, dtype=float)


def _lag_indices(n, dt, max_lag, lag_stride):
    max_k = int(round(max_lag / dt))
    if max_k >= n:
        raise DegenerateTraceError("max_lag must be shorter than the trace")
    return np.arange(0, max_k + 1, lag_stride)


def _raw_autocorr_fft(x, max_k):
    """Sum_t x[t] x[t+k] for k = 0..max_k via zero-padded FFT."""
    n = x.size
    m = 1 << int(np.ceil(np.log2(n + max_k + 1)))
    f = np.fft.rfft(x, m)
    raw = np.fft.irfft(f * np.conj(f), m)
    return raw[:max_k + 1]


def g2_from_intensity(tr, max_lag, lag_stride=1, method="fft", side="one"):
    """Time-averaged g2(tau) on lags 0, s*dt, 2*s*dt, ... up to max_lag.

    ``method='direct'`` evaluates the defining sums term by term and exists
    to cross-check the FFT route.  ``side='both'`` mirrors the curve onto
    negative lags (the time-averaged estimator is symmetric by
    construction).
    """
    x = _intensity_of(tr)
    dt = tr.dt if isinstance(tr, Trace) else 1.0
    if 2.0 * max_lag >= x.size * dt:
        raise DegenerateTraceError("max_lag must be < recorded duration / 2")
    mean = x.mean()
    if mean == 0.0:
        raise DegenerateTraceError("mean intensity is zero")
    ks = _lag_indices(x.size, dt, max_lag, lag_stride)
    n = x.size
    if method == "fft":
        raw = _raw_autocorr_fft(x, int(ks[-1]))[ks]
    elif method == "direct":
        raw = np.array([np.dot(x[: n - k], x[k:]) for k in ks])
    else:
        raise ValueError(f"unknown method {method!r}")
    values = raw / (n - ks) / (mean * mean)
    lags = ks * dt
    if side == "both":
        lags = np.concatenate([-lags[:0:-1], lags])
        values = np.concatenate([values[:0:-1], values])
    elif side != "one":
        raise ValueError(f"unknown side {side!r}")
    return G2Curve(lags=lags, values=values, mean_intensity=mean)


def autocorrelation(tr, max_lag, lag_stride=1, method="fft"):
    """Normalized autocovariance C(tau) of the intensity; C(0) = 1 exactly."""
    x = _intensity_of(tr)
    dt = tr.dt if isinstance(tr, Trace) else 1.0
    dx = x - x.mean()
    var_sum = np.dot(dx, dx)
    if var_sum == 0.0:
        raise DegenerateTraceError("trace has zero variance")
    ks = _lag_indices(x.size, dt, max_lag, lag_stride)
    n = x.size
    if method == "fft":
        raw = _raw_autocorr_fft(dx, int(ks[-1]))[ks]
    elif method == "direct":
        raw = np.array([np.dot(dx[: n - k], dx[k:]) for k in ks])
    else:
        raise ValueError(f"unknown method {method!r}")
    values = raw / (n - ks) / (var_sum / n)
    if ks[0] == 0:
        values[0] = 1.0  # exact by construction; guards rounding
    return AcfCurve(lags=ks * dt, values=values)


def echo_height(acf: AcfCurve, tau_ext, half_window=2e-9) -> EchoReport:
    """Peak |C(tau)| within half_window of the first delay echo."""
    lo = tau_ext - half_window
    hi = tau_ext + half_window
    if acf.lags[-1] < hi or acf.lags[0] > lo:
        raise ValueError(
            f"ACF lags cover [{acf.lags[0]:.3g}, {acf.lags[-1]:.3g}] s; "
            f"echo window [{lo:.3g}, {hi:.3g}] s is outside")
    sel = (acf.lags >= lo) & (acf.lags <= hi)
    mag = np.abs(acf.values[sel])
    best = np.argmax(mag)
    return EchoReport(h=float(mag[best]), tau_peak=float(acf.lags[sel][best]))


def power_spectrum(tr, segment_len=1 << 17, overlap=0.5) -> Spectrum:
    """Averaged periodogram (Hann window, one-sided, DC removed).

    Segments are de-meaned before windowing; the resolution bandwidth is the
    Hann equivalent noise bandwidth 1.5/(segment_len * dt).
    """
    x = _intensity_of(tr)
    dt = tr.dt if isinstance(tr, Trace) else 1.0
    if segment_len & (segment_len - 1):
        raise ValueError("segment_len must be a power of two")
    if segment_len > x.size:
        raise DegenerateTraceError(
            f"trace of {x.size} samples is shorter than one segment "
            f"({segment_len})")
    w = np.hanning(segment_len)
    u = np.mean(w * w)
    step = max(1, int(round(segment_len * (1.0 - overlap))))
    nseg = (x.size - segment_len) // step + 1
    acc = np.zeros(segment_len // 2 + 1)
    for s in range(nseg):
        seg = x[s * step: s * step + segment_len]
        seg = (seg - seg.mean()) * w
        acc += np.abs(np.fft.rfft(seg)) ** 2
    fs = 1.0 / dt
    psd = acc / nseg * (2.0 / (fs * segment_len * u))
    psd[-1] *= 0.5  # Nyquist bin is not duplicated on the one-sided grid
    freqs = np.fft.rfftfreq(segment_len, dt)
    return Spectrum(freqs=freqs[1:], psd=psd[1:], rbw=1.5 * fs / segment_len)


def bandwidth_80(sp: Spectrum) -> float:
    """Smallest frequency accumulating 80% of the total one-sided power."""
    total = sp.psd.sum()
    if total <= 0.0:
        raise DegenerateTraceError("spectrum has no power")
    cum = np.cumsum(sp.psd)
    return float(sp.freqs[np.searchsorted(cum, 0.8 * total)])


def coherence_time(curve: G2Curve) -> float:
    """Lag where the excess coherence g2 - 1 first falls to half its peak.

    A practical coherence scale for choosing photon-counting windows; raises
    if the curve never decays that far within its lag range.
    """
    excess = curve.values - 1.0
    if excess[0] <= 0.0:
        raise DegenerateTraceError("no bunching peak at zero lag")
    below = np.nonzero(excess <= 0.5 * excess[0])[0]
    if below.size == 0:
        raise ValueError("g2 curve does not decay to half within max_lag")
    return float(curve.lags[below[0]])


def _write_csv(path, header_cols, rows, meta):
    with open(path, "w") as fh:
        for key in sorted(meta):
            fh.write(f"# {key} = {meta[key]!r}\n")
        fh.write(",".join(header_cols) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def write_g2_csv(path, curve: G2Curve, meta=None):
    _write_csv(path, ["tau_ns", "g2"],
               zip(curve.lags * 1e9, curve.values), meta or {})


def write_acf_csv(path, acf: AcfCurve, meta=None):
    _write_csv(path, ["tau_ns", "c"],
               zip(acf.lags * 1e9, acf.values), meta or {})


def write_spectrum_csv(path, sp: Spectrum, meta=None):
    """PSD in dB relative to the peak bin, against frequency in GHz."""
    peak = sp.psd.max()
    if peak <= 0:
        raise DegenerateTraceError("spectrum has no power")
    db = 10.0 * np.log10(np.maximum(sp.psd, peak * 1e-30) / peak)
    meta = dict(meta or {})
    meta["rbw_hz"] = sp.rbw
    _write_csv(path, ["freq_ghz", "psd_db"], zip(sp.freqs / 1e9, db), meta)
