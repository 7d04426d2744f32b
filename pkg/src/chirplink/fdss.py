"""Spectral-shaping filter design for circularly-shifted chirp synthesis.

A length-M shaping filter holds one complex weight per occupied subcarrier
k = floor(M/2)-M+1 .. floor(M/2).  Choosing the weights as the Fourier
coefficients of one chirp period turns a DFT-spread-OFDM transmitter into
a bank of M circularly time-shifted chirps.  This module provides:

* ``design_plain``       flat (all-ones) reference filter,
* ``design_sinusoidal``  closed form via Bessel functions of the first kind,
* ``design_linear``      closed form via Fresnel integrals,
* ``design_arbitrary``   any periodic frequency trajectory, by convolving
  upsampled Bessel coefficient sequences (one pair per trajectory harmonic),
* ``triangular_trajectory``  the classic down/up triangular sweep.

Every design returns coefficients rescaled to ``sum |c_k|^2 = M`` so that
filters of different shapes are power-comparable and the all-ones filter
is the exact no-shaping case.  The fraction of chirp energy falling
outside the occupied band (truncation loss) is recorded on the filter.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics

RAW_FOURIER = "raw_fourier"
UNIT_AVERAGE_POWER = "unit_average_power"

#: Default frequency-deviation parameter; with M = 336 subcarriers it keeps
#: the chirp spectrum essentially inside the occupied band.
DEFAULT_DEVIATION = 318.0

#: Factors whose Bessel argument is below this act as identities and are skipped.
HARMONIC_SKIP_EPS = 1e-8


def band_limits(m: int) -> tuple[int, int]:
    """Occupied-band subcarrier limits (lower, upper) for m subcarriers."""
    return m // 2 - m + 1, m // 2


@dataclass(frozen=True)
class FdssFilter:
    """Shaping coefficients over subcarriers k = l_down .. l_up.

    ``coeffs[i]`` is the weight of subcarrier ``l_down + i``.
    """

    coeffs: np.ndarray
    m: int
    normalization: str = UNIT_AVERAGE_POWER
    truncation_loss: float = 0.0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", coeffs)
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if coeffs.ndim != 1 or len(coeffs) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        power = float(np.sum(np.abs(coeffs) ** 2))
        if self.normalization == RAW_FOURIER:
            if power > 1.0 + 1e-6:
                raise ValueError(f"raw Fourier coefficients carry power {power} > 1")
        elif self.normalization == UNIT_AVERAGE_POWER:
            if abs(power - self.m) > 1e-9 * self.m:
                raise ValueError(f"unit-average-power filter has sum |c|^2 = {power}, want {self.m}")
        else:
            raise ValueError(f"unknown normalization {self.normalization!r}")

    @property
    def l_down(self) -> int:
        return band_limits(self.m)[0]

    @property
    def l_up(self) -> int:
        return band_limits(self.m)[1]

    @property
    def subcarriers(self) -> np.ndarray:
        """Subcarrier indices k = l_down .. l_up, aligned with ``coeffs``."""
        return np.arange(self.l_down, self.l_up + 1)

    def coeff(self, k: int) -> complex:
        return complex(self.coeffs[k - self.l_down])

    def magnitude_ratio(self) -> float:
        """max |c_k| / min |c_k| over the occupied band."""
        mags = np.abs(self.coeffs)
        lo = mags.min()
        if lo == 0.0:
            return np.inf
        return float(mags.max() / lo)

    def with_unit_average_power(self) -> "FdssFilter":
        if self.normalization == UNIT_AVERAGE_POWER:
            return self
        power = float(np.sum(np.abs(self.coeffs) ** 2))
        scaled = self.coeffs * np.sqrt(self.m / power)
        return replace(self, coeffs=scaled, normalization=UNIT_AVERAGE_POWER)

    def export_csv(self, path) -> None:
        """Write ``k,re,im`` rows at 17 significant digits (lossless)."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self._csv_text())

    def _csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("k,re,im\n")
        for k, c in zip(self.subcarriers, self.coeffs):
            buf.write(f"{k},{c.real:.17g},{c.imag:.17g}\n")
        return buf.getvalue()


def load_filter_csv(path, normalization: str = UNIT_AVERAGE_POWER) -> FdssFilter:
    """Read a filter written by :meth:`FdssFilter.export_csv`."""
    ks, vals = [], []
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "k,re,im":
            raise ValueError(f"unexpected filter CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            k, re, im = line.split(",")
            ks.append(int(k))
            vals.append(complex(float(re), float(im)))
    m = len(vals)
    lo, hi = band_limits(m)
    if ks != list(range(lo, hi + 1)):
        raise ValueError("filter CSV subcarrier indices are not the contiguous occupied band")
    return FdssFilter(np.array(vals), m, normalization)


def design_plain(m: int) -> FdssFilter:
    """All-ones filter: plain DFT-spread-OFDM, no spectral shaping."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return FdssFilter(np.ones(m, dtype=complex), m, UNIT_AVERAGE_POWER, truncation_loss=0.0)


def _check_deviation(deviation: float, m: int) -> None:
    if not np.isfinite(deviation):
        raise ValueError("deviation must be finite")
    if deviation > m:
        raise ValueError(f"deviation {deviation} exceeds the occupied band of {m} subcarriers")


def design_sinusoidal(deviation: float, m: int) -> FdssFilter:
    """Shaping filter whose chirp sweeps frequency as a sinusoid.

    The Fourier coefficients of exp(j (D/2) sin theta) are J_k(D/2), so the
    raw filter is the Bessel sequence over the occupied band.
    """
    _check_deviation(deviation, m)
    if deviation < 0:
        raise ValueError("deviation must be >= 0")
    lo, hi = band_limits(m)
    z = deviation / 2.0
    max_abs = max(-lo, hi)
    seq = numerics.bessel_j_sequence(max_abs, z)
    ks = np.arange(lo, hi + 1)
    raw = seq[np.abs(ks)] * np.where((ks < 0) & (ks % 2 != 0), -1.0, 1.0)
    # Out-of-band energy via the sum rule: J_0^2 + 2 sum J_k^2 = 1.
    tail_order = int(np.ceil(z)) + 80
    full = numerics.bessel_j_sequence(tail_order, z)
    total = full[0] ** 2 + 2.0 * np.sum(full[1:] ** 2)
    loss = max(0.0, total - float(np.sum(raw**2)))
    filt = FdssFilter(raw.astype(complex), m, RAW_FOURIER, truncation_loss=loss)
    return filt.with_unit_average_power()


def design_linear(deviation: float, m: int) -> FdssFilter:
    """Shaping filter for a linear sweep from -D/2T to +D/2T over one period.

    Closed form, obtained by completing the square in the Fourier integral
    of exp(j pi D (u^2 - u)), u in [0, 1):

        c_k = e^{-j pi D/4} e^{-j pi k} e^{-j pi k^2 / D} / sqrt(2 D)
              * [C(x1) + C(x2) + j (S(x1) + S(x2))],

    with x1 = (D - 2k)/sqrt(2D), x2 = (D + 2k)/sqrt(2D) and C, S the
    pi/2-normalized Fresnel integrals of :func:`chirplink.numerics.fresnel`.
    """
    if deviation <= 0:
        raise ValueError("deviation must be > 0")
    _check_deviation(deviation, m)
    d = float(deviation)
    lo, hi = band_limits(m)
    ks = np.arange(lo, hi + 1)
    s1, c1 = _fresnel_array((d - 2 * ks) / np.sqrt(2 * d))
    s2, c2 = _fresnel_array((d + 2 * ks) / np.sqrt(2 * d))
    phase = np.exp(-1j * np.pi * d / 4) * np.exp(-1j * np.pi * ks) * np.exp(-1j * np.pi * ks**2 / d)
    raw = phase / np.sqrt(2 * d) * ((c1 + c2) + 1j * (s1 + s2))
    loss = max(0.0, 1.0 - float(np.sum(np.abs(raw) ** 2)))
    filt = FdssFilter(raw, m, RAW_FOURIER, truncation_loss=loss)
    return filt.with_unit_average_power()


def _fresnel_array(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pairs = [numerics.fresnel(v) for v in x]
    c = np.array([p[0] for p in pairs])
    s = np.array([p[1] for p in pairs])
    return s, c


@dataclass(frozen=True)
class ChirpTrajectory:
    """Periodic frequency trajectory described by a Fourier series.

    The phase of the chirp is (D/2) f(2 pi t / T) with

        f(x) = a0/2 + sum_n a_n cos(n x) + b_n sin(n x),

    and the trajectory must be slope-normalized: max |df/dx| = 1 so the
    instantaneous frequency sweeps exactly +/- D/(2T).  The constructor
    verifies the normalization within 1% on a dense grid.
    """

    a0: float = 0.0
    cos_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1))
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1))
    deviation: float = DEFAULT_DEVIATION

    def __post_init__(self):
        a = np.asarray(self.cos_coeffs, dtype=float)
        b = np.asarray(self.sin_coeffs, dtype=float)
        if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
            raise ValueError("cos_coeffs and sin_coeffs must be 1-d arrays of equal length >= 1")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(self.a0)):
            raise ValueError("trajectory coefficients must be finite")
        if not (np.isfinite(self.deviation) and self.deviation > 0):
            raise ValueError("deviation must be positive")
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)
        x = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
        sl = self.slope(x)
        hi, lo = sl.max(), sl.min()
        if abs(hi - 1.0) > 0.01 or abs(lo + 1.0) > 0.01:
            raise ValueError(
                f"trajectory slope spans [{lo:.4f}, {hi:.4f}]; must reach -1 and +1 within 1%"
            )

    @property
    def n_harmonics(self) -> int:
        return len(self.cos_coeffs)

    def f(self, x) -> np.ndarray:
        """Evaluate the trajectory Fourier series at phase x (radians)."""
        x = np.asarray(x, dtype=float)
        n = np.arange(1, self.n_harmonics + 1)
        return (
            self.a0 / 2.0
            + self.cos_coeffs @ np.cos(np.outer(n, x))
            + self.sin_coeffs @ np.sin(np.outer(n, x))
        )

    def slope(self, x) -> np.ndarray:
        """df/dx; the normalized instantaneous-frequency profile in [-1, 1]."""
        x = np.asarray(x, dtype=float)
        n = np.arange(1, self.n_harmonics + 1)
        return (self.sin_coeffs * n) @ np.cos(np.outer(n, x)) - (
            self.cos_coeffs * n
        ) @ np.sin(np.outer(n, x))


def triangular_trajectory(
    n_harmonics: int = 64, down_first: bool = True, deviation: float = DEFAULT_DEVIATION
) -> ChirpTrajectory:
    """Triangular sweep: a down-chirp then an up-chirp (or the reverse).

    One period of the trajectory is the odd piecewise-quadratic

        f(x) = x^2/pi + x   on [-pi, 0),      f(x) = -x^2/pi + x  on [0, pi),

    whose sine-series coefficients reduce to b_n = 8/(pi^2 n^3) for odd n
    and 0 for even n.  ``down_first=False`` negates the series.

    The truncated series undershoots the +/-1 slope span by roughly 0.4/N_h,
    so about 41 harmonics are needed to satisfy the trajectory normalization
    check; the default of 64 leaves comfortable margin.
    """
    if n_harmonics < 1:
        raise ValueError("n_harmonics must be >= 1")
    n = np.arange(1, n_harmonics + 1)
    # (4 - 2 pi n sin(pi n) - 4 cos(pi n)) / (pi^2 n^3) at integer n, exactly
    b = np.where(n % 2 == 1, 8.0 / (np.pi**2 * n**3), 0.0)
    if not down_first:
        b = -b
    return ChirpTrajectory(0.0, np.zeros(n_harmonics), b, deviation)


def triangular_phase_profile(x, down_first: bool = True) -> np.ndarray:
    """Exact piecewise-quadratic trajectory f(x) of the triangular sweep."""
    x = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    f = np.where(x < 0, x**2 / np.pi + x, -(x**2) / np.pi + x)
    return f if down_first else -f


def _harmonic_factor(harmonic: int, bessel_arg: float, cosine: bool, tail_eps: float):
    """Indexed coefficient sequence of exp(j z cos(n x)) or exp(j z sin(n x)).

    The order-m Bessel coefficient sits at subcarrier index n*m (the series
    in x has period 2*pi/n, so its spectrum lives on multiples of n), with
    an extra j^m twist for the cosine case.
    """
    z = abs(bessel_arg)
    max_order = int(np.ceil(z)) + 40 + int(6 * z ** (1 / 3))
    seq = numerics.bessel_j_sequence(max_order, z)
    if bessel_arg < 0:
        seq = seq * np.where(np.arange(max_order + 1) % 2 == 1, -1.0, 1.0)
    keep = np.nonzero(np.abs(seq) >= tail_eps)[0]
    m_max = int(keep[-1]) if len(keep) else 0
    orders = np.arange(-m_max, m_max + 1)
    vals = seq[np.abs(orders)] * np.where((orders < 0) & (orders % 2 != 0), -1.0, 1.0)
    vals = vals.astype(complex)
    if cosine:
        vals *= np.array([1, 1j, -1, -1j])[np.mod(orders, 4)]
    lo = -m_max * harmonic
    out = np.zeros(2 * m_max * harmonic + 1, dtype=complex)
    out[orders * harmonic - lo] = vals
    return numerics.IndexedSequence(out, lo)


def design_arbitrary(
    traj: ChirpTrajectory, m: int, tail_eps: float = 1e-12
) -> FdssFilter:
    """Shaping filter for an arbitrary periodic trajectory.

    The chirp exponential factors over the trajectory harmonics, each factor
    contributing an upsampled Bessel coefficient sequence; the filter is the
    convolution of all factor sequences restricted to the occupied band.
    Harmonics whose Bessel argument is below ``HARMONIC_SKIP_EPS`` act as
    Kronecker deltas and are skipped.  The energy lost by restricting to the
    band is reported as ``truncation_loss`` so callers can detect overflow.
    """
    _check_deviation(traj.deviation, m)
    if tail_eps <= 0:
        raise ValueError("tail_eps must be positive")
    half_dev = traj.deviation / 2.0
    seq = numerics.IndexedSequence(np.ones(1, dtype=complex), 0)
    for n in range(1, traj.n_harmonics + 1):
        for coeff, cosine in ((traj.cos_coeffs[n - 1], True), (traj.sin_coeffs[n - 1], False)):
            if abs(coeff) * half_dev < HARMONIC_SKIP_EPS:
                continue
            seq = numerics.convolve_full(
                seq, _harmonic_factor(n, coeff * half_dev, cosine, tail_eps)
            )
    phase = np.exp(1j * traj.deviation * traj.a0 / 4.0)
    lo, hi = band_limits(m)
    raw = np.array([phase * seq.at(k) for k in range(lo, hi + 1)])
    total = float(np.sum(np.abs(seq.values) ** 2))
    loss = max(0.0, total - float(np.sum(np.abs(raw) ** 2)))
    filt = FdssFilter(raw, m, RAW_FOURIER, truncation_loss=loss)
    return filt.with_unit_average_power()
