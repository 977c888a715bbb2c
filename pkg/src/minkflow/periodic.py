"""Calculus on a uniform periodic angle grid.

Everything downstream integrates, differentiates, and interpolates
2*pi-periodic samples. Scalar integrals use the periodic trapezoid rule
(spectrally accurate for smooth integrands); cumulative integrals and
off-node evaluation go through the trigonometric interpolant; the flow
solver uses 4th-order central difference stencils.
"""

from __future__ import annotations

from collections import deque

import numpy as np

TWO_PI = 2.0 * np.pi


class AngleGrid:
    """Uniform periodic grid theta_i = 2*pi*i/n, i = 0..n-1.

    n must be even (half-period windows and symmetry checks pair node i
    with node i + n/2) and at least 16.
    """

    def __init__(self, n: int):
        n = int(n)
        if n < 16 or n % 2:
            raise ValueError(f"grid size must be even and >= 16, got {n}")
        self.n = n
        self.dtheta = TWO_PI / n
        self.theta = self.dtheta * np.arange(n)

    def __repr__(self):
        return f"AngleGrid(n={self.n})"

    def __eq__(self, other):
        return isinstance(other, AngleGrid) and other.n == self.n


def ring_integral(values: np.ndarray, dtheta: float) -> float:
    """Integral over one period by the periodic trapezoid rule."""
    return float(dtheta * np.sum(values))


class TrigSeries:
    """Trigonometric interpolant of real periodic samples.

    Stores rfft coefficients normalized by the sample count; callable at
    arbitrary angles (scalar or array).
    """

    def __init__(self, coeffs: np.ndarray, n: int):
        self.coeffs = coeffs
        self.n = n
        weights = np.full(coeffs.size, 2.0)
        weights[0] = 1.0
        if n % 2 == 0:
            weights[-1] = 1.0  # Nyquist mode enters once
        self._wc = weights * coeffs

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "TrigSeries":
        samples = np.asarray(samples, dtype=float)
        return cls(np.fft.rfft(samples) / samples.size, samples.size)

    @property
    def mean(self) -> float:
        return float(self.coeffs[0].real)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        scalar = theta.ndim == 0
        modes = np.arange(self.coeffs.size)
        phases = np.exp(1j * np.multiply.outer(np.atleast_1d(theta), modes))
        out = (phases @ self._wc).real
        return float(out[0]) if scalar else out.reshape(theta.shape)


class CumulativeTrig:
    """F(theta) = integral of periodic samples from 0 to theta.

    Splits the integrand into mean (linear part of F) plus oscillation
    (trig antiderivative), so F evaluates exactly at arbitrary angles.
    """

    def __init__(self, samples: np.ndarray):
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        c = np.fft.rfft(samples) / n
        self.slope = float(c[0].real)
        anti = np.zeros_like(c)
        modes = np.arange(1, c.size)
        anti[1:] = c[1:] / (1j * modes)
        self._osc = TrigSeries(anti, n)
        self._osc0 = self._osc(0.0)

    def __call__(self, theta):
        return self.slope * np.asarray(theta, dtype=float) + self._osc(theta) - self._osc0


def cumulative_samples(samples: np.ndarray) -> np.ndarray:
    """Cumulative integral at the grid nodes, starting from 0 at theta=0.

    Fast spectral path (one rfft/irfft pair); includes the linear part
    carried by a nonzero mean of the integrand.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    c = np.fft.rfft(samples)
    anti = np.zeros_like(c)
    modes = np.arange(1, c.size)
    anti[1:] = c[1:] / (1j * modes)
    osc = np.fft.irfft(anti, n)
    theta = TWO_PI * np.arange(n) / n
    return (c[0].real / n) * theta + osc - osc[0]


def spectral_derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Derivative of periodic samples via the trig interpolant."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    c = np.fft.rfft(samples)
    modes = np.arange(c.size)
    c = c * (1j * modes) ** order
    if order % 2 == 1 and n % 2 == 0:
        c[-1] = 0.0  # odd derivative of the Nyquist cosine is not representable
    return np.fft.irfft(c, n)


_SHIFT_CACHE: dict[int, tuple[np.ndarray, ...]] = {}


def _shifted_indices(n: int) -> tuple[np.ndarray, ...]:
    """Index arrays for circular shifts by -2, -1, +1, +2 (cached per n)."""
    try:
        return _SHIFT_CACHE[n]
    except KeyError:
        base = np.arange(n)
        idx = tuple((base + s) % n for s in (2, 1, -1, -2))
        _SHIFT_CACHE[n] = idx
        return idx


def fd1(values: np.ndarray, dtheta: float) -> np.ndarray:
    """4th-order central first difference on a periodic grid."""
    f2, f1, b1, b2 = (values[i] for i in _shifted_indices(values.size))
    return (-f2 + 8.0 * f1 - 8.0 * b1 + b2) / (12.0 * dtheta)


def fd2(values: np.ndarray, dtheta: float) -> np.ndarray:
    """4th-order central second difference on a periodic grid."""
    f2, f1, b1, b2 = (values[i] for i in _shifted_indices(values.size))
    return (-f2 + 16.0 * f1 - 30.0 * values + 16.0 * b1 - b2) / (12.0 * dtheta**2)


def halfwindow_minima(values: np.ndarray) -> np.ndarray:
    """Minimum over every circular window of n/2 consecutive samples.

    Monotone-queue sweep, O(n). Entry j is the minimum of
    values[j], ..., values[j + n/2 - 1] (indices mod n).
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    w = n // 2
    ext = np.concatenate([values, values[: w - 1]])
    out = np.empty(n)
    dq: deque[int] = deque()
    for j, v in enumerate(ext):
        while dq and ext[dq[-1]] >= v:
            dq.pop()
        dq.append(j)
        if dq[0] <= j - w:
            dq.popleft()
        if j >= w - 1:
            out[j - w + 1] = ext[dq[0]]
    return out


def _parabolic_vertex(y_prev: float, y_mid: float, y_next: float) -> float:
    denom = y_prev - 2.0 * y_mid + y_next
    if abs(denom) < 1e-300:
        return y_mid
    return y_mid - (y_prev - y_next) ** 2 / (8.0 * denom)


def refined_min(values: np.ndarray) -> float:
    """Minimum of smooth periodic samples, sharpened by a local parabola fit."""
    values = np.asarray(values, dtype=float)
    i = int(np.argmin(values))
    n = values.size
    v = _parabolic_vertex(values[i - 1], values[i], values[(i + 1) % n])
    return min(v, float(values[i]))


def refined_max(values: np.ndarray) -> float:
    """Maximum of smooth periodic samples, sharpened by a local parabola fit."""
    return -refined_min(-np.asarray(values, dtype=float))
