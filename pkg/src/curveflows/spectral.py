"""Periodic grid and trigonometric (FFT-based) calculus on [0, 2*pi).

All field arrays put the spatial axis first: shapes (n,), (n, 3) or
(n, 2, 2). Operations are exact for trigonometric polynomials resolved by
the grid; the Nyquist mode is dropped from derivatives and antiderivatives
to keep real data real.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class PeriodicGrid:
    """Uniform grid x_j = 2*pi*j/n, j = 0..n-1, period fixed to 2*pi.

    n must be a power of two >= 16 (FFT stepping downstream assumes it).
    """

    def __init__(self, n: int):
        if not (_is_power_of_two(n) and n >= 16):
            raise ConfigError(f"grid size must be a power of two >= 16, got {n}")
        self.n = int(n)
        self.dx = TWO_PI / self.n
        self.x = np.arange(self.n) * self.dx
        # integer wavenumbers in FFT layout: 0, 1, ..., n/2-1, -n/2, ..., -1
        self.k = np.fft.fftfreq(self.n, d=1.0 / self.n)
        self._ik = 1j * self.k
        self._ik[self.n // 2] = 0.0  # Nyquist derivative zeroed

    def __eq__(self, other) -> bool:
        return isinstance(other, PeriodicGrid) and other.n == self.n

    def __repr__(self) -> str:
        return f"PeriodicGrid(n={self.n})"

    # -- axis-0 helpers ----------------------------------------------------

    def _kshape(self, values: np.ndarray) -> tuple:
        return (self.n,) + (1,) * (np.ndim(values) - 1)

    def derivative(self, values: np.ndarray, order: int = 1) -> np.ndarray:
        """Spectral d^order/dx^order along axis 0."""
        vhat = np.fft.fft(values, axis=0)
        mult = self._ik if order % 2 else 1j * self.k
        vhat = vhat * (mult ** order).reshape(self._kshape(values))
        out = np.fft.ifft(vhat, axis=0)
        return out.real if np.isrealobj(values) else out

    def antiderivative(self, values: np.ndarray) -> np.ndarray:
        """Samples of F(x) = int_0^x values, exact for resolved trig data.

        The zero-mean part integrates to a periodic function; the mean
        contributes the linear term mean*x.
        """
        vhat = np.fft.fft(values, axis=0)
        shape = self._kshape(values)
        mean = vhat[0] / self.n
        inv = np.zeros(self.n, dtype=complex)
        nonzero = self.k != 0
        inv[nonzero] = 1.0 / (1j * self.k[nonzero])
        inv[self.n // 2] = 0.0
        phat = vhat * inv.reshape(shape)
        periodic = np.fft.ifft(phat, axis=0)
        periodic = periodic - periodic[0]
        out = periodic + self.x.reshape(shape) * mean
        return out.real if np.isrealobj(values) else out

    def mean(self, values: np.ndarray) -> np.ndarray:
        return np.mean(values, axis=0)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Trapezoidal rule on the periodic grid (= 2*pi * mean)."""
        return TWO_PI * np.mean(values, axis=0)

    def shift(self, values: np.ndarray, s: float) -> np.ndarray:
        """Samples of the interpolant at x_j + s.

        For real input the Nyquist mode is advanced as a cosine so the
        result stays real.
        """
        vhat = np.fft.fft(values, axis=0)
        factor = np.exp(1j * self.k * s)
        if np.isrealobj(values):
            factor[self.n // 2] = np.cos(self.k[self.n // 2] * s)
        vhat = vhat * factor.reshape(self._kshape(values))
        out = np.fft.ifft(vhat, axis=0)
        return out.real if np.isrealobj(values) else out

    def evaluate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate the trigonometric interpolant at arbitrary points.

        Direct O(n * len(points)) Fourier sum; output shape
        points.shape + values.shape[1:].
        """
        points = np.atleast_1d(np.asarray(points, dtype=float))
        coeff = np.fft.fft(values, axis=0) / self.n
        basis = np.exp(1j * np.outer(points, self.k))
        if np.isrealobj(values):
            basis[:, self.n // 2] = np.cos(points * self.k[self.n // 2])
        flat = coeff.reshape(self.n, -1)
        out = basis @ flat
        out = out.reshape(points.shape + np.shape(values)[1:])
        return out.real if np.isrealobj(values) else out

    def resample(self, values: np.ndarray, m: int) -> np.ndarray:
        """Trigonometric resampling from n to m uniform points (pad/truncate spectrum)."""
        vhat = np.fft.fft(values, axis=0)
        out_hat = np.zeros((m,) + values.shape[1:], dtype=complex)
        keep = min(self.n, m) // 2
        out_hat[:keep] = vhat[:keep]
        out_hat[-keep:] = vhat[-keep:]
        out = np.fft.ifft(out_hat, axis=0) * (m / self.n)
        return out.real if np.isrealobj(values) else out

    def tail_fraction(self, values: np.ndarray) -> float:
        """Energy fraction in the top octave |k| > n/4 of the spectrum.

        Certifies that samples represent a smooth periodic function; a jump
        or a seam mismatch pushes energy into high modes.
        """
        vhat = np.fft.fft(values, axis=0).reshape(self.n, -1)
        power = np.sum(np.abs(vhat) ** 2, axis=1)
        total = float(np.sum(power))
        if total == 0.0:
            return 0.0
        high = float(np.sum(power[np.abs(self.k) > self.n / 4]))
        return high / total


def finite_difference(values: np.ndarray, dx: float, order: int, axis: int = 0) -> np.ndarray:
    """Sixth-order centered finite difference, valid on the interior only.

    Treats the data as NON-periodic: output has 3 points trimmed at each end
    of `axis`. Used for residuals of fields that are smooth but not periodic
    (dressed soliton output), where spectral differentiation would see the
    seam jump.
    """
    v = np.moveaxis(values, axis, 0)
    if order == 1:
        stencil = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / (60.0 * dx)
    elif order == 2:
        stencil = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / (180.0 * dx**2)
    else:
        raise ValueError("order must be 1 or 2")
    m = v.shape[0]
    if m < 7:
        raise ValueError("need at least 7 samples for the 6th-order stencil")
    out = np.zeros((m - 6,) + v.shape[1:], dtype=values.dtype)
    for j, w in enumerate(stencil):
        out += w * v[j : j + m - 6]
    return np.moveaxis(out, 0, axis)
