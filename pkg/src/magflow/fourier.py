"""Finite real Fourier series in one and two variables.

All model data (conformal factor, magnetic intensity, abstract curvature
profiles) is carried as truncated Fourier series so that derivatives and
integrals are exact, with no finite-difference noise anywhere downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FourierSeries2D:
    """f(x, y) = const + sum over modes (m, n) of a*cos(w) + b*sin(w),
    with w = 2*pi*(m*x/Lx + n*y/Ly).

    ``cos_coeffs`` and ``sin_coeffs`` map (m, n) integer pairs to real
    amplitudes. The (0, 0) mode lives in ``const``.
    """

    Lx: float = 1.0
    Ly: float = 1.0
    const: float = 0.0
    cos_coeffs: dict = field(default_factory=dict)
    sin_coeffs: dict = field(default_factory=dict)

    def _phases(self, x, y):
        for (m, n) in set(self.cos_coeffs) | set(self.sin_coeffs):
            w = 2.0 * np.pi * (m * x / self.Lx + n * y / self.Ly)
            yield (m, n), w

    def __call__(self, x, y):
        out = self.const + 0.0 * (np.asarray(x) + np.asarray(y))
        for (m, n), w in self._phases(x, y):
            a = self.cos_coeffs.get((m, n), 0.0)
            b = self.sin_coeffs.get((m, n), 0.0)
            out = out + a * np.cos(w) + b * np.sin(w)
        return out

    def dx(self, x, y):
        out = 0.0 * (np.asarray(x) + np.asarray(y))
        for (m, n), w in self._phases(x, y):
            a = self.cos_coeffs.get((m, n), 0.0)
            b = self.sin_coeffs.get((m, n), 0.0)
            wx = 2.0 * np.pi * m / self.Lx
            out = out + wx * (-a * np.sin(w) + b * np.cos(w))
        return out

    def dy(self, x, y):
        out = 0.0 * (np.asarray(x) + np.asarray(y))
        for (m, n), w in self._phases(x, y):
            a = self.cos_coeffs.get((m, n), 0.0)
            b = self.sin_coeffs.get((m, n), 0.0)
            wy = 2.0 * np.pi * n / self.Ly
            out = out + wy * (-a * np.sin(w) + b * np.cos(w))
        return out

    def laplacian(self, x, y):
        out = 0.0 * (np.asarray(x) + np.asarray(y))
        for (m, n), w in self._phases(x, y):
            a = self.cos_coeffs.get((m, n), 0.0)
            b = self.sin_coeffs.get((m, n), 0.0)
            w2 = (2.0 * np.pi) ** 2 * ((m / self.Lx) ** 2 + (n / self.Ly) ** 2)
            out = out - w2 * (a * np.cos(w) + b * np.sin(w))
        return out

    def cell_integral(self):
        """Exact integral over one period cell; only the mean mode survives."""
        return self.const * self.Lx * self.Ly

    @property
    def max_mode(self):
        modes = [max(abs(m), abs(n)) for (m, n) in
                 set(self.cos_coeffs) | set(self.sin_coeffs)]
        return max(modes, default=0)


@dataclass(frozen=True)
class FourierSeries1D:
    """f(t) = const + sum over j>=1 of a_j*cos(j*omega*t) + b_j*sin(j*omega*t)."""

    const: float = 0.0
    omega: float = 1.0
    cos_coeffs: dict = field(default_factory=dict)
    sin_coeffs: dict = field(default_factory=dict)

    def __call__(self, t):
        out = self.const + 0.0 * np.asarray(t, dtype=float)
        for j in set(self.cos_coeffs) | set(self.sin_coeffs):
            a = self.cos_coeffs.get(j, 0.0)
            b = self.sin_coeffs.get(j, 0.0)
            w = j * self.omega * np.asarray(t, dtype=float)
            out = out + a * np.cos(w) + b * np.sin(w)
        return out

    def eval_mp(self, t):
        """Evaluate in mpmath arithmetic; ``t`` may be an mpf."""
        import mpmath as mp

        out = mp.mpf(self.const)
        for j in set(self.cos_coeffs) | set(self.sin_coeffs):
            a = self.cos_coeffs.get(j, 0.0)
            b = self.sin_coeffs.get(j, 0.0)
            w = j * mp.mpf(self.omega) * t
            out += a * mp.cos(w) + b * mp.sin(w)
        return out

    def shifted(self, t0):
        """The series t -> f(t0 + t), again as a finite Fourier series."""
        cos_out, sin_out = {}, {}
        for j in set(self.cos_coeffs) | set(self.sin_coeffs):
            a = self.cos_coeffs.get(j, 0.0)
            b = self.sin_coeffs.get(j, 0.0)
            c, s = math.cos(j * self.omega * t0), math.sin(j * self.omega * t0)
            # cos(w + jw0) and sin(w + jw0) expanded
            cos_out[j] = a * c + b * s
            sin_out[j] = -a * s + b * c
        return FourierSeries1D(self.const, self.omega, cos_out, sin_out)

    def reflected(self):
        """The series t -> f(-t)."""
        sin_out = {j: -b for j, b in self.sin_coeffs.items()}
        return FourierSeries1D(self.const, self.omega, dict(self.cos_coeffs), sin_out)

    def sampled_min(self, n=4096):
        """Minimum over one period on a dense grid (period = 2*pi/omega)."""
        if not self.cos_coeffs and not self.sin_coeffs:
            return float(self.const)
        period = 2.0 * np.pi / self.omega
        t = np.linspace(0.0, period, n, endpoint=False)
        return float(np.min(self(t)))
