"""Uniform periodic grid on the unit torus with spectral calculus.

Fields are plain numpy arrays indexed ``[..., i1, i2]`` with
``x1 = i1 * h`` and ``x2 = i2 * h``:

* scalar field: ``(n, n)`` real
* vector field: ``(2, n, n)`` real
* tensor field: ``(2, 2, n, n)`` real
* complex field: ``(n, n)`` complex

Real fields use ``rfft2``; complex fields use the full ``fft2``. Wavenumbers
are the integer lattice scaled by ``2*pi``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import map_coordinates

TWO_PI = 2.0 * np.pi


def fft_workers() -> int:
    """Thread cap for transforms, read from ``SWLW_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SWLW_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @cached_property
    def x(self) -> np.ndarray:
        """Node coordinates, shape ``(2, n, n)``."""
        s = np.arange(self.n) / self.n
        return np.stack(np.meshgrid(s, s, indexing="ij"))

    # -- wavenumbers -------------------------------------------------------

    @cached_property
    def _kint(self) -> np.ndarray:
        return sfft.fftfreq(self.n, 1.0 / self.n)

    @cached_property
    def _kint_r(self) -> np.ndarray:
        return sfft.rfftfreq(self.n, 1.0 / self.n)

    @cached_property
    def k(self) -> np.ndarray:
        """Scaled wavenumbers ``2*pi*k`` on the rfft layout, shape ``(2, n, n//2+1)``."""
        k1, k2 = np.meshgrid(self._kint, self._kint_r, indexing="ij")
        return TWO_PI * np.stack([k1, k2])

    @cached_property
    def kd(self) -> np.ndarray:
        """Wavenumbers for odd derivatives: Nyquist entries set to zero."""
        kd = self.k.copy()
        kd[0][np.abs(self._kint) == self.n // 2, :] = 0.0
        kd[1][:, np.abs(self._kint_r) == self.n // 2] = 0.0
        return kd

    @cached_property
    def k2(self) -> np.ndarray:
        return self.k[0] ** 2 + self.k[1] ** 2

    @cached_property
    def kc(self) -> np.ndarray:
        """Scaled wavenumbers on the full (complex) layout, ``(2, n, n)``."""
        k1, k2 = np.meshgrid(self._kint, self._kint, indexing="ij")
        return TWO_PI * np.stack([k1, k2])

    @cached_property
    def kc2(self) -> np.ndarray:
        return self.kc[0] ** 2 + self.kc[1] ** 2

    @cached_property
    def mask(self) -> np.ndarray:
        """2/3-rule mask (rfft layout): keep modes with every ``|k_i| <= n/3``."""
        cut = self.n / 3.0
        k1, k2 = np.meshgrid(self._kint, self._kint_r, indexing="ij")
        return (np.abs(k1) <= cut) & (np.abs(k2) <= cut)

    @cached_property
    def mask_c(self) -> np.ndarray:
        cut = self.n / 3.0
        k1, k2 = np.meshgrid(self._kint, self._kint, indexing="ij")
        return (np.abs(k1) <= cut) & (np.abs(k2) <= cut)

    # -- transforms --------------------------------------------------------

    def check(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape[-2:] != self.shape:
            raise ValueError(f"field shape {f.shape} does not match grid {self.shape}")
        return f

    def fft(self, f: np.ndarray) -> np.ndarray:
        f = self.check(f)
        if np.iscomplexobj(f):
            return sfft.fft2(f, axes=(-2, -1), workers=fft_workers())
        return sfft.rfft2(f, axes=(-2, -1), workers=fft_workers())

    def ifft(self, fh: np.ndarray, complex_field: bool = False) -> np.ndarray:
        if complex_field:
            return sfft.ifft2(fh, axes=(-2, -1), workers=fft_workers())
        return sfft.irfft2(fh, s=self.shape, axes=(-2, -1), workers=fft_workers())

    # -- calculus (real fields) -------------------------------------------

    def grad(self, f: np.ndarray) -> np.ndarray:
        """Gradient; a leading ``(2,)`` axis is inserted before the grid axes."""
        return self.ifft(1j * self.kd * self.fft(f)[..., None, :, :])

    def grad_hat(self, fh: np.ndarray) -> np.ndarray:
        """Spectral gradient of a spectral scalar; returns physical ``(2, n, n)``."""
        return self.ifft(1j * self.kd * fh)

    def div(self, u: np.ndarray) -> np.ndarray:
        uh = self.fft(u)
        return self.ifft(self.div_hat(uh))

    def div_hat(self, uh: np.ndarray) -> np.ndarray:
        return 1j * (self.kd[0] * uh[0] + self.kd[1] * uh[1])

    def curl_z(self, u: np.ndarray) -> np.ndarray:
        """``d2 u1 - d1 u2``."""
        uh = self.fft(u)
        return self.ifft(1j * (self.kd[1] * uh[0] - self.kd[0] * uh[1]))

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        return self.ifft(-self.k2 * self.fft(f))

    def jacobian_matrix(self, u: np.ndarray) -> np.ndarray:
        """``G[i, j] = d_j u_i`` for a vector (or ``[i, j]`` tensor rows) field."""
        uh = self.fft(u)
        return self.ifft(1j * self.kd[None, :] * uh[:, None])

    # -- filtering ---------------------------------------------------------

    def dealias(self, f: np.ndarray) -> np.ndarray:
        f = self.check(f)
        if np.iscomplexobj(f):
            return self.ifft(self.fft(f) * self.mask_c, complex_field=True)
        return self.ifft(self.fft(f) * self.mask)

    # -- off-grid evaluation ----------------------------------------------

    def interp(self, f: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Periodic cubic-spline interpolation of ``f`` at ``points``.

        ``points`` has shape ``(2, ...)`` in physical units; values are wrapped
        mod 1. Leading axes of ``f`` (stacked fields) are preserved.
        """
        f = self.check(f)
        pts = np.asarray(points, dtype=float)
        if pts.shape[0] != 2:
            raise ValueError("points must have a leading axis of length 2")
        coords = np.mod(pts, 1.0) * self.n
        if np.iscomplexobj(f):
            return self.interp(f.real, points) + 1j * self.interp(f.imag, points)
        if f.ndim == 2:
            return map_coordinates(f, coords, order=3, mode="grid-wrap")
        flat = f.reshape((-1,) + self.shape)
        out = np.stack([map_coordinates(g, coords, order=3, mode="grid-wrap") for g in flat])
        return out.reshape(f.shape[:-2] + pts.shape[1:])

    # -- reductions --------------------------------------------------------

    def integrate(self, f: np.ndarray) -> np.ndarray:
        """Integral over the unit torus (the grid mean)."""
        return np.mean(f, axis=(-2, -1))

    def l2(self, f: np.ndarray) -> float:
        f = np.asarray(f)
        return float(np.sqrt(np.sum(np.abs(f) ** 2) / self.n**2))
