"""Interaction coefficient and the coupling functions g (specific volume) and h (wave intensity).

Both functions vanish at zero and have compactly supported derivatives:

* ``g'(v) = g_amp * bump((v - v_lo) / (v_hi - v_lo))`` with
  ``bump(t) = exp(-1 / (t (1 - t)))`` on ``(0, 1)``;
* ``h'(s) = h_amp * cutoff(s / s_max)`` where ``cutoff`` is 1 on ``[0, 1/2]``
  and falls smoothly to 0 at 1.

Neither integral has a closed form, so ``g`` and ``h`` are read from a cumulative
Gauss-Legendre table through cubic Hermite interpolation that uses the exact
derivative at every node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

_TABLE_CELLS = 2048
_GAUSS_POINTS = 10


def _smooth_exp(z):
    """``exp(-1/z)`` for ``z > 0``, else 0."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = np.exp(-1.0 / z[pos])
    return out


def bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti * (1.0 - ti)))
    return out


def bump_prime(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    q = ti * (1.0 - ti)
    out[inside] = np.exp(-1.0 / q) * (1.0 - 2.0 * ti) / q**2
    return out


def cutoff(t):
    """1 for ``t <= 1/2``, 0 for ``t >= 1``, C-infinity in between."""
    tau = 2.0 * np.asarray(t, dtype=float) - 1.0
    a = _smooth_exp(1.0 - tau)
    b = _smooth_exp(tau)
    return a / (a + b)


def _cumulative_table(fprime, lo, hi, cells=_TABLE_CELLS):
    nodes = np.linspace(lo, hi, cells + 1)
    xg, wg = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    left, right = nodes[:-1], nodes[1:]
    half = 0.5 * (right - left)
    pts = 0.5 * (right + left)[:, None] + half[:, None] * xg[None, :]
    cell_int = np.sum(fprime(pts) * wg[None, :], axis=1) * half
    vals = np.concatenate([[0.0], np.cumsum(cell_int)])
    return CubicHermiteSpline(nodes, vals, fprime(nodes))


def _nonnegative(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError(f"{what} must be finite and nonnegative")
    return x


@dataclass(frozen=True)
class CouplingSpec:
    alpha: float = 1.0
    v_lo: float = 0.5
    v_hi: float = 2.0
    g_amp: float = 1.0
    s_max: float = 4.0
    h_amp: float = 1.0
    _g_table: CubicHermiteSpline = field(init=False, repr=False, compare=False)
    _h_table: CubicHermiteSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if not 0 < self.v_lo < self.v_hi:
            raise ValueError("g support must satisfy 0 < v_lo < v_hi")
        if self.g_amp <= 0 or self.h_amp <= 0 or self.s_max <= 0:
            raise ValueError("g_amp, h_amp and s_max must be positive")
        object.__setattr__(self, "_g_table", _cumulative_table(self._gp, self.v_lo, self.v_hi))
        object.__setattr__(
            self, "_h_table", _cumulative_table(self._hp, 0.5 * self.s_max, self.s_max)
        )

    def replace(self, **changes) -> "CouplingSpec":
        kw = {k: getattr(self, k) for k in ("alpha", "v_lo", "v_hi", "g_amp", "s_max", "h_amp")}
        kw.update(changes)
        return CouplingSpec(**kw)

    # g ------------------------------------------------------------------

    def _gp(self, v):
        width = self.v_hi - self.v_lo
        return self.g_amp * bump((np.asarray(v, dtype=float) - self.v_lo) / width)

    def g_prime(self, v):
        return self._gp(_nonnegative(v, "specific volume"))

    def g_second(self, v):
        v = _nonnegative(v, "specific volume")
        width = self.v_hi - self.v_lo
        return self.g_amp * bump_prime((v - self.v_lo) / width) / width

    def g_eval(self, v):
        v = _nonnegative(v, "specific volume")
        inside = np.clip(v, self.v_lo, self.v_hi)
        return np.where(v <= self.v_lo, 0.0, self._g_table(inside))

    @property
    def g_max(self) -> float:
        return float(self._g_table(self.v_hi))

    # h ------------------------------------------------------------------

    def _hp(self, s):
        return self.h_amp * cutoff(np.asarray(s, dtype=float) / self.s_max)

    def h_prime(self, s):
        return self._hp(_nonnegative(s, "intensity"))

    def h_eval(self, s):
        s = _nonnegative(s, "intensity")
        knee = 0.5 * self.s_max
        tail = self.h_amp * knee + self._h_table(np.clip(s, knee, self.s_max))
        return np.where(s <= knee, self.h_amp * s, tail)
