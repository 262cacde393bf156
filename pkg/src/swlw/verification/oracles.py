"""Independently coded reference solvers.

These do not reuse the package's grid, transport or momentum code. Each one
solves the same discrete problem as a reduced configuration of the coupled
stepper by a different route:

* ``ReferenceNavierStokes``: alpha = 0 and H = 0. Each step is one nonlinear
  system in ``u_{n+1}`` (density follows from it), solved by Newton-Krylov.
* ``split_step_nls``: fluid held at rest. Strang splitting with a frozen
  specific volume.
* ``nls_reference``: the space-discrete NLS integrated by an adaptive
  8th-order Runge-Kutta method in the interaction picture.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import newton_krylov


class _Spectral:
    """Full complex-FFT calculus on an ``n x n`` unit torus."""

    def __init__(self, n: int):
        self.n = n
        m = np.fft.fftfreq(n, 1.0 / n)
        k1, k2 = np.meshgrid(m, m, indexing="ij")
        self.keep = (np.abs(k1) <= n / 3.0) & (np.abs(k2) <= n / 3.0)
        odd = lambda k: np.where(np.abs(k) == n // 2, 0.0, 2 * np.pi * k)  # noqa: E731
        self.d1, self.d2 = odd(k1), odd(k2)
        self.lap = -(2 * np.pi) ** 2 * (k1**2 + k2**2)

    def f(self, a):
        return np.fft.fft2(a)

    def b(self, a):
        return np.fft.ifft2(a).real

    def dx(self, a):
        return self.b(1j * self.d1 * self.f(a))

    def dy(self, a):
        return self.b(1j * self.d2 * self.f(a))

    def trunc(self, a):
        return self.b(self.keep * self.f(a))


class ReferenceNavierStokes:
    """Barotropic compressible Navier-Stokes with ``p = a rho^gamma``,
    ``lambda = b rho^beta``.

    Discretisation: SSP-RK3 for the conservative continuity equation along a
    velocity linear in time between ``u_n`` and ``u_{n+1}``; backward Euler
    for momentum with ``rho_{n+1}``, advection by ``u_{n+1}``; 2/3-rule
    truncation of every product.
    """

    def __init__(self, n, a, gamma, mu, b, beta):
        self.s = _Spectral(n)
        self.a, self.gamma, self.mu, self.bb, self.beta = a, gamma, mu, b, beta

    def density(self, rho, u0, u1, dt):
        s = self.s

        def rate(r, w):
            m1, m2 = s.trunc(r * w[0]), s.trunc(r * w[1])
            return -(s.dx(m1) + s.dy(m2))

        mid = 0.5 * (u0 + u1)
        r1 = rho + dt * rate(rho, u0)
        r2 = 0.75 * rho + 0.25 * (r1 + dt * rate(r1, u1))
        return rho / 3.0 + 2.0 / 3.0 * (r2 + dt * rate(r2, mid))

    def residual(self, v, rho_n, u_n, dt):
        s, mu = self.s, self.mu
        rho = self.density(rho_n, u_n, v, dt)
        lam = self.bb * rho**self.beta
        p = self.a * rho**self.gamma
        div = s.dx(v[0]) + s.dy(v[1])
        ld = s.trunc(lam * div)
        out = np.empty_like(v)
        for i, d in enumerate((s.dx, s.dy)):
            adv = v[0] * s.dx(v[i]) + v[1] * s.dy(v[i])
            inertia = s.trunc(rho * (v[i] - u_n[i]) / dt + rho * adv)
            visc = -mu * s.b(s.lap * s.f(v[i])) - mu * d(div) - d(ld)
            out[i] = inertia + visc + s.trunc(d(p))
        return out

    def step(self, rho, u, dt, tol=1e-11):
        shape = u.shape

        def F(flat):
            return self.residual(flat.reshape(shape), rho, u, dt).ravel()

        v = newton_krylov(F, u.ravel().copy(), f_tol=tol, method="lgmres")
        v = v.reshape(shape)
        return self.density(rho, u, v, dt), v

    def run(self, rho, u, dt, steps):
        for _ in range(steps):
            rho, u = self.step(rho, u, dt)
        return rho, u


def _phase_rotation(psi, vol, tau, alpha, g, h_prime):
    amp = np.abs(psi) ** 2
    return psi * np.exp(-1j * tau * (amp + alpha * g(vol) * h_prime(amp)))


def split_step_nls(psi, vol, dt, steps, alpha, g, h_prime):
    """Strang steps of ``i psi_t + Lap psi = (|psi|^2 + alpha g(vol) h'(|psi|^2)) psi``
    with the specific volume ``vol`` frozen."""
    n = psi.shape[0]
    m = np.fft.fftfreq(n, 1.0 / n)
    k1, k2 = np.meshgrid(m, m, indexing="ij")
    prop = np.exp(-1j * dt * (2 * np.pi) ** 2 * (k1**2 + k2**2))
    psi = np.array(psi, dtype=complex)
    for _ in range(steps):
        psi = _phase_rotation(psi, vol, 0.5 * dt, alpha, g, h_prime)
        psi = np.fft.ifft2(prop * np.fft.fft2(psi))
        psi = _phase_rotation(psi, vol, 0.5 * dt, alpha, g, h_prime)
    return psi


def nls_reference(psi0, potential, t_end, rtol=1e-12, atol=1e-13):
    """Space-discrete NLS ``i psi_t = -Lap psi + potential(psi) psi`` to ``t_end``.

    Integrates ``w_hat = exp(i |k|^2 t) psi_hat`` so the stiff linear part
    drops out, with DOP853.
    """
    n = psi0.shape[0]
    m = np.fft.fftfreq(n, 1.0 / n)
    k1, k2 = np.meshgrid(m, m, indexing="ij")
    kk = (2 * np.pi) ** 2 * (k1**2 + k2**2)

    def unpack(y):
        return (y[: n * n] + 1j * y[n * n:]).reshape(n, n)

    def rhs(t, y):
        wh = unpack(y)
        psi = np.fft.ifft2(np.exp(-1j * kk * t) * wh)
        dw = -1j * np.exp(1j * kk * t) * np.fft.fft2(potential(psi) * psi)
        dw = dw.ravel()
        return np.concatenate([dw.real, dw.imag])

    w0 = np.fft.fft2(psi0).ravel()
    sol = solve_ivp(rhs, (0.0, t_end), np.concatenate([w0.real, w0.imag]), method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(sol.message)
    wh = unpack(sol.y[:, -1])
    return np.fft.ifft2(np.exp(-1j * kk * t_end) * wh)
