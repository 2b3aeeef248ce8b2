"""Independent reference computations used only by the tests.

Nothing here calls the closed forms under test: kernels are integrated in
the time domain, transforms of densities by quadrature, inversions by
mpmath's Talbot contour, and the Ornstein-Uhlenbeck process is simulated
directly in its own state space.
"""

from __future__ import annotations

import math
import warnings

import mpmath as mp
import numba as nb
import numpy as np
from scipy import integrate


def killed_kernel_lt_quad(lam, x, y, mu):
    """int_0^inf e^{-lam t} p^D(t, x, y) dt for mu t + B_t killed at 0."""

    def p(t):
        g = math.exp(mu * (y - x) - mu * mu * t / 2.0)
        c = 1.0 / math.sqrt(2.0 * math.pi * t)
        return g * c * (math.exp(-(y - x) ** 2 / (2 * t)) - math.exp(-(y + x) ** 2 / (2 * t)))

    f = lambda t: math.exp(-lam * t) * p(t)  # noqa: E731
    return sum(integrate.quad(f, a, b, limit=400, epsabs=1e-14, epsrel=1e-12)[0]
               for a, b in ((0, 0.5), (0.5, 5), (5, 50)))


def hitting_lt_quad(lam, x, mu):
    """E e^{-lam T_0} from the first-passage density of mu t + B_t."""

    def f(t):
        return math.exp(-lam * t) * x / math.sqrt(2 * math.pi * t**3) * math.exp(
            -(x + mu * t) ** 2 / (2 * t))

    return sum(integrate.quad(f, a, b, limit=400, epsabs=1e-14, epsrel=1e-12)[0]
               for a, b in ((0, 1), (1, 20), (20, 400)))


def density_lt_quad(pdf, S, lam, points=None):
    f = lambda u: math.exp(-lam * u) * float(pdf(u))  # noqa: E731
    return integrate.quad(f, 0.0, S, points=points, limit=400, epsabs=1e-14, epsrel=1e-13)[0]


def ik_quad(k, lam):
    # odd k cancels to near zero; quad then warns about unreachable relative accuracy
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(lambda x: math.exp(-lam * x) * x**k, -1.0, 1.0,
                              epsabs=1e-15, epsrel=1e-14, limit=200)[0]


# -- high-precision forward map, used to freeze reference values --------

def mp_uniform_lt(S):
    return lambda z: (1 - mp.exp(-S * z)) / (S * z)


def mp_sine_lt(S):
    return lambda z: mp.pi**2 / 2 * (1 + mp.exp(-S * z)) / (S**2 * z**2 + mp.pi**2)


def mp_fpt_lt(lam, S, beta, ghat, mu=0, x=0):
    """Resolvent ratio phat(lam, x, S) / phat(lam, S, S) in mpmath.

    Built from the killed kernel integrated against the jump law and the
    renewal at 0; independent of the double-precision code paths.
    """
    lam, S, beta, mu, x = (mp.mpmathify(v) for v in (lam, S, beta, mu, x))
    r = mp.sqrt(2 * lam + mu**2)
    D = ghat(mu - r) - ghat(mu + r)
    coef = beta / (lam + beta * (1 - ghat(r + mu)))
    p0 = coef * mp.exp(S * (mu - r)) * D / r
    pss = (1 - mp.exp(-2 * S * r) + coef * mp.exp(-2 * S * r) * D) / r
    if x == 0:
        return p0 / pss
    free = mp.exp(mu * (S - x) - (S - x) * r) * (1 - mp.exp(-2 * x * r)) / r
    return (free + mp.exp(-x * (r + mu)) * p0) / pss


def talbot_cdf(fhat_mp, t):
    """P(tau <= t) by Talbot inversion of fhat(s)/s at 30 digits."""
    with mp.workdps(30):
        return float(mp.invertlaplace(lambda s: fhat_mp(s) / s, t, method="talbot"))


# -- direct OU simulation ----------------------------------------------

@nb.njit(cache=True)
def _ou_paths(n, dt, mu, sigma, S0, beta, seed, jump_kind, out):
    np.random.seed(seed)
    s2 = sigma * sigma
    decay = math.exp(-mu * dt)
    sd = sigma * math.sqrt(-math.expm1(-2 * mu * dt) / (2 * mu))
    for i in range(n):
        t = 0.0
        u0 = 0.0  # Brownian clock at the hold start
        # initial hold in Brownian time, then jump scaled by e^{-mu t}
        H = np.random.exponential(1.0 / beta)
        t = math.log1p(2 * mu * (u0 + H) / s2) / (2 * mu)
        U = np.random.random() * S0 if jump_kind == 0 else S0 / math.pi * math.acos(
            1 - 2 * np.random.random())
        x = math.exp(-mu * t) * U
        while True:
            # exact OU transition over one step
            xn = x * decay + sd * np.random.standard_normal()
            tn = t + dt
            b1 = S0 * math.exp(-mu * t)
            b2 = S0 * math.exp(-mu * tn)
            if xn >= b2:
                out[i] = tn
                break
            var = s2 * dt
            if np.random.random() < math.exp(-2 * (b1 - x) * (b2 - xn) / var):
                out[i] = tn
                break
            hit0 = xn <= 0 or np.random.random() < math.exp(-2 * x * xn / var)
            if hit0:
                u0 = s2 / (2 * mu) * math.expm1(2 * mu * tn)
                H = np.random.exponential(1.0 / beta)
                tn = math.log1p(2 * mu * (u0 + H) / s2) / (2 * mu)
                U = np.random.random() * S0 if jump_kind == 0 else S0 / math.pi * math.acos(
                    1 - 2 * np.random.random())
                xn = math.exp(-mu * tn) * U
            x = xn
            t = tn


def simulate_ou_direct(n, dt, mu, sigma, S0, beta, seed, jump="uniform"):
    """OU passage times over S0 exp(-mu t) with holding at 0 clocked in the
    Brownian time rho(t) and restart at exp(-mu t) U, U ~ jump law on (0, S0)."""
    out = np.empty(n)
    _ou_paths(n, dt, mu, sigma, S0, beta, seed, 0 if jump == "uniform" else 1, out)
    return out
