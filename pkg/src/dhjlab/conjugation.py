"""Reductions of other diffusions to the Brownian case.

A diffusion ``X = v^{-1}(B + v(x))`` reaches ``S`` exactly when ``B``
reaches ``v(S)``, so its first-passage problem is the Brownian one with a
new barrier. Jump densities move between the two state spaces through
``g(x) = q(v(x)) v'(x)``. The Ornstein-Uhlenbeck process with barrier
``S0 exp(-mu t)`` is a time change of Brownian motion, and geometric
Brownian motion with barrier ``exp(sigma S + mu' t)`` is a drifted one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, optimize

from .densities import JumpDensity, density_from_csv  # noqa: F401  (re-export)
from .inversion import Tabulated
from .tabio import read_table
from .transforms import DomainError, DriftParams

__all__ = [
    "VariableChange",
    "ReducedProblem",
    "identity_change",
    "sqrt_change",
    "change_from_sigma",
    "change_from_sigma_csv",
    "reduce_problem",
    "transport_density",
    "ou_time_change",
    "ou_time_change_inverse",
    "map_fpt_distribution",
    "map_fpt_samples",
    "gbm_reduce",
]

KIND_NONE = -1


@dataclass(frozen=True)
class VariableChange:
    """Increasing map ``v`` with ``v(0) = 0`` on the state interval
    ``domain``, with its inverse and derivative."""

    v: object
    v_inv: object
    v_prime: object
    label: str = ""
    domain: tuple = (0.0, math.inf)

    def contains(self, z):
        lo, hi = self.domain
        return lo <= z <= hi


@dataclass(frozen=True)
class ReducedProblem:
    """Brownian problem equivalent to the original one."""

    barrier: float
    start: float
    drift: float = 0.0
    time_map: str = "identity"
    label: str = ""

    def __post_init__(self):
        if not self.barrier > self.start:
            raise DomainError(f"barrier {self.barrier} must exceed start {self.start}")

    def params(self, beta):
        """:class:`DriftParams` for the reduced problem (needs ``start >= 0``)."""
        return DriftParams(self.drift, self.barrier, beta, self.start)


def identity_change():
    return VariableChange(lambda z: np.asarray(z, dtype=float) + 0.0,
                          lambda y: np.asarray(y, dtype=float) + 0.0,
                          lambda z: np.ones_like(np.asarray(z, dtype=float)),
                          "identity")


def sqrt_change():
    """``v(z) = 2 sqrt(z)``, from ``sigma(r) = sqrt(r)`` (CIR-type)."""
    return VariableChange(
        lambda z: 2.0 * np.sqrt(z),
        lambda y: np.asarray(y, dtype=float) ** 2 / 4.0,
        lambda z: 1.0 / np.sqrt(z),
        "2*sqrt(z)",
    )


def change_from_sigma(sigma, upper, label="sigma", breakpoints=()):
    """Build ``v(z) = int_0^z dr / sigma(r)`` by adaptive quadrature.

    ``sigma`` must be positive on ``(0, upper]``; an integrable blow-up of
    ``1/sigma`` at 0 is fine. ``v_inv`` is found by root bracketing.
    ``breakpoints`` marks kinks of ``sigma`` (knots of a tabulation).
    """
    upper = float(upper)
    breaks = np.sort(np.asarray(breakpoints, dtype=float))

    def inv_sigma(r):
        return 1.0 / float(sigma(r))

    def v_scalar(z):
        if z < 0 or z > upper * (1 + 1e-12):
            raise DomainError(f"{z} outside [0, {upper}]")
        if z == 0:
            return 0.0
        pts = breaks[(breaks > 0) & (breaks < z)]
        if pts.size:
            edges = np.concatenate([[0.0], pts, [z]])
            return math.fsum(integrate.quad(inv_sigma, a, b, limit=200, epsabs=1e-14,
                                            epsrel=1e-12)[0]
                             for a, b in zip(edges[:-1], edges[1:]))
        val, _ = integrate.quad(inv_sigma, 0.0, z, limit=400, epsabs=1e-13, epsrel=1e-12)
        return val

    v_top = v_scalar(upper)

    def v(z):
        z = np.asarray(z, dtype=float)
        return np.vectorize(v_scalar, otypes=[float])(z) if z.ndim else v_scalar(float(z))

    def v_inv_scalar(y):
        if y <= 0:
            return 0.0
        if y >= v_top:
            return upper
        return optimize.brentq(lambda z: v_scalar(z) - y, 0.0, upper, xtol=1e-15, rtol=1e-14)

    def v_inv(y):
        y = np.asarray(y, dtype=float)
        if y.ndim:
            return np.vectorize(v_inv_scalar, otypes=[float])(y)
        return v_inv_scalar(float(y))

    def v_prime(z):
        z = np.asarray(z, dtype=float)
        return 1.0 / np.vectorize(lambda r: float(sigma(r)), otypes=[float])(z)

    return VariableChange(v, v_inv, v_prime, label, (0.0, upper))


def change_from_sigma_csv(path):
    """Variable change from an ``r, sigma`` table.

    Monotone cubic interpolation between knots; below the first knot,
    the power law through the first two knots (so ``sigma ~ sqrt(r)``
    near 0 is reproduced).
    """
    _, cols = read_table(path)
    r, s = (np.asarray(c, dtype=float) for c in list(cols.values())[:2])
    if np.any(np.diff(r) <= 0) or r[0] <= 0 or np.any(s <= 0):
        raise ValueError("need increasing positive r and positive sigma")
    spline = interpolate.PchipInterpolator(r, s)
    a = math.log(s[1] / s[0]) / math.log(r[1] / r[0])
    c = s[0] / r[0] ** a

    def sigma(x):
        return c * x**a if x < r[0] else float(spline(x))

    return change_from_sigma(sigma, r[-1], label=f"csv:{path}", breakpoints=r)


def reduce_problem(vc, S, x=0.0):
    """Brownian barrier ``v(S)`` and start ``v(x)``."""
    if not (vc.contains(S) and vc.contains(x)):
        raise DomainError(f"S={S}, x={x} must lie in the domain {vc.domain}")
    if not 0 <= x < S:
        raise DomainError("need 0 <= x < S")
    return ReducedProblem(float(vc.v(S)), float(vc.v(x)), 0.0, "identity", vc.label)


def transport_density(q, vc, S, tol=1e-6):
    """Density of ``v^{-1}(U)`` for ``U ~ q`` on ``(0, v(S))``.

    The transform is computed in the ``q`` variable,
    ``int exp(-lam v^{-1}(y)) q(y) dy``, which avoids any singularity of
    ``v'`` at the endpoints. Raises ``ValueError`` if direct quadrature of
    the new pdf is more than ``tol`` away from one.
    """
    S = float(S)
    top = float(vc.v(S))
    if abs(top - q.S) > 1e-9 * max(1.0, top):
        raise DomainError(f"q lives on (0, {q.S}) but v(S) = {top}")

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < S)
        xs = np.where(inside, x, S / 2)
        return np.where(inside, q.pdf(vc.v(xs)) * vc.v_prime(xs), 0.0)

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, S)
        return q.cdf(vc.v(x))

    def _quad_y(fn):
        return integrate.quad(fn, 0.0, top, limit=400, epsabs=1e-13, epsrel=1e-12)[0]

    def lt_scalar(lam):
        lam = complex(lam)
        if lam.imag == 0:
            return _quad_y(lambda y: math.exp(-lam.real * float(vc.v_inv(y))) * float(q.pdf(y)))
        re = _quad_y(lambda y: (np.exp(-lam * float(vc.v_inv(y))) * float(q.pdf(y))).real)
        im = _quad_y(lambda y: (np.exp(-lam * float(vc.v_inv(y))) * float(q.pdf(y))).imag)
        return complex(re, im)

    def lt(lam):
        arr = np.asarray(lam)
        if arr.ndim == 0:
            return lt_scalar(arr.item())
        out = np.array([lt_scalar(v) for v in arr.ravel()])
        return out.reshape(arr.shape)

    def draw(rng, size=None):
        return vc.v_inv(q.sample(rng, size))

    mass = integrate.quad(lambda x: float(pdf(x)), 0.0, S, limit=400, epsabs=1e-12,
                          epsrel=1e-12)[0]
    if abs(mass - 1.0) > tol:
        raise ValueError(f"transported density integrates to {mass}, not 1")
    moments = tuple(_quad_y(lambda y, j=j: float(vc.v_inv(y)) ** j * float(q.pdf(y)))
                    for j in (1, 2, 3))
    mid = S / 2
    probe = np.linspace(0.05, 0.45, 9) * S
    symmetric = bool(np.allclose(pdf(mid - probe), pdf(mid + probe), rtol=1e-9))
    return JumpDensity(f"{q.name}@{vc.label}", S, pdf, cdf, lt, draw, symmetric, moments,
                       KIND_NONE)


def ou_time_change(mu, sigma, t):
    """``rho(t) = sigma^2/(2 mu) (exp(2 mu t) - 1)``."""
    _check_ou(mu, sigma)
    return sigma**2 / (2.0 * mu) * np.expm1(2.0 * mu * np.asarray(t, dtype=float))


def ou_time_change_inverse(mu, sigma, u):
    """``rho^{-1}(u) = log(1 + 2 mu u / sigma^2) / (2 mu)``."""
    _check_ou(mu, sigma)
    return np.log1p(2.0 * mu * np.asarray(u, dtype=float) / sigma**2) / (2.0 * mu)


def _check_ou(mu, sigma):
    if not (mu > 0 and sigma > 0):
        raise DomainError("OU rate mu and volatility sigma must be positive")


def map_fpt_distribution(F, mu, sigma, direction="to_ou"):
    """Carry a tabulated FPT CDF between the Brownian and OU clocks.

    ``to_ou``: ``F`` is the Brownian CDF in ``u``; returns ``F o rho`` on
    the grid ``rho^{-1}(u)``. ``to_bm`` is the reverse, ``F o rho^{-1}``.
    """
    if np.any(np.diff(F.y) < -1e-12):
        raise ValueError("CDF must be nondecreasing")
    if direction == "to_ou":
        x = ou_time_change_inverse(mu, sigma, F.x)
    elif direction == "to_bm":
        x = ou_time_change(mu, sigma, F.x)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    meta = dict(F.meta, clock=direction, mu_ou=mu, sigma=sigma)
    return Tabulated(np.asarray(x), np.asarray(F.y).copy(), F.ok.copy(), meta)


def map_fpt_samples(samples, mu, sigma):
    """Brownian-clock passage times mapped to OU time by ``rho^{-1}``."""
    return ou_time_change_inverse(mu, sigma, samples)


def gbm_reduce(x0, sigma, r, mu_prime, S):
    """GBM ``dX = r X dt + sigma X dB`` and barrier ``exp(sigma S + mu' t)``
    become Brownian motion with drift ``(mu - mu')/sigma`` from
    ``ln(x0)/sigma`` to the barrier ``S``, where ``mu = r - sigma^2/2``.
    """
    if not (x0 > 0 and sigma > 0):
        raise DomainError("need x0 > 0 and sigma > 0")
    mu = r - sigma**2 / 2.0
    return ReducedProblem(float(S), math.log(x0) / sigma, (mu - mu_prime) / sigma,
                          "identity", "gbm")
