"""Laplace-domain kernels for drifted Brownian motion with a holding and
jumping boundary at 0, and the forward/inverse maps between the jump law
and the first-passage law.

All functions are vectorised over ``lam``. Closed forms are written so that
complex arguments work too; the inversion module relies on that to evaluate
jump-density transforms on the imaginary axis.

Conventions
-----------
``r = sqrt(2*lam + mu**2)``. A process started at ``x = 0`` first holds for an
Exp(beta) time and then jumps (``initial_hold=True``). Pass
``initial_hold=False`` for the variant that jumps immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DomainError",
    "DriftParams",
    "TransformFn",
    "killed_transition_lt",
    "hitting_time_lt_to_zero",
    "phat_0S",
    "phat_SS",
    "phat_xS",
    "forward_fpt_lt",
    "forward_fpt_lt_sym0",
    "forward_fpt_lt_nohold",
    "inverse_g_lt",
    "inverse_g_lt_nohold",
    "mean_fpt",
    "mean_from_transform",
]


class DomainError(ValueError):
    """Argument outside the region where a formula is defined."""


@dataclass(frozen=True)
class DriftParams:
    """Drift ``mu``, barrier ``S``, holding rate ``beta`` and start ``x``.

    ``beta`` may be ``math.inf`` (no holding). The sign of ``mu`` is not
    checked here because the simulator accepts any drift; the transform
    functions require ``mu <= 0``.
    """

    mu: float = 0.0
    S: float = 1.0
    beta: float = 1.0
    x: float = 0.0

    def __post_init__(self):
        if not (self.S > 0 and math.isfinite(self.S)):
            raise DomainError(f"barrier S must be positive and finite, got {self.S}")
        if not self.beta > 0:
            raise DomainError(f"holding rate beta must be positive, got {self.beta}")
        if not (0 <= self.x < self.S):
            raise DomainError(f"start x must lie in [0, S), got x={self.x}, S={self.S}")
        if not math.isfinite(self.mu):
            raise DomainError("drift mu must be finite")


@dataclass(frozen=True)
class TransformFn:
    """A scalar transform ``lam -> value`` with its valid real domain.

    ``complex_ok`` marks closed forms that can be continued off the real
    axis (needed by the Fourier inverter).
    """

    eval: Callable
    domain: tuple = (0.0, math.inf)
    label: str = ""
    complex_ok: bool = False

    def __call__(self, lam):
        return self.eval(lam)


def _as_array(lam):
    arr = np.asarray(lam)
    if arr.dtype.kind in "iub":
        arr = arr.astype(float)
    return arr


def _scalar_out(value, like):
    if np.ndim(like) == 0:
        return value.item() if isinstance(value, np.ndarray) else value
    return value


def _require_positive(lam, what):
    if np.iscomplexobj(lam):
        raise DomainError(f"{what} is defined for real lambda > 0 only")
    if np.any(lam <= 0):
        raise DomainError(f"{what} requires lambda > 0")


def _require_nonpositive_drift(mu):
    if mu > 0:
        raise DomainError(f"transform formulas require mu <= 0, got mu={mu}")


def _sqrt(z):
    # principal branch; real negatives go complex
    if np.iscomplexobj(z) or np.any(np.asarray(z) < 0):
        return np.sqrt(np.asarray(z, dtype=complex))
    return np.sqrt(z)


def _realify(value, lam):
    """Return real output for real input; transforms here are real on the real axis."""
    if np.iscomplexobj(value) and not np.iscomplexobj(lam):
        return value.real
    return value


def killed_transition_lt(lam, x, y, mu=0.0):
    """Resolvent density of ``mu*t + B_t`` started at ``x`` and killed at 0."""
    lam = _as_array(lam)
    _require_positive(lam, "killed_transition_lt")
    if x < 0 or y <= 0:
        raise DomainError("need x >= 0 and y > 0")
    r = np.sqrt(2.0 * lam + mu * mu)
    d = abs(y - x)
    val = np.exp(mu * (y - x) - d * r) * (-np.expm1(-2.0 * min(x, y) * r)) / r
    return _scalar_out(val, lam)


def hitting_time_lt_to_zero(lam, x, mu=0.0):
    """``E exp(-lam T_0)`` for the free drifted motion started at ``x >= 0``."""
    lam = _as_array(lam)
    _require_positive(lam, "hitting_time_lt_to_zero")
    _require_nonpositive_drift(mu)
    if x < 0:
        raise DomainError("x must be >= 0")
    r = np.sqrt(2.0 * lam + mu * mu)
    # r + mu written without cancellation
    val = np.exp(-x * 2.0 * lam / (r - mu))
    return _scalar_out(val, lam)


def _renewal_pieces(lam, p, ghat):
    """Shared quantities of the two resolvent densities at level S.

    Returns ``(r, D, coef)`` where ``D = g(mu - r) - g(mu + r)`` and
    ``coef = beta / (lam + beta * (1 - g(mu + r)))``.
    """
    _require_positive(lam, "resolvent formulas")
    _require_nonpositive_drift(p.mu)
    mu = p.mu
    r = np.sqrt(2.0 * lam + mu * mu)
    r_plus_mu = 2.0 * lam / (r - mu)
    g_up = np.asarray(ghat(r_plus_mu), dtype=float)
    D = np.asarray(ghat(mu - r), dtype=float) - g_up
    if math.isinf(p.beta):
        den = 1.0 - g_up
        if np.any(den <= 0):
            raise DomainError("1 - g(r + mu) <= 0: jump transform exceeds 1")
        coef = 1.0 / den
    else:
        den = lam + p.beta * (1.0 - g_up)
        if np.any(den <= 0):
            raise DomainError("renewal denominator <= 0: jump transform exceeds 1")
        coef = p.beta / den
    return r, D, coef


def phat_0S(lam, p, ghat):
    """Resolvent density at ``y = S`` of the process started at 0."""
    lam = _as_array(lam)
    r, D, coef = _renewal_pieces(lam, p, ghat)
    val = coef * np.exp(p.S * (p.mu - r)) * D / r
    return _scalar_out(val, lam)


def phat_SS(lam, p, ghat):
    """Resolvent density at ``y = S`` of the process started at S."""
    lam = _as_array(lam)
    r, D, coef = _renewal_pieces(lam, p, ghat)
    val = (-np.expm1(-2.0 * p.S * r) + coef * np.exp(-2.0 * p.S * r) * D) / r
    if np.any(val <= 0):
        raise DomainError("phat_SS must be positive; invalid jump transform")
    return _scalar_out(val, lam)


def phat_xS(lam, p, ghat):
    """Resolvent density at ``y = S`` from an interior start ``p.x``."""
    lam = _as_array(lam)
    if p.x == 0:
        return phat_0S(lam, p, ghat)
    r, D, coef = _renewal_pieces(lam, p, ghat)
    free = killed_transition_lt(lam, p.x, p.S, p.mu)
    hit0 = hitting_time_lt_to_zero(lam, p.x, p.mu)
    val = free + hit0 * coef * np.exp(p.S * (p.mu - r)) * D / r
    return _scalar_out(val, lam)


def forward_fpt_lt(lam, p, ghat, initial_hold=True):
    """Laplace transform of the first-passage time over ``p.S``.

    Ratio of resolvent densities ``phat(lam, x, S) / phat(lam, S, S)``,
    with the common ``1/r`` cancelled. ``ghat`` must be a two-sided
    transform (it is evaluated at ``mu - r < 0``).
    """
    lam = _as_array(lam)
    r, D, coef = _renewal_pieces(lam, p, ghat)
    S, mu = p.S, p.mu
    jump_part = coef * D
    den = -np.expm1(-2.0 * S * r) + np.exp(-2.0 * S * r) * jump_part
    num = np.exp(S * (mu - r)) * jump_part
    if p.x > 0:
        free = killed_transition_lt(lam, p.x, S, mu) * r
        num = free + hitting_time_lt_to_zero(lam, p.x, mu) * num
    val = num / den
    if p.x == 0 and not initial_hold and not math.isinf(p.beta):
        val = val * (lam + p.beta) / p.beta
    return _scalar_out(val, lam)


def forward_fpt_lt_sym0(lam, S, beta, ghat, initial_hold=True):
    """First-passage transform for ``mu = 0``, ``x = 0`` and a jump density
    symmetric about ``S/2``.

    Closed form ``beta*G / ((1 + e)(lam + beta) - beta*G)`` with
    ``G = ghat(sqrt(2 lam))`` and ``e = exp(-S sqrt(2 lam))``. The result
    is even in the square root, so negative and complex ``lam`` give the
    analytic continuation.
    """
    lam = _as_array(lam)
    r = _sqrt(2.0 * lam)
    G = ghat(r)
    e = np.exp(-S * r)
    if math.isinf(beta):
        den = 1.0 + e - G
        num = G
    else:
        den = (1.0 + e) * (lam + beta) - beta * G
        num = beta * G if initial_hold else G * (lam + beta)
    if not np.iscomplexobj(den) and np.any(den <= 0):
        raise DomainError("denominator <= 0: jump transform exceeds 1")
    val = _realify(num / den, lam)
    return _scalar_out(val, lam)


def forward_fpt_lt_nohold(lam, S, ghat):
    """No-holding limit ``G / (1 + e - G)`` of :func:`forward_fpt_lt_sym0`."""
    return forward_fpt_lt_sym0(lam, S, math.inf, ghat)


def inverse_g_lt(lam, fhat0, S, beta, initial_hold=True):
    """Candidate jump transform reproducing the FPT transform ``fhat0``.

    Algebraic inverse of :func:`forward_fpt_lt_sym0`. Nothing guarantees the
    result is the transform of a density on (0, S); run
    :func:`dhjlab.inversion.check_density` on it.
    """
    lam = _as_array(lam)
    s = lam * lam / 2.0
    F = np.asarray(fhat0(s))
    e = np.exp(-S * lam)
    if math.isinf(beta):
        val = F * (1.0 + e) / (1.0 + F)
    elif initial_hold:
        val = F * (1.0 + e) * (s + beta) / (beta * (1.0 + F))
    else:
        val = F * (1.0 + e) * (s + beta) / (s + beta + beta * F)
    return _scalar_out(val, lam)


def inverse_g_lt_nohold(lam, fhat0, S):
    """``beta -> inf`` limit of :func:`inverse_g_lt`."""
    return inverse_g_lt(lam, fhat0, S, math.inf)


def mean_fpt(beta, second_moment_U, S, first_moment_U=None, initial_hold=True):
    """Mean first-passage time from 0 for ``mu = 0``.

    Renewal argument over excursions from 0. With a symmetric jump law
    (``first_moment_U = S/2``, the default) this is
    ``2/beta + S**2 - 2 E[U**2]``, or ``1/beta + S**2 - 2 E[U**2]`` when the
    first hold is skipped.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    m2 = second_moment_U
    if not 0 < m2 < S * S:
        raise DomainError(f"E[U^2] must lie in (0, S^2), got {m2}")
    m1 = S / 2.0 if first_moment_U is None else first_moment_U
    if not 0 < m1 < S:
        raise DomainError(f"E[U] must lie in (0, S), got {m1}")
    inv_beta = 0.0 if math.isinf(beta) else 1.0 / beta
    # expected time from an arrival at 0 (hold included) to passage
    from_zero = S * inv_beta / m1 + S * S - S * m2 / m1
    if initial_hold:
        return from_zero
    return S * m1 - m2 + (1.0 - m1 / S) * from_zero


def mean_from_transform(fhat, h=1e-6, one_sided=False):
    """``-f'(0)`` by a central difference; ``fhat`` must accept ``-h``.

    ``one_sided=True`` uses ``(1 - f(h))/h`` and ``(1 - f(2h))/(2h)``
    combined once, for transforms defined on ``lam > 0`` only.
    """
    if one_sided:
        d1 = (1.0 - fhat(h)) / h
        d2 = (1.0 - fhat(2.0 * h)) / (2.0 * h)
        return 2.0 * d1 - d2
    return -(fhat(h) - fhat(-h)) / (2.0 * h)
