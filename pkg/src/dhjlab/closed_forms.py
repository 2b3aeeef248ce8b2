"""Closed-form first-passage transforms for the catalog jump densities and
the named FPT laws accepted by the inverse map.

Every closed form here is for drift 0, start 0, an initial hold and
``r = sqrt(2 lam)``, ``e = exp(-S r)``. They agree with
:func:`dhjlab.transforms.forward_fpt_lt_sym0` and are written out as
independent expressions so tests can compare the two.
"""

from __future__ import annotations

import math

import numpy as np

from .transforms import TransformFn, _sqrt, _realify, _scalar_out

__all__ = [
    "fhat_uniform",
    "fhat_sine",
    "fhat_parabolic",
    "fhat_triangular",
    "fhat_g2k",
    "fhat_exponential",
    "closed_form",
    "named_fpt",
]


def _prep(lam):
    lam = np.asarray(lam)
    if lam.dtype.kind in "iub":
        lam = lam.astype(float)
    r = _sqrt(2.0 * lam)
    return lam, r


def _finish(val, lam):
    return _scalar_out(_realify(val, lam), lam)


def fhat_uniform(lam, S=1.0, b=1.0):
    lam, r = _prep(lam)
    e = np.exp(-S * r)
    one_m = -np.expm1(-S * r)
    val = b * one_m / (S * r * (1 + e) * (lam + b) - b * one_m)
    return _finish(val, lam)


def fhat_sine(lam, S=1.0, b=1.0):
    lam, _ = _prep(lam)
    pi2 = math.pi**2
    val = b * pi2 / ((4 * lam * S * S + 2 * pi2) * (lam + b) - b * pi2)
    return _finish(val, lam)


def fhat_parabolic(lam, S=1.0, b=1.0):
    lam, r = _prep(lam)
    z = S * r
    e = np.exp(-z)
    N = _parabolic_numerator(z, e)
    val = 6 * b * N / (z**3 * (1 + e) * (lam + b) - 6 * b * N)
    return _finish(val, lam)


def _parabolic_numerator(z, e):
    """``e (z + 2) + z - 2 = sum_{j>=3} (-1)^(j+1) (j-2) z^j / j!``; the
    series is used for ``|z| < 1`` where the closed form cancels."""
    z = np.asarray(z)
    val = e * (z + 2) + z - 2
    small = np.abs(z) < 1.0
    if np.any(small):
        zs = z[small] if z.ndim else z
        acc = np.zeros_like(zs)
        term = zs**3 / 6.0
        for j in range(3, 30):
            acc = acc + (-1) ** (j + 1) * (j - 2) * term
            term = term * zs / (j + 1)
        if z.ndim:
            val = np.array(val, dtype=np.result_type(val, acc))
            val[small] = acc
        else:
            val = acc
    return val


def fhat_triangular(lam, b=1.0):
    lam, r = _prep(lam)
    e = np.exp(-r)
    q = np.exp(-r / 2.0)
    val = 2 * b * (1 - q) ** 2 / (lam * (1 + e) * (lam + b) - 2 * b * (1 - q) ** 2)
    return _finish(val, lam)


def fhat_g2k(lam, k, b=1.0):
    from .densities import g2k_density

    G = g2k_density(k).lt
    lam, r = _prep(lam)
    g = np.asarray(G(r))
    e = np.exp(-r)
    val = g / ((1 + e) * (1 + lam / b) - g)
    return _finish(val, lam)


def fhat_exponential(lam, rate=1.0):
    lam = np.asarray(lam)
    return _scalar_out(rate / (rate + lam), lam)


def closed_form(name, S=1.0, b=1.0):
    """Closed-form forward transform for catalog density ``name``."""
    if name == "uniform":
        return lambda lam: fhat_uniform(lam, S, b)
    if name == "sine":
        return lambda lam: fhat_sine(lam, S, b)
    if name == "parabolic":
        return lambda lam: fhat_parabolic(lam, S, b)
    if name == "triangular":
        if S != 1.0:
            raise ValueError("triangular density is defined for S = 1 only")
        return lambda lam: fhat_triangular(lam, b)
    if name.startswith("g2k:"):
        if S != 1.0:
            raise ValueError("g2k densities are defined for S = 1 only")
        k = int(name.split(":", 1)[1])
        return lambda lam: fhat_g2k(lam, k, b)
    raise KeyError(f"no closed form for {name!r}")


def named_fpt(spec, S=1.0, b=1.0):
    """Named FPT law as a :class:`TransformFn`.

    ``exponential`` / ``exponential:<rate>`` is the law of Remark-type
    non-existence checks; ``<density>`` (``uniform``, ``sine``, ...) is the
    forward transform of that jump density with holding rate ``b``.
    """
    if spec.startswith("exponential"):
        rate = float(spec.split(":", 1)[1]) if ":" in spec else 1.0
        return TransformFn(lambda lam: fhat_exponential(lam, rate), (-rate, math.inf),
                           f"exponential:{rate}", complex_ok=True)
    fn = closed_form(spec, S, b)
    return TransformFn(fn, (0.0, math.inf), f"fpt[{spec},S={S},b={b}]", complex_ok=True)
