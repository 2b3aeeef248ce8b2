"""Jump densities on (0, S): pdf, cdf, exact samplers and two-sided
Laplace transforms ``g(lam) = int_0^S exp(-lam u) g(u) du``.

The transforms accept any real or complex ``lam``; compact support makes
them entire. Each entry also carries a small integer code so the numba
simulator can draw jumps without calling back into Python.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

try:
    import numba as nb

    _njit = nb.njit(cache=True)
except ImportError:  # pragma: no cover
    def _njit(f):
        return f

__all__ = [
    "JumpDensity",
    "uniform_density",
    "sine_density",
    "parabolic_density",
    "triangular_density",
    "g2k_density",
    "tabulated_density",
    "density_from_csv",
    "ik_integral",
    "catalog",
    "by_name",
    "KIND_UNIFORM",
    "KIND_SINE",
    "KIND_TRIANGULAR",
    "KIND_POLY",
    "KIND_TABLE",
]

KIND_UNIFORM, KIND_SINE, KIND_TRIANGULAR, KIND_POLY, KIND_TABLE = range(5)

_SERIES_CUT = 1e-4


@dataclass(frozen=True)
class JumpDensity:
    """Probability density of the restart point after a hold.

    ``sim_kind``/``sim_k``/``sim_table`` describe the law to the compiled
    simulator: closed-form inverse CDFs, rejection from ``1 - (2u/S-1)**2k``,
    or a piecewise-linear pdf table ``(u, pdf, cdf)``.
    """

    name: str
    support_S: float
    pdf: Callable
    cdf: Callable
    lt: Callable
    sampler: Callable
    symmetric: bool
    moments: tuple
    sim_kind: int = KIND_TABLE
    sim_k: int = 0
    sim_table: tuple = field(default=None, repr=False)

    @property
    def S(self):
        return self.support_S

    @property
    def second_moment(self):
        return self.moments[1]

    def sample(self, rng, size=None):
        return self.sampler(rng, size)

    def simulator_spec(self):
        """``(kind, k, u, pdf, cdf)`` arrays for the compiled simulator."""
        if self.sim_table is None:
            empty = np.zeros(2)
            return self.sim_kind, self.sim_k, empty, empty, empty
        u, f, F = self.sim_table
        return self.sim_kind, self.sim_k, u, f, F


# -- numerical helpers ------------------------------------------------------

def _arr(lam):
    a = np.asarray(lam)
    if a.dtype.kind in "iub":
        a = a.astype(float)
    return a


def _out(val, lam):
    if np.ndim(lam) == 0:
        return val.item() if isinstance(val, np.ndarray) else val
    return val


def _phi1(z):
    """(1 - exp(-z)) / z, entire."""
    z = _arr(z)
    small = np.abs(z) < _SERIES_CUT
    safe = np.where(small, 1.0, z)
    out = -np.expm1(-safe) / safe
    if np.any(small):
        zs = z[small] if z.ndim else z
        series = 1.0 - zs / 2.0 + zs * zs / 6.0 - zs**3 / 24.0
        if z.ndim:
            out = np.array(out, dtype=np.result_type(out, series))
            out[small] = series
        else:
            out = series
    return out


def _phi2(z):
    """int_0^1 t exp(-z t) dt, entire."""
    z = _arr(z)
    small = np.abs(z) < 0.5
    safe = np.where(small, 1.0, z)
    em = np.exp(-safe)
    out = (-np.expm1(-safe) - safe * em) / (safe * safe)
    if np.any(small):
        zs = z[small] if z.ndim else z
        term = np.ones_like(zs)
        acc = term / 2.0
        for j in range(1, 24):
            term = term * (-zs) / j
            acc = acc + term / (j + 2)
        if z.ndim:
            out = np.array(out, dtype=np.result_type(out, acc))
            out[small] = acc
        else:
            out = acc
    return out


def _moments_by_quad(pdf, S, breaks=()):
    pts = sorted(set(breaks))
    return tuple(
        integrate.quad(lambda u, j=j: u**j * pdf(u), 0.0, S, points=pts or None,
                       epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        for j in (1, 2, 3)
    )


def _in_support(u, S):
    u = np.asarray(u, dtype=float)
    return (u > 0) & (u < S), u


# -- I_k recursion ------------------------------------------------------------

def _ik_scalar(k, lam):
    if abs(lam) < _SERIES_CUT:
        # int x^(k+j) over [-1,1] vanishes for odd k+j
        acc = 0.0
        term = 1.0
        for j in range(0, 8):
            if (k + j) % 2 == 0:
                acc += term * 2.0 / (k + j + 1)
            term *= -lam / (j + 1)
        return acc
    ep, em = np.exp(lam), np.exp(-lam)
    if abs(lam) >= k:
        val = 2.0 * np.sinh(lam) / lam
        for j in range(1, k + 1):
            val = ((-1) ** j * ep - em) / lam + j / lam * val
        return val
    # downward: I_{j-1} = (lam I_j - ((-1)^j e^lam - e^-lam)) / j, stable for |lam| < j
    top = int(2 * max(k, abs(lam))) + 64
    val = 0.0 * lam
    for j in range(top, k, -1):
        val = (lam * val - ((-1) ** j * ep - em)) / j
    return val


def ik_integral(k, lam):
    """``I_k(lam) = int_{-1}^{1} exp(-lam x) x**k dx`` for integer ``k >= 0``.

    Upward recursion from ``I_0 = 2 sinh(lam)/lam`` where it is stable
    (``|lam| >= k``), downward recursion otherwise, Taylor series near 0.
    """
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    k = int(k)
    lam_a = _arr(lam)
    if lam_a.ndim == 0:
        return _ik_scalar(k, lam_a.item())
    out = np.empty(lam_a.shape, dtype=np.result_type(lam_a, float))
    for idx, v in np.ndenumerate(lam_a):
        out[idx] = _ik_scalar(k, v)
    return out


# -- catalog ------------------------------------------------------------------

def _uniform_sampler(S):
    def draw(rng, size=None):
        return rng.uniform(0.0, S, size)
    return draw


def uniform_density(S=1.0):
    """Uniform law on (0, S)."""
    S = float(S)

    def pdf(u):
        inside, u = _in_support(u, S)
        return np.where(inside, 1.0 / S, 0.0)

    def cdf(u):
        return np.clip(np.asarray(u, dtype=float) / S, 0.0, 1.0)

    def lt(lam):
        lam = _arr(lam)
        return _out(_phi1(S * lam), lam)

    moments = (S / 2.0, S * S / 3.0, S**3 / 4.0)
    return JumpDensity("uniform", S, pdf, cdf, lt, _uniform_sampler(S), True,
                       moments, KIND_UNIFORM)


def sine_density(S=1.0):
    """Half-sine law ``(pi/2S) sin(pi u/S)`` on (0, S)."""
    S = float(S)
    pi = math.pi

    def pdf(u):
        inside, u = _in_support(u, S)
        return np.where(inside, pi / (2 * S) * np.sin(pi * u / S), 0.0)

    def cdf(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, S)
        return (1.0 - np.cos(pi * u / S)) / 2.0

    def lt(lam):
        lam = _arr(lam)
        z = S * lam
        return _out(pi * pi / 2.0 * (1.0 + np.exp(-z)) / (z * z + pi * pi), lam)

    def draw(rng, size=None):
        v = rng.uniform(0.0, 1.0, size)
        return S / pi * np.arccos(1.0 - 2.0 * v)

    m2 = S * S * (0.5 - 2.0 / pi**2)
    m3 = S**3 * (0.5 - 3.0 / pi**2)
    return JumpDensity("sine", S, pdf, cdf, lt, draw, True, (S / 2.0, m2, m3),
                       KIND_SINE)


def _poly_family(k, S, name):
    """Density ``(1 + 1/2k)/S * (1 - (2u/S - 1)**2k)``; k=1 is the parabola."""
    c = (1.0 + 1.0 / (2 * k)) / S

    def pdf(u):
        inside, u = _in_support(u, S)
        return np.where(inside, c * (1.0 - (2.0 * u / S - 1.0) ** (2 * k)), 0.0)

    def cdf(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, S)
        w = 2.0 * u / S - 1.0
        return c * (u - S * (w ** (2 * k + 1) + 1.0) / (2.0 * (2 * k + 1)))

    def draw(rng, size=None):
        n = 1 if size is None else int(np.prod(size))
        out = np.empty(n)
        filled = 0
        while filled < n:
            m = max(2 * (n - filled), 16)
            u = rng.uniform(0.0, S, m)
            acc = u[rng.uniform(0.0, 1.0, m) < 1.0 - (2.0 * u / S - 1.0) ** (2 * k)]
            take = min(acc.size, n - filled)
            out[filled:filled + take] = acc[:take]
            filled += take
        return out[0] if size is None else out.reshape(size)

    return pdf, cdf, draw


def parabolic_density(S=1.0):
    """Beta(2,2)-shaped law ``6 u (S-u) / S**3`` on (0, S)."""
    S = float(S)
    pdf, cdf, draw = _poly_family(1, S, "parabolic")

    def lt(lam):
        lam = _arr(lam)
        z = S * lam
        small = np.abs(z) < 1.0
        safe = np.where(small, 2.0, z)
        val = 6.0 / safe**3 * (np.exp(-safe) * (safe + 2.0) + safe - 2.0)
        if np.any(small):
            zs = z[small] if z.ndim else z
            term = np.ones_like(zs)
            acc = np.zeros_like(zs)
            for j in range(0, 30):
                acc = acc + term * (j + 1) * 6.0 / math.factorial(j + 3)
                term = term * (-zs)
            if z.ndim:
                val = np.array(val, dtype=np.result_type(val, acc))
                val[small] = acc
            else:
                val = acc
        return _out(val, lam)

    moments = tuple(6.0 * S**j / ((j + 2) * (j + 3)) for j in (1, 2, 3))
    return JumpDensity("parabolic", S, pdf, cdf, lt, draw, True, moments,
                       KIND_POLY, 1)


def triangular_density():
    """Triangular law on (0, 1) with mode 1/2."""

    def pdf(u):
        inside, u = _in_support(u, 1.0)
        return np.where(inside, np.where(u <= 0.5, 4.0 * u, 4.0 * (1.0 - u)), 0.0)

    def cdf(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        return np.where(u <= 0.5, 2.0 * u * u, 1.0 - 2.0 * (1.0 - u) ** 2)

    def lt(lam):
        lam = _arr(lam)
        return _out(_phi1(lam / 2.0) ** 2, lam)

    def draw(rng, size=None):
        v = rng.uniform(0.0, 1.0, size)
        return np.where(v < 0.5, np.sqrt(v / 2.0), 1.0 - np.sqrt((1.0 - v) / 2.0))

    moments = (0.5, 7.0 / 24.0, 0.1875)
    return JumpDensity("triangular", 1.0, pdf, cdf, lt, draw, True, moments,
                       KIND_TRIANGULAR)


def g2k_density(k, S=1.0):
    """Polynomial family ``(1 + 1/2k)(1 - (2u-1)**2k)`` on (0, 1).

    ``k = 1`` is the parabolic law; ``k -> inf`` tends to the uniform.
    ``S`` rescales the support.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    S = float(S)
    pdf, cdf, draw = _poly_family(k, S, f"g2k:{k}")
    c = 1.0 + 1.0 / (2 * k)

    def lt(lam):
        lam = _arr(lam)
        w = S * lam / 2.0
        val = c * np.exp(-w) * (_sinhc(w) - ik_integral(2 * k, w) / 2.0)
        return _out(val, lam)

    m1 = S / 2.0
    m2 = S * S * (4 * k + 5) / (6.0 * (2 * k + 3))
    # E[(U-1/2)^3] = 0 by symmetry
    m3 = S**3 * (1.5 * m2 / S**2 - 0.25)
    return JumpDensity(f"g2k:{k}", S, pdf, cdf, lt, draw, True, (m1, m2, m3),
                       KIND_POLY, k)


def _sinhc(w):
    """2 sinh(w) / (2w) = sinh(w)/w, entire."""
    w = _arr(w)
    small = np.abs(w) < _SERIES_CUT
    safe = np.where(small, 1.0, w)
    val = np.sinh(safe) / safe
    if np.any(small):
        ws = w[small] if w.ndim else w
        series = 1.0 + ws * ws / 6.0
        if w.ndim:
            val = np.array(val, dtype=np.result_type(val, series))
            val[small] = series
        else:
            val = series
    return val


# -- tabulated ---------------------------------------------------------------

@_njit
def pl_inverse_cdf(v, u, f, F):
    """Invert the CDF of a piecewise-linear pdf on knots ``u``."""
    n = u.shape[0]
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if F[mid] <= v:
            lo = mid
        else:
            hi = mid
    h = u[lo + 1] - u[lo]
    a = f[lo]
    b = (f[lo + 1] - f[lo]) / h
    target = v - F[lo]
    if abs(b) < 1e-14 * max(abs(a), 1e-300):
        t = target / a if a > 0 else 0.0
    else:
        disc = a * a + 2.0 * b * target
        if disc < 0.0:
            disc = 0.0
        # stable root of b/2 t^2 + a t - target = 0
        t = 2.0 * target / (a + math.sqrt(disc))
    if t < 0.0:
        t = 0.0
    if t > h:
        t = h
    return u[lo] + t


def _pl_table(u, pdf_vals, S):
    """Knots padded to [0, S] with constant end values, normalised pdf, CDF."""
    u = np.asarray(u, dtype=float)
    f = np.asarray(pdf_vals, dtype=float)
    if u.ndim != 1 or u.size < 2 or u.shape != f.shape:
        raise ValueError("need matching 1-D arrays with at least two knots")
    if np.any(np.diff(u) <= 0) or u[0] <= 0 or u[-1] >= S:
        raise ValueError("knots must be strictly increasing inside (0, S)")
    if np.any(f < 0):
        raise ValueError("pdf values must be nonnegative")
    uu = np.concatenate([[0.0], u, [S]])
    ff = np.concatenate([[f[0]], f, [f[-1]]])
    seg = 0.5 * (ff[1:] + ff[:-1]) * np.diff(uu)
    total = seg.sum()
    if total <= 0:
        raise ValueError("pdf integrates to zero")
    ff = ff / total
    FF = np.concatenate([[0.0], np.cumsum(seg / total)])
    FF[-1] = 1.0
    return uu, ff, FF


def tabulated_density(u, pdf_vals, S, name="tabulated"):
    """Density from ``(u, pdf)`` pairs, linear between knots.

    The pdf is held constant from the first/last knot out to 0 and S and
    renormalised. The transform integrates the piecewise-linear pdf
    exactly, so it inherits only the tabulation error.
    """
    S = float(S)
    uu, ff, FF = _pl_table(u, pdf_vals, S)
    h = np.diff(uu)
    slope = np.diff(ff) / h

    def pdf(x):
        inside, x = _in_support(x, S)
        return np.where(inside, np.interp(x, uu, ff), 0.0)

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, S)
        i = np.clip(np.searchsorted(uu, x, side="right") - 1, 0, uu.size - 2)
        t = x - uu[i]
        return FF[i] + ff[i] * t + 0.5 * slope[i] * t * t

    def lt(lam):
        lam = _arr(lam)
        flat = np.atleast_1d(lam).reshape(-1, 1)
        z = flat * h
        seg = np.exp(-flat * uu[:-1]) * (ff[:-1] * h * _phi1(z) + slope * h * h * _phi2(z))
        val = seg.sum(axis=1).reshape(np.shape(lam))
        return _out(val if np.ndim(lam) else val.reshape(()), lam)

    def draw(rng, size=None):
        v = rng.uniform(0.0, 1.0, size)
        vv = np.atleast_1d(v)
        out = np.array([pl_inverse_cdf(x, uu, ff, FF) for x in vv])
        return out[0] if size is None else out.reshape(np.shape(v))

    mid = S / 2.0
    symmetric = bool(np.allclose(np.interp(mid - (uu - mid), uu, ff), ff, rtol=1e-9, atol=1e-12))
    moments = _moments_by_quad(lambda x: np.interp(x, uu, ff), S, breaks=uu[1:-1])
    return JumpDensity(name, S, pdf, cdf, lt, draw, symmetric, moments,
                       KIND_TABLE, 0, (uu, ff, FF))


def density_from_csv(path, S):
    """Read a two-column ``u,pdf`` CSV (header and ``#`` comments optional)."""
    us, fs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                a, b = float(row[0]), float(row[1])
            except ValueError:
                if us:
                    raise
                continue  # header
            us.append(a)
            fs.append(b)
    return tabulated_density(us, fs, S, name=f"csv:{path}")


def catalog(S=1.0, ks=(1, 2, 3, 4, 5, 6)):
    """Named catalog entries valid for barrier ``S``.

    The triangular and ``g2k`` entries are defined for S = 1 only.
    """
    out = {
        "uniform": uniform_density(S),
        "sine": sine_density(S),
        "parabolic": parabolic_density(S),
    }
    if S == 1.0:
        out["triangular"] = triangular_density()
        for k in ks:
            out[f"g2k:{k}"] = g2k_density(k)
    return out


def by_name(name, S=1.0):
    """Look up ``uniform``, ``sine``, ``parabolic``, ``triangular`` or ``g2k:<k>``."""
    if name.startswith("g2k:"):
        return g2k_density(int(name.split(":", 1)[1]), S)
    makers = {
        "uniform": uniform_density,
        "sine": sine_density,
        "parabolic": parabolic_density,
    }
    if name == "triangular":
        if S != 1.0:
            raise ValueError("the triangular density is defined for S = 1 only")
        return triangular_density()
    if name not in makers:
        raise KeyError(f"unknown density {name!r}")
    return makers[name](S)
