"""Numerical Laplace inversion and validity checks for candidate jump
transforms.

Two inverters are provided. Gaver-Stehfest uses real abscissae
``k ln2 / t`` and is the default for first-passage densities and CDFs.
For densities supported on a bounded interval ``(0, S)`` it converges
poorly, so ``method="fourier"`` evaluates the transform on the imaginary
axis at ``2 pi i n / S`` and sums a Lanczos-smoothed Fourier series. That
needs a transform that accepts complex arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .tabio import read_table, write_table

__all__ = [
    "stehfest_weights",
    "InversionConfig",
    "Tabulated",
    "ValidityReport",
    "invert",
    "cdf_from_lt",
    "density_moments",
    "check_density",
]

LN2 = math.log(2.0)


@lru_cache(maxsize=None)
def _weights_exact(order):
    half = order // 2
    out = []
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j**half * math.factorial(2 * j),
                math.factorial(half - j) * math.factorial(j) * math.factorial(j - 1)
                * math.factorial(k - j) * math.factorial(2 * j - k),
            )
        out.append((-1) ** (k + half) * acc)
    return tuple(out)


def stehfest_weights(order):
    """Gaver-Stehfest weights ``V_1..V_N`` (computed exactly, then rounded)."""
    if order % 2 or order < 2:
        raise ValueError("order must be a positive even integer")
    return np.array([float(w) for w in _weights_exact(order)])


@dataclass(frozen=True)
class InversionConfig:
    """Settings for :func:`invert`.

    ``tail_cut`` caps the largest abscissa; grid points that would need a
    larger one are flagged rather than evaluated. ``support`` is the
    interval length ``S`` used by the Fourier method.
    """

    order: int = 14
    grid: tuple = ()
    tail_cut: float = math.inf
    method: str = "stehfest"
    support: float | None = None
    terms: int = 4096

    def __post_init__(self):
        if self.order % 2 or not 8 <= self.order <= 18:
            raise ValueError(f"order must be even and in [8, 18], got {self.order}")
        g = np.asarray(self.grid, dtype=float)
        if g.size and (np.any(g <= 0) or np.any(np.diff(g) <= 0)):
            raise ValueError("grid must be strictly increasing and positive")
        if self.method not in ("stehfest", "fourier"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "fourier" and not (self.support and self.support > 0):
            raise ValueError("fourier inversion needs support=S > 0")
        if self.terms < 8:
            raise ValueError("terms must be >= 8")

    def with_grid(self, grid):
        return InversionConfig(self.order, tuple(np.asarray(grid, dtype=float)),
                               self.tail_cut, self.method, self.support, self.terms)


@dataclass(frozen=True)
class Tabulated:
    """Values ``y`` on abscissae ``x`` with a per-point success flag."""

    x: np.ndarray
    y: np.ndarray
    ok: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def all_ok(self):
        return bool(np.all(self.ok))

    def __call__(self, t):
        return np.interp(t, self.x, self.y)

    def to_csv(self, path, names=("x", "value"), meta=None):
        header = dict(self.meta)
        header.update(meta or {})
        write_table(path, {names[0]: self.x, names[1]: self.y, "ok": self.ok.astype(int)},
                    header)

    @classmethod
    def from_csv(cls, path):
        meta, cols = read_table(path)
        names = list(cols)
        ok = cols["ok"].astype(bool) if "ok" in cols else np.ones(cols[names[0]].size, bool)
        return cls(cols[names[0]], cols[names[1]], ok, meta)


def _eval(transform, lam):
    with np.errstate(all="ignore"):
        try:
            return np.asarray(transform(lam))
        except (ArithmeticError, ValueError):
            # vector call rejected (e.g. a domain check); go pointwise
            out = np.full(np.shape(lam), np.nan, dtype=np.result_type(lam, float))
            for i, v in np.ndenumerate(lam):
                try:
                    out[i] = transform(v)
                except (ArithmeticError, ValueError):
                    pass
            return out


def _stehfest(transform, cfg):
    t = np.asarray(cfg.grid, dtype=float)
    V = stehfest_weights(cfg.order)
    k = np.arange(1, cfg.order + 1)
    lam = np.outer(LN2 / t, k)
    ok = lam[:, -1] <= cfg.tail_cut
    vals = np.full(lam.shape, np.nan)
    if np.any(ok):
        vals[ok] = np.real(_eval(transform, lam[ok].ravel())).reshape(-1, cfg.order)
    y = LN2 / t * (vals @ V)
    ok &= np.isfinite(y)
    return Tabulated(t, np.where(ok, y, np.nan), ok, {"method": "stehfest", "order": cfg.order})


def _fourier(transform, cfg):
    S = float(cfg.support)
    u = np.asarray(cfg.grid, dtype=float)
    N = int(cfg.terms)
    n = np.arange(1, N + 1)
    omega = 2.0 * math.pi * n / S
    coef = _eval(transform, 1j * omega).astype(complex)
    g0 = float(np.real(_eval(transform, np.array([0.0]))[0]))
    if not math.isfinite(g0):
        # removable singularity at 0 in some closed forms
        g0 = float(np.mean(np.real(_eval(transform, np.array([-1e-8, 1e-8])))))
    sigma = np.sinc(n / (N + 1.0))
    finite = np.isfinite(coef)
    coef = np.where(finite, coef * sigma, 0.0)
    # g(u) = (1/S) sum_n ghat(i w_n) e^{i w_n u}, conjugate-symmetric in n
    phase = np.exp(1j * np.outer(u, omega))
    y = (g0 + 2.0 * np.real(phase @ coef)) / S
    ok = np.full(u.shape, bool(np.all(finite)) and math.isfinite(g0))
    ok &= (u > 0) & (u < S)
    return Tabulated(u, np.where(ok, y, np.nan), ok,
                     {"method": "fourier", "terms": N, "support": S})


def invert(transform, cfg):
    """Invert ``transform`` on ``cfg.grid``.

    Failures (overflow, NaN, a domain error, an abscissa past
    ``tail_cut``) mark single grid points as not ok instead of raising.
    """
    if not len(cfg.grid):
        raise ValueError("empty inversion grid")
    if cfg.method == "fourier":
        return _fourier(transform, cfg)
    return _stehfest(transform, cfg)


def cdf_from_lt(transform, t_grid, order=14, tol=1e-3):
    """CDF of the law with transform ``transform`` by inverting ``f(lam)/lam``.

    Values are clipped to [0, 1]. Decreases larger than ``tol`` between
    neighbouring grid points mark those points as not ok; the largest
    decrease is kept in ``meta["monotone_violation"]``.
    """
    cfg = InversionConfig(order=order, grid=tuple(np.asarray(t_grid, dtype=float)))
    raw = invert(lambda lam: np.asarray(transform(lam)) / lam, cfg)
    y = np.clip(raw.y, 0.0, 1.0)
    drops = np.concatenate([[0.0], -np.diff(raw.y)])
    drops = np.where(np.isfinite(drops), drops, 0.0)
    ok = raw.ok & (drops <= tol)
    meta = dict(raw.meta, monotone_violation=float(max(drops.max(), 0.0)))
    return Tabulated(raw.x, y, ok, meta)


def _richardson(fn, h):
    a, b = fn(h), fn(h / 2.0)
    best = (4.0 * b - a) / 3.0
    return best, abs(best - b)


def _g_at(ghat):
    def g(lam):
        with np.errstate(all="ignore"):
            v = complex(np.asarray(ghat(lam)).item())
        if not math.isfinite(v.real):
            raise FloatingPointError("transform not finite")
        return v.real
    try:
        g0 = g(0.0)
    except (ArithmeticError, ValueError):
        g0 = 0.5 * (g(1e-8) + g(-1e-8))
    return g, g0


def density_moments(ghat, h=1e-3):
    """First three moments ``(m1, m2, m3)`` from derivatives of ``ghat`` at 0,
    with their Richardson error estimates.

    Central differences at step ``h`` and ``h/2`` combined once.
    """
    g, g0 = _g_at(ghat)

    def d1(s):
        return -(g(s) - g(-s)) / (2 * s)

    def d2(s):
        return (g(s) - 2 * g0 + g(-s)) / (s * s)

    def d3(s):
        return -(g(2 * s) - 2 * g(s) + 2 * g(-s) - g(-2 * s)) / (2 * s**3)

    pairs = [_richardson(d, h) for d in (d1, d2, d3)]
    moments = tuple(p[0] for p in pairs)
    errors = tuple(p[1] for p in pairs)
    return moments, errors


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of checking whether a candidate transform comes from a
    probability density on (0, S)."""

    min_value: float
    normalization_defect: float
    moments: tuple
    verdict: str
    reasons: tuple = ()
    peak: float = float("nan")
    moment_errors: tuple = (0.0, 0.0, 0.0)
    grid: np.ndarray = field(default=None, repr=False, compare=False)
    values: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.verdict not in ("valid", "invalid", "inconclusive"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "invalid" and not self.reasons:
            raise ValueError("an invalid verdict needs a reason")

    @property
    def is_valid(self):
        return self.verdict == "valid"

    def to_text(self):
        lines = [
            f"verdict = {self.verdict}",
            f"min_value = {self.min_value!r}",
            f"peak = {self.peak!r}",
            f"normalization_defect = {self.normalization_defect!r}",
        ]
        for j, (m, e) in enumerate(zip(self.moments, self.moment_errors), start=1):
            lines.append(f"m{j} = {m!r}")
            lines.append(f"m{j}_err = {e!r}")
        lines.append("reasons = " + " | ".join(self.reasons))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        kv = {}
        for line in text.splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                kv[k.strip()] = v.strip()
        reasons = tuple(r.strip() for r in kv.get("reasons", "").split("|") if r.strip())
        return cls(
            min_value=float(kv["min_value"]),
            normalization_defect=float(kv["normalization_defect"]),
            moments=tuple(float(kv[f"m{j}"]) for j in (1, 2, 3)),
            verdict=kv["verdict"],
            reasons=reasons,
            peak=float(kv.get("peak", "nan")),
            moment_errors=tuple(float(kv.get(f"m{j}_err", 0.0)) for j in (1, 2, 3)),
        )


def _normalization(u, y, S):
    # trapezoid inside, linear extrapolation over the two edge strips
    inner = np.trapezoid(y, u) if hasattr(np, "trapezoid") else np.trapz(y, u)
    left_slope = (y[1] - y[0]) / (u[1] - u[0])
    right_slope = (y[-1] - y[-2]) / (u[-1] - u[-2])
    left = u[0] * (y[0] - 0.5 * left_slope * u[0])
    w = S - u[-1]
    right = w * (y[-1] + 0.5 * right_slope * w)
    return inner + left + right


def check_density(ghat, S, cfg=None, points=481, edge=0.02):
    """Decide whether ``ghat`` is the transform of a density on (0, S).

    The transform is inverted on ``points`` nodes of ``(edge*S, (1-edge)*S)``
    and its first three moments are taken from derivatives at 0. The
    verdict is ``invalid`` when the inverted values dip below 2% of the
    peak, the mass is more than 2% off one, or a moment ``m_k`` falls outside
    ``(0, S**k)``. It is ``valid`` when each test passes with a factor-two
    margin, and ``inconclusive`` otherwise or on numerical failure.
    """
    u = np.linspace(edge * S, (1.0 - edge) * S, points)
    if cfg is None:
        cfg = InversionConfig(method="fourier", support=S)
    cfg = cfg.with_grid(u)
    reasons, soft = [], []
    try:
        tab = invert(ghat, cfg)
        if not tab.all_ok and cfg.method == "fourier":
            tab = invert(ghat, InversionConfig(order=cfg.order, grid=cfg.grid))
        moments, merr = density_moments(ghat)
    except (ArithmeticError, ValueError) as exc:
        return ValidityReport(math.nan, math.nan, (math.nan,) * 3, "inconclusive",
                              (f"numerical failure: {exc}",))
    if not tab.all_ok or not all(map(math.isfinite, moments)):
        why = ("inversion produced non-finite values"
               + ("; moments alone are available" if all(map(math.isfinite, moments)) else ""))
        return ValidityReport(math.nan, math.nan, moments, "inconclusive", (why,),
                              moment_errors=merr,
                              grid=u, values=tab.y)

    y = tab.y
    peak = float(np.max(np.abs(y)))
    min_value = float(np.min(y))
    norm_defect = float(_normalization(u, y, S) - 1.0)

    if min_value < -0.02 * peak:
        reasons.append(f"negative values: min {min_value:.4g} below -2% of peak {peak:.4g}")
    elif min_value < -0.01 * peak:
        soft.append("negativity within margin")
    if abs(norm_defect) > 0.02:
        reasons.append(f"normalization defect {norm_defect:+.4g} exceeds 2%")
    elif abs(norm_defect) > 0.01:
        soft.append("normalization within margin")

    names = ("first", "second", "third")
    for j, (m, e) in enumerate(zip(moments, merr), start=1):
        hi = S**j
        band = 2.0 * e
        if m <= 0:
            word = "negative" if m < 0 else "zero"
            reasons.append(f"{word} {names[j - 1]} moment m{j} = {m:.6g}")
        elif m >= hi:
            reasons.append(f"{names[j - 1]} moment m{j} = {m:.6g} not below S^{j} = {hi:.6g}")
        elif m - band <= 0 or m + band >= hi:
            soft.append(f"m{j} within error band of its bounds")

    if reasons:
        verdict = "invalid"
    elif soft:
        verdict = "inconclusive"
        reasons = soft
    else:
        verdict = "valid"
    return ValidityReport(min_value, norm_defect, tuple(moments), verdict, tuple(reasons),
                          peak, tuple(merr), u, y)
