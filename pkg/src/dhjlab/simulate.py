"""Monte Carlo first-passage times for drifted Brownian motion with a
holding and jumping boundary at 0.

Diffusion segments use Euler steps with Brownian-bridge crossing
corrections at both 0 and S; holds are exact Exp(beta) draws. Random
numbers come from SplitMix64 streams keyed by ``(seed, path, cycle)``,
so each path is reproducible on its own and the result does not depend
on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .densities import (
    KIND_POLY,
    KIND_SINE,
    KIND_TABLE,
    KIND_TRIANGULAR,
    KIND_UNIFORM,
    JumpDensity,
    pl_inverse_cdf,
)
from .inversion import Tabulated
from .tabio import read_table, write_table
from .transforms import DriftParams

try:
    import numba as nb

    _njit = nb.njit(cache=True, fastmath=False)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    def _njit(f):
        return f
    HAVE_NUMBA = False

__all__ = [
    "SimConfig",
    "FPTSampleSet",
    "KSResult",
    "simulate_fpt",
    "simulate_fpt_coupled",
    "empirical_cdf",
    "ks_compare",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_SALT_INC = np.uint64(0x1)
_SALT_JUMP = np.uint64(0x2)
_SALT_BRIDGE = np.uint64(0x3)
_SALT_BRIDGE2 = np.uint64(0x4)
_INV53 = 1.0 / 9007199254740992.0

ST_HIT, ST_CENSORED, ST_NAN = 0, 1, 2


@_njit
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@_njit
def _key(base, path, cycle, salt):
    k = _mix(base + np.uint64(path) * _GOLDEN)
    k = _mix(k ^ (np.uint64(cycle) * _M1 + salt))
    return k


@_njit
def _uniform(state):
    """Advance a SplitMix64 state; return (new_state, u in (0, 1))."""
    state = state + _GOLDEN
    z = _mix(state)
    return state, ((z >> _S11) + 0.5) * _INV53


@_njit
def _normal_pair(state):
    state, u1 = _uniform(state)
    state, u2 = _uniform(state)
    rad = math.sqrt(-2.0 * math.log(u1))
    ang = 2.0 * math.pi * u2
    return state, rad * math.cos(ang), rad * math.sin(ang)


@_njit
def _draw_jump(state, kind, k, S, tu, tf, tF):
    state, v = _uniform(state)
    if kind == 0:
        return state, S * v
    if kind == 1:
        return state, S / math.pi * math.acos(1.0 - 2.0 * v)
    if kind == 2:
        if v < 0.5:
            return state, S * math.sqrt(v / 2.0)
        return state, S * (1.0 - math.sqrt((1.0 - v) / 2.0))
    if kind == 3:
        while True:
            u = S * v
            w = 2.0 * u / S - 1.0
            state, a = _uniform(state)
            if a < 1.0 - w ** (2 * k):
                return state, u
            state, v = _uniform(state)
    return state, pl_inverse_cdf(v, tu, tf, tF)


@_njit
def _path(base, path, x0, mu, S, beta, h, pair_mode, bridge, initial_hold, t_max,
          bridge_salt, kind, k, tu, tf, tF):
    """One path. Returns (tau, status).

    ``pair_mode`` makes each step of size ``h`` consume a whole normal
    pair (summed), so a run at ``h`` and one at ``h/2`` share increments.
    """
    sqh = math.sqrt(h)
    thr = 18.0 * h  # exp(-2 a b / h) < 2e-16 beyond this
    t = 0.0
    x = x0
    cycle = 0
    if x0 <= 0.0:
        js = _key(base, path, cycle, _SALT_JUMP)
        if initial_hold and beta < math.inf:
            js, v = _uniform(js)
            t += -math.log(v) / beta
        js, x = _draw_jump(js, kind, k, S, tu, tf, tF)
    inc = _key(base, path, cycle, _SALT_INC)
    brs = _key(base, path, cycle, bridge_salt)
    have_spare = False
    spare = 0.0
    while True:
        if pair_mode:
            inc, z1, z2 = _normal_pair(inc)
            z = (z1 + z2) * 0.7071067811865476
        elif have_spare:
            z = spare
            have_spare = False
        else:
            inc, z, spare = _normal_pair(inc)
            have_spare = True
        xn = x + mu * h + sqh * z
        t += h
        if not (xn == xn):
            return t, ST_NAN
        if xn >= S:
            return t, ST_HIT if t <= t_max else ST_CENSORED
        hit_zero = xn <= 0.0
        if bridge and not hit_zero:
            up = (S - x) * (S - xn)
            if up < thr:
                brs, a = _uniform(brs)
                if a < math.exp(-2.0 * up / h):
                    return t, ST_HIT if t <= t_max else ST_CENSORED
            lo = x * xn
            if lo < thr:
                brs, a = _uniform(brs)
                if a < math.exp(-2.0 * lo / h):
                    hit_zero = True
        if hit_zero:
            cycle += 1
            js = _key(base, path, cycle, _SALT_JUMP)
            if beta < math.inf:
                js, v = _uniform(js)
                t += -math.log(v) / beta
            js, xn = _draw_jump(js, kind, k, S, tu, tf, tF)
            inc = _key(base, path, cycle, _SALT_INC)
            brs = _key(base, path, cycle, bridge_salt)
            have_spare = False
        if t >= t_max:
            return t, ST_CENSORED
        x = xn


def _batch(base, start, n, x0, mu, S, beta, h, pair_mode, bridge, initial_hold, t_max,
           bridge_salt, kind, k, tu, tf, tF, tau, status):
    for i in range(n):
        tau[i], status[i] = _path(base, start + i, x0, mu, S, beta, h, pair_mode, bridge,
                                  initial_hold, t_max, bridge_salt, kind, k, tu, tf, tF)


_batch_seq = _njit(_batch)
_batch_par = None


def _parallel_kernel():
    global _batch_par
    if _batch_par is None:
        nb.config.THREADING_LAYER = "workqueue"

        def body(base, start, n, x0, mu, S, beta, h, pair_mode, bridge, initial_hold,
                 t_max, bridge_salt, kind, k, tu, tf, tF, tau, status):
            for i in nb.prange(n):
                tau[i], status[i] = _path(base, start + i, x0, mu, S, beta, h, pair_mode,
                                          bridge, initial_hold, t_max, bridge_salt, kind, k,
                                          tu, tf, tF)

        _batch_par = nb.njit(parallel=True)(body)
    return _batch_par


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings. Any real drift is accepted here.

    ``t_max`` defaults to ``1000 (1/beta + S**2)``. ``scheme`` is
    ``"euler_bridge"`` or ``"euler"`` (no crossing correction, for
    comparison only).
    """

    params: DriftParams
    density: JumpDensity
    n_paths: int = 10_000
    dt: float = 1e-3
    seed: int = 0
    scheme: str = "euler_bridge"
    t_max: float | None = None
    initial_hold: bool = True
    parallel: bool = False

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not 0 < self.dt <= 1e-2:
            raise ValueError(f"dt must lie in (0, 1e-2], got {self.dt}")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.scheme not in ("euler_bridge", "euler"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.density.sim_kind not in (KIND_UNIFORM, KIND_SINE, KIND_TRIANGULAR,
                                         KIND_POLY, KIND_TABLE):
            raise ValueError(f"density {self.density.name!r} has no compiled sampler")
        if abs(self.density.S - self.params.S) > 1e-12 * self.params.S:
            raise ValueError("jump density support does not match the barrier")

    @property
    def horizon(self):
        if self.t_max is not None:
            return float(self.t_max)
        inv_b = 0.0 if math.isinf(self.params.beta) else 1.0 / self.params.beta
        return 1e3 * (inv_b + self.params.S**2)

    def echo(self):
        p = self.params
        return {
            "mu": p.mu, "S": p.S, "beta": p.beta, "x": p.x,
            "density": self.density.name, "n_paths": self.n_paths, "dt": self.dt,
            "seed": self.seed, "scheme": self.scheme, "t_max": self.horizon,
            "initial_hold": self.initial_hold,
        }


@dataclass(frozen=True)
class FPTSampleSet:
    """Sorted first-passage times of the paths that reached the barrier."""

    samples: np.ndarray
    n_paths: int
    censored_count: int
    nan_count: int
    config: dict = field(default_factory=dict)

    @property
    def n_hit(self):
        return int(self.samples.size)

    @property
    def censored_fraction(self):
        return self.censored_count / self.n_paths

    @property
    def mean(self):
        return float(np.mean(self.samples))

    @property
    def std(self):
        return float(np.std(self.samples, ddof=1))

    @property
    def stderr(self):
        return self.std / math.sqrt(self.n_hit)

    def summary(self):
        return {
            "n_paths": self.n_paths, "n_hit": self.n_hit,
            "censored": self.censored_count, "nan": self.nan_count,
            "mean": self.mean, "std": self.std, "stderr": self.stderr,
            "median": float(np.median(self.samples)),
        }

    def to_csv(self, path):
        meta = dict(self.config)
        meta.update(n_paths=self.n_paths, censored_count=self.censored_count,
                    nan_count=self.nan_count)
        write_table(path, {"tau": self.samples}, meta)

    @classmethod
    def from_csv(cls, path):
        meta, cols = read_table(path)
        tau = np.sort(next(iter(cols.values())))
        n = int(meta.pop("n_paths", tau.size))
        cens = int(meta.pop("censored_count", 0))
        nans = int(meta.pop("nan_count", 0))
        return cls(tau, n, cens, nans, meta)


def _base_key(seed):
    words = np.random.SeedSequence(seed).generate_state(1, dtype=np.uint64)
    return np.uint64(words[0])


def _run(cfg, h, pair_mode, bridge_salt):
    p = cfg.params
    kind, k, tu, tf, tF = cfg.density.simulator_spec()
    n = cfg.n_paths
    tau = np.empty(n)
    status = np.empty(n, dtype=np.int64)
    kernel = _parallel_kernel() if (cfg.parallel and HAVE_NUMBA) else _batch_seq
    # uncompiled, the uint64 stream hashing wraps around as intended
    with np.errstate(over="ignore"):
        kernel(_base_key(cfg.seed), 0, n, float(p.x), float(p.mu), float(p.S), float(p.beta),
               float(h), pair_mode, cfg.scheme == "euler_bridge", cfg.initial_hold,
               cfg.horizon, bridge_salt, int(kind), int(k),
               np.ascontiguousarray(tu, dtype=float), np.ascontiguousarray(tf, dtype=float),
               np.ascontiguousarray(tF, dtype=float), tau, status)
    hit = status == ST_HIT
    echo = cfg.echo()
    echo["dt"] = h
    return FPTSampleSet(np.sort(tau[hit]), n, int(np.sum(status == ST_CENSORED)),
                        int(np.sum(status == ST_NAN)), echo)


def simulate_fpt(cfg):
    """Simulate ``cfg.n_paths`` first-passage times.

    Starting at ``x = 0`` means an Exp(beta) hold, then a jump, unless
    ``initial_hold`` is False.
    """
    return _run(cfg, cfg.dt, False, _SALT_BRIDGE)


def simulate_fpt_coupled(cfg):
    """Runs at ``dt`` and ``dt/2`` driven by the same Brownian increments,
    holds and jumps. Returns ``(coarse, fine)``.

    The fine run is identical to ``simulate_fpt`` with ``dt/2``.
    """
    fine = _run(cfg, cfg.dt / 2.0, False, _SALT_BRIDGE)
    coarse = _run(cfg, cfg.dt, True, _SALT_BRIDGE2)
    return coarse, fine


def empirical_cdf(samples, t_grid):
    """Right-continuous ECDF over all paths; censored paths never count."""
    t = np.asarray(t_grid, dtype=float)
    y = np.searchsorted(samples.samples, t, side="right") / samples.n_paths
    return Tabulated(t, y, np.ones(t.shape, bool), {"n_paths": samples.n_paths})


@dataclass(frozen=True)
class KSResult:
    statistic: float
    critical: float
    passed: bool
    n: int
    level: float


def ks_compare(samples, reference_cdf, level=0.01):
    """Kolmogorov-Smirnov distance between the sample and a reference CDF.

    ``reference_cdf`` is a :class:`Tabulated` CDF (linearly interpolated)
    or a callable. The sup is taken over the reference grid and the sample
    points, using the ECDF's left and right limits, with censored paths
    counted as mass beyond every grid point.
    """
    n = samples.n_paths
    x = samples.samples
    F = reference_cdf
    grid = reference_cdf.x if isinstance(reference_cdf, Tabulated) else np.array([])
    Fx = np.asarray(F(x))
    i = np.arange(1, x.size + 1)
    d = max(np.max(i / n - Fx, initial=0.0), np.max(Fx - (i - 1) / n, initial=0.0))
    if grid.size:
        right = np.searchsorted(x, grid, side="right") / n
        left = np.searchsorted(x, grid, side="left") / n
        Fg = np.asarray(F(grid))
        d = max(d, np.max(np.abs(right - Fg)), np.max(np.abs(left - Fg)))
    crit = float(stats.kstwo.ppf(1.0 - level, n))
    return KSResult(float(d), crit, bool(d < crit), n, level)


def with_seed(cfg, seed):
    return replace(cfg, seed=seed)
