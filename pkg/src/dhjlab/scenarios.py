"""Computation behind each CLI command.

Every runner returns a :class:`Bundle`: named tables, figure requests and
a list of :class:`Check` results. The CLI writes the tables and figures
and sets the exit status from the checks; nothing here touches the disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate

from . import closed_forms as cf
from .conjugation import (
    map_fpt_distribution,
    map_fpt_samples,
    ou_time_change_inverse,
    gbm_reduce,
    reduce_problem,
    sqrt_change,
    transport_density,
)
from .densities import by_name, density_from_csv, uniform_density, sine_density
from .inversion import InversionConfig, Tabulated, cdf_from_lt, check_density, invert
from .simulate import FPTSampleSet, SimConfig, empirical_cdf, ks_compare, simulate_fpt
from .transforms import (
    DomainError,
    DriftParams,
    TransformFn,
    forward_fpt_lt,
    forward_fpt_lt_sym0,
    inverse_g_lt,
    mean_fpt,
    mean_from_transform,
)

__all__ = [
    "Check",
    "Bundle",
    "Options",
    "parse_grid",
    "resolve_density",
    "run_forward",
    "run_inverse",
    "run_simulate",
    "run_check",
    "run_example",
    "EXAMPLES",
]

EXAMPLES = ("ex1", "ex2", "ex3", "ex4", "g2k:<k>", "remark25", "ou", "gbm")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"check": self.name, "passed": bool(self.passed), "detail": self.detail}


@dataclass
class Bundle:
    name: str
    params: dict
    tables: dict = field(default_factory=dict)
    figures: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    text: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def check(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    def table(self, name, columns, **extra):
        self.tables[name] = (columns, dict(self.params, **extra))

    def merge(self, other, prefix):
        for k, v in other.tables.items():
            self.tables[f"{prefix}_{k}"] = v
        for fig in other.figures:
            self.figures.append(dict(fig, name=f"{prefix}_{fig['name']}"))
        for c in other.checks:
            self.checks.append(Check(f"{prefix}: {c.name}", c.passed, c.detail))
        for k, v in other.text.items():
            self.text[f"{prefix}_{k}"] = v
        self.summary[prefix] = other.summary


@dataclass(frozen=True)
class Options:
    """Flat parameter set shared by all commands."""

    mu: float = 0.0
    beta: float = 1.0
    barrier: float = 1.0
    x: float = 0.0
    density: str = "uniform"
    k: int | None = None
    paths: int = 20_000
    dt: float = 1e-3
    seed: int = 12345
    lambda_grid: str = "logspace:1e-3:1e2:25"
    t_grid: str | None = None
    u_grid: str | None = None
    initial_hold: bool = True
    order: int = 14

    def echo(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def parse_grid(spec):
    """``a,b,c`` or ``logspace:a:b:n`` or ``linspace:a:b:n``."""
    spec = spec.strip()
    if spec.startswith(("logspace:", "linspace:")):
        kind, a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
        if n < 1:
            raise ValueError("grid needs n >= 1")
        if kind == "logspace":
            if a <= 0 or b <= 0:
                raise ValueError("logspace bounds must be positive")
            return np.logspace(math.log10(a), math.log10(b), n)
        return np.linspace(a, b, n)
    vals = np.array([float(v) for v in spec.split(",") if v.strip()])
    if vals.size == 0:
        raise ValueError(f"empty grid {spec!r}")
    return vals


def _u_grid(opts):
    if opts.u_grid:
        return parse_grid(opts.u_grid)
    S = opts.barrier
    return np.linspace(0.02 * S, 0.98 * S, 49)


def _t_grid(opts, mean):
    if opts.t_grid:
        return parse_grid(opts.t_grid)
    return np.linspace(mean / 200.0, 8.0 * mean, 200)


def resolve_density(opts):
    """Catalog name (``g2k`` takes ``--k``) or a path to a ``u,pdf`` CSV."""
    name = opts.density
    if name == "g2k":
        if opts.k is None:
            raise ValueError("density g2k needs --k")
        name = f"g2k:{opts.k}"
    if name.endswith(".csv"):
        return density_from_csv(name, opts.barrier)
    return by_name(name, opts.barrier)


def _is_sym0(opts, dens):
    return opts.mu == 0 and opts.x == 0 and dens.symmetric


# -- forward -------------------------------------------------------------

def _fpt_fn(opts, dens):
    p = DriftParams(opts.mu, opts.barrier, opts.beta, opts.x)
    if _is_sym0(opts, dens):
        return lambda lam: forward_fpt_lt_sym0(lam, opts.barrier, opts.beta, dens.lt,
                                               initial_hold=opts.initial_hold)
    return lambda lam: forward_fpt_lt(lam, p, dens.lt, initial_hold=opts.initial_hold)


def _transform_mean(opts, dens, fhat):
    if _is_sym0(opts, dens):
        return mean_from_transform(fhat)
    return mean_from_transform(fhat, h=1e-5, one_sided=True)


def run_forward(opts, dens=None, name="forward"):
    dens = dens or resolve_density(opts)
    b = Bundle(name, dict(opts.echo(), command=name, density_name=dens.name))
    lam = parse_grid(opts.lambda_grid)
    if np.any(lam <= 0):
        raise ValueError("lambda grid must be positive")
    fhat = _fpt_fn(opts, dens)
    vals = np.asarray(fhat(lam), dtype=float)
    b.table("forward_lt", {"lambda": lam, "fhat": vals})
    b.figures.append({"kind": "transform", "name": "forward_lt", "x": lam, "y": vals,
                      "ylabel": "E exp(-lambda tau)"})

    near0 = float(fhat(1e-8))
    b.check("normalization f(1e-8) within 1e-4 of 1", abs(near0 - 1) < 1e-4, f"{near0:.10f}")
    b.check("transform strictly decreasing on grid", bool(np.all(np.diff(vals) < 0)))
    b.check("transform in (0, 1)", bool(np.all((vals > 0) & (vals < 1))))
    if opts.mu == 0 and opts.x == 0 and dens.symmetric:
        p = DriftParams(0.0, opts.barrier, opts.beta)
        full = np.asarray(forward_fpt_lt(lam, p, dens.lt, initial_hold=opts.initial_hold))
        err = float(np.max(np.abs(full / vals - 1)))
        b.check("symmetric closed form equals resolvent ratio (1e-12)", err < 1e-12,
                f"max rel diff {err:.2e}")
    mean_t = _transform_mean(opts, dens, fhat)
    b.summary["mean_from_transform"] = mean_t
    if opts.mu == 0 and opts.x == 0:
        m_ref = mean_fpt(opts.beta, dens.moments[1], opts.barrier, dens.moments[0],
                         opts.initial_hold)
        b.summary["mean_formula"] = m_ref
        b.check("mean: -f'(0) vs renewal formula (1e-3 rel)", abs(mean_t / m_ref - 1) < 1e-3,
                f"{mean_t:.8f} vs {m_ref:.8f}")

    if opts.t_grid is not None:
        t = parse_grid(opts.t_grid)
        _fpt_tables(b, fhat, t, opts.order)
    return b


def _fpt_tables(b, fhat, t, order):
    cfg = InversionConfig(order=order, grid=tuple(t))
    dens_tab = invert(fhat, cfg)
    cdf_tab = cdf_from_lt(fhat, t, order=order)
    b.table("fpt_density", {"t": t, "pdf": dens_tab.y, "ok": dens_tab.ok.astype(int)},
            inversion="stehfest", order=order)
    b.table("fpt_cdf", {"t": t, "cdf": cdf_tab.y, "ok": cdf_tab.ok.astype(int)},
            inversion="stehfest", order=order)
    b.figures.append({"kind": "fpt", "name": "fpt", "t": t, "pdf": dens_tab.y,
                      "cdf": cdf_tab.y})
    b.check("FPT CDF monotone within 1e-3", cdf_tab.all_ok,
            f"largest decrease {cdf_tab.meta['monotone_violation']:.2e}")
    return dens_tab, cdf_tab


# -- inverse -------------------------------------------------------------

def _fhat_from_csv(path):
    """Tabulated ``(lambda, fhat)``: monotone cubic in log-log, NaN past the
    last node, ``exp(c lambda)`` below the first."""
    from .tabio import read_table

    _, cols = read_table(path)
    lam, f = (np.asarray(c, dtype=float) for c in list(cols.values())[:2])
    problems = []
    if np.any(np.diff(lam) <= 0) or np.any(lam <= 0):
        problems.append("lambda column must be positive and strictly increasing")
    if np.any(f > 1) or np.any(f <= 0):
        problems.append("fhat must lie in (0, 1]")
    if np.any(np.diff(f) > 0):
        problems.append("fhat must be nonincreasing")
    if problems:
        raise ValueError("; ".join(problems))
    spline = interpolate.PchipInterpolator(np.log(lam), np.log(f), extrapolate=False)

    slope0 = math.log(f[0]) / lam[0]

    def fhat(s):
        s = np.asarray(s)
        if np.iscomplexobj(s) or np.any(s < 0):
            raise DomainError("tabulated transform is only known for real lambda >= 0")
        small = s < lam[0]
        with np.errstate(divide="ignore"):
            inner = np.exp(spline(np.log(np.where(small, lam[0], s))))
        # below the first node: log fhat linear in lambda, so fhat(0) = 1
        return np.where(small, np.exp(slope0 * s), inner)

    return TransformFn(fhat, (lam[0], lam[-1]), f"csv:{path}")


def resolve_fhat(spec, opts):
    if spec.endswith(".csv"):
        return _fhat_from_csv(spec)
    name = f"g2k:{opts.k}" if spec == "g2k" else spec
    return cf.named_fpt(name, opts.barrier, opts.beta)


def run_inverse(opts, fhat_spec, name="inverse", expect=None, reference=None):
    """Candidate jump transform for the FPT law ``fhat_spec``, its inversion
    and a validity report. ``expect`` sets which verdict counts as a pass."""
    S, beta = opts.barrier, opts.beta
    fhat0 = resolve_fhat(fhat_spec, opts)
    b = Bundle(name, dict(opts.echo(), command=name, fhat=fhat_spec))
    lam = parse_grid(opts.lambda_grid)

    def ghat(l):
        return inverse_g_lt(l, fhat0, S, beta, initial_hold=opts.initial_hold)

    gvals = np.real(np.asarray(ghat(lam)))
    b.table("ghat", {"lambda": lam, "ghat": gvals})
    b.figures.append({"kind": "transform", "name": "ghat", "x": lam, "y": gvals,
                      "ylabel": "candidate jump transform"})
    if reference is not None:
        err = float(np.max(np.abs(gvals - reference.lt(lam))))
        b.check(f"round trip recovers {reference.name} transform (1e-10)", err < 1e-10,
                f"max abs diff {err:.2e}")

    u = _u_grid(opts)
    tabular = fhat_spec.endswith(".csv")
    method = "stehfest" if tabular else "fourier"
    cfg = InversionConfig(order=opts.order, grid=tuple(u), method=method,
                          support=S if method == "fourier" else None)
    g_tab = invert(ghat, cfg)
    cols = {"u": u, "g": g_tab.y, "ok": g_tab.ok.astype(int)}
    if reference is not None:
        cols["g_exact"] = reference.pdf(u)
    b.table("g_inverted", cols, inversion=method)
    b.figures.append({"kind": "density", "name": "g_inverted", "u": u, "g": g_tab.y,
                      "exact": cols.get("g_exact")})
    if reference is not None:
        inner = (u >= 0.05 * S) & (u <= 0.95 * S)
        err = float(np.nanmax(np.abs(g_tab.y[inner] - reference.pdf(u[inner]))))
        b.check("inverted jump density within 1e-3 on (0.05S, 0.95S)", err < 1e-3,
                f"max abs err {err:.2e}")

    if tabular:
        report = check_density(ghat, S, InversionConfig(order=opts.order))
    else:
        report = check_density(ghat, S)
    b.text["validity"] = report.to_text()
    b.summary["verdict"] = report.verdict
    b.summary["moments"] = report.moments
    want = expect or "valid"
    b.check(f"validity verdict is {want}", report.verdict == want,
            f"{report.verdict}: {'; '.join(report.reasons)}")
    return b, report


# -- simulate ------------------------------------------------------------

def run_simulate(opts, dens=None, name="simulate", samples_path=None, reference=True,
                 target_mean=None):
    dens = dens or resolve_density(opts)
    b = Bundle(name, dict(opts.echo(), command=name, density_name=dens.name))
    if samples_path:
        res = FPTSampleSet.from_csv(samples_path)
    else:
        cfg = SimConfig(DriftParams(opts.mu, opts.barrier, opts.beta, opts.x), dens,
                        n_paths=opts.paths, dt=opts.dt, seed=opts.seed,
                        initial_hold=opts.initial_hold)
        res = simulate_fpt(cfg)
    b.summary.update(res.summary())
    b.table("samples", {"tau": res.samples}, n_paths=res.n_paths,
            censored_count=res.censored_count, nan_count=res.nan_count)
    b.check("no NaN paths", res.nan_count == 0, str(res.nan_count))
    b.check("censored fraction below 1e-4", res.censored_fraction < 1e-4,
            f"{res.censored_fraction:.2e}")

    can_ref = reference and opts.mu <= 0
    fhat = _fpt_fn(opts, dens) if can_ref else None
    if can_ref:
        m_t = _transform_mean(opts, dens, fhat)
        b.summary["mean_from_transform"] = m_t
        z = (res.mean - m_t) / res.stderr
        b.check("MC mean within 3 s.e. of transform mean", abs(z) < 3,
                f"{res.mean:.5f} vs {m_t:.5f} (z={z:+.2f})")
    if target_mean is not None:
        z = (res.mean - target_mean) / res.stderr
        b.check(f"MC mean within 3 s.e. of {target_mean:.6g}", abs(z) < 3,
                f"{res.mean:.5f} (z={z:+.2f})")

    t = _t_grid(opts, res.mean)
    ecdf = empirical_cdf(res, t)
    cols = {"t": t, "ecdf": ecdf.y}
    fig = {"kind": "ecdf", "name": "ecdf", "t": t, "ecdf": ecdf.y, "cdf": None}
    if can_ref:
        dense = np.linspace(res.mean / 1000.0, max(res.samples[-1], t[-1]) * 1.01, 4000)
        ref = cdf_from_lt(fhat, dense, order=opts.order)
        ks = ks_compare(res, ref)
        cols["cdf_transform"] = ref(t)
        fig["cdf"] = cols["cdf_transform"]
        b.summary["ks"] = {"statistic": ks.statistic, "critical": ks.critical}
        b.check("KS vs inverted transform below 1% critical value", ks.passed,
                f"D={ks.statistic:.5f}, crit={ks.critical:.5f}")
    b.table("ecdf", cols)
    b.figures.append(fig)
    b.samples = res
    return b


# -- check ---------------------------------------------------------------

def run_check(opts, ghat_spec, expect="valid"):
    """Validity check of a catalog density, ``inverse:<fpt>`` or
    ``remark25`` (the exponential FPT law)."""
    S = opts.barrier
    if ghat_spec == "remark25":
        ghat_spec = "inverse:exponential"
    if ghat_spec.startswith("inverse:"):
        f0 = resolve_fhat(ghat_spec.split(":", 1)[1], opts)

        def ghat(l):
            return inverse_g_lt(l, f0, S, opts.beta, initial_hold=opts.initial_hold)
    else:
        ghat = resolve_density(Options(**dict(opts.echo(), density=ghat_spec))).lt
    report = check_density(ghat, S)
    b = Bundle("check", dict(opts.echo(), command="check", ghat=ghat_spec, expect=expect))
    b.text["validity"] = report.to_text()
    b.table("g_inverted", {"u": report.grid, "g": report.values})
    b.figures.append({"kind": "density", "name": "g_inverted", "u": report.grid,
                      "g": report.values, "exact": None})
    b.summary.update(verdict=report.verdict, moments=report.moments,
                     reasons=list(report.reasons))
    b.check(f"verdict is {expect}", report.verdict == expect,
            f"{report.verdict}: {'; '.join(report.reasons)}")
    return b


# -- examples ------------------------------------------------------------

_EX_DENSITY = {"ex1": "uniform", "ex2": "sine", "ex3": "parabolic", "ex4": "triangular"}


def _catalog_example(name, dens_name, opts):
    if dens_name in ("triangular",) or dens_name.startswith("g2k:"):
        if opts.barrier != 1.0:
            raise ValueError(f"{name} is defined for barrier 1 only")
    o = Options(**dict(opts.echo(), mu=0.0, x=0.0, density=dens_name))
    dens = by_name(dens_name, o.barrier)
    bundle = Bundle(name, dict(o.echo(), command="example", example=name))

    fwd = run_forward(Options(**dict(o.echo(), t_grid=None)), dens)
    lam = parse_grid(o.lambda_grid)
    closed = cf.closed_form(dens_name, o.barrier, o.beta)(lam)
    vals = fwd.tables["forward_lt"][0]["fhat"]
    if o.initial_hold:
        err = float(np.max(np.abs(closed / vals - 1)))
        fwd.check("matches closed-form transform (1e-9 rel)", err < 1e-9, f"{err:.2e}")
    bundle.merge(fwd, "forward")

    mean_t = fwd.summary["mean_from_transform"]
    t = _t_grid(o, mean_t)
    fhat = _fpt_fn(o, dens)
    _fpt_tables(bundle, fhat, t, o.order)
    inv, _ = run_inverse(o, dens_name, reference=dens)
    bundle.merge(inv, "inverse")
    sim = run_simulate(Options(**dict(o.echo(), t_grid=None)), dens)
    bundle.merge(sim, "simulate")
    bundle.summary["mean_formula"] = mean_fpt(o.beta, dens.moments[1], o.barrier,
                                              initial_hold=o.initial_hold)
    bundle.summary["mean_no_initial_hold"] = mean_fpt(o.beta, dens.moments[1], o.barrier,
                                                      initial_hold=False)
    return bundle, dens


def _example_g2k(k, opts):
    bundle, dens = _catalog_example(f"g2k:{k}", f"g2k:{k}", opts)
    b = opts.beta
    printed = 2 * (k + 2) / (3 * (2 * k + 3)) + 1 / b
    nohold = mean_fpt(b, dens.moments[1], 1.0, initial_hold=False)
    bundle.check("E(U^2) = (4k+5)/(6(2k+3))",
                 abs(dens.moments[1] - (4 * k + 5) / (6 * (2 * k + 3))) < 1e-14,
                 f"{dens.moments[1]:.15f}")
    bundle.check("mean without the initial hold = 2(k+2)/(3(2k+3)) + 1/b",
                 abs(nohold - printed) < 1e-12, f"{nohold:.12f} vs {printed:.12f}")
    bundle.summary["mean_printed_family_formula"] = printed
    return bundle


def _example_remark25(opts, betas=(0.5, 1.0, 2.0)):
    bundle = Bundle("remark25", dict(opts.echo(), command="example", example="remark25",
                                     fhat="exponential:1", betas=list(betas)))
    for beta in betas:
        o = Options(**dict(opts.echo(), beta=beta, barrier=1.0))
        inv, report = run_inverse(o, "exponential:1", expect="invalid")
        bundle.merge(inv, f"beta{beta:g}")
        m = report.moments
        # closed form of the candidate's moments: 1/2, 1/beta, (6 - beta)/(4 beta)
        exact = (0.5, 1 / beta, (6 - beta) / (4 * beta))
        err = max(abs(a - e) for a, e in zip(m, exact))
        bundle.check(f"beta={beta:g}: finite-difference moments match the candidate's "
                     "closed form (1e-5)", err < 1e-5,
                     "m=" + ", ".join(f"{v:.6f}" for v in m))
    return bundle


def _example_ou(opts, mu_ou=1.0, sigma=math.sqrt(2.0)):
    """BM problem with constant barrier S0 mapped to the OU clock.

    Holding times are clocked in Brownian (rho) time, which is the
    convention under which the reduction is exact.
    """
    S0 = opts.barrier
    o = Options(**dict(opts.echo(), mu=0.0, x=0.0))
    dens = resolve_density(o)
    bundle = Bundle("ou", dict(o.echo(), command="example", example="ou", mu_ou=mu_ou,
                               sigma=sigma, barrier_law=f"{S0}*exp(-{mu_ou} t)",
                               holding_clock="brownian"))
    sim = run_simulate(Options(**dict(o.echo(), t_grid=None)), dens)
    bundle.merge(sim, "bm")
    bm = sim.samples
    tau_ou = map_fpt_samples(bm.samples, mu_ou, sigma)
    fhat = _fpt_fn(o, dens)
    u = np.linspace(bm.mean / 1000.0, bm.samples[-1] * 1.01, 4000)
    F_bm = cdf_from_lt(fhat, u, order=o.order)
    F_ou = map_fpt_distribution(F_bm, mu_ou, sigma, "to_ou")
    ou_set = FPTSampleSet(np.sort(tau_ou), bm.n_paths, bm.censored_count, bm.nan_count,
                          {"clock": "ou"})
    ks = ks_compare(ou_set, F_ou)
    bundle.check("OU-clock samples vs mapped transform CDF: KS at 1%", ks.passed,
                 f"D={ks.statistic:.5f}, crit={ks.critical:.5f}")
    back = map_fpt_distribution(F_ou, mu_ou, sigma, "to_bm")
    rt = float(np.max(np.abs(back.x - F_bm.x) / F_bm.x))
    bundle.check("rho(rho^-1(u)) = u on the CDF grid (1e-12 rel)", rt < 1e-12, f"{rt:.1e}")
    t = np.linspace(1e-3, float(ou_time_change_inverse(mu_ou, sigma, 8 * bm.mean)), 200)
    bundle.table("ou_cdf", {"t": t, "cdf": np.interp(t, F_ou.x, F_ou.y),
                            "ecdf": np.searchsorted(ou_set.samples, t, "right") / bm.n_paths})
    bundle.table("ou_samples", {"tau": ou_set.samples})
    bundle.figures.append({"kind": "ecdf", "name": "ou_ecdf", "t": t,
                           "ecdf": bundle.tables["ou_cdf"][0]["ecdf"],
                           "cdf": bundle.tables["ou_cdf"][0]["cdf"]})
    bundle.summary["ou_mean"] = float(np.mean(tau_ou))
    return bundle


def _example_gbm(opts, x0=1.0, sigma=2.0, r=2.0, mu_prime=0.5):
    red = gbm_reduce(x0, sigma, r, mu_prime, opts.barrier)
    o = Options(**dict(opts.echo(), mu=red.drift, x=red.start))
    bundle = Bundle("gbm", dict(o.echo(), command="example", example="gbm", x0=x0,
                                sigma=sigma, r=r, mu_prime=mu_prime,
                                reduced_drift=red.drift, reduced_start=red.start,
                                reduced_barrier=red.barrier))
    bundle.check("reduced drift (mu - mu')/sigma with mu = r - sigma^2/2",
                 abs(red.drift - ((r - sigma**2 / 2) - mu_prime) / sigma) < 1e-15,
                 f"{red.drift}")
    bundle.check("reduced start ln(x0)/sigma", abs(red.start - math.log(x0) / sigma) < 1e-15)
    dens = resolve_density(o)
    fwd = run_forward(Options(**dict(o.echo(), t_grid=None)), dens)
    bundle.merge(fwd, "forward")
    sim = run_simulate(Options(**dict(o.echo(), t_grid=None)), dens)
    bundle.merge(sim, "simulate")
    return bundle


def _example_cir(opts):
    """``v(z) = 2 sqrt(z)``: reduce, solve the Brownian problem, transport back."""
    S = opts.barrier
    vc = sqrt_change()
    red = reduce_problem(vc, S)
    q = sine_density(red.barrier)
    g = transport_density(q, vc, S)
    bundle = Bundle("cir", dict(opts.echo(), command="example", example="cir",
                                reduced_barrier=red.barrier))
    o = Options(**dict(opts.echo(), barrier=red.barrier, density="sine"))
    inv, _ = run_inverse(o, "sine", reference=q)
    bundle.merge(inv, "bm")
    x = np.linspace(0.02 * S, 0.98 * S, 49)
    bundle.table("g_transported", {"x": x, "g": g.pdf(x)})
    bundle.figures.append({"kind": "density", "name": "g_transported", "u": x,
                           "g": g.pdf(x), "exact": None})
    return bundle


def run_example(name, opts):
    if name in _EX_DENSITY:
        bundle, _ = _catalog_example(name, _EX_DENSITY[name], opts)
        return bundle
    if name.startswith("g2k:"):
        return _example_g2k(int(name.split(":", 1)[1]), opts)
    if name == "remark25":
        return _example_remark25(opts)
    if name == "ou":
        return _example_ou(opts)
    if name == "gbm":
        return _example_gbm(opts)
    if name == "cir":
        return _example_cir(opts)
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}, cir")
