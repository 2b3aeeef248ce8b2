"""PNG figures for CLI bundles (non-interactive Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["render"]


def _transform(ax, fig):
    ax.semilogx(fig["x"], fig["y"], "o-", ms=3)
    ax.set_xlabel("lambda")
    ax.set_ylabel(fig.get("ylabel", "transform"))


def _density(ax, fig):
    ax.plot(fig["u"], fig["g"], "-", label="inverted")
    if fig.get("exact") is not None:
        ax.plot(fig["u"], fig["exact"], "--", label="exact")
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel("u")
    ax.set_ylabel("jump density")
    ax.legend()


def _fpt(ax, fig):
    ax.plot(fig["t"], fig["pdf"], label="density")
    ax.plot(fig["t"], fig["cdf"], label="CDF")
    ax.set_xlabel("t")
    ax.legend()


def _ecdf(ax, fig):
    ax.step(fig["t"], fig["ecdf"], where="post", label="Monte Carlo")
    if fig.get("cdf") is not None:
        ax.plot(fig["t"], fig["cdf"], "--", label="transform")
    ax.set_xlabel("t")
    ax.set_ylabel("P(tau <= t)")
    ax.legend()


_DRAW = {"transform": _transform, "density": _density, "fpt": _fpt, "ecdf": _ecdf}


def render(fig, path, title=""):
    """Draw one figure request from a bundle and save it to ``path``."""
    f, ax = plt.subplots(figsize=(6, 4))
    try:
        _DRAW[fig["kind"]](ax, {k: (np.asarray(v) if isinstance(v, (list, tuple)) else v)
                               for k, v in fig.items()})
        ax.set_title(title or fig["name"])
        f.tight_layout()
        f.savefig(path, dpi=110)
    finally:
        plt.close(f)
