"""CSV rows and matplotlib figures for the experiment subcommands."""
from __future__ import annotations

import csv
import io
import math
from fractions import Fraction
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .monotone import ThresholdSweep  # noqa: E402

THRESHOLD_HEADER = ("epsilon", "p", "successes", "trials", "fraction")
COVERAGE_HEADER = ("n", "C", "p", "successes", "trials", "fraction")


def _dec(x) -> str:
    return f"{float(x):.6f}"


def threshold_csv(sweep: ThresholdSweep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(THRESHOLD_HEADER)
    for eps, p, hits, trials, frac in sweep.rows():
        w.writerow([_dec(eps), _dec(p), hits, trials, _dec(frac)])
    return buf.getvalue()


def coverage_csv(n: int, C: float, p: float, successes: int, trials: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COVERAGE_HEADER)
    w.writerow([n, _dec(C), _dec(p), successes, trials, _dec(Fraction(successes, trials))])
    return buf.getvalue()


def first_moment_float(n: int, p: float) -> float:
    """``p (1+p)^(n-2)`` in floating point, for plotting only."""
    if p <= 0:
        return 0.0
    return math.exp(math.log(p) + (n - 2) * math.log1p(p))


def plot_threshold(sweep: ThresholdSweep, path: str | Path) -> Path:
    """Success fraction against epsilon, with binomial error bars and the
    first-moment bound on the subcritical side."""
    path = Path(path)
    eps = sweep.epsilons
    frac = [float(sweep.fraction(e)) for e in eps]
    err = [math.sqrt(max(f * (1 - f), 0.0) / sweep.trials) for f in frac]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.errorbar(eps, frac, yerr=err, marker="o", capsize=3, label="monotone 1→n path")
    sub = [e for e in eps if e < 0]
    if sub:
        grid = [sub[0] + (min(0.0, eps[-1]) - sub[0]) * t / 50 for t in range(51)]
        bound = [min(1.0, first_moment_float(sweep.n, sweep.p(e))) for e in grid]
        ax.plot(grid, bound, "--", color="grey", label="first-moment bound")
    ax.axvline(0.0, color="k", lw=0.5)
    ax.set_xlabel(r"$\varepsilon$  ($p = (1+\varepsilon)\ln n / n$)")
    ax.set_ylabel("fraction of trials")
    ax.set_ylim(-0.03, 1.03)
    ax.set_title(f"n = {sweep.n}, {sweep.trials} trials per point")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_embedding(truth: Mapping[int, Fraction], emb: Mapping[int, Fraction], path: str | Path) -> Path:
    """Recovered positions against planted ones (a line of slope +-1 on success)."""
    path = Path(path)
    keys = sorted(emb)
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    ax.scatter([float(truth[k]) for k in keys], [float(emb[k]) for k in keys], s=4)
    ax.set_xlabel("planted position")
    ax.set_ylabel("recovered position")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
