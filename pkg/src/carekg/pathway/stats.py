"""Kolmogorov-Smirnov validation of generated marginals.

Continuous marginals are compared directly against their configured CDF.
Discrete marginals (poisson, bernoulli) use the discrete form of the
statistic, sup over support atoms of |ECDF - CDF|, which avoids the tie
inflation of the order-statistic formula. Kolmogorov critical values are
conservative for discrete distributions, so the test keeps its level.
"""

import math

import numpy as np

from ..errors import UsageError
from .vocab import OUTCOMES
from .distributions import Categorical


def ks_statistic(samples, cdf):
    """sup_i max(|F(x_i) - (i-1)/n|, |F(x_i) - i/n|) over sorted samples."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise UsageError("ks_statistic needs a nonempty sample")
    f = np.asarray(cdf(x), dtype=float)
    lo = np.arange(0, n) / n
    hi = np.arange(1, n + 1) / n
    return float(np.maximum(np.abs(f - lo), np.abs(f - hi)).max())


def ks_statistic_discrete(samples, family):
    """sup over integer atoms of |ECDF - CDF| for a discrete family.

    The grid runs from 0 to the sample maximum; a distribution with most
    of its mass above the observed range still registers, because the top
    atom then carries |1 - F(max)| close to one.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise UsageError("ks_statistic_discrete needs a nonempty sample")
    atoms = np.arange(0.0, float(x.max()) + 1.0)
    ecdf = np.searchsorted(np.sort(x), atoms, side="right") / x.size
    return float(np.abs(ecdf - np.asarray(family.cdf(atoms), dtype=float)).max())


def ks_critical(n, alpha):
    """Asymptotic two-sided critical value sqrt(-ln(alpha/2) / (2n))."""
    if n <= 0 or not 0 < alpha < 1:
        raise UsageError("ks_critical needs n > 0 and alpha in (0,1)")
    return math.sqrt(-math.log(alpha / 2.0) / (2.0 * n))


def ks_passes(samples, cdf, alpha=0.01):
    return ks_statistic(samples, cdf) <= ks_critical(len(samples), alpha)


def validate_cohort(cohort, config, alpha=0.01):
    """KS-test every sampled scalar marginal and report outcome frequencies.

    Returns {"features": {name: {"statistic","critical","pass"}},
             "outcomes": {label: frequency}, "n": count}.
    """
    report = {"n": len(cohort), "features": {}, "outcomes": {}}
    counts = {o: 0 for o in OUTCOMES}
    for rec in cohort:
        counts[rec.outcome] += 1
    total = max(len(cohort), 1)
    report["outcomes"] = {o: counts[o] / total for o in OUTCOMES}

    for fs in config.sampled_features():
        fam = fs.family()
        if isinstance(fam, Categorical):
            continue
        values = np.array([rec.features[fs.name] for rec in cohort], dtype=float)
        if fam.continuous:
            d = ks_statistic(values, fam.cdf)
        else:
            d = ks_statistic_discrete(values, fam)
        crit = ks_critical(values.size, alpha)
        report["features"][fs.name] = {
            "statistic": d,
            "critical": crit,
            "pass": bool(d <= crit),
        }
    return report
