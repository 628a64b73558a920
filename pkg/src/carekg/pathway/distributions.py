"""Distribution families available to feature specs.

Each family exposes cdf/ppf so sampling can go through a latent Gaussian
copula (monotone linkage between features) while preserving the configured
marginal exactly. Discrete families additionally expose left-limit CDF and
pmf for randomized probability-integral-transform validation.
"""

import numpy as np
from scipy import stats

from ..errors import ConfigurationError


class Family:
    continuous = True

    def cdf(self, x):
        raise NotImplementedError

    def ppf(self, u):
        raise NotImplementedError

    def cdf_left(self, x):
        """P(X < x); equals cdf for continuous families."""
        return self.cdf(x)

    def pmf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


class GEV(Family):
    """Generalized extreme value; shape follows the xi convention
    (scipy's genextreme uses c = -xi)."""

    def __init__(self, shape, loc, scale, field="distribution"):
        if scale <= 0:
            raise ConfigurationError(f"{field}: gev scale must be > 0, got {scale}")
        self.dist = stats.genextreme(c=-shape, loc=loc, scale=scale)

    def cdf(self, x):
        return self.dist.cdf(x)

    def ppf(self, u):
        return self.dist.ppf(u)


class Normal(Family):
    def __init__(self, mean, std, field="distribution"):
        if std <= 0:
            raise ConfigurationError(f"{field}: normal std must be > 0, got {std}")
        self.mean = mean
        self.std = std

    def cdf(self, x):
        return stats.norm.cdf(x, self.mean, self.std)

    def ppf(self, u):
        return stats.norm.ppf(u, self.mean, self.std)


class Uniform(Family):
    def __init__(self, low, high, field="distribution"):
        if not high > low:
            raise ConfigurationError(f"{field}: uniform requires high > low")
        self.low = low
        self.high = high

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.low) / (self.high - self.low), 0.0, 1.0)

    def ppf(self, u):
        return self.low + np.asarray(u, dtype=float) * (self.high - self.low)


class Poisson(Family):
    continuous = False

    def __init__(self, lam, field="distribution"):
        if lam <= 0:
            raise ConfigurationError(f"{field}: poisson lam must be > 0, got {lam}")
        self.dist = stats.poisson(lam)

    def cdf(self, x):
        return self.dist.cdf(x)

    def cdf_left(self, x):
        return self.dist.cdf(np.asarray(x) - 1)

    def pmf(self, x):
        return self.dist.pmf(x)

    def ppf(self, u):
        return self.dist.ppf(u)


class Bernoulli(Family):
    continuous = False

    def __init__(self, p, field="distribution"):
        if not 0.0 <= p <= 1.0:
            raise ConfigurationError(f"{field}: bernoulli p must be in [0,1], got {p}")
        self.p = p

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, np.where(x < 1, 1.0 - self.p, 1.0))

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 0.0, np.where(x <= 1, 1.0 - self.p, 1.0))

    def pmf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x == 0, 1.0 - self.p, np.where(x == 1, self.p, 0.0))

    def ppf(self, u):
        return (np.asarray(u, dtype=float) >= 1.0 - self.p).astype(float)


class Categorical:
    """Finite set of labeled values; not a numeric family (no cdf), sampled
    by inverse transform over the configured probabilities."""

    continuous = False

    def __init__(self, values, probs, field="distribution"):
        if len(values) != len(probs) or not values:
            raise ConfigurationError(f"{field}: categorical values/probs length mismatch")
        probs = np.asarray(probs, dtype=float)
        if np.any(probs < 0):
            raise ConfigurationError(f"{field}: categorical probabilities must be >= 0")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ConfigurationError(f"{field}: categorical probabilities sum to {probs.sum()}, not 1")
        self.values = list(values)
        self.probs = probs
        self.cum = np.cumsum(probs)

    def pick(self, u):
        return self.values[min(int(np.searchsorted(self.cum, u, side="right")), len(self.values) - 1)]


def make_family(feature_name, dist):
    """Build a distribution family from its config dict ({'family': tag, ...})."""
    if not isinstance(dist, dict) or "family" not in dist:
        raise ConfigurationError(f"feature {feature_name}: distribution must carry a 'family' tag")
    tag = dist["family"]
    field = f"feature {feature_name}"
    try:
        if tag == "generalized-extreme-value":
            return GEV(dist["shape"], dist["loc"], dist["scale"], field)
        if tag == "normal":
            return Normal(dist["mean"], dist["std"], field)
        if tag == "uniform":
            return Uniform(dist["low"], dist["high"], field)
        if tag == "poisson":
            return Poisson(dist["lam"], field)
        if tag == "bernoulli":
            return Bernoulli(dist["p"], field)
        if tag == "categorical-with-probabilities":
            return Categorical(dist["values"], dist["probs"], field)
    except KeyError as e:
        raise ConfigurationError(f"{field}: missing distribution parameter {e}") from None
    raise ConfigurationError(f"{field}: unknown distribution family {tag!r}")
