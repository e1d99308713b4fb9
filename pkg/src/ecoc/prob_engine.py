"""Exact error-count distributions for ensembles of binary classifiers.

Three dependence structures are supported: fully independent classifiers
(Poisson binomial), independent classifiers except for one correlated pair
(specified by the pair's joint error probability f), and fully exchangeable
classifiers with a uniform second-order correlation coefficient c.  Every
distribution comes with both an efficient route (dynamic programming,
two-stage recursion, or closed form) and a brute-force enumeration oracle
over all 2^n outcomes for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError

# Per-outcome weights this close to zero (from rounding at the edge of the
# admissible correlation range) are clamped to exactly zero.
WEIGHT_SLACK = 1e-12

# Hard cap on the brute-force oracle: 2^20 outcomes.
ENUMERATION_MAX_N = 20

_LOG_SPACE_N = 50


@dataclass(frozen=True)
class ErrorProfile:
    """Per-classifier bit error rates e_1..e_n."""

    rates: tuple[float, ...]

    def __post_init__(self):
        rates = tuple(float(e) for e in self.rates)
        if len(rates) < 1:
            raise ValueError("error profile needs at least one rate")
        for i, e in enumerate(rates):
            if not (0.0 <= e <= 1.0) or math.isnan(e):
                raise ValueError(f"rate e_{i + 1}={e} outside [0, 1]")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def iid(cls, n: int, e: float) -> "ErrorProfile":
        return cls((float(e),) * n)

    @property
    def n(self) -> int:
        return len(self.rates)

    @property
    def e_max(self) -> float:
        return max(self.rates)

    @property
    def mean(self) -> float:
        return sum(self.rates) / len(self.rates)

    @property
    def mu(self) -> float:
        """Sum of the rates."""
        return sum(self.rates)


@dataclass(frozen=True)
class Independent:
    """All classifiers err independently."""

    profile: ErrorProfile

    @property
    def n(self) -> int:
        return self.profile.n


@dataclass(frozen=True)
class PairModel:
    """Independent classifiers except the last two, whose probability of
    erring together on the same sample equals f."""

    profile: ErrorProfile
    f: float

    def __post_init__(self):
        if self.profile.n < 2:
            raise ModelError("pair model needs at least two classifiers")
        e1, e2 = self.profile.rates[-2], self.profile.rates[-1]
        lo, hi = pair_f_range(e1, e2)
        if not (lo - WEIGHT_SLACK <= self.f <= hi + WEIGHT_SLACK):
            raise ModelError(
                f"f={self.f} outside [{lo}, {hi}] for rates ({e1}, {e2}); "
                "some joint cell probability would be negative"
            )

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def joint_cells(self) -> tuple[float, float, float, float]:
        """(P11, P10, P01, P00) for the correlated pair."""
        e1, e2 = self.profile.rates[-2], self.profile.rates[-1]
        f = min(max(self.f, max(0.0, e1 + e2 - 1.0)), min(e1, e2))
        return (f, e1 - f, e2 - f, 1.0 - e1 - e2 + f)


@dataclass(frozen=True)
class ExchangeableModel:
    """Identically distributed classifiers with uniform pairwise correlation c
    of the standardized error indicators; higher-order correlations vanish."""

    n: int
    e_bar: float
    c: float

    def __post_init__(self):
        if self.n < 2:
            raise ModelError("exchangeable model needs n >= 2")
        if not (0.0 < self.e_bar < 1.0):
            raise ModelError(f"e_bar={self.e_bar} must lie strictly inside (0, 1)")
        # Validity is checked on the induced outcome weights themselves: the
        # published correlation range is exact on the positive side but too
        # permissive below when e_bar < 1/2.
        w = _outcome_weights(self.n, self.e_bar, self.c)
        if w.min() < -WEIGHT_SLACK:
            raise ModelError(
                f"c={self.c} gives a negative outcome probability "
                f"(weight {w.min():.3e} at k={int(w.argmin())})"
            )

    @property
    def profile(self) -> ErrorProfile:
        return ErrorProfile.iid(self.n, self.e_bar)


DependenceModel = Independent | PairModel | ExchangeableModel


def pair_f_range(e1: float, e2: float) -> tuple[float, float]:
    """Admissible interval for the pair joint error probability f.

    The upper end keeps P10 and P01 non-negative, the lower end keeps P00
    non-negative.
    """
    return max(0.0, e1 + e2 - 1.0), min(e1, e2)


# ---------------------------------------------------------------------------
# independent classifiers


def poisson_binomial_dist(profile: ErrorProfile) -> np.ndarray:
    """Full pmf of the error count, index k = 0..n.

    Dynamic programming over classifiers, O(n^2); adds only non-negative
    terms, so it is stable to well below 1e-12 for the sizes used here.
    """
    dist = np.array([1.0])
    for e in profile.rates:
        nxt = np.zeros(len(dist) + 1)
        nxt[:-1] = dist * (1.0 - e)
        nxt[1:] += dist * e
        dist = nxt
    return dist


def poisson_binomial_pmf(profile: ErrorProfile, k: int) -> float:
    """Probability that exactly k of the n classifiers err."""
    if not 0 <= k <= profile.n:
        raise ValueError(f"k={k} outside 0..{profile.n}")
    return float(poisson_binomial_dist(profile)[k])


def binomial_pmf(n: int, k: int, e: float) -> float:
    """Probability of exactly k errors among n iid classifiers with rate e."""
    if n < 0 or not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"e={e} outside [0, 1]")
    if e == 0.0:
        return 1.0 if k == 0 else 0.0
    if e == 1.0:
        return 1.0 if k == n else 0.0
    if n <= _LOG_SPACE_N:
        return math.comb(n, k) * e**k * (1.0 - e) ** (n - k)
    log_comb = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(log_comb + k * math.log(e) + (n - k) * math.log1p(-e))


def tail_independent(profile: ErrorProfile, m: int) -> float:
    """Probability that at least m classifiers err, independent case.

    m = 0 is accepted as a degenerate input and returns 1.
    """
    if not 0 <= m <= profile.n:
        raise ValueError(f"m={m} outside 0..{profile.n}")
    if m == 0:
        return 1.0
    return float(poisson_binomial_dist(profile)[m:].sum())


def tail_iid(n: int, m: int, e: float) -> float:
    """Probability that at least m of n iid classifiers err."""
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside 0..{n}")
    return _tail_iid_ext(n, m, e)


def _tail_iid_ext(n: int, m: int, e: float) -> float:
    # Out-of-range m maps to the trivial tail values; the two-stage recursion
    # needs this extension for its n-2 subproblems.
    if m <= 0:
        return 1.0
    if m > n:
        return 0.0
    return sum(binomial_pmf(n, k, e) for k in range(m, n + 1))


# ---------------------------------------------------------------------------
# one correlated pair


def pair_correlated_pmf(model: PairModel, k: int) -> float:
    """Probability of exactly k errors with the last two classifiers paired.

    Conditioning on the pair's four joint cells reduces to the error-count
    distribution of the remaining n-2 independent classifiers:

        p(k) = f * q(k-2) + (P10 + P01) * q(k-1) + P00 * q(k)

    where q is the Poisson binomial pmf of the first n-2 rates and terms with
    out-of-range index vanish.
    """
    n = model.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    p11, p10, p01, p00 = model.joint_cells
    if n == 2:
        sub = np.array([1.0])
    else:
        sub = poisson_binomial_dist(ErrorProfile(model.profile.rates[:-2]))

    def q(j: int) -> float:
        return float(sub[j]) if 0 <= j <= n - 2 else 0.0

    return p11 * q(k - 2) + (p10 + p01) * q(k - 1) + p00 * q(k)


def pair_correlated_tail(n: int, m: int, e: float, f: float) -> float:
    """Probability of at least m errors, iid rate e, pair joint probability f.

    Evaluated through the identity that pushes the tail onto the n-2
    independent classifiers:

        eps(n, m, e, f) = f * eps(n-2, m-2, e) + 2(e - f) * eps(n-2, m-1, e)
                          + (1 - 2e + f) * eps(n-2, m, e)
    """
    if n < 2:
        raise ValueError(f"n={n} must be at least 2")
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside 0..{n}")
    lo, hi = pair_f_range(e, e)
    if not (lo - WEIGHT_SLACK <= f <= hi + WEIGHT_SLACK):
        raise ModelError(f"f={f} outside [{lo}, {hi}] for iid rate {e}")
    return (
        f * _tail_iid_ext(n - 2, m - 2, e)
        + 2.0 * (e - f) * _tail_iid_ext(n - 2, m - 1, e)
        + (1.0 - 2.0 * e + f) * _tail_iid_ext(n - 2, m, e)
    )


# ---------------------------------------------------------------------------
# exchangeable classifiers


def _outcome_weights(n: int, e: float, c: float) -> np.ndarray:
    """Multiplier on the zero-correlation outcome probability e^k (1-e)^(n-k),
    one entry per error count k = 0..n."""
    k = np.arange(n + 1, dtype=float)
    quad = k * k - k + e * (n - 1) * (n * e - 2.0 * k)
    return 1.0 + c / (2.0 * e * (1.0 - e)) * quad


def exchangeable_pmf(n: int, k: int, e: float, c: float) -> float:
    """Probability of exactly k errors in the exchangeable model."""
    model = ExchangeableModel(n, e, c)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    w = max(_outcome_weights(n, e, c)[k], 0.0)
    return binomial_pmf(n, k, e) * float(w)


def exchangeable_tail(n: int, m: int, e: float, c: float) -> float:
    """Probability of at least m errors in the exchangeable model.

    Closed form: the iid tail plus a single correction term proportional to
    c and to one binomial mass,

        eps(n, m, e) + 0.5 c n (n-1) ((m-1)/(n-1) - e) p(n-1, m-1, e),

    which agrees with summing exchangeable_pmf over k >= m.
    """
    ExchangeableModel(n, e, c)
    if not 0 <= m <= n:
        raise ValueError(f"m={m} outside 0..{n}")
    if m == 0:
        return 1.0
    correction = (
        0.5 * c * n * (n - 1) * ((m - 1) / (n - 1) - e) * binomial_pmf(n - 1, m - 1, e)
    )
    return _tail_iid_ext(n, m, e) + correction


def bahadur_range(n: int, e: float) -> tuple[float, float]:
    """Published admissible range for the uniform correlation coefficient.

    The upper end is exact: it is the largest c for which every induced
    outcome probability stays non-negative.  The lower end is exact only for
    e >= 1/2; below that it understates the true constraint, which is why the
    model types validate the induced weights directly.
    """
    if n < 2:
        raise ValueError(f"n={n} must be at least 2")
    if not (0.0 < e < 1.0):
        raise ModelError(f"e={e} must lie strictly inside (0, 1)")
    gamma = min((k - (n - 1) * e - 0.5) ** 2 for k in range(n + 1))
    c_min = -2.0 * (1.0 - e) / (n * (n - 1) * e)
    c_max = 2.0 * e * (1.0 - e) / ((n - 1) * e * (1.0 - e) + 0.25 - gamma)
    return c_min, c_max


def valid_correlation_range(n: int, e: float) -> tuple[float, float]:
    """Largest interval of c values whose induced outcome weights are all
    non-negative.  Subset of bahadur_range for e < 1/2, equal otherwise."""
    c_min, c_max = bahadur_range(n, e)
    # Weights are affine in c with slope quad/(2e(1-e)); the binding negative
    # constraint for c < 0 sits at the largest positive quadratic value,
    # attained at k = 0 or k = n.
    g_max = n * (n - 1) * max(e, 1.0 - e) ** 2
    true_min = -2.0 * e * (1.0 - e) / g_max
    return max(c_min, true_min), c_max


# ---------------------------------------------------------------------------
# brute-force oracle


def enumerate_outcomes(model: DependenceModel) -> dict[int, float]:
    """Exact error-count distribution by summing the joint law over all 2^n
    outcomes.  Test oracle only; capped at n = 20."""
    n = model.n
    if n > ENUMERATION_MAX_N:
        raise ValueError(f"n={n} exceeds enumeration cap {ENUMERATION_MAX_N}")
    totals = np.zeros(n + 1)
    block = 1 << min(n, 16)
    for start in range(0, 1 << n, block):
        idx = np.arange(start, start + block, dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(n)) & 1).astype(bool)
        totals += _outcome_mass(model, bits)
    return {k: float(totals[k]) for k in range(n + 1)}


def _outcome_mass(model: DependenceModel, bits: np.ndarray) -> np.ndarray:
    """Sum of joint probabilities of the given outcomes, bucketed by error
    count."""
    n = bits.shape[1]
    k = bits.sum(axis=1)
    if isinstance(model, Independent):
        rates = np.asarray(model.profile.rates)
        probs = np.where(bits, rates, 1.0 - rates).prod(axis=1)
    elif isinstance(model, PairModel):
        rates = np.asarray(model.profile.rates[:-2])
        probs = np.where(bits[:, :-2], rates, 1.0 - rates).prod(axis=1)
        p11, p10, p01, p00 = model.joint_cells
        cell = np.select(
            [
                bits[:, -2] & bits[:, -1],
                bits[:, -2] & ~bits[:, -1],
                ~bits[:, -2] & bits[:, -1],
            ],
            [p11, p10, p01],
            default=p00,
        )
        probs = probs * cell
    elif isinstance(model, ExchangeableModel):
        e = model.e_bar
        w = np.clip(_outcome_weights(n, e, model.c), 0.0, None)
        probs = e**k * (1.0 - e) ** (n - k) * w[k]
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    return np.bincount(k, weights=probs, minlength=n + 1)
