"""Analytic upper bounds on the worst-case ensemble error rate.

Four families: the correlation-agnostic 4*mean-rate bound, a rational bound
valid above the mean error count, the exponential-decay bound in both its
sum-of-rates form and its per-classifier decay-factor form lambda^n, and the
correlation-corrected bound for the exchangeable model.

Bound values are never clipped to [0, 1]; callers that want display
probabilities can take min(value, 1) themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError
from .prob_engine import ErrorProfile, bahadur_range


@dataclass(frozen=True)
class BoundInputs:
    """Parameter set for one bound evaluation.

    mu defaults to n * e_bar, the identically-distributed case.
    """

    n: int
    m: int
    e_bar: float
    c: float | None = None
    mu: float | None = None

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m={self.m} outside 1..{self.n}")
        if not 0.0 <= self.e_bar <= 1.0:
            raise ValueError(f"e_bar={self.e_bar} outside [0, 1]")

    @property
    def r(self) -> float:
        return self.m / self.n

    @property
    def mu_value(self) -> float:
        return self.n * self.e_bar if self.mu is None else self.mu


@dataclass(frozen=True)
class BoundReport:
    """Evaluated bounds for one parameter set.

    feller and kz are None where their preconditions fail; kz_reason says
    why.  lam and omega are the per-classifier factors behind the exponential
    bounds: chernoff_lambda = lam**n and the correlation correction scales
    with omega**n.
    """

    gs: float
    feller: float | None
    chernoff_mu: float
    chernoff_lambda: float
    kz: float | None
    lam: float
    omega: float
    kz_reason: str | None = None


def gs_bound(rates: ErrorProfile | Iterable[float]) -> float:
    """Four times the average bit error rate.  May exceed 1."""
    values = rates.rates if isinstance(rates, ErrorProfile) else tuple(rates)
    if not values:
        raise ValueError("empty rate list")
    return 4.0 * sum(values) / len(values)


def feller_bound(n: int, m: int, e: float) -> float:
    """Rational tail bound m(1-e) / (m - n e)^2, valid for m > n e."""
    if not 1 <= m <= n:
        raise ValueError(f"m={m} outside 1..{n}")
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"e={e} outside [0, 1]")
    if m <= n * e:
        raise DomainError(f"inapplicable: m={m} <= n*e={n * e}")
    return m * (1.0 - e) / (m - n * e) ** 2


def chernoff_mu_bound(mu: float, m: int) -> float:
    """Exponential tail bound e^(m - mu) * (mu / m)^m for 0 < mu < m."""
    if m < 1:
        raise ValueError(f"m={m} must be at least 1")
    if not 0.0 < mu < m:
        raise DomainError(f"inapplicable: mu={mu} outside (0, {m})")
    return math.exp((m - mu) + m * math.log(mu / m))


def chernoff_lambda(r: float, e: float) -> float:
    """Per-classifier decay factor lambda = e^(r - e) * (e / r)^r.

    Lies in [0, 1) whenever e != r; equals 1 at e = r.  e = 0 returns 0 by
    continuous extension.  The full-ensemble bound is lambda**n.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"r={r} outside (0, 1)")
    if not 0.0 <= e <= 1.0:
        raise DomainError(f"e={e} outside [0, 1]")
    if e == 0.0:
        return 0.0
    return math.exp((r - e) + r * math.log(e / r))


def chernoff_bound(n: int, m: int, e: float) -> float:
    """Full-ensemble form chernoff_lambda(m/n, e) ** n."""
    if not 1 <= m <= n:
        raise ValueError(f"m={m} outside 1..{n}")
    return chernoff_lambda(m / n, e) ** n


def omega_factor(r: float, e: float) -> float:
    """Binomial-envelope factor omega = (e/r)^r ((1-e)/(1-r))^(1-r).

    Strictly inside (0, 1) for e != r; equals 1 at e = r.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"r={r} outside (0, 1)")
    if not 0.0 <= e <= 1.0:
        raise DomainError(f"e={e} outside [0, 1]")
    if e == 0.0 or e == 1.0:
        return 0.0
    return math.exp(r * math.log(e / r) + (1.0 - r) * math.log((1.0 - e) / (1.0 - r)))


def kz_value(n: int, m: int, e: float, c: float) -> float:
    """Correlation-corrected bound expression, evaluated unconditionally.

    lambda^n + 0.5 c n (n-1) ((m-1)/(n-1) - e) omega^n.  No precondition
    checks: negative c or e above (m-1)/(n-1) simply make the correction
    negative.  This is the form experiment reports publish.
    """
    if not 1 <= m <= n or n < 2:
        raise ValueError(f"m={m}, n={n} outside range")
    r = m / n
    correction = 0.5 * c * n * (n - 1) * ((m - 1) / (n - 1) - e)
    return chernoff_lambda(r, e) ** n + correction * omega_factor(r, e) ** n


def kz_bound(
    n: int, m: int, e: float, c: float, *, tight_envelope: bool = False
) -> float:
    """Correlation-corrected bound for the exchangeable model.

    Requires c >= 0 within the admissible correlation range,
    e <= (m-1)/(n-1), and e != m/n.

    The default omega^n correction term is the conventional display form, but
    it can undershoot the exact exchangeable tail when e is far below m/n:
    bounding the binomial mass p(n-1, m-1, e) by omega^n drops a factor of
    (m/n)/e that the envelope actually carries.  Pass tight_envelope=True to
    keep that factor, which makes the value a guaranteed upper bound on
    exchangeable_tail for all admissible inputs.
    """
    if not 1 <= m <= n or n < 2:
        raise ValueError(f"m={m}, n={n} outside range")
    r = m / n
    if e == r:
        raise DomainError(f"e={e} equals m/n; decay factor degenerates to 1")
    if e > (m - 1) / (n - 1):
        raise DomainError(f"inapplicable: e={e} > (m-1)/(n-1)={(m - 1) / (n - 1)}")
    if c < 0.0:
        raise DomainError(f"inapplicable: c={c} is negative")
    c_min, c_max = bahadur_range(n, e)
    if c > c_max:
        raise DomainError(f"c={c} above admissible maximum {c_max}")
    correction = 0.5 * c * n * (n - 1) * ((m - 1) / (n - 1) - e)
    if tight_envelope:
        correction *= r / e
    return chernoff_lambda(r, e) ** n + correction * omega_factor(r, e) ** n


def evaluate_bounds(inputs: BoundInputs, *, kz_policy: str = "gated") -> BoundReport:
    """Evaluate every bound for one parameter set, flagging inapplicable ones.

    kz_policy: "gated" leaves kz absent when c is missing or negative or
    e_bar exceeds (m-1)/(n-1); "always" evaluates the expression regardless
    (the convention used by published per-fold tables).
    """
    if kz_policy not in ("gated", "always"):
        raise ValueError(f"unknown kz_policy {kz_policy!r}")
    n, m, e = inputs.n, inputs.m, inputs.e_bar
    r = inputs.r
    gs = 4.0 * e
    try:
        feller = feller_bound(n, m, e)
    except DomainError:
        feller = None
    lam = chernoff_lambda(r, e)
    omega = omega_factor(r, e)
    chern = lam**n
    mu = inputs.mu_value
    # The mu-form expression stays a valid (if trivial) bound outside
    # (0, m); evaluate it whenever it is defined so the report is complete.
    chernoff_mu = math.exp((m - mu) + m * math.log(mu / m)) if mu > 0.0 else 0.0

    kz = None
    kz_reason = None
    if inputs.c is None:
        kz_reason = "no correlation supplied"
    elif kz_policy == "always":
        kz = kz_value(n, m, e, inputs.c)
    elif inputs.c < 0.0:
        kz_reason = f"c={inputs.c} is negative"
    elif e > (m - 1) / (n - 1):
        kz_reason = f"e_bar={e} > (m-1)/(n-1)={(m - 1) / (n - 1)}"
    else:
        try:
            kz = kz_bound(n, m, e, inputs.c)
        except DomainError as exc:
            kz_reason = str(exc)
    return BoundReport(
        gs=gs,
        feller=feller,
        chernoff_mu=chernoff_mu,
        chernoff_lambda=chern,
        kz=kz,
        lam=lam,
        omega=omega,
        kz_reason=kz_reason,
    )
