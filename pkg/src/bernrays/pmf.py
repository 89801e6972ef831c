"""Core types and operations for exchangeable default-count models.

Two equivalent representations are supported: the pmf of the default
count on ``{0, ..., d}``, and the per-level weight vector of the
underlying exchangeable Bernoulli joint law. The bijection between them
is binomial reweighting, evaluated with log-gamma differences so that
dimensions in the thousands neither overflow nor lose the small masses.

All tolerance constants referenced across the package live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import (
    DegenerateMarginal,
    EmptyTail,
    InvalidSpec,
    LengthMismatch,
    NegativeMass,
    NotNormalized,
    OrderOutOfRange,
    Overflow,
)

# Entries may dip this far below zero before they count as negative mass;
# anything in [-NEG_MASS_TOL, 0) is clamped to exact zero on construction.
NEG_MASS_TOL = 1e-12

# Probability vectors must total one within this absolute tolerance.
NORM_TOL = 1e-10

# A cdf value within this distance below alpha still covers the quantile.
# Two-point extremal densities routinely put mass exactly alpha at their
# lower support point, so quantile ties must resolve downward.
CDF_TIE_TOL = 1e-12

# d*p within this distance of an integer is treated as an integer mean.
INTEGER_MEAN_TOL = 1e-9

# Residual tolerances for membership checks, scaled by d and d**2.
MEAN_RESIDUAL_SCALE = 1e-9
SECOND_MOMENT_RESIDUAL_SCALE = 1e-9


def _clean_probs(values, d: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != d + 1:
        raise LengthMismatch(
            f"expected {d + 1} probabilities for d={d}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise Overflow("probabilities must be finite")
    low = float(arr.min(initial=0.0))
    if low < -NEG_MASS_TOL:
        raise NegativeMass(f"mass {low} below -{NEG_MASS_TOL}")
    arr = np.where(arr < 0.0, 0.0, arr)
    total = math.fsum(arr.tolist())
    if abs(total - 1.0) > NORM_TOL:
        raise NotNormalized(f"probabilities sum to {total}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DefaultCountPmf:
    """Pmf of the number of defaults among ``d`` exchangeable names.

    Parameters
    ----------
    d : int
        Number of names; the support is ``{0, ..., d}``.
    probs : array_like
        ``d + 1`` probabilities. Entries in ``[-1e-12, 0)`` are clamped
        to zero; the vector must sum to one within ``1e-10``.
    """

    d: int
    probs: np.ndarray

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise InvalidSpec(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "probs", _clean_probs(self.probs, self.d))


@dataclass(frozen=True)
class ExchangeablePmfSummary:
    """Level weights of an exchangeable Bernoulli joint law.

    ``f[j]`` is the probability of any single outcome with exactly ``j``
    ones; the ``binom(d, j)`` outcomes at level ``j`` share it, so the
    weights must satisfy ``sum_j binom(d, j) * f[j] == 1``.
    """

    d: int
    f: np.ndarray

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise InvalidSpec(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        arr = np.asarray(self.f, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.d + 1:
            raise LengthMismatch(
                f"expected {self.d + 1} level weights for d={self.d}, "
                f"got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise Overflow("level weights must be finite")
        low = float(arr.min(initial=0.0))
        if low < -NEG_MASS_TOL:
            raise NegativeMass(f"level weight {low} below -{NEG_MASS_TOL}")
        arr = np.where(arr < 0.0, 0.0, arr)
        total = math.fsum(_weighted_levels(self.d, arr).tolist())
        if abs(total - 1.0) > NORM_TOL:
            raise NotNormalized(f"level weights aggregate to {total}")
        arr.setflags(write=False)
        object.__setattr__(self, "f", arr)


@dataclass(frozen=True)
class ClassSpec:
    """Specification of a class of exchangeable Bernoulli laws.

    ``ClassSpec(d, p)`` fixes only the marginal default probability;
    ``ClassSpec(d, p, rho)`` additionally fixes the pairwise
    equicorrelation. Derived quantities used throughout the ray
    machinery are exposed as read-only properties.
    """

    d: int
    p: float
    rho: float | None = None

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise InvalidSpec(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        p = float(self.p)
        if not (0.0 < p < 1.0) or not math.isfinite(p):
            raise InvalidSpec(f"p must lie strictly inside (0, 1), got {p}")
        object.__setattr__(self, "p", p)
        if self.rho is not None:
            rho = float(self.rho)
            if not math.isfinite(rho) or not (-1.0 < rho <= 1.0):
                raise InvalidSpec(f"rho must lie in (-1, 1], got {rho}")
            if self.d < 2:
                raise InvalidSpec("a correlation target requires d >= 2")
            object.__setattr__(self, "rho", rho)

    @property
    def mean_count(self) -> float:
        """Target mean of the default count, ``d * p``."""
        return self.d * self.p

    @property
    def integer_mean(self) -> bool:
        """Whether ``d * p`` is an integer within ``1e-9``."""
        pd = self.mean_count
        return abs(pd - round(pd)) <= INTEGER_MEAN_TOL

    @property
    def max_lower_index(self) -> int:
        """Largest support index strictly below the mean count."""
        pd = self.mean_count
        if self.integer_mean:
            return int(round(pd)) - 1
        return int(math.floor(pd))

    @property
    def min_upper_index(self) -> int:
        """Smallest support index strictly above the mean count."""
        pd = self.mean_count
        if self.integer_mean:
            return int(round(pd)) + 1
        return int(math.floor(pd)) + 1

    @property
    def pair_moment_target(self) -> float | None:
        """Target second cross moment ``E[X_i X_j]``, or None."""
        if self.rho is None:
            return None
        return self.rho * self.p * (1.0 - self.p) + self.p * self.p

    @property
    def second_moment_target(self) -> float | None:
        """Target raw second moment of the count, or None.

        Equals ``d*p + d*(d-1) * pair_moment_target``; the count-level
        counterpart of the pair moment.
        """
        mu2 = self.pair_moment_target
        if mu2 is None:
            return None
        return self.mean_count + self.d * (self.d - 1) * mu2


def log_binomial(d: int) -> np.ndarray:
    """Vector of ``log binom(d, j)`` for ``j = 0..d`` via log-gamma."""
    j = np.arange(d + 1, dtype=float)
    return gammaln(d + 1.0) - gammaln(j + 1.0) - gammaln(d - j + 1.0)


def _weighted_levels(d: int, f: np.ndarray) -> np.ndarray:
    """Terms ``binom(d, j) * f[j]`` computed in log space."""
    out = np.zeros(d + 1)
    pos = f > 0.0
    if np.any(pos):
        out[pos] = np.exp(log_binomial(d)[pos] + np.log(f[pos]))
    if not np.all(np.isfinite(out)):
        raise Overflow("binomial reweighting overflowed")
    return out


def validate(pmf: DefaultCountPmf) -> DefaultCountPmf:
    """Re-run all construction checks on ``pmf`` and return it."""
    _clean_probs(pmf.probs, pmf.d)
    return pmf


def to_count_pmf(summary: ExchangeablePmfSummary) -> DefaultCountPmf:
    """Map level weights to the default-count pmf.

    ``probs[j] = binom(d, j) * f[j]``, evaluated as
    ``exp(log binom + log f)`` so the binomial factor never materialises.
    """
    return DefaultCountPmf(summary.d, _weighted_levels(summary.d, summary.f))


def from_count_pmf(pmf: DefaultCountPmf) -> ExchangeablePmfSummary:
    """Inverse of :func:`to_count_pmf`; zero masses stay exactly zero."""
    f = np.zeros(pmf.d + 1)
    pos = pmf.probs > 0.0
    if np.any(pos):
        f[pos] = np.exp(np.log(pmf.probs[pos]) - log_binomial(pmf.d)[pos])
    if not np.all(np.isfinite(f)):
        raise Overflow("inverse binomial reweighting overflowed")
    return ExchangeablePmfSummary(pmf.d, f)


def mean(pmf: DefaultCountPmf) -> float:
    """Mean of the default count."""
    return math.fsum((j * x for j, x in enumerate(pmf.probs.tolist())))


def cross_moment(pmf: DefaultCountPmf, order: int) -> float:
    """Cross moment ``E[X_1 * ... * X_order]`` of the Bernoulli margins.

    For an exchangeable law with count pmf ``p`` this equals the
    normalised falling-factorial moment
    ``sum_k (k)_order / (d)_order * p[k]``. The falling-factorial ratio
    is accumulated as a product of per-step ratios ``(k-t)/(d-t)``,
    each in ``[0, 1]``, so no overflow is possible at any ``d``.

    Parameters
    ----------
    pmf : DefaultCountPmf
    order : int
        Moment order, between 1 and ``d``.

    Returns
    -------
    float
        The cross moment, a value in ``[0, 1]``.
    """
    if not 1 <= order <= pmf.d:
        raise OrderOutOfRange(f"order must lie in 1..{pmf.d}, got {order}")
    k = np.arange(pmf.d + 1, dtype=float)
    ratio = np.ones(pmf.d + 1)
    for t in range(order):
        ratio *= (k - t) / (pmf.d - t)
    ratio[: order] = 0.0
    return math.fsum((ratio * pmf.probs).tolist())


def correlation(pmf: DefaultCountPmf, p: float) -> float:
    """Pairwise correlation implied by ``pmf`` for marginal ``p``.

    ``rho = (mu2 - p^2) / (p * (1 - p))`` with ``mu2`` the order-2 cross
    moment. Clamped to ``[-1, 1]`` against roundoff.
    """
    if not (0.0 < p < 1.0):
        raise DegenerateMarginal(f"correlation undefined for p={p}")
    mu2 = cross_moment(pmf, 2)
    rho = (mu2 - p * p) / (p * (1.0 - p))
    return min(1.0, max(-1.0, rho))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0) or not math.isfinite(alpha):
        raise InvalidSpec(f"alpha must lie strictly inside (0, 1), got {alpha}")
    return alpha


def var(pmf: DefaultCountPmf, alpha: float) -> int:
    """Lower ``alpha``-quantile of the count.

    Smallest ``k`` with ``P(Y <= k) >= alpha``. The cdf is accumulated
    with Neumaier compensation and compared against
    ``alpha - CDF_TIE_TOL``, so a cdf value equal to ``alpha`` up to
    roundoff covers the quantile.
    """
    alpha = _check_alpha(alpha)
    threshold = alpha - CDF_TIE_TOL
    acc = 0.0
    comp = 0.0
    for k, mass in enumerate(pmf.probs.tolist()):
        t = acc + mass
        if abs(acc) >= abs(mass):
            comp += (acc - t) + mass
        else:
            comp += (mass - t) + acc
        acc = t
        if acc + comp >= threshold:
            return k
    return pmf.d


def es(pmf: DefaultCountPmf, alpha: float) -> float:
    """Expected shortfall ``E[Y | Y >= var(Y, alpha)]``.

    The conditional tail expectation at the lower quantile; on discrete
    distributions this is the definition the risk tables use.
    """
    v = var(pmf, alpha)
    tail = pmf.probs[v:].tolist()
    tail_mass = math.fsum(tail)
    if tail_mass <= 0.0:
        raise EmptyTail(f"no mass at or above the {alpha}-quantile")
    num = math.fsum(((v + i) * x for i, x in enumerate(tail)))
    return num / tail_mass
