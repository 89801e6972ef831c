"""Sharp risk bounds on the default count over an admissible class.

Value-at-risk extrema over a class are attained on its extremal rays,
so a scan over the enumeration is exact. For the mean-constrained class
the scan collapses to a closed form in (d, p, alpha). Expected-shortfall
scans report the extrema over rays; the proved class-wide envelope
[min VaR, d] is exposed separately because the two differ in meaning:
ray extrema reproduce the bundled reference tables, the envelope is the bound
established for every class member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import EmptyRaySet, InvalidSpec
from .pmf import CDF_TIE_TOL, ClassSpec, _check_alpha
from .rays_corr import enumerate_rays as enumerate_corr_rays
from .rays_mean import RayDensity

# Slack for boundary decisions in the closed-form index arithmetic:
# quantities like pd/(1-alpha) land exactly on integers for round table
# parameters and must resolve by their strict-inequality definitions.
_INDEX_TOL = 1e-9


@dataclass(frozen=True)
class RiskBounds:
    """Per-alpha risk bounds over a class, with VaR-attaining rays.

    ``argmin_ray``/``argmax_ray`` identify the rays attaining the VaR
    extrema by their support tuples. ES fields are None when the record
    comes from a VaR-only scan.
    """

    alpha: float
    var_min: int
    var_max: int
    es_min: float | None
    es_max: float | None
    argmin_ray: tuple[int, ...]
    argmax_ray: tuple[int, ...]


class EsEnvelope(NamedTuple):
    """Class-wide expected-shortfall envelope at one confidence level."""

    lower: float
    upper: float
    upper_attained: bool


def _ray_arrays(
    rays: Sequence[RayDensity],
) -> tuple[np.ndarray, np.ndarray]:
    """Pack rays into (n, 3) support/mass arrays, padding short rays by
    repeating their last support point with zero mass."""
    n = len(rays)
    support = np.empty((n, 3), dtype=np.int64)
    masses = np.zeros((n, 3))
    for t, ray in enumerate(rays):
        k = len(ray.support)
        support[t, :k] = ray.support
        support[t, k:] = ray.support[-1]
        masses[t, :k] = ray.masses
    return support, masses


def _scan_vars(
    support: np.ndarray, masses: np.ndarray, alpha: float
) -> np.ndarray:
    """Per-ray lower quantile, replicating the compensated cdf of the
    dense evaluation so scan and pointwise var never disagree."""
    threshold = alpha - CDF_TIE_TOL
    m0, m1 = masses[:, 0], masses[:, 1]
    t = m0 + m1
    comp = np.where(
        np.abs(m0) >= np.abs(m1), (m0 - t) + m1, (m1 - t) + m0
    )
    cdf2 = t + comp
    return np.where(
        m0 >= threshold,
        support[:, 0],
        np.where(cdf2 >= threshold, support[:, 1], support[:, 2]),
    )


def _lex_smallest(rays: Sequence[RayDensity], where: np.ndarray) -> RayDensity:
    return min((rays[int(t)] for t in np.flatnonzero(where)),
               key=lambda ray: ray.support)


def _check_rays(rays: Sequence[RayDensity]) -> None:
    if len(rays) == 0:
        raise EmptyRaySet("risk scan over an empty ray collection")
    d = rays[0].d
    if any(ray.d != d for ray in rays):
        raise InvalidSpec("rays mix different dimensions")


def var_bounds_scan(rays: Sequence[RayDensity], alpha: float) -> RiskBounds:
    """Exact VaR extrema over ``rays``.

    Ties among attaining rays resolve to the lexicographically smallest
    support, independent of the input order.
    """
    alpha = _check_alpha(alpha)
    _check_rays(rays)
    support, masses = _ray_arrays(rays)
    values = _scan_vars(support, masses, alpha)
    lo = int(values.min())
    hi = int(values.max())
    return RiskBounds(
        alpha=alpha,
        var_min=lo,
        var_max=hi,
        es_min=None,
        es_max=None,
        argmin_ray=_lex_smallest(rays, values == lo).support,
        argmax_ray=_lex_smallest(rays, values == hi).support,
    )


def _floor_strict(x: float) -> int:
    """Largest integer strictly below ``x``, with an epsilon guard so a
    value within 1e-9 of an integer counts as that integer."""
    f = math.floor(x)
    if x - f <= _INDEX_TOL:
        return int(f) - 1
    return int(f)


def _ceil_guarded(x: float) -> int:
    """Smallest integer at or above ``x``, treating a value within 1e-9
    above an integer as that integer."""
    f = math.floor(x)
    if x - f <= _INDEX_TOL:
        return int(f)
    return int(f) + 1


def var_bounds_mean_closed_form(
    spec: ClassSpec, alpha: float
) -> tuple[int, int]:
    """Closed-form VaR extrema over the mean-constrained class.

    With ``j1p = (p - (1 - alpha)) * d / alpha``, the pivot index below
    which a two-point ray can still place cdf ``alpha`` at its lower
    support point:

    - ``j1p <= 0``: minimum 0; maximum is the largest integer strictly
      below ``pd / (1 - alpha)``. This includes the boundary
      ``p = 1 - alpha`` exactly, where the ray on ``{0, d}`` carries cdf
      exactly ``alpha`` at zero and quantile ties resolve downward.
    - ``0 < j1p <= j1M``: minimum ``ceil(j1p)``; maximum ``d``.
    - ``j1p > j1M``: minimum ``j1M + 1`` (the integer mean itself when
      there is one, attained by the point ray); maximum ``d``.
    """
    if spec.rho is not None:
        raise InvalidSpec(
            "the closed form covers the mean-constrained class; "
            "scan enumerated rays for a correlation target"
        )
    alpha = _check_alpha(alpha)
    pd = spec.mean_count
    pivot = (spec.p - (1.0 - alpha)) * spec.d / alpha
    if pivot <= _INDEX_TOL:
        return 0, _floor_strict(pd / (1.0 - alpha))
    if pivot <= spec.max_lower_index + _INDEX_TOL:
        return _ceil_guarded(pivot), spec.d
    return spec.max_lower_index + 1, spec.d


def _scan_es(
    support: np.ndarray, masses: np.ndarray, values: np.ndarray
) -> np.ndarray:
    tail = support >= values[:, None]
    num = np.sum(support * masses * tail, axis=1)
    den = np.sum(masses * tail, axis=1)
    return num / den


def es_bounds_scan(
    rays: Sequence[RayDensity], alpha: float
) -> tuple[float, float]:
    """Expected-shortfall extrema over ``rays`` (the ray envelope).

    These reproduce the bundled reference tail tables; they are not claimed
    sharp over the whole class (see :func:`es_envelope` for the proved
    class-wide bound).
    """
    alpha = _check_alpha(alpha)
    _check_rays(rays)
    support, masses = _ray_arrays(rays)
    values = _scan_vars(support, masses, alpha)
    es = _scan_es(support, masses, values)
    return float(es.min()), float(es.max())


def risk_bounds(rays: Sequence[RayDensity], alpha: float) -> RiskBounds:
    """One-pass VaR and ES scan bundled into a :class:`RiskBounds`."""
    alpha = _check_alpha(alpha)
    _check_rays(rays)
    support, masses = _ray_arrays(rays)
    values = _scan_vars(support, masses, alpha)
    es = _scan_es(support, masses, values)
    lo = int(values.min())
    hi = int(values.max())
    return RiskBounds(
        alpha=alpha,
        var_min=lo,
        var_max=hi,
        es_min=float(es.min()),
        es_max=float(es.max()),
        argmin_ray=_lex_smallest(rays, values == lo).support,
        argmax_ray=_lex_smallest(rays, values == hi).support,
    )


def es_envelope(
    source: Union[ClassSpec, Sequence[RayDensity]], alpha: float
) -> EsEnvelope:
    """Proved class-wide expected-shortfall envelope ``[min VaR, d]``.

    ``source`` is either a ClassSpec (mean-only specs use the closed
    form; correlation specs enumerate their rays) or an already
    enumerated ray sequence. The upper bound ``d`` is attained by the
    ray on ``{0, d}`` exactly when ``1 - p <= alpha``.
    """
    alpha = _check_alpha(alpha)
    if isinstance(source, ClassSpec):
        p = source.p
        d = source.d
        if source.rho is None:
            lower = float(var_bounds_mean_closed_form(source, alpha)[0])
        else:
            rays = enumerate_corr_rays(source)
            lower = float(var_bounds_scan(rays, alpha).var_min)
    else:
        _check_rays(source)
        d = source[0].d
        p = source[0].class_tag.p
        lower = float(var_bounds_scan(source, alpha).var_min)
    return EsEnvelope(lower, float(d), 1.0 - p <= alpha)
