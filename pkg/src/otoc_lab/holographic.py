"""Closed-form shock-wave model of a thermally regulated OTOC with timing errors.

Forward and backward evolutions last ``t + delta_1`` and ``t + delta_2``. In
the shot-averaged model each ``delta_i`` is ``+-eps t_w`` with probability 1/2.
Everything is evaluated in log space so large ``cosh`` arguments and large
null shifts neither overflow nor lose the small deficits ``1 - F``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

LOG_HALF = math.log(0.5)
LOG_QUARTER = math.log(0.25)


@dataclass(frozen=True)
class HolographicParams:
    beta: float = 2 * math.pi
    delta_op: float = 1.0
    g: float = 1e-5
    epsilon: float = 0.1

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.delta_op > 0:
            raise ValueError(f"operator dimension must be positive, got {self.delta_op}")
        if self.g < 0 or self.epsilon < 0:
            raise ValueError("g and epsilon must be non-negative")

    @property
    def rate(self) -> float:
        """Ideal growth rate ``2 pi / beta``."""
        return 2 * math.pi / self.beta


@dataclass(frozen=True)
class TimingErrors:
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.delta1) and math.isfinite(self.delta2)):
            raise ValueError("timing errors must be finite")


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def logcosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2 * x)) - math.log(2)


def _softplus(z):
    return np.logaddexp(0.0, z)


def _check_alpha(alpha) -> None:
    if np.any(np.asarray(alpha) < 0):
        raise ValueError("null shift alpha must be non-negative")


def log_null_shift(p: HolographicParams, t_w):
    return _log(p.g) + p.rate * np.asarray(t_w, dtype=float)


def null_shift(p: HolographicParams, t_w):
    """``alpha = G exp(2 pi t_w / beta)``."""
    return p.g * np.exp(p.rate * np.asarray(t_w, dtype=float))


def geodesic_distance_ren(tL, tR, alpha, beta: float):
    """Renormalized geodesic length (in AdS radii) between the two V insertions:
    ``2 log(cosh(pi (tL - tR)/beta) + (alpha/2) exp(-pi (tL + tR)/beta))``."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    _check_alpha(alpha)
    a = math.pi * (np.asarray(tL) - np.asarray(tR)) / beta
    b = math.pi * (np.asarray(tL) + np.asarray(tR)) / beta
    return 2 * np.logaddexp(logcosh(a), _log(np.asarray(alpha) / 2) - b)


def f_reg(te: TimingErrors, alpha, p: HolographicParams):
    """Geodesic approximation ``exp(-Delta d/l)`` to the regulated correlator."""
    d = geodesic_distance_ren(te.delta2, te.delta1, alpha, p.beta)
    return np.exp(-p.delta_op * d)


def ideal_f(p: HolographicParams, t_w):
    """``f_reg`` without timing errors, ``(1 + alpha/2)^(-2 Delta)``."""
    return np.exp(-2 * p.delta_op * _softplus(log_null_shift(p, t_w) + LOG_HALF))


def _x(p: HolographicParams, t_w):
    return p.rate * p.epsilon * np.asarray(t_w, dtype=float)


def log_shot_avg_a2(p: HolographicParams, t_w):
    return np.logaddexp(LOG_HALF, LOG_HALF - 2 * p.delta_op * logcosh(_x(p, t_w)))


def log_shot_avg_a1(p: HolographicParams, t_w, alpha):
    _check_alpha(alpha)
    return _log_a1(p, t_w, _log(np.asarray(alpha, dtype=float)))


def _log_a1(p: HolographicParams, t_w, log_alpha):
    x = _x(p, t_w)
    la = log_alpha + LOG_HALF
    two_d = 2 * p.delta_op
    terms = (
        LOG_QUARTER - two_d * _softplus(la - x),
        LOG_QUARTER - two_d * _softplus(la + x),
        LOG_HALF - two_d * np.logaddexp(logcosh(x), la),
    )
    return np.logaddexp(np.logaddexp(terms[0], terms[1]), terms[2])


def shot_avg_a2(p: HolographicParams, t_w):
    """Shot-averaged denominator ``1/2 + (1/2) cosh(2 pi eps t_w/beta)^(-2 Delta)``."""
    return np.exp(log_shot_avg_a2(p, t_w))


def shot_avg_a1(p: HolographicParams, t_w, alpha):
    """Shot-averaged numerator, exact in ``alpha``."""
    return np.exp(log_shot_avg_a1(p, t_w, alpha))


def shot_avg_a1_leading(p: HolographicParams, t_w, alpha):
    """Shot-averaged numerator to first order in ``alpha``."""
    c = np.cosh(_x(p, t_w))
    return shot_avg_a2(p, t_w) - 0.5 * p.delta_op * np.asarray(alpha) * (c ** (-(2 * p.delta_op + 1)) + c)


def renormalized_holographic(p: HolographicParams, t_w):
    """``A1bar / A2bar`` with ``alpha = null_shift(p, t_w)``."""
    return np.exp(_log_a1(p, t_w, log_null_shift(p, t_w)) - log_shot_avg_a2(p, t_w))


def renormalized_deficit(p: HolographicParams, t_w):
    """``1 - A1bar/A2bar`` without cancellation error."""
    return -np.expm1(_log_a1(p, t_w, log_null_shift(p, t_w)) - log_shot_avg_a2(p, t_w))


def ideal_deficit(p: HolographicParams, t_w):
    """``1 - (1 + alpha/2)^(-2 Delta)`` without cancellation error."""
    return -np.expm1(-2 * p.delta_op * _softplus(log_null_shift(p, t_w) + LOG_HALF))


def fit_deficit_exponent(t, deficit, window: tuple[float, float]) -> float:
    """Least-squares slope of ``log|deficit|`` against ``t`` over the points
    whose ``|deficit|`` lies inside ``window``."""
    lo, hi = window
    t = np.asarray(t, dtype=float)
    d = np.abs(np.asarray(deficit))
    sel = (d >= lo) & (d <= hi) & (d > 0)
    if np.count_nonzero(sel) < 5:
        raise ValueError(f"only {np.count_nonzero(sel)} points with deficit in [{lo}, {hi}]; need at least 5")
    return float(np.polyfit(t[sel], np.log(d[sel]), 1)[0])


def fit_growth_exponent(series: Iterable[tuple[float, complex]], window: tuple[float, float]) -> float:
    """Growth rate of ``|1 - value|`` fitted over the points inside ``window``."""
    pts = list(series)
    if not pts:
        raise ValueError("empty series")
    t, v = zip(*pts)
    return fit_deficit_exponent(t, 1 - np.asarray(v), window)


def holographic_series(p: HolographicParams, times) -> dict[str, np.ndarray]:
    """Ideal, unrenormalized (``A1bar``), denominator (``A2bar``) and renormalized curves."""
    t = np.asarray(times, dtype=float)
    a1 = np.exp(_log_a1(p, t, log_null_shift(p, t)))
    a2 = shot_avg_a2(p, t)
    return {
        "t": t,
        "ideal": ideal_f(p, t),
        "imperfect": a1,
        "denominator": a2,
        "renormalized": renormalized_holographic(p, t),
    }
