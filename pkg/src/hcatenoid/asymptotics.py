"""Behavior at infinity of integrated profile branches.

The quantity u(x) = x |f'(x)| is strictly decreasing along a branch whenever
the prescription is negative, and its limit decides the growth: a positive
limit c0 forces the height to grow like c0 * log(x), while a fast-decaying
slope gives a bounded end.  Finite integration cannot observe the limit, so
the classifier applies explicit cutoffs and reports ``Inconclusive`` when
neither regime is established.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchRangeError, PreconditionError
from .prescribed import PowerLaw, Scaled

VERDICT_UNBOUNDED = "Unbounded"
VERDICT_BOUNDED = "Bounded"
VERDICT_INCONCLUSIVE = "Inconclusive"

#: classifier cutoffs (see classify_end)
C0_MIN = 1e-4
STABILITY_TOL = 0.01
MONOTONE_SLACK = 1e-12

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class EndClassification:
    branch: str
    verdict: str
    c0: float                # None unless Unbounded
    checkpoints: tuple       # per-decade (x, u) pairs
    stability: float         # relative spread of u over the last two decades
    height_tail: float       # height gained over the last integrated decade
    monotone_ok: bool        # u nonincreasing at every dense checkpoint
    thresholds: dict


@dataclass(frozen=True)
class GrowthFit:
    c0: float
    remainder: tuple         # (x, u - c0) samples
    intercept: float         # fitted constant of z ~ c0 log(x/r0) + intercept
    fit_residual: float
    window: tuple            # radial window of the fit


@dataclass(frozen=True)
class TailIntegral:
    value: float             # integral of |f'|^p over the integrated range
    tail_estimate: float     # extrapolated contribution beyond the range
    convergent: bool
    p: float


@dataclass(frozen=True)
class EnvelopeReport:
    radii: np.ndarray
    lower: np.ndarray        # exp(-I)
    normalized: np.ndarray   # x sin(theta) / (x1 sin(theta1))
    upper: np.ndarray        # exp(-I/2)
    lower_violation: float   # max(lower - normalized), <= 0 when the bound holds
    upper_violation: float   # max(normalized - upper), <= 0 when the bound holds


def _checkpoints_up_to(branch_obj, up_to):
    cp = branch_obj.checkpoints()
    x = cp["x"]
    if up_to is not None:
        mask = x <= up_to * (1.0 + 1e-12)
        return {k: v[mask] for k, v in cp.items()}
    return cp


def classify_end(cat, branch, up_to=None, c0_min=C0_MIN,
                 stability_tol=STABILITY_TOL, tail_tol=None):
    """Classify one end as Unbounded / Bounded / Inconclusive.

    Requires the branch integrated to at least 1e4 times the necksize.
    Unbounded: u stabilizes above ``c0_min`` with relative spread at most
    ``stability_tol`` over the last two decades.  Bounded: the power-law
    extrapolated tail of f' beyond the integrated range and the height gain
    over the last decade are both below ``tail_tol`` (default 1e-3 * r0).
    Anything else is Inconclusive.
    """
    b = cat.branch(branch)
    if tail_tol is None:
        tail_tol = 1e-3 * b.necksize
    cp = _checkpoints_up_to(b, up_to)
    x = cp["x"]
    if x.size < 2 or x[-1] < 1e4 * b.necksize * (1.0 - 1e-9):
        raise BranchRangeError(
            f"branch too short: integrated to x={b.x_end!r}, "
            f"need at least {1e4 * b.necksize!r}")
    u = cp["u"]
    z = cp["z"]
    x_top = x[-1]
    monotone_ok = bool(np.all(np.diff(u) <= MONOTONE_SLACK))
    win2 = x >= x_top / 100.0
    mean2 = float(np.mean(u[win2]))
    if mean2 != 0.0:
        stability = float((np.max(u[win2]) - np.min(u[win2])) / abs(mean2))
    else:
        stability = 0.0
    win1 = x >= x_top / 10.0
    u_final = float(np.mean(u[win1]))
    height_tail = float(abs(z[-1] - z[np.searchsorted(x, x_top / 10.0)]))

    verdict = VERDICT_INCONCLUSIVE
    c0 = None
    if u_final > c0_min and stability <= stability_tol:
        verdict = VERDICT_UNBOUNDED
        c0 = u_final
    else:
        tail = _slope_tail_estimate(x[win1], np.abs(cp["slope"][win1]))
        # u is nonincreasing whenever the prescription is negative, so a
        # collapsed slope weight gains at most u*ln(10) height per further
        # decade: below the floor that is negligible at any float radius
        decayed = tail < tail_tol or u_final < 1e-7 * b.necksize
        if decayed and height_tail < tail_tol:
            verdict = VERDICT_BOUNDED

    decades = _decade_marks(x, u, b.necksize, cat.config.dense_spacing)
    return EndClassification(
        branch=branch,
        verdict=verdict,
        c0=c0,
        checkpoints=decades,
        stability=stability,
        height_tail=height_tail,
        monotone_ok=monotone_ok,
        thresholds={"c0_min": c0_min, "stability_tol": stability_tol,
                    "tail_tol": tail_tol, "monotone_slack": MONOTONE_SLACK},
    )


def _decade_marks(x, u, neck, per_decade):
    marks = []
    for k in range(per_decade - 1, x.size, per_decade):
        marks.append((float(x[k]), float(u[k])))
    if not marks or marks[-1][0] != float(x[-1]):
        marks.append((float(x[-1]), float(u[-1])))
    return tuple(marks)


def _slope_tail_estimate(xs, slopes):
    """Extrapolated integral of f' beyond the last radius via a power-law fit."""
    positive = slopes > 1e-300
    if not np.any(positive):
        return 0.0
    xs, slopes = xs[positive], slopes[positive]
    if xs.size < 4:
        return math.inf
    p_hat = -np.polyfit(np.log(xs), np.log(slopes), 1)[0]
    if p_hat <= 1.0 + 1e-9:
        return math.inf
    return float(slopes[-1] * xs[-1] / (p_hat - 1.0))


def estimate_c0(cat, branch, up_to=None):
    """Logarithmic growth fit of an unbounded end.

    c0 is the mean of u over the final integrated decade; the height is then
    fit as |z| ~ c0 log(x / r0) + intercept over the last two decades and the
    maximum absolute deviation is reported.
    """
    verdict = classify_end(cat, branch, up_to=up_to)
    if verdict.verdict != VERDICT_UNBOUNDED:
        raise PreconditionError(
            f"growth fit needs an Unbounded end, classification was {verdict.verdict}")
    b = cat.branch(branch)
    cp = _checkpoints_up_to(b, up_to)
    x, u, z = cp["x"], cp["u"], np.abs(cp["z"])
    c0 = verdict.c0
    win = x >= x[-1] / 100.0
    logs = np.log(x[win] / b.necksize)
    intercept = float(np.mean(z[win] - c0 * logs))
    resid = float(np.max(np.abs(z[win] - c0 * logs - intercept)))
    remainder = tuple((float(xx), float(uu - c0)) for xx, uu in zip(x, u))
    return GrowthFit(c0=c0, remainder=remainder, intercept=intercept,
                     fit_residual=resid, window=(float(x[win][0]), float(x[-1])))


def minimal_bound_margins(cat, branch="upper"):
    """Margins of the minimal-catenoid slope bound r0/sqrt(x^2-r0^2) - |f'|.

    For prescriptions negative on (-1, 1) every margin is positive; the zero
    prescription attains the bound identically.
    """
    b = cat.branch(branch)
    cp = b.checkpoints()
    x = cp["x"]
    r0 = b.necksize
    bound = r0 / np.sqrt((x - r0) * (x + r0))
    return x, bound - np.abs(cp["slope"])


def _slope_power_integral(cat, branch, p, radii):
    """Cumulative integral of |f'(t)|^p from radii[0] to each entry of radii."""
    b = cat.branch(branch)
    total = 0.0
    out = [0.0]
    for lo, hi in zip(radii[:-1], radii[1:]):
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        acc = 0.0
        for node, weight in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            t = mid + half * node
            acc += weight * abs(b.slope_at(float(t))) ** p
        total += acc * half
        out.append(total)
    return np.asarray(out)


def tail_integral(cat, branch, p, tail_tol=None):
    """Integral of |f'|^p over the integrated range plus a tail extrapolation.

    The lower limit is the first dense checkpoint: at the waist the slope
    diverges and the integrand is not integrable for p >= 2.  The
    ``convergent`` flag concerns the behavior at infinity and is never set
    for p <= 1 (for a slope decaying like c0/x the tail integral diverges).
    """
    if not p > 0.0:
        raise ValueError("p must be positive")
    b = cat.branch(branch)
    if tail_tol is None:
        tail_tol = 1e-3 * b.necksize
    cp = b.checkpoints()
    x = cp["x"]
    if x.size < 8:
        raise BranchRangeError("branch too short for a tail integral")
    value = float(_slope_power_integral(cat, branch, p, x)[-1])
    win = x >= x[-1] / 10.0
    slopes = np.abs(cp["slope"][win]) ** p
    tail = _slope_tail_estimate(x[win], slopes) if np.any(slopes > 0) else 0.0
    convergent = bool(p > 1.0 and tail < tail_tol)
    return TailIntegral(value=value, tail_estimate=tail, convergent=convergent, p=p)


def _power_law_exponent(H):
    if isinstance(H, PowerLaw):
        return H.alpha
    if isinstance(H, Scaled):
        return _power_law_exponent(H.base)
    return None


def growth_envelope(cat, alpha=None, branch="upper"):
    """Exponential envelope of the normalized slope weight x sin(theta).

    Normalizing at the first dense checkpoint x1, compares
    m(x) = x sin(theta(x)) / (x1 sin(theta(x1))) against exp(-I(x)) and
    exp(-I(x)/2) with I(x) the integral of f'^(2 alpha - 1) from x1; the
    violation fields report by how much each bound fails (nonpositive when
    it holds).
    """
    if alpha is None:
        alpha = _power_law_exponent(cat.prescription)
        if alpha is None:
            raise ValueError("alpha is required for non-power-law prescriptions")
    b = cat.branch(branch)
    cp = b.checkpoints()
    x = cp["x"]
    weight = x * np.sin(cp["theta"])
    normalized = weight / weight[0]
    integral = _slope_power_integral(cat, branch, 2.0 * alpha - 1.0, x)
    lower = np.exp(-integral)
    upper = np.exp(-0.5 * integral)
    return EnvelopeReport(
        radii=x,
        lower=lower,
        normalized=normalized,
        upper=upper,
        lower_violation=float(np.max(lower - normalized)),
        upper_violation=float(np.max(normalized - upper)),
    )


def classification_to_dict(ec):
    """JSON-ready view of an EndClassification."""
    return {
        "branch": ec.branch,
        "verdict": ec.verdict,
        "c0": ec.c0,
        "checkpoints": [[x, u] for x, u in ec.checkpoints],
        "stability": ec.stability,
        "height_tail": ec.height_tail,
        "monotone_ok": ec.monotone_ok,
        "thresholds": dict(ec.thresholds),
    }
