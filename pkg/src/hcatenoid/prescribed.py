"""One-dimensional prescriptions H on [-1, 1] and their endpoint analysis.

A prescription assigns the mean curvature of a rotational surface as a
function of the vertical component of its unit normal.  The admissible
class for catenoid-type annuli consists of functions that are negative on
the open interval and vanish at both endpoints; membership is checked on a
grid (`check_admissible`).  Endpoint behavior is compared through the limit
of ratios (`limit_ratio`) and through a power-law fit of the vanishing rate
(`vanishing_order`).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .expressions import parse_expression

#: tolerance for "vanishes at the endpoints"
TOL_END = 1e-9
#: threshold separating a nonzero limit constant from decay to zero
TOL_ZERO = 1e-6
#: agreement required between accelerated ratio estimates
LIMIT_REL_TOL = 1e-6

_DOMAIN_SLACK = 1e-9


def _check_domain(y):
    if isinstance(y, (float, int)):
        if abs(y) > 1.0 + _DOMAIN_SLACK:
            raise DomainError(f"argument {y!r} outside [-1, 1]")
        return min(1.0, max(-1.0, float(y)))
    arr = np.asarray(y, dtype=float)
    if np.any(np.abs(arr) > 1.0 + _DOMAIN_SLACK):
        bad = float(arr[np.abs(arr) > 1.0 + _DOMAIN_SLACK].flat[0])
        raise DomainError(f"argument {bad!r} outside [-1, 1]")
    return np.clip(arr, -1.0, 1.0)


class PrescribedFunction:
    """A prescription on [-1, 1] with derivative access.

    Subclasses implement ``_value`` and ``_derivative`` on the clipped
    argument; the public accessors validate the domain (values slightly
    outside [-1, 1] from floating-point round-off are clamped).
    """

    kind = "abstract"

    def value(self, y):
        return self._value(_check_domain(y))

    __call__ = value

    def derivative(self, y):
        return self._derivative(_check_domain(y))

    def _value(self, y):
        raise NotImplementedError

    def _derivative(self, y):
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class PowerLaw(PrescribedFunction):
    """H(y) = -(1 - y^2)^alpha with the exact analytic derivative."""

    kind = "power-law"

    def __init__(self, alpha):
        alpha = float(alpha)
        if not alpha > 0.0:
            raise ValueError(f"exponent must be positive, got {alpha!r}")
        self.alpha = alpha

    def _value(self, y):
        q = (1.0 - y) * (1.0 + y)
        return -(q ** self.alpha)

    def _derivative(self, y):
        # d/dy [-(1-y^2)^a] = 2 a y (1-y^2)^(a-1); unbounded at |y|=1 for a < 1
        q = (1.0 - y) * (1.0 + y)
        a = self.alpha
        if a == 1.0:
            return 2.0 * y
        with np.errstate(divide="ignore"):
            return 2.0 * a * y * q ** (a - 1.0)

    def describe(self):
        return f"powerlaw:alpha={self.alpha!r}"


class Polynomial(PrescribedFunction):
    """Polynomial in y, coefficients in increasing degree order."""

    kind = "polynomial-in-y"

    def __init__(self, coefficients):
        self.coefficients = tuple(float(c) for c in coefficients)
        if not self.coefficients:
            raise ValueError("at least one coefficient required")
        self._dcoef = tuple(i * c for i, c in enumerate(self.coefficients))[1:] or (0.0,)

    @staticmethod
    def _horner(coeffs, y):
        acc = coeffs[-1] * (y * 0.0 + 1.0) if isinstance(y, np.ndarray) else coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * y + c
        return acc

    def _value(self, y):
        return self._horner(self.coefficients, y)

    def _derivative(self, y):
        return self._horner(self._dcoef, y)

    def describe(self):
        return "poly:" + ",".join(repr(c) for c in self.coefficients)


class Scaled(PrescribedFunction):
    """factor * base(y), exact at every argument."""

    kind = "scaled"

    def __init__(self, base, factor):
        factor = float(factor)
        if factor == 0.0:
            raise ValueError("scale factor must be nonzero")
        if not isinstance(base, PrescribedFunction):
            raise TypeError("base must be a PrescribedFunction")
        self.base = base
        self.factor = factor

    def _value(self, y):
        return self.factor * self.base._value(y)

    def _derivative(self, y):
        return self.factor * self.base._derivative(y)

    def describe(self):
        return f"scale:{self.factor!r}:{self.base.describe()}"


class ExpressionFunction(PrescribedFunction):
    """Prescription defined by a parsed arithmetic expression in y."""

    kind = "parsed-expression"

    def __init__(self, text):
        self.text = " ".join(str(text).split())
        self.tree = parse_expression(self.text)
        self._dtree = self.tree.diff()

    def _value(self, y):
        return self.tree.eval(y)

    def _derivative(self, y):
        return self._dtree.eval(y)

    def describe(self):
        return f"expr:{self.text}"


class TableFunction(PrescribedFunction):
    """Monotone cubic interpolation of sampled values; no extrapolation."""

    kind = "sampled-table"

    def __init__(self, nodes, values):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 4:
            raise ValueError("need at least four sample nodes")
        if nodes.shape != values.shape:
            raise ValueError("nodes and values must have matching shape")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("sample nodes must be strictly increasing")
        if nodes[0] < -1.0 - 1e-12 or nodes[-1] > 1.0 + 1e-12:
            raise ValueError("sample nodes must lie within [-1, 1]")
        self.nodes = nodes
        self.values = values
        self._interp = PchipInterpolator(nodes, values, extrapolate=False)
        self._dinterp = self._interp.derivative()

    def _guard(self, y):
        lo, hi = self.nodes[0], self.nodes[-1]
        if np.any(np.asarray(y) < lo - 1e-12) or np.any(np.asarray(y) > hi + 1e-12):
            raise DomainError(
                f"query outside the tabulated range [{lo!r}, {hi!r}]; extrapolation is not allowed"
            )
        return np.clip(y, lo, hi)

    def _value(self, y):
        out = self._interp(self._guard(y))
        return float(out) if out.ndim == 0 else out

    def _derivative(self, y):
        out = self._dinterp(self._guard(y))
        return float(out) if out.ndim == 0 else out

    def describe(self):
        return f"table:{self.nodes.size}nodes[{self.nodes[0]!r},{self.nodes[-1]!r}]"


class _Reflected(PrescribedFunction):
    """base(-y); internal helper for lower-branch integration in upper form."""

    kind = "reflected"

    def __init__(self, base):
        self.base = base

    def _value(self, y):
        return self.base._value(-y)

    def _derivative(self, y):
        return -self.base._derivative(-y)

    def describe(self):
        return f"reflect:{self.base.describe()}"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def power_law(alpha):
    """The family H(y) = -(1 - y^2)^alpha, alpha > 0."""
    return PowerLaw(alpha)


def polynomial(coefficients):
    return Polynomial(coefficients)


def scaled(base, factor):
    return Scaled(base, factor)


def from_expression(text):
    fn = ExpressionFunction(text)
    probe = np.linspace(-1.0, 1.0, 257)
    with np.errstate(all="ignore"):
        vals = np.asarray(fn.value(probe), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = probe[~np.isfinite(vals)][0]
        raise ValueError(f"expression is not finite on [-1, 1] (e.g. at y={bad!r})")
    return fn


def from_table(nodes, values):
    return TableFunction(nodes, values)


def minimal():
    """The zero prescription (classical minimal surfaces)."""
    return Polynomial((0.0,))


# ---------------------------------------------------------------------------
# Class membership
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassMembership:
    """Grid verdict for admissibility: negative inside, vanishing at the ends."""

    is_member: bool
    interior_max: float
    endpoint_values: tuple
    grid_size: int


def check_admissible(H, grid_size=256, tol_end=TOL_END):
    """Check on a Chebyshev grid that H < 0 on (-1, 1) and H(+-1) = 0.

    Membership is "not falsified on the grid": a finite grid cannot certify
    sign conditions everywhere for arbitrary functions.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    i = np.arange(grid_size)
    nodes = np.cos(np.pi * (2 * i + 1) / (2 * grid_size))
    interior_max = float(np.max(H.value(nodes)))
    ends = (float(H.value(-1.0)), float(H.value(1.0)))
    member = interior_max < 0.0 and abs(ends[0]) <= tol_end and abs(ends[1]) <= tol_end
    return ClassMembership(member, interior_max, ends, grid_size)


# ---------------------------------------------------------------------------
# Limit behavior at the endpoints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceReport:
    """Numeric limit of H/F approaching an endpoint, with acceleration."""

    endpoint: int
    ratio_limit: float
    converged: bool
    samples: tuple          # (y, H(y)/F(y)) pairs actually used
    skipped: tuple          # y values where F vanished
    bounds: tuple           # (sup, inf) of F/H over the sampled window


def _aitken(seq):
    """Aitken delta-squared acceleration with guards for flat sequences."""
    out = []
    for r0, r1, r2 in zip(seq, seq[1:], seq[2:]):
        d2 = r2 - 2.0 * r1 + r0
        span = abs(r2 - r1) + abs(r1 - r0)
        if span <= 1e-14 * max(1.0, abs(r2)) or d2 == 0.0:
            out.append(r2)
        else:
            out.append(r2 - (r2 - r1) ** 2 / d2)
    return out


def limit_ratio(H, F, endpoint, rel_tol=LIMIT_REL_TOL, tol_zero=TOL_ZERO):
    """Estimate lim H(y)/F(y) as y approaches the endpoint (+1 or -1).

    Samples the geometric ladder y = sign * (1 - 10^-k), k = 2..10, and
    accelerates the ratio sequence.  ``converged`` requires the accelerated
    values to agree to ``rel_tol`` and the limit to be finite and nonzero.
    """
    if endpoint not in (1, -1):
        raise ValueError("endpoint must be +1 or -1")
    ks = np.arange(2, 11)
    ys = endpoint * (1.0 - 10.0 ** (-ks.astype(float)))
    samples, skipped, ratios = [], [], []
    bounds_hi, bounds_lo = -math.inf, math.inf
    for y in ys:
        hv = float(H.value(float(y)))
        fv = float(F.value(float(y)))
        if fv == 0.0:
            skipped.append(float(y))
            continue
        r = hv / fv
        samples.append((float(y), r))
        ratios.append(r)
        if hv != 0.0:
            bounds_hi = max(bounds_hi, fv / hv)
            bounds_lo = min(bounds_lo, fv / hv)
    if not ratios:
        raise ValueError("every sample was invalid: F vanishes along the whole ladder")
    acc = _aitken(ratios) if len(ratios) >= 3 else list(ratios)
    limit = acc[-1]
    converged = (
        len(acc) >= 2
        and math.isfinite(limit)
        and abs(acc[-1] - acc[-2]) <= rel_tol * max(abs(limit), tol_zero)
        and abs(limit) > tol_zero
    )
    return EquivalenceReport(
        endpoint=endpoint,
        ratio_limit=limit,
        converged=bool(converged),
        samples=tuple(samples),
        skipped=tuple(skipped),
        bounds=(bounds_hi, bounds_lo),
    )


@dataclass(frozen=True)
class PowerLawOrder:
    """Least-squares vanishing order of H at an endpoint."""

    endpoint: int
    alpha_hat: float
    fit_residual: float
    window: tuple
    converged: bool


def vanishing_order(H, endpoint, k_range=(2, 9), residual_tol=0.05):
    """Fit log(-H) against log(1 - y^2) on the ladder y = sign*(1 - 10^-k).

    Requires H < 0 at every sample.  ``converged`` is False for degenerate
    fits (large residual or nonpositive slope).
    """
    if endpoint not in (1, -1):
        raise ValueError("endpoint must be +1 or -1")
    ks = np.arange(*k_range)
    ts = 10.0 ** (-ks.astype(float))          # 1 - |y|
    ys = endpoint * (1.0 - ts)
    vals = np.array([float(H.value(float(y))) for y in ys])
    if np.any(vals >= 0.0):
        bad = float(ys[vals >= 0.0][0])
        raise ValueError(f"prescription is nonnegative at sample y={bad!r}")
    logq = np.log(ts) + np.log(2.0 - ts)      # log(1 - y^2) without cancellation
    logh = np.log(-vals)
    slope, intercept = np.polyfit(logq, logh, 1)
    resid = float(np.max(np.abs(logh - (slope * logq + intercept))))
    converged = resid <= residual_tol and slope > 0.0
    return PowerLawOrder(
        endpoint=endpoint,
        alpha_hat=float(slope),
        fit_residual=resid,
        window=tuple(float(y) for y in ys),
        converged=bool(converged),
    )
