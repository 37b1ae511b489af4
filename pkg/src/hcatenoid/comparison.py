"""Executable comparison properties for pairs and families of surfaces.

Pointwise-ordered prescriptions produce ordered heights (larger prescription
above on the upper branch, below on the lower), and once the upper slopes
order at one radius the ordering persists outward.  These are checked on a
log-spaced radial grid; strict inequalities that collapse to within solver
precision are flagged as numerically indistinguishable rather than failed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .asymptotics import VERDICT_INCONCLUSIVE, classify_end
from .prescribed import limit_ratio
from .profile import IntegratorConfig, integrate_catenoid

COVER_TOL = 0.05


@dataclass(frozen=True)
class ComparisonReport:
    pair: tuple              # (describe(H), describe(F))
    r0: float
    grid: np.ndarray
    rows: np.ndarray         # columns x, h+, f+, h+', f+', h-, f-
    height_ok: bool
    derivative_ok: bool      # None when derivatives were not compared
    first_violation: tuple   # (x, which, magnitude) or None
    ties: tuple              # inequalities within solver precision
    lower_slope_ordering: str  # empirical reading of the mirrored ordering
    ordering_margin: float   # min of H - F on the hypothesis grid


def _require_ordering(H, F, grid_size=512):
    i = np.arange(grid_size)
    ys = np.cos(np.pi * (2 * i + 1) / (2 * grid_size))
    gap = np.asarray(H.value(ys), dtype=float) - np.asarray(F.value(ys), dtype=float)
    j = int(np.argmin(gap))
    if gap[j] <= 0.0:
        raise PreconditionError(
            f"hypothesis H > F fails at y={float(ys[j])!r} (H-F={float(gap[j])!r})")
    return float(gap[j])


def _radial_grid(r0, x_max, per_decade):
    lo = 1.001 * r0
    n = max(2, int(math.ceil(per_decade * math.log10(x_max / lo))) + 1)
    return np.geomspace(lo, x_max, n)


def _pair_report(H, F, r0, x_max=None, per_decade=64, config=None,
                 derivatives=False, x0=None):
    margin = _require_ordering(H, F)
    if x_max is None:
        x_max = 1e4 * r0
    cfg = config or IntegratorConfig(x_max=x_max)
    if cfg.resolved_x_max(r0) < x_max:
        raise ValueError("config x_max smaller than the comparison grid")
    cat_h = integrate_catenoid(H, r0, cfg)
    cat_f = integrate_catenoid(F, r0, cfg)
    grid = _radial_grid(r0, x_max, per_decade)
    grid = grid[grid <= min(cat_h.upper.x_end, cat_f.upper.x_end,
                            cat_h.lower.x_end, cat_f.lower.x_end) * (1 + 1e-12)]
    rows = np.empty((grid.size, 7))
    for i, x in enumerate(grid):
        x = float(x)
        hu = cat_h.upper.state_at(x)
        fu = cat_f.upper.state_at(x)
        hl = cat_h.lower.state_at(x)
        fl = cat_f.lower.state_at(x)
        rows[i] = (x, hu.z, fu.z, cat_h.upper.slope_at(x), cat_f.upper.slope_at(x),
                   hl.z, fl.z)

    tie_tol = 10.0 * (cfg.rel_tol * np.max(np.abs(rows[:, 1:3])) + cfg.abs_tol)
    ties = []
    first_violation = None
    height_ok = True
    # upper: h+ > f+;  lower: h- < f-
    for gap, which in ((rows[:, 1] - rows[:, 2], "upper height"),
                       (rows[:, 6] - rows[:, 5], "lower height")):
        bad = np.where(gap <= 0.0)[0]
        for j in bad:
            if abs(gap[j]) <= tie_tol:
                ties.append((float(rows[j, 0]), which, float(gap[j])))
            else:
                height_ok = False
                if first_violation is None:
                    first_violation = (float(rows[j, 0]), which, float(gap[j]))

    derivative_ok = None
    lower_reading = "not compared"
    if derivatives:
        if x0 is None:
            x0 = float(grid[0])
        dh0 = cat_h.upper.slope_at(x0)
        df0 = cat_f.upper.slope_at(x0)
        if not dh0 > df0:
            raise PreconditionError(
                f"upper slopes not ordered at x0={x0!r} (h'={dh0!r}, f'={df0!r})")
        past = rows[:, 0] > x0
        dgap = rows[past, 3] - rows[past, 4]
        derivative_ok = True
        for j in np.where(dgap <= 0.0)[0]:
            xj = float(rows[past, 0][j])
            if abs(dgap[j]) <= tie_tol:
                ties.append((xj, "upper slope", float(dgap[j])))
            else:
                derivative_ok = False
                if first_violation is None:
                    first_violation = (xj, "upper slope", float(dgap[j]))
        # mirrored lower-branch ordering, reported rather than asserted
        low = np.array([cat_h.lower.slope_at(float(x)) - cat_f.lower.slope_at(float(x))
                        for x in rows[past, 0]])
        if np.all(low < 0.0):
            lower_reading = "h-' < f-' at every grid radius past x0"
        else:
            xj = float(rows[past, 0][np.argmax(low >= 0.0)])
            lower_reading = f"h-' < f-' first fails at x={xj!r}"

    return ComparisonReport(
        pair=(H.describe(), F.describe()),
        r0=r0,
        grid=grid,
        rows=rows,
        height_ok=height_ok,
        derivative_ok=derivative_ok,
        first_violation=first_violation,
        ties=tuple(ties),
        lower_slope_ordering=lower_reading,
        ordering_margin=margin,
    )


def compare_heights(H, F, r0, x_max=None, per_decade=64, config=None):
    """Check h+ > f+ and h- < f- at every grid radius for H > F on (-1, 1)."""
    return _pair_report(H, F, r0, x_max=x_max, per_decade=per_decade, config=config)


def compare_derivatives(H, F, r0, x0=None, x_max=None, per_decade=64, config=None):
    """Check persistence of the upper slope ordering past x0 (H > F required).

    The mirrored lower-branch ordering is recorded in
    ``lower_slope_ordering`` as an empirical observation.
    """
    return _pair_report(H, F, r0, x_max=x_max, per_decade=per_decade,
                        config=config, derivatives=True, x0=x0)


@dataclass(frozen=True)
class NecksizeUniformity:
    prescription: str
    radii: tuple
    verdicts: dict           # branch -> tuple of verdicts, aligned with radii
    passed: bool
    inconclusive: tuple      # (r, branch) pairs excluded from the vote


def behavior_across_necksizes(H, r_list, x_max_factor=1e4, config=None):
    """Classify each necksize; verdicts must agree per branch.

    Inconclusive classifications are excluded from the agreement vote and
    reported.  A single necksize passes vacuously.
    """
    radii = tuple(float(r) for r in r_list)
    if not radii:
        raise ValueError("need at least one necksize")
    verdicts = {"upper": [], "lower": []}
    inconclusive = []
    for r in radii:
        cfg = config or IntegratorConfig(x_max=x_max_factor * r)
        cat = integrate_catenoid(H, r, cfg)
        for branch in ("upper", "lower"):
            v = classify_end(cat, branch).verdict
            verdicts[branch].append(v)
            if v == VERDICT_INCONCLUSIVE:
                inconclusive.append((r, branch))
    passed = True
    for branch in ("upper", "lower"):
        seen = {v for v in verdicts[branch] if v != VERDICT_INCONCLUSIVE}
        if len(seen) > 1:
            passed = False
    return NecksizeUniformity(
        prescription=H.describe(),
        radii=radii,
        verdicts={k: tuple(v) for k, v in verdicts.items()},
        passed=passed,
        inconclusive=tuple(inconclusive),
    )


@dataclass(frozen=True)
class TransferReport:
    endpoint: int
    ratio: object            # EquivalenceReport for (H, F)
    verdicts: tuple          # (verdict of H-side end, verdict of F-side end)
    passed: bool
    inconclusive: tuple


def equivalence_behavior(H, F, r0, endpoint=1, x_max_factor=1e4, config=None):
    """Matched ends of equivalent prescriptions must classify identically.

    Precondition: the ratio H/F has a nonzero finite limit at the endpoint
    (+1 matches the upper ends, -1 the lower ends).
    """
    ratio = limit_ratio(H, F, endpoint)
    if not ratio.converged:
        raise PreconditionError(
            f"prescriptions are not equivalent at y={endpoint:+d}: "
            f"ratio limit did not converge (last estimate {ratio.ratio_limit!r})")
    branch = "upper" if endpoint == 1 else "lower"
    cfg = config or IntegratorConfig(x_max=x_max_factor * r0)
    ec_h = classify_end(integrate_catenoid(H, r0, cfg), branch)
    ec_f = classify_end(integrate_catenoid(F, r0, cfg), branch)
    inconclusive = tuple(
        side for side, ec in (("H", ec_h), ("F", ec_f))
        if ec.verdict == VERDICT_INCONCLUSIVE)
    if inconclusive:
        passed = True          # nothing definite to contradict; reported
    else:
        passed = ec_h.verdict == ec_f.verdict
    return TransferReport(endpoint=endpoint, ratio=ratio,
                          verdicts=(ec_h.verdict, ec_f.verdict),
                          passed=passed, inconclusive=inconclusive)


@dataclass(frozen=True)
class CoverConvergence:
    window: tuple
    rows: tuple              # (necksize, sup of |height| over the window)
    passed: bool
    cover_tol: float


def double_cover_convergence(H, radii, window, per_decade=64, config=None,
                             cover_tol=COVER_TOL):
    """Shrinking necksizes flatten onto the plane over a fixed radial window.

    For each necksize the supremum of |height| over the window (both
    branches) is recorded; the sequence must be strictly decreasing and end
    below ``cover_tol`` times the window's outer radius.
    """
    x_lo, x_hi = float(window[0]), float(window[1])
    radii = tuple(float(r) for r in radii)
    if not x_hi > x_lo > 0.0:
        raise ValueError("window must satisfy 0 < lo < hi")
    if x_lo <= max(radii):
        raise ValueError(
            f"window intersects a waist disk: lo={x_lo!r} <= max necksize {max(radii)!r}")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("necksizes must be strictly decreasing")
    n = max(2, int(math.ceil(per_decade * math.log10(x_hi / x_lo))) + 1)
    grid = np.geomspace(x_lo, x_hi, n)
    rows = []
    for r in radii:
        cfg = config or IntegratorConfig(x_max=x_hi)
        cat = integrate_catenoid(H, r, cfg)
        sup = 0.0
        for branch in ("upper", "lower"):
            b = cat.branch(branch)
            sup = max(sup, max(abs(b.state_at(float(x)).z) for x in grid))
        rows.append((r, sup))
    sups = [s for _, s in rows]
    passed = all(b < a for a, b in zip(sups, sups[1:])) and sups[-1] < cover_tol * x_hi
    return CoverConvergence(window=(x_lo, x_hi), rows=tuple(rows),
                            passed=bool(passed), cover_tol=cover_tol)


def comparison_to_dict(report):
    """JSON-ready view of a ComparisonReport."""
    return {
        "pair": list(report.pair),
        "r0": report.r0,
        "height_ok": report.height_ok,
        "derivative_ok": report.derivative_ok,
        "first_violation": list(report.first_violation) if report.first_violation else None,
        "ties": [list(t) for t in report.ties],
        "lower_slope_ordering": report.lower_slope_ordering,
        "ordering_margin": report.ordering_margin,
        "grid_size": int(report.grid.size),
        "rows": [[float(v) for v in row] for row in report.rows],
    }


def comparison_rows_csv(report, path):
    """CSV export of the comparison table."""
    header = "x,h_plus,f_plus,dh_plus,df_plus,h_minus,f_minus"
    lines = [header]
    for row in report.rows:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return len(lines) - 1
