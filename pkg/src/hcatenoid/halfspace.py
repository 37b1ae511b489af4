"""Half-space exclusion certificates for prescriptions on the sphere.

A properly immersed nonplanar surface whose prescription dominates a
one-dimensional minorant -c (1-y^2)^alpha (alpha > 1) on a closed
hemisphere cannot lie in the half-space on the corresponding side: north
hemisphere hypotheses exclude lower half-spaces, south hypotheses exclude
upper ones.  The certifier verifies the domination on a finite spherical
grid and the nonzero limit constant of the minorant, and emits a
machine-readable certificate.  A certificate is grid-verified evidence,
not a proof, and an empty exclusion set only means the tool could not
verify the hypotheses.
"""

import math
from dataclasses import dataclass

import numpy as np

from .prescribed import PrescribedFunction, limit_ratio, power_law, scaled

TOOL_VERSION = "0.1.0"
GRID_SEED = "fibonacci-golden-angle-v1"
MARGIN_TOL = 1e-10

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
_POLAR_LADDER_K = range(2, 13)
_RING_POINTS = 24


class SphereFunction:
    """A prescription on the unit sphere, axisymmetric or general.

    Axisymmetric functions wrap a one-dimensional prescription composed
    with the height coordinate; general functions evaluate a callable on
    (N, 3) arrays of unit vectors over grids of the stored resolution.
    """

    def __init__(self, kind, profile=None, fn=None, resolution=4096):
        self.kind = kind
        self.profile = profile
        self.fn = fn
        self.resolution = int(resolution)

    @classmethod
    def axisymmetric(cls, profile, resolution=4096):
        if not isinstance(profile, PrescribedFunction):
            raise TypeError("profile must be a PrescribedFunction")
        return cls("axisymmetric", profile=profile, resolution=resolution)

    @classmethod
    def from_callable(cls, fn, resolution=4096):
        return cls("general", fn=fn, resolution=resolution)

    def value_at(self, points):
        points = np.asarray(points, dtype=float)
        if self.kind == "axisymmetric":
            return np.asarray(self.profile.value(np.clip(points[:, 2], -1.0, 1.0)),
                              dtype=float)
        return np.asarray(self.fn(points), dtype=float)

    def describe(self):
        if self.kind == "axisymmetric":
            return f"axisymmetric:{self.profile.describe()}"
        return f"general:resolution={self.resolution}"


def hemisphere_grid(resolution, endpoint):
    """Deterministic verification grid on a closed hemisphere.

    Golden-angle spiral nodes, an equator ring, rings densifying toward the
    pole along heights 1 - 10^-k, and the pole itself.
    """
    if endpoint not in (1, -1):
        raise ValueError("endpoint must be +1 or -1")
    n = int(resolution)
    i = np.arange(n, dtype=float)
    z = (i + 0.5) / n
    rho = np.sqrt(1.0 - z * z)
    phi = i * _GOLDEN_ANGLE
    pts = [np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])]
    ring_phi = 2.0 * math.pi * np.arange(_RING_POINTS) / _RING_POINTS
    pts.append(np.column_stack([np.cos(ring_phi), np.sin(ring_phi),
                                np.zeros(_RING_POINTS)]))
    for k in _POLAR_LADDER_K:
        t = 10.0 ** (-k)
        zk = 1.0 - t
        rk = math.sqrt(t * (2.0 - t))
        pts.append(np.column_stack([rk * np.cos(ring_phi), rk * np.sin(ring_phi),
                                    np.full(_RING_POINTS, zk)]))
    pts.append(np.array([[0.0, 0.0, 1.0]]))
    grid = np.vstack(pts)
    if endpoint == -1:
        grid = grid * np.array([1.0, 1.0, -1.0])
    return grid


@dataclass(frozen=True)
class Minorant:
    """F(y) = -c (1 - y^2)^alpha dominating the prescription on a hemisphere."""

    c: float
    alpha: float
    endpoint: int
    margin: float            # min of H - F over the verification grid

    def as_prescription(self):
        return scaled(power_law(self.alpha), self.c)


@dataclass(frozen=True)
class MinorantFit:
    ok: bool
    minorant: object         # Minorant or None
    alpha_hat: float         # estimated vanishing order of the axial profile
    reason: str
    location: tuple          # offending point, when relevant


@dataclass(frozen=True)
class LimitConstant:
    value: float
    converged: bool


@dataclass(frozen=True)
class HalfSpaceCertificate:
    prescription: str
    excluded: tuple          # subset of ("lower", "upper")
    minorant_north: object
    minorant_south: object
    limit_constants: dict    # {"C1": LimitConstant or None, "C2": ...}
    grid_resolution: int
    verdict_notes: tuple
    assumptions: tuple
    version: str = TOOL_VERSION
    grid_seed: str = GRID_SEED


_ASSUMPTIONS = (
    "the prescription is C1 on the whole sphere (not checked numerically)",
    "conclusions apply to properly immersed, connected, nonplanar surfaces",
    "hypotheses are verified on a finite grid, not proved",
)


def minorant_margin(Hs, minorant, resolution=None):
    """min over the hemisphere grid of H(x) + c (1 - y^2)^alpha."""
    res = resolution or Hs.resolution
    grid = hemisphere_grid(res, minorant.endpoint)
    vals = Hs.value_at(grid)
    y = grid[:, 2]
    q = (1.0 - y) * (1.0 + y)
    return float(np.min(vals + minorant.c * q ** minorant.alpha))


def _axial_vanishing_order(Hs, endpoint, ks=range(2, 9)):
    """Power-law order of min_{<x,e3>=y} H along rings approaching the pole."""
    ring_phi = 2.0 * math.pi * np.arange(_RING_POINTS) / _RING_POINTS
    logq, logh = [], []
    for k in ks:
        t = 10.0 ** (-k)
        y = endpoint * (1.0 - t)
        rk = math.sqrt(t * (2.0 - t))
        ring = np.column_stack([rk * np.cos(ring_phi), rk * np.sin(ring_phi),
                                np.full(_RING_POINTS, y)])
        worst = float(np.min(Hs.value_at(ring)))
        if worst >= 0.0:
            return None, (0.0, 0.0, float(y))
        logq.append(math.log(t) + math.log(2.0 - t))
        logh.append(math.log(-worst))
    slope = float(np.polyfit(logq, logh, 1)[0])
    resid = float(np.max(np.abs(np.polyval(np.polyfit(logq, logh, 1), logq)
                                - np.asarray(logh))))
    return (slope, resid), None


def _snap_alpha(alpha_hat, resid):
    """Prefer the coarsest round exponent compatible with the fit."""
    slack = max(1e-6, 2.0 * resid)
    for digits in (0, 1, 2, 3, 4):
        a = round(alpha_hat, digits)
        if 1.0 < a <= alpha_hat + slack:
            return a
    return alpha_hat if alpha_hat > 1.0 else None


def fit_minorant(Hs, endpoint, resolution=None):
    """Fit the tightest power-law minorant dominated by H on the hemisphere.

    Estimates the vanishing order of the axial profile at the pole, snaps
    the exponent to the largest compatible round value above 1, and takes
    the smallest amplitude whose margin is nonnegative, evaluated on both
    the certification grid and its doubled-resolution refinement so the
    certificate re-verifies.  Fails when the vanishing order is at most 1
    or the prescription is nonnegative away from the pole.
    """
    res = resolution or Hs.resolution
    grid = hemisphere_grid(res, endpoint)
    fine = hemisphere_grid(2 * res, endpoint)
    everything = np.vstack([grid, fine])
    vals = Hs.value_at(everything)
    y = everything[:, 2]
    open_hemisphere = np.abs(y) < 1.0 - 1e-15
    bad = open_hemisphere & (vals >= 0.0)
    if np.any(bad):
        loc = tuple(float(v) for v in everything[np.argmax(bad)])
        return MinorantFit(False, None, math.nan,
                           "prescription is nonnegative on the open hemisphere", loc)
    pole = np.array([[0.0, 0.0, float(endpoint)]])
    pole_val = float(Hs.value_at(pole)[0])
    if pole_val < -1e-12:
        return MinorantFit(False, None, math.nan,
                           "prescription does not vanish at the pole",
                           (0.0, 0.0, float(endpoint)))
    fit, bad_ring = _axial_vanishing_order(Hs, endpoint)
    if fit is None:
        return MinorantFit(False, None, math.nan,
                           "prescription is nonnegative near the pole", bad_ring)
    alpha_hat, resid = fit
    alpha = _snap_alpha(alpha_hat, resid)
    if alpha is None:
        return MinorantFit(False, None, alpha_hat,
                           f"axial vanishing order {alpha_hat!r} is not above 1", None)
    q = (1.0 - y) * (1.0 + y)
    qa = q ** alpha
    usable = qa > 1e-280
    ratios = -vals[usable] / qa[usable]
    c = float(np.max(ratios))
    if not (c > 0.0 and math.isfinite(c)):
        return MinorantFit(False, None, alpha_hat,
                           "no positive finite amplitude dominates", None)
    mask_cert = np.arange(everything.shape[0]) < grid.shape[0]
    margin = float(np.min(vals[mask_cert] + c * qa[mask_cert]))
    return MinorantFit(True, Minorant(c=c, alpha=alpha, endpoint=endpoint,
                                      margin=margin),
                       alpha_hat, "", None)


def _limit_constant(minorant):
    """Limit of F(y) / (-(1-y^2)^alpha) at the pole, via the ratio ladder."""
    rep = limit_ratio(minorant.as_prescription(), power_law(minorant.alpha),
                      minorant.endpoint)
    return LimitConstant(value=rep.ratio_limit, converged=rep.converged)


def certify(Hs, resolution=None, minorant_north=None, minorant_south=None):
    """Emit a half-space exclusion certificate for a sphere prescription.

    Each pole is handled independently: obtain a minorant (fitted unless
    supplied), verify hemisphere domination on the grid, and verify the
    nonzero finite limit constant of the minorant against the reference
    power-law family.  An empty exclusion set means the hypotheses could
    not be verified by this tool, never that a half-space surface exists.
    """
    res = resolution or Hs.resolution
    notes = []
    minorants = {}
    limits = {"C1": None, "C2": None}
    excluded = []
    for endpoint, pole, half_space, limit_key in (
            (1, "north", "lower", "C1"), (-1, "south", "upper", "C2")):
        supplied = minorant_north if endpoint == 1 else minorant_south
        if supplied is not None:
            margin = minorant_margin(Hs, supplied, res)
            fitted = Minorant(c=supplied.c, alpha=supplied.alpha,
                              endpoint=endpoint, margin=margin)
            if supplied.alpha <= 1.0:
                notes.append(f"{pole}: supplied minorant exponent not above 1")
                continue
        else:
            result = fit_minorant(Hs, endpoint, res)
            if not result.ok:
                notes.append(f"{pole}: {result.reason}")
                continue
            fitted = result.minorant
        limit = _limit_constant(fitted)
        limits[limit_key] = limit
        minorants[pole] = fitted
        if fitted.margin < 0.0:
            notes.append(f"{pole}: domination margin negative ({fitted.margin!r})")
            continue
        if not limit.converged:
            notes.append(f"{pole}: limit constant did not verify as nonzero finite")
            continue
        excluded.append(half_space)
        notes.append(f"{pole}: verified, excludes {half_space} half-spaces")
    return HalfSpaceCertificate(
        prescription=Hs.describe(),
        excluded=tuple(excluded),
        minorant_north=minorants.get("north"),
        minorant_south=minorants.get("south"),
        limit_constants=limits,
        grid_resolution=res,
        verdict_notes=tuple(notes),
        assumptions=_ASSUMPTIONS,
    )


def verify_certificate(cert, Hs, factor=2, tol_margin=MARGIN_TOL):
    """Re-verify every emitted exclusion on a grid of ``factor`` times the
    resolution; margins must stay above ``-tol_margin``."""
    checks = []
    for half_space, minorant in (("lower", cert.minorant_north),
                                 ("upper", cert.minorant_south)):
        if half_space in cert.excluded:
            margin = minorant_margin(Hs, minorant,
                                     factor * cert.grid_resolution)
            checks.append((half_space, margin, margin >= -tol_margin))
    return all(ok for _, _, ok in checks), tuple(checks)


def _minorant_dict(m):
    if m is None:
        return None
    return {"c": m.c, "alpha": m.alpha, "endpoint": m.endpoint, "margin": m.margin}


def certificate_to_dict(cert):
    """JSON-ready view of a certificate, deterministic field order."""
    return {
        "prescription": cert.prescription,
        "excluded": list(cert.excluded),
        "minorant_north": _minorant_dict(cert.minorant_north),
        "minorant_south": _minorant_dict(cert.minorant_south),
        "limit_constants": {
            key: (None if lc is None else
                  {"value": lc.value, "converged": lc.converged})
            for key, lc in cert.limit_constants.items()
        },
        "grid_resolution": cert.grid_resolution,
        "verdict_notes": list(cert.verdict_notes),
        "assumptions": list(cert.assumptions),
        "version": cert.version,
        "grid_seed": cert.grid_seed,
    }
