"""Profile integration for rotational surfaces with prescribed mean curvature.

The meridian of such a surface, parametrized by arc length s with tangent
angle theta, satisfies the regular system

    x' = cos(theta),   z' = sin(theta),   theta' = 2 H(cos theta) - sin(theta)/x,

with waist data (x, z, theta)(0) = (r0, 0, pi/2).  The graph parametrization
z = f(x) of the same curve is singular at the waist (f'(r0) is infinite),
which is why the tangent-angle system is integrated and the graph equation

    2 H(nu) = f''/(1+f'^2)^(3/2) + f'/(x sqrt(1+f'^2)),   nu = 1/sqrt(1+f'^2),

is kept as an independent residual oracle.  The lower branch is obtained by
integrating the same system for the reflected prescription y -> H(-y) and
mirroring the result; the sign conventions are validated by the oracle.

Far field: once x exceeds ``switch_factor * r0`` the integration continues
in the log-radius variable t = log(x/r0) with state (z, w, s), w = x f'(x).
Profiles vary on logarithmic scale at infinity, so this keeps both the step
count and the accumulated error per decade flat; w is also the quantity
whose limit is the logarithmic growth coefficient, so its dense output is
directly usable for classification.
"""

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45, OdeSolution
from scipy.optimize import brentq

from .errors import BranchRangeError, IntegrationError
from .prescribed import PrescribedFunction, Scaled, _Reflected

TERM_XMAX = "reached_xmax"
TERM_TURNING = "turning_point"
TERM_STEP_FAILURE = "step_failure"

_BRENTQ_RTOL = 8.9e-16


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and termination controls for the profile integration.

    ``x_max`` defaults to 1e6 times the necksize.  ``dense_spacing`` is the
    number of log-spaced output checkpoints per decade of radius.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    x_max: float = None
    max_steps: int = 200_000
    dense_spacing: int = 32
    switch_factor: float = 100.0
    far_max_step: float = 0.1

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.dense_spacing < 1:
            raise ValueError("dense_spacing must be at least 1")
        if self.switch_factor <= 1.0:
            raise ValueError("switch_factor must exceed 1")

    def resolved_x_max(self, r0):
        return 1e6 * r0 if self.x_max is None else float(self.x_max)


@dataclass(frozen=True)
class ProfileState:
    """Meridian state at one point: signed arc length, radius, height, angle."""

    s: float
    x: float
    z: float
    theta: float
    nu: float


@dataclass(frozen=True)
class CurvatureSample:
    """Principal curvatures and second-fundamental-form norm at one radius."""

    x: float
    kappa1: float
    kappa2: float
    sff_norm_sq: float
    nu: float


class _UpperForm:
    """One branch in upper form: theta in (0, pi/2], height increasing."""

    def __init__(self, H, r0, cfg, sol1, s_nodes, x_nodes, sol2, t_lo, t_hi,
                 x_end, termination, note):
        self.H = H
        self.r0 = r0
        self.cfg = cfg
        self.sol1 = sol1
        self.s_nodes = s_nodes      # phase-1 step boundaries (arc length)
        self.x_nodes = x_nodes      # radii at those boundaries, increasing
        self.sol2 = sol2            # far-field solution over t, or None
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.x_end = x_end
        self.termination = termination
        self.note = note
        self._radii = None

    def eval(self, x):
        """Return (s, z, theta, fprime) at radius x in [r0, x_end]."""
        if x <= self.r0:
            return 0.0, 0.0, 0.5 * math.pi, math.inf
        x = min(x, self.x_end)
        if self.sol2 is not None:
            t = math.log(x / self.r0)
            if t >= self.t_lo - 1e-13:
                t = min(max(t, self.t_lo), self.t_hi)
                z, w, s = self.sol2(t)
                fp = w / x
                return float(s), float(z), math.atan(fp), float(fp)
        i = bisect_left(self.x_nodes, x)
        i = min(max(i, 1), len(self.x_nodes) - 1)
        lo, hi = self.s_nodes[i - 1], self.s_nodes[i]
        if hi <= lo:
            s = lo
        else:
            s = brentq(lambda ss: self.sol1(ss)[0] - x, lo, hi,
                       xtol=1e-14 * max(1.0, hi), rtol=_BRENTQ_RTOL)
        _, z, th = self.sol1(s)
        return float(s), float(z), float(th), math.tan(th)

    def checkpoint_radii(self):
        if self._radii is None:
            m = self.cfg.dense_spacing
            span = math.log10(self.x_end / self.r0)
            kmax = int(math.floor(span * m + 1e-9))
            ks = np.arange(1, kmax + 1, dtype=float)
            radii = self.r0 * 10.0 ** (ks / m)
            self._radii = np.minimum(radii, self.x_end)
        return self._radii


def _integrate_upper_form(H, r0, cfg):
    x_max = cfg.resolved_x_max(r0)
    if x_max <= r0:
        raise ValueError("x_max must exceed the necksize")
    x_switch = min(cfg.switch_factor * r0, x_max)

    def rhs1(s, yv):
        x, _, th = yv
        c = math.cos(th)
        nu = min(1.0, max(-1.0, c))
        hv = H.value(nu)
        if hv != hv:
            raise IntegrationError(f"prescription returned NaN at angle {nu!r}")
        si = math.sin(th)
        return c, si, 2.0 * hv - si / x

    s_cap = 4.0 * (x_switch - r0) + 60.0 * r0 + 10.0
    solver = RK45(rhs1, 0.0, (r0, 0.0, 0.5 * math.pi), t_bound=s_cap,
                  rtol=cfg.rel_tol, atol=cfg.abs_tol)
    interps = []
    s_nodes = [0.0]
    x_nodes = [r0]
    end_state = None
    termination = note = None
    while True:
        if solver.status == "finished":
            termination = TERM_STEP_FAILURE
            note = "arc-length budget exhausted before reaching the radius targets"
            break
        if len(interps) >= cfg.max_steps:
            termination = TERM_STEP_FAILURE
            note = f"exceeded max_steps={cfg.max_steps}"
            break
        solver.step()
        if solver.status == "failed":
            termination = TERM_STEP_FAILURE
            note = f"step-size underflow near x={float(solver.y[0])!r}"
            break
        dense = solver.dense_output()
        interps.append(dense)
        s_nodes.append(solver.t)
        x_nodes.append(float(solver.y[0]))
        s_prev, s_new = s_nodes[-2], s_nodes[-1]
        s_turn = math.inf
        if math.cos(float(solver.y[2])) <= 0.0:
            s_turn = brentq(lambda s: math.cos(dense(s)[2]), s_prev, s_new,
                            xtol=1e-14 * max(1.0, s_new), rtol=_BRENTQ_RTOL)
        s_hit = math.inf
        if float(solver.y[0]) >= x_switch:
            if dense(s_prev)[0] >= x_switch:
                s_hit = s_prev
            else:
                s_hit = brentq(lambda s: dense(s)[0] - x_switch, s_prev, s_new,
                               xtol=1e-14 * max(1.0, s_new), rtol=_BRENTQ_RTOL)
        if s_turn <= s_hit and s_turn < math.inf:
            s_nodes[-1] = s_turn
            end_state = np.asarray(dense(s_turn), dtype=float)
            x_nodes[-1] = float(end_state[0])
            termination = TERM_TURNING
            note = f"radius stops increasing at x={float(end_state[0])!r}"
            break
        if s_hit < math.inf:
            s_nodes[-1] = s_hit
            end_state = np.asarray(dense(s_hit), dtype=float)
            x_nodes[-1] = float(end_state[0])
            termination = "_hit_target"
            break
    if not interps:
        raise IntegrationError("integration failed before completing a single step")
    sol1 = OdeSolution(s_nodes, interps)
    x_end = x_nodes[-1]

    sol2 = None
    t_lo = t_hi = None
    if termination == "_hit_target":
        if x_switch >= x_max:
            termination = TERM_XMAX
        else:
            x1, z1, th1 = (float(v) for v in end_state)
            sol2, t_lo, t_hi, x_end, termination, note = _integrate_far_field(
                H, r0, cfg, x1, z1, x1 * math.tan(th1), s_nodes[-1], x_max)
    return _UpperForm(H, r0, cfg, sol1, s_nodes, x_nodes, sol2, t_lo, t_hi,
                      x_end, termination, note)


def _integrate_far_field(H, r0, cfg, x1, z1, w1, s1, x_max):
    """Continue in t = log(x/r0) with state (z, w, s), w = x f'(x)."""
    w_eps = 1e-8 * r0
    freeze = H.value(1.0) == 0.0

    def rhs2(t, yv):
        _, w, _ = yv
        x = r0 * math.exp(t)
        if freeze and abs(w) <= w_eps:
            return w, 0.0, x
        fp = w / x
        one = 1.0 + fp * fp
        root = math.sqrt(one)
        hv = H.value(1.0 / root)
        if hv != hv:
            raise IntegrationError(f"prescription returned NaN at angle {1.0 / root!r}")
        return w, 2.0 * x * x * hv * one * root - x * fp * fp * fp, x * root

    t0 = math.log(x1 / r0)
    t_end = math.log(x_max / r0)
    solver = RK45(rhs2, t0, (z1, w1, s1), t_bound=t_end, rtol=cfg.rel_tol,
                  atol=cfg.abs_tol, max_step=cfg.far_max_step)
    interps = []
    t_nodes = [t0]
    termination = note = None
    while solver.status == "running":
        if len(interps) >= cfg.max_steps:
            termination = TERM_STEP_FAILURE
            note = f"exceeded max_steps={cfg.max_steps} in the far field"
            break
        solver.step()
        if solver.status == "failed":
            termination = TERM_STEP_FAILURE
            note = f"far-field step failure near x={r0 * math.exp(solver.t)!r}"
            break
        interps.append(solver.dense_output())
        t_nodes.append(solver.t)
        if not np.all(np.isfinite(solver.y)):
            termination = TERM_STEP_FAILURE
            note = f"far-field state not finite near x={r0 * math.exp(solver.t)!r}"
            break
    if termination is None:
        termination = TERM_XMAX
    if not interps:
        # could not advance at all: fall back to the phase-1 endpoint
        return None, None, None, x1, TERM_STEP_FAILURE, "far field failed at handoff"
    sol2 = OdeSolution(t_nodes, interps)
    x_end = r0 * math.exp(t_nodes[-1])
    return sol2, t0, t_nodes[-1], x_end, termination, note


class Branch:
    """One end of an integrated surface (``upper`` or ``lower``).

    Immutable after construction; ``scale`` maps the stored upper-form
    solution through a homothety so rescaled surfaces share dense output.
    """

    def __init__(self, side, form, scale=1.0):
        if side not in ("upper", "lower"):
            raise ValueError("side must be 'upper' or 'lower'")
        self.side = side
        self._form = form
        self._scale = float(scale)
        self._cp = None

    @property
    def necksize(self):
        return self._scale * self._form.r0

    @property
    def x_end(self):
        return self._scale * self._form.x_end

    @property
    def termination(self):
        return self._form.termination

    @property
    def termination_note(self):
        return self._form.note

    def _form_eval(self, x):
        return self._form.eval(x / self._scale)

    def state_at(self, x):
        """Profile state at radius x, waist included (x = necksize)."""
        if x < self.necksize - 1e-12 * self.necksize or x > self.x_end * (1.0 + 1e-12):
            raise BranchRangeError(
                f"x={x!r} outside the integrated range ({self.necksize!r}, {self.x_end!r}]")
        lam = self._scale
        s, z, th, _ = self._form_eval(x)
        if self.side == "lower":
            s, z, th = -s, -z, math.pi - th
        return ProfileState(s=lam * s, x=x, z=lam * z + 0.0, theta=th, nu=math.cos(th))

    def slope_at(self, x):
        """f'(x): positive on the upper branch, negative on the lower."""
        if not self.necksize < x <= self.x_end * (1.0 + 1e-12):
            raise BranchRangeError(
                f"x={x!r} outside the integrated range ({self.necksize!r}, {self.x_end!r}]")
        fp = self._form_eval(x)[3]
        return fp if self.side == "upper" else -fp

    def checkpoints(self):
        """Dense-output samples on the per-decade log grid (waist excluded).

        Returns a dict of aligned arrays; ``u`` is radius times |slope|,
        evaluated in the same form for both branches so that even
        prescriptions give bitwise-mirrored ends.
        """
        if self._cp is None:
            lam = self._scale
            radii_form = self._form.checkpoint_radii()
            rows = [self._form.eval(float(x)) for x in radii_form]
            s = np.array([r[0] for r in rows])
            z = np.array([r[1] for r in rows])
            th = np.array([r[2] for r in rows])
            fp = np.array([r[3] for r in rows])
            if self.side == "lower":
                s, z, th, fp = -s, -z, math.pi - th, -fp
            x = lam * radii_form
            self._cp = {
                "x": x,
                "s": lam * s,
                "z": lam * z,
                "theta": th,
                "nu": np.cos(th),
                "slope": fp,
                "u": lam * radii_form * np.abs(fp),
            }
        return self._cp


class Catenoid:
    """An integrated rotational surface: prescription, necksize, two branches."""

    def __init__(self, prescription, necksize, config, upper, lower):
        self.prescription = prescription
        self.necksize = necksize
        self.config = config
        self.upper = upper
        self.lower = lower

    def branch(self, name):
        if name == "upper":
            return self.upper
        if name == "lower":
            return self.lower
        raise ValueError("branch must be 'upper' or 'lower'")

    def waist_state(self, branch="upper"):
        b = self.branch(branch)
        return ProfileState(s=0.0, x=b.necksize, z=0.0, theta=0.5 * math.pi, nu=0.0)

    def __repr__(self):
        return (f"<Catenoid {self.prescription.describe()} r0={self.necksize!r} "
                f"upper:{self.upper.termination} lower:{self.lower.termination}>")


def integrate_catenoid(H, r0, config=None):
    """Integrate both branches of the rotational surface with waist radius r0.

    The lower branch solves the same tangent-angle system for the reflected
    prescription y -> H(-y) and is mirrored back, which carries the correct
    orientation (normal pointing inward at the waist, downward at the lower
    end).  Turning points (radius stops increasing) terminate a branch with
    a reported reason instead of raising.
    """
    if not isinstance(H, PrescribedFunction):
        raise TypeError("H must be a PrescribedFunction")
    if not r0 > 0.0:
        raise ValueError("necksize must be positive")
    cfg = config or IntegratorConfig()
    upper = Branch("upper", _integrate_upper_form(H, r0, cfg))
    lower = Branch("lower", _integrate_upper_form(_Reflected(H), r0, cfg))
    return Catenoid(H, r0, cfg, upper, lower)


def scale(cat, lam):
    """Homothety by lam > 0: states (x, z) map to (lam x, lam z), angles fixed.

    The image surface solves the prescription H/lam with necksize lam * r0;
    no re-integration is performed, branches share the stored dense output.
    """
    if not lam > 0.0:
        raise ValueError("scale factor must be positive")
    if lam == 1.0:
        return cat
    base = cat.prescription
    if isinstance(base, Scaled):
        new_h = Scaled(base.base, base.factor / lam)
    else:
        new_h = Scaled(base, 1.0 / lam)
    upper = Branch("upper", cat.upper._form, cat.upper._scale * lam)
    lower = Branch("lower", cat.lower._form, cat.lower._scale * lam)
    return Catenoid(new_h, lam * cat.necksize, cat.config, upper, lower)


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------

def height_at(cat, branch, x):
    """Height z of the branch graph at radius x (dense-output interpolation)."""
    b = cat.branch(branch)
    if not b.necksize < x <= b.x_end * (1.0 + 1e-12):
        raise BranchRangeError(
            f"x={x!r} outside the integrated range ({b.necksize!r}, {b.x_end!r}]")
    return b.state_at(x).z


def slope_at(cat, branch, x):
    """Graph slope f'(x) of the branch at radius x."""
    return cat.branch(branch).slope_at(x)


def curvature_at(cat, branch, x):
    """Principal curvatures and |sigma|^2 at radius x.

    kappa1 is the meridian curvature d(theta)/ds along the profile,
    evaluated through the profile equation; kappa2 = sin(theta)/x.  The
    squared norm of the second fundamental form is computed independently
    from (nu, H(nu)) alone:

        |sigma|^2 = 4 H(nu)^2 + 2 q (q - 2 H(nu)),   q = sqrt(1 - nu^2)/x.
    """
    b = cat.branch(branch)
    st = b.state_at(x)
    q = math.sin(st.theta) / x
    hv = float(cat.prescription.value(st.nu))
    kappa2 = q
    kappa1 = 2.0 * hv - q
    sff = 4.0 * hv * hv + 2.0 * q * (q - 2.0 * hv)
    return CurvatureSample(x=x, kappa1=kappa1, kappa2=kappa2, sff_norm_sq=sff, nu=st.nu)


def graph_residual(two_h, x, fp, fpp, lower=False):
    """|2H - mean curvature of the graph|, the correctness oracle kernel.

    On the lower branch the graph parametrization carries the upward normal
    while the surface normal points downward, so the curvature terms enter
    with the opposite sign.
    """
    core = fpp / (1.0 + fp * fp) ** 1.5 + fp / (x * math.sqrt(1.0 + fp * fp))
    return abs(two_h + core) if lower else abs(two_h - core)


def residual(cat, branch, x):
    """Residual of the graph mean-curvature equation at radius x.

    f'' is obtained by differencing the dense-output slope; this checks the
    integrated trajectory against the graph equation independently of the
    stepper's own error control.
    """
    b = cat.branch(branch)
    if not b.necksize < x <= b.x_end * (1.0 + 1e-12):
        raise BranchRangeError(
            f"x={x!r} outside the integrated range ({b.necksize!r}, {b.x_end!r}]")
    st = b.state_at(x)
    delta = 1e-6 * x
    delta = min(delta, 0.45 * (x - b.necksize))
    if x + delta > b.x_end:
        d = min(1e-6 * x, 0.45 * (x - b.necksize))
        f0 = b.slope_at(x)
        f1 = b.slope_at(x - d)
        f2 = b.slope_at(x - 2.0 * d)
        fpp = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * d)
        fp = f0
    else:
        fp = b.slope_at(x)
        fpp = (b.slope_at(x + delta) - b.slope_at(x - delta)) / (2.0 * delta)
    two_h = 2.0 * float(cat.prescription.value(st.nu))
    return graph_residual(two_h, x, fp, fpp, lower=(branch == "lower"))


# ---------------------------------------------------------------------------
# Mesh and exports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray      # (N, 3)
    faces: np.ndarray         # (M, 4) vertex indices, 0-based, outward CCW


def mesh(cat, rings, segments, x_limit=None):
    """Quadrilateral mesh of both branches of the surface of revolution.

    Rings are geometrically spaced from the waist to the smaller of the two
    integrated radii (or ``x_limit``); each branch contributes
    rings * segments vertices.  Face winding is counter-clockwise seen from
    the surface normal (inward at the waist, upward at the upper end).
    """
    if rings < 2:
        raise ValueError("rings must be at least 2")
    if segments < 3:
        raise ValueError("segments must be at least 3")
    x_hi = min(cat.upper.x_end, cat.lower.x_end)
    if x_limit is not None:
        x_hi = min(x_hi, float(x_limit))
    if x_hi <= cat.necksize:
        raise ValueError("empty branch: nothing to mesh")
    radii = np.geomspace(cat.necksize, x_hi, rings)
    radii[0] = cat.necksize
    angles = 2.0 * math.pi * np.arange(segments) / segments
    verts = []
    faces = []
    for branch_name in ("upper", "lower"):
        b = cat.branch(branch_name)
        offset = len(verts)
        states = [b.state_at(float(x)) for x in radii]
        for st in states:
            for a in angles:
                verts.append((st.x * math.cos(a), st.x * math.sin(a), st.z))
        # winding that agrees with the surface normal, tested on one corner
        st = states[0]
        st1 = states[1]
        p00 = np.array([st.x, 0.0, st.z])
        p10 = np.array([st1.x * math.cos(0.0), st1.x * math.sin(0.0), st1.z])
        p01 = np.array([st.x * math.cos(angles[1]), st.x * math.sin(angles[1]), st.z])
        normal = np.array([-math.sin(st.theta), 0.0, math.cos(st.theta)])
        flip = float(np.dot(np.cross(p10 - p00, p01 - p00), normal)) < 0.0
        for i in range(rings - 1):
            for j in range(segments):
                jn = (j + 1) % segments
                a = offset + i * segments + j
                bq = offset + (i + 1) * segments + j
                c = offset + (i + 1) * segments + jn
                d = offset + i * segments + jn
                faces.append((a, d, c, bq) if flip else (a, bq, c, d))
    return SurfaceMesh(np.asarray(verts, dtype=float), np.asarray(faces, dtype=int))


def _fmt(v):
    return repr(float(v))


def profile_rows(cat, branches=("upper", "lower")):
    """Rows of the dense-checkpoint table, waist included once per branch."""
    rows = []
    for name in branches:
        b = cat.branch(name)
        w = cat.waist_state(name)
        # waist row: curvatures from the waist limit of the profile equation
        hv = float(cat.prescription.value(w.nu))
        k2 = 1.0 / b.necksize
        k1 = 2.0 * hv - k2
        rows.append((w.s, w.x, w.z, w.theta, w.nu, k1, k2,
                     4.0 * hv * hv + 2.0 * k2 * (k2 - 2.0 * hv), name))
        cp = b.checkpoints()
        for i in range(cp["x"].size):
            x = float(cp["x"][i])
            nu = float(cp["nu"][i])
            q = math.sin(float(cp["theta"][i])) / x
            hv = float(cat.prescription.value(nu))
            k1 = 2.0 * hv - q
            k2 = q
            sff = 4.0 * hv * hv + 2.0 * q * (q - 2.0 * hv)
            rows.append((float(cp["s"][i]), x, float(cp["z"][i]),
                         float(cp["theta"][i]), nu, k1, k2, sff, name))
    return rows


def export_profile_csv(cat, path, branches=("upper", "lower")):
    """Write the dense-checkpoint profile table as CSV."""
    lines = ["s,x,z,theta,nu,kappa1,kappa2,sff_norm_sq,branch"]
    for row in profile_rows(cat, branches):
        lines.append(",".join([_fmt(v) for v in row[:8]] + [row[8]]))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
    return len(lines) - 1


def export_mesh_obj(surface_mesh, path):
    """Write a Wavefront OBJ file (v lines then quad f lines, 1-based)."""
    lines = []
    for v in surface_mesh.vertices:
        lines.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for f in surface_mesh.faces:
        lines.append("f " + " ".join(str(int(i) + 1) for i in f))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return len(surface_mesh.vertices), len(surface_mesh.faces)
