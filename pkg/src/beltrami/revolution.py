"""Surfaces of revolution ``x(u, v) = (f(u) cos v, f(u) sin v, g(u))``.

Profiles are evaluated through univariate Taylor series that are composed
with the incoming jet, so a profile never costs derivative orders no matter
how it was built (expressions, an offset immersion, or a numerical arc-length
reparametrization).

With an arc-length profile write ``f' = cos phi``, ``g' = sin phi`` and
``kappa = phi'``. The global normal ``(x_u x x_v)/|x_u x x_v|`` of a revolved
profile with ``f > 0`` is ``(-sin phi cos v, -sin phi sin v, cos phi)``; all
closed forms below are stated for that orientation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from . import expr, jets
from .errors import (
    ClassificationFailure,
    DegenerateSpeed,
    ExcludedSurface,
    NonMonotoneArcLength,
    NotArcLength,
    ParabolicProfilePoint,
    ProfileError,
)
from .jets import Jet
from .report import Grid, build_report, not_applicable, pointwise
from .surface import Immersion, frame, sweep_frames
from .tensor import laplacian

SPEED_FLOOR = 1e-9
PHI_FLOOR = 1e-8
UNIT_SPEED_TOL = 1e-10


# -- profiles ------------------------------------------------------------------


@dataclass
class Profile:
    """Planar curve ``(f(u), g(u))`` on ``interval``.

    ``evaluator`` maps a u-seeded jet to ``(f, g)`` jets and may lose
    ``order_loss`` orders; :meth:`evaluate` hides that by working from series.
    """

    name: str
    evaluator: Callable[[Jet], tuple]
    interval: tuple
    source: tuple | None = None
    order_loss: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        a, b = (float(t) for t in self.interval)
        if not b > a:
            raise ProfileError(f"{self.name}: empty interval {self.interval}")
        self.interval = (a, b)

    def series(self, u0, order):
        """Taylor coefficients of f and g about ``u0``: two arrays ``(..., order+1)``."""
        W = jets.seed(np.asarray(u0, dtype=float), "u", order + self.order_loss)
        F, G = self.evaluator(W)
        F, G = jets.as_jet(F, W.order), jets.as_jet(G, W.order)
        if min(F.order, G.order) < order:
            raise jets.OrderExceeded(f"profile {self.name} returned too few orders")
        n = order + 1
        return F.univariate()[..., :n], G.univariate()[..., :n]

    def evaluate(self, U: Jet):
        """``(f(U), g(U))`` for any jet ``U``, at the full order of ``U``."""
        fs, gs = self.series(U.value, U.order)
        return jets.compose(fs, U), jets.compose(gs, U)

    def values(self, u, derivative=0):
        """Plain values of ``f``/``g`` (or a derivative of them) at ``u``."""
        fs, gs = self.series(u, max(derivative, 1))
        k = math.factorial(derivative)
        return fs[..., derivative] * k, gs[..., derivative] * k

    def speed(self, u):
        fp, gp = self.values(u, 1)
        return np.hypot(fp, gp)

    def sample(self, n=65):
        a, b = self.interval
        return np.linspace(a, b, n)

    @classmethod
    def from_exprs(cls, name, f_src, g_src, interval, check_positive=True):
        nf = expr.compile_field(f_src, allowed=("u",))
        ng = expr.compile_field(g_src, allowed=("u",))

        def evaluator(U):
            zero = U * 0.0
            return expr.eval_jet(nf, U, zero), expr.eval_jet(ng, U, zero)

        p = cls(name, evaluator, tuple(interval), source=(f_src, g_src))
        if check_positive:
            f = p.values(p.sample())[0]
            if not np.all(f > 0):
                raise ProfileError(f"{name}: radius f must be positive on {p.interval}")
        return p


def profile_of_immersion(s: Immersion, name=None, interval=None, v0=0.0):
    """Meridian ``(x1, x3)`` of a rotationally symmetric immersion at ``v = v0``."""
    a, b = interval or s.domain[:2]

    def evaluator(U):
        # v must stay a live variable: the immersion may differentiate in v (offsets do)
        V = jets.seed(np.full(U.shape, v0), "v", U.order)
        x1, x2, x3 = s.evaluator(U, V)
        c, sn = math.cos(v0), math.sin(v0)
        return x1 * c + x2 * sn, x3

    return Profile(name or f"meridian({s.name})", evaluator, (a, b), order_loss=s.order_loss,
                   meta={"immersion": s.name})


def speed_defect(p: Profile, u=None):
    """``max |sqrt(f'^2 + g'^2) - 1|`` over ``u`` (default: 65 samples)."""
    u = p.sample() if u is None else np.asarray(u, dtype=float)
    return float(np.max(np.abs(p.speed(u) - 1.0)))


def chebyshev_nodes(a, b, n):
    """Chebyshev-Lobatto nodes on ``[a, b]`` in increasing order."""
    k = np.arange(n)
    t = -np.cos(np.pi * k / (n - 1))
    return 0.5 * (a + b) + 0.5 * (b - a) * t


class _ArcLength:
    """Arc length ``s(u)`` of a profile and its inverse, with Newton polishing."""

    def __init__(self, p: Profile, n_nodes, origin):
        self.p = p
        a, b = p.interval
        self.nodes = chebyshev_nodes(a, b, n_nodes)
        dense = np.linspace(a, b, 8 * n_nodes + 1)
        sp = p.speed(np.concatenate([dense, self.nodes]))
        if not np.all(np.isfinite(sp)) or sp.min() < SPEED_FLOOR:
            raise DegenerateSpeed(f"{p.name}: speed sqrt(f'^2 + g'^2) drops below {SPEED_FLOOR:g}")
        pieces = [self._integral(lo, hi) for lo, hi in zip(self.nodes[:-1], self.nodes[1:])]
        if not all(piece > 0 for piece in pieces):
            raise NonMonotoneArcLength(f"{p.name}: arc length is not increasing")
        s_nodes = np.concatenate([[0.0], np.cumsum(pieces)])
        if origin is not None:
            s_nodes = s_nodes - self.s_of_u_scalar(float(origin), s_nodes)
        self.s_nodes = s_nodes
        self.inverse = PchipInterpolator(s_nodes, self.nodes)
        self._cache = {}

    def _integral(self, lo, hi):
        val, _ = quad(lambda t: float(self.p.speed(t)), lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
        return val

    def s_of_u_scalar(self, u, s_nodes=None):
        s_nodes = self.s_nodes if s_nodes is None else s_nodes
        j = int(np.clip(np.searchsorted(self.nodes, u) - 1, 0, len(self.nodes) - 2))
        return s_nodes[j] + self._integral(self.nodes[j], u)

    @property
    def length(self):
        return float(self.s_nodes[-1] - self.s_nodes[0])

    def u_of_s(self, s):
        """Parameter values ``u(s)``: monotone interpolation then Newton on ``s(u) = s``."""
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        keys, inv = np.unique(flat, return_inverse=True)
        out = np.empty(keys.shape)
        a, b = self.p.interval
        for i, sk in enumerate(keys):
            key = float(sk)
            if key not in self._cache:
                u = float(np.clip(self.inverse(key), a, b))
                for _ in range(12):
                    step = (self.s_of_u_scalar(u) - key) / float(self.p.speed(u))
                    u -= step
                    if abs(step) <= 4e-16 * max(1.0, abs(u)):
                        break
                self._cache[key] = u
            out[i] = self._cache[key]
        return out[inv].reshape(s.shape)


def reparametrize_arclength(p: Profile, n_nodes=64, origin=None, name=None) -> Profile:
    """Unit-speed version of ``p``, parametrized by arc length ``s``.

    ``s`` is measured from ``origin`` (a parameter value of ``p``; default the
    start of the interval). Derivatives of ``u(s)`` come from inverting the
    arc-length series in jet arithmetic, so ``(f')^2 + (g')^2 = 1`` holds to
    rounding at every order.
    """
    if n_nodes < 4:
        raise ValueError("n_nodes must be at least 4")
    arc = _ArcLength(p, n_nodes, origin)

    def evaluator(S):
        n = S.order
        u0 = arc.u_of_s(S.value)
        # arc-length series about u0: s(u0 + h) - s(u0) = sum_k c_k h^k, c_k = speed_{k-1}/k
        W = jets.seed(u0, "u", n + p.order_loss)
        F, G = p.evaluator(W)
        sp = jets.sqrt(F.d(0) ** 2 + G.d(0) ** 2).univariate()[..., :n]
        c = np.zeros(sp.shape[:-1] + (n + 1,))
        c[..., 1:] = sp / np.arange(1, n + 1)
        dc = np.zeros_like(c)
        dc[..., :-1] = c[..., 1:] * np.arange(1, n + 1)
        t = S - S.value
        h = t / c[..., 1]
        for _ in range(max(1, math.ceil(math.log2(n + 1)))):
            h = h - (jets.compose(c, h) - t) / jets.compose(dc, h)
        return p.evaluate(h + u0)

    lo, hi = arc.s_nodes[0], arc.s_nodes[-1]
    out = Profile(name or f"{p.name}[arc]", evaluator, (lo, hi), source=p.source,
                  meta={"base": p.name, "length": arc.length, "arc": arc, "unit_speed": True})
    return out


def ensure_arclength(p: Profile, n_nodes=64):
    """``p`` itself when already unit speed, otherwise its reparametrization."""
    if p.meta.get("unit_speed") or speed_defect(p) <= UNIT_SPEED_TOL:
        return p
    return reparametrize_arclength(p, n_nodes)


def revolve(p: Profile) -> Immersion:
    """Surface swept by rotating the profile about the z-axis, ``v`` in ``[0, 2 pi]``."""

    def evaluator(u, v):
        F, G = p.evaluate(u)
        return F * jets.cos(v), F * jets.sin(v), G

    return Immersion(f"revolve({p.name})", evaluator, p.interval + (0.0, 2 * math.pi),
                     meta={"profile": p.name})


# -- profile angle -------------------------------------------------------------


@dataclass
class PhiProfile:
    """Profile angle data at a batch of parameter values, as u-only jets.

    ``phi`` has order n-1, ``kappa = phi'`` n-2, ``dkappa = phi''`` n-3.
    ``singular`` flags points where ``kappa`` or ``sin phi`` is below the floor.
    """

    profile: Profile
    u: np.ndarray
    f: Jet
    g: Jet
    phi: Jet
    kappa: Jet
    dkappa: Jet
    singular: np.ndarray
    speed_defect: float

    @property
    def order(self):
        return self.dkappa.order + 3


def _unwrap_along_u(u, phi):
    """Shift ``phi`` by multiples of 2 pi so it is continuous in ``u``."""
    flat_u = np.ravel(u)
    if flat_u.size < 2:
        return np.zeros_like(phi)
    keys, inv = np.unique(flat_u, return_inverse=True)
    first = np.empty(keys.shape)
    first[inv[::-1]] = np.ravel(phi)[::-1]
    shift = np.unwrap(first) - first
    return shift[inv].reshape(np.shape(phi))


def phi_profile(p: Profile, u, order=jets.DEFAULT_ORDER, floor=PHI_FLOOR) -> PhiProfile:
    """Angle ``phi = atan2(g', f')`` with unwrapping, plus ``kappa`` and ``kappa'``."""
    u = np.asarray(u, dtype=float)
    U = jets.seed(u, "u", order)
    F, G = p.evaluate(U)
    fp, gp = F.d(0), G.d(0)
    defect = float(np.max(np.abs(np.hypot(fp.value, gp.value) - 1.0))) if u.size else 0.0
    if defect > 1e-9:
        raise NotArcLength(
            f"{p.name} is not unit speed (defect {defect:.3g}); reparametrize first")
    phi = jets.atan2(gp, fp)
    phi = phi + _unwrap_along_u(u, phi.value)
    kappa = phi.d(0)
    dkappa = kappa.d(0)
    singular = (np.abs(kappa.value) < floor) | (np.abs(np.sin(phi.value)) < floor)
    return PhiProfile(p, u, F, G, phi, kappa, dkappa, singular, defect)


def _require_regular(pp: PhiProfile, strict):
    if strict and pp.singular.any():
        raise ParabolicProfilePoint(
            f"{pp.profile.name}: kappa or sin(phi) below {PHI_FLOOR:g} (parabolic or axis point)")
    return pp.singular


def _safe(j: Jet, mask):
    return j.where(mask, 1.0) if mask.any() else j


def closed_form_laplacian_III(pp: PhiProfile, F, variant="phi", strict=True):
    """Closed-form ``Delta^III`` of a field on the revolved surface.

    ``F`` is a jet seeded at ``(pp.u, v)`` or a callable ``(U, V) -> Jet``
    (then ``v = 0``). ``variant="phi"`` uses the profile-angle coefficients,
    ``variant="kappa"`` the curvature/height form
    ``-(1/k^2) d_uu + (g' k' - k g'')/(g' k^3) d_u - (1/g'^2) d_vv``.
    """
    bad = _require_regular(pp, strict)
    if callable(F):
        n = pp.order
        F = F(jets.seed(pp.u, "u", n), jets.seed(np.zeros_like(pp.u), "v", n))
    k = _safe(pp.kappa, bad)
    if variant == "phi":
        sphi = _safe(jets.sin(pp.phi), bad)
        cphi = jets.cos(pp.phi)
        c_u = pp.dkappa / k**3 - cphi / (k * sphi)
        c_vv = 1.0 / sphi**2
    elif variant == "kappa":
        gp = _safe(pp.g.d(0), bad)
        gpp = pp.g.d(0).d(0)
        c_u = (gp * pp.dkappa - k * gpp) / (gp * k**3)
        c_vv = 1.0 / gp**2
    else:
        raise ValueError(f"unknown variant {variant!r}")
    c_uu = 1.0 / k**2
    Fu = F.d(0)
    lead = F.c.ndim - 1 - pp.u.ndim
    expand = (lambda j: Jet(j.c.reshape((1,) * lead + j.c.shape), j.order)) if lead else (lambda j: j)
    return -expand(c_uu) * Fu.d(0) + expand(c_u) * Fu - expand(c_vv) * F.d(1).d(1)


def R_and_Rprime(pp: PhiProfile, strict=True):
    """``R = f/sin phi + 1/phi'`` and its u-derivative, as plain arrays."""
    bad = _require_regular(pp, strict)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi, k, dk = pp.phi.value, pp.kappa.value, pp.dkappa.value
        f = pp.f.value
        s, c = np.sin(phi), np.cos(phi)
        R = f / s + 1.0 / k
        Rp = -dk / k**2 - f * k * c / s**2 + c / s
    if bad.any():
        R, Rp = np.where(bad, np.nan, R), np.where(bad, np.nan, Rp)
    return R, Rp


def component_routes(pp: PhiProfile, v, strict=True):
    """``Delta^III x`` three ways: operator on coordinates, phi-formulas, (R, R') formulas.

    Each route is an array of shape ``(3, *batch)``.
    """
    v = np.asarray(v, dtype=float)
    n = pp.order
    U = jets.seed(pp.u, "u", n)
    V = jets.seed(v, "v", n)
    F, G = pp.profile.evaluate(U)
    x = jets.stack([F * jets.cos(V), F * jets.sin(V), G])
    op = closed_form_laplacian_III(pp, x, strict=strict).value

    bad = pp.singular
    with np.errstate(divide="ignore", invalid="ignore"):
        phi, k, dk, f = pp.phi.value, pp.kappa.value, pp.dkappa.value, pp.f.value
        s, c = np.sin(phi), np.cos(phi)
        radial = dk * c / k**3 - 1.0 / (k * s) + 2 * s / k + f / s**2
        axial = -2 * c / k + dk * s / k**3
        by_phi = np.stack([radial * np.cos(v), radial * np.sin(v), axial])
        R, Rp = R_and_Rprime(pp, strict=strict)
        radial_R = R * s - Rp * c / k
        axial_R = -Rp * s / k - R * c
        by_R = np.stack([radial_R * np.cos(v), radial_R * np.sin(v), axial_R])
    if bad.any():
        op = np.where(bad, np.nan, op)
    return op, by_phi, by_R


# -- verification ---------------------------------------------------------------


def _norm(a):
    return np.sqrt(np.sum(np.asarray(a) ** 2, axis=0))


def _profile_points(p: Profile, grid: Grid):
    return grid.points(revolve(p).domain)


def verify_component_laplacians(p: Profile, grid: Grid = Grid(), tol=1e-7, order=jets.DEFAULT_ORDER):
    """Triple agreement of the coordinate Laplacians, plus the general tensor operator."""
    p = ensure_arclength(p)
    s = revolve(p)
    U, V = grid.points(s.domain)

    def compute(u, v):
        pp = phi_profile(p, u, order)
        op, by_phi, by_R = component_routes(pp, v, strict=False)
        fr = frame(s, u, v, order, strict=False)
        tens = laplacian(fr, "III", fr.x).value
        scale = np.maximum(1.0, _norm(op))
        d_phi = _norm(op - by_phi) / scale
        d_R = _norm(op - by_R) / scale
        d_phiR = _norm(by_phi - by_R) / scale
        d_tensor = _norm(op - tens) / scale
        reasons = np.array(fr.reasons, dtype=object)
        reasons[(reasons == "") & pp.singular] = "ParabolicProfilePoint"
        return {"residual": np.maximum.reduce([d_phi, d_R, d_phiR, d_tensor]),
                "d_phi": d_phi, "d_R": d_R, "d_phiR": d_phiR, "d_tensor": d_tensor,
                "_reason": reasons, "cond_g": fr.cond("g"), "cond_e": fr.cond("e")}

    out = pointwise(compute, U, V)
    live = out["_reason"] == ""
    mx = {k: _mx(out[k], live) for k in ("d_phi", "d_R", "d_phiR", "d_tensor")}
    return build_report("component-laplacians", s.name, grid, U, V, out["residual"], out["_reason"],
                        tol, out["cond_g"], out["cond_e"], operator_vs_phi=mx["d_phi"],
                        operator_vs_R=mx["d_R"], phi_vs_R=mx["d_phiR"], operator_vs_tensor=mx["d_tensor"])


def verify_closed_form_operator(p: Profile, fields, grid: Grid = Grid(), tol=1e-8,
                                order=jets.DEFAULT_ORDER, variant="phi"):
    """Closed-form ``Delta^III`` against the Christoffel pipeline on scalar fields.

    ``fields`` are expression strings (or trees) in ``u`` and ``v``.
    """
    p = ensure_arclength(p)
    s = revolve(p)
    nodes = [expr.compile_field(f) for f in fields]
    U, V = grid.points(s.domain)

    def compute(u, v):
        pp = phi_profile(p, u, order)
        fr = frame(s, u, v, order, strict=False)
        worst = np.zeros(np.shape(u))
        for node in nodes:
            F = expr.eval_jet(node, fr.u, fr.v)
            a = closed_form_laplacian_III(pp, F, variant=variant, strict=False).value
            b = laplacian(fr, "III", F).value
            worst = np.maximum(worst, np.abs(a - b) / np.maximum(1.0, np.abs(b)))
        reasons = np.array(fr.reasons, dtype=object)
        reasons[(reasons == "") & pp.singular] = "ParabolicProfilePoint"
        return {"residual": worst, "_reason": reasons, "cond_g": fr.cond("g"), "cond_e": fr.cond("e")}

    out = pointwise(compute, U, V)
    return build_report("closed-form-operator", s.name, grid, U, V, out["residual"], out["_reason"],
                        tol, out["cond_g"], out["cond_e"], fields=len(nodes), variant=variant)


def verify_R_formulas(p: Profile, grid: Grid = Grid(), tol=1e-8, order=jets.DEFAULT_ORDER):
    """``R``, ``R'`` from the profile angle against ``2H/K`` of the revolved frame."""
    p = ensure_arclength(p)
    s = revolve(p)

    def compute(fr):
        pp = phi_profile(p, fr.u.value, order)
        R, Rp = R_and_Rprime(pp, strict=False)
        rR = np.abs(R - fr.R.value) / np.maximum(1.0, np.abs(R))
        rRp = np.abs(Rp - fr.R.d(0).value) / np.maximum(1.0, np.abs(Rp))
        return {"rR": rR, "rRp": rRp, "residual": np.maximum(rR, rRp / 10)}

    U, V, out = sweep_frames(s, grid, order, compute)
    live = out["_reason"] == ""
    return build_report("R-formulas", s.name, grid, U, V, out["residual"], out["_reason"], tol,
                        out["cond_g"], out["cond_e"], max_rR=_mx(out["rR"], live),
                        max_rRprime=_mx(out["rRp"], live), Rprime_tol=10 * tol)


def verify_iterated_laplacian(p: Profile, m_max=2, grid: Grid = Grid(), tol=1e-6,
                              const_floor=1e-6):
    """``(Delta^III)^m x + 2^(m-1) R N`` for ``m = 1..m_max`` (constant-R profiles only)."""
    if not 1 <= m_max <= 3:
        raise ValueError("m_max must be 1, 2 or 3")
    p = ensure_arclength(p)
    s = revolve(p)
    order = max(jets.DEFAULT_ORDER, 2 * m_max + 1)
    U, V = grid.points(s.domain)

    def compute(u, v):
        pp = phi_profile(p, u, order)
        fr = frame(s, u, v, order, strict=False)
        L = fr.x
        R, N = fr.R.value, fr.N.value
        per_m = []
        for m in range(1, m_max + 1):
            L = closed_form_laplacian_III(pp, L, strict=False)
            target = -(2.0 ** (m - 1)) * R * N
            per_m.append(_norm(L.value - target) / np.maximum(1.0, 2.0 ** (m - 1) * np.abs(R)))
        reasons = np.array(fr.reasons, dtype=object)
        reasons[(reasons == "") & pp.singular] = "ParabolicProfilePoint"
        res = {f"m{m}": r for m, r in enumerate(per_m, 1)}
        res.update(residual=np.maximum.reduce(per_m), R=R, _reason=reasons,
                   cond_g=fr.cond("g"), cond_e=fr.cond("e"))
        return res

    out = pointwise(compute, U, V)
    live = out["_reason"] == ""
    Rl = out["R"][live]
    if Rl.size == 0:
        return not_applicable("iterated-laplacian", s.name, grid, tol, "no regular points")
    spread = float(np.std(Rl)) / max(abs(float(np.mean(Rl))), 1.0)
    if spread >= const_floor:
        return not_applicable("iterated-laplacian", s.name, grid, tol, "R not constant",
                              R_spread=spread)
    per = {f"residual_m{m}": _mx(out[f"m{m}"], live) for m in range(1, m_max + 1)}
    return build_report("iterated-laplacian", s.name, grid, U, V, out["residual"], out["_reason"],
                        tol, out["cond_g"], out["cond_e"], m_max=m_max, R_mean=float(np.mean(Rl)),
                        **per)


def _mx(a, live):
    a = np.asarray(a, dtype=float)[live]
    return float(a.max()) if a.size else float("nan")


# -- classification --------------------------------------------------------------


class Verdict(str, enum.Enum):
    SPHERE_TYPE_1 = "SphereType1"
    CATENOID_NULL_TYPE_1 = "CatenoidNullType1"
    PARALLEL_OF_CATENOID_NULL_TYPE_2 = "ParallelOfCatenoidNullType2"
    NOT_CONSTANT_R = "NotConstantR"


@dataclass(frozen=True)
class Thresholds:
    zero_floor: float = 1e-8  # max|R| below this means R = 0
    const_floor: float = 1e-6  # std(R)/|mean R| below this means R constant
    tol: float = 1e-7  # residual of Delta x + R N (and of Delta x for R = 0)
    type1_floor: float = 1e-6  # relative misfit of Delta x = k (x - c)
    minimality_tol: float = 1e-6  # max|H| of the de-offset surface


@dataclass
class ClassificationVerdict:
    kind: Verdict
    profile: str
    evidence: dict
    thresholds: Thresholds

    def to_dict(self):
        return {"kind": self.kind.value, "profile": self.profile, "evidence": self.evidence,
                "thresholds": dict(self.thresholds.__dict__)}


def _affine_type1_fit(lap, x):
    """Least-squares ``lap = k x + d`` over all points; returns ``(k, centre, misfit)``.

    A constant vector is allowed because finite-type decompositions carry one.
    """
    P = x.shape[1]
    A = np.zeros((3 * P, 4))
    for a in range(3):
        A[a * P:(a + 1) * P, 0] = x[a]
        A[a * P:(a + 1) * P, 1 + a] = 1.0
    rhs = lap.reshape(-1)
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    k, d = sol[0], sol[1:]
    misfit = float(np.max(_norm(lap - (k * x + d[:, None])))) / max(1.0, float(np.max(_norm(lap))))
    centre = -d / k if abs(k) > 0 else np.full(3, np.nan)
    return float(k), centre, misfit


def classify(p: Profile, grid: Grid = Grid(), thresholds: Thresholds = Thresholds(),
             order=jets.DEFAULT_ORDER) -> ClassificationVerdict:
    """Constant-R classification of the surface obtained by revolving ``p``.

    Non-unit-speed profiles are reparametrized by arc length first.
    """
    th = thresholds
    pa = ensure_arclength(p)
    s = revolve(pa)

    def compute(fr):
        lap = laplacian(fr, "III", fr.x).value
        return {"lap": lap, "x": fr.x.value, "N": fr.N.value, "R": fr.R.value, "H": fr.H.value}

    U, V, out = sweep_frames(s, grid, order, compute)
    reasons = out["_reason"]
    live = reasons == ""
    if not live.any():
        raise ExcludedSurface(f"{p.name}: surface consists only of parabolic points")
    lap = out["lap"][:, live]
    x = out["x"][:, live]
    N = out["N"][:, live]
    R = out["R"][live]
    Rmax = float(np.max(np.abs(R)))
    Rmean = float(np.mean(R))
    Rstd = float(np.std(R))
    evidence = {"evaluated": int(live.sum()), "skipped": int((~live).sum()),
                "R_mean": Rmean, "R_std": Rstd, "R_max_abs": Rmax,
                "reparametrized": pa is not p, "speed_defect": speed_defect(pa, np.unique(U))}

    if Rmax < th.zero_floor:
        res = float(np.max(_norm(lap)))
        evidence["laplacian_x_max"] = res
        if not res < th.tol:
            raise ClassificationFailure(f"{p.name}: R = 0 but max|Delta x| = {res:.3g} >= {th.tol:g}")
        return ClassificationVerdict(Verdict.CATENOID_NULL_TYPE_1, p.name, evidence, th)

    rel = Rstd / abs(Rmean)
    evidence["R_relative_spread"] = rel
    if not rel < th.const_floor:
        return ClassificationVerdict(Verdict.NOT_CONSTANT_R, p.name, evidence, th)

    res41 = float(np.max(_norm(lap + R * N) / np.maximum(1.0, np.abs(R))))
    evidence["residual_laplacian_plus_RN"] = res41
    if not res41 < th.tol:
        raise ClassificationFailure(f"{p.name}: R constant but |Delta x + R N| = {res41:.3g}")

    k, centre, misfit = _affine_type1_fit(lap, x)
    evidence["type1_misfit"] = misfit
    if misfit < th.type1_floor and abs(k) > th.zero_floor:
        radii = _norm(x - centre[:, None])
        evidence.update(eigenvalue=k, centre=[float(c) for c in centre],
                        radius_mean=float(np.mean(radii)),
                        radius_spread=float(np.max(radii) - np.min(radii)))
        return ClassificationVerdict(Verdict.SPHERE_TYPE_1, p.name, evidence, th)

    # R* = R - 2 mu vanishes at mu = R/2: x + (R/2) N should be a minimal surface
    from .parallel import offset

    mu = Rmean / 2
    base = offset(s, mu)
    fr = frame(base, U, V, order, strict=False)
    Hb = np.abs(fr.H.value[live & ~fr.invalid])
    Hmax = float(np.max(Hb)) if Hb.size else float("nan")
    evidence.update(de_offset_mu=mu, de_offset_H_max=Hmax)
    if not Hmax < th.minimality_tol:
        raise ClassificationFailure(
            f"{p.name}: constant R = {Rmean:.6g} but x + (R/2) N is not minimal (max|H| = {Hmax:.3g})")
    return ClassificationVerdict(Verdict.PARALLEL_OF_CATENOID_NULL_TYPE_2, p.name, evidence, th)


def offset_profile(p: Profile, mu: float, name=None) -> Profile:
    """Meridian of the parallel surface ``x + mu N`` of the revolved profile."""
    from .parallel import offset

    return profile_of_immersion(offset(revolve(p), mu), name or f"{p.name}+offset({mu:g})",
                                interval=p.interval)
