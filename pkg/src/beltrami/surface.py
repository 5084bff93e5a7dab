"""Immersions and pointwise first-layer geometry (fundamental forms, curvatures).

Conventions: ``N = (x_u x x_v)/|x_u x x_v|``, ``b_ij = <N, x_ij>``,
``e_ij = <N_i, N_j>``, ``K = det b / det g``, ``2H = tr(g^-1 b)``,
``R = 2H/K`` and the support function ``W = -<x, N>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .errors import IrregularPoint, ParabolicPoint
from .jets import Jet
from .report import Grid, build_report, pointwise

REGULARITY_FLOOR = 1e-9
PARABOLIC_FLOOR = 1e-6


@dataclass
class Immersion:
    """A parametric patch ``x(u, v)`` evaluated over jets.

    ``evaluator`` maps seed jets ``(u, v)`` to three coordinate jets; it may lose
    ``order_loss`` orders of accuracy (offset surfaces consume one derivative),
    which :meth:`jets` compensates by seeding at a higher order.
    """

    name: str
    evaluator: Callable[[Jet, Jet], tuple]
    domain: tuple
    order_loss: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        u0, u1, v0, v1 = self.domain
        if not (u1 > u0 and v1 > v0):
            raise ValueError(f"degenerate domain {self.domain}")

    def jets(self, u, v, order):
        """Position jets, shape ``(3, *batch)``, accurate to ``order``."""
        n = order + self.order_loss
        U = jets.seed(u, "u", n)
        V = jets.seed(v, "v", n)
        X = jets.stack(list(self.evaluator(U, V)))
        if X.order < order:
            raise jets.OrderExceeded(f"{self.name}: evaluator returned order {X.order} < {order}")
        return X.truncate(order)

    def swapped(self):
        """The same surface with the roles of u and v exchanged (flips N)."""
        u0, u1, v0, v1 = self.domain
        ev = self.evaluator
        return Immersion(f"{self.name}[swapped]", lambda u, v: ev(v, u), (v0, v1, u0, u1), self.order_loss)


def unit_normal(xd, regularity_floor=REGULARITY_FLOOR):
    """Unit normal jets from the tangent jets ``xd`` (shape ``(2, 3, ...)``).

    Returns ``(N, irregular_mask)``; irregular points get NaN normals.
    """
    n = jets.cross(xd[0], xd[1])
    area2 = jets.dot(n, n)
    a = area2.value
    irregular = ~np.isfinite(a) | (np.sqrt(np.abs(a)) < regularity_floor)
    N = n / jets.sqrt(area2.where(irregular, 1.0))
    if irregular.any():
        N = N.where(irregular, np.nan)
    return N, irregular


def _det2(t):
    return t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]


@dataclass
class Frame:
    """All first-layer data at a batch of points, held as jets.

    Jet orders (for evaluation order ``n``): ``x`` n, ``xd``/``N``/``g``/``W``
    n-1, ``xdd``/``Nd``/``b``/``e``/``K``/``H``/``R`` n-2.
    """

    surface: Immersion
    order: int
    u: Jet
    v: Jet
    x: Jet
    xd: Jet
    xdd: Jet
    N: Jet
    Nd: Jet
    g: Jet
    b: Jet
    e: Jet
    K: Jet
    H: Jet
    R: Jet
    W: Jet
    irregular: np.ndarray
    parabolic: np.ndarray

    @property
    def shape(self):
        return self.u.shape

    @property
    def invalid(self):
        return self.irregular | self.parabolic

    @property
    def reasons(self):
        r = np.full(self.shape, "", dtype=object)
        r[self.parabolic] = "parabolic"
        r[self.irregular] = "irregular"
        return r

    def cond(self, which):
        t = getattr(self, which).value
        t = np.moveaxis(t, (0, 1), (-2, -1))
        with np.errstate(invalid="ignore"):
            return np.where(self.invalid, np.nan, np.linalg.cond(np.nan_to_num(t)))

    def summary(self):
        """Plain-number view of the frame (single point or batch)."""
        return {
            "u": self.u.value,
            "v": self.v.value,
            "x": np.moveaxis(self.x.value, 0, -1),
            "N": np.moveaxis(self.N.value, 0, -1),
            "g": np.moveaxis(self.g.value, (0, 1), (-2, -1)),
            "b": np.moveaxis(self.b.value, (0, 1), (-2, -1)),
            "e": np.moveaxis(self.e.value, (0, 1), (-2, -1)),
            "K": self.K.value,
            "H": self.H.value,
            "R": self.R.value,
            "W": self.W.value,
        }


def frame(s: Immersion, u, v, order=jets.DEFAULT_ORDER, strict=True,
          regularity_floor=REGULARITY_FLOOR, parabolic_floor=PARABOLIC_FLOOR) -> Frame:
    """Evaluate the first-layer geometry of ``s`` at ``(u, v)`` (scalars or arrays).

    With ``strict`` a degenerate normal raises :class:`IrregularPoint` and a
    vanishing Gauss curvature raises :class:`ParabolicPoint`; otherwise such
    points are flagged in ``irregular``/``parabolic`` and carry placeholders.
    """
    if order < 3:
        raise ValueError("frame needs jet order >= 3")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        x = s.jets(u, v, order)
        irregular = ~np.all(np.isfinite(x.c), axis=(0, -1))
        if irregular.any():
            x = x.where(irregular, 0.0)
        xd = x.grad()
        xdd = xd.grad()
        N, irr_n = unit_normal(xd, regularity_floor)
        irregular = irregular | irr_n
        if irregular.any():
            N = N.where(irregular, np.array([0.0, 0.0, 1.0])[(...,) + (None,) * u.ndim])
        Nd = N.grad()
        g = jets.einsum("ia,ja->ij", xd, xd)
        b = jets.einsum("a,ija->ij", N, xdd)
        e = jets.einsum("ia,ja->ij", Nd, Nd)
        detg = _det2(g).where(irregular, 1.0)
        K = _det2(b) / detg
        H = 0.5 * (g[1, 1] * b[0, 0] - 2 * g[0, 1] * b[0, 1] + g[0, 0] * b[1, 1]) / detg
        parabolic = ~irregular & (np.abs(K.value) < parabolic_floor)
        R = 2 * H / K.where(irregular | parabolic, 1.0)
        W = -jets.dot(x, N)
    if strict:
        if irregular.any():
            raise IrregularPoint(f"{s.name}: surface normal degenerate at {_where(u, v, irregular)}")
        if parabolic.any():
            raise ParabolicPoint(f"{s.name}: parabolic point (|K| < {parabolic_floor}) at {_where(u, v, parabolic)}")
    return Frame(s, order, jets.seed(u, "u", order), jets.seed(v, "v", order), x, xd, xdd, N, Nd,
                 g, b, e, K, H, R, W, irregular, parabolic)


def _where(u, v, mask):
    k = np.argwhere(np.atleast_1d(mask))[0]
    uu, vv = np.atleast_1d(u)[tuple(k)], np.atleast_1d(v)[tuple(k)]
    return f"(u, v) = ({uu:.6g}, {vv:.6g})"


def check_third_form(fr: Frame):
    """Max relative deviation between ``e`` and ``2H b - K g`` per point."""
    other = 2 * fr.H * fr.b - fr.K * fr.g
    diff = np.abs(fr.e.value - other.value).max(axis=(0, 1))
    scale = np.maximum(1.0, np.abs(fr.e.value).max(axis=(0, 1)))
    return np.where(fr.invalid, np.nan, diff / scale)


def sweep_frames(s, grid, order, compute, floors=None):
    """Evaluate ``compute(frame) -> dict`` on ``grid`` with per-point fallback."""
    floors = floors or {}
    U, V = grid.points(s.domain)

    def run(u, v):
        fr = frame(s, u, v, order, strict=False, **floors)
        out = compute(fr)
        out["_reason"] = fr.reasons
        out.setdefault("cond_g", fr.cond("g"))
        out.setdefault("cond_e", fr.cond("e"))
        return out

    return U, V, pointwise(run, U, V)


def verify_weingarten(s: Immersion, grid: Grid = Grid(), tol=1e-8, order=jets.DEFAULT_ORDER, floors=None):
    """Residuals of ``N_j = -b_jk g^km x_m`` and ``N_j = -e_jk b^km x_m``."""

    def compute(fr):
        bad = fr.invalid
        gi = _inverse(fr.g, bad)
        bi = _inverse(fr.b, bad)
        shape1 = jets.einsum("jk,km->jm", fr.b, gi)
        shape2 = jets.einsum("jk,km->jm", fr.e, bi)
        r1 = fr.Nd + jets.einsum("jm,ma->ja", shape1, fr.xd)
        r2 = fr.Nd + jets.einsum("jm,ma->ja", shape2, fr.xd)
        scale = np.maximum(1.0, np.linalg.norm(fr.Nd.value, axis=1))
        res1 = (np.linalg.norm(r1.value, axis=1) / scale).max(axis=0)
        res2 = (np.linalg.norm(r2.value, axis=1) / scale).max(axis=0)
        return {"residual": np.maximum(res1, res2), "via_I": res1, "via_III": res2}

    U, V, out = sweep_frames(s, grid, order, compute, floors)
    return build_report(
        "weingarten", s.name, grid, U, V, out["residual"], out["_reason"], tol,
        out["cond_g"], out["cond_e"],
        max_via_I=_nanmax(out["via_I"]), max_via_III=_nanmax(out["via_III"]),
    )


def _inverse(t, bad):
    det = _det2(t).where(bad, 1.0)
    return jets.stack([jets.stack([t[1, 1], -t[0, 1]]), jets.stack([-t[1, 0], t[0, 0]])]) / det


def _nanmax(a):
    a = np.asarray(a, dtype=float)
    return float(np.nanmax(a)) if np.isfinite(a).any() else float("nan")
