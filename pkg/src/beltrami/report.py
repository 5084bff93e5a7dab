"""Sample grids, residual reports and the sweep driver shared by all verifiers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import GeometryError, JetError


@dataclass(frozen=True)
class Grid:
    rows: int = 24
    cols: int = 24
    inset: float = 0.05

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ValueError("grid must be at least 2x2")
        if not 0 <= self.inset < 0.5:
            raise ValueError("inset must lie in [0, 0.5)")

    @property
    def shape(self):
        return (self.rows, self.cols)

    def points(self, domain):
        """Parameter arrays ``(U, V)`` of shape ``(rows, cols)`` inside ``domain``."""
        u0, u1, v0, v1 = domain
        du, dv = (u1 - u0) * self.inset, (v1 - v0) * self.inset
        us = np.linspace(u0 + du, u1 - du, self.rows)
        vs = np.linspace(v0 + dv, v1 - dv, self.cols)
        return np.meshgrid(us, vs, indexing="ij")


@dataclass
class Report:
    identity: str
    surface: str
    grid: tuple
    evaluated: int
    skipped: int
    skip_reasons: dict
    residual_max: float
    residual_mean: float
    argmax: tuple | None
    tol: float
    status: str
    cond_g: float | None = None
    cond_e: float | None = None
    details: dict = field(default_factory=dict)
    # per-point arrays (u, v, residual, reason) for CSV export; not part of to_dict
    points: dict | None = field(default=None, repr=False, compare=False)

    @property
    def passed(self):
        return self.status != "fail"

    def to_dict(self):
        d = asdict(replace(self, points=None))
        d.pop("points")
        return d


def not_applicable(identity, surface, grid, tol, reason, **details):
    return Report(
        identity=identity,
        surface=surface,
        grid=tuple(grid.shape),
        evaluated=0,
        skipped=grid.rows * grid.cols,
        skip_reasons={reason: grid.rows * grid.cols},
        residual_max=0.0,
        residual_mean=0.0,
        argmax=None,
        tol=tol,
        status="n/a",
        details=details,
    )


def build_report(identity, surface, grid, U, V, residual, reasons, tol, cond_g=None, cond_e=None, **details):
    """Assemble a :class:`Report` from a residual array and per-point skip reasons.

    ``reasons`` is an object array with ``""`` at evaluated points.
    """
    residual = np.asarray(residual, dtype=float)
    reasons = np.asarray(reasons, dtype=object)
    skip = reasons != ""
    bad = ~np.isfinite(residual) & ~skip
    if bad.any():
        reasons = reasons.copy()
        reasons[bad] = "non-finite"
        skip = skip | bad
    counts = {}
    for r in reasons[skip].ravel():
        counts[r] = counts.get(r, 0) + 1
    live = residual[~skip]
    if live.size:
        flat = np.where(skip, -np.inf, residual)
        k = np.unravel_index(int(np.argmax(flat)), flat.shape)
        rmax = float(live.max())
        rmean = float(live.mean())
        argmax = (float(U[k]), float(V[k]))
        cg = None if cond_g is None else float(np.asarray(cond_g)[k])
        ce = None if cond_e is None else float(np.asarray(cond_e)[k])
    else:
        rmax = rmean = float("nan")
        argmax = cg = ce = None
    # a check with nothing evaluated cannot pass
    status = "pass" if live.size and rmax <= tol else "fail"
    return Report(
        identity=identity,
        surface=surface,
        grid=tuple(residual.shape),
        evaluated=int(live.size),
        skipped=int(skip.sum()),
        skip_reasons=dict(sorted(counts.items())),
        residual_max=rmax,
        residual_mean=rmean,
        argmax=argmax,
        tol=tol,
        status=status,
        cond_g=cg,
        cond_e=ce,
        details=details,
        points={"u": np.asarray(U, dtype=float), "v": np.asarray(V, dtype=float),
                "residual": residual, "reason": reasons},
    )


def pointwise(compute, U, V):
    """Run ``compute(U, V) -> dict of arrays`` on a whole grid at once.

    If the batched evaluation fails (a domain error at a few points), fall back
    to point-by-point evaluation and mark failing points with the error name
    under the ``"_reason"`` key.
    """
    try:
        out = compute(U, V)
        out.setdefault("_reason", np.full(U.shape, "", dtype=object))
        return out
    except (JetError, GeometryError):
        pass
    results = {}
    reasons = np.full(U.shape, "", dtype=object)
    for idx in np.ndindex(U.shape):
        try:
            point = compute(U[idx], V[idx])
        except (JetError, GeometryError) as exc:
            reasons[idx] = type(exc).__name__
            continue
        for key, val in point.items():
            if key == "_reason":
                reasons[idx] = val
                continue
            if key not in results:
                results[key] = np.full(U.shape + np.shape(val), np.nan)
            results[key][idx] = val
    results["_reason"] = reasons
    return results
