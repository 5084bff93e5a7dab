"""Built-in surfaces and profile curves with safe default domains."""

from __future__ import annotations

import math
import re

from . import expr
from .surface import Immersion

TWO_PI = 2 * math.pi


def surface_from_exprs(name, x1, x2, x3, domain, **meta):
    """Immersion whose coordinates are expression strings in ``u`` and ``v``."""
    nodes = [expr.compile_field(src) for src in (x1, x2, x3)]

    def evaluator(u, v):
        return tuple(expr.eval_jet(n, u, v) for n in nodes)

    meta = dict(meta, exprs=(x1, x2, x3))
    return Immersion(name, evaluator, tuple(float(d) for d in domain), meta=meta)


def _num(x):
    return repr(float(x))


def sphere(radius=1.0):
    r = _num(radius)
    name = "unit-sphere" if radius == 1 else f"sphere({radius:g})"
    return surface_from_exprs(
        name, f"{r}*sin(u)*cos(v)", f"{r}*sin(u)*sin(v)", f"{r}*cos(u)",
        (0.0, math.pi, 0.0, TWO_PI), minimal=False, constant_R=True,
    )


def catenoid():
    return surface_from_exprs(
        "catenoid", "cosh(u)*cos(v)", "cosh(u)*sin(v)", "u",
        (-1.5, 1.5, 0.0, TWO_PI), minimal=True, constant_R=True,
    )


def torus(a=2.0, r=1.0):
    A, Rr = _num(a), _num(r)
    # |u| near pi/2 are the parabolic circles
    return surface_from_exprs(
        "torus" if (a, r) == (2.0, 1.0) else f"torus({a:g},{r:g})",
        f"({A} + {Rr}*cos(u))*cos(v)", f"({A} + {Rr}*cos(u))*sin(v)", f"{Rr}*sin(u)",
        (-1.2, 1.2, 0.0, TWO_PI), minimal=False,
    )


def ellipsoid(a=1.0, b=1.2, c=0.8):
    A, B, C = _num(a), _num(b), _num(c)
    return surface_from_exprs(
        "ellipsoid" if (a, b, c) == (1.0, 1.2, 0.8) else f"ellipsoid({a:g},{b:g},{c:g})",
        f"{A}*sin(u)*cos(v)", f"{B}*sin(u)*sin(v)", f"{C}*cos(u)",
        (0.3, math.pi - 0.3, 0.0, TWO_PI), minimal=False,
    )


def helicoid():
    return surface_from_exprs(
        "helicoid", "u*cos(v)", "u*sin(v)", "v", (-1.5, 1.5, 0.0, TWO_PI), minimal=True,
    )


def enneper():
    return surface_from_exprs(
        "enneper", "u - u^3/3 + u*v^2", "v - v^3/3 + v*u^2", "u^2 - v^2",
        (-1.0, 1.0, -1.0, 1.0), minimal=True,
    )


def cylinder():
    return surface_from_exprs(
        "cylinder", "cos(v)", "sin(v)", "u", (-1.0, 1.0, 0.0, TWO_PI), minimal=False, parabolic=True,
    )


def plane():
    return surface_from_exprs(
        "plane", "u", "v", "0", (-1.0, 1.0, -1.0, 1.0), minimal=True, parabolic=True,
    )


SURFACES = {
    "unit-sphere": (sphere, "round sphere of radius 1, u polar angle in (0, pi)"),
    "sphere": (sphere, "sphere(radius), centred at the origin (default radius 2 via sphere(2))"),
    "catenoid": (catenoid, "catenoid (cosh u cos v, cosh u sin v, u), u in [-1.5, 1.5]"),
    "torus": (torus, "torus(a, r) patch, default a=2 r=1, u in [-1.2, 1.2] away from parabolic circles"),
    "ellipsoid": (ellipsoid, "ellipsoid(a, b, c) patch, default (1, 1.2, 0.8), u in [0.3, pi-0.3]"),
    "helicoid": (helicoid, "helicoid (u cos v, u sin v, v), u in [-1.5, 1.5]"),
    "enneper": (enneper, "Enneper surface patch on [-1, 1]^2"),
    "cylinder": (cylinder, "circular cylinder: parabolic everywhere, rejected by every check"),
    "plane": (plane, "plane: parabolic everywhere, rejected by every check"),
}


# -- profiles ------------------------------------------------------------------

PROFILES = {
    "circle-arc": ("sin(u)", "-cos(u)", (0.2, math.pi - 0.2), "unit-speed circle arc (revolves to the unit sphere)"),
    "catenary": ("cosh(u)", "u", (-1.5, 1.5), "catenary (revolves to the catenoid; not unit speed)"),
    "torus-profile": ("2 + cos(u)", "sin(u)", (-1.2, 1.2), "unit-speed circle of radius 1 about (2, 0)"),
    "unit-catenary": ("sqrt(1 + u^2)", "ln(u + sqrt(1 + u^2))", (-2.0, 2.0), "catenary in arc length"),
    "line": ("1", "u", (-1.0, 1.0), "straight segment (revolves to a cylinder; rejected)"),
}

_CALL = re.compile(r"^\s*([A-Za-z][\w-]*)\s*(?:\((.*)\))?\s*$")


def parse_name(text):
    """Split ``"torus(2, 0.5)"`` into ``("torus", [2.0, 0.5])``."""
    m = _CALL.match(text)
    if not m:
        raise KeyError(text)
    args = [float(a) for a in m.group(2).split(",")] if m.group(2) and m.group(2).strip() else []
    return m.group(1), args


def get_surface(text):
    name, args = parse_name(text)
    if name not in SURFACES:
        raise KeyError(f"unknown surface {name!r}")
    factory = SURFACES[name][0]
    if name == "sphere" and not args:
        args = [2.0]
    return factory(*args)


def get_profile(text):
    from .revolution import Profile

    name, args = parse_name(text)
    if name not in PROFILES:
        raise KeyError(f"unknown profile {name!r}")
    f, g, interval, _ = PROFILES[name]
    return Profile.from_exprs(name, f, g, interval)


def listing():
    rows = []
    for name, (factory, desc) in SURFACES.items():
        s = factory() if name != "sphere" else factory(2.0)
        rows.append(("surface", name, s.domain, desc))
    for name, (f, g, interval, desc) in PROFILES.items():
        rows.append(("profile", name, interval, f"f = {f}, g = {g}; {desc}"))
    return rows
