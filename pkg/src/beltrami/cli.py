"""Command-line front end: ``beltrami catalog | check | classify | frame | offset``.

Exit codes: 0 when every check passes (or a classification is reached),
1 on an identity failure or numerical failure, 2 on a configuration error
(including surfaces that consist only of parabolic points).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, catalog, expr, identities, jets, parallel, revolution, surface
from .errors import BeltramiError, ExcludedSurface, ExprError, GeometryError, JetError
from .report import Grid, not_applicable
from .tensor import christoffel_symbols

SURFACE_IDENTITIES = (
    "weingarten",
    "grad-identities",
    "position-laplacian",
    "gauss-map",
    "support-function",
    "corollary1",
    "product-rules",
    "theorem1",
    "R-gradient",
    "difference-tensors",
    "offset-curvatures",
    "shared-third-form",
)
PROFILE_IDENTITIES = ("component-laplacians", "R-formulas", "closed-form-operator", "iterated-laplacian")
IDENTITIES = SURFACE_IDENTITIES + PROFILE_IDENTITIES + ("all",)

DEFAULT_FIELDS = ("sin(u)*cos(v)", "u^2 + u*v", "exp(u/3)*cos(2*v)")
DEFAULT_MU = (0.1, 0.3, 0.5)

# identity -> default tolerance (overridden globally by --tol)
DEFAULT_TOLS = {
    "weingarten": 1e-8,
    "difference-tensors": 1e-8,
    "shared-third-form": 1e-9,
    "closed-form-operator": 1e-8,
    "R-formulas": 1e-8,
    "iterated-laplacian": 1e-6,
}


class ConfigError(Exception):
    pass


@dataclass
class Settings:
    grid: Grid = field(default_factory=Grid)
    tol: float | None = None
    jet_order: int = jets.DEFAULT_ORDER
    fmt: str = "human"
    out: str | None = None
    seed: int = 0
    fields: tuple = DEFAULT_FIELDS
    mu: tuple = DEFAULT_MU
    random_fields: int = 50
    m_max: int = 2
    floors: dict = field(default_factory=dict)
    thresholds: revolution.Thresholds = field(default_factory=revolution.Thresholds)
    timings: bool = False
    surfaces: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)
    definitions: dict = field(default_factory=dict)

    def tol_for(self, identity):
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOLS.get(identity, identities.DEFAULT_TOL)

    def echo(self):
        return {
            "grid": [self.grid.rows, self.grid.cols],
            "inset": self.grid.inset,
            "tol": self.tol,
            "jet_order": self.jet_order,
            "seed": self.seed,
            "fields": list(self.fields),
            "mu": list(self.mu),
            "random_fields": self.random_fields,
            "m_max": self.m_max,
            "floors": dict(sorted(self.floors.items())),
            "thresholds": dict(self.thresholds.__dict__),
            "definitions": self.definitions,
        }


# -- config ----------------------------------------------------------------------


def parse_grid(text):
    try:
        r, c = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"grid must look like 24x24, got {text!r}") from None
    if r < 2 or c < 2:
        raise ConfigError("grid must be at least 2x2")
    return r, c


def _floats(text, n=None, what="value"):
    try:
        vals = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot read {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals


def _positive(name, x):
    if not (x > 0 and math.isfinite(x)):
        raise ConfigError(f"{name} must be positive, got {x}")
    return x


def load_config(path):
    """Read an INI file into a plain dict of option overrides and definitions.

    ``[run]`` holds option defaults; ``[surface NAME]`` sections define
    immersions (keys x1, x2, x3, domain) and ``[profile NAME]`` sections
    define profile curves (keys f, g, interval).
    """
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    run = dict(cp["run"]) if cp.has_section("run") else {}
    surfaces, profiles = {}, {}
    for sec in cp.sections():
        kind, _, name = sec.partition(" ")
        name = name.strip()
        if kind == "surface" and name:
            surfaces[name] = dict(cp[sec])
        elif kind == "profile" and name:
            profiles[name] = dict(cp[sec])
        elif sec != "run":
            raise ConfigError(f"unknown config section [{sec}]")
    return {"run": run, "surfaces": surfaces, "profiles": profiles}


def _option(args, run, key, conv, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key.replace("_", "-") in run or key in run:
        raw = run.get(key, run.get(key.replace("_", "-")))
        try:
            return conv(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return default


def build_settings(args) -> Settings:
    cfg = load_config(args.config) if getattr(args, "config", None) else {"run": {}, "surfaces": {}, "profiles": {}}
    run = cfg["run"]
    rows, cols = parse_grid(_option(args, run, "grid", str, "24x24"))
    inset = _option(args, run, "inset", float, 0.05)
    if not 0 <= inset < 0.5:
        raise ConfigError("inset must lie in [0, 0.5)")
    order = _option(args, run, "jet_order", int, jets.DEFAULT_ORDER)
    if not 3 <= order <= 7:
        raise ConfigError(f"jet order must be in [3, 7], got {order}")
    tol = _option(args, run, "tol", float, None)
    if tol is not None:
        _positive("tol", tol)
    fields = getattr(args, "field", None) or (
        [f.strip() for f in run["fields"].split(";") if f.strip()] if "fields" in run else list(DEFAULT_FIELDS))
    for f in fields:
        expr.compile_field(f)
    mu = getattr(args, "mu", None) or (_floats(run["mu"], what="mu") if "mu" in run else list(DEFAULT_MU))
    if any(m == 0 for m in mu):
        raise ConfigError("offset distance mu must be non-zero")
    floors = {}
    for key in ("regularity_floor", "parabolic_floor"):
        val = _option(args, run, key, float, None)
        if val is not None:
            floors[key] = _positive(key, val)
    th = revolution.Thresholds()
    th_over = {}
    for key in th.__dict__:
        if key in run:
            th_over[key] = _positive(key, _option(argparse.Namespace(), run, key, float, None))
    th = revolution.Thresholds(**{**th.__dict__, **th_over})
    st = Settings(
        grid=Grid(rows, cols, inset),
        tol=tol,
        jet_order=order,
        fmt=_option(args, run, "format", str, "human"),
        out=getattr(args, "out", None),
        seed=_option(args, run, "seed", int, 0),
        fields=tuple(fields),
        mu=tuple(float(m) for m in mu),
        random_fields=_option(args, run, "random_fields", int, 50),
        m_max=_option(args, run, "m_max", int, 2),
        floors=floors,
        thresholds=th,
        timings=bool(getattr(args, "timings", False)),
    )
    if st.fmt not in ("human", "machine", "csv"):
        raise ConfigError(f"unknown format {st.fmt!r}")
    if not 1 <= st.m_max <= 3:
        raise ConfigError("m_max must be 1, 2 or 3")
    for name, sec in cfg["surfaces"].items():
        try:
            dom = _floats(sec["domain"], 4, "domain")
            st.surfaces[name] = catalog.surface_from_exprs(name, sec["x1"], sec["x2"], sec["x3"], dom)
        except KeyError as exc:
            raise ConfigError(f"surface {name} is missing key {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"surface {name}: {exc}") from None
        st.definitions[f"surface {name}"] = dict(sorted(sec.items()))
    for name, sec in cfg["profiles"].items():
        try:
            iv = _floats(sec["interval"], 2, "interval")
            st.profiles[name] = revolution.Profile.from_exprs(name, sec["f"], sec["g"], iv)
        except KeyError as exc:
            raise ConfigError(f"profile {name} is missing key {exc}") from None
        st.definitions[f"profile {name}"] = dict(sorted(sec.items()))
    return st


def resolve(name, st: Settings):
    """``("surface", Immersion)`` or ``("profile", Profile)`` for a name."""
    if name in st.surfaces:
        return "surface", st.surfaces[name]
    if name in st.profiles:
        return "profile", st.profiles[name]
    base, _ = catalog.parse_name(name) if catalog._CALL.match(name) else (name, None)
    if base in catalog.PROFILES:
        return "profile", catalog.get_profile(name)
    try:
        return "surface", catalog.get_surface(name)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"unknown surface or profile {name!r} ({exc})") from None


# -- running checks -------------------------------------------------------------


def _require_nonparabolic(s, st: Settings):
    U, V = st.grid.points(s.domain)
    fr = surface.frame(s, U, V, st.jet_order, strict=False, **st.floors)
    if fr.invalid.all():
        if fr.parabolic.any():
            raise ExcludedSurface(f"{s.name}: surface consists only of parabolic points")
        raise ExcludedSurface(f"{s.name}: surface has no regular points on the grid")


def _field(src):
    return identities.expr_field(src)


def random_fields(st: Settings, n=None):
    rng = np.random.default_rng(st.seed)
    return [expr.unparse(expr.random_expression(rng, 4)) for _ in range(st.random_fields if n is None else n)]


def run_identity(identity, kind, target, st: Settings):
    """Reports for one identity on a surface or profile (a list, possibly of several)."""
    g, n, fl = st.grid, st.jet_order, st.floors
    tol = st.tol_for(identity)
    if kind == "profile":
        prof = revolution.ensure_arclength(target)
        s = revolution.revolve(prof)
    else:
        prof, s = None, target
    if identity == "weingarten":
        return [surface.verify_weingarten(s, g, tol, n, fl)]
    if identity == "grad-identities":
        return [r for f in st.fields for r in identities.verify_gradient_identities(s, _field(f), g, tol, n, fl)]
    if identity == "product-rules":
        return [r for f in st.fields for r in identities.verify_product_rules(s, _field(f), g, tol, n, fl)]
    simple = {
        "position-laplacian": identities.verify_position_laplacian,
        "gauss-map": identities.verify_gauss_map_laplacian,
        "support-function": identities.verify_support_function,
        "corollary1": identities.verify_corollary1,
        "theorem1": identities.verify_theorem1,
        "R-gradient": identities.verify_R_gradient,
        "difference-tensors": identities.verify_difference_tensors,
    }
    if identity in simple:
        return [simple[identity](s, g, tol, n, fl)]
    if identity == "offset-curvatures":
        return [parallel.verify_offset_curvatures(s, mu, g, tol, n, fl) for mu in st.mu]
    if identity == "shared-third-form":
        return [parallel.verify_shared_third_form(s, mu, g, tol, n, fl) for mu in st.mu]
    if identity in PROFILE_IDENTITIES and prof is None:
        return [not_applicable(identity, s.name, g, tol, "not a surface of revolution")]
    if identity == "component-laplacians":
        return [revolution.verify_component_laplacians(prof, g, tol, n)]
    if identity == "R-formulas":
        return [revolution.verify_R_formulas(prof, g, tol, n)]
    if identity == "closed-form-operator":
        return [revolution.verify_closed_form_operator(prof, random_fields(st), g, tol, n)]
    if identity == "iterated-laplacian":
        return [revolution.verify_iterated_laplacian(prof, st.m_max, g, tol, st.thresholds.const_floor)]
    raise ConfigError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITIES)}")


def run_check(name, identity, st: Settings, timings=None):
    kind, target = resolve(name, st)
    if identity not in IDENTITIES:
        raise ConfigError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITIES)}")
    if kind == "profile":
        target = revolution.ensure_arclength(target)
    s = revolution.revolve(target) if kind == "profile" else target
    _require_nonparabolic(s, st)
    todo = (SURFACE_IDENTITIES + (PROFILE_IDENTITIES if kind == "profile" else ())) if identity == "all" else (identity,)
    reports = []
    for ident in todo:
        t0 = time.perf_counter()
        reports.extend(run_identity(ident, kind, target, st))
        if timings is not None:
            timings[f"{name}:{ident}"] = time.perf_counter() - t0
    return reports


# -- output ----------------------------------------------------------------------


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to JSON-friendly Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def dumps(obj, indent=0):
    """JSON text with every float written to 17 significant digits (NaN/inf as null)."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def run_report(st: Settings, reports=(), verdicts=(), frames=(), timings=None):
    return _plain({
        "version": __version__,
        "config": st.echo(),
        "reports": [r.to_dict() for r in reports],
        "verdicts": [v.to_dict() for v in verdicts],
        "frames": list(frames),
        "timings": timings if st.timings else None,
    })


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.3e}"
    return str(x)


def render_human(doc):
    buf = io.StringIO()
    reps = doc["reports"]
    if reps:
        head = f"{'identity':<26} {'surface':<34} {'status':<6} {'eval':>5} {'skip':>5} {'max residual':>13} {'tol':>9}"
        print(head, file=buf)
        print("-" * len(head), file=buf)
        for r in reps:
            print(f"{r['identity']:<26} {r['surface']:<34} {r['status']:<6} {r['evaluated']:>5} "
                  f"{r['skipped']:>5} {_fmt(r['residual_max']):>13} {_fmt(r['tol']):>9}", file=buf)
            if r["skip_reasons"] and r["status"] != "n/a":
                print(f"{'':<27}skipped: {r['skip_reasons']}", file=buf)
            if r["status"] == "n/a":
                print(f"{'':<27}not applicable: {', '.join(r['skip_reasons'])}", file=buf)
        npass = sum(r["status"] == "pass" for r in reps)
        nfail = sum(r["status"] == "fail" for r in reps)
        print(f"\n{npass} passed, {nfail} failed, {len(reps) - npass - nfail} not applicable", file=buf)
    for v in doc["verdicts"]:
        print(f"profile {v['profile']}: {v['kind']}", file=buf)
        for k, val in v["evidence"].items():
            print(f"  {k:<28} {_fmt(val) if isinstance(val, float) else val}", file=buf)
    for fr in doc["frames"]:
        for k, val in fr.items():
            print(f"{k:<12} {val}", file=buf)
    if doc["timings"]:
        print("\ntimings (s):", file=buf)
        for k, val in doc["timings"].items():
            print(f"  {k:<40} {val:.3f}", file=buf)
    return buf.getvalue()


def render_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["identity", "surface", "u", "v", "residual", "reason"])
    for r in reports:
        if not r.points:
            continue
        p = r.points
        for idx in np.ndindex(p["u"].shape):
            w.writerow([r.identity, r.surface, format(float(p["u"][idx]), ".17g"),
                        format(float(p["v"][idx]), ".17g"), format(float(p["residual"][idx]), ".17g"),
                        p["reason"][idx]])
    return buf.getvalue()


def emit(st: Settings, doc, reports=()):
    if st.fmt == "machine":
        text = dumps(doc) + "\n"
    elif st.fmt == "csv":
        text = render_csv(reports)
    else:
        text = render_human(doc)
    if st.out:
        with open(st.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- verbs -------------------------------------------------------------------------


def cmd_catalog(args, st):
    rows = catalog.listing()
    for name, sec in st.definitions.items():
        kind, _, nm = name.partition(" ")
        obj = st.surfaces.get(nm) if kind == "surface" else st.profiles.get(nm)
        dom = obj.domain if kind == "surface" else obj.interval
        rows.append((kind, nm, dom, "from config"))
    if st.fmt == "machine":
        doc = [{"kind": k, "name": n, "domain": list(d), "description": desc} for k, n, d, desc in rows]
        text = dumps(_plain(doc)) + "\n"
    else:
        lines = []
        for k, n, d, desc in rows:
            dom = ", ".join(f"{x:.4g}" for x in d)
            lines.append(f"{k:<8} {n:<14} [{dom}]  {desc}")
        text = "\n".join(lines) + "\n"
    if st.out:
        with open(st.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args, st):
    timings = {}
    reports = []
    for name in args.surface:
        reports.extend(run_check(name, args.identity, st, timings))
    emit(st, run_report(st, reports, timings=timings), reports)
    return 0 if all(r.passed for r in reports) else 1


def cmd_offset(args, st):
    kind, target = resolve(args.surface, st)
    s = revolution.revolve(revolution.ensure_arclength(target)) if kind == "profile" else target
    _require_nonparabolic(s, st)
    timings = {}
    t0 = time.perf_counter()
    reports = run_identity("offset-curvatures", "surface", s, st) + run_identity("shared-third-form", "surface", s, st)
    timings[f"{args.surface}:offset"] = time.perf_counter() - t0
    emit(st, run_report(st, reports, timings=timings), reports)
    return 0 if all(r.passed for r in reports) else 1


def cmd_classify(args, st):
    kind, target = resolve(args.profile, st)
    if kind != "profile":
        raise ConfigError(f"{args.profile!r} is a surface; classify takes a profile curve")
    timings = {}
    t0 = time.perf_counter()
    if args.offset is not None:
        if args.offset == 0:
            raise ConfigError("offset distance must be non-zero")
        target = revolution.offset_profile(target, args.offset)
    verdict = revolution.classify(target, st.grid, st.thresholds, st.jet_order)
    timings[f"{args.profile}:classify"] = time.perf_counter() - t0
    emit(st, run_report(st, verdicts=[verdict], timings=timings))
    return 0


def _frame_dump(s, u, v, st, forms):
    fr = surface.frame(s, u, v, st.jet_order, **st.floors)
    out = {"surface": s.name, "u": u, "v": v}
    summ = fr.summary()
    for key in ("x", "N", "g", "b", "e", "K", "H", "R", "W"):
        out[key] = summ[key]
    out["e_eigenvalues"] = np.linalg.eigvalsh(summ["e"])
    for J in forms:
        out[f"christoffel_{J}"] = christoffel_symbols(fr, J).value  # [k, i, j]
    return _plain(out)


def cmd_frame(args, st):
    kind, target = resolve(args.surface, st)
    s = revolution.revolve(revolution.ensure_arclength(target)) if kind == "profile" else target
    forms = args.form or ["III"]
    try:
        dump = _frame_dump(s, args.u, args.v, st, forms)
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    emit(st, run_report(st, frames=[dump]))
    return 0


# -- argument parsing ----------------------------------------------------------------


def _common_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--grid", help="sample grid RxC (default 24x24)")
    g.add_argument("--tol", type=float, help="tolerance for every identity (default: per identity)")
    g.add_argument("--jet-order", dest="jet_order", type=int, help="jet truncation order, 3..7 (default 5)")
    g.add_argument("--inset", type=float, help="fraction of the domain trimmed at each edge (default 0.05)")
    g.add_argument("--format", choices=("human", "machine", "csv"), help="output format (default human)")
    g.add_argument("--out", help="write the report to this file instead of stdout")
    g.add_argument("--seed", type=int, help="seed for randomized test fields (default 0)")
    g.add_argument("--config", help="INI file with [run] options and surface/profile definitions")
    g.add_argument("--timings", action="store_true", default=None,
                   help="include wall-clock timings (makes machine output non-reproducible)")
    g.add_argument("--regularity-floor", dest="regularity_floor", type=float)
    g.add_argument("--parabolic-floor", dest="parabolic_floor", type=float)
    return p


def build_parser():
    common = _common_flags()
    # global options live on each verb so they may follow it
    parser = argparse.ArgumentParser(prog="beltrami",
                                     description="Third-fundamental-form Beltrami operators on parametric surfaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("catalog", parents=[common], help="list built-in surfaces and profiles")

    pc = sub.add_parser("check", parents=[common], help="verify an identity on a surface or profile")
    pc.add_argument("surface", nargs="+", help="surface or profile name, e.g. torus or 'torus(2,0.5)'")
    pc.add_argument("identity", help=f"one of: {', '.join(IDENTITIES)}")
    pc.add_argument("--field", action="append", help="test field expression in u, v (repeatable)")
    pc.add_argument("--mu", type=float, action="append", help="offset distance (repeatable)")

    pk = sub.add_parser("classify", parents=[common], help="constant-R classification of a profile")
    pk.add_argument("profile")
    pk.add_argument("--offset", type=float, help="classify the parallel surface at this distance instead")

    pf = sub.add_parser("frame", parents=[common], help="dump the geometry at one point")
    pf.add_argument("surface")
    pf.add_argument("u", type=float)
    pf.add_argument("v", type=float)
    pf.add_argument("--form", action="append", choices=("I", "II", "III"),
                    help="Christoffel symbols to print (repeatable, default III)")

    po = sub.add_parser("offset", parents=[common], help="parallel-surface laws for a surface")
    po.add_argument("surface")
    po.add_argument("--mu", type=float, action="append", help="offset distance (repeatable)")
    return parser


VERBS = {"catalog": cmd_catalog, "check": cmd_check, "classify": cmd_classify,
         "frame": cmd_frame, "offset": cmd_offset}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        st = build_settings(args)
        return VERBS[args.verb](args, st)
    except (ConfigError, ExprError, ExcludedSurface) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (JetError, GeometryError, BeltramiError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
