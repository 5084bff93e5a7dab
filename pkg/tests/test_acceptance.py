"""Acceptance criteria, one test per criterion.

Every criterion runs at jet order 5 on 24x24 grids, must finish within 60 s,
and prints a single PASS/FAIL line with its headline numbers.  The module can
also be run as a script: ``python3 tests/test_acceptance.py``.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from beltrami import catalog, expr, identities, jets, parallel, revolution  # noqa: E402
from beltrami.jets import Jet  # noqa: E402
from beltrami.report import Grid  # noqa: E402
from beltrami.revolution import Profile, Verdict  # noqa: E402
from oracles import fd_partial  # noqa: E402

GRID = Grid(24, 24)
ORDER = 5
TIME_LIMIT = 60.0

NONPARABOLIC = ("unit-sphere", "sphere", "catenoid", "torus", "ellipsoid", "helicoid", "enneper")
PARABOLIC_ONLY = ("cylinder", "plane")
PROFILES = ("circle-arc", "catenary", "torus-profile", "unit-catenary")


class Outcome:
    """Collects named sub-checks; the criterion passes when all of them do."""

    def __init__(self):
        self.parts = []

    def check(self, label, ok, value=None):
        self.parts.append((label, bool(ok), value))
        return ok

    def report(self, rep, label=None):
        return self.check(label or f"{rep.identity}@{rep.surface}", rep.status == "pass", rep.residual_max)

    @property
    def passed(self):
        return bool(self.parts) and all(ok for _, ok, _ in self.parts)

    def summary(self):
        failed = [p for p in self.parts if not p[1]]
        shown = failed or self.parts
        worst = [v for _, _, v in self.parts if isinstance(v, float) and math.isfinite(v)]
        head = f"{len(self.parts) - len(failed)}/{len(self.parts)} checks"
        if worst and not failed:
            head += f", worst {max(worst):.2e}"
        if failed:
            head += "; failed: " + ", ".join(f"{n} ({v})" for n, _, v in shown[:4])
        return head


# -- criteria -------------------------------------------------------------------------


def gauss_map_law():
    """Delta^III N = 2N below 1e-7 on every catalog surface at its non-parabolic points."""
    out = Outcome()
    for name in NONPARABOLIC:
        out.report(identities.verify_gauss_map_laplacian(catalog.get_surface(name), GRID, 1e-7, ORDER))
    for name in PROFILES:
        s = revolution.revolve(revolution.ensure_arclength(catalog.get_profile(name)))
        out.report(identities.verify_gauss_map_laplacian(s, GRID, 1e-7, ORDER))
    for name in PARABOLIC_ONLY:
        rep = identities.verify_gauss_map_laplacian(catalog.get_surface(name), GRID, 1e-7, ORDER)
        # no non-parabolic points exist, so there is nothing to evaluate
        out.check(f"{name} all parabolic", rep.evaluated == 0 and set(rep.skip_reasons) == {"parabolic"})
    return out


def position_vector_law():
    """Delta^III x - grad^III(R, N) + R N below 1e-7 (normalized)."""
    out = Outcome()
    for name in ("sphere", "catenoid", "torus", "ellipsoid"):
        out.report(identities.verify_position_laplacian(catalog.get_surface(name), GRID, 1e-7, ORDER))
    return out


def support_function_law():
    """Delta^III W = 2W - R on the same set; Delta^III W = 2W on minimal surfaces."""
    out = Outcome()
    for name in ("sphere", "catenoid", "torus", "ellipsoid"):
        out.report(identities.verify_support_function(catalog.get_surface(name), GRID, 1e-7, ORDER))
    for name in ("catenoid", "helicoid", "enneper"):
        out.report(identities.verify_corollary1(catalog.get_surface(name), GRID, 1e-7, ORDER))
    return out


def cross_form_identities():
    """Gradient identities at 1e-7 and difference tensors at 1e-8 on the torus, 3 fields."""
    out = Outcome()
    s = catalog.torus()
    for src in ("sin(u)*cos(v)", "u^2 + u*v", "exp(u/3)*cos(2*v)"):
        for rep in identities.verify_gradient_identities(s, identities.expr_field(src), GRID, 1e-7, ORDER):
            out.report(rep, f"{rep.identity}[{src}]")
    rep = identities.verify_difference_tensors(s, GRID, 1e-8, ORDER)
    out.report(rep)
    out.check("position chain", rep.details["position_chain"] < 1e-8, rep.details["position_chain"])
    return out


def offset_laws():
    """Torus offset laws at 1e-7, e = e* at 1e-9, catenoid offsets with R* = -2 mu."""
    out = Outcome()
    torus = catalog.torus()
    for mu in (0.1, 0.3, 0.5):
        out.report(parallel.verify_offset_curvatures(torus, mu, GRID, 1e-7, ORDER), f"K*,H*,R* mu={mu}")
        out.report(parallel.verify_shared_third_form(torus, mu, GRID, 1e-9, ORDER), f"e=e* mu={mu}")
    for mu in (0.1, 0.3, 0.5):
        rep = parallel.verify_offset_curvatures(catalog.catenoid(), mu, GRID, 1e-7, ORDER)
        out.report(rep, f"catenoid laws mu={mu}")
        out.check(f"catenoid std(R*) mu={mu}", rep.details["R_star_std"] < 1e-8, rep.details["R_star_std"])
        dev = abs(rep.details["R_star_mean"] + 2 * mu)
        out.check(f"catenoid mean(R*) mu={mu}", dev <= 1e-7, dev)
    return out


def closed_form_operator():
    """Closed-form Delta^III vs the tensor operator on 50 random fields; triple agreement."""
    out = Outcome()
    rng = np.random.default_rng(0)
    fields = [expr.unparse(expr.random_expression(rng, 4)) for _ in range(50)]
    for name in ("circle-arc", "catenary"):
        out.report(revolution.verify_closed_form_operator(catalog.get_profile(name), fields, GRID, 1e-8, ORDER))
    for name in ("circle-arc", "catenary", "torus-profile"):
        out.report(revolution.verify_component_laplacians(catalog.get_profile(name), GRID, 1e-7, ORDER))
    return out


def classifier():
    """Constant-R classification of the catalog and perturbed profiles."""
    out = Outcome()
    v = revolution.classify(catalog.get_profile("circle-arc"), GRID)
    ev = v.evidence
    out.check("circle arc verdict", v.kind is Verdict.SPHERE_TYPE_1, v.kind.value)
    dev = abs(ev.get("eigenvalue", np.nan) - 2)
    out.check("circle arc eigenvalue", dev <= 1e-6, dev)
    out.check("circle arc |x| const", ev.get("radius_spread", np.inf) < 1e-8, ev.get("radius_spread"))

    v = revolution.classify(catalog.get_profile("catenary"), GRID)
    out.check("catenary verdict", v.kind is Verdict.CATENOID_NULL_TYPE_1, v.kind.value)
    out.check("catenary max|Delta x|", v.evidence.get("laplacian_x_max", np.inf) < 1e-7,
              v.evidence.get("laplacian_x_max"))

    v = revolution.classify(revolution.offset_profile(catalog.get_profile("catenary"), 0.4), GRID)
    ev = v.evidence
    out.check("offset catenary verdict", v.kind is Verdict.PARALLEL_OF_CATENOID_NULL_TYPE_2, v.kind.value)
    out.check("offset catenary mean R", abs(ev["R_mean"] + 0.8) <= 1e-6, abs(ev["R_mean"] + 0.8))
    out.check("offset catenary de-offset H", ev.get("de_offset_H_max", np.inf) < 1e-6, ev.get("de_offset_H_max"))

    arc = (0.2, math.pi - 0.2)
    for eps, want in ((1e-3, Verdict.NOT_CONSTANT_R), (1e-1, Verdict.NOT_CONSTANT_R)):
        p = Profile.from_exprs(f"perturbed({eps:g})", f"sin(u) + {eps!r}*sin(3*u)", "-cos(u)", arc)
        v = revolution.classify(p, GRID)
        out.check(f"eps={eps:g} verdict", v.kind is want, v.kind.value)
    return out


def iterated_law():
    """(Delta^III)^m x + 2^(m-1) R N below 1e-6 for m = 1, 2 on constant-R cases."""
    out = Outcome()
    cases = [catalog.get_profile(n) for n in ("circle-arc", "catenary", "unit-catenary")]
    cases.append(revolution.offset_profile(catalog.get_profile("catenary"), 0.4))
    for p in cases:
        rep = revolution.verify_iterated_laplacian(p, 2, GRID, 1e-6)
        out.report(rep, f"iterated@{p.name}")
    return out


def substrate_validity():
    """Jet partials vs finite differences (relative 1e-5); Leibniz convolution to 1e-12."""
    out = Outcome()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        node = expr.random_expression(rng, 4)
        u0, v0 = rng.uniform(-1.0, 1.0, size=2)
        J = expr.eval_jet(node, jets.seed(u0, "u", 3), jets.seed(v0, "v", 3))
        fn = lambda a, b, node=node: expr.evaluate(node, a, b)  # noqa: E731
        for i, j in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2)):
            fd = fd_partial(fn, u0, v0, i, j)
            worst = max(worst, abs(J.partial(i, j) - fd) / max(1.0, abs(fd)))
    out.check("finite differences", worst < 1e-5, worst)

    worst = 0.0
    for order in range(1, 7):
        for _ in range(20):
            a = Jet(rng.normal(size=jets.ncoef(order)), order)
            b = Jet(rng.normal(size=jets.ncoef(order)), order)
            p = a * b
            for da in range(order + 1):
                for db in range(order + 1 - da):
                    want = sum(a.coeff(i, j) * b.coeff(da - i, db - j)
                               for i in range(da + 1) for j in range(db + 1))
                    worst = max(worst, abs(p.coeff(da, db) - want) / max(1.0, abs(want)))
    out.check("Leibniz convolution", worst < 1e-12, worst)
    return out


def determinism(tmpdir=None):
    """Two `check ... all` runs with one config give byte-identical machine reports."""
    import tempfile

    out = Outcome()
    with tempfile.TemporaryDirectory(dir=tmpdir) as d:
        cfg = os.path.join(d, "run.ini")
        with open(cfg, "w", encoding="utf-8") as fh:
            fh.write("[run]\ngrid = 24x24\njet_order = 5\nformat = machine\nseed = 11\n")
        blobs = []
        for k in range(2):
            target = os.path.join(d, f"report{k}.json")
            proc = subprocess.run(
                [sys.executable, "-m", "beltrami.cli", "check", "unit-sphere", "catenoid", "torus", "all",
                 "--config", cfg, "--out", target],
                capture_output=True, text=True, check=False,
            )
            out.check(f"run {k} exit code", proc.returncode == 0, proc.returncode)
            with open(target, "rb") as fh:
                blobs.append(fh.read())
        out.check("byte-identical", blobs[0] == blobs[1] and len(blobs[0]) > 0, len(blobs[0]))
    return out


CRITERIA = [
    ("1 gauss-map law", gauss_map_law),
    ("2 position-vector law", position_vector_law),
    ("3 support-function law", support_function_law),
    ("4 cross-form identities", cross_form_identities),
    ("5 offset laws", offset_laws),
    ("6 closed-form operator", closed_form_operator),
    ("7 classifier", classifier),
    ("8 iterated law", iterated_law),
    ("9 substrate validity", substrate_validity),
    ("10 determinism", determinism),
]


def run_criterion(fn):
    t0 = time.perf_counter()
    with np.errstate(all="ignore"):
        outcome = fn()
    elapsed = time.perf_counter() - t0
    ok = outcome.passed and elapsed < TIME_LIMIT
    return ok, outcome, elapsed


def line(label, ok, outcome, elapsed):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {outcome.summary()} ({elapsed:.1f} s)"


@pytest.mark.parametrize("label, fn", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(label, fn, capsys):
    ok, outcome, elapsed = run_criterion(fn)
    with capsys.disabled():
        print("\n" + line(label, ok, outcome, elapsed))
    assert outcome.passed, outcome.summary()
    assert elapsed < TIME_LIMIT, f"took {elapsed:.1f} s"


if __name__ == "__main__":
    results = []
    for label, fn in CRITERIA:
        ok, outcome, elapsed = run_criterion(fn)
        print(line(label, ok, outcome, elapsed), flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
