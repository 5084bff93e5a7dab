"""Bivariate truncated Taylor arithmetic ("jets").

A :class:`Jet` of order ``n`` stores the normalized Taylor coefficients

    c[a, b] = 1/(a! b!) * d^(a+b) f / du^a dv^b

for every ``a + b <= n`` in graded order ``(0,0), (1,0), (0,1), (2,0), (1,1), ...``.
Coefficients live in the last axis of an ndarray; all leading axes are batch
axes (grid points, vector components, tensor indices) and broadcast like
ordinary numpy arrays, so one jet expression evaluates a whole grid at once.

Graded storage means truncating to a lower order is a prefix slice.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DivisionByZeroJet, DomainError, OrderExceeded

DEFAULT_ORDER = 5
#: denominators with a smaller constant term raise DivisionByZeroJet
DIV_FLOOR = 1e-300

_PAIR = "Z"  # reserved einsum letter for the coefficient-pair axis


def ncoef(order):
    return (order + 1) * (order + 2) // 2


class _Layout:
    """Index tables for one truncation order."""

    def __init__(self, order):
        self.order = order
        self.index = [(d - b, b) for d in range(order + 1) for b in range(d + 1)]
        self.pos = {ab: k for k, ab in enumerate(self.index)}
        self.deg = np.array([a + b for a, b in self.index])
        m = len(self.index)

        pa, pb, out = [], [], []
        for i, (a1, b1) in enumerate(self.index):
            for j, (a2, b2) in enumerate(self.index):
                if a1 + b1 + a2 + b2 <= order:
                    pa.append(i)
                    pb.append(j)
                    out.append(self.pos[(a1 + a2, b1 + b2)])
        self.pa = np.array(pa)
        self.pb = np.array(pb)
        self.P = np.zeros((len(out), m))
        self.P[np.arange(len(out)), out] = 1.0

        # long division: for each degree d, the b-terms of degree >= 1 times
        # already-known quotient terms that land in degree d
        self.div_steps = []
        for d in range(1, order + 1):
            outs = [k for k, (a, b) in enumerate(self.index) if a + b == d]
            local = {k: n for n, k in enumerate(outs)}
            sb, sq, so = [], [], []
            for i, j, o in zip(pa, pb, out):
                if o in local and self.deg[i] >= 1:
                    sb.append(i)
                    sq.append(j)
                    so.append(local[o])
            Pd = np.zeros((len(so), len(outs)))
            Pd[np.arange(len(so)), so] = 1.0
            self.div_steps.append((np.array(outs), np.array(sb), np.array(sq), Pd))

        if order >= 1:
            lower = [(d - b, b) for d in range(order) for b in range(d + 1)]
            self.du_src = np.array([self.pos[(a + 1, b)] for a, b in lower])
            self.du_fac = np.array([a + 1.0 for a, b in lower])
            self.dv_src = np.array([self.pos[(a, b + 1)] for a, b in lower])
            self.dv_fac = np.array([b + 1.0 for a, b in lower])
        self.upos = np.array([self.pos[(a, 0)] for a in range(order + 1)])


@lru_cache(maxsize=None)
def layout(order):
    if order < 0:
        raise ValueError("jet order must be non-negative")
    return _Layout(order)


class Jet:
    """Truncated bivariate Taylor expansion, batched over leading axes."""

    __slots__ = ("c", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, order):
        c = np.asarray(coeffs, dtype=float)
        if c.shape[-1:] != (ncoef(order),):
            raise ValueError(f"order {order} jet needs {ncoef(order)} coefficients, got shape {c.shape}")
        self.c = c
        self.order = order

    # -- inspection ---------------------------------------------------------

    @property
    def shape(self):
        return self.c.shape[:-1]

    @property
    def value(self):
        return self.c[..., 0]

    @property
    def coeffs(self):
        """Dict view ``{(a, b): coefficient}`` (unbatched jets only)."""
        lay = layout(self.order)
        return {ab: self.c[..., k] for k, ab in enumerate(lay.index)}

    def coeff(self, a, b):
        if a + b > self.order:
            raise OrderExceeded(f"coefficient ({a},{b}) beyond order {self.order}")
        return self.c[..., layout(self.order).pos[(a, b)]]

    def partial(self, i, j):
        return math.factorial(i) * math.factorial(j) * self.coeff(i, j)

    def univariate(self):
        """Coefficients of the pure-u terms, shape ``(..., order+1)``."""
        return self.c[..., layout(self.order).upos]

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape})"

    # -- structure ----------------------------------------------------------

    def truncate(self, order):
        if order > self.order:
            raise OrderExceeded(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.c[..., : ncoef(order)], order)

    def d(self, axis):
        """Partial derivative along u (axis 0) or v (axis 1); order drops by one."""
        if self.order < 1:
            raise OrderExceeded("cannot differentiate an order-0 jet")
        lay = layout(self.order)
        if axis == 0:
            return Jet(self.c[..., lay.du_src] * lay.du_fac, self.order - 1)
        return Jet(self.c[..., lay.dv_src] * lay.dv_fac, self.order - 1)

    def grad(self):
        return stack([self.d(0), self.d(1)])

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.c[key + (Ellipsis, slice(None))], self.order)

    def sum(self, axis=0):
        if axis < 0:
            axis += self.c.ndim - 1
        return Jet(self.c.sum(axis=axis), self.order)

    def transpose(self, *axes):
        return Jet(np.transpose(self.c, tuple(axes) + tuple(range(len(axes), self.c.ndim))), self.order)

    def where(self, mask, other):
        """Replace the jet by ``other`` at batch positions where ``mask`` holds."""
        other = as_jet(other, self.order)
        a, b = _common(self, other)
        return Jet(np.where(np.asarray(mask)[..., None], b, a), min(self.order, other.order))

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = _common(self, other)
            return Jet(a + b, min(self.order, other.order))
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.shape, other.shape) + self.c.shape[-1:]
        c = np.array(np.broadcast_to(self.c, shape))
        c[..., 0] = c[..., 0] + other
        return Jet(c, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            a, b = _common(self, other)
            lay = layout(order)
            return Jet((a[..., lay.pa] * b[..., lay.pb]) @ lay.P, order)
        return Jet(self.c * np.asarray(other, dtype=float)[..., None], self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return _divide(self, other)
        other = np.asarray(other, dtype=float)
        if np.any(np.abs(other) < DIV_FLOOR):
            raise DivisionByZeroJet("division by a (near-)zero constant")
        return Jet(self.c / other[..., None], self.order)

    def __rtruediv__(self, other):
        return _divide(as_jet(other, self.order), self)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            if exponent.order == 0 or not np.any(exponent.c[..., 1:]):
                vals = np.unique(exponent.value)
                if vals.size == 1:
                    return self ** float(vals[0])
            return exp(exponent * ln(self))
        return power(self, float(exponent))

    def __rpow__(self, base):
        base = float(base)
        if base <= 0:
            raise DomainError("non-positive base raised to a jet exponent")
        return exp(self * math.log(base))


def _common(a, b):
    """Coefficient arrays of two jets truncated to their common order."""
    order = min(a.order, b.order)
    m = ncoef(order)
    return a.c[..., :m], b.c[..., :m]


def as_jet(x, order):
    if isinstance(x, Jet):
        return x
    x = np.asarray(x, dtype=float)
    c = np.zeros(x.shape + (ncoef(order),))
    c[..., 0] = x
    return Jet(c, order)


def _divide(a, b):
    order = min(a.order, b.order)
    A, B = _common(a, b)
    A, B = np.broadcast_arrays(A, B)
    b0 = B[..., 0]
    if np.any(np.abs(b0) < DIV_FLOOR):
        raise DivisionByZeroJet("jet division by a (near-)zero constant term")
    lay = layout(order)
    q = np.zeros(A.shape)
    q[..., 0] = A[..., 0] / b0
    for outs, sb, sq, Pd in lay.div_steps:
        s = (B[..., sb] * q[..., sq]) @ Pd
        q[..., outs] = (A[..., outs] - s) / b0[..., None]
    return Jet(q, order)


def _ipow(a, n):
    if n < 0:
        return 1.0 / _ipow(a, -n)
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return as_jet(np.ones(a.shape), a.order) if result is None else result


# -- constructors -------------------------------------------------------------

def seed(value, which, order=DEFAULT_ORDER):
    """Jet of a coordinate (``"u"``/``"v"``) or a constant expanded at ``value``."""
    if order < 1:
        raise ValueError("seed order must be >= 1")
    value = np.asarray(value, dtype=float)
    c = np.zeros(value.shape + (ncoef(order),))
    c[..., 0] = value
    if which == "u":
        c[..., 1] = 1.0
    elif which == "v":
        c[..., 2] = 1.0
    elif which != "constant":
        raise ValueError(f"unknown seed kind {which!r}")
    return Jet(c, order)


def constant(value, order=DEFAULT_ORDER):
    return as_jet(value, order)


def stack(jets, axis=0):
    order = min(j.order for j in jets)
    m = ncoef(order)
    arrays = np.broadcast_arrays(*[j.c[..., :m] for j in jets])
    return Jet(np.stack(arrays, axis=axis), order)


def einsum(subscripts, a, b):
    """Contract two jets over their leading (index) axes.

    ``subscripts`` names only the index axes, e.g. ``"ij,jk->ik"``; remaining
    batch axes broadcast as an implicit ellipsis and products are jet products.
    """
    inputs, output = subscripts.replace(" ", "").split("->")
    sa, sb = inputs.split(",")
    order = min(a.order, b.order)
    A, B = _common(a, b)
    lay = layout(order)
    spec = f"{sa}...{_PAIR},{sb}...{_PAIR}->{output}...{_PAIR}"
    return Jet(np.einsum(spec, A[..., lay.pa], B[..., lay.pb]) @ lay.P, order)


def dot(a, b):
    """Euclidean inner product along the leading component axis."""
    return (a * b).sum(0)


def cross(a, b):
    return stack([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


# -- composition with univariate series -------------------------------------------

def compose(series, a):
    """Evaluate ``sum_k series[..., k] * (a - a0)**k``.

    ``series`` has shape ``(..., K+1)`` and holds the Taylor coefficients of a
    univariate function about ``a0 = a.value``; the result has order
    ``min(a.order, K)``.
    """
    series = np.asarray(series, dtype=float)
    order = min(a.order, series.shape[-1] - 1)
    h = a.truncate(order)
    hc = h.c.copy()
    hc[..., 0] = 0.0
    h = Jet(hc, order)
    result = as_jet(series[..., order], order)
    for k in range(order - 1, -1, -1):
        result = result * h + series[..., k]
    return result


def _factorials(n):
    return np.array([math.factorial(k) for k in range(n + 1)], dtype=float)


def _cyclic_series(a0, order, cycle):
    # cycle: four callables giving successive derivatives at a0
    vals = [cycle[k % 4](a0) for k in range(order + 1)]
    return np.stack(vals, axis=-1) / _factorials(order)


def _reciprocal_series(q):
    """Series of 1/q from the series q (shape (..., K+1))."""
    out = np.zeros_like(q)
    out[..., 0] = 1.0 / q[..., 0]
    for k in range(1, q.shape[-1]):
        s = np.sum(q[..., 1 : k + 1] * out[..., k - 1 :: -1][..., :k], axis=-1)
        out[..., k] = -s / q[..., 0]
    return out


def _series(name, a0, order, r=None):
    n = order
    if name == "exp":
        return np.exp(a0)[..., None] / _factorials(n)
    if name == "sin":
        return _cyclic_series(a0, n, (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)))
    if name == "cos":
        return _cyclic_series(a0, n, (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin))
    if name == "sinh":
        return _cyclic_series(a0, n, (np.sinh, np.cosh, np.sinh, np.cosh))
    if name == "cosh":
        return _cyclic_series(a0, n, (np.cosh, np.sinh, np.cosh, np.sinh))
    if name == "ln":
        if np.any(a0 <= 0):
            raise DomainError("ln of a non-positive value")
        k = np.arange(1, n + 1)
        tail = (-1.0) ** (k - 1) / (k * a0[..., None] ** k)
        return np.concatenate([np.log(a0)[..., None], tail], axis=-1)
    if name in ("sqrt", "pow"):
        r = 0.5 if name == "sqrt" else float(r)
        if np.any(a0 <= 0):
            raise DomainError(f"{name} of a non-positive value (non-integer exponent)")
        head = np.sqrt(a0) if name == "sqrt" else a0**r
        binom = np.ones(n + 1)
        for k in range(1, n + 1):
            binom[k] = binom[k - 1] * (r - k + 1) / k
        k = np.arange(n + 1)
        return head[..., None] * binom / a0[..., None] ** k
    if name == "tan":
        if np.any(np.abs(np.cos(a0)) < 1e-15):
            raise DomainError("tan at a pole")
        t = np.zeros(a0.shape + (n + 1,))
        t[..., 0] = np.tan(a0)
        # T' = 1 + T^2
        for k in range(n):
            conv = np.sum(t[..., : k + 1] * t[..., k::-1], axis=-1)
            t[..., k + 1] = ((1.0 if k == 0 else 0.0) + conv) / (k + 1)
        return t
    if name == "atan":
        # derivative series 1/(1 + (a0+h)^2), integrated termwise
        q = np.zeros(a0.shape + (n + 1,))
        q[..., 0] = 1 + a0**2
        if n >= 1:
            q[..., 1] = 2 * a0
        if n >= 2:
            q[..., 2] = 1.0
        dq = _reciprocal_series(q)
        out = np.zeros_like(q)
        out[..., 0] = np.arctan(a0)
        out[..., 1:] = dq[..., :n] / np.arange(1, n + 1)
        return out
    if name == "abs":
        if np.any(a0 == 0):
            raise DomainError("abs is not differentiable at 0")
        out = np.zeros(a0.shape + (n + 1,))
        out[..., 0] = np.abs(a0)
        if n >= 1:
            out[..., 1] = np.sign(a0)
        return out
    raise ValueError(f"unknown function {name!r}")


LIFTABLE = ("sin", "cos", "sinh", "cosh", "tan", "exp", "ln", "sqrt", "abs", "atan", "pow")


def lift(fn, a, r=None):
    """Compose a univariate elementary function with a jet."""
    if fn == "pow" and float(r).is_integer():
        return _ipow(a, int(r))
    if fn not in LIFTABLE:
        raise ValueError(f"unknown function {fn!r}")
    return compose(_series(fn, a.value, a.order, r), a)


def sin(a):
    return lift("sin", a)


def cos(a):
    return lift("cos", a)


def sinh(a):
    return lift("sinh", a)


def cosh(a):
    return lift("cosh", a)


def tan(a):
    return lift("tan", a)


def exp(a):
    return lift("exp", a)


def ln(a):
    return lift("ln", a)


def sqrt(a):
    return lift("sqrt", a)


def power(a, r):
    return lift("pow", a, r)


def absolute(a):
    return lift("abs", a)


def atan2(y, x):
    """Angle jet of the planar vector (x, y); the constant term is in (-pi, pi]."""
    x, y = _align(x, y)
    theta0 = np.arctan2(y.value, x.value)
    c0, s0 = np.cos(theta0), np.sin(theta0)
    # rotate so the reference direction is theta0; the ratio then starts at 0
    along = x * c0 + y * s0
    across = y * c0 - x * s0
    t = across / along
    tc = t.c.copy()
    tc[..., 0] = 0.0
    return lift("atan", Jet(tc, t.order)) + theta0


def _align(a, b):
    order = min(a.order, b.order)
    return a.truncate(order), b.truncate(order)


def arith(op, a, b=None):
    """Dispatch by name: ``add``, ``sub``, ``mul``, ``div``, ``neg``."""
    if op == "neg":
        return -a
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def partial(a, i, j):
    return a.partial(i, j)
