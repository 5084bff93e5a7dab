"""Christoffel symbols, covariant derivatives and the Beltrami operators.

Everything here works on :class:`~beltrami.surface.Frame` jets, so the
results are again jets (one order lower per derivative taken) and can be fed
back in, e.g. to iterate a Laplacian.

Index layout of tensor jets: ``d[i, j]`` for a form, ``G[k, i, j]`` for
Christoffel symbols of the second kind, ``C[m, i, j]`` for the covariant
derivative of a form, followed by any vector-component axis and batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import SingularForm
from .jets import Jet
from .surface import Frame, frame

FORMS = ("I", "II", "III")


def form(fr: Frame, J: str) -> Jet:
    if J == "I":
        return fr.g
    if J == "II":
        return fr.b
    if J == "III":
        return fr.e
    raise ValueError(f"unknown fundamental form {J!r}")


def _singular_mask(fr, J):
    return fr.irregular if J == "I" else fr.invalid


def inverse_form(fr: Frame, J: str) -> Jet:
    """Inverse tensor ``d^ij`` of the selected form.

    Points flagged irregular (or parabolic, for II and III) receive the
    identity's placeholder so batched evaluation never divides by zero; a
    single unflagged singular point raises :class:`SingularForm`.
    """
    d = form(fr, J)
    bad = _singular_mask(fr, J)
    det = d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0]
    live = np.abs(det.value)[~bad]
    if live.size and live.min() < 1e-300:
        raise SingularForm(f"fundamental form {J} is singular")
    det = det.where(bad, 1.0)
    adj = jets.stack([jets.stack([d[1, 1], -d[0, 1]]), jets.stack([-d[1, 0], d[0, 0]])])
    return adj / det


def christoffel_symbols(fr: Frame, J: str) -> Jet:
    """``G[k, i, j] = 1/2 d^km (-d_ij,m + d_im,j + d_jm,i)``."""
    d = form(fr, J)
    D = d.grad()  # D[m, i, j] = d_ij,m
    first = 0.5 * (-D.transpose(1, 2, 0) + D.transpose(1, 0, 2) + D)
    return jets.einsum("km,ijm->kij", inverse_form(fr, J), first)


@dataclass
class ChristoffelSet:
    """Second-kind symbols for all three forms at one batch of points."""

    J: str
    symbols: Jet
    gamma: Jet  # form I
    pi: Jet  # form II
    lam: Jet  # form III

    @property
    def T(self):
        return self.gamma - self.pi

    @property
    def T_tilde(self):
        return self.lam - self.pi

    @property
    def values(self):
        return self.symbols.value


def christoffel_set(fr: Frame, J: str = "III") -> ChristoffelSet:
    gamma, pi, lam = (christoffel_symbols(fr, F) for F in FORMS)
    return ChristoffelSet(J, {"I": gamma, "II": pi, "III": lam}[J], gamma, pi, lam)


def christoffel(s, u, v, J="III", order=jets.DEFAULT_ORDER) -> ChristoffelSet:
    return christoffel_set(frame(s, u, v, order), J)


def covariant_form_derivative(T: Jet, G: Jet) -> Jet:
    """``C[m, i, j] = T_ij,m - G^l_mi T_lj - G^l_mj T_il`` for a (0,2) tensor."""
    return T.grad() - jets.einsum("lmi,lj->mij", G, T) - jets.einsum("lmj,il->mij", G, T)


def nabla1(fr: Frame, J: str, f: Jet, g: Jet) -> Jet:
    """First differential parameter ``d^ij f_,i g_,j``.

    ``f`` is a scalar jet; ``g`` may carry a leading vector-component axis.
    """
    df = jets.einsum("ij,i->j", inverse_form(fr, J), f.grad())
    return jets.einsum("j,j->", df, g.grad())


def hessian(fr: Frame, J: str, f: Jet) -> Jet:
    """Covariant Hessian ``f_,ij - G^m_ij f_,m`` with the symbols of form J."""
    df = f.grad()
    return df.grad() - jets.einsum("mij,m->ij", christoffel_symbols(fr, J), df)


def laplacian(fr: Frame, J: str, f: Jet) -> Jet:
    """Second Beltrami operator ``-d^ij (f_,ij - G^m_ij f_,m)``; componentwise for vectors."""
    return -jets.einsum("ij,ij->", inverse_form(fr, J), hessian(fr, J, f))


def laplacian_at(s, J, field, u, v, order=jets.DEFAULT_ORDER):
    """Numeric ``Delta^J field`` at parameter values; ``field(frame) -> Jet``."""
    fr = frame(s, u, v, order)
    return laplacian(fr, J, field(fr)).value


def difference_tensors(fr: Frame):
    """``(T, T~)`` with ``T = Gamma - Pi`` and ``T~ = Lambda - Pi``, plus residuals.

    The residual dict compares ``T`` with ``-1/2 b^km grad^I_m b_ij``,
    ``T~`` with ``-1/2 b^km grad^III_m b_ij``, and ``T + T~`` with zero
    (max absolute component per point).
    """
    cs = christoffel_set(fr)
    binv = inverse_form(fr, "II")
    cov_I = covariant_form_derivative(fr.b, cs.gamma)
    cov_III = covariant_form_derivative(fr.b, cs.lam)
    rhs_T = -0.5 * jets.einsum("km,mij->kij", binv, cov_I)
    rhs_Tt = -0.5 * jets.einsum("km,mij->kij", binv, cov_III)
    T, Tt = cs.T, cs.T_tilde
    res = {
        "T_formula": _maxabs(T.value - rhs_T.value, 3),
        "T_tilde_formula": _maxabs(Tt.value - rhs_Tt.value, 3),
        "sum_zero": _maxabs((T + Tt).value, 3),
    }
    return T, Tt, res


def _maxabs(a, naxes):
    return np.abs(a).max(axis=tuple(range(naxes)))


def R_gradient_sides(fr: Frame):
    """Both sides of ``R_,m = e^ik grad^III_m b_ik``: (direct, covariant), shape (2, ...)."""
    lam = christoffel_symbols(fr, "III")
    cov = covariant_form_derivative(fr.b, lam)
    rhs = jets.einsum("ik,mik->m", inverse_form(fr, "III"), cov)
    return fr.R.grad().value, rhs.value


def position_chain_sides(fr: Frame):
    """Both sides of ``e^ij b^km grad^I_m b_ij x_k = -b^km R_m x_k`` (3-vectors)."""
    gamma = christoffel_symbols(fr, "I")
    cov = covariant_form_derivative(fr.b, gamma)
    ei = inverse_form(fr, "III")
    bi = inverse_form(fr, "II")
    contracted = jets.einsum("ij,mij->m", ei, cov)
    coef = jets.einsum("km,m->k", bi, contracted)
    lhs = jets.einsum("k,ka->a", coef, fr.xd)
    rhs = -nabla1(fr, "II", fr.R, fr.x)
    return lhs.value, rhs.value
