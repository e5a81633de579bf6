"""Riemann curvature, its covariant derivatives, and the scalar Laplacian.

Sign conventions (pinned by the round sphere, where kappa = n(n-1) > 0):

* ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` and
  ``R_ijkl = <R(d_i, d_j) d_k, d_l>``, so
  ``R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik``
  and the unit sphere has ``R_ijkl = g_il g_jk - g_ik g_jl``.
* ``Ric_ij = R^k_ijk = g^kl R_lijk`` and ``kappa = g^ij Ric_ij``.
* The Laplacian is the positive one,
  ``Delta u = -|g|^-1/2 d_i(|g|^1/2 g^ij d_j u)``; on flat space
  ``Delta |x|^2 = -2n``.

All tensors are carried as jets in position ("jet tensors": arrays with one
axis per slot plus a trailing coefficient axis) so covariant derivatives can be
taken repeatedly while the jet order lasts.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InsufficientOrderError
from .jet import jderiv, jeinsum, jmul, jreciprocal, jtruncate, order_of
from .tensor import PointFrame, Tensor, build_frame


def _truncated_sum(*terms, n):
    k = min(order_of(t, n) for t in terms)
    return sum(jtruncate(t, n, k) for t in terms)


def covariant_derivative_jets(t, frame: PointFrame):
    """``nabla`` of an all-covariant jet tensor; the new slot comes first."""
    n = frame.n
    t = np.asarray(t, dtype=float)
    rank = t.ndim - 1
    if order_of(t, n) < 1:
        raise InsufficientOrderError("jet order exhausted; cannot take another covariant derivative")
    out = np.stack([jderiv(t, m, n) for m in range(n)])
    letters = string.ascii_lowercase[:rank]
    for s in range(rank):
        # subtract Gamma^p_{m i_s} T_{.. p ..}
        tsub = letters[:s] + "p" + letters[s + 1:]
        term = jeinsum(f"pm{letters[s]},{tsub}->m{letters}", frame.christoffel, t, n)
        out = _truncated_sum(out, -term, n=n)
    return out


def laplacian_jet(u, frame: PointFrame):
    """Positive Laplacian of a scalar jet array; the order drops by two."""
    n = frame.n
    du = np.stack([jderiv(u, j, n) for j in range(n)])
    flux = jeinsum("ij,j->i", frame.ginv, du, n)
    flux = jmul(flux, frame.sqrt_det, n)
    div = sum(jderiv(flux[i], i, n) for i in range(n))
    return -jmul(div, jreciprocal(frame.sqrt_det, n), n)


def divergence_jet(x, frame: PointFrame):
    """``|g|^-1/2 d_i(|g|^1/2 X^i)`` for a contravariant vector jet ``X``."""
    n = frame.n
    flux = jmul(x, frame.sqrt_det, n)
    div = sum(jderiv(flux[i], i, n) for i in range(n))
    return jmul(div, jreciprocal(frame.sqrt_det, n), n)


def laplacian_scalar(f, frame: PointFrame) -> float:
    """Value of ``Delta_g f`` at the frame point (``f`` is an expression)."""
    frame.require(2, "the Laplacian")
    u = frame.scalar_jet(f).coeffs
    return float(laplacian_jet(u, frame)[0])


def riemann_jets(frame: PointFrame):
    """All-covariant ``R_ijkl`` as jets of order K-2."""
    n = frame.n
    G = frame.christoffel  # [l, j, k]
    dG = np.stack([jderiv(G, i, n) for i in range(n)])  # [i, l, j, k] = d_i G^l_jk
    lin = np.einsum("iljkZ->lijkZ", dG) - np.einsum("jlikZ->lijkZ", dG)
    quad = jeinsum("lim,mjk->lijk", G, G, n)
    quad = quad - np.einsum("ljikZ->lijkZ", quad)
    r_up = _truncated_sum(lin, quad, n=n)  # [l, i, j, k] = R^l_ijk
    return jeinsum("lm,mijk->ijkl", frame.g, r_up, n)


@dataclass(eq=False)
class CurvatureBundle:
    frame: PointFrame
    R_jet: np.ndarray
    Ric_jet: np.ndarray
    kappa_jet: np.ndarray

    @property
    def n(self):
        return self.frame.n

    @property
    def R(self) -> Tensor:
        return Tensor.covariant(self.R_jet[..., 0])

    @property
    def Ric(self) -> Tensor:
        return Tensor.covariant(self.Ric_jet[..., 0])

    @property
    def kappa(self) -> float:
        return float(self.kappa_jet[0])

    @cached_property
    def gradR_jet(self):
        self.frame.require(3, "nabla R")
        return covariant_derivative_jets(self.R_jet, self.frame)

    @property
    def gradR(self) -> Tensor | None:
        if self.frame.order < 3:
            return None
        return Tensor.covariant(self.gradR_jet[..., 0])

    @cached_property
    def hessR_jet(self):
        """``R_ijkl;pq`` stored as ``[q, p, i, j, k, l]`` (last derivative first)."""
        self.frame.require(4, "nabla nabla R")
        return covariant_derivative_jets(self.gradR_jet, self.frame)

    @cached_property
    def grad_kappa_jet(self):
        self.frame.require(3, "nabla kappa")
        return covariant_derivative_jets(self.kappa_jet, self.frame)

    @property
    def lapKappa(self) -> float | None:
        if self.frame.order < 4:
            return None
        hess = covariant_derivative_jets(self.grad_kappa_jet, self.frame)[..., 0]
        return float(-np.einsum("ij,ij->", self.frame.ginv0, hess))

    def ricci_vanishes(self, tol=1e-9, to_order=None):
        """Whether the Ricci jet vanishes (relative to |R|) through ``to_order``."""
        n = self.n
        k = order_of(self.Ric_jet, n) if to_order is None else to_order
        if k > order_of(self.Ric_jet, n):
            return False
        scale = max(1.0, float(np.max(np.abs(self.R_jet[..., 0]))))
        return bool(np.max(np.abs(jtruncate(self.Ric_jet, n, k))) <= tol * scale)


def riemann(frame: PointFrame) -> CurvatureBundle:
    frame.require(2, "curvature")
    n = frame.n
    R = riemann_jets(frame)
    ric = jeinsum("ad,aijd->ij", frame.ginv, R, n)
    kappa = jeinsum("ij,ij->", frame.ginv, ric, n)
    return CurvatureBundle(frame, R, ric, kappa)


def curvature_at(field, point, order=6) -> CurvatureBundle:
    return riemann(build_frame(field, point, order))


def symmetry_residuals(R, gradR=None):
    """Relative residuals of the algebraic Riemann symmetries and second Bianchi."""
    e = np.einsum
    scale = max(1.0, float(np.max(np.abs(R))))
    out = {
        "antisym_12": float(np.max(np.abs(R + e("jikl->ijkl", R)))) / scale,
        "antisym_34": float(np.max(np.abs(R + e("ijlk->ijkl", R)))) / scale,
        "pair": float(np.max(np.abs(R - e("klij->ijkl", R)))) / scale,
        "bianchi_1": float(np.max(np.abs(R + e("iljk->ijkl", R) + e("iklj->ijkl", R)))) / scale,
    }
    if gradR is not None:
        gscale = max(1.0, float(np.max(np.abs(gradR))))
        # nabla_m R_ijkl + nabla_k R_ijlm + nabla_l R_ijmk, stored [m, i, j, k, l]
        b2 = gradR + e("kijlm->mijkl", gradR) + e("lijmk->mijkl", gradR)
        out["bianchi_2"] = float(np.max(np.abs(b2))) / gscale
    return out
