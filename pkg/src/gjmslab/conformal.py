"""Schouten, Weyl and Cotton tensors, the V and U tensors, and the scalar Phi.

``Phi = |V|^2 + 16 <W, U> + 16 |C|^2`` is the restriction of the ambient
``|nabla R|^2``; ``<W, U>`` pairs ``W^{mjkl}`` with ``U_{mjkl}`` slot by slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import CurvatureBundle, _truncated_sum, covariant_derivative_jets, curvature_at
from .dsl import Call, MetricField, Num, mul, num, to_str
from .errors import DimensionError, InsufficientOrderError
from .invariants import cubic1, cubic2, full_contraction
from .jet import jeinsum, jmul
from .tensor import Tensor


def schouten_block(P, g, n=None):
    """``P_jk g_il + P_il g_jk - P_jl g_ik - P_ik g_jl``.

    With ``n`` given the arguments are jet arrays, otherwise point arrays.
    """
    if n is None:
        e = np.einsum
        return (e("jk,il->ijkl", P, g) + e("il,jk->ijkl", P, g)
                - e("jl,ik->ijkl", P, g) - e("ik,jl->ijkl", P, g))
    return (jeinsum("jk,il->ijkl", P, g, n) + jeinsum("il,jk->ijkl", P, g, n)
            - jeinsum("jl,ik->ijkl", P, g, n) - jeinsum("ik,jl->ijkl", P, g, n))


@dataclass(eq=False)
class ConformalBundle:
    curvature: CurvatureBundle
    P: Tensor
    W: Tensor
    C: Tensor | None
    V: Tensor | None
    U: Tensor | None
    phi: float | None
    weylSq: float
    cubicW1: float
    cubicW2: float
    cottonSq: float | None
    P_jet: np.ndarray
    W_jet: np.ndarray

    @property
    def frame(self):
        return self.curvature.frame

    def quantity(self, name):
        value = getattr(self, name)
        if value is None:
            raise InsufficientOrderError(f"{name} needs jet order >= 4, frame has {self.frame.order}")
        return value


def schouten_jets(bundle: CurvatureBundle):
    n = bundle.n
    trace_part = jmul(bundle.frame.g, bundle.kappa_jet, n) / (2 * (n - 1))
    return _truncated_sum(bundle.Ric_jet, -trace_part, n=n) / (n - 2)


def conformal_bundle(bundle: CurvatureBundle, frame=None) -> ConformalBundle:
    """Conformal tensors at the frame point.

    ``C`` and ``V`` need jet order 3; ``U`` and ``phi`` need order 4.
    """
    frame = frame or bundle.frame
    n = frame.n
    if n < 3:
        raise DimensionError(f"Schouten tensor needs n >= 3, got n = {n}")
    P = schouten_jets(bundle)
    W = _truncated_sum(bundle.R_jet, -schouten_block(P, frame.g, n), n=n)

    ginv, g0 = frame.ginv0, frame.g0
    P0, W0 = P[..., 0], W[..., 0]
    weyl_sq = full_contraction(W0, W0, ginv)
    cw1, cw2 = cubic1(W0, ginv), cubic2(W0, ginv)

    C = V = U = None
    phi = cotton_sq = None
    if frame.order >= 3:
        e = np.einsum
        dP = covariant_derivative_jets(P, frame)  # [m, j, k] = nabla_m P_jk
        C_jet = e("ljkZ->jklZ", dP) - e("kjlZ->jklZ", dP)
        C0 = C_jet[..., 0]
        dW0 = covariant_derivative_jets(W, frame)[..., 0]
        V0 = (dW0 - e("im,jkl->mijkl", g0, C0) + e("jm,ikl->mijkl", g0, C0)
              - e("km,lij->mijkl", g0, C0) + e("lm,kij->mijkl", g0, C0))
        C, V = Tensor.covariant(C0), Tensor.covariant(V0)
        cotton_sq = full_contraction(C0, C0, ginv)
        if frame.order >= 4:
            dC0 = covariant_derivative_jets(C_jet, frame)[..., 0]
            U0 = dC0 + e("mr,rs,sjkl->mjkl", P0, ginv, W0)
            U = Tensor.covariant(U0)
            phi = (full_contraction(V0, V0, ginv) + 16 * full_contraction(W0, U0, ginv)
                   + 16 * cotton_sq)
    return ConformalBundle(bundle, Tensor.covariant(P0), Tensor.covariant(W0), C, V, U, phi,
                           weyl_sq, cw1, cw2, cotton_sq, P, W)


def conformal_at(field, point, order=6) -> ConformalBundle:
    return conformal_bundle(curvature_at(field, point, order))


def rescale_metric(field: MetricField, upsilon) -> MetricField:
    """``e^{2 upsilon} g`` built at the expression level, so its jets stay exact."""
    ups = field.resolve_expr(upsilon)
    factor = Call("exp", mul(num(2.0), ups))
    return field.map_components(
        lambda i, j, c: c if c == Num(0.0) else mul(factor, c),
        name=f"exp(2*({to_str(ups)}))*({field.name})",
    )


CONFORMAL_WEIGHTS = {"weylSq": 4, "cubicW1": 6, "cubicW2": 6, "phi": 6}


@dataclass(frozen=True)
class WeightCheck:
    quantity: str
    value: float
    rescaled_value: float
    expected: float
    passed: bool


def conformal_weight_check(quantity, field, upsilon, point, *, order=6, rtol=1e-7, atol=1e-10) -> WeightCheck:
    """Compare ``I_{e^{2 upsilon} g}`` against ``e^{-w upsilon} I_g`` at ``point``."""
    if quantity not in CONFORMAL_WEIGHTS:
        raise ValueError(f"unknown conformal quantity {quantity!r}; choose from {sorted(CONFORMAL_WEIGHTS)}")
    w = CONFORMAL_WEIGHTS[quantity]
    order = max(order, 4)
    v = conformal_at(field, point, order).quantity(quantity)
    vr = conformal_at(rescale_metric(field, upsilon), point, order).quantity(quantity)
    ups_val = field.eval_float(upsilon, point)
    expected = math.exp(-w * ups_val) * v
    ok = abs(vr - expected) <= rtol * max(abs(vr), abs(expected)) + atol
    return WeightCheck(quantity, v, vr, expected, bool(ok))
