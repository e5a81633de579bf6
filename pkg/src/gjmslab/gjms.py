"""Yamabe, Paneitz and Einstein-case GJMS operators applied to test functions.

Operators act on a DSL expression ``u`` through its jet at the point, so
``Delta^k u`` is exact up to rounding.  Conformal covariance
``P_{e^{2Y} g} u = e^{-(n/2+k) Y} P_g (e^{(n/2-k) Y} u)`` is the oracle that
pins every sign here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conformal import rescale_metric, schouten_jets
from .curvature import divergence_jet, laplacian_jet, riemann
from .dsl import Call, mul, num
from .errors import DimensionError, NotEinsteinError
from .jet import jderiv, jeinsum, jtruncate, order_of
from .tensor import build_frame

EINSTEIN_TOL = 1e-8


@dataclass(frozen=True)
class OperatorApplication:
    operator: str
    metric: str
    point: tuple
    u: str
    value: float
    covariance_residual: float | None = None


def _u_jet(field, frame, u, order):
    return field.eval_jet(u, frame.point, order).coeffs


def _frame(field, point, order, frame):
    if frame is not None and frame.order >= order:
        return frame
    return build_frame(field, point, order)


def _need_dim(field, lo):
    if field.dim < lo:
        raise DimensionError(f"operator needs n >= {lo}, got n = {field.dim}")


def yamabe_apply(field, point, u, *, frame=None) -> float:
    """``P_1 u = Delta u + (n-2)/(4(n-1)) kappa u``."""
    _need_dim(field, 3)
    n = field.dim
    frame = _frame(field, point, 2, frame)
    uj = _u_jet(field, frame, u, 2)
    kappa = riemann(frame).kappa
    return float(laplacian_jet(uj, frame)[0] + (n - 2) / (4 * (n - 1)) * kappa * uj[0])


def paneitz_apply(field, point, u, *, frame=None) -> float:
    """``P_2 u = Delta^2 u + delta(V du) + (n-4)/2 Q u``.

    ``V_ij = (n-2)/(2(n-1)) kappa g_ij - 4 P_ij``, ``delta`` is the formal
    adjoint of ``d`` (``delta alpha = -div alpha^#``, so ``delta d = Delta``),
    and ``Q = Delta kappa / (2(n-1)) + n kappa^2 / (8(n-1)^2) - 2 |P|^2``.
    """
    _need_dim(field, 3)
    n = field.dim
    frame = _frame(field, point, 4, frame)
    bundle = riemann(frame)
    uj = _u_jet(field, frame, u, 4)
    lap2 = laplacian_jet(laplacian_jet(uj, frame), frame)[0]

    P = schouten_jets(bundle)
    k = order_of(P, n)
    g = jtruncate(frame.g, n, k)
    kappa = jtruncate(bundle.kappa_jet, n, k)
    V = (n - 2) / (2 * (n - 1)) * jeinsum("ij,->ij", g, kappa, n) - 4 * P
    du = np.stack([jderiv(uj, j, n) for j in range(n)])
    ginv = frame.ginv
    X = jeinsum("ia,a->i", ginv, jeinsum("ab,b->a", V, jeinsum("bj,j->b", ginv, du, n), n), n)
    delta_vdu = -divergence_jet(X, frame)[0]

    P0 = P[..., 0]
    Pup = frame.ginv0 @ P0 @ frame.ginv0
    p_sq = float(np.sum(P0 * Pup))
    lap_kappa = bundle.lapKappa
    q = lap_kappa / (2 * (n - 1)) + n * bundle.kappa ** 2 / (8 * (n - 1) ** 2) - 2 * p_sq
    return float(lap2 + delta_vdu + (n - 4) / 2 * q * uj[0])


def einstein_lambda(field, point, *, frame=None, tol=EINSTEIN_TOL):
    """``lambda`` with ``Ric = lambda (n-1) g``; refuses non-Einstein metrics."""
    frame = _frame(field, point, 2, frame)
    b = riemann(frame)
    n = field.dim
    c = b.kappa / n
    resid = float(np.max(np.abs(b.Ric.data - c * frame.g0)))
    scale = max(1.0, float(np.max(np.abs(b.Ric.data))))
    if resid > tol * scale:
        raise NotEinsteinError(f"metric is not Einstein at the point: |Ric - c g| = {resid:.3e}", resid)
    return c / (n - 1) if n > 1 else 0.0


def einstein_factor_constants(k, lam, n):
    """Constants ``c_j`` in ``P_k = prod_j (Delta + c_j)``, ``c_j = lam (n+2j-2)(n-2j)/4``."""
    return [lam * (n + 2 * j - 2) * (n - 2 * j) / 4 for j in range(1, k + 1)]


def einstein_gjms_apply(k, lam, field, point, u, *, frame=None, order_of_factors=None) -> float:
    """Product formula for ``P_k`` on an Einstein metric with ``Ric = lam (n-1) g``.

    ``lam=None`` derives ``lambda`` from the metric; a given ``lam`` must
    match the measured one.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    n = field.dim
    frame = _frame(field, point, 2 * k, frame)
    measured = einstein_lambda(field, point, frame=frame)
    if lam is None:
        lam = measured
    elif abs(lam - measured) > EINSTEIN_TOL * max(1.0, abs(measured)):
        raise NotEinsteinError(f"lambda = {lam} does not match the metric's lambda = {measured}",
                               abs(lam - measured))
    consts = einstein_factor_constants(k, lam, n)
    if order_of_factors is not None:
        consts = [consts[i] for i in order_of_factors]
    v = _u_jet(field, frame, u, 2 * k)
    for c in consts:
        lv = laplacian_jet(v, frame)
        v = lv + c * jtruncate(v, n, order_of(lv, n))
    return float(v[0])


def laplacian_power_apply(k, field, point, u, *, frame=None) -> float:
    """``Delta^k u`` at the point."""
    frame = _frame(field, point, 2 * k, frame)
    v = _u_jet(field, frame, u, 2 * k)
    for _ in range(k):
        v = laplacian_jet(v, frame)
    return float(v[0])


_OPERATORS = {1: yamabe_apply, 2: paneitz_apply}


def covariance_residual(k, field, point, upsilon, u):
    """``|P_{e^{2Y} g} u - e^{-(n/2+k) Y} P_g(e^{(n/2-k) Y} u)|`` at the point."""
    apply = _OPERATORS[k]
    n = field.dim
    ups = field.resolve_expr(upsilon)
    ue = field.resolve_expr(u)
    lhs = apply(rescale_metric(field, ups), point, ue)
    weighted = mul(Call("exp", mul(num(n / 2 - k), ups)), ue)
    rhs = math.exp(-(n / 2 + k) * field.eval_float(ups, point)) * apply(field, point, weighted)
    return abs(lhs - rhs), lhs, rhs
