"""Closed-form ambient metric of an Einstein metric and GJMS operators from it.

For ``Ric(g) = 2 lam (n-1) g`` the ambient metric on ``(t, x, rho)`` is

    g~ = 2 rho dt^2 + 2 t dt drho + t^2 (1 + lam rho)^2 g_ij(x) dx^i dx^j

and ``P_k u = t^{n/2+k} Delta~^k (t^{k-n/2} u~)`` at ``rho = 0``, for any
extension ``u~`` of ``u``.  The input ``t^{k-n/2} u~`` is homogeneous of degree
``k - n/2`` under ``t -> s t``, ``Delta~^k`` lowers the degree by ``2k``, and the
outer power cancels what is left, so the value does not depend on ``t``.
Note the factor 2: the unit sphere has
``lam = 1/2`` here, while the product formula in ``gjms`` uses
``Ric = lam (n-1) g`` and ``lam = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import laplacian_jet
from .dsl import Bin, MetricField, Num, Var, add, as_expr, mul, num, names
from .errors import DimensionError, NotEinsteinError, ValidationError
from .gjms import EINSTEIN_TOL, einstein_lambda
from .jet import basis
from .tensor import build_frame


def _fresh(name, taken):
    while name in taken:
        name += "_"
    return name


@dataclass(frozen=True)
class AmbientField:
    base: MetricField
    lam: float
    ambient: MetricField
    t: str
    rho: str

    @property
    def n(self):
        return self.base.dim

    def lift(self, point, t=1.0, rho=0.0):
        return np.concatenate([[t], np.asarray(point, dtype=float), [rho]])


def build_ambient(base: MetricField, lam: float, *, check_point=None) -> AmbientField:
    """Assemble ``g~`` by expression composition.

    With ``check_point`` the base is verified to satisfy
    ``Ric = 2 lam (n-1) g`` there.
    """
    if check_point is not None:
        measured = einstein_lambda(base, check_point) / 2
        if abs(measured - lam) > EINSTEIN_TOL * max(1.0, abs(lam)):
            raise NotEinsteinError(f"base has ambient lambda {measured}, not {lam}", abs(measured - lam))
    n = base.dim
    taken = set(base.coords) | set(base.params)
    t = _fresh("t", taken)
    rho = _fresh("rho", taken | {t})
    T, R = Var(t), Var(rho)
    warp = mul(Bin("^", T, num(2.0)), Bin("^", add(num(1.0), mul(num(lam), R)), num(2.0)))
    grid = [[num(0.0)] * (n + 2) for _ in range(n + 2)]
    grid[0][0] = mul(num(2.0), R)
    grid[0][n + 1] = grid[n + 1][0] = T
    for i in range(n):
        for j in range(n):
            c = base.components[i][j]
            grid[i + 1][j + 1] = c if c == Num(0.0) else mul(warp, c)
    amb = MetricField(
        (t, *base.coords, rho), tuple(tuple(r) for r in grid), base.params,
        (1,) * (n + 1) + (-1,), f"ambient[{base.name}, lam={lam:g}]",
    )
    return AmbientField(base, float(lam), amb, t, rho)


def _check_k(af, k):
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k}")
    if af.n % 2 == 0 and k > af.n // 2:
        raise DimensionError(f"the ambient construction breaks down for k > n/2 = {af.n // 2}")


def ambient_laplacian_power(af: AmbientField, k: int, u, point, *, t=1.0, extension=None,
                            verify_einstein=True) -> float:
    """``P_k u`` at ``point`` from the ambient Laplacian.

    ``extension`` (an expression over the ambient coordinates) replaces the
    trivial extension ``u~ = u``.
    """
    _check_k(af, k)
    k = int(k)
    n = af.n
    if verify_einstein:
        measured = einstein_lambda(af.base, point) / 2
        if abs(measured - af.lam) > EINSTEIN_TOL * max(1.0, abs(af.lam)):
            raise NotEinsteinError(f"base has ambient lambda {measured} at the point, field uses {af.lam}",
                                   abs(measured - af.lam))
    if t <= 0:
        raise ValueError("t must be positive")
    u_ext = as_expr(extension) if extension is not None else af.base.resolve_expr(u)
    amb = af.ambient
    weighted = mul(Bin("^", Var(af.t), num(k - n / 2)), u_ext)
    frame = build_frame(amb, af.lift(point, t), 2 * k)
    v = amb.eval_jet(weighted, frame.point, 2 * k).coeffs
    for _ in range(k):
        v = laplacian_jet(v, frame)
    return float(t ** (n / 2 + k) * v[0])


@dataclass(frozen=True)
class IndependenceCheck:
    passed: bool
    value: float
    perturbed_value: float


def extension_independence_check(af: AmbientField, k, u, point, perturbation, *, raw=False,
                                 rtol=1e-6, atol=1e-9) -> IndependenceCheck:
    """Compare ``P_k u`` for ``u~ = u`` and a perturbed extension.

    By default the extension is ``u + rho * perturbation``.  With ``raw=True``
    it is ``u + perturbation`` and the perturbation must vanish on
    ``rho = 0`` (checked on its jet at the point); otherwise it is rejected.
    """
    amb = af.ambient
    p = as_expr(perturbation)
    unknown = names(p) - set(amb.coords) - set(amb.params)
    if unknown:
        raise ValidationError(f"unknown identifier(s) {sorted(unknown)} in perturbation")
    order = 2 * int(k)
    if raw:
        jet = amb.eval_jet(p, af.lift(point), order).coeffs
        B = basis(amb.dim, order)
        on_slice = B.alphas[:, -1] == 0
        if np.max(np.abs(jet[on_slice])) > 1e-12:
            raise ValidationError("perturbation does not vanish on rho = 0, so it does not extend u")
        added = p
    else:
        added = mul(Var(af.rho), p)
    base_u = af.base.resolve_expr(u)
    v0 = ambient_laplacian_power(af, k, u, point)
    v1 = ambient_laplacian_power(af, k, u, point, extension=add(base_u, added))
    ok = abs(v1 - v0) <= rtol * max(abs(v0), abs(v1)) + atol
    return IndependenceCheck(bool(ok), v0, v1)


def homogeneity_residual(af: AmbientField, point, s, *, t=1.0, rho=0.1) -> float:
    """``max |J^T g~(s t, x, rho) J - s^2 g~(t, x, rho)|`` with ``J = diag(s, 1, ..., 1)``."""
    amb = af.ambient
    g1 = amb.metric_value(af.lift(point, t, rho))
    gs = amb.metric_value(af.lift(point, s * t, rho))
    J = np.eye(amb.dim)
    J[0, 0] = s
    return float(np.max(np.abs(J.T @ gs @ J - s * s * g1)))


def poincare_einstein_metric(base: MetricField, lam: float) -> MetricField:
    """``r^-2 (dr^2 + (1 - lam r^2 / 2)^2 g)``, kept as data only.

    ``lam`` uses the ambient normalization (unit sphere: 1/2); then ``Ric = -n g+``.
    """
    n = base.dim
    r = _fresh("r", set(base.coords) | set(base.params))
    R = Var(r)
    inv_r2 = Bin("/", num(1.0), Bin("^", R, num(2.0)))
    warp = mul(inv_r2, Bin("^", add(num(1.0), mul(num(-lam / 2), Bin("^", R, num(2.0)))), num(2.0)))
    grid = [[num(0.0)] * (n + 1) for _ in range(n + 1)]
    grid[0][0] = inv_r2
    for i in range(n):
        for j in range(n):
            c = base.components[i][j]
            grid[i + 1][j + 1] = c if c == Num(0.0) else mul(warp, c)
    return MetricField((r, *base.coords), tuple(tuple(x) for x in grid), base.params, None,
                       f"poincare_einstein[{base.name}, lam={lam:g}]")
