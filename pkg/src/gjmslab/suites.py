"""Verification batteries behind ``gjmslab verify <suite>``.

Each suite returns a list of ``Check`` records in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ambient import (build_ambient, ambient_laplacian_power, extension_independence_check,
                      homogeneity_residual)
from .catalog import builtin
from .conformal import conformal_bundle, conformal_weight_check
from .curvature import curvature_at, symmetry_residuals
from .fg_rule import ConformalName, a_tilde, eval_conformal_expr, eval_invariant_expr, heat_expr
from .gjms import covariance_residual, einstein_gjms_apply, laplacian_power_apply, yamabe_apply
from .green import gamma_gjms, gamma_power_laplacian, prefactor
from .invariants import InvariantName, weight_scaling_check
from .spectral import compare_residue


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    target: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "target": self.target, "tolerance": self.tolerance, "detail": self.detail}


def _close(name, value, target, rtol, atol=0.0, detail=""):
    ok = abs(value - target) <= rtol * max(abs(value), abs(target)) + atol
    return Check(name, bool(ok), float(value), float(target), rtol, detail)


def _below(name, value, bound, detail=""):
    return Check(name, bool(value < bound), float(value), 0.0, bound, detail)


def suite_symmetries():
    out = []
    metrics = [("flat", 4), ("round_sphere_stereographic", 4), ("hyperbolic_ball", 3),
               ("schwarzschild_tangherlini", 5), ("product_sphere_sphere", 4)]
    for name, n in metrics:
        e = builtin(name, n, points=2)
        for i, p in enumerate(e.safe_points):
            b = curvature_at(e.field, p, 3)
            for key, r in symmetry_residuals(b.R.data, b.gradR.data).items():
                bound = 1e-8 if key == "bianchi_2" else 1e-9
                out.append(_below(f"{e.field.name}[{i}] {key}", r, bound))
    e = builtin("conformally_flat", 4, {"upsilon": "0.3*x1*x2 + 0.2*sin(x3)"}, points=2)
    for i, p in enumerate(e.safe_points):
        cb = conformal_bundle(curvature_at(e.field, p, 2))
        out.append(_below(f"{e.field.name}[{i}] |W|^2", abs(cb.weylSq), 1e-8))
    return out


def suite_weights():
    out = []
    cases = [builtin("round_sphere_stereographic", 4, points=1),
             builtin("schwarzschild_tangherlini", 5, points=1)]
    for e in cases:
        p = e.safe_points[0]
        for name in InvariantName:
            for lam in (0.5, 2.0, 1.7):
                c = weight_scaling_check(name, e.field, p, lam)
                out.append(Check(f"{e.field.name} {name.name} lam={lam}", c.passed, c.scaled_value,
                                 c.expected, 1e-9))
    e = builtin("product_sphere_sphere", points=2)
    for q in ("weylSq", "cubicW1", "cubicW2", "phi"):
        c = conformal_weight_check(q, e.field, "0.2*x1 + 0.1*x2*x3 - 0.15*x4^2", e.safe_points[1])
        out.append(Check(f"{e.field.name} conformal weight {q}", c.passed, c.rescaled_value, c.expected, 1e-7))
    return out


def suite_conformal_covariance():
    out = []
    bases = [
        (builtin("flat", 5, points=3), ["0.1*x1 + 0.05*x2^2", "0.2*sin(x3)", "0.1*x1*x4"],
         ["1 + x2", "x1*x2 + x3^2", "cos(x1) + x5"]),
        (builtin("round_sphere_stereographic", 4, points=3), ["0.1*x1 + 0.05*x2^2", "0.15*x3*x4", "0.1*cos(x2)"],
         ["1 + x1*x2", "x3^3 - x1", "exp(0.3*x4)"]),
        (builtin("schwarzschild_tangherlini", 5, points=3), ["0.1*r + 0.05*th1^2", "0.05*tau*r", "0.1*sin(th2)"],
         ["1 + r*th2 + tau^2", "r^2", "cos(th1) + tau"]),
    ]
    for e, ups, us in bases:
        for i, p in enumerate(e.safe_points):
            for y, u in zip(ups, us):
                for k, label in ((1, "Yamabe"), (2, "Paneitz")):
                    r, lhs, _ = covariance_residual(k, e.field, p, y, u)
                    out.append(_below(f"{label} {e.field.name}[{i}] Y={y} u={u}", r / max(1.0, abs(lhs)), 1e-6))
    return out


def suite_fg_rule():
    out = []
    W = ConformalName
    F = Fraction
    out.append(Check("a~2 == 0", a_tilde(1).is_zero(), 0.0, 0.0, 0.0, str(a_tilde(1))))
    ok4 = a_tilde(2).terms == ((F(1, 180), W.WeylSq),)
    out.append(Check("a~4 == |W|^2/180", ok4, 0.0, 0.0, 0.0, str(a_tilde(2))))
    d = 9 * math.factorial(7)
    want6 = {W.Phi: F(81, d), W.CubicW1: F(64, d), W.CubicW2: F(352, d)}
    got6 = {p: c for c, p in a_tilde(3).terms}
    out.append(Check("a~6 == (81 Phi + 64 CW1 + 352 CW2)/(9*7!)", got6 == want6, 0.0, 0.0, 0.0, str(a_tilde(3))))
    for n in (5, 6):
        e = builtin("schwarzschild_tangherlini", n, points=2)
        for i, p in enumerate(e.safe_points):
            cb = conformal_bundle(curvature_at(e.field, p, 6))
            for j in range(4):
                a = eval_invariant_expr(heat_expr(j), cb.curvature, ricci_flat=True)
                at = eval_conformal_expr(a_tilde(j), cb)
                scale = 1.0 if j < 2 else abs(at)
                out.append(_close(f"{e.field.name}[{i}] a{2 * j} == a~{2 * j}", a, at, 1e-7, 1e-12 * scale))
    return out


def gamma_agreement(k, bundle, rtol=1e-7, *, ricci_flat_mode=False):
    """Both gamma paths at one point; weight-2 targets are 0, so the floor scales with the prefactor."""
    gh = gamma_power_laplacian(k, bundle, ricci_flat_mode=ricci_flat_mode)
    gc = gamma_gjms(k, bundle)
    atol = rtol * prefactor(bundle.n, k)
    ok = abs(gh.value - gc.value) <= rtol * max(abs(gh.value), abs(gc.value)) + atol
    return gh, gc, ok


def suite_ricci_flat_consistency():
    out = []
    for n, ks in ((6, (3, 2, 1)), (5, (Fraction(5, 2), Fraction(3, 2), Fraction(1, 2)))):
        e = builtin("schwarzschild_tangherlini", n, points=3)
        for i, p in enumerate(e.safe_points):
            b = curvature_at(e.field, p, 4)
            for k in ks:
                gh, gc, ok = gamma_agreement(k, b)
                out.append(Check(f"{e.field.name}[{i}] k={k} gamma_gjms == gamma_Delta^k", ok, gc.value,
                                 gh.value, 1e-7))
    return out


def suite_ambient():
    out = []
    u = "1 + x1*x2 + sin(x3) + x1^3"
    for n in (4, 5):
        e = builtin("round_sphere_stereographic", n, points=2)
        p = e.safe_points[1]
        af = build_ambient(e.field, 0.5, check_point=p)
        out.append(_close(f"S^{n} ambient k=1 == Yamabe", ambient_laplacian_power(af, 1, u, p),
                          yamabe_apply(e.field, p, u), 1e-6))
        v2 = ambient_laplacian_power(af, 2, u, p)
        out.append(_close(f"S^{n} ambient k=2 == Einstein product", v2,
                          einstein_gjms_apply(2, 1.0, e.field, p, u), 1e-6))
        out.append(_close(f"S^{n} ambient t-independence k=2", ambient_laplacian_power(af, 2, u, p, t=2.0),
                          v2, 1e-8))
        c = extension_independence_check(af, 2, u, p, "sin(x1)")
        out.append(Check(f"S^{n} extension independence k=2", c.passed, c.perturbed_value, c.value, 1e-6))
        h = homogeneity_residual(af, p, 1.7)
        out.append(_below(f"S^{n} ambient homogeneity", h, 1e-12))
        b = curvature_at(af.ambient, af.lift(p), 2)
        out.append(_below(f"S^{n} ambient |Ric|", float(np.max(np.abs(b.Ric.data))), 1e-7))
    e = builtin("flat", 3, points=1)
    af = build_ambient(e.field, 0.0)
    p = e.safe_points[0]
    for k in (1,):
        out.append(_close("flat lam=0 collapse k=1", ambient_laplacian_power(af, k, "x1^2 + x2*x3", p),
                          laplacian_power_apply(k, e.field, p, "x1^2 + x2*x3"), 1e-7, 1e-12))
    e = builtin("schwarzschild_tangherlini", 5, points=1)
    af = build_ambient(e.field, 0.0)
    p = e.safe_points[0]
    uu = "r^2*sin(th1) + tau"
    out.append(_close("Tangherlini lam=0 collapse k=2", ambient_laplacian_power(af, 2, uu, p),
                      laplacian_power_apply(2, e.field, p, uu), 1e-7, 1e-12))
    return out


def suite_spectral(l_max=2000):
    out = []
    sphere = {6: builtin("round_sphere_stereographic", 6, points=1)}
    for n, k in ((2, 1), (4, 2), (6, 1)):
        bundle = None
        if n - 2 * k == 4:
            e = sphere[n]
            bundle = curvature_at(e.field, e.safe_points[0], 2)
        c = compare_residue(n, k, l_max=l_max, bundle=bundle)
        atol = 1e-5 if c.geometric_side == 0 else 0.0
        out.append(_close(f"S^{n} k={k} 2k Res == int gamma", c.spectral_side, c.geometric_side,
                          0.0 if atol else 1e-4, atol, f"doubling error {c.residue.error_estimate:.2e}"))
        out.append(_below(f"S^{n} k={k} L_max doubling", c.residue.error_estimate, 1e-5))
    return out


SUITES = {
    "symmetries": suite_symmetries,
    "weights": suite_weights,
    "conformal-covariance": suite_conformal_covariance,
    "fg-rule": suite_fg_rule,
    "ricci-flat-consistency": suite_ricci_flat_consistency,
    "ambient": suite_ambient,
    "spectral": suite_spectral,
}
