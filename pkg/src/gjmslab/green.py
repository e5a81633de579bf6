"""Logarithmic singularity ``gamma`` of Green functions of ``Delta^k`` and ``P_k``.

Both routes share the prefactor ``(4 pi)^{-n/2} 2 / Gamma(k)``: the Riemannian
route multiplies it by the heat invariant ``a_{n-2k}``, the conformal route by
its Fefferman-Graham image ``a~_{n-2k}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .conformal import ConformalBundle, conformal_bundle
from .curvature import CurvatureBundle, curvature_at
from .errors import DimensionError, WeightRangeError
from .fg_rule import ConformalName, a_tilde, eval_conformal_expr, heat_expr
from .invariants import heat_invariant


def as_half_integer(k) -> Fraction:
    """Coerce ``k`` to a positive element of ``1/2 N``."""
    f = Fraction(k).limit_denominator(4) if isinstance(k, float) else Fraction(k)
    if isinstance(k, float) and abs(float(f) - k) > 1e-12:
        raise WeightRangeError(f"k = {k} is not a half-integer")
    if f.denominator not in (1, 2):
        raise WeightRangeError(f"k = {k} is not a half-integer")
    if f <= 0:
        raise WeightRangeError(f"k must be positive, got {k}")
    return f


def gamma_function(k) -> float:
    """``Gamma(k)`` for positive integers and half-integers, by recursion."""
    k = as_half_integer(k)
    if k.denominator == 1:
        return float(math.factorial(int(k) - 1))
    out = math.sqrt(math.pi)
    x = Fraction(1, 2)
    while x < k:
        out *= float(x)
        x += 1
    return out


def prefactor(n: int, k) -> float:
    return (4 * math.pi) ** (-n / 2) * 2.0 / gamma_function(k)


def _weight(n, k):
    k = as_half_integer(k)
    w = n - 2 * k
    if w.denominator != 1 or w < 0:
        raise WeightRangeError(f"n - 2k must be a non-negative integer, got n={n}, k={k}")
    w = int(w)
    if w % 2:
        raise WeightRangeError(f"n - 2k = {w} is odd; only even weights carry heat invariants")
    if w > 6:
        raise WeightRangeError(f"weight n - 2k = {w} exceeds the implemented range (<= 6)")
    return k, w


class FormulaPath(str, Enum):
    RIEMANNIAN_HEAT = "riemannian_heat"
    CONFORMAL_MAIN_THEOREM = "conformal_main_theorem"


@dataclass(frozen=True)
class GammaResult:
    k: Fraction
    n: int
    value: float
    formula_path: FormulaPath
    expression: str
    partial_flag: bool = False
    coefficient: float = field(default=0.0, repr=False)

    def as_dict(self):
        return {
            "k": str(self.k), "n": self.n, "value": self.value,
            "formula_path": self.formula_path.value, "expression": self.expression,
            "partial": self.partial_flag,
        }


def gamma_power_laplacian(k, bundle: CurvatureBundle, frame=None, *, ricci_flat_mode=False) -> GammaResult:
    """``gamma`` for ``Delta_g^k`` via ``(4 pi)^{-n/2} 2/Gamma(k) a_{n-2k}``."""
    n = bundle.n
    k, w = _weight(n, k)
    heat = heat_invariant(w // 2, bundle, frame, ricci_flat_mode=ricci_flat_mode)
    c = prefactor(n, k)
    expr = f"(4 pi)^(-{n}/2) * 2/Gamma({k}) * [{heat_expr(w // 2)}]"
    return GammaResult(k, n, c * heat.value, FormulaPath.RIEMANNIAN_HEAT, expr, heat.partial, c)


def gamma_gjms(k, source) -> GammaResult:
    """``gamma`` for ``P_k`` via ``(4 pi)^{-n/2} 2/Gamma(k) a~_{n-2k}``.

    ``source`` is a ``ConformalBundle``, a ``CurvatureBundle`` (the conformal
    tensors are built on demand) or, for weights 0 and 2, just the dimension.
    """
    if isinstance(source, ConformalBundle):
        n = source.frame.n
    elif isinstance(source, CurvatureBundle):
        n = source.n
    else:
        n = int(source)
    k, w = _weight(n, k)
    expr = a_tilde(w // 2)
    c = prefactor(n, k)
    if expr.is_zero():
        value = 0.0
    elif w == 0:
        value = float(expr.coefficient(ConformalName.One))
    else:
        if isinstance(source, CurvatureBundle):
            source = conformal_bundle(source)
        elif not isinstance(source, ConformalBundle):
            raise DimensionError("weights >= 4 need curvature data, not just a dimension")
        value = eval_conformal_expr(expr, source)
    text = f"(4 pi)^(-{n}/2) * 2/Gamma({k}) * [{expr}]"
    return GammaResult(k, n, c * value, FormulaPath.CONFORMAL_MAIN_THEOREM, text, False, c)


class Verdict(str, Enum):
    CONFORMALLY_FLAT_CONSISTENT = "CONFORMALLY_FLAT_CONSISTENT"
    OBSTRUCTED = "OBSTRUCTED"


@dataclass(frozen=True)
class ProbeResult:
    verdict: Verdict
    max_abs_gamma: float
    witness_point: np.ndarray
    values: tuple


def conformal_flatness_probe(field, points, *, tol=1e-10) -> ProbeResult:
    """Sample ``gamma_{P_{n/2-2}}`` (weight 4, a multiple of ``|W|^2``) at ``points``."""
    n = field.dim
    if n < 5:
        raise DimensionError(f"the probe needs n >= 5, got n = {n}")
    k = Fraction(n, 2) - 2
    values = []
    for p in points:
        cb = conformal_bundle(curvature_at(field, p, order=2))
        values.append(gamma_gjms(k, cb).value)
    mags = np.abs(values)
    i = int(np.argmax(mags))
    verdict = Verdict.OBSTRUCTED if mags[i] >= tol else Verdict.CONFORMALLY_FLAT_CONSISTENT
    return ProbeResult(verdict, float(mags[i]), np.asarray(points[i], dtype=float), tuple(values))
