"""Formal invariant expressions and the Fefferman-Graham rewrite ``I -> I~``.

The rewrite is a closed table over named primitives:

* anything carrying a Ricci contraction goes to 0 (the ambient metric is
  Ricci-flat),
* pure-curvature contractions swap ``R`` for the Weyl tensor,
* ``|nabla R|^2`` goes to ``Phi``.

Everything else raises ``UnsupportedRewriteError``.  Coefficients are exact
``Fraction``s until evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import UnsupportedRewriteError, ValidationError, WeightRangeError
from .invariants import A6_DENOMINATOR, A6_NUMERATORS, InvariantName, eval_invariant


@dataclass(frozen=True)
class RicciInvolving:
    """Stand-in for an unspecified combination of Ricci-bearing invariants."""

    weight: int

    @property
    def label(self):
        return f"(Ricci terms, w={self.weight})"


class ConformalName(Enum):
    One = ("1", 0)
    WeylSq = ("|W|^2", 4)
    CubicW1 = ("W_ij^kl W^ij_pq W^pq_kl", 6)
    CubicW2 = ("W_ijkl W^i_p^k_q W^pjql", 6)
    Phi = ("Phi", 6)

    @property
    def label(self):
        return self.value[0]

    @property
    def weight(self):
        return self.value[1]


def _canonical(terms, weight, allowed):
    merged = {}
    for coeff, prim in terms:
        if not isinstance(prim, allowed):
            raise ValidationError(f"{prim!r} is not a valid primitive here")
        if prim.weight != weight:
            raise ValidationError(f"{prim.label} has weight {prim.weight}, expression has weight {weight}")
        merged[prim] = merged.get(prim, Fraction(0)) + Fraction(coeff)
    return tuple((c, p) for p, c in merged.items() if c != 0)


def _fmt(terms):
    if not terms:
        return "0"
    parts = []
    for k, (c, p) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        body = p.label if a == 1 else f"{a} * {p.label}"
        if k == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


class _LinearExpr:
    terms: tuple
    weight: int

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if self.weight != other.weight:
            raise ValidationError("cannot add expressions of different weight")
        return type(self)(self.terms + other.terms, self.weight)

    def __mul__(self, c):
        return type(self)(tuple((Fraction(c) * k, p) for k, p in self.terms), self.weight)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def coefficient(self, prim):
        return dict((p, c) for c, p in self.terms).get(prim, Fraction(0))

    def is_zero(self):
        return not self.terms

    def __str__(self):
        return _fmt(self.terms)


@dataclass(frozen=True)
class InvariantExpr(_LinearExpr):
    terms: tuple
    weight: int

    def __post_init__(self):
        object.__setattr__(self, "terms", _canonical(self.terms, self.weight, (InvariantName, RicciInvolving)))

    def __eq__(self, other):
        return (isinstance(other, InvariantExpr) and self.weight == other.weight
                and dict((p, c) for c, p in self.terms) == dict((p, c) for c, p in other.terms))

    __hash__ = None


@dataclass(frozen=True)
class ConformalExpr(_LinearExpr):
    terms: tuple
    weight: int

    def __post_init__(self):
        object.__setattr__(self, "terms", _canonical(self.terms, self.weight, (ConformalName,)))

    def __eq__(self, other):
        return (isinstance(other, ConformalExpr) and self.weight == other.weight
                and dict((p, c) for c, p in self.terms) == dict((p, c) for c, p in other.terms))

    __hash__ = None


N = InvariantName
CN = ConformalName

_KILLED = {N.Kappa, N.KappaSq, N.RicSq, N.LapKappa}
_SWAPPED = {N.One: CN.One, N.RiemSq: CN.WeylSq, N.Cubic1: CN.CubicW1,
            N.Cubic2: CN.CubicW2, N.GradRiemSq: CN.Phi}


def fg_rewrite(prim):
    """Image of a single primitive: a ``ConformalName`` or ``None`` for zero."""
    if isinstance(prim, RicciInvolving) or prim in _KILLED:
        return None
    if prim in _SWAPPED:
        return _SWAPPED[prim]
    raise UnsupportedRewriteError(f"no rewrite rule for {prim!r}")


def fg_transform(e: InvariantExpr) -> ConformalExpr:
    if e.weight > 6:
        raise WeightRangeError(f"rewrite table covers weights <= 6, got {e.weight}")
    out = []
    for c, p in e.terms:
        img = fg_rewrite(p)
        if img is not None:
            out.append((c, img))
    return ConformalExpr(tuple(out), e.weight)


def heat_expr(j: int) -> InvariantExpr:
    """Stored universal expressions for ``a_{2j}``; ``a_6`` carries a Ricci marker."""
    F = Fraction
    if j == 0:
        return InvariantExpr(((1, N.One),), 0)
    if j == 1:
        return InvariantExpr(((F(-1, 6), N.Kappa),), 2)
    if j == 2:
        return InvariantExpr(((F(1, 180), N.RiemSq), (F(-1, 180), N.RicSq),
                              (F(1, 72), N.KappaSq), (F(-1, 30), N.LapKappa)), 4)
    if j == 3:
        terms = [(F(c, A6_DENOMINATOR), p) for p, c in A6_NUMERATORS.items()]
        return InvariantExpr(tuple(terms) + ((1, RicciInvolving(6)),), 6)
    raise WeightRangeError(f"heat invariants are stored for j = 0..3, got {j}")


def a_tilde(j: int) -> ConformalExpr:
    return fg_transform(heat_expr(j))


def eval_invariant_expr(e: InvariantExpr, bundle, *, ricci_flat=False) -> float:
    """Numeric value; a ``RicciInvolving`` marker is only allowed when ``ricci_flat``."""
    total = 0.0
    for c, p in e.terms:
        if isinstance(p, RicciInvolving):
            if not ricci_flat:
                raise UnsupportedRewriteError("cannot evaluate unspecified Ricci terms on a non-Ricci-flat metric")
            continue
        total += float(c) * eval_invariant(p, bundle)
    return total


_CONFORMAL_FIELD = {CN.WeylSq: "weylSq", CN.CubicW1: "cubicW1", CN.CubicW2: "cubicW2", CN.Phi: "phi"}


def eval_conformal_expr(e: ConformalExpr, cb) -> float:
    total = 0.0
    for c, p in e.terms:
        value = 1.0 if p is CN.One else cb.quantity(_CONFORMAL_FIELD[p])
        total += float(c) * value
    return total
