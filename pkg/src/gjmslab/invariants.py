"""Named Riemannian invariants of weight <= 6 and the heat invariants of the Laplacian."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .curvature import CurvatureBundle, curvature_at
from .errors import InsufficientOrderError, NotEinsteinError, WeightRangeError
from .tensor import PointFrame


class InvariantName(Enum):
    One = ("1", 0)
    Kappa = ("kappa", 2)
    KappaSq = ("kappa^2", 4)
    RicSq = ("|Ric|^2", 4)
    RiemSq = ("|R|^2", 4)
    LapKappa = ("Delta kappa", 4)
    GradRiemSq = ("|nabla R|^2", 6)
    Cubic1 = ("R_ij^kl R^ij_pq R^pq_kl", 6)
    Cubic2 = ("R_ijkl R^i_p^k_q R^pjql", 6)

    @property
    def label(self):
        return self.value[0]

    @property
    def weight(self):
        return self.value[1]


def raise_slots(t, slots, ginv):
    """Raise the listed slots of a covariant point array with ``ginv``."""
    for s in slots:
        t = np.moveaxis(np.tensordot(ginv, t, axes=([1], [s])), 0, s)
    return t


def raise_all_slots(t, ginv):
    return raise_slots(t, range(t.ndim), ginv)


def full_contraction(a, b, ginv):
    """``a_{i...} b^{i...}`` for covariant arrays of the same shape."""
    return float(np.sum(a * raise_all_slots(b, ginv)))


def cubic1(R, ginv):
    """``R_ijkl R^ij_pq R^pqkl``."""
    X = raise_slots(R, (0, 1), ginv)
    Y = raise_all_slots(R, ginv)
    return float(np.einsum("ijkl,ijpq,pqkl->", R, X, Y, optimize=True))


def cubic2(R, ginv):
    """``R_ijkl R^i_p^k_q R^pjql``."""
    X = raise_slots(R, (0, 2), ginv)
    Y = raise_all_slots(R, ginv)
    return float(np.einsum("ijkl,ipkq,pjql->", R, X, Y, optimize=True))


def eval_invariant(name: InvariantName, bundle: CurvatureBundle, frame: PointFrame | None = None) -> float:
    frame = frame or bundle.frame
    ginv = frame.ginv0
    R = bundle.R.data
    if name is InvariantName.One:
        return 1.0
    if name is InvariantName.Kappa:
        return bundle.kappa
    if name is InvariantName.KappaSq:
        return bundle.kappa ** 2
    if name is InvariantName.RicSq:
        return full_contraction(bundle.Ric.data, bundle.Ric.data, ginv)
    if name is InvariantName.RiemSq:
        return full_contraction(R, R, ginv)
    if name is InvariantName.LapKappa:
        lk = bundle.lapKappa
        if lk is None:
            raise InsufficientOrderError(f"Delta kappa needs jet order >= 4, frame has {frame.order}")
        return lk
    if name is InvariantName.GradRiemSq:
        if bundle.gradR is None:
            raise InsufficientOrderError(f"|nabla R|^2 needs jet order >= 3, frame has {frame.order}")
        dR = bundle.gradR.data
        return full_contraction(dR, dR, ginv)
    if name is InvariantName.Cubic1:
        return cubic1(R, ginv)
    if name is InvariantName.Cubic2:
        return cubic2(R, ginv)
    raise ValueError(f"unknown invariant {name!r}")


def eval_all(bundle: CurvatureBundle, weights=(0, 2, 4, 6)) -> dict:
    out = {}
    for name in InvariantName:
        if name.weight in weights:
            out[name] = eval_invariant(name, bundle)
    return out


def riemann_laplacian_pairing(bundle: CurvatureBundle) -> float:
    """``g^pq R^ijkl R_ijkl;pq``, i.e. ``-<R, Delta R>`` with the positive Laplacian."""
    ginv = bundle.frame.ginv0
    hess = bundle.hessR_jet[..., 0]  # [q, p, i, j, k, l]
    trace = np.einsum("qp,qpijkl->ijkl", ginv, hess)
    return full_contraction(trace, bundle.R.data, ginv)


A6_NUMERATORS = {
    InvariantName.GradRiemSq: 81,
    InvariantName.Cubic1: 64,
    InvariantName.Cubic2: 352,
}
A6_DENOMINATOR = 9 * math.factorial(7)


@dataclass(frozen=True)
class HeatValue:
    j: int
    value: float
    partial: bool
    formula_path: str


RICCI_FLAT_TOL = 1e-8


def heat_invariant(j: int, bundle: CurvatureBundle, frame=None, *, ricci_flat_mode=False) -> HeatValue:
    """Value of ``a_{2j}(Delta_g; x)`` for ``j = 0..3``.

    For ``j = 3`` only the part free of Ricci contractions is known; the
    result is flagged ``partial`` unless ``ricci_flat_mode`` is set, in which
    case the Ricci jet is checked to vanish through order 4 (so every
    Ricci-bearing term of weight 6 vanishes at the point).
    """
    frame = frame or bundle.frame
    if j not in (0, 1, 2, 3):
        raise WeightRangeError(f"heat invariants are implemented for j = 0..3, got {j}")
    ev = lambda name: eval_invariant(name, bundle, frame)  # noqa: E731
    if j == 0:
        return HeatValue(0, 1.0, False, "a0 = 1")
    if j == 1:
        return HeatValue(1, -bundle.kappa / 6.0, False, "a2 = -kappa/6")
    if j == 2:
        v = (ev(InvariantName.RiemSq) / 180 - ev(InvariantName.RicSq) / 180
             + ev(InvariantName.KappaSq) / 72 - ev(InvariantName.LapKappa) / 30)
        return HeatValue(2, v, False, "a4 = |R|^2/180 - |Ric|^2/180 + kappa^2/72 - Delta kappa/30")
    v = sum(c * ev(name) for name, c in A6_NUMERATORS.items()) / A6_DENOMINATOR
    path = "a6 = (81 |nabla R|^2 + 64 C1 + 352 C2) / (9 * 7!)"
    if not ricci_flat_mode:
        return HeatValue(3, v, True, path + " + (Ricci terms omitted)")
    if frame.order < 6:
        raise InsufficientOrderError("Ricci-flat a6 needs jet order >= 6 to certify the Ricci jet")
    if not bundle.ricci_vanishes(RICCI_FLAT_TOL, to_order=4):
        resid = float(np.max(np.abs(bundle.Ric_jet)))
        raise NotEinsteinError("ricci_flat_mode requested on a metric whose Ricci jet does not vanish", resid)
    return HeatValue(3, v, False, path + " (Ricci-flat: complete)")


@dataclass(frozen=True)
class ScalingCheck:
    name: InvariantName
    lam: float
    value: float
    scaled_value: float
    expected: float
    passed: bool


def weight_scaling_check(name: InvariantName, field, point, lam: float, *, order=6,
                         rtol=1e-9, atol=1e-10) -> ScalingCheck:
    """Compare ``I_{lam^2 g}`` against ``lam^-w I_g``."""
    if lam <= 0:
        raise ValueError("scaling factor must be positive")
    order = max(order, 4)
    v = eval_invariant(name, curvature_at(field, point, order))
    vs = eval_invariant(name, curvature_at(field.scaled(lam * lam), point, order))
    expected = lam ** (-name.weight) * v
    ok = abs(vs - expected) <= rtol * max(abs(vs), abs(expected)) + atol
    return ScalingCheck(name, lam, v, vs, expected, bool(ok))
