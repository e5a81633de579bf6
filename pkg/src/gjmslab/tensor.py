"""Point tensors with per-slot variance, and the per-point metric frame.

A ``PointFrame`` holds the jets of ``g_ij``, ``g^ij``, ``sqrt|det g|`` and the
Christoffel symbols at one base point.  ``Tensor`` is a dense array of values
at that point; contractions between two slots of equal variance insert the
metric (or its inverse), so everything works for indefinite signatures too.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dsl import MetricField
from .errors import InsufficientOrderError, SingularPointError
from .jet import Jet, jderiv, jeinsum, jlogdet, jmatinv

log = logging.getLogger(__name__)

CO, CONTRA = "co", "contra"


@dataclass(frozen=True, eq=False)
class PointFrame:
    field: MetricField
    point: np.ndarray
    order: int
    g: np.ndarray  # (n, n, N_K) jets of g_ij
    ginv: np.ndarray  # (n, n, N_K) jets of g^ij
    sqrt_det: np.ndarray  # (N_K,) jet of sqrt|det g|

    @cached_property
    def christoffel_lower(self):
        """``[l, i, j] = Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)``, order K-1."""
        n = self.n
        dg = np.stack([jderiv(self.g, i, n) for i in range(n)])  # [l, i, j] = d_l g_ij
        return 0.5 * (np.einsum("iljZ->lijZ", dg) + np.einsum("jilZ->lijZ", dg) - dg)

    @cached_property
    def christoffel(self):
        """``[k, i, j] = Gamma^k_ij``, order K-1."""
        return jeinsum("kl,lij->kij", self.ginv, self.christoffel_lower, self.n)

    @property
    def n(self):
        return self.g.shape[0]

    @property
    def g0(self):
        return self.g[..., 0]

    @property
    def ginv0(self):
        return self.ginv[..., 0]

    @property
    def signature(self):
        ev = np.linalg.eigvalsh(self.g0)
        return tuple(int(np.sign(v)) for v in sorted(ev, reverse=True))

    def require(self, order, what):
        if self.order < order:
            raise InsufficientOrderError(
                f"{what} needs jet order >= {order}, frame has {self.order}"
            )

    def scalar_jet(self, e) -> Jet:
        """Jet of a scalar expression on this frame's chart, at the frame order."""
        return self.field.eval_jet(e, self.point, self.order)


def build_frame(field: MetricField, point, order: int = 6) -> PointFrame:
    if order < 2:
        raise InsufficientOrderError("a curvature frame needs jet order >= 2")
    point = np.asarray(point, dtype=float)
    n = field.dim
    g = field.metric_jets(point, order)
    if not np.allclose(g[..., 0], g[..., 0].T):
        raise SingularPointError("metric is not symmetric at the point")
    ginv = jmatinv(g, n)

    sqrt_det = Jet(n, order, 0.5 * jlogdet(g, n)).exp().coeffs
    return PointFrame(field, point, order, g, ginv, sqrt_det)


# ---------------------------------------------------------------------------
# point tensors


@dataclass(frozen=True, eq=False)
class Tensor:
    data: np.ndarray
    variance: tuple

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != len(self.variance):
            raise ValueError(f"rank {data.ndim} data with {len(self.variance)} variance flags")
        if data.ndim and len(set(data.shape)) != 1:
            raise ValueError(f"tensor data must be n^rank, got shape {data.shape}")
        if any(v not in (CO, CONTRA) for v in self.variance):
            raise ValueError(f"bad variance flags {self.variance}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "variance", tuple(self.variance))

    @classmethod
    def covariant(cls, data):
        data = np.asarray(data, dtype=float)
        return cls(data, (CO,) * data.ndim)

    @property
    def rank(self):
        return self.data.ndim

    @property
    def dim(self):
        return self.data.shape[0] if self.rank else 0

    def __add__(self, other):
        if self.variance != other.variance:
            raise ValueError("cannot add tensors of different variance")
        return Tensor(self.data + other.data, self.variance)

    def __sub__(self, other):
        if self.variance != other.variance:
            raise ValueError("cannot subtract tensors of different variance")
        return Tensor(self.data - other.data, self.variance)

    def __mul__(self, c):
        return Tensor(self.data * float(c), self.variance)

    __rmul__ = __mul__


def _check_slot(t, slot):
    if not 0 <= slot < t.rank:
        raise IndexError(f"slot {slot} out of range for rank-{t.rank} tensor")


def raise_lower(t: Tensor, slot: int, frame: PointFrame) -> Tensor:
    """Flip the variance of one slot using g or g^-1."""
    _check_slot(t, slot)
    m = frame.ginv0 if t.variance[slot] == CO else frame.g0
    data = np.moveaxis(np.tensordot(m, t.data, axes=([1], [slot])), 0, slot)
    var = list(t.variance)
    var[slot] = CONTRA if var[slot] == CO else CO
    return Tensor(data, tuple(var))


def contract(t: Tensor, slot_a: int, slot_b: int, frame: PointFrame) -> Tensor:
    _check_slot(t, slot_a)
    _check_slot(t, slot_b)
    if slot_a == slot_b:
        raise ValueError("cannot contract a slot with itself")
    va, vb = t.variance[slot_a], t.variance[slot_b]
    data = t.data
    if va == vb:
        log.debug("contract: inserting %s metric for slots (%d, %d)",
                  "inverse" if va == CO else "covariant", slot_a, slot_b)
        m = frame.ginv0 if va == CO else frame.g0
        data = np.moveaxis(np.tensordot(m, data, axes=([1], [slot_b])), 0, slot_b)
    out = np.trace(data, axis1=slot_a, axis2=slot_b)
    var = tuple(v for k, v in enumerate(t.variance) if k not in (slot_a, slot_b))
    return Tensor(out, var)


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    return Tensor(np.multiply.outer(a.data, b.data), a.variance + b.variance)


def raise_all(t: Tensor, frame: PointFrame) -> Tensor:
    for s in range(t.rank):
        if t.variance[s] == CO:
            t = raise_lower(t, s, frame)
    return t


def inner(a: Tensor, b: Tensor, frame: PointFrame) -> float:
    """Complete contraction of two all-covariant tensors slot by slot."""
    if a.variance != b.variance or any(v != CO for v in a.variance):
        raise ValueError("inner() expects all-covariant tensors of equal rank")
    return float(np.sum(a.data * raise_all(b, frame).data))


def norm_sq(a: Tensor, frame: PointFrame) -> float:
    return inner(a, a, frame)
