"""Truncated multivariate Taylor arithmetic.

A jet of order K in n variables stores ``coeffs[alpha] = d^alpha f(x0) / alpha!``
for every multi-index ``|alpha| <= K``.  Multi-indices are enumerated in graded
order, so the coefficients of the order-k truncation are exactly the first
``C(n + k, n)`` entries.  That prefix property lets every array-level routine
below infer the order from the length of the trailing axis: arrays of shape
``(..., N)`` are batches (or tensors) of jets.

Products are plain Cauchy products evaluated from a precomputed pair table and
``np.add.reduceat``; no finite differences are involved anywhere.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOrderError, SingularPointError

__all__ = [
    "Basis",
    "basis",
    "order_of",
    "Jet",
    "jet_variable",
    "jet_arith",
    "jet_elementary",
    "extract_partial",
    "jmul",
    "jeinsum",
    "jderiv",
    "jtruncate",
    "jcompose",
    "jreciprocal",
    "jmatinv",
    "jlogdet",
]


def _graded(n, order):
    def compositions(d, m):
        if m == 1:
            yield (d,)
            return
        for first in range(d, -1, -1):
            for rest in compositions(d - first, m - 1):
                yield (first,) + rest

    out = []
    for d in range(order + 1):
        out.extend(compositions(d, n))
    return out


@dataclass(frozen=True, eq=False)
class Basis:
    """Multi-index bookkeeping for jets in ``n`` variables truncated at ``order``."""

    n: int
    order: int
    alphas: np.ndarray  # (N, n) int
    degree: np.ndarray  # (N,)
    factorial: np.ndarray  # alpha! as float
    keys: np.ndarray  # radix encoding, used for index lookup
    sort: np.ndarray
    # Cauchy-product pair table, sorted by target index
    ia: np.ndarray
    ib: np.ndarray
    starts: np.ndarray

    @property
    def size(self):
        return len(self.alphas)

    def index(self, alpha):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.n:
            raise ValueError(f"multi-index {alpha} has wrong length for n={self.n}")
        if sum(alpha) > self.order or min(alpha, default=0) < 0:
            raise InsufficientOrderError(
                f"multi-index {alpha} exceeds jet order {self.order}"
            )
        key = sum(a * (self.order + 1) ** i for i, a in enumerate(alpha))
        return int(self._lookup(np.array([key]))[0])

    def _lookup(self, keys):
        return self.sort[np.searchsorted(self.keys[self.sort], keys)]


def _size(n, k):
    return math.comb(n + k, n)


@functools.lru_cache(maxsize=None)
def basis(n: int, order: int) -> Basis:
    if n < 1:
        raise ValueError("number of variables must be positive")
    if order < 0:
        raise ValueError("jet order must be non-negative")
    alphas = np.array(_graded(n, order), dtype=np.int64).reshape(-1, n)
    degree = alphas.sum(axis=1)
    factorial = np.array(
        [math.prod(math.factorial(int(a)) for a in row) for row in alphas], dtype=float
    )
    radix = (order + 1) ** np.arange(n, dtype=np.int64)
    keys = alphas @ radix
    sort = np.argsort(keys)
    sorted_keys = keys[sort]

    ia, ib, ic = [], [], []
    for a in range(len(alphas)):
        cnt = _size(n, order - int(degree[a]))
        target = sort[np.searchsorted(sorted_keys, keys[:cnt] + keys[a])]
        ia.append(np.full(cnt, a))
        ib.append(np.arange(cnt))
        ic.append(target)
    ia = np.concatenate(ia)
    ib = np.concatenate(ib)
    ic = np.concatenate(ic)
    perm = np.argsort(ic, kind="stable")
    ia, ib, ic = ia[perm], ib[perm], ic[perm]
    starts = np.searchsorted(ic, np.arange(len(alphas)))
    return Basis(n, order, alphas, degree, factorial, keys, sort, ia, ib, starts)


@functools.lru_cache(maxsize=None)
def _size_to_order(n, size):
    k = 0
    while _size(n, k) < size:
        k += 1
    if _size(n, k) != size:
        raise ValueError(f"{size} is not a valid jet length for n={n}")
    return k


def order_of(a, n):
    """Truncation order of a jet array with trailing coefficient axis."""
    return _size_to_order(n, np.shape(a)[-1])


@functools.lru_cache(maxsize=None)
def _deriv_map(n, order, i):
    # d/dx_i maps an order-k jet to an order-(k-1) jet
    hi = basis(n, order)
    lo = basis(n, order - 1)
    shifted = lo.alphas.copy()
    shifted[:, i] += 1
    radix = (order + 1) ** np.arange(n, dtype=np.int64)
    src = hi._lookup(shifted @ radix)
    mult = shifted[:, i].astype(float)
    return src, mult


# ---------------------------------------------------------------------------
# array-level routines (trailing axis = coefficients)


def jtruncate(a, n, order):
    have = order_of(a, n)
    if order > have:
        raise InsufficientOrderError(f"cannot raise jet order from {have} to {order}")
    return np.asarray(a)[..., : _size(n, order)]


def jmul(a, b, n):
    """Elementwise (broadcasting) product of jet arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    size = min(a.shape[-1], b.shape[-1])
    k = _size_to_order(n, size)
    B = basis(n, k)
    p = a[..., :size][..., B.ia] * b[..., :size][..., B.ib]
    return np.add.reduceat(p, B.starts, axis=-1)


def jeinsum(subscripts, a, b, n):
    """``np.einsum`` over tensor slots combined with the Cauchy product.

    ``subscripts`` only names the tensor slots, e.g. ``"kl,lij->kij"``; the
    coefficient axis is handled implicitly.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    size = min(a.shape[-1], b.shape[-1])
    k = _size_to_order(n, size)
    B = basis(n, k)
    pa = a[..., :size][..., B.ia]
    pb = b[..., :size][..., B.ib]
    p = np.einsum(f"{sa}Z,{sb}Z->{out}Z", pa, pb)
    return np.add.reduceat(p, B.starts, axis=-1)


def jderiv(a, i, n):
    """Partial derivative in variable ``i``; the order drops by one."""
    a = np.asarray(a, dtype=float)
    k = order_of(a, n)
    if k == 0:
        raise InsufficientOrderError("cannot differentiate an order-0 jet")
    if not 0 <= i < n:
        raise IndexError(f"variable index {i} out of range for n={n}")
    src, mult = _deriv_map(n, k, i)
    return a[..., src] * mult


def jcompose(a, taylor, n):
    """Compose a univariate series with the jet ``a``.

    ``taylor[..., r]`` is ``f^(r)(a0) / r!`` (batched like ``a`` without the
    coefficient axis); entries beyond the jet order are ignored.
    """
    a = np.asarray(a, dtype=float)
    k = order_of(a, n)
    taylor = np.asarray(taylor, dtype=float)
    eps = a.copy()
    eps[..., 0] = 0.0
    out = np.zeros_like(a)
    out[..., 0] = taylor[..., k]
    for r in range(k - 1, -1, -1):
        out = jmul(out, eps, n)
        out[..., 0] += taylor[..., r]
    return out


def jreciprocal(a, n):
    a = np.asarray(a, dtype=float)
    a0 = a[..., 0]
    if np.any(a0 == 0.0):
        raise SingularPointError("division by a jet with zero constant term")
    k = order_of(a, n)
    r = np.arange(k + 1)
    taylor = (-1.0) ** r * a0[..., None] ** (-1.0 - r)
    return jcompose(a, taylor, n)


def jmatinv(g, n):
    """Inverse of a jet-valued square matrix ``g[i, j, :]`` (Neumann series)."""
    g = np.asarray(g, dtype=float)
    k = order_of(g, n)
    g0 = g[..., 0]
    if not np.all(np.isfinite(g0)):
        raise SingularPointError("matrix has non-finite entries at the base point")
    cond = np.linalg.cond(g0)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularPointError("matrix is singular at the base point")
    h0 = np.linalg.inv(g0)
    eps = g.copy()
    eps[..., 0] = 0.0
    # step = -h0 . eps; inverse = sum_r step^r . h0
    step = -np.einsum("ij,jkZ->ikZ", h0, eps)
    term = np.zeros_like(g)
    term[..., 0] = h0
    total = term.copy()
    for _ in range(k):
        term = jeinsum("ij,jk->ik", step, term, n)
        total = total + term
    return total


def jlogdet(g, n):
    """Jet of ``log|det g|`` for a jet-valued square matrix."""
    g = np.asarray(g, dtype=float)
    k = order_of(g, n)
    g0 = g[..., 0]
    det0 = np.linalg.det(g0)
    if det0 == 0.0 or not np.isfinite(det0):
        raise SingularPointError("matrix is singular at the base point")
    eps = g.copy()
    eps[..., 0] = 0.0
    # log det(1 + A) = sum_r (-1)^(r+1) tr(A^r) / r, A nilpotent in jet space
    a = np.einsum("ij,jkZ->ikZ", np.linalg.inv(g0), eps)
    out = np.zeros(g.shape[-1])
    out[0] = math.log(abs(det0))
    power = a
    for r in range(1, k + 1):
        out = out + (-1.0) ** (r + 1) / r * np.einsum("iiZ->Z", power)
        if r < k:
            power = jeinsum("ij,jk->ik", power, a, n)
    return out


# ---------------------------------------------------------------------------
# univariate Taylor coefficients of the elementary functions


def _taylor_coeffs(fn, a0, k, exponent=None):
    r = np.arange(k + 1)
    fact = np.array([math.factorial(int(j)) for j in r], dtype=float)
    if fn == "exp":
        return math.exp(a0) / fact
    if fn == "log":
        if a0 <= 0.0:
            raise SingularPointError(f"log of non-positive value {a0}")
        out = np.empty(k + 1)
        out[0] = math.log(a0)
        out[1:] = (-1.0) ** (r[1:] + 1) / (r[1:] * a0 ** r[1:])
        return out
    if fn == "sin":
        return np.array([math.sin(a0 + j * math.pi / 2) for j in r]) / fact
    if fn == "cos":
        return np.array([math.cos(a0 + j * math.pi / 2) for j in r]) / fact
    if fn == "sqrt":
        if a0 <= 0.0:
            raise SingularPointError(f"sqrt of non-positive value {a0}")
        return _taylor_coeffs("pow", a0, k, 0.5)
    if fn == "pow":
        c = float(exponent)
        integral = c == int(c)
        if not integral and a0 <= 0.0:
            raise SingularPointError(
                f"non-integer power {c} of non-positive value {a0}"
            )
        if a0 == 0.0 and (c < 0 or not integral):
            raise SingularPointError(f"power {c} of zero")
        out = np.empty(k + 1)
        binom = 1.0
        for j in range(k + 1):
            if integral and 0 <= c < j:
                out[j] = 0.0
            else:
                e = c - j
                out[j] = binom * (a0 ** int(e) if integral else a0**e)
            binom *= (c - j) / (j + 1)
        return out
    raise ValueError(f"unknown elementary function {fn!r}")


# ---------------------------------------------------------------------------
# scalar jet value type


class Jet:
    """Immutable scalar jet; ``coeffs[alpha] = d^alpha f(x0) / alpha!``."""

    __slots__ = ("n", "order", "coeffs")

    def __init__(self, n, order, coeffs=None):
        size = _size(n, order)
        if coeffs is None:
            arr = np.zeros(size)
        else:
            arr = np.array(coeffs, dtype=float)
            if arr.shape != (size,):
                raise ValueError(
                    f"expected {size} coefficients for n={n}, order={order}, "
                    f"got shape {arr.shape}"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "order", int(order))
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @classmethod
    def constant(cls, value, n, order):
        c = np.zeros(_size(n, order))
        c[0] = value
        return cls(n, order, c)

    @classmethod
    def from_array(cls, arr, n):
        arr = np.asarray(arr, dtype=float)
        return cls(n, order_of(arr, n), arr)

    @property
    def value(self):
        return float(self.coeffs[0])

    @property
    def basis(self):
        return basis(self.n, self.order)

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, value={self.value!r})"

    # -- coercion
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jets over different numbers of variables")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet.constant(float(other), self.n, self.order)
        return NotImplemented

    def _pair(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented, None, None
        k = min(self.order, other.order)
        return k, self.coeffs[: _size(self.n, k)], other.coeffs[: _size(self.n, k)]

    # -- arithmetic
    def __add__(self, other):
        k, a, b = self._pair(other)
        if k is NotImplemented:
            return NotImplemented
        return Jet(self.n, k, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        k, a, b = self._pair(other)
        if k is NotImplemented:
            return NotImplemented
        return Jet(self.n, k, a - b)

    def __rsub__(self, other):
        k, a, b = self._pair(other)
        if k is NotImplemented:
            return NotImplemented
        return Jet(self.n, k, b - a)

    def __neg__(self):
        return Jet(self.n, self.order, -self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.n, self.order, self.coeffs * float(other))
        k, a, b = self._pair(other)
        if k is NotImplemented:
            return NotImplemented
        return Jet(self.n, k, jmul(a, b, self.n))

    __rmul__ = __mul__

    def reciprocal(self):
        return Jet(self.n, self.order, jreciprocal(self.coeffs, self.n))

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            if other == 0:
                raise SingularPointError("division by zero")
            return Jet(self.n, self.order, self.coeffs / float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.reciprocal()

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return (exponent * self.log()).exp()
        return self.pow(float(exponent))

    def __rpow__(self, base):
        base = self._coerce(base)
        if base is NotImplemented:
            return NotImplemented
        return base**self

    # -- elementary functions
    def _apply(self, fn, exponent=None):
        taylor = _taylor_coeffs(fn, self.value, self.order, exponent)
        return Jet(self.n, self.order, jcompose(self.coeffs, taylor, self.n))

    def exp(self):
        return self._apply("exp")

    def log(self):
        return self._apply("log")

    def sin(self):
        return self._apply("sin")

    def cos(self):
        return self._apply("cos")

    def tan(self):
        return self.sin() / self.cos()

    def sqrt(self):
        return self._apply("sqrt")

    def pow(self, c):
        c = float(c)
        if c == int(c) and 0 <= c <= 4:
            out = Jet.constant(1.0, self.n, self.order)
            for _ in range(int(c)):
                out = out * self
            return out
        return self._apply("pow", c)

    def __abs__(self):
        if self.value > 0:
            return self
        if self.value < 0:
            return -self
        raise SingularPointError("abs is not differentiable at zero")

    # -- derivatives
    def derivative(self, i):
        return Jet(self.n, self.order - 1, jderiv(self.coeffs, i, self.n))

    def coefficient(self, alpha):
        return float(self.coeffs[self.basis.index(alpha)])

    def partial(self, alpha):
        """``d^alpha f(x0)``; raises when ``|alpha|`` exceeds the order."""
        if sum(alpha) > self.order:
            raise InsufficientOrderError(
                f"partial of order {sum(alpha)} requested from a jet of order {self.order}"
            )
        idx = self.basis.index(alpha)
        return float(self.coeffs[idx] * self.basis.factorial[idx])

    def truncate(self, order):
        return Jet(self.n, order, jtruncate(self.coeffs, self.n, order))

    def gradient(self):
        return np.array([self.partial(tuple(int(i == j) for j in range(self.n)))
                         for i in range(self.n)])


# ---------------------------------------------------------------------------
# functional API


def jet_variable(i, value, num_vars, order):
    """Jet of the coordinate function ``x_i`` at a base point where it equals ``value``."""
    if not 0 <= i < num_vars:
        raise IndexError(f"variable index {i} out of range for {num_vars} variables")
    c = np.zeros(_size(num_vars, order))
    c[0] = value
    if order >= 1:
        c[1 + i] = 1.0
    return Jet(num_vars, order, c)


def jet_arith(a, b, op):
    if a.n != b.n or a.order != b.order:
        raise ValueError("jet_arith requires equal num_vars and order")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_elementary(a, fn, exponent=None):
    if fn == "pow":
        return a.pow(exponent)
    if fn == "tan":
        return a.tan()
    return a._apply(fn)


def extract_partial(a, alpha):
    return a.partial(alpha)
