"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` stores, for every entry of an array-valued field, the Taylor
coefficients of that entry around a fixed base point, truncated at a total
degree ``order``.  There is exactly one coefficient per unordered multi-index,
so mixed partials extracted from a jet are symmetric bit-for-bit.

Arithmetic follows the usual rules for truncated power series: products are
Cauchy products restricted to degree <= order, elementary functions are
composed through their own Taylor expansion around the base value, and
differentiation shifts coefficients down one degree (losing one order of
validity).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularMetric

__all__ = [
    "Space",
    "Jet",
    "Jet3",
    "get_space",
    "einsum",
    "inv",
    "stack",
    "value_of",
]


class Space:
    """Monomial basis of total degree <= ``order`` in ``nvars`` variables."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        monos = [
            m
            for d in range(order + 1)
            for m in sorted(_exponents(nvars, d), reverse=True)
        ]
        self.monomials: list[tuple[int, ...]] = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.size = len(monos)
        self.degree = np.array([sum(m) for m in monos], dtype=int)
        self.factorial = np.array(
            [math.prod(math.factorial(e) for e in m) for m in monos], dtype=float
        )

        ia, ib, ic = [], [], []
        for a, ma in enumerate(monos):
            for b, mb in enumerate(monos):
                if sum(ma) + sum(mb) <= order:
                    ia.append(a)
                    ib.append(b)
                    ic.append(self.index[tuple(x + y for x, y in zip(ma, mb))])
        self.pair_a = np.array(ia, dtype=int)
        self.pair_b = np.array(ib, dtype=int)
        self.pair_matrix = np.zeros((len(ia), self.size))
        self.pair_matrix[np.arange(len(ia)), ic] = 1.0

        # d/dv maps coefficient of (b + e_v) times (b_v + 1) onto slot b
        self.deriv_src = np.zeros((nvars, self.size), dtype=int)
        self.deriv_fac = np.zeros((nvars, self.size))
        for b, mb in enumerate(monos):
            if sum(mb) >= order:
                continue
            for v in range(nvars):
                up = list(mb)
                up[v] += 1
                self.deriv_src[v, b] = self.index[tuple(up)]
                self.deriv_fac[v, b] = up[v]

    def __repr__(self) -> str:
        return f"Space(nvars={self.nvars}, order={self.order})"


def _exponents(nvars: int, degree: int):
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        yield tuple(e)


@functools.lru_cache(maxsize=None)
def get_space(nvars: int, order: int) -> Space:
    return Space(nvars, order)


class Jet:
    """Array of truncated Taylor polynomials sharing one :class:`Space`.

    ``coef`` has shape ``shape + (space.size,)``.  Coefficients of degree
    above ``order`` are meaningless and never read.
    """

    __slots__ = ("space", "coef", "order")
    __array_priority__ = 1000

    def __init__(self, space: Space, coef: np.ndarray, order: int | None = None):
        self.space = space
        self.coef = coef
        self.order = space.order if order is None else order

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, space: Space, value) -> "Jet":
        value = np.asarray(value, dtype=float)
        coef = np.zeros(value.shape + (space.size,))
        coef[..., 0] = value
        return cls(space, coef)

    @classmethod
    def zeros(cls, space: Space, shape: Sequence[int]) -> "Jet":
        return cls(space, np.zeros(tuple(shape) + (space.size,)))

    @classmethod
    def variable(cls, space: Space, var: int, value: float) -> "Jet":
        coef = np.zeros(space.size)
        coef[0] = value
        if space.order >= 1:
            coef[1 + var] = 1.0
        return cls(space, coef)

    # array protocol -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coef.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.coef.ndim - 1

    @property
    def value(self) -> np.ndarray:
        if self.order < 0:
            raise ValueError("jet has no valid coefficients left (differentiated past its order)")
        return self.coef[..., 0]

    def __len__(self) -> int:
        return self.shape[0]

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.space, self.coef[idx + (Ellipsis, slice(None))], self.order)

    def __setitem__(self, idx, other) -> None:
        if not isinstance(idx, tuple):
            idx = (idx,)
        key = idx + (Ellipsis, slice(None))
        if isinstance(other, Jet):
            self.coef[key] = other.coef
            self.order = min(self.order, other.order)
        else:
            self.coef[key] = 0.0
            self.coef[idx + (Ellipsis, 0)] = other

    def transpose(self, *axes: int) -> "Jet":
        axes = axes or tuple(reversed(range(self.ndim)))
        return Jet(self.space, self.coef.transpose(tuple(axes) + (self.ndim,)), self.order)

    def swapaxes(self, a: int, b: int) -> "Jet":
        axes = list(range(self.ndim))
        axes[a], axes[b] = axes[b], axes[a]
        return self.transpose(*axes)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        return Jet(self.space, self.coef.sum(axis=axis), self.order)

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.space, self.coef.reshape(tuple(shape) + (self.space.size,)), self.order)

    def copy(self) -> "Jet":
        return Jet(self.space, self.coef.copy(), self.order)

    # arithmetic -----------------------------------------------------------
    def __neg__(self) -> "Jet":
        return Jet(self.space, -self.coef, self.order)

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return Jet(self.space, self.coef + other.coef, min(self.order, other.order))
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.shape, other.shape)
        coef = np.array(np.broadcast_to(self.coef, shape + (self.space.size,)))
        coef[..., 0] += other
        return Jet(self.space, coef, self.order)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            sp = self.space
            prod = self.coef[..., sp.pair_a] * other.coef[..., sp.pair_b]
            return Jet(sp, prod @ sp.pair_matrix, min(self.order, other.order))
        other = np.asarray(other, dtype=float)
        return Jet(self.space, self.coef * other[..., None], self.order)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0.0):
            raise DomainError("division by zero")
        return Jet(self.space, self.coef / other[..., None], self.order)

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, exponent) -> "Jet":
        if isinstance(exponent, (int, np.integer)) or float(exponent).is_integer():
            return self.powi(int(exponent))
        if float(exponent) == 0.5:
            return self.sqrt()
        raise DomainError(f"unsupported exponent {exponent!r}; use exp/log")

    def powi(self, n: int) -> "Jet":
        if n == 0:
            return Jet.constant(self.space, np.ones(self.shape))
        if n < 0:
            return self.reciprocal().powi(-n)
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    # calculus -------------------------------------------------------------
    def partial(self, var: int) -> "Jet":
        sp = self.space
        coef = self.coef[..., sp.deriv_src[var]] * sp.deriv_fac[var]
        return Jet(sp, coef, self.order - 1)

    def grad(self, nvars: int | None = None) -> "Jet":
        """Partials along the first ``nvars`` variables, stacked on a new leading axis."""
        sp = self.space
        nvars = sp.nvars if nvars is None else nvars
        coef = self.coef[..., sp.deriv_src[:nvars]] * sp.deriv_fac[:nvars]
        return Jet(sp, np.moveaxis(coef, -2, 0), self.order - 1)

    def derivative(self, multi_index: Sequence[int]) -> np.ndarray:
        """Value of the partial derivative along the listed variables (with repeats)."""
        if len(multi_index) > self.order:
            raise ValueError(f"jet of order {self.order} cannot give a derivative of order {len(multi_index)}")
        e = [0] * self.space.nvars
        for v in multi_index:
            e[v] += 1
        slot = self.space.index[tuple(e)]
        return self.coef[..., slot] * self.space.factorial[slot]

    # elementary functions -------------------------------------------------
    def _compose(self, derivs: list[np.ndarray]) -> "Jet":
        d = self.coef.copy()
        d[..., 0] = 0.0
        d = Jet(self.space, d, self.order)
        out = Jet.constant(self.space, derivs[0])
        out.order = self.order
        term = d
        top = min(self.order, len(derivs) - 1)
        for k in range(1, top + 1):
            out = out + term * (derivs[k] / math.factorial(k))
            if k < top:
                term = term * d
        return out

    def reciprocal(self) -> "Jet":
        a = self.value
        if np.any(a == 0.0):
            raise DomainError("division by zero")
        r = 1.0 / a
        return self._compose([r, -r**2, 2 * r**3, -6 * r**4])

    def sqrt(self) -> "Jet":
        a = self.value
        if np.any(a < 0.0) or (self.order > 0 and np.any(a == 0.0)):
            raise DomainError("sqrt of non-positive value")
        s = np.sqrt(a)
        if self.order == 0:
            return self._compose([s])
        return self._compose([s, 0.5 / s, -0.25 / s**3, 0.375 / s**5])

    def exp(self) -> "Jet":
        e = np.exp(self.value)
        return self._compose([e, e, e, e])

    def log(self) -> "Jet":
        a = self.value
        if np.any(a <= 0.0):
            raise DomainError("log of non-positive value")
        r = 1.0 / a
        return self._compose([np.log(a), r, -r**2, 2 * r**3])

    def sin(self) -> "Jet":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._compose([s, c, -s, -c])

    def cos(self) -> "Jet":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._compose([c, -s, -c, s])

    def tan(self) -> "Jet":
        c = np.cos(self.value)
        if np.any(np.abs(c) < 1e-300):
            raise DomainError("tan at a pole")
        t = np.tan(self.value)
        u = 1.0 + t * t
        return self._compose([t, u, 2 * t * u, 2 * u * (1 + 3 * t * t)])

    def sinh(self) -> "Jet":
        s, c = np.sinh(self.value), np.cosh(self.value)
        return self._compose([s, c, s, c])

    def cosh(self) -> "Jet":
        s, c = np.sinh(self.value), np.cosh(self.value)
        return self._compose([c, s, c, s])

    def tanh(self) -> "Jet":
        t = np.tanh(self.value)
        u = 1.0 - t * t
        return self._compose([t, u, -2 * t * u, u * (6 * t * t - 2)])

    def abs(self) -> "Jet":
        a = self.value
        if self.order > 0 and np.any(a == 0.0):
            raise DomainError("abs is not differentiable at 0")
        s = np.sign(a)
        z = np.zeros_like(a)
        return self._compose([np.abs(a), s, z, z])

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, order={self.order}, value={self.value!r})"


def value_of(x) -> np.ndarray:
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def stack(items: Sequence, axis: int = 0) -> Jet:
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        raise TypeError("stack needs at least one Jet")
    sp = jets[0].space
    order = min(j.order for j in jets)
    coefs = [x.coef if isinstance(x, Jet) else Jet.constant(sp, x).coef for x in items]
    if axis < 0:
        axis += coefs[0].ndim
    return Jet(sp, np.stack(coefs, axis=axis), order)


_PAIR = "Z"
_MONO = "Y"


def einsum(spec: str, *operands):
    """``numpy.einsum`` for a mix of jets and plain arrays (lowercase labels only).

    Operands are folded left to right; jet-jet products use the Cauchy
    product of the underlying space.
    """
    inputs, output = spec.replace(" ", "").split("->")
    labels = inputs.split(",")
    if len(labels) != len(operands):
        raise ValueError("operand count does not match subscripts")
    acc, acc_lab = operands[0], labels[0]
    for k in range(1, len(operands)):
        rest = "".join(labels[k + 1:]) + output
        lab = labels[k]
        keep = "".join(dict.fromkeys(c for c in acc_lab + lab if c in rest))
        acc = _einsum2(acc_lab, lab, keep, acc, operands[k])
        acc_lab = keep
    if acc_lab != output:
        acc = _einsum2(acc_lab, "", output, acc, 1.0)
    return acc


def _einsum2(la: str, lb: str, out: str, a, b):
    ja, jb = isinstance(a, Jet), isinstance(b, Jet)
    if not ja and not jb:
        return np.einsum(f"{la},{lb}->{out}", a, b)
    if ja and jb:
        sp = a.space
        aa = a.coef[..., sp.pair_a]
        bb = b.coef[..., sp.pair_b]
        tmp = np.einsum(f"{la}{_PAIR},{lb}{_PAIR}->{out}{_PAIR}", aa, bb, optimize=True)
        return Jet(sp, tmp @ sp.pair_matrix, min(a.order, b.order))
    if ja:
        coef = np.einsum(f"{la}{_MONO},{lb}->{out}{_MONO}", a.coef, np.asarray(b, dtype=float), optimize=True)
        return Jet(a.space, coef, a.order)
    coef = np.einsum(f"{la},{lb}{_MONO}->{out}{_MONO}", np.asarray(a, dtype=float), b.coef, optimize=True)
    return Jet(b.space, coef, b.order)


def inv(m: Jet) -> Jet:
    """Inverse of a jet-valued matrix (last two axes) by Neumann expansion."""
    m0 = m.value
    try:
        cond = np.linalg.cond(m0)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(str(exc)) from exc
    if not np.all(np.isfinite(cond)) or np.any(cond > 1e13):
        raise SingularMetric("matrix is singular at the evaluation point")
    i0 = np.linalg.inv(m0)
    nil = m.coef.copy()
    nil[..., 0] = 0.0
    nil = Jet(m.space, nil, m.order)
    # (m0 + N)^-1 = sum_k (-m0^-1 N)^k m0^-1, exact once N^k vanishes
    mul = -_matmul(i0, nil)
    term = Jet.constant(m.space, i0)
    term.order = m.order
    total = term
    for _ in range(min(m.order, m.space.order)):
        term = _matmul(mul, term)
        total = total + term
    return total


def _matmul(a, b):
    if (isinstance(a, Jet) and a.ndim != 2) or (isinstance(b, Jet) and b.ndim != 2):
        raise ValueError("jet inverse supports single matrices only")
    return einsum("ij,jk->ik", a, b)


@dataclass(frozen=True)
class Jet3:
    """All partial derivatives of a scalar up to order 3 at one point."""

    value: float
    first: np.ndarray
    second: np.ndarray
    third: np.ndarray
    order: int

    @classmethod
    def from_jet(cls, jet: Jet) -> "Jet3":
        if jet.ndim != 0:
            raise ValueError("Jet3 holds scalar jets only")
        sp = jet.space
        m = sp.nvars
        first = np.full(m, np.nan)
        second = np.full((m, m), np.nan)
        third = np.full((m, m, m), np.nan)
        if jet.order >= 1:
            first = np.array([jet.derivative((i,)) for i in range(m)], dtype=float)
        if jet.order >= 2:
            for i, j in itertools.combinations_with_replacement(range(m), 2):
                v = float(jet.derivative((i, j)))
                second[i, j] = second[j, i] = v
        if jet.order >= 3:
            for idx in itertools.combinations_with_replacement(range(m), 3):
                v = float(jet.derivative(idx))
                for p in set(itertools.permutations(idx)):
                    third[p] = v
        return cls(float(jet.value), first, second, third, jet.order)
