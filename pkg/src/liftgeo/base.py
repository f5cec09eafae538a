"""Riemannian data on the base manifold M in a single chart.

Conventions (used by every other module):

* connection coefficients ``gamma[k, i, j]`` = Γ^k_ij, ∇_{∂_i} ∂_j = Γ^k_ij ∂_k
* curvature ``R[l, i, j, k]`` = R^l_ijk with
  R(∂_i, ∂_j) ∂_k = (∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik) ∂_l
* lowered curvature ``R_low[i, j, k, l]`` = g_lm R^m_ijk = g(R(∂_i, ∂_j) ∂_k, ∂_l)
* torsion ``T[k, i, j]`` = Γ^k_ij − Γ^k_ji
* cubic tensor ``C[i, j, k]`` = (∇_i g)_jk = ∂_i g_jk − Γ^r_ij g_rk − Γ^r_ik g_jr
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from . import jets
from .errors import NonPositiveWeight, SingularMetric, ValidationError
from .expr import ScalarFieldExpr, constant, evaluate_array, parse
from .jets import Jet, einsum, get_space
from .report import CheckReport, ResidualTracker


class Probe:
    """Jet evaluation context at one point of M (or of TM when ``y`` is given).

    Variables ``0..n-1`` are the base coordinates, ``n..2n-1`` the fiber
    coordinates.  Derived quantities are memoized per probe.
    """

    def __init__(self, x: Sequence[float], y: Sequence[float] | None = None, order: int = 3):
        self.x = np.asarray(x, dtype=float)
        self.n = len(self.x)
        self.y = None if y is None else np.asarray(y, dtype=float)
        nvars = self.n if y is None else 2 * self.n
        self.space = get_space(nvars, order)
        self.order = order
        self.xs = [Jet.variable(self.space, i, v) for i, v in enumerate(self.x)]
        self.ys = None if y is None else [Jet.variable(self.space, self.n + i, v) for i, v in enumerate(self.y)]
        self._cache: dict[Hashable, object] = {}

    @property
    def on_bundle(self) -> bool:
        return self.y is not None

    def y_jet(self) -> Jet:
        if self.ys is None:
            raise ValueError("probe has no fiber coordinates")
        return jets.stack(self.ys)

    def memo(self, key: Hashable, fn: Callable[[], object]):
        try:
            return self._cache[key]
        except KeyError:
            val = self._cache[key] = fn()
            return val

    def grad(self, jet: Jet) -> Jet:
        """Partials along base coordinates only, on a new leading axis."""
        return jet.grad(self.n)


def _as_expr(e, dim: int, fiber: bool = False) -> ScalarFieldExpr:
    if isinstance(e, ScalarFieldExpr):
        return e
    if isinstance(e, (int, float)):
        return constant(e, dim)
    return parse(str(e), dim, fiber)


@dataclass(frozen=True)
class ChartDomain:
    """Product of open coordinate intervals."""

    intervals: tuple[tuple[float, float], ...]

    @classmethod
    def cube(cls, dim: int, lo: float = -1.0, hi: float = 1.0) -> "ChartDomain":
        return cls(tuple((lo, hi) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def contains(self, x: Sequence[float]) -> bool:
        return all(a < v < b for v, (a, b) in zip(x, self.intervals))

    def sample(self, rng: np.random.Generator, count: int, margin: float = 0.02) -> np.ndarray:
        """Uniform samples, kept a small relative margin away from the boundary."""
        lo = np.array([a for a, _ in self.intervals])
        hi = np.array([b for _, b in self.intervals])
        pad = margin * (hi - lo)
        return rng.uniform(lo + pad, hi - pad, size=(count, self.dim))


class MetricField:
    """Symmetric n×n field of expressions; only the upper triangle is stored."""

    def __init__(self, components, chart: ChartDomain | None = None):
        comps = [list(row) for row in components]
        n = len(comps)
        if any(len(row) != n for row in comps):
            raise ValidationError("metric must be square")
        upper = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(i, n):
                a, b = _as_expr(comps[i][j], n), _as_expr(comps[j][i], n)
                if a != b:
                    raise ValidationError(f"metric entries ({i},{j}) and ({j},{i}) differ")
                if a.uses_fiber:
                    raise ValidationError("metric components may not use fiber variables")
                upper[i, j] = upper[j, i] = a
        self.components = upper
        self.dim = n
        self.chart = chart or ChartDomain.cube(n, -np.inf, np.inf)

    @classmethod
    def diagonal(cls, entries, chart: ChartDomain | None = None) -> "MetricField":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], chart)

    def jet(self, probe: Probe) -> Jet:
        return probe.memo(("g", id(self)), lambda: evaluate_array(self.components, probe.xs))

    def at(self, x: Sequence[float]) -> np.ndarray:
        return self.jet(Probe(x, order=0)).value

    def validate(self, points: Iterable[Sequence[float]]) -> None:
        """Raise ValidationError unless the matrix is SPD at every point."""
        for x in points:
            m = self.at(x)
            if not np.all(np.isfinite(m)):
                raise ValidationError(f"metric is not finite at {list(x)}")
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise ValidationError(f"metric is not positive-definite at {list(x)}") from None


class VectorFieldBase:
    """Vector field X = X^i ∂_i given by expressions."""

    def __init__(self, components, name: str = "X"):
        self.components = np.array([_as_expr(c, len(components)) for c in components], dtype=object)
        self.dim = len(components)
        self.name = name

    def jet(self, probe: Probe) -> Jet:
        return probe.memo(("X", id(self)), lambda: evaluate_array(self.components, probe.xs))

    def at(self, x: Sequence[float]) -> np.ndarray:
        return self.jet(Probe(x, order=0)).value

    def __repr__(self) -> str:
        return f"VectorFieldBase({[str(c) for c in self.components]})"


class ConnectionField:
    """Affine connection on M; subclasses supply ``jet``."""

    dim: int
    torsion_free: bool = False

    def jet(self, probe: Probe) -> Jet:
        raise NotImplementedError

    def coefficients(self, x: Sequence[float]) -> np.ndarray:
        return self.jet(Probe(x, order=1)).value


class ExplicitConnection(ConnectionField):
    def __init__(self, coefficients, torsion_free: bool = False):
        arr = np.asarray(coefficients, dtype=object)
        n = arr.shape[0]
        if arr.shape != (n, n, n):
            raise ValidationError("connection coefficients must be an n×n×n array")
        self.coefficients_expr = np.empty(arr.shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            self.coefficients_expr[idx] = _as_expr(arr[idx], n)
        self.dim = n
        self.torsion_free = torsion_free

    @classmethod
    def zero(cls, dim: int) -> "ExplicitConnection":
        return cls(np.zeros((dim, dim, dim)), torsion_free=True)

    def jet(self, probe: Probe) -> Jet:
        return probe.memo(("gamma", id(self)), lambda: evaluate_array(self.coefficients_expr, probe.xs))


class LeviCivitaConnection(ConnectionField):
    torsion_free = True

    def __init__(self, metric: MetricField):
        self.metric = metric
        self.dim = metric.dim

    def jet(self, probe: Probe) -> Jet:
        return probe.memo(("gamma", id(self)), lambda: christoffel(self.metric.jet(probe), probe.n))


def levi_civita(g: MetricField) -> LeviCivitaConnection:
    return LeviCivitaConnection(g)


# ---------------------------------------------------------------------------
# jet-level building blocks


def metric_inverse(g: MetricField, probe: Probe) -> Jet:
    return probe.memo(("ginv", id(g)), lambda: jets.inv(g.jet(probe)))


def christoffel(g: Jet, nvars: int) -> Jet:
    """Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij) over the first ``nvars`` coordinates."""
    ginv = jets.inv(g)
    dg = g.grad(nvars)  # dg[a, i, j] = ∂_a g_ij
    lowered = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)  # [i, j, l]
    return 0.5 * einsum("kl,ijl->kij", ginv, lowered)


def riemann(gamma: Jet, nvars: int) -> Jet:
    dG = gamma.grad(nvars)  # dG[a, l, j, k] = ∂_a Γ^l_jk
    quad = einsum("lim,mjk->lijk", gamma, gamma)
    return dG.transpose(1, 0, 2, 3) - dG.transpose(1, 2, 0, 3) + quad - quad.transpose(0, 2, 1, 3)


def cubic(g: Jet, gamma: Jet, nvars: int) -> Jet:
    dg = g.grad(nvars)
    t = einsum("rij,rk->ijk", gamma, g)
    return dg - t - t.transpose(0, 2, 1)


class BaseGeometry:
    """Metric plus connection on M, with memoized jets for one probe.

    ``curvature_sign`` multiplies every curvature value handed to the
    tangent-bundle constructions; it exists to test global sign conventions.
    """

    def __init__(self, metric: MetricField, connection: ConnectionField | None = None,
                 curvature_sign: int = 1):
        if curvature_sign not in (1, -1):
            raise ValueError("curvature_sign must be +1 or -1")
        self.metric = metric
        self.connection = connection if connection is not None else levi_civita(metric)
        if self.connection.dim != metric.dim:
            raise ValidationError("metric and connection dimensions differ")
        self.curvature_sign = curvature_sign
        self.dim = metric.dim

    @property
    def is_levi_civita(self) -> bool:
        return isinstance(self.connection, LeviCivitaConnection) and self.connection.metric is self.metric

    def g(self, probe: Probe) -> Jet:
        return self.metric.jet(probe)

    def ginv(self, probe: Probe) -> Jet:
        return metric_inverse(self.metric, probe)

    def gamma(self, probe: Probe) -> Jet:
        return self.connection.jet(probe)

    def riemann(self, probe: Probe) -> Jet:
        """R^l_ijk (times ``curvature_sign``)."""
        def build():
            r = riemann(self.gamma(probe), probe.n)
            return r if self.curvature_sign == 1 else -r
        return probe.memo(("R", id(self)), build)

    def riemann_lowered(self, probe: Probe) -> Jet:
        return probe.memo(("Rlow", id(self)),
                          lambda: einsum("mijk,lm->ijkl", self.riemann(probe), self.g(probe)))

    def cubic(self, probe: Probe) -> Jet:
        return probe.memo(("C", id(self)), lambda: cubic(self.g(probe), self.gamma(probe), probe.n))

    def scalar(self, f: ScalarFieldExpr, probe: Probe) -> Jet:
        return probe.memo(("f", id(f)), lambda: f.taylor(probe.xs))

    def dscalar(self, f: ScalarFieldExpr, probe: Probe) -> Jet:
        """∂_i f."""
        return probe.memo(("df", id(f)), lambda: probe.grad(self.scalar(f, probe)))

    def gradient(self, f: ScalarFieldExpr, probe: Probe) -> Jet:
        """(grad f)^k = g^kl ∂_l f."""
        return probe.memo(("gradf", id(self), id(f)),
                          lambda: einsum("kl,l->k", self.ginv(probe), self.dscalar(f, probe)))

    def nabla_gradient(self, f: ScalarFieldExpr, probe: Probe) -> Jet:
        """``H[j, k]`` = (∇_{∂_j} grad f)^k = ∂_j F^k + Γ^k_jl F^l."""
        def build():
            F = self.gradient(f, probe)
            return probe.grad(F) + einsum("kjl,l->jk", self.gamma(probe), F)
        return probe.memo(("hessf", id(self), id(f)), build)

    def weight(self, f: ScalarFieldExpr, probe: Probe, name: str = "f") -> Jet:
        val = self.scalar(f, probe)
        if np.any(val.value <= 0.0):
            raise NonPositiveWeight(f"{name} = {float(val.value):.6g} is not positive at x = {probe.x.tolist()}")
        return val


# ---------------------------------------------------------------------------
# point-level operations


@dataclass(frozen=True)
class CurvatureValue:
    point: np.ndarray
    components: np.ndarray  # R^l_ijk as [l, i, j, k]
    lowered: np.ndarray | None  # R_ijkl = g_lm R^m_ijk

    def sectional(self, metric: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        """K(u, v) = g(R(u, v) v, u) / (g(u,u) g(v,v) − g(u,v)²)."""
        if self.lowered is None:
            raise ValueError("sectional curvature needs the lowered tensor")
        num = np.einsum("ijkl,i,j,k,l->", self.lowered, u, v, v, u)
        den = (u @ metric @ u) * (v @ metric @ v) - (u @ metric @ v) ** 2
        return float(num / den)


@dataclass(frozen=True)
class CubicValue:
    point: np.ndarray
    components: np.ndarray  # C_ijk


def curvature(conn: ConnectionField, p: Sequence[float], metric: MetricField | None = None) -> CurvatureValue:
    probe = Probe(p, order=2)
    R = riemann(conn.jet(probe), probe.n).value
    if metric is None and isinstance(conn, LeviCivitaConnection):
        metric = conn.metric
    low = None if metric is None else np.einsum("mijk,lm->ijkl", R, metric.jet(probe).value)
    return CurvatureValue(np.asarray(p, float), R, low)


def torsion(conn: ConnectionField, p: Sequence[float]) -> np.ndarray:
    gam = conn.coefficients(p)
    return gam - gam.transpose(0, 2, 1)


def cubic_tensor(g: MetricField, conn: ConnectionField, p: Sequence[float]) -> CubicValue:
    probe = Probe(p, order=2)
    return CubicValue(np.asarray(p, float), cubic(g.jet(probe), conn.jet(probe), probe.n).value)


def codazzi_residual(C: np.ndarray) -> np.ndarray:
    """max(|C_ijk − C_jki|, |C_ijk − C_kij|) for every index triple."""
    return np.maximum(np.abs(C - C.transpose(1, 2, 0)), np.abs(C - C.transpose(2, 0, 1)))


def is_codazzi(g: MetricField, conn: ConnectionField, samples: Iterable[Sequence[float]],
               tol: float = 1e-9, seed: int | None = None) -> CheckReport:
    track = ResidualTracker()
    count = 0
    for x in samples:
        count += 1
        track.add_array(codazzi_residual(cubic_tensor(g, conn, x).components), x)
    return track.report("codazzi-base", tol, count, seed)


def lie_derivative_metric(X: VectorFieldBase, g: MetricField, p: Sequence[float]) -> np.ndarray:
    """(L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k."""
    probe = Probe(p, order=1)
    Xj, gj = X.jet(probe), g.jet(probe)
    dX = probe.grad(Xj).value  # [i, k] = ∂_i X^k
    dg = probe.grad(gj).value
    G = gj.value
    return np.einsum("k,kij->ij", Xj.value, dg) + np.einsum("kj,ik->ij", G, dX) + np.einsum("ik,jk->ij", G, dX)


def lie_derivative_connection(X: VectorFieldBase, conn: ConnectionField, p: Sequence[float]) -> np.ndarray:
    """Components ``L[k, i, j]`` of (L_X ∇)(∂_i, ∂_j)."""
    probe = Probe(p, order=3)
    return lie_derivative_connection_jet(X.jet(probe), conn.jet(probe), probe).value


def lie_derivative_connection_jet(Xj: Jet, gam: Jet, probe: Probe, nvars: int | None = None) -> Jet:
    """(L_X Γ)^r_mn = ∂_m∂_n X^r + X^s ∂_s Γ^r_mn − Γ^s_mn ∂_s X^r + Γ^r_sn ∂_m X^s + Γ^r_ms ∂_n X^s."""
    grad = (lambda j: j.grad(nvars)) if nvars is not None else probe.grad
    dX = grad(Xj)  # [m, r]
    ddX = grad(dX)  # [n, m, r]
    dG = grad(gam)  # [s, r, m, n]
    return (ddX.transpose(2, 1, 0)
            + einsum("s,srmn->rmn", Xj, dG)
            - einsum("smn,sr->rmn", gam, dX)
            + einsum("rsn,ms->rmn", gam, dX)
            + einsum("rms,ns->rmn", gam, dX))


def gradient(g: MetricField, phi: ScalarFieldExpr, p: Sequence[float]) -> np.ndarray:
    probe = Probe(p, order=1)
    return BaseGeometry(g).gradient(phi, probe).value


def a_f(g: MetricField, f: ScalarFieldExpr, p: Sequence[float], X: Sequence[float], Y: Sequence[float]) -> np.ndarray:
    """A_f(X, Y) = (X(f) Y + Y(f) X − g(X, Y) grad f) / (2 f)."""
    probe = Probe(p, order=1)
    geo = BaseGeometry(g)
    fv = float(geo.weight(f, probe).value)
    df = geo.dscalar(f, probe).value
    G = g.jet(probe).value
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    gradf = geo.gradient(f, probe).value
    return ((X @ df) * Y + (Y @ df) * X - (X @ G @ Y) * gradf) / (2.0 * fv)


def a_f_tensor(geo: BaseGeometry, f: ScalarFieldExpr, probe: Probe) -> Jet:
    """``A[k, i, j]`` = A_f(∂_i, ∂_j)^k as a jet."""
    fv = geo.weight(f, probe)
    df = geo.dscalar(f, probe)
    eye = np.eye(geo.dim)
    t = einsum("i,kj->kij", df, eye)
    return (t + t.transpose(0, 2, 1) - einsum("ij,k->kij", geo.g(probe), geo.gradient(f, probe))) * (0.5 / fv)
