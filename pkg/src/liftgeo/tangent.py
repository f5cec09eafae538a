"""Geometry of the tangent bundle TM in induced coordinates (x, y).

Index conventions (frame indices run over ``0..2n-1``):

* frame ``E[A, mu]``: rows are the adapted frame vectors δ_0..δ_{n-1},
  ∂_0̄..∂_{n-1}̄ written in the coordinate basis {∂_i, ∂_ī};
  δ_i = ∂_i − y^k Γ^j_ki ∂_j̄
* coframe ``W[mu, A]`` = inverse of ``E``, so ∂_mu = W[mu, A] E_A
* connection ``gam[C, A, B]`` = Γ̄^C_AB with ∇̄_{E_A} E_B = Γ̄^C_AB E_C
* structure functions ``c[C, A, B]``: [E_A, E_B] = c^C_AB E_C
* curvature ``R[D, A, B, C]``: R̄(E_A, E_B) E_C = R̄^D_ABC E_D
* torsion ``T[C, A, B]`` = Γ̄^C_AB − Γ̄^C_BA − c^C_AB
* cubic tensor ``C[A, B, C]`` = E_A(Ḡ_BC) − Γ̄^D_AB Ḡ_DC − Γ̄^D_AC Ḡ_BD
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jets
from .base import (BaseGeometry, ConnectionField, MetricField, Probe, VectorFieldBase,
                   _as_expr, a_f_tensor, christoffel, lie_derivative_connection_jet)
from .errors import ValidationError
from .expr import ScalarFieldExpr
from .jets import Jet, einsum

_LETTERS = "bcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class TMPoint:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError("base and fiber coordinates must have the same length")
        if not all(np.isfinite(self.x + self.y)):
            raise ValueError("TM point coordinates must be finite")

    @property
    def dim(self) -> int:
        return len(self.x)

    def as_array(self) -> np.ndarray:
        return np.array(self.x + self.y)


@dataclass(frozen=True)
class TMVectorValue:
    """Components on the adapted frame: ``horiz`` on δ_i, ``vert`` on ∂_ī."""

    horiz: np.ndarray
    vert: np.ndarray

    @classmethod
    def from_frame(cls, comps: np.ndarray) -> "TMVectorValue":
        comps = np.asarray(comps, dtype=float)
        n = comps.shape[0] // 2
        return cls(comps[:n].copy(), comps[n:].copy())

    @property
    def frame(self) -> np.ndarray:
        return np.concatenate([self.horiz, self.vert])


def along(E: Jet, F: Jet, nvars: int) -> Jet:
    """``D[A, ...]`` = E_A(F): derivative of every entry of ``F`` along each row of ``E``."""
    dF = F.grad(nvars)
    rest = _LETTERS[:F.ndim]
    return einsum(f"am,m{rest}->a{rest}", E, dF)


class TangentBundle:
    """Frame data of TM attached to a base geometry (its connection defines δ_i)."""

    def __init__(self, base: BaseGeometry):
        self.base = base
        self.n = base.dim

    def probe(self, p: TMPoint, order: int) -> Probe:
        if p.dim != self.n:
            raise ValueError(f"point has dimension {p.dim}, base has {self.n}")
        return Probe(p.x, p.y, order)

    def nonlinear(self, probe: Probe) -> Jet:
        """``N[i, j]`` = y^k Γ^j_ki."""
        return probe.memo(("N", id(self)),
                          lambda: einsum("k,jki->ij", probe.y_jet(), self.base.gamma(probe)))

    def _blocks(self, probe: Probe, sign: float) -> Jet:
        n = self.n
        N = self.nonlinear(probe)
        M = Jet.zeros(probe.space, (2 * n, 2 * n))
        M[:, :] = np.eye(2 * n)
        M[:n, n:] = sign * N
        return M

    def frame(self, probe: Probe) -> Jet:
        return probe.memo(("E", id(self)), lambda: self._blocks(probe, -1.0))

    def coframe(self, probe: Probe) -> Jet:
        return probe.memo(("W", id(self)), lambda: self._blocks(probe, 1.0))

    def along(self, F: Jet, probe: Probe) -> Jet:
        return along(self.frame(probe), F, 2 * self.n)

    def structure(self, probe: Probe) -> Jet:
        def build():
            E = self.frame(probe)
            D = self.along(E, probe)  # D[A, B, nu] = E_A(E_B^nu)
            return einsum("abv,vc->cab", D - D.transpose(1, 0, 2), self.coframe(probe))
        return probe.memo(("c", id(self)), build)

    def to_frame(self, V: Jet, probe: Probe) -> Jet:
        """Coordinate components V^mu to frame components V^A."""
        return einsum("m,ma->a", V, self.coframe(probe))


def adapted_frame(conn: ConnectionField, p: TMPoint) -> tuple[np.ndarray, np.ndarray]:
    """Change-of-frame matrix ``E`` (rows δ_i, ∂_ī in coordinates) and its inverse."""
    bundle = TangentBundle(_geometry_for(conn))
    probe = bundle.probe(p, 1)  # a Levi-Civita base spends one order on Γ
    return bundle.frame(probe).value, bundle.coframe(probe).value


def _geometry_for(conn: ConnectionField, metric: MetricField | None = None) -> BaseGeometry:
    if metric is None:
        metric = MetricField.diagonal([1.0] * conn.dim)
    return BaseGeometry(metric, conn)


# ---------------------------------------------------------------------------
# lifts of vector fields


LIFT_KINDS = ("vertical", "horizontal", "complete")


class LiftedField:
    """A vector field on TM given as the vertical/horizontal/complete lift of X."""

    def __init__(self, kind: str, X: VectorFieldBase):
        if kind not in LIFT_KINDS:
            raise ValueError(f"unknown lift kind {kind!r}")
        self.kind = kind
        self.X = X

    def __repr__(self) -> str:
        return f"{self.X.name}^{self.kind[0]}"

    def coordinates(self, bundle: TangentBundle, probe: Probe) -> Jet:
        """Components on {∂_i, ∂_ī}."""
        def build():
            X = self.X.jet(probe)
            if self.kind == "vertical":
                return jets.stack([Jet.zeros(probe.space, (bundle.n,)), X]).reshape(2 * bundle.n)
            if self.kind == "horizontal":
                vert = -einsum("i,ik->k", X, bundle.nonlinear(probe))
            else:
                vert = einsum("a,ai->i", probe.y_jet(), probe.grad(X))
            return jets.stack([X, vert]).reshape(2 * bundle.n)
        return probe.memo(("lift", self.kind, id(self.X), id(bundle)), build)

    def frame(self, bundle: TangentBundle, probe: Probe) -> Jet:
        return bundle.to_frame(self.coordinates(bundle, probe), probe)


def lift_vector(kind: str, X: VectorFieldBase, conn: ConnectionField, p: TMPoint,
                coordinates: bool = False):
    """Lift of X at p as a :class:`TMVectorValue`; with ``coordinates`` also return the induced-coordinate form."""
    bundle = TangentBundle(_geometry_for(conn))
    probe = bundle.probe(p, 2)
    field = LiftedField(kind, X)
    value = TMVectorValue.from_frame(field.frame(bundle, probe).value)
    if coordinates:
        return value, field.coordinates(bundle, probe).value
    return value


def tm_lie_bracket(A: LiftedField, B: LiftedField, bundle: TangentBundle, p: TMPoint) -> TMVectorValue:
    """[A, B] from coordinate derivatives, returned on the adapted frame."""
    probe = bundle.probe(p, 2)
    return TMVectorValue.from_frame(bracket_jet(A, B, bundle, probe).value)


def bracket_jet(A: LiftedField, B: LiftedField, bundle: TangentBundle, probe: Probe) -> Jet:
    m = 2 * bundle.n
    Va, Vb = A.coordinates(bundle, probe), B.coordinates(bundle, probe)
    coords = einsum("m,mv->v", Va, Vb.grad(m)) - einsum("m,mv->v", Vb, Va.grad(m))
    return bundle.to_frame(coords, probe)


# ---------------------------------------------------------------------------
# lift metrics


METRIC_KINDS = ("sasaki", "twisted", "gradient")


class TMMetric:
    """Sasaki, twisted Sasaki G^{f,h} or gradient Sasaki g^f metric."""

    def __init__(self, kind: str, bundle: TangentBundle, f: ScalarFieldExpr | None = None,
                 h: ScalarFieldExpr | None = None):
        if kind not in METRIC_KINDS:
            raise ValueError(f"unknown TM metric kind {kind!r}")
        n = bundle.n
        if kind == "twisted":
            if f is None or h is None:
                raise ValidationError("twisted metric needs f and h")
            f, h = _as_expr(f, n), _as_expr(h, n)
        elif kind == "gradient":
            if f is None:
                raise ValidationError("gradient metric needs f")
            f, h = _as_expr(f, n), None
        else:
            f = h = None
        self.kind = kind
        self.bundle = bundle
        self.f = f
        self.h = h

    @property
    def base(self) -> BaseGeometry:
        return self.bundle.base

    def label(self) -> str:
        if self.kind == "twisted":
            return f"twisted:{self.f},{self.h}"
        if self.kind == "gradient":
            return f"gradient:{self.f}"
        return "sasaki"

    def frame_jet(self, probe: Probe) -> Jet:
        def build():
            base, n = self.base, self.bundle.n
            g = base.g(probe)
            hh, vv = g, g
            if self.kind == "twisted":
                hh = g * base.weight(self.f, probe, "f")
                vv = g * base.weight(self.h, probe, "h")
            elif self.kind == "gradient":
                # positivity of f is part of the metric's contract, even though g^f only uses df
                base.weight(self.f, probe, "f")
                df = base.dscalar(self.f, probe)
                vv = g + einsum("i,j->ij", df, df)
            G = Jet.zeros(probe.space, (2 * n, 2 * n))
            G[:n, :n] = hh
            G[n:, n:] = vv
            return G
        return probe.memo(("Gframe", id(self)), build)

    def coordinate_jet(self, probe: Probe) -> Jet:
        W = self.bundle.coframe(probe)
        return probe.memo(("Gcoord", id(self)),
                          lambda: einsum("ma,nb,ab->mn", W, W, self.frame_jet(probe)))

    def frame_matrix(self, p: TMPoint) -> np.ndarray:
        return self.frame_jet(self.bundle.probe(p, 1)).value

    def coordinate_matrix(self, p: TMPoint) -> np.ndarray:
        return self.coordinate_jet(self.bundle.probe(p, 1)).value


def tm_metric(kind: str, g: MetricField, f=None, h=None, connection: ConnectionField | None = None) -> TMMetric:
    return TMMetric(kind, TangentBundle(BaseGeometry(g, connection)), f, h)


# ---------------------------------------------------------------------------
# connections on TM


class TMConnection:
    """Affine connection on TM described by adapted-frame coefficients."""

    kind: str = "abstract"

    def __init__(self, bundle: TangentBundle):
        self.bundle = bundle

    @property
    def n(self) -> int:
        return self.bundle.n

    def label(self) -> str:
        return self.kind

    def jet(self, probe: Probe) -> Jet:
        return probe.memo(("Gamma", id(self)), lambda: self._build(probe))

    def _build(self, probe: Probe) -> Jet:
        raise NotImplementedError

    def coefficients(self, p: TMPoint) -> np.ndarray:
        # closed forms consume Γ and R, the numeric oracle second derivatives of the metric
        return self.jet(self.bundle.probe(p, 2)).value

    def coordinate_jet(self, probe: Probe) -> Jet:
        """Γ̂^rho_{mu nu} on the coordinate basis of TM."""
        def build():
            E, W = self.bundle.frame(probe), self.bundle.coframe(probe)
            dW = W.grad(2 * self.n)  # [mu, nu, B]
            return (einsum("mvb,br->rmv", dW, E)
                    + einsum("ma,vb,cab,cr->rmv", W, W, self.jet(probe), E))
        return probe.memo(("Gammacoord", id(self)), build)


class _BlockConnection(TMConnection):
    """Coefficients assembled block by block from base quantities."""

    def _empty(self, probe: Probe) -> Jet:
        n = self.n
        return Jet.zeros(probe.space, (2 * n, 2 * n, 2 * n))

    def _ry(self, probe: Probe) -> Jet:
        """``Ry[k, i, j]`` = y^s R^k_sij, the components of R(y, ∂_i)∂_j."""
        return probe.memo(("Ry", id(self.bundle.base)),
                          lambda: einsum("s,ksij->kij", probe.y_jet(), self.bundle.base.riemann(probe)))

    def _rlast(self, probe: Probe) -> Jet:
        """``Rl[k, i, j]`` = R^k_ijs y^s, the components of R(∂_i, ∂_j)y."""
        return probe.memo(("Rl", id(self.bundle.base)),
                          lambda: einsum("kijs,s->kij", self.bundle.base.riemann(probe), probe.y_jet()))


class HorizontalLiftConnection(_BlockConnection):
    kind = "horizontal"

    def _build(self, probe):
        n = self.n
        gam = self._empty(probe)
        G = self.bundle.base.gamma(probe)
        gam[:n, :n, :n] = G
        gam[n:, :n, n:] = G
        return gam


class CompleteLiftConnection(HorizontalLiftConnection):
    kind = "complete"

    def _build(self, probe):
        gam = super()._build(probe)
        n = self.n
        gam[n:, :n, :n] = self._ry(probe)
        return gam


def lift_connection(kind: str, conn: ConnectionField, metric: MetricField | None = None) -> TMConnection:
    bundle = TangentBundle(_geometry_for(conn, metric))
    return connection_on(kind, bundle)


class SasakiLeviCivita(_BlockConnection):
    kind = "lc-sasaki"

    def _build(self, probe):
        n = self.n
        gam = self._empty(probe)
        G = self.bundle.base.gamma(probe)
        Ry, Rl = self._ry(probe), self._rlast(probe)
        gam[:n, :n, :n] = G
        gam[n:, :n, :n] = -0.5 * Rl
        gam[:n, n:, :n] = 0.5 * Ry
        gam[:n, :n, n:] = 0.5 * Ry.transpose(0, 2, 1)
        gam[n:, :n, n:] = G
        return gam


class TwistedLeviCivita(_BlockConnection):
    kind = "lc-twisted"

    def __init__(self, bundle: TangentBundle, f: ScalarFieldExpr, h: ScalarFieldExpr):
        super().__init__(bundle)
        self.f, self.h = _as_expr(f, bundle.n), _as_expr(h, bundle.n)

    def label(self) -> str:
        return f"lc-twisted:{self.f},{self.h}"

    def _build(self, probe):
        n, base = self.n, self.bundle.base
        gam = self._empty(probe)
        G = base.gamma(probe)
        g = base.g(probe)
        fv = base.weight(self.f, probe, "f")
        hv = base.weight(self.h, probe, "h")
        dh = base.dscalar(self.h, probe)
        gradh = base.gradient(self.h, probe)
        Ry, Rl = self._ry(probe), self._rlast(probe)
        eye = np.eye(n)
        ratio = hv / (2.0 * fv)
        gam[:n, :n, :n] = G + a_f_tensor(base, self.f, probe)
        gam[n:, :n, :n] = -0.5 * Rl
        gam[:n, :n, n:] = ratio * Ry.transpose(0, 2, 1)
        gam[:n, n:, :n] = ratio * Ry
        dlog = dh / (2.0 * hv)
        gam[n:, :n, n:] = G + einsum("i,kj->kij", dlog, eye)
        gam[n:, n:, :n] = einsum("j,ki->kij", dlog, eye)
        gam[:n, n:, n:] = einsum("ij,k->kij", g, gradh) * (-0.5 / fv)
        return gam


class GradientLeviCivita(_BlockConnection):
    kind = "lc-gradient"

    def __init__(self, bundle: TangentBundle, f: ScalarFieldExpr):
        super().__init__(bundle)
        self.f = _as_expr(f, bundle.n)

    def label(self) -> str:
        return f"lc-gradient:{self.f}"

    def _build(self, probe):
        n, base = self.n, self.bundle.base
        gam = self._empty(probe)
        G = base.gamma(probe)
        g = base.g(probe)
        base.weight(self.f, probe, "f")
        df = base.dscalar(self.f, probe)
        F = base.gradient(self.f, probe)
        H = base.nabla_gradient(self.f, probe)  # H[j, k] = (∇_j grad f)^k
        gH = einsum("ik,jk->ij", g, H)  # g(∂_i, ∇_j grad f), symmetric
        a = 1.0 + einsum("k,k->", df, F)
        da = probe.grad(a)
        Ry, Rl = self._ry(probe), self._rlast(probe)
        RyF = einsum("s,t,kstj->kj", probe.y_jet(), F, base.riemann(probe))  # R(y, F)∂_j
        corr = (gH - 0.5 * einsum("i,j->ij", df, da)) / (2.0 * a)  # [i, j]: f_i paired with ∂_j a
        gam[:n, :n, :n] = G
        gam[n:, :n, :n] = -0.5 * Rl
        gam[:n, n:, n:] = -0.5 * (einsum("i,jk->kij", df, H) + einsum("j,ik->kij", df, H))
        gam[:n, n:, :n] = 0.5 * Ry + 0.5 * einsum("i,kj->kij", df, RyF)
        gam[n:, n:, :n] = 0.5 * einsum("i,jk->kij", df, H) + einsum("ij,k->kij", corr, F)
        gam[:n, :n, n:] = 0.5 * Ry.transpose(0, 2, 1) + 0.5 * einsum("j,ki->kij", df, RyF)
        gam[n:, :n, n:] = G + 0.5 * einsum("j,ik->kij", df, H) + einsum("ji,k->kij", corr, F)
        return gam


class NumericLeviCivita(TMConnection):
    """Levi-Civita connection of a TM metric from the coordinate Koszul formula."""

    kind = "numeric"

    def __init__(self, metric: TMMetric):
        super().__init__(metric.bundle)
        self.metric = metric

    def label(self) -> str:
        return f"numeric[{self.metric.label()}]"

    def _build(self, probe):
        b = self.bundle
        Ghat = christoffel(self.metric.coordinate_jet(probe), 2 * self.n)
        E, W = b.frame(probe), b.coframe(probe)
        dE = b.along(E, probe)  # [A, B, rho]
        inner = dE + einsum("am,bv,rmv->abr", E, E, Ghat)
        return einsum("abr,rc->cab", inner, W)

    def coordinate_jet(self, probe):
        return probe.memo(("Gammacoord", id(self)),
                          lambda: christoffel(self.metric.coordinate_jet(probe), 2 * self.n))


CONNECTION_KINDS = ("horizontal", "complete", "lc-sasaki", "lc-twisted", "lc-gradient", "numeric")


def connection_on(kind: str, bundle: TangentBundle, f=None, h=None, metric: TMMetric | None = None) -> TMConnection:
    kind = kind.replace("_", "-")
    if kind == "horizontal":
        return HorizontalLiftConnection(bundle)
    if kind == "complete":
        return CompleteLiftConnection(bundle)
    if kind == "lc-sasaki":
        return SasakiLeviCivita(bundle)
    if kind == "lc-twisted":
        return TwistedLeviCivita(bundle, f, h)
    if kind == "lc-gradient":
        return GradientLeviCivita(bundle, f)
    if kind == "numeric":
        if metric is None:
            raise ValidationError("numeric connection needs a TM metric")
        return NumericLeviCivita(metric)
    raise ValueError(f"unknown TM connection kind {kind!r}")


def lc_closed_form(kind: str, g: MetricField, f=None, h=None) -> TMConnection:
    """Closed-form Levi-Civita connection of a lift metric over (g, Levi-Civita of g)."""
    bundle = TangentBundle(BaseGeometry(g))
    return connection_on({"sasaki": "lc-sasaki", "twisted": "lc-twisted", "gradient": "lc-gradient"}[kind],
                         bundle, f, h)


def closed_form_for(metric: TMMetric) -> TMConnection:
    if not metric.base.is_levi_civita:
        raise ValidationError("closed-form Levi-Civita formulas assume the base Levi-Civita connection")
    return connection_on("lc-" + metric.kind, metric.bundle, metric.f, metric.h)


def numeric_lc_tm(metric: TMMetric) -> NumericLeviCivita:
    return NumericLeviCivita(metric)


# ---------------------------------------------------------------------------
# tensors of a TM connection


def torsion_jet(conn: TMConnection, probe: Probe) -> Jet:
    gam = conn.jet(probe)
    return gam - gam.transpose(0, 2, 1) - conn.bundle.structure(probe)


def cubic_jet(metric: TMMetric, conn: TMConnection, probe: Probe) -> Jet:
    G = metric.frame_jet(probe)
    gam = conn.jet(probe)
    t = einsum("dab,dc->abc", gam, G)
    return conn.bundle.along(G, probe) - t - t.transpose(0, 2, 1)


def curvature_jet(conn: TMConnection, probe: Probe) -> Jet:
    def build():
        gam = conn.jet(probe)
        dgam = conn.bundle.along(gam, probe)  # [A, D, B, C] = E_A(Γ̄^D_BC)
        quad = einsum("dae,ebc->dabc", gam, gam)
        return (dgam.transpose(1, 0, 2, 3) - dgam.transpose(1, 2, 0, 3)
                + quad - quad.transpose(0, 2, 1, 3)
                - einsum("eab,dec->dabc", conn.bundle.structure(probe), gam))
    return probe.memo(("Rbar", id(conn)), build)


def tm_torsion(conn: TMConnection, p: TMPoint) -> np.ndarray:
    return torsion_jet(conn, conn.bundle.probe(p, 2)).value


def tm_cubic_tensor(metric: TMMetric, conn: TMConnection, p: TMPoint) -> np.ndarray:
    return cubic_jet(metric, conn, conn.bundle.probe(p, 3)).value


def tm_curvature(conn: TMConnection, p: TMPoint) -> np.ndarray:
    return curvature_jet(conn, conn.bundle.probe(p, 3)).value


def covariant_derivative(conn: TMConnection, V: Jet, U: Jet, probe: Probe) -> Jet:
    """∇̄_V U for frame-component jets V^A, U^B."""
    dU = conn.bundle.along(U, probe)  # [A, C]
    return einsum("a,ac->c", V, dU) + einsum("a,cab,b->c", V, conn.jet(probe), U)


def lie_derivative_metric_jet(V: Jet, metric: TMMetric, probe: Probe) -> Jet:
    """(L_V Ḡ) on the adapted frame, for coordinate components V^mu."""
    m = 2 * metric.bundle.n
    G = metric.coordinate_jet(probe)
    dV = V.grad(m)  # [mu, rho]
    L = (einsum("r,rmn->mn", V, G.grad(m))
         + einsum("rn,mr->mn", G, dV)
         + einsum("mr,nr->mn", G, dV))
    E = metric.bundle.frame(probe)
    return einsum("am,bn,mn->ab", E, E, L)


def lie_derivative_connection_tm(V: Jet, conn: TMConnection, probe: Probe) -> Jet:
    """(L_V ∇̄)(E_A, E_B) on the adapted frame, for coordinate components V^mu."""
    m = 2 * conn.n
    L = lie_derivative_connection_jet(V, conn.coordinate_jet(probe), probe, nvars=m)
    E, W = conn.bundle.frame(probe), conn.bundle.coframe(probe)
    return einsum("rmv,am,bv,rc->cab", L, E, E, W)


def complete_lift_consistency(conn: TMConnection, X: VectorFieldBase, Y: VectorFieldBase,
                              p: TMPoint) -> dict[str, np.ndarray]:
    """Residuals of the complete-lift rules on X^c, Y^c expanded in the adapted frame.

    Keys ``"c,c"``, ``"c,v"``, ``"v,c"`` hold the frame components of
    ∇̄_{X^c}Y^c − (∇_X Y)^c, ∇̄_{X^c}Y^v − (∇_X Y)^v and ∇̄_{X^v}Y^c − (∇_X Y)^v.
    """
    b = conn.bundle
    probe = b.probe(p, 2)
    base = b.base
    Xj, Yj = X.jet(probe), Y.jet(probe)
    G = base.gamma(probe)
    nablaXY = einsum("i,ij->j", Xj, probe.grad(Yj)) + einsum("kij,i,j->k", G, Xj, Yj)
    nabla_field = _JetField(nablaXY)
    lifts = {k: {name: LiftedField(k, F) for name, F in (("X", X), ("Y", Y))} for k in LIFT_KINDS}

    def frame(k, name):
        return lifts[k][name].frame(b, probe)

    def nab(ka, kb):
        return covariant_derivative(conn, frame(ka, "X"), frame(kb, "Y"), probe).value

    out = {
        "c,c": nab("complete", "complete") - nabla_field.lift("complete", b, probe).value,
        "c,v": nab("complete", "vertical") - nabla_field.lift("vertical", b, probe).value,
        "v,c": nab("vertical", "complete") - nabla_field.lift("vertical", b, probe).value,
    }
    return out


class _JetField:
    """A base vector field known only through its jet at one probe."""

    def __init__(self, jet: Jet):
        self.jet_value = jet

    def lift(self, kind: str, bundle: TangentBundle, probe: Probe) -> Jet:
        n = bundle.n
        X = self.jet_value
        if kind == "vertical":
            coords = jets.stack([Jet.zeros(probe.space, (n,)), X]).reshape(2 * n)
        elif kind == "complete":
            coords = jets.stack([X, einsum("a,ai->i", probe.y_jet(), probe.grad(X))]).reshape(2 * n)
        else:
            coords = jets.stack([X, -einsum("i,ik->k", X, bundle.nonlinear(probe))]).reshape(2 * n)
        return bundle.to_frame(coords, probe)
