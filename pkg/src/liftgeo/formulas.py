"""Published component formulas for cubic tensors on TM, evaluated from base data only.

Nothing here touches the TM frame machinery: each formula is assembled from
g, Γ, R, the base cubic tensor and derivatives of the weight functions at x,
plus the fiber point y.  :func:`compare` then sets each formula against the
engine's :func:`~liftgeo.tangent.tm_cubic_tensor` block by block.

Block labels name the frame type of the three arguments of C̄(A, B, C), e.g.
``"hhv"`` is C̄(δ_i, δ_j, ∂_k̄).  Every formula array is indexed in argument
order, so ``"hvh"`` for C̄(δ_j, ∂_k̄, δ_i) is stored as ``arr[j, k, i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .base import BaseGeometry, Probe, _as_expr, a_f_tensor
from .expr import ScalarFieldExpr
from .report import FAIL, FLAGGED, PASS, CheckReport
from . import tangent as tm

STRICT, INTERPRETATION, VARIANT = "strict", "interpretation", "variant"


class BaseData:
    """Numerical base quantities at (x, y) used by the printed formulas."""

    def __init__(self, geo: BaseGeometry, x: Sequence[float], y: Sequence[float]):
        probe = Probe(x, order=3)
        self.geo, self.probe = geo, probe
        self.n = geo.dim
        self.y = np.asarray(y, dtype=float)
        self.g = geo.g(probe).value
        self.gamma = geo.gamma(probe).value
        self.R = geo.riemann(probe).value  # R[l, i, j, k]
        self.Rlow = geo.riemann_lowered(probe).value  # Rlow[i, j, k, l]
        self.C = geo.cubic(probe).value
        # R(y, ∂_i)∂_j components and y^r R_ij r k
        self.Ry = np.einsum("s,ksij->kij", self.y, self.R)
        self.yRlow = np.einsum("r,ijrk->ijk", self.y, self.Rlow)
        self._weights: dict[ScalarFieldExpr, "Weight"] = {}

    def weight(self, f: ScalarFieldExpr) -> "Weight":
        if f not in self._weights:
            self._weights[f] = Weight(self, f)
        return self._weights[f]


class Weight:
    """A weight function f with its derivatives, gradient, ∇grad f and a = 1 + |grad f|²."""

    def __init__(self, d: BaseData, f: ScalarFieldExpr):
        geo, probe = d.geo, d.probe
        self.v = float(geo.weight(f, probe).value)
        self.d = geo.dscalar(f, probe).value
        self.dd = probe.grad(geo.dscalar(f, probe)).value  # ∂_k ∂_i f
        self.grad = geo.gradient(f, probe).value
        H = geo.nabla_gradient(f, probe)  # H[j, k] = (∇_j grad f)^k
        self.gH = np.einsum("ik,jk->ij", d.g, H.value)  # g(∂_i, ∇_j grad f)
        a = 1.0 + (geo.dscalar(f, probe) * geo.gradient(f, probe)).sum()
        self.a = float(a.value)
        self.da = probe.grad(a).value
        # y^r g(R(∂_r, grad f)∂_i, ∂_j)
        self.yRF = np.einsum("r,t,rtij->ij", d.y, self.grad, d.Rlow)
        # (∇_{∂_k} ∂_i)(f) = Γ^r_ki ∂_r f
        self.nabla_d = np.einsum("rki,r->ki", d.gamma, self.d)
        self.A = a_f_tensor(geo, f, probe).value  # A[k, i, j]


@dataclass(frozen=True)
class Formula:
    family: str
    block: str
    status: str
    evaluate: Callable[["FormulaInputs"], np.ndarray]
    tag: str = ""

    @property
    def label(self) -> str:
        return f"{self.family}:{self.block}" + (f":{self.tag}" if self.tag else "")


@dataclass
class FormulaInputs:
    base: BaseData
    f: Weight | None
    h: Weight | None
    f1: Weight | None


def _zero(inp: FormulaInputs) -> np.ndarray:
    n = inp.base.n
    return np.zeros((n, n, n))


def _twisted_hhh(inp):
    b, f = inp.base, inp.f
    return np.einsum("i,jk->ijk", f.d, b.g) + f.v * b.C


def _twisted_hvv(inp):
    b, h = inp.base, inp.h
    return np.einsum("k,ij->kij", h.d, b.g) + h.v * b.C


def _clift_hhv(inp):
    b = inp.base
    return -inp.h.v * np.einsum("tij,tk->ijk", b.Ry, b.g)


def _clift_hvh(inp):
    b = inp.base
    # arguments (δ_j, ∂_k̄, δ_i)
    return -inp.h.v * np.einsum("tji,kt->jki", b.Ry, b.g)


def _af_hhh(inp):
    b, f = inp.base, inp.f
    return (b.C - np.einsum("mij,mk->ijk", f.A, b.g) - np.einsum("mik,jm->ijk", f.A, b.g))


def _lcs_hhv(inp):
    return 0.5 * inp.base.yRlow * (1.0 - inp.h.v / inp.f.v)


def _lcs_vhh(inp):
    # arguments (∂_k̄, δ_i, δ_j): −(h/f) y^r R_ijrk
    return -(inp.h.v / inp.f.v) * inp.base.yRlow.transpose(2, 0, 1)


def _lcs_vvh(inp):
    b, f, h = inp.base, inp.f, inp.h
    return np.einsum("k,ij->ijk", h.d, b.g) * (1.0 / (2 * f.v) - 1.0 / (2 * h.v))


def _lcs_hvv(inp):
    b, h = inp.base, inp.h
    return b.C - np.einsum("k,ij->kij", h.d, b.g) / h.v


def _lcg_vvh(inp):
    b, f, h, f1 = inp.base, inp.f, inp.h, inp.f1
    gf = b.g + np.outer(f1.d, f1.d)
    return (np.einsum("k,ij->ijk", h.d, b.g) / (2 * f.v)
            - np.einsum("k,ij->ijk", h.d, gf) / (2 * h.v))


def _lcg_hvv(inp):
    b, h, f1 = inp.base, inp.h, inp.f1
    gf = b.g + np.outer(f1.d, f1.d)
    return (b.C - np.einsum("k,ij->kij", h.d, gf) / h.v
            - np.einsum("ki,j->kij", f1.nabla_d, f1.d)
            - np.einsum("kj,i->kij", f1.nabla_d, f1.d)
            + np.einsum("ki,j->kij", f1.dd, f1.d)
            + np.einsum("kj,i->kij", f1.dd, f1.d))


def _lcg_hhv(inp):
    # the curvature vector R(∂_i,∂_j)∂_r applied to f1 is read as R^m_ijr ∂_m f1
    b, f, h, f1 = inp.base, inp.f, inp.h, inp.f1
    Rf1 = np.einsum("mijr,m,r->ij", b.R, f1.d, b.y)
    yRrk = np.einsum("r,rkij->ijk", b.y, b.Rlow)
    return 0.5 * b.yRlow + 0.5 * np.einsum("ij,k->ijk", Rf1, f1.d) - (h.v / (2 * f.v)) * yRrk


def _lcg_vhh(inp):
    b = inp.base
    return -(inp.h.v / inp.f.v) * np.einsum("r,rkij->kij", b.y, b.Rlow)


def _cg_hhv(inp):
    b, f = inp.base, inp.f
    return -np.einsum("tij,tk->ijk", b.Ry, b.g) - np.einsum("tij,t,k->ijk", b.Ry, f.d, f.d)


def _cg_hvh(inp):
    b, f = inp.base, inp.f
    return -np.einsum("tji,tk->jki", b.Ry, b.g) - np.einsum("tji,t,k->jki", b.Ry, f.d, f.d)


def _cg_hhh(inp):
    return inp.base.C


def _cg_hvv(inp):
    b, f = inp.base, inp.f
    return (b.C + np.einsum("ki,j->kij", f.dd, f.d) + np.einsum("i,kj->kij", f.d, f.dd)
            - np.einsum("ki,j->kij", f.nabla_d, f.d) - np.einsum("i,kj->kij", f.d, f.nabla_d))


def _gs_hhv(inp):
    b, f = inp.base, inp.f
    return -b.yRlow - 0.5 * np.einsum("k,ij->ijk", f.d, f.yRF)


def _gs_vhh(inp):
    b, f = inp.base, inp.f
    yR = np.einsum("r,rkij->kij", b.y, b.Rlow)
    return (-0.5 * yR - 0.5 * np.einsum("k,ij->kij", f.d, f.yRF)
            - 0.5 * yR.transpose(0, 2, 1) - 0.5 * np.einsum("k,ji->kij", f.d, f.yRF))


def _grad_corr(w: Weight) -> np.ndarray:
    """``corr[i, k]`` = {g(∂_i, ∇_k grad f) − ½ ∂_k(a) ∂_i f} / (2a)."""
    return (w.gH - 0.5 * np.outer(w.d, w.da)) / (2.0 * w.a)


def _gs_vvh(inp):
    f = inp.f
    corr = _grad_corr(f)
    return (0.5 * np.einsum("i,kj->ijk", f.d, f.gH) + 0.5 * np.einsum("j,ki->ijk", f.d, f.gH)
            - 0.5 * np.einsum("i,jk->ijk", f.d, f.gH) - np.einsum("ik,j->ijk", corr, f.d))


def _gs_hvv(inp):
    b, f = inp.base, inp.f
    corr = _grad_corr(f)
    return (b.C - 0.5 * np.einsum("i,jk->kij", f.d, f.gH) - 0.5 * np.einsum("j,ik->kij", f.d, f.gH)
            - np.einsum("ik,j->kij", corr, f.d) - np.einsum("jk,i->kij", corr, f.d))


def _gt_hhh(inp):
    return _twisted_hhh(inp)


def _gt_hhv_repeated(inp):
    b, f, h, f1 = inp.base, inp.f, inp.h, inp.f1
    diag = np.diag(f1.yRF)  # g(∂_j, R(y, grad f1)∂_j) depends on j alone
    return 0.5 * ((h.v - f.v) * b.yRlow - f.v * np.einsum("j,k->jk", diag, f1.d)[None, :, :])


def _gt_hhv_distinct(inp):
    b, f, h, f1 = inp.base, inp.f, inp.h, inp.f1
    return 0.5 * ((h.v - f.v) * b.yRlow - f.v * np.einsum("k,ij->ijk", f1.d, f1.yRF))


def _gt_vvh(inp):
    f, h, f1 = inp.f, inp.h, inp.f1
    corr = _grad_corr(f1)
    return (0.5 * f.v * np.einsum("i,kj->ijk", f1.d, f1.gH) + 0.5 * f.v * np.einsum("j,ki->ijk", f1.d, f1.gH)
            - 0.5 * h.v * np.einsum("i,jk->ijk", f1.d, f1.gH) - h.v * np.einsum("ik,j->ijk", corr, f1.d))


def _gt_hvv(inp):
    b, h, f1 = inp.base, inp.h, inp.f1
    corr = _grad_corr(f1)
    return (-0.5 * h.v * np.einsum("i,jk->kij", f1.d, f1.gH) - h.v * np.einsum("ik,j->kij", corr, f1.d)
            - 0.5 * h.v * np.einsum("j,ik->kij", f1.d, f1.gH) - h.v * np.einsum("jk,i->kij", corr, f1.d)
            + np.einsum("k,ij->kij", h.d, b.g) + h.v * b.C)


@dataclass(frozen=True)
class Family:
    """A (TM metric, TM connection) pair and its printed cubic-tensor components."""

    name: str
    metric: str  # "sasaki" | "twisted" | "gradient:f" | "gradient:f1"
    connection: str  # "horizontal" | "complete" | "lc-twisted" | "lc-gradient:f" | "lc-gradient:f1"
    formulas: tuple[Formula, ...]
    needs_levi_civita: bool = False


def _fam(name, metric, connection, items, lc=False) -> Family:
    return Family(name, metric, connection,
                  tuple(Formula(name, blk, st, fn, tag) for blk, st, fn, tag in items), lc)


FAMILIES: dict[str, Family] = {fam.name: fam for fam in [
    _fam("hlift-twisted", "twisted", "horizontal", [
        ("hhh", STRICT, _twisted_hhh, ""), ("vvv", STRICT, _zero, ""),
        ("hhv", STRICT, _zero, ""), ("hvh", STRICT, _zero, ""), ("vhh", STRICT, _zero, ""),
        ("vvh", STRICT, _zero, ""), ("vhv", STRICT, _zero, ""), ("hvv", STRICT, _twisted_hvv, ""),
    ]),
    _fam("clift-twisted", "twisted", "complete", [
        ("hhh", STRICT, _twisted_hhh, ""), ("vvv", STRICT, _zero, ""),
        ("hhv", STRICT, _clift_hhv, ""), ("hvh", STRICT, _clift_hvh, ""), ("vhh", STRICT, _zero, ""),
        ("vvh", STRICT, _zero, ""), ("vhv", STRICT, _zero, ""), ("hvv", STRICT, _twisted_hvv, ""),
    ]),
    _fam("lc-twisted-sasaki", "sasaki", "lc-twisted", [
        ("hhh", STRICT, _af_hhh, ""), ("vvv", STRICT, _zero, ""),
        ("hhv", STRICT, _lcs_hhv, ""), ("vhh", STRICT, _lcs_vhh, ""),
        ("vvh", STRICT, _lcs_vvh, ""), ("hvv", STRICT, _lcs_hvv, ""),
    ], lc=True),
    _fam("lc-twisted-gradient", "gradient:f1", "lc-twisted", [
        ("hhh", STRICT, _af_hhh, ""), ("vvv", STRICT, _zero, ""),
        ("vvh", STRICT, _lcg_vvh, ""), ("hvv", STRICT, _lcg_hvv, ""),
        ("hhv", INTERPRETATION, _lcg_hhv, "curvature-vector-derivative"),
        ("vhh", STRICT, _lcg_vhh, ""),
    ], lc=True),
    _fam("clift-gradient", "gradient:f", "complete", [
        ("hhh", STRICT, _cg_hhh, ""), ("vvv", STRICT, _zero, ""),
        ("hhv", STRICT, _cg_hhv, ""), ("hvh", STRICT, _cg_hvh, ""), ("vhh", STRICT, _zero, ""),
        ("vvh", STRICT, _zero, ""), ("vhv", STRICT, _zero, ""), ("hvv", STRICT, _cg_hvv, ""),
    ]),
    _fam("lc-gradient-sasaki", "sasaki", "lc-gradient:f", [
        ("hhh", STRICT, _cg_hhh, ""), ("vvv", STRICT, _zero, ""),
        ("hhv", STRICT, _gs_hhv, ""), ("vhh", STRICT, _gs_vhh, ""),
        ("vvh", STRICT, _gs_vvh, ""), ("hvv", STRICT, _gs_hvv, ""),
    ], lc=True),
    _fam("lc-gradient-twisted", "twisted", "lc-gradient:f1", [
        ("hhh", STRICT, _gt_hhh, ""), ("vvv", STRICT, _zero, ""), ("vhh", STRICT, _zero, ""),
        ("hhv", VARIANT, _gt_hhv_repeated, "repeated-index"),
        ("hhv", VARIANT, _gt_hhv_distinct, "distinct-index"),
        ("vvh", STRICT, _gt_vvh, ""), ("hvv", STRICT, _gt_hvv, ""),
    ], lc=True),
]}


def block_of(C: np.ndarray, block: str, n: int) -> np.ndarray:
    sl = tuple(slice(0, n) if c == "h" else slice(n, 2 * n) for c in block)
    return C[sl]


@dataclass(frozen=True)
class Weights:
    f: ScalarFieldExpr
    h: ScalarFieldExpr
    f1: ScalarFieldExpr


def build_pair(family: Family, geo: BaseGeometry, w: Weights) -> tuple[tm.TMMetric, tm.TMConnection]:
    """Engine-side metric and connection for a family, sharing one bundle."""
    bundle = tm.TangentBundle(geo)
    mkind, _, mw = family.metric.partition(":")
    if mkind == "sasaki":
        metric = tm.TMMetric("sasaki", bundle)
    elif mkind == "twisted":
        metric = tm.TMMetric("twisted", bundle, w.f, w.h)
    else:
        metric = tm.TMMetric("gradient", bundle, getattr(w, mw))
    ckind, _, cw = family.connection.partition(":")
    if ckind == "lc-twisted":
        conn = tm.connection_on("lc-twisted", bundle, w.f, w.h)
    elif ckind == "lc-gradient":
        conn = tm.connection_on("lc-gradient", bundle, getattr(w, cw))
    else:
        conn = tm.connection_on(ckind, bundle)
    return metric, conn


@dataclass
class FormulaResult:
    formula: Formula
    max_residual: float = 0.0
    worst_point: list[float] | None = None

    def to_dict(self, tol: float) -> dict:
        if self.formula.status == STRICT:
            verdict = PASS if self.max_residual <= tol else FAIL
        else:
            verdict = FLAGGED
        return {"formula": self.formula.label, "status": self.formula.status,
                "max_residual": self.max_residual, "verdict": verdict, "worst_point": self.worst_point}


def compare(geo: BaseGeometry, points: Iterable[tm.TMPoint], weights: Weights,
            families: Sequence[str] | None = None) -> list[FormulaResult]:
    """Max |engine − printed| per formula over the given TM points."""
    fams = [FAMILIES[name] for name in (families or FAMILIES)]
    pairs = {fam.name: build_pair(fam, geo, weights) for fam in fams}
    results = {f.label: FormulaResult(f) for fam in fams for f in fam.formulas}
    n = geo.dim
    for p in points:
        data = BaseData(geo, p.x, p.y)
        inp = FormulaInputs(data, data.weight(weights.f), data.weight(weights.h), data.weight(weights.f1))
        for fam in fams:
            metric, conn = pairs[fam.name]
            C = tm.tm_cubic_tensor(metric, conn, p)
            for formula in fam.formulas:
                res = np.abs(block_of(C, formula.block, n) - formula.evaluate(inp))
                r = results[formula.label]
                worst = float(res.max())
                if r.worst_point is None or worst > r.max_residual:
                    r.max_residual = worst
                    r.worst_point = list(p.x + p.y)
    return list(results.values())


def summarize(results: Sequence[FormulaResult], tol: float, samples: int, seed: int | None,
              **parameters) -> CheckReport:
    """Fail if any strict formula misses; otherwise flagged if any formula is interpretation-dependent."""
    rows = [r.to_dict(tol) for r in results]
    strict = [r for r in results if r.formula.status == STRICT]
    max_strict = max((r.max_residual for r in strict), default=0.0)
    has_flagged = any(r.formula.status != STRICT for r in results)
    if max_strict > tol:
        verdict = FAIL
    elif has_flagged:
        verdict = FLAGGED
    else:
        verdict = PASS
    flags = sorted({r.formula.label for r in results if r.formula.status != STRICT})
    worst = sorted((row for row in rows if row["verdict"] == FAIL), key=lambda d: -d["max_residual"])[:5]
    details = [{"point": d["worst_point"], "indices": None, "residual": d["max_residual"], "formula": d["formula"]}
               for d in worst]
    return CheckReport("cubic-paper-formulas", verdict, max_strict, tol, samples, seed, details,
                       flags, dict(parameters, formulas=rows))


def default_weights(dim: int) -> Weights:
    """f = x0 + 2, h = x1² + 1 (x0² + 1 in one dimension), f1 = 2 + x0 + 0.3 sin(x1)."""
    second = "x1" if dim > 1 else "x0"
    return Weights(_as_expr("x0 + 2", dim), _as_expr(f"{second}^2 + 1", dim),
                   _as_expr(f"2 + x0 + 0.3*sin({second})", dim))
