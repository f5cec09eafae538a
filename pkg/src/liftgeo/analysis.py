"""Structure checks on TM: statistical structures, Killing and affine lifts, Jacobi spectra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .base import ChartDomain, VectorFieldBase
from .eigen import eigenvalues, sort_spectrum
from .errors import ZeroDirection
from .report import CheckReport, ResidualTracker
from . import tangent as tm

DIRECTION_FLOOR = 1e-12


def sample_tm_points(chart: ChartDomain, rng: np.random.Generator, count: int,
                     fiber_range: float = 2.0) -> list[tm.TMPoint]:
    """Seeded TM points: x uniform in the chart (with a margin), y uniform in [−r, r]^n."""
    xs = chart.sample(rng, count)
    ys = rng.uniform(-fiber_range, fiber_range, size=(count, chart.dim))
    return [tm.TMPoint(x, y) for x, y in zip(xs, ys)]


def _totally_symmetric_residual(C: np.ndarray) -> np.ndarray:
    return np.maximum(np.abs(C - C.transpose(1, 2, 0)), np.abs(C - C.transpose(2, 0, 1)))


def check_statistical(metric: tm.TMMetric, conn: tm.TMConnection, samples: Iterable[tm.TMPoint],
                      tol: float = 1e-9, seed: int | None = None) -> CheckReport:
    """Torsion of ∇̄ must vanish and ∇̄Ḡ must be totally symmetric."""
    track = ResidualTracker()
    torsion_max = symmetry_max = 0.0
    count = 0
    for p in samples:
        count += 1
        probe = conn.bundle.probe(p, 3)
        T = tm.torsion_jet(conn, probe).value
        S = _totally_symmetric_residual(tm.cubic_jet(metric, conn, probe).value)
        torsion_max = max(torsion_max, float(np.abs(T).max()))
        symmetry_max = max(symmetry_max, float(S.max()))
        track.add_array(T, p.as_array(), "torsion")
        track.add_array(S, p.as_array(), "cubic-symmetry")
    return track.report("statistical-tm", tol, count, seed, metric=metric.label(), connection=conn.label(),
                        torsion_max=torsion_max, symmetry_max=symmetry_max,
                        torsion_free=torsion_max <= tol)


def check_killing_lift(kind: str, X: VectorFieldBase, metric: tm.TMMetric, samples: Iterable[tm.TMPoint],
                       tol: float = 1e-9, seed: int | None = None) -> CheckReport:
    """L_{X^lift} Ḡ on every pair of adapted-frame vectors."""
    lifted = tm.LiftedField(kind, X)
    track = ResidualTracker()
    count = 0
    for p in samples:
        count += 1
        probe = metric.bundle.probe(p, 2)
        V = lifted.coordinates(metric.bundle, probe)
        track.add_array(tm.lie_derivative_metric_jet(V, metric, probe).value, p.as_array())
    return track.report("killing-lift", tol, count, seed, lift=kind, field=X.name, metric=metric.label())


def check_affine_lift(kind: str, X: VectorFieldBase, conn: tm.TMConnection, samples: Iterable[tm.TMPoint],
                      tol: float = 1e-9, seed: int | None = None) -> CheckReport:
    """(L_{X^lift} ∇̄)(E_A, E_B) for all frame pairs."""
    lifted = tm.LiftedField(kind, X)
    track = ResidualTracker()
    count = 0
    for p in samples:
        count += 1
        probe = conn.bundle.probe(p, 3)
        V = lifted.coordinates(conn.bundle, probe)
        track.add_array(tm.lie_derivative_connection_tm(V, conn, probe).value, p.as_array())
    return track.report("affine-lift", tol, count, seed, lift=kind, field=X.name, connection=conn.label())


def bracket_residuals(bundle: tm.TangentBundle, X: VectorFieldBase, Y: VectorFieldBase,
                      p: tm.TMPoint) -> dict[str, np.ndarray]:
    """Frame-component residuals of the three bracket identities for horizontal and vertical lifts."""
    n = bundle.n
    probe = bundle.probe(p, 2)
    base = bundle.base
    Xj, Yj = X.jet(probe), Y.jet(probe)
    x, yv, G = Xj.value, Yj.value, base.gamma(probe).value
    dX, dY = probe.grad(Xj).value, probe.grad(Yj).value  # [i, k] = ∂_i X^k
    R = base.riemann(probe).value
    if base.curvature_sign == -1:
        R = -R  # identities are stated for the actual curvature of the base connection
    bracket = x @ dY - yv @ dX
    nabla = x @ dY + np.einsum("kij,i,j->k", G, x, yv)
    torsion = np.einsum("kij,i,j->k", G - G.transpose(0, 2, 1), x, yv)
    Ryy = np.einsum("kijs,i,j,s->k", R, x, yv, np.asarray(p.y))
    lifts = {(k, name): tm.LiftedField(k, F) for k in ("vertical", "horizontal") for name, F in (("X", X), ("Y", Y))}
    zero = np.zeros(n)

    def br(a, b):
        return tm.bracket_jet(lifts[(a, "X")], lifts[(b, "Y")], bundle, probe).value

    return {
        "[Xv,Yv]": br("vertical", "vertical"),
        "[Xh,Yv]": br("horizontal", "vertical") - np.concatenate([zero, nabla - torsion]),
        "[Xh,Yh]": br("horizontal", "horizontal") - np.concatenate([bracket, -Ryy]),
    }


def random_polynomial_field(rng: np.random.Generator, dim: int, degree: int = 2, name: str = "P") -> VectorFieldBase:
    """Vector field whose components are random polynomials of the given degree (coefficients in [−1, 1])."""
    comps = []
    for _ in range(dim):
        terms = [f"{rng.uniform(-1, 1):.6f}"]
        for i in range(dim):
            terms.append(f"{rng.uniform(-1, 1):.6f}*x{i}")
            if degree >= 2:
                for j in range(i, dim):
                    terms.append(f"{rng.uniform(-1, 1):.6f}*x{i}*x{j}")
        comps.append(" + ".join(f"({t})" for t in terms))
    return VectorFieldBase(comps, name)


# ---------------------------------------------------------------------------
# Jacobi operators


@dataclass
class JacobiValue:
    point: tm.TMPoint
    direction: np.ndarray
    matrix: np.ndarray
    trace: float
    spectrum: np.ndarray = field(repr=False)

    @property
    def block_a(self) -> np.ndarray:
        """Lower-left (vertical-from-horizontal) block, reported without any claim about it."""
        n = self.matrix.shape[0] // 2
        return self.matrix[n:, :n]


def jacobi_matrix(Rbar: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``J[D, A]`` = R̄^D_{ABC} v^B v^C, the matrix of Y ↦ R̄(Y, v)v."""
    return np.einsum("dabc,b,c->da", Rbar, v, v)


def jacobi_operator(conn: tm.TMConnection, p: tm.TMPoint, v: Sequence[float],
                    metric: tm.TMMetric | None = None) -> JacobiValue:
    v = np.asarray(v, dtype=float)
    if v.shape != (2 * conn.n,):
        raise ValueError(f"direction must have {2 * conn.n} frame components")
    probe = conn.bundle.probe(p, 3)
    G = _normalizer(conn, metric).frame_jet(probe).value
    if np.sqrt(abs(v @ G @ v)) < DIRECTION_FLOOR:
        raise ZeroDirection("direction has (numerically) zero length")
    J = jacobi_matrix(tm.curvature_jet(conn, probe).value, v)
    return JacobiValue(p, v, J, float(np.trace(J)), sort_spectrum(eigenvalues(J)))


def _normalizer(conn: tm.TMConnection, metric: tm.TMMetric | None) -> tm.TMMetric:
    return metric if metric is not None else tm.TMMetric("sasaki", conn.bundle)


def _directions(rng: np.random.Generator, G: np.ndarray, count: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """(unit, raw) direction pairs; raw vectors of Ḡ-length below the floor are redrawn."""
    out = []
    while len(out) < count:
        z = rng.standard_normal(G.shape[0])
        norm = np.sqrt(z @ G @ z)
        if norm < DIRECTION_FLOOR:
            continue
        out.append((z / norm, z))
    return out


def k_stein_check(conn: tm.TMConnection, metric: tm.TMMetric | None, k: int, points: Iterable[tm.TMPoint],
                  directions_per_point: int, tol: float, rng: np.random.Generator,
                  seed: int | None = None, name: str | None = None) -> CheckReport:
    """Spread over unit directions of f_t(p, Z) = Ḡ(Z, Z)^t trace(J_Z^t), t = 1..k."""
    if not 1 <= k <= 3:
        raise ValueError("k must be 1, 2 or 3")
    norm_metric = _normalizer(conn, metric)
    track = ResidualTracker()
    max_trace = max_raw_trace = raw_spread = 0.0
    count = 0
    for p in points:
        probe = conn.bundle.probe(p, 3)
        G = norm_metric.frame_jet(probe).value
        Rbar = tm.curvature_jet(conn, probe).value
        vals = np.empty((directions_per_point, k))
        raw = np.empty(directions_per_point)
        for d, (z, zraw) in enumerate(_directions(rng, G, directions_per_point)):
            count += 1
            J = jacobi_matrix(Rbar, z)
            Jt = np.eye(J.shape[0])
            for t in range(k):
                Jt = Jt @ J
                vals[d, t] = (z @ G @ z) ** (t + 1) * np.trace(Jt)
            raw[d] = np.trace(jacobi_matrix(Rbar, zraw))
        spread = vals.max(axis=0) - vals.min(axis=0)
        track.add_array(spread, p.as_array(), "f_t spread")
        max_trace = max(max_trace, float(np.abs(vals[:, 0]).max()))
        max_raw_trace = max(max_raw_trace, float(np.abs(raw).max()))
        raw_spread = max(raw_spread, float(raw.max() - raw.min()))
    label = name or ("one-stein" if k == 1 else "k-stein")
    return track.report(label, tol, count, seed, k=k, connection=conn.label(), normalizer=norm_metric.label(),
                        max_abs_trace_unit=max_trace, max_abs_trace_raw=max_raw_trace,
                        raw_trace_spread=raw_spread)


def osserman_check(conn: tm.TMConnection, metric: tm.TMMetric | None, points: Iterable[tm.TMPoint],
                   directions_per_point: int, tol: float, rng: np.random.Generator,
                   seed: int | None = None) -> CheckReport:
    """Sorted Jacobi spectra must agree, eigenvalue by eigenvalue, across all sampled unit directions."""
    norm_metric = _normalizer(conn, metric)
    track = ResidualTracker()
    reference = None
    max_entry = 0.0
    count = 0
    for p in points:
        probe = conn.bundle.probe(p, 3)
        G = norm_metric.frame_jet(probe).value
        Rbar = tm.curvature_jet(conn, probe).value
        for z, _ in _directions(rng, G, directions_per_point):
            count += 1
            J = jacobi_matrix(Rbar, z)
            max_entry = max(max_entry, float(np.abs(J).max()))
            spectrum = sort_spectrum(eigenvalues(J))
            if reference is None:
                reference = spectrum
            track.add_array(np.abs(spectrum - reference), np.concatenate([p.as_array(), z]))
    ref = [] if reference is None else [[float(z.real), float(z.imag)] for z in reference]
    return track.report("osserman", tol, count, seed, connection=conn.label(), normalizer=norm_metric.label(),
                        reference_spectrum=ref, max_jacobi_entry=max_entry)
