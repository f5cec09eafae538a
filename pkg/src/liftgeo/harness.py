"""Check registry and orchestration: definition + config in, deterministic report out."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analysis
from . import formulas as fm
from . import tangent as tm
from .base import BaseGeometry, ExplicitConnection, is_codazzi, levi_civita
from .definitions import ManifoldDefinition, _split_list
from .errors import UnknownCheck, ValidationError
from .report import FAIL, FLAGGED, PASS, CheckReport, ResidualTracker

EXIT_CODES = {PASS: 0, FAIL: 1, FLAGGED: 2}
EXIT_ERROR = 3

DEFAULT_TOLERANCES = {
    "codazzi-base": 1e-9,
    "statistical-tm": 1e-9,
    "killing-lift": 1e-9,
    "affine-lift": 1e-9,
    "lc-oracle-agreement": 1e-8,
    "bracket-identities": 1e-9,
    "cubic-paper-formulas": 1e-8,
    "one-stein": 1e-8,
    "k-stein": 1e-8,
    "osserman": 1e-8,
}

BASE_CONNECTIONS = ("definition", "levi-civita", "zero")


def default_seed() -> int:
    raw = os.environ.get("LIFTGEO_SEED")
    if raw is None or not raw.strip():
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"LIFTGEO_SEED must be an integer, got {raw!r}") from None


@dataclass
class RunConfig:
    seed: int = field(default_factory=default_seed)
    samples: int = 20
    fiber_range: float = 2.0
    tolerances: dict[str, float] = field(default_factory=dict)
    tol: float | None = None
    curvature_sign: int = 1
    output: str | None = None
    tm_metric: str = "sasaki"
    tm_connection: str = "horizontal"
    base_connection: str = "definition"
    field: str | None = None
    lift: str = "horizontal"
    k: int = 2
    directions: int = 10
    pairs: int = 10

    def __post_init__(self):
        if self.samples < 1:
            raise ValidationError("samples must be at least 1")
        if self.directions < 1:
            raise ValidationError("directions must be at least 1")
        if self.fiber_range <= 0:
            raise ValidationError("fiber_range must be positive")
        if self.curvature_sign not in (1, -1):
            raise ValidationError("curvature_sign must be +1 or -1")
        if self.tol is not None and not self.tol > 0:
            raise ValidationError("tolerance must be positive")
        if any(not v > 0 for v in self.tolerances.values()):
            raise ValidationError("tolerance overrides must be positive")
        if self.base_connection not in BASE_CONNECTIONS:
            raise ValidationError(f"base connection must be one of {', '.join(BASE_CONNECTIONS)}")
        if self.lift not in tm.LIFT_KINDS:
            raise ValidationError(f"lift must be one of {', '.join(tm.LIFT_KINDS)}")

    def tolerance(self, check: str) -> float:
        if check in self.tolerances:
            return self.tolerances[check]
        return self.tol if self.tol is not None else DEFAULT_TOLERANCES[check]


# ---------------------------------------------------------------------------
# assembling geometry from a definition and a config


class Context:
    """Everything a check needs, built once per run."""

    def __init__(self, defn: ManifoldDefinition, cfg: RunConfig):
        self.defn = defn
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        conn = {
            "definition": defn.connection,
            "levi-civita": levi_civita(defn.metric),
            "zero": ExplicitConnection.zero(defn.dim),
        }[cfg.base_connection]
        self.base_connection = conn
        self.geo = BaseGeometry(defn.metric, conn, cfg.curvature_sign)
        self.bundle = tm.TangentBundle(self.geo)

    def base_points(self) -> np.ndarray:
        return self.defn.chart.sample(self.rng, self.cfg.samples)

    def tm_points(self, count: int | None = None) -> list[tm.TMPoint]:
        return analysis.sample_tm_points(self.defn.chart, self.rng, count or self.cfg.samples, self.cfg.fiber_range)

    def metric(self) -> tm.TMMetric:
        return parse_tm_metric(self.cfg.tm_metric, self.defn, self.bundle)

    def connection(self, metric: tm.TMMetric | None = None) -> tm.TMConnection:
        return parse_tm_connection(self.cfg.tm_connection, self.defn, self.bundle, metric or self.metric())

    def field(self, preferred: tuple[str, ...]) -> object:
        if self.cfg.field is not None:
            return self.defn.field(self.cfg.field)
        for name in preferred:
            if name in self.defn.vector_fields:
                return self.defn.vector_fields[name]
        if self.defn.vector_fields:
            return next(iter(self.defn.vector_fields.values()))
        raise ValidationError(f"manifold {self.defn.name} declares no vector fields; pass --field")


def _weight_args(text: str, defn: ManifoldDefinition) -> list:
    return [defn.function(part.strip()) for part in _split_list(text)] if text else []


def parse_tm_metric(text: str, defn: ManifoldDefinition, bundle: tm.TangentBundle) -> tm.TMMetric:
    """``sasaki``, ``twisted:f,h`` or ``gradient:f``; weights are function names or expressions."""
    kind, _, rest = text.partition(":")
    args = _weight_args(rest, defn)
    if kind == "sasaki" and not args:
        return tm.TMMetric("sasaki", bundle)
    if kind == "twisted":
        if not args:
            args = [defn.function("f"), defn.function("h")]
        if len(args) != 2:
            raise ValidationError("twisted metric takes two weights, e.g. twisted:f,h")
        return tm.TMMetric("twisted", bundle, *args)
    if kind == "gradient":
        if not args:
            args = [defn.function("f")]
        if len(args) != 1:
            raise ValidationError("gradient metric takes one weight, e.g. gradient:f")
        return tm.TMMetric("gradient", bundle, args[0])
    raise ValidationError(f"unknown TM metric {text!r}; use sasaki, twisted:f,h or gradient:f")


def parse_tm_connection(text: str, defn: ManifoldDefinition, bundle: tm.TangentBundle,
                        metric: tm.TMMetric) -> tm.TMConnection:
    """Connection kinds; lc-twisted and lc-gradient default to the metric's own weights."""
    kind, _, rest = text.partition(":")
    args = _weight_args(rest, defn)
    if kind == "lc-twisted":
        if not args:
            args = [metric.f, metric.h] if metric.kind == "twisted" else [defn.function("f"), defn.function("h")]
        if len(args) != 2:
            raise ValidationError("lc-twisted takes two weights")
        return tm.connection_on(kind, bundle, *args)
    if kind == "lc-gradient":
        if not args:
            args = [metric.f] if metric.kind == "gradient" else [defn.function("f")]
        if len(args) != 1:
            raise ValidationError("lc-gradient takes one weight")
        return tm.connection_on(kind, bundle, args[0])
    if args:
        raise ValidationError(f"connection {kind!r} takes no weights")
    if kind not in tm.CONNECTION_KINDS:
        raise ValidationError(f"unknown TM connection {text!r}; choose from {', '.join(tm.CONNECTION_KINDS)}")
    return tm.connection_on(kind, bundle, metric=metric)


# ---------------------------------------------------------------------------
# checks


def _codazzi(ctx: Context, tol: float) -> CheckReport:
    rep = is_codazzi(ctx.defn.metric, ctx.base_connection, ctx.base_points(), tol, ctx.cfg.seed)
    rep.parameters["base_connection"] = ctx.cfg.base_connection
    return rep


def _statistical(ctx: Context, tol: float) -> CheckReport:
    metric = ctx.metric()
    conn = ctx.connection(metric)
    rep = analysis.check_statistical(metric, conn, ctx.tm_points(), tol, ctx.cfg.seed)
    # a base connection with torsion cannot carry a statistical structure, whatever the lift
    base_T = max(float(np.abs(g - g.transpose(0, 2, 1)).max())
                 for g in (ctx.base_connection.coefficients(x) for x in ctx.base_points()))
    rep.parameters["base_torsion_max"] = base_T
    if base_T > tol:
        rep.verdict = FAIL
        rep.interpretation_flags.append("base-connection-not-torsion-free")
    return rep


def _killing(ctx: Context, tol: float) -> CheckReport:
    X = ctx.field(("rotation",))
    return analysis.check_killing_lift(ctx.cfg.lift, X, ctx.metric(), ctx.tm_points(), tol, ctx.cfg.seed)


def _affine(ctx: Context, tol: float) -> CheckReport:
    X = ctx.field(("affine", "rotation"))
    return analysis.check_affine_lift(ctx.cfg.lift, X, ctx.connection(), ctx.tm_points(), tol, ctx.cfg.seed)


def _lc_oracle(ctx: Context, tol: float) -> CheckReport:
    metric = ctx.metric()
    closed = tm.closed_form_for(metric)
    oracle = tm.numeric_lc_tm(metric)
    track = ResidualTracker()
    points = ctx.tm_points()
    for p in points:
        track.add_array(closed.coefficients(p) - oracle.coefficients(p), p.as_array())
    return track.report("lc-oracle-agreement", tol, len(points), ctx.cfg.seed,
                        metric=metric.label(), closed_form=closed.label())


def _brackets(ctx: Context, tol: float) -> CheckReport:
    n = ctx.defn.dim
    fields = [(analysis.random_polynomial_field(ctx.rng, n, 2, f"X{i}"),
               analysis.random_polynomial_field(ctx.rng, n, 2, f"Y{i}")) for i in range(ctx.cfg.pairs)]
    points = ctx.tm_points()
    track = ResidualTracker()
    for i, p in enumerate(points):
        X, Y = fields[i % len(fields)]
        for label, res in analysis.bracket_residuals(ctx.bundle, X, Y, p).items():
            track.add_array(res, p.as_array(), label)
    return track.report("bracket-identities", tol, len(points), ctx.cfg.seed, pairs=len(fields))


def _weights(defn: ManifoldDefinition) -> fm.Weights:
    dflt = fm.default_weights(defn.dim)
    return fm.Weights(*(defn.functions.get(name, getattr(dflt, name)) for name in ("f", "h", "f1")))


def _cubic_formulas(ctx: Context, tol: float) -> CheckReport:
    w = _weights(ctx.defn)
    points = ctx.tm_points()
    results = fm.compare(ctx.geo, points, w)
    return fm.summarize(results, tol, len(points), ctx.cfg.seed,
                        weights={"f": str(w.f), "h": str(w.h), "f1": str(w.f1)})


def _stein(name: str, k: int | None = None) -> Callable[[Context, float], CheckReport]:
    def run(ctx: Context, tol: float) -> CheckReport:
        metric = ctx.metric()
        return analysis.k_stein_check(ctx.connection(metric), metric, k or ctx.cfg.k, ctx.tm_points(),
                                      ctx.cfg.directions, tol, ctx.rng, ctx.cfg.seed, name)
    return run


def _osserman(ctx: Context, tol: float) -> CheckReport:
    metric = ctx.metric()
    return analysis.osserman_check(ctx.connection(metric), metric, ctx.tm_points(), ctx.cfg.directions,
                                   tol, ctx.rng, ctx.cfg.seed)


REGISTRY: dict[str, Callable[[Context, float], CheckReport]] = {
    "codazzi-base": _codazzi,
    "statistical-tm": _statistical,
    "killing-lift": _killing,
    "affine-lift": _affine,
    "lc-oracle-agreement": _lc_oracle,
    "bracket-identities": _brackets,
    "cubic-paper-formulas": _cubic_formulas,
    "one-stein": _stein("one-stein", 1),
    "k-stein": _stein("k-stein"),
    "osserman": _osserman,
}

DESCRIPTIONS = {
    "codazzi-base": "(g, base connection) is a Codazzi pair: ∇g totally symmetric",
    "statistical-tm": "chosen TM connection is torsion-free and Codazzi for the chosen TM metric",
    "killing-lift": "lift of a base field is Killing for the chosen TM metric",
    "affine-lift": "lift of a base field is an affine collineation of the chosen TM connection",
    "lc-oracle-agreement": "closed-form Levi-Civita connection of the TM metric vs numeric Christoffel oracle",
    "bracket-identities": "Lie brackets of vertical and horizontal lifts of random polynomial fields",
    "cubic-paper-formulas": "engine cubic tensors vs closed-form block formulas",
    "one-stein": "trace of the Jacobi operator is constant over unit directions",
    "k-stein": "Ḡ(Z,Z)^t tr(J_Z^t), t = 1..k, constant over unit directions",
    "osserman": "Jacobi spectrum is constant over unit directions",
}


def run_check(defn: ManifoldDefinition, check: str, cfg: RunConfig | None = None) -> CheckReport:
    """Run one registered check; the report is a pure function of (definition, check, config)."""
    if check not in REGISTRY:
        raise UnknownCheck(f"unknown check {check!r}; available: {', '.join(REGISTRY)}")
    cfg = cfg or RunConfig()
    ctx = Context(defn, cfg)
    report = REGISTRY[check](ctx, cfg.tolerance(check))
    report.parameters = {"manifold": defn.name, "tm_metric": cfg.tm_metric, "tm_connection": cfg.tm_connection,
                         "curvature_sign": cfg.curvature_sign, "fiber_range": cfg.fiber_range,
                         **report.parameters}
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return report


def exit_code(report: CheckReport) -> int:
    return EXIT_CODES.get(report.verdict, EXIT_ERROR)
