"""Manifold definition files and the built-in example library.

File format (line oriented, ``#`` starts a comment)::

    [manifold]
    name = sphere2
    dim = 2

    [metric]                 # unspecified entries are 0; g i j also sets g j i
    g 0 0 = "1"
    g 1 1 = "sin(x0)^2"

    [functions]
    f = "x0 + 2"

    [connection]             # omit the section, or say type = levi-civita
    type = explicit
    G 0 0 1 = "1"            # Γ^0_01
    torsion_free = false

    [chart]
    x0 = (0.2, 2.9)

    [fields]
    axis = ["0", "1"]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .base import (BaseGeometry, ChartDomain, ConnectionField, ExplicitConnection, MetricField,
                   Probe, VectorFieldBase, levi_civita)
from .errors import DefinitionParseError, ExprSyntaxError, LiftGeoError, ValidationError
from .expr import ScalarFieldExpr, parse

SECTIONS = ("manifold", "metric", "functions", "connection", "chart", "fields")
WEIGHT_NAMES = ("f", "h", "f1")

_SECTION = re.compile(r"^\[(\w+)\]$")
_ENTRY = re.compile(r"^([A-Za-z_][\w ]*?)\s*=\s*(.+)$")
_INTERVAL = re.compile(r"^\(\s*([^,]+)\s*,\s*([^)]+)\s*\)$")


@dataclass
class ManifoldDefinition:
    name: str
    dim: int
    metric: MetricField
    connection: ConnectionField
    chart: ChartDomain
    functions: dict[str, ScalarFieldExpr] = field(default_factory=dict)
    vector_fields: dict[str, VectorFieldBase] = field(default_factory=dict)
    source: str = "<memory>"

    @property
    def is_levi_civita(self) -> bool:
        return self.connection_kind == "levi-civita"

    @property
    def connection_kind(self) -> str:
        return "explicit" if isinstance(self.connection, ExplicitConnection) else "levi-civita"

    def geometry(self, curvature_sign: int = 1) -> BaseGeometry:
        return BaseGeometry(self.metric, self.connection, curvature_sign)

    def function(self, name: str) -> ScalarFieldExpr:
        if name in self.functions:
            return self.functions[name]
        try:
            return parse(name, self.dim)
        except ExprSyntaxError:
            raise ValidationError(f"unknown function {name!r} for manifold {self.name}") from None

    def field(self, name: str) -> VectorFieldBase:
        try:
            return self.vector_fields[name]
        except KeyError:
            raise ValidationError(f"unknown vector field {name!r} for manifold {self.name}") from None

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "source": self.source,
            "metric": [[str(self.metric.components[i, j]) for j in range(self.dim)] for i in range(self.dim)],
            "connection": self.connection_kind,
            "chart": [list(iv) for iv in self.chart.intervals],
            "functions": {k: str(v) for k, v in self.functions.items()},
            "fields": {k: [str(c) for c in v.components] for k, v in self.vector_fields.items()},
        }


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _strip_comment(line: str) -> str:
    out, quote = [], None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            break
        out.append(ch)
    return "".join(out).strip()


def parse_definition(text: str, source: str = "<memory>") -> ManifoldDefinition:
    """Parse definition text; syntax problems raise DefinitionParseError with the line number."""
    entries: dict[str, list[tuple[int, str, str]]] = {s: [] for s in SECTIONS}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if section not in SECTIONS:
                raise DefinitionParseError(source, lineno, f"unknown section [{section}]")
            continue
        if section is None:
            raise DefinitionParseError(source, lineno, "entry before any section header")
        m = _ENTRY.match(line)
        if not m:
            raise DefinitionParseError(source, lineno, f"expected 'key = value', got {line!r}")
        entries[section].append((lineno, m.group(1).strip(), m.group(2).strip()))
    return _build(entries, source)


def _build(entries, source: str) -> ManifoldDefinition:
    def fail(lineno, msg):
        raise DefinitionParseError(source, lineno, msg)

    info = {key: (lineno, _unquote(val)) for lineno, key, val in entries["manifold"]}
    if "dim" not in info:
        fail(1, "[manifold] must declare dim")
    lineno, dim_text = info["dim"]
    try:
        dim = int(dim_text)
    except ValueError:
        fail(lineno, f"dim must be a positive integer, got {dim_text!r}")
    if dim < 1:
        fail(lineno, "dim must be a positive integer")
    name = info.get("name", (0, Path(source).stem))[1]

    def expr(lineno, text):
        try:
            return parse(_unquote(text), dim)
        except ExprSyntaxError as exc:
            fail(lineno, f"bad expression: {exc}")

    def indices(lineno, key, prefix, count):
        parts = key.split()
        if len(parts) != count + 1 or parts[0] != prefix:
            fail(lineno, f"expected '{prefix}' followed by {count} indices, got {key!r}")
        try:
            idx = tuple(int(p) for p in parts[1:])
        except ValueError:
            fail(lineno, f"indices must be integers in {key!r}")
        if any(not 0 <= i < dim for i in idx):
            fail(lineno, f"index out of range for dim {dim} in {key!r}")
        return idx

    comps = [[None] * dim for _ in range(dim)]
    for lineno, key, val in entries["metric"]:
        i, j = indices(lineno, key, "g", 2)
        e = expr(lineno, val)
        for a, b in ((i, j), (j, i)):
            if comps[a][b] is not None and comps[a][b] != e:
                fail(lineno, f"metric entry g {a} {b} given twice with different values")
            comps[a][b] = e
    if not entries["metric"]:
        fail(1, "[metric] section is required")
    comps = [[c if c is not None else 0.0 for c in row] for row in comps]

    intervals = [(-np.inf, np.inf)] * dim
    for lineno, key, val in entries["chart"]:
        m = re.fullmatch(r"x(\d+)", key)
        if not m or int(m.group(1)) >= dim:
            fail(lineno, f"unknown chart coordinate {key!r}")
        iv = _INTERVAL.match(val)
        if not iv:
            fail(lineno, f"chart interval must look like (a, b), got {val!r}")
        try:
            lo, hi = (float(v) for v in iv.groups())
        except ValueError:
            fail(lineno, f"chart bounds must be numbers in {val!r}")
        if not lo < hi:
            fail(lineno, f"empty chart interval {val!r}")
        intervals[int(m.group(1))] = (lo, hi)
    chart = ChartDomain(tuple(intervals))
    try:
        metric = MetricField(comps, chart)
    except ValidationError as exc:
        fail(entries["metric"][0][0], str(exc))

    functions = {}
    for lineno, key, val in entries["functions"]:
        if not re.fullmatch(r"[A-Za-z_]\w*", key):
            fail(lineno, f"bad function name {key!r}")
        functions[key] = expr(lineno, val)

    connection: ConnectionField = levi_civita(metric)
    ctype, torsion_free = "levi-civita", None
    coeffs = np.zeros((dim, dim, dim), dtype=object)
    explicit_lines = []
    for lineno, key, val in entries["connection"]:
        if key == "type":
            ctype = _unquote(val)
            if ctype not in ("levi-civita", "explicit"):
                fail(lineno, f"connection type must be levi-civita or explicit, got {ctype!r}")
        elif key == "torsion_free":
            torsion_free = _unquote(val).lower() in ("true", "yes", "1")
        else:
            k, i, j = indices(lineno, key, "G", 3)
            coeffs[k, i, j] = expr(lineno, val)
            explicit_lines.append(lineno)
    if ctype == "explicit":
        for idx in np.ndindex(coeffs.shape):
            if coeffs[idx] == 0:
                coeffs[idx] = 0.0
        connection = ExplicitConnection(coeffs, bool(torsion_free))
    elif explicit_lines:
        fail(explicit_lines[0], "coefficients given but connection type is levi-civita")

    fields = {}
    for lineno, key, val in entries["fields"]:
        val = val.strip()
        if not (val.startswith("[") and val.endswith("]")):
            fail(lineno, "vector field must be a bracketed list of expressions")
        parts = _split_list(val[1:-1])
        if len(parts) != dim:
            fail(lineno, f"vector field {key!r} needs {dim} components, got {len(parts)}")
        fields[key] = VectorFieldBase([expr(lineno, p) for p in parts], key)

    return ManifoldDefinition(name, dim, metric, connection, chart, functions, fields, source)


def _split_list(text: str) -> list[str]:
    parts, depth, cur, quote = [], 0, [], None
    for ch in text:
        if quote:
            cur.append(ch)
            if ch == quote:
                quote = None
            continue
        if ch in "\"'":
            quote = ch
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur).strip())
    return parts


def validate(defn: ManifoldDefinition, samples: int = 8, seed: int = 0) -> None:
    """Spot-check SPD metric, finite connection and positive weights at seeded chart points."""
    chart = defn.chart
    if not all(np.isfinite(v) for iv in chart.intervals for v in iv):
        pts = np.random.default_rng(seed).uniform(-1, 1, size=(samples, defn.dim))
    else:
        pts = chart.sample(np.random.default_rng(seed), samples)
    defn.metric.validate(pts)
    for x in pts:
        gam = defn.connection.coefficients(x)
        if not np.all(np.isfinite(gam)):
            raise ValidationError(f"connection is not finite at {list(x)}")
        if defn.connection.torsion_free and np.abs(gam - gam.transpose(0, 2, 1)).max() > 1e-12:
            raise ValidationError(f"connection tagged torsion-free has torsion at {list(x)}")
        probe = Probe(x, order=0)
        for name in WEIGHT_NAMES:
            if name in defn.functions:
                v = float(defn.functions[name].taylor(probe.xs).value)
                if not v > 0:
                    raise ValidationError(f"weight {name} = {v:.6g} is not positive at {list(x)}")
        for fname, X in defn.vector_fields.items():
            if not np.all(np.isfinite(X.at(x))):
                raise ValidationError(f"vector field {fname} is not finite at {list(x)}")


BUILTINS: dict[str, str] = {
    "euclidean2": """
[manifold]
name = euclidean2
dim = 2
[metric]
g 0 0 = "1"
g 1 1 = "1"
[functions]
f = "x0 + 2"
h = "x1^2 + 1"
f1 = "2 + x0 + 0.3*sin(x1)"
[chart]
x0 = (-1.5, 1.5)
x1 = (-1.5, 1.5)
[fields]
rotation = ["-x1", "x0"]
affine = ["0.5*x0 + 2*x1 + 1", "-x0 + 0.25*x1 - 2"]
quadratic = ["x0^2", "x0*x1"]
constant = ["1", "0.5"]
""",
    "euclidean3": """
[manifold]
name = euclidean3
dim = 3
[metric]
g 0 0 = "1"
g 1 1 = "1"
g 2 2 = "1"
[functions]
f = "x0 + 2"
h = "x1^2 + 1"
f1 = "2 + x0 + 0.3*sin(x1)"
[chart]
x0 = (-1.5, 1.5)
x1 = (-1.5, 1.5)
x2 = (-1.5, 1.5)
[fields]
rotation = ["-x1", "x0", "0"]
affine = ["x0 + x2 + 1", "2*x1 - x0", "0.5*x2 + 3"]
quadratic = ["x0^2", "x1*x2", "0"]
""",
    "polar2": """
[manifold]
name = polar2
dim = 2
[metric]
g 0 0 = "1"
g 1 1 = "x0^2"
[functions]
f = "x0 + 2"
h = "x1^2 + 1"
f1 = "2 + x0 + 0.3*sin(x1)"
[chart]
x0 = (0.3, 3.0)
x1 = (-3.0, 3.0)
[fields]
rotation = ["0", "1"]
radial = ["x0", "0"]
""",
    "sphere2": """
[manifold]
name = sphere2
dim = 2
[metric]
g 0 0 = "1"
g 1 1 = "sin(x0)^2"
[functions]
f = "x0 + 2"
h = "x1^2 + 1"
f1 = "2 + x0 + 0.3*sin(x1)"
[chart]
x0 = (0.2, 2.9)
x1 = (-3.0, 3.0)
[fields]
rotation = ["0", "1"]
tilt = ["sin(x1)", "cos(x1)*cos(x0)/sin(x0)"]
""",
    "hyperbolic2": """
[manifold]
name = hyperbolic2
dim = 2
[metric]
g 0 0 = "1"
g 1 1 = "sinh(x0)^2"
[functions]
f = "x0 + 2"
h = "x1^2 + 1"
f1 = "2 + x0 + 0.3*sin(x1)"
[chart]
x0 = (0.2, 2.5)
x1 = (-3.0, 3.0)
[fields]
rotation = ["0", "1"]
""",
    "flat-with-torsion": """
[manifold]
name = flat-with-torsion
dim = 2
[metric]
g 0 0 = "1"
g 1 1 = "1"
[functions]
f = "x0 + 3"
h = "x1^2 + 1"
f1 = "3 + x0 + 0.3*sin(x1)"
[connection]
type = explicit
G 0 0 1 = "1"
torsion_free = false
[chart]
x0 = (-2.0, 2.0)
x1 = (-2.0, 2.0)
[fields]
rotation = ["-x1", "x0"]
affine = ["x0 + 1", "x1 - 2"]
""",
}


def builtin(name: str) -> ManifoldDefinition:
    try:
        text = BUILTINS[name]
    except KeyError:
        raise ValidationError(f"unknown built-in manifold {name!r}; choose from {', '.join(BUILTINS)}") from None
    return parse_definition(text, f"builtin:{name}")


def load_manifold(path: str | Path, samples: int = 8, seed: int = 0) -> ManifoldDefinition:
    """Load ``builtin:NAME`` or a definition file, then spot-check it."""
    target = str(path)
    if target.startswith("builtin:"):
        defn = builtin(target.split(":", 1)[1])
    else:
        try:
            text = Path(target).read_text(encoding="utf-8")
        except OSError as exc:
            raise LiftGeoError(f"cannot read manifold file {target}: {exc.strerror}") from None
        defn = parse_definition(text, target)
    validate(defn, samples, seed)
    return defn
