"""Command-line front end.

Every subcommand prints one JSON document on stdout; with ``--out DIR`` the
same document and any CSV/SVG artifacts are also written there.  Exit codes:
0 success, 2 invalid input (with a pointer to the offending field),
3 inconclusive numerical verdict.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import zlib
from dataclasses import dataclass, field, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import (DimensionError, MultiPoly, PolynomialParseError, RationalFn, discriminant,
                      parse_poly)
from .amoeba import INSIDE, OUTSIDE, AmoebaError, component_census, ronkin_pieces, spine
from .geometry import GeometryError, _order_facet_polygon, newton_polytope, polytope_from_points
from .horn import (InvalidParameterError, OreSatoCoefficient, ValidationError, bergman_kernel,
                   compatibility_check, essential_resultant, horn_from_ore_sato, mellin_horn,
                   principal_symbols, rationality_screens, symbol_resultant, verify_horn_solution)
from .supports import SupportSpec, admissible_supports, horn_fan

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 2, 3

COMMANDS = ("horn", "supports", "fan", "symbols", "resultant", "discriminant", "bergman", "mellin",
            "verify", "screens", "amoeba", "spine", "render")
RENDER_TYPES = ("support-lattice", "fan", "polytope", "amoeba-grid", "spine-2d")


# ---------------------------------------------------------------------------
# job configuration


@dataclass
class JobConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    out: str | None = None
    resolution: int | None = None
    lo: float | None = None
    hi: float | None = None
    tol: float = 1e-3
    n_angle: int = 64
    window: int | None = None
    seed: int = 0

    INPUT_KEYS = {
        "horn": {"ore_sato"}, "supports": {"ore_sato", "gamma"}, "fan": {"ore_sato"},
        "symbols": {"ore_sato"}, "resultant": {"ore_sato"}, "discriminant": {"equation", "var"},
        "bergman": {"p"}, "mellin": {"m", "exps"}, "verify": {"ore_sato", "num", "den"},
        "screens": {"ore_sato"}, "amoeba": {"poly"}, "spine": {"poly", "census"},
        "render": {"artifact", "type"},
    }

    @classmethod
    def from_dict(cls, data: dict) -> "JobConfig":
        if not isinstance(data, dict):
            raise ValidationError("<root>", "expected a JSON object")
        known = {f.name for f in fields(cls)}
        for k in data:
            if k not in known:
                raise ValidationError(k, "unknown key")
        cmd = data.get("command")
        if cmd not in COMMANDS:
            raise ValidationError("command", f"expected one of {', '.join(COMMANDS)}")
        inputs = data.get("inputs", {})
        if not isinstance(inputs, dict):
            raise ValidationError("inputs", "expected an object")
        for k in inputs:
            if k not in cls.INPUT_KEYS[cmd]:
                raise ValidationError(f"inputs.{k}", f"unknown key for command {cmd!r}")
        cfg = cls(**{k: v for k, v in data.items()})
        cfg.validate()
        return cfg

    def validate(self):
        for name in ("resolution", "n_angle", "window", "seed"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
                raise ValidationError(name, "expected an integer")
        if self.resolution is not None and self.resolution < 1:
            raise ValidationError("resolution", "must be positive")
        if self.n_angle < 2:
            raise ValidationError("n_angle", "must be at least 2")
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise ValidationError("tol", "must be a positive number")
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise ValidationError("hi", "must exceed lo")


# ---------------------------------------------------------------------------
# input helpers


def _read_text(value: str) -> str:
    if value.lstrip().startswith(("{", "[")):
        return value
    try:
        p = Path(value)
        if p.is_file():
            return p.read_text().strip()
    except OSError:  # inline text too long to be a path
        pass
    return value


def load_ore_sato(spec) -> OreSatoCoefficient:
    """Accept a dict, inline JSON, a file path, or the name of a bundled example."""
    if isinstance(spec, dict):
        return OreSatoCoefficient.from_json(spec)
    if not isinstance(spec, str):
        raise ValidationError("ore_sato", "expected a path, a bundled example name or inline JSON")
    text = spec.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError("ore_sato", f"invalid JSON: {exc.msg}") from None
        return OreSatoCoefficient.from_json(data)
    p = Path(text)
    if p.is_file():
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError("ore_sato", f"invalid JSON in {p}: {exc.msg}") from None
        return OreSatoCoefficient.from_json(data)
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    data_dir = resources.files("horn_amoeba") / "data"
    if (data_dir / name).is_file():
        return OreSatoCoefficient.from_json(json.loads((data_dir / name).read_text()))
    raise ValidationError("ore_sato", f"no such file or bundled example: {text}")


def load_poly(text: str, key: str = "poly") -> MultiPoly:
    if not text:
        raise ValidationError(key, "missing polynomial")
    try:
        f, names = parse_poly(_read_text(text))
    except PolynomialParseError as exc:
        raise ValidationError(key, str(exc)) from None
    return f


def _poly_text(f: MultiPoly) -> str:
    return f.to_text([f"x{i + 1}" for i in range(f.nvars)])


# ---------------------------------------------------------------------------
# SVG rendering

SIZE = 400
PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
           "#1f78b4", "#b2df8a", "#fb9a99", "#cab2d6", "#ff7f00")
INSIDE_COLOR = "#222222"
UNKNOWN_COLOR = "#bbbbbb"

# orthographic view for 3-D artifacts: looking down (1, 1, 1)
_VIEW = np.array([[1.0, -1.0, 0.0], [-1.0, -1.0, 2.0]])
_VIEW /= np.linalg.norm(_VIEW, axis=1, keepdims=True)


def color_for(order) -> str:
    key = ",".join(str(int(v)) for v in order).encode()
    return PALETTE[zlib.crc32(key) % len(PALETTE)]


class _Canvas:
    def __init__(self, lo, hi, title: str = ""):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        span = self.hi - self.lo
        span[span == 0] = 1.0
        self.span = span
        self.items: list = []
        self.title = title

    def xy(self, p) -> tuple:
        u = (p[0] - self.lo[0]) / self.span[0]
        v = (p[1] - self.lo[1]) / self.span[1]
        return (round(20 + u * (SIZE - 40), 3), round(SIZE - 20 - v * (SIZE - 40), 3))

    def line(self, a, b, color="#000000", width=1.0):
        (x1, y1), (x2, y2) = self.xy(a), self.xy(b)
        self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" stroke-width="{width}"/>')

    def dot(self, p, color, r=3.0):
        x, y = self.xy(p)
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{r}" fill="{color}"/>')

    def polygon(self, pts, fill, opacity=0.35, stroke="#000000"):
        s = " ".join(f"{x},{y}" for x, y in (self.xy(p) for p in pts))
        self.items.append(f'<polygon points="{s}" fill="{fill}" fill-opacity="{opacity}" stroke="{stroke}"/>')

    def rect(self, p, q, fill):
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        x, y = min(x1, x2), min(y1, y2)
        w, h = round(abs(x2 - x1), 3), round(abs(y2 - y1), 3)
        self.items.append(f'<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}"/>')

    def text(self, p, s, size=10):
        x, y = self.xy(p)
        self.items.append(f'<text x="{x}" y="{y}" font-size="{size}" font-family="monospace">{s}</text>')

    def axes(self):
        if self.lo[1] <= 0 <= self.hi[1]:
            self.line((self.lo[0], 0), (self.hi[0], 0), "#888888", 0.5)
        if self.lo[0] <= 0 <= self.hi[0]:
            self.line((0, self.lo[1]), (0, self.hi[1]), "#888888", 0.5)

    def svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" '
                f'width="{SIZE}" height="{SIZE}">')
        body = [f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>']
        if self.title:
            body.append(f'<text x="20" y="14" font-size="11" font-family="monospace">{self.title}</text>')
        return "\n".join([head] + body + self.items + ["</svg>"]) + "\n"


def _project(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[None, :]
    if P.shape[1] == 3:
        return P @ _VIEW.T
    return P


def _axis_legend(c: _Canvas, scale: float):
    origin = np.zeros(3)
    for k, name in enumerate(("x1", "x2", "x3")):
        e = np.zeros(3)
        e[k] = scale
        a, b = _project([origin, e])
        c.line(a, b, "#888888", 0.5)
        c.text(b, name, 9)


def _bounds(pts, pad=0.5):
    P = np.asarray(pts, dtype=float)
    if len(P) == 0:
        return np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    lo, hi = P.min(axis=0) - pad, P.max(axis=0) + pad
    return lo, hi


def render_support_lattice(art: dict) -> str:
    sups = art.get("supports", [])
    W = int(art.get("window", 6))
    specs = []
    for k, s in enumerate(sups):
        try:
            cons = [(tuple(c["A"]), Fraction(c["c"]), c["sense"]) for c in s["constraints"]]
            specs.append(SupportSpec.from_constraints(cons, [Fraction(g) for g in s["gamma"]]))
        except (KeyError, TypeError, ValueError):
            raise ValidationError(f"supports[{k}]", "expected gamma and constraints") from None
    n = len(specs[0].gamma) if specs else 2
    pts_all = []
    groups = []
    for k, sp in enumerate(specs):
        pts = sp.points(W)
        groups.append((k, pts))
        pts_all.extend(pts)
    box = [(-W,) * n, (W,) * n] if n == 2 else list(_project([(-W, -W, -W), (W, W, W), (W, -W, -W), (-W, W, W)]))
    lo, hi = _bounds(_project(box) if n == 3 else box)
    c = _Canvas(lo, hi, f"supports ({len(specs)})")
    c.axes() if n == 2 else _axis_legend(c, W)
    for k, pts in groups:
        col = PALETTE[k % len(PALETTE)]
        for p in _project(pts) if pts else []:
            c.dot(p, col, 2.5 if n == 2 else 1.5)
    return c.svg()


def render_fan(art: dict) -> str:
    cones = art.get("cones", [])
    n = 2
    gens = []
    for k, cone in enumerate(cones):
        g = cone.get("generators")
        if not isinstance(g, list):
            raise ValidationError(f"cones[{k}].generators", "expected a list of vectors")
        gens.append([tuple(v) for v in g])
        if g:
            n = len(g[0])
    R = 1.0
    c = _Canvas((-1.3, -1.3), (1.3, 1.3), f"fan ({len(cones)} cones)")
    if n == 3:
        _axis_legend(c, 0.4)
    else:
        c.axes()
    for k, g in enumerate(gens):
        dirs = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in g]
        proj = [_project(d)[0] * R for d in dirs]
        col = PALETTE[k % len(PALETTE)]
        if n == 2 and len(proj) == 2:
            c.polygon([(0, 0), tuple(proj[0]), tuple(proj[1])], col)
        for p in proj:
            c.line((0, 0), tuple(p), "#000000", 1.2)
            c.dot(tuple(p), col, 2.5)
    return c.svg()


def render_polytope(art: dict) -> str:
    verts = art.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise ValidationError("vertices", "expected a nonempty list of integer vectors")
    P = polytope_from_points([tuple(v) for v in verts])
    n = P.nvars
    proj = _project(P.vertices)
    lo, hi = _bounds(proj)
    c = _Canvas(lo, hi, f"polytope ({len(P.vertices)} vertices)")
    if n == 2 and P.dim == 2:
        from .geometry import _hull_2d
        c.polygon(_hull_2d(P.vertices), PALETTE[0])
    elif n == 3 and P.dim == 3:
        _axis_legend(c, max(1.0, float(np.abs(proj).max())))
        for nrm, _ in P.facets:
            off = max(sum(a * b for a, b in zip(nrm, v)) for v in P.vertices)
            face = [v for v in P.vertices if sum(a * b for a, b in zip(nrm, v)) == off]
            ring = _order_facet_polygon(face, nrm)
            pr = _project(ring)
            for a, b in zip(pr, np.roll(pr, -1, axis=0)):
                c.line(tuple(a), tuple(b))
    else:
        for a, b in zip(proj, np.roll(proj, -1, axis=0)):
            c.line(tuple(a), tuple(b))
    for v, p in zip(P.vertices, proj):
        c.dot(tuple(p), "#000000", 2.5)
        c.text(tuple(p), str(tuple(v)), 8)
    return c.svg()


def render_amoeba_grid(art: dict) -> str:
    lo = art.get("lo", [-1, -1])
    hi = art.get("hi", [1, 1])
    res = art.get("resolution", [0, 0])
    states = art.get("states", [])
    orders = art.get("orders", [])
    if len(lo) != 2:
        raise ValidationError("lo", "amoeba-grid rendering expects a 2-D grid")
    c = _Canvas(lo, hi, "amoeba")
    c.axes()
    if not states:
        return c.svg()
    rx, ry = int(res[0]), int(res[1])
    if len(states) != rx * ry:
        raise ValidationError("states", f"expected {rx * ry} cells")
    dx = (hi[0] - lo[0]) / rx
    dy = (hi[1] - lo[1]) / ry
    names = {"INSIDE": INSIDE, "OUTSIDE": OUTSIDE}

    def colour(k):
        s = names.get(states[k], 0)
        if s == INSIDE:
            return INSIDE_COLOR
        if s == OUTSIDE:
            return color_for(orders[k])
        return UNKNOWN_COLOR

    # cell (i, j) sits at flat index i * ry + j; emit runs along the second axis
    for i in range(rx):
        j = 0
        while j < ry:
            col = colour(i * ry + j)
            k = j
            while k + 1 < ry and colour(i * ry + k + 1) == col:
                k += 1
            c.rect((lo[0] + i * dx, lo[1] + j * dy), (lo[0] + (i + 1) * dx, lo[1] + (k + 1) * dy), col)
            j = k + 1
    c.axes()
    return c.svg()


def render_spine_2d(art: dict) -> str:
    verts = [tuple(v["t_float"]) for v in art.get("vertices", [])]
    walls = art.get("walls", [])
    pts = verts + [tuple(w.get("anchor")) for w in walls if w.get("anchor")]
    if pts and len(pts[0]) != 2:
        raise ValidationError("vertices", "spine-2d rendering expects a planar spine")
    lo, hi = _bounds(pts or [(0, 0)], pad=3.0)
    c = _Canvas(lo, hi, "spine")
    c.axes()
    reach = float(max(hi - lo))
    for w in walls:
        on = [verts[k] for k in w.get("vertices", [])]
        rec = [np.asarray(g, dtype=float) for g in w.get("recession", [])]
        if len(on) >= 2:
            c.line(on[0], on[1], "#000000", 1.5)
        start = on[0] if on else tuple(w.get("anchor", (0, 0)))
        for g in rec:
            d = g / np.linalg.norm(g)
            c.line(start, tuple(np.asarray(start) + reach * d), "#000000", 1.5)
    for v in verts:
        c.dot(v, "#d95f02", 3)
    return c.svg()


def render(art: dict, kind: str | None = None) -> str:
    if not isinstance(art, dict):
        raise ValidationError("artifact", "expected a JSON object")
    kind = kind or art.get("type")
    table = {"support-lattice": render_support_lattice, "fan": render_fan, "polytope": render_polytope,
             "amoeba-grid": render_amoeba_grid, "spine-2d": render_spine_2d}
    if kind not in table:
        raise ValidationError("type", f"unsupported artifact type {kind!r}; expected one of {', '.join(RENDER_TYPES)}")
    return table[kind](art)


# ---------------------------------------------------------------------------
# commands


@dataclass
class Result:
    doc: dict
    files: dict = field(default_factory=dict)   # file name -> text
    code: int = EXIT_OK


def _cmd_horn(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    H = horn_from_ore_sato(phi)
    return Result({"coefficient": phi.to_json(), "system": H.to_json(), "compatible": compatibility_check(H)})


def _supports_artifact(sups, window):
    return {"type": "support-lattice", "window": window, "supports": [s.to_json() for s in sups]}


def _cmd_supports(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    H = horn_from_ore_sato(phi)
    gamma = cfg.inputs.get("gamma")
    if gamma is not None:
        if not isinstance(gamma, list) or len(gamma) != phi.n:
            raise ValidationError("inputs.gamma", f"expected a list of {phi.n} rationals")
        try:
            gamma = [Fraction(str(g)) for g in gamma]
        except ValueError:
            raise ValidationError("inputs.gamma", "expected rationals") from None
    sups = admissible_supports(H, gamma, cfg.window)
    doc = {"count": len(sups), "supports": [dict(s.to_json(), region=s.describe()) for s in sups]}
    files = {}
    if phi.n in (2, 3):
        files["supports.svg"] = render_support_lattice(_supports_artifact(sups, cfg.window or 6))
    return Result(doc, files)


def _cmd_fan(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    F = horn_fan(phi, seed=cfg.seed)
    doc = dict(F.to_json(), type="fan")
    files = {"fan.svg": render_fan(doc)} if phi.n in (2, 3) else {}
    return Result(doc, files)


def _cmd_symbols(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    return Result(principal_symbols(horn_from_ore_sato(phi)).to_json())


def _cmd_resultant(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    S = principal_symbols(horn_from_ore_sato(phi))
    R = symbol_resultant(S)
    r = essential_resultant(R)
    P = newton_polytope(r)
    doc = {"resultant": _poly_text(R), "essential": _poly_text(r),
           "newton_vertices": [list(v) for v in P.vertices]}
    return Result(doc, {"newton.svg": render_polytope({"vertices": doc["newton_vertices"]})})


def _cmd_discriminant(cfg):
    eq = cfg.inputs.get("equation")
    var = cfg.inputs.get("var", "y")
    if not eq:
        raise ValidationError("inputs.equation", "missing equation")
    try:
        f, names = parse_poly(eq)
    except PolynomialParseError as exc:
        raise ValidationError("inputs.equation", str(exc)) from None
    if not isinstance(var, str) or var not in names:
        raise ValidationError("inputs.var", f"variable {var!r} does not occur in the equation")
    j = names.index(var)
    lead = f.coefficients_in(j)
    top = max(lead)
    if not lead[top].is_constant():
        raise ValidationError("inputs.equation", f"the leading coefficient in {var} must be a constant")
    if lead[top].constant_term() != 1:
        f = f * (1 / lead[top].constant_term())
    D = discriminant(f, j)
    rest = [k for k in range(f.nvars) if k != j]
    Dr = MultiPoly(len(rest), {tuple(e[k] for k in rest): c for e, c in D.terms.items()})
    rnames = [names[k] for k in rest]
    return Result({"discriminant": Dr.to_text(rnames), "variables": rnames, "terms": len(Dr.terms)})


def _cmd_bergman(cfg):
    p = cfg.inputs.get("p")
    if not isinstance(p, list) or not p or any(not isinstance(v, int) or v < 1 for v in p):
        raise ValidationError("inputs.p", "expected a list of positive integers")
    B = bergman_kernel(p)
    n = len(p)
    names = [f"x{i + 1}" for i in range(n)]
    doc = {"p": list(B.p), "coefficient": B.coefficient.to_json(), "system": B.system.to_json(),
           "normalization": B.normalization, "note": B.note, "closed_form": None}
    if B.closed_form is not None:
        doc["closed_form"] = {"num": B.closed_form.num.to_text(names), "den": B.closed_form.den.to_text(names)}
    return Result(doc)


def _cmd_mellin(cfg):
    m = cfg.inputs.get("m")
    exps = cfg.inputs.get("exps")
    if not isinstance(m, int) or m < 2:
        raise ValidationError("inputs.m", "expected an integer >= 2")
    if not isinstance(exps, list) or not exps:
        raise ValidationError("inputs.exps", "expected a list of positive integers")
    H = mellin_horn(m, exps)
    return Result({"m": m, "exps": exps, "system": H.to_json(), "x_form": H.meta["x_form"].to_json(),
                   "compatible": compatibility_check(H)})


def _cmd_verify(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    H = horn_from_ore_sato(phi)
    names = [f"x{i + 1}" for i in range(phi.n)]
    try:
        num = parse_poly(cfg.inputs.get("num") or "", names)[0]
        den = parse_poly(cfg.inputs.get("den") or "1", names)[0]
    except PolynomialParseError as exc:
        raise ValidationError("inputs.num", str(exc)) from None
    if den.is_zero():
        raise ValidationError("inputs.den", "denominator is zero")
    res = verify_horn_solution(H, RationalFn(num, den))
    return Result({"residuals": [r.to_text(names) for r in res], "solves": all(r.num.is_zero() for r in res)})


def _cmd_screens(cfg):
    phi = load_ore_sato(cfg.inputs.get("ore_sato"))
    return Result(rationality_screens(phi, cfg.window))


def _grid_artifact(census) -> dict:
    g = census.grid
    names = {0: "UNKNOWN", 1: "INSIDE", 2: "OUTSIDE"}
    return {"type": "amoeba-grid", "lo": list(g.lo), "hi": list(g.hi), "resolution": list(g.resolution),
            "states": [names[int(s)] for s in g.states],
            "orders": [[int(v) for v in o] for o in g.orders]}


def _cmd_amoeba(cfg):
    f = load_poly(cfg.inputs.get("poly"), "inputs.poly")
    if f.nvars not in (2, 3):
        raise ValidationError("inputs.poly", "amoeba census supports 2 or 3 variables")
    lo = cfg.lo
    hi = cfg.hi
    if (lo is None) != (hi is None):
        raise ValidationError("lo", "give both lo and hi, or neither")
    census = component_census(f, lo, hi, cfg.resolution, cfg.n_angle, cfg.tol, cfg.seed)
    doc = dict(census.to_json(), polynomial=_poly_text(f), empty_amoeba=census.inside_cells == 0)
    files = {"grid.csv": census.grid.to_csv()}
    if f.nvars == 2:
        art = _grid_artifact(census)
        files["amoeba_grid.json"] = json.dumps(art)
        files["amoeba.svg"] = render_amoeba_grid(art)
    code = EXIT_INCONCLUSIVE if census.solid is None else EXIT_OK
    return Result(doc, files, code)


def _cmd_spine(cfg):
    f = load_poly(cfg.inputs.get("poly"), "inputs.poly")
    census = None
    if cfg.inputs.get("census"):
        census = component_census(f, cfg.lo, cfg.hi, cfg.resolution, cfg.n_angle, cfg.tol, cfg.seed)
        if census.solid is None:
            return Result({"verdict": census.verdict}, {}, EXIT_INCONCLUSIVE)
    pieces, warnings = ronkin_pieces(f, census)
    S = spine(pieces)
    doc = dict(S.to_json(), warnings=warnings, type="spine-2d" if f.nvars == 2 else "spine")
    files = {"spine.svg": render_spine_2d(doc)} if f.nvars == 2 else {}
    return Result(doc, files)


def _cmd_render(cfg):
    src = cfg.inputs.get("artifact")
    if not src:
        raise ValidationError("inputs.artifact", "missing artifact")
    text = _read_text(src)
    try:
        art = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("inputs.artifact", f"invalid JSON: {exc.msg}") from None
    svg = render(art, cfg.inputs.get("type"))
    return Result({"type": cfg.inputs.get("type") or art.get("type"), "bytes": len(svg)}, {"render.svg": svg})


HANDLERS = {
    "horn": _cmd_horn, "supports": _cmd_supports, "fan": _cmd_fan, "symbols": _cmd_symbols,
    "resultant": _cmd_resultant, "discriminant": _cmd_discriminant, "bergman": _cmd_bergman,
    "mellin": _cmd_mellin, "verify": _cmd_verify, "screens": _cmd_screens, "amoeba": _cmd_amoeba,
    "spine": _cmd_spine, "render": _cmd_render,
}


def execute(cfg: JobConfig) -> Result:
    return HANDLERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="horn-amoeba", description="Horn systems, supports, fans and amoebas.")
    ap.add_argument("--config", help="JSON job file (keys: command, inputs, out, resolution, lo, hi, tol, "
                                     "n_angle, window, seed)")
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--out", help="directory for JSON/CSV/SVG artifacts")
        p.add_argument("--seed", type=int, default=0)
        return p

    for name in ("horn", "fan", "symbols", "resultant", "screens"):
        p = common(sub.add_parser(name))
        p.add_argument("--ore-sato", required=True, help="coefficient JSON: path, bundled name or inline")
        if name == "screens":
            p.add_argument("--window", type=int)
    p = common(sub.add_parser("supports"))
    p.add_argument("--ore-sato", required=True)
    p.add_argument("--gamma", nargs="+")
    p.add_argument("--window", type=int)
    p = common(sub.add_parser("discriminant"))
    p.add_argument("--equation", required=True)
    p.add_argument("--var", default="y")
    p = common(sub.add_parser("bergman"))
    p.add_argument("--p", type=int, nargs="+", required=True)
    p = common(sub.add_parser("mellin"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--exps", type=int, nargs="+", required=True)
    p = common(sub.add_parser("verify"))
    p.add_argument("--ore-sato", required=True)
    p.add_argument("--num", required=True, help="numerator polynomial in x1..xn")
    p.add_argument("--den", default="1")
    for name in ("amoeba", "spine"):
        p = common(sub.add_parser(name))
        p.add_argument("--poly", required=True, help="polynomial text or a file containing it")
        p.add_argument("--resolution", type=int)
        p.add_argument("--lo", type=float)
        p.add_argument("--hi", type=float)
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--n-angle", type=int, default=64)
        if name == "spine":
            p.add_argument("--census", action="store_true", help="take pieces from a grid census")
    p = common(sub.add_parser("render"))
    p.add_argument("--artifact", required=True, help="artifact JSON (path or inline)")
    p.add_argument("--type", choices=RENDER_TYPES)
    return ap


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    if ns.config:
        text = _read_text(ns.config)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError("config", f"invalid JSON: {exc.msg}") from None
        return JobConfig.from_dict(data)
    if not ns.command:
        raise ValidationError("command", f"expected one of {', '.join(COMMANDS)}")
    d = vars(ns)
    keys = JobConfig.INPUT_KEYS[ns.command]
    inputs = {k: d[k] for k in keys if d.get(k) is not None}
    data = {"command": ns.command, "inputs": inputs, "out": d.get("out"), "seed": d.get("seed", 0)}
    for k in ("resolution", "lo", "hi", "tol", "n_angle", "window"):
        if d.get(k) is not None:
            data[k] = d[k]
    return JobConfig.from_dict(data)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, default=str) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        result = execute(cfg)
    except ValidationError as exc:
        stderr.write(f"error: field {exc}\n")
        return EXIT_INVALID
    except (InvalidParameterError, PolynomialParseError, DimensionError, GeometryError, AmoebaError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    text = _dump(result.doc)
    stdout.write(text)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg.command}.json").write_text(text)
        for name, body in result.files.items():
            (out / name).write_text(body)
    return result.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
