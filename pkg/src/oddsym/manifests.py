"""JSON manifest ingestion: charts, structures, maps and friends.

Expressions inside manifests are grammar text, not JSON trees, so the
files stay hand-editable.  Every referenced name must resolve; schema
violations raise ManifestError, which the command line maps to its
input-error exit code.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .bv import VolumeForm
from .forms import DifferentialForm
from .grammar import parse_expr
from .surfaces import AdjustedSurface
from .symbols import Chart, SymbolTable
from .symplectic import OddSymplecticStructure, Semidensity, SuperMap

TIME_SYMBOL = "t"


class ManifestError(ValueError):
    pass


def _expect(cond, message):
    if not cond:
        raise ManifestError(message)


def _build_chart(entry):
    _expect(isinstance(entry, dict), "chart manifest must be an object")
    _expect("n" in entry, "chart manifest needs 'n'")
    n = entry["n"]
    even = list(entry.get("even", [f"x{i}" for i in range(1, n + 1)]))
    odd = list(entry.get("odd", [f"th{i}" for i in range(1, n + 1)]))
    aux = list(entry.get("aux", []))
    _expect(len(even) >= n, "chart needs at least n even symbols")
    _expect(len(odd) == n, "chart needs exactly n odd symbols")
    if TIME_SYMBOL not in even:
        even.append(TIME_SYMBOL)
    frames = [f"xi{i}" for i in range(1, n + 1)]
    taken = set(even) | set(odd) | set(aux)
    if any(name in taken for name in frames):
        frames = []
    try:
        table = SymbolTable(tuple(even), tuple(odd), tuple(frames),
                            tuple(aux))
        return Chart(table, tuple(even[:n]), tuple(odd))
    except ValueError as exc:
        raise ManifestError(str(exc)) from None


class Manifest:
    """Resolved named objects plus the raw document."""

    def __init__(self, document):
        _expect(isinstance(document, dict), "manifest must be a JSON object")
        self.raw = document
        self.charts = {}
        self.structures = {}
        self.maps = {}
        self.volume_forms = {}
        self.semidensities = {}
        self.forms = {}
        self.surfaces = {}
        for name, entry in document.get("charts", {}).items():
            self.charts[name] = _build_chart(entry)
        for name, entry in document.get("structures", {}).items():
            self.structures[name] = self._build_structure(entry)
        for name, entry in document.get("maps", {}).items():
            self.maps[name] = self._build_map(entry)
        for name, entry in document.get("volume_forms", {}).items():
            self.volume_forms[name] = self._build_volume(entry)
        for name, entry in document.get("semidensities", {}).items():
            self.semidensities[name] = self._build_semidensity(entry)
        for name, entry in document.get("forms", {}).items():
            self.forms[name] = self._build_form(entry)
        for name, entry in document.get("surfaces", {}).items():
            self.surfaces[name] = self._build_surface(entry)

    # -- resolution helpers -------------------------------------------------

    def chart(self, name):
        _expect(name in self.charts, f"unknown chart {name!r}")
        return self.charts[name]

    def parse(self, chart, text):
        try:
            return parse_expr(text, chart.table)
        except ValueError as exc:
            raise ManifestError(f"bad expression {text!r}: {exc}") from None

    def _build_structure(self, entry):
        chart = self.chart(entry.get("chart"))
        rows = entry.get("bracket")
        size = 2 * chart.n
        _expect(isinstance(rows, list) and len(rows) == size,
                "bracket must be a 2n x 2n array")
        matrix = []
        for row in rows:
            _expect(isinstance(row, list) and len(row) == size,
                    "bracket must be a 2n x 2n array")
            matrix.append([self.parse(chart, text) for text in row])
        try:
            return OddSymplecticStructure(chart, matrix)
        except ValueError as exc:
            raise ManifestError(str(exc)) from None

    def _build_map(self, entry):
        source = self.chart(entry.get("source"))
        target = self.chart(entry.get("target", entry.get("source")))
        targets = entry.get("targets")
        _expect(isinstance(targets, list) and len(targets) == 2 * target.n,
                "map needs 2n target expressions")
        exprs = [self.parse(source, text) for text in targets]
        body_inverse = None
        if entry.get("body_inverse"):
            parsed = [self.parse(source, text)
                      for text in entry["body_inverse"]]
            body_inverse = []
            for expr in parsed:
                _expect(expr.max_odd_degree() == 0,
                        "body inverse entries must be even rational maps")
                body_inverse.append(expr.body())
        try:
            return SuperMap(source, target, exprs, body_inverse=body_inverse)
        except ValueError as exc:
            raise ManifestError(str(exc)) from None

    def _build_volume(self, entry):
        chart = self.chart(entry.get("chart"))
        try:
            return VolumeForm(self.parse(chart, entry.get("rho", "")), chart)
        except ValueError as exc:
            raise ManifestError(str(exc)) from None

    def _build_semidensity(self, entry):
        chart = self.chart(entry.get("chart"))
        return Semidensity(self.parse(chart, entry.get("coefficient", "")),
                           chart)

    def _build_form(self, entry):
        if "chart" in entry:
            chart = self.chart(entry["chart"])
        else:
            _expect("n" in entry, "form manifest needs 'chart' or 'n'")
            chart = _build_chart({"n": entry["n"]})
        _expect(len(chart.table.frame_odds) >= chart.n,
                "form chart lacks frame symbols xi1..xin")
        try:
            return DifferentialForm(self.parse(chart, entry.get("expr", "")),
                                    chart)
        except ValueError as exc:
            raise ManifestError(str(exc)) from None

    def _build_surface(self, entry):
        chart = self.chart(entry.get("chart"))
        try:
            return AdjustedSurface(chart, entry.get("x0"), entry.get("theta0"))
        except ValueError as exc:
            raise ManifestError(str(exc)) from None

    def section(self, name):
        _expect(name in self.raw, f"manifest has no {name!r} section")
        entry = self.raw[name]
        _expect(isinstance(entry, dict), f"{name!r} section must be an object")
        return entry


def load_manifest(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from None
    return Manifest(document)


def parse_time(value):
    if value == "formal":
        return "formal"
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ManifestError(f"bad time value {value!r}") from None
