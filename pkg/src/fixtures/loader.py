"""
Reading and writing fixture files.

A fixture file is either a full JSON description validated by the schemas in
``src.fixtures.schemas`` or a reference ``{"builtin": name, "params": {...}}``
to a programmatic builder.
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import ValidationError

from src.algebra.operators import OperatorSystem, identity_system
from src.algebra.spaces import Entries, GradedSpace, add_term
from src.errors import DataError, FixtureError
from src.fixtures import builders
from src.fixtures.schemas import (
    BuiltinSchema,
    BundleSchema,
    ComplexSchema,
    ContextSchema,
    ContractionSchema,
    HomSchema,
    InnerProductSchema,
    IsotopySchema,
    LabelGroupSchema,
    OperatorSystemSchema,
    PolyhedronSchema,
    SpaceSchema,
)
from src.geometry import PolyhedralComplex, RationalPolyhedron
from src.isotopy import PseudoIsotopy, coefficients_of, polynomial
from src.labels import LabelGroup
from src.mirror.charts import ChartBundle
from src.mirror.gluing import TransitionData
from src.mirror.series import LaurentSeries
from src.novikov import TruncationContext, format_rational, parse_rational
from src.transfer.contraction import Contraction
from src.transfer.harmonic import InnerProductComplex

logger = logging.getLogger(__name__)


def read_json(path) -> Any:
    try:
        with open(Path(path), "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise FixtureError(f"cannot read fixture {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FixtureError(f"fixture {path} is not valid JSON: {e}") from e


def _validate(schema, data: Any):
    try:
        return schema.model_validate(data)
    except (ValidationError, DataError) as e:
        raise FixtureError(f"{schema.__name__}: {e}") from e


def _guarded(fn: Callable, *args):
    try:
        return fn(*args)
    except DataError as e:
        raise FixtureError(str(e)) from e


# Parsing


def parse_context(schema: Optional[ContextSchema]) -> TruncationContext:
    schema = schema or ContextSchema()
    return TruncationContext(parse_rational(schema.energy_cutoff), schema.length_cutoff, schema.field)


def _linear(source: GradedSpace, target: GradedSpace, terms) -> Entries:
    entries: Entries = {}
    for term in terms or []:
        add_term(entries, (source.index(term.from_),), target.index(term.to), parse_rational(term.coef))
    return entries


def parse_space(schema: SpaceSchema) -> GradedSpace:
    names = [b.name for b in schema.basis]
    space = GradedSpace(tuple(names), tuple(b.degree for b in schema.basis))
    one = space.index(schema.one) if schema.one is not None else None
    divisors = tuple((space.index(d.basis), [parse_rational(x) for x in d.class_]) for d in schema.divisors)
    differential = None
    if schema.differential is not None:
        differential = tuple(
            (space.index(t.from_), space.index(t.to), parse_rational(t.coef)) for t in schema.differential
        )
    return GradedSpace(space.names, space.degrees, one, divisors, differential)


def parse_labels(schema: Optional[LabelGroupSchema], dimension: int = 0) -> LabelGroup:
    if schema is None:
        # no classes besides zero; a placeholder generator carries the boundary dimension
        return builders.torus_labels(dimension) if dimension else LabelGroup((), (), (), ())
    group = LabelGroup(tuple(schema.energy), tuple(schema.maslov), tuple(schema.boundary), tuple(schema.support), schema.gap)
    if schema.rank is not None and schema.rank != group.rank:
        raise DataError(f"label group declares rank {schema.rank} but lists {group.rank} generators")
    return group


def _coefficient(value, polynomial_coefficients: bool):
    if isinstance(value, list):
        if not polynomial_coefficients:
            raise DataError("polynomial coefficients are only allowed in isotopies")
        return polynomial(value)
    coef = parse_rational(value)
    return polynomial([coef]) if polynomial_coefficients else coef


def parse_system(
    schema: OperatorSystemSchema,
    labels: Optional[LabelGroup] = None,
    context: Optional[TruncationContext] = None,
    polynomial_coefficients: bool = False,
) -> OperatorSystem:
    source = parse_space(schema.space)
    target = parse_space(schema.target) if schema.target is not None else source
    if labels is None:
        dimension = len(source.divisors[0][1]) if source.divisors else 0
        labels = parse_labels(schema.labels, dimension)
    context = context or parse_context(schema.context)
    components = {}
    for component in schema.components:
        beta = tuple(component.beta)
        if len(beta) != labels.rank:
            raise DataError(f"class {list(beta)} does not match label rank {labels.rank}")
        entries: Entries = {}
        for entry in component.entries:
            if len(entry.in_) != component.k:
                raise DataError(f"entry {entry.in_} does not have arity {component.k}")
            inputs = tuple(source.index(name) for name in entry.in_)
            for term in entry.out:
                add_term(entries, inputs, target.index(term.basis), _coefficient(term.coef, polynomial_coefficients))
        components[(component.k, beta)] = entries
    known = None
    if schema.known is not None:
        known = [(key.k, tuple(key.beta)) for key in schema.known]
    return OperatorSystem(source, target, labels, context, components, schema.base_degree, known=known)


def parse_polyhedron(schema: PolyhedronSchema) -> RationalPolyhedron:
    return RationalPolyhedron.from_json(schema.model_dump())


def parse_complex(schema: ComplexSchema) -> PolyhedralComplex:
    return PolyhedralComplex([parse_polyhedron(cell) for cell in schema.cells])


def parse_contraction(schema: ContractionSchema) -> Contraction:
    model, complex_ = parse_space(schema.model), parse_space(schema.complex_)
    return Contraction(
        model,
        complex_,
        _linear(model, model, schema.d_model),
        _linear(complex_, complex_, schema.d_complex),
        _linear(model, complex_, schema.i),
        _linear(complex_, model, schema.pi),
        _linear(complex_, complex_, schema.G),
        schema.strong,
    )


def parse_inner_product(schema: InnerProductSchema) -> InnerProductComplex:
    space = parse_space(schema.space)
    gram = {}
    for term in schema.gram:
        gram[(space.index(term.a), space.index(term.b))] = parse_rational(term.coef)
    return InnerProductComplex(space, gram)


def parse_isotopy(schema: IsotopySchema) -> PseudoIsotopy:
    m = parse_system(schema.m, polynomial_coefficients=True)
    c = parse_system(schema.c, m.labels, m.context, polynomial_coefficients=True)
    return PseudoIsotopy(m, c)


def _witnesses(raw: dict, dimensions: dict) -> dict:
    """``{"i,j,k": {"r": {generator: series}}}`` keyed by chart-name triples."""
    parsed = {}
    for key, by_generator in raw.items():
        names = tuple(part.strip() for part in key.split(","))
        if len(names) != 3 or names[0] not in dimensions:
            raise DataError(f"witness key {key!r} must name three charts")
        n = dimensions[names[0]]
        parsed[names] = {
            int(r): {q: LaurentSeries.from_json(series, n) for q, series in entry.items()}
            for r, entry in by_generator.items()
        }
    return parsed


def parse_bundle(schema: BundleSchema) -> tuple:
    """Returns (charts, transitions, complex or None, witnesses)."""
    context = parse_context(schema.context)
    charts = {}
    for item in schema.charts:
        if item.name in charts:
            raise DataError(f"duplicate chart name {item.name!r}")
        labels = None
        if item.label_group is not None:
            labels = parse_labels(item.label_group)
        m = parse_system(item.ainf, labels, context)
        charts[item.name] = ChartBundle(item.name, m, tuple(item.basepoint), parse_polyhedron(item.polyhedron))
    transitions = []
    for item in schema.transitions:
        if item.source not in charts or item.target not in charts:
            raise DataError(f"transition {item.target}<-{item.source} names an unknown chart")
        source, target = charts[item.source], charts[item.target]
        if item.C is None:
            C = identity_system(target.space, target.labels, context)
        else:
            C = parse_system(item.C, target.labels, context)
        transitions.append(TransitionData(source, target, item.F_star, item.shift, C, parse_polyhedron(item.overlap)))
    complex_ = parse_complex(schema.complex_) if schema.complex_ is not None else None
    witnesses = _witnesses(schema.witnesses, {name: c.dimension for name, c in charts.items()})
    return list(charts.values()), transitions, complex_, witnesses


# Builtin fixtures


def _context_param(params: dict) -> Optional[TruncationContext]:
    if "energy_cutoff" not in params and "length_cutoff" not in params:
        return None
    return builders.context_of(params.get("energy_cutoff", "3"), int(params.get("length_cutoff", 3)))


def _bundle(pair) -> tuple:
    charts, transitions = pair
    return charts, transitions, None, {}


BUILTINS = {
    "torus": lambda p: builders.qcdr_torus(int(p.get("n", 2)), True, _context_param(p), bool(p.get("acyclic", False))),
    "torus-unsigned": lambda p: builders.qcdr_torus(int(p.get("n", 2)), False, _context_param(p)),
    "deformed-torus": lambda p: builders.deformed_torus(
        p.get("classes", [{"energy": 1, "maslov": 2, "boundary": [1, 0], "coef": 1}]),
        _context_param(p),
        bool(p.get("acyclic", False)),
    ),
    "clifford": lambda p: builders.clifford_algebra(_context_param(p), p.get("gauge_energy")),
    "maslov-zero": lambda p: builders.maslov_zero_algebra(_context_param(p), tuple(p.get("boundary", (1, 0)))),
    "negative-maslov": lambda p: builders.negative_maslov_torus(_context_param(p)),
    "tilted-torus": lambda p: builders.tilted_inner_product(
        builders.qcdr_torus(2, True, _context_param(p), acyclic=True), p.get("tilt", "1/2")
    ),
    "trivial-isotopy": lambda p: builders.trivial_torus_isotopy(_context_param(p)),
    "gauge-isotopy": lambda p: builders.gauge_isotopy(_context_param(p), p.get("strength", "1/2")),
    "flat-gauge-isotopy": lambda p: builders.flat_gauge_isotopy(_context_param(p), p.get("strength", "1/3")),
    "shift-atlas": lambda p: _bundle(builders.shift_atlas(int(p.get("charts", 3)), _context_param(p))),
    "corrected-atlas": lambda p: _bundle(builders.corrected_atlas(int(p.get("charts", 3)), _context_param(p))),
    "broken-margin": lambda p: _bundle(builders.broken_margin_atlas(_context_param(p))),
}


def build_builtin(data: dict):
    reference = _validate(BuiltinSchema, data)
    if reference.builtin not in BUILTINS:
        raise FixtureError(f"unknown builtin fixture {reference.builtin!r}; known: {sorted(BUILTINS)}")
    logger.info(f"Building fixture {reference.builtin} with {reference.params}")
    try:
        return BUILTINS[reference.builtin](reference.params)
    except (DataError, ValueError, KeyError, TypeError) as e:
        raise FixtureError(f"builtin {reference.builtin}: {e}") from e


# Loading by kind


def _load(data: Any, schema, parse: Callable):
    if isinstance(data, dict) and "builtin" in data:
        return build_builtin(data)
    return _guarded(parse, _validate(schema, data))


def load_system(data: Any) -> OperatorSystem:
    return _load(data, OperatorSystemSchema, parse_system)


def load_hom(data: Any) -> tuple:
    """Returns (f, m_src, m_tgt)."""

    def parse(schema: HomSchema):
        m_src = parse_system(schema.source)
        m_tgt = parse_system(schema.target, m_src.labels, m_src.context)
        f = parse_system(schema.f, m_src.labels, m_src.context)
        return f, m_src, m_tgt

    return _load(data, HomSchema, parse)


def load_isotopy(data: Any) -> PseudoIsotopy:
    return _load(data, IsotopySchema, parse_isotopy)


def load_contraction(data: Any) -> Contraction:
    return _load(data, ContractionSchema, parse_contraction)


def load_inner_product(data: Any) -> InnerProductComplex:
    return _load(data, InnerProductSchema, parse_inner_product)


def load_complex(data: Any) -> PolyhedralComplex:
    return _load(data, ComplexSchema, parse_complex)


def load_bundle(data: Any) -> tuple:
    return _load(data, BundleSchema, parse_bundle)


def load_file(path, loader: Callable):
    logger.info(f"Loading fixture {path}")
    return loader(read_json(path))


# Writing


def _format_coefficient(value) -> Any:
    if hasattr(value, "ring"):
        return [format_rational(c) for c in coefficients_of(value)]
    return format_rational(value)


def dump_system(system: OperatorSystem) -> dict:
    """JSON form of an operator system; unknown keys are listed through ``known``."""
    source, target = system.source, system.target
    components = []
    for (k, beta), entries in sorted(system.components.items(), key=lambda item: (item[0][1], item[0][0])):
        rows = []
        for inputs, outputs in sorted(entries.items()):
            rows.append(
                {
                    "in": [source.names[i] for i in inputs],
                    "out": [{"basis": target.names[j], "coef": _format_coefficient(c)} for j, c in sorted(outputs.items())],
                }
            )
        components.append({"k": k, "beta": list(beta), "entries": rows})
    data = {
        "space": source.to_json(),
        "labels": system.labels.to_json(),
        "context": system.context.describe(),
        "base_degree": system.base_degree,
        "components": components,
        "known": [{"k": k, "beta": list(beta)} for k, beta in system.keys()],
    }
    if not target.same_basis(source):
        data["target"] = target.to_json()
    return data
