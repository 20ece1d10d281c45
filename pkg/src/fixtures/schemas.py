"""Pydantic schemas for the JSON fixture formats."""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.algebra.spaces import Entries, GradedSpace
from src.novikov import format_rational, parse_rational


def _rational(value: Any) -> str:
    return format_rational(parse_rational(value))


class NovikovTerm(BaseModel):
    """One term c T^e of a Novikov number."""
    e: str
    c: str

    @field_validator("e", "c", mode="before")
    @classmethod
    def check_rational(cls, value):
        return _rational(value)


class ContextSchema(BaseModel):
    """Truncation context."""
    energy_cutoff: str = "3"
    length_cutoff: int = Field(default=4, ge=1)
    field: bool = True

    @field_validator("energy_cutoff", mode="before")
    @classmethod
    def check_rational(cls, value):
        return _rational(value)


class BasisElement(BaseModel):
    name: str
    degree: int


class DivisorInput(BaseModel):
    """A closed degree-one basis vector and its cohomology class."""
    model_config = ConfigDict(populate_by_name=True)

    basis: str
    class_: List[str] = Field(alias="class")


class LinearTerm(BaseModel):
    """One coefficient of a linear map, ``from`` -> ``to``."""
    model_config = ConfigDict(populate_by_name=True)

    from_: str = Field(alias="from")
    to: str
    coef: str

    @field_validator("coef", mode="before")
    @classmethod
    def check_rational(cls, value):
        return _rational(value)


class SpaceSchema(BaseModel):
    """Graded basis with optional unit, divisor inputs and declared differential."""
    basis: List[BasisElement]
    one: Optional[str] = None
    divisors: List[DivisorInput] = []
    differential: Optional[List[LinearTerm]] = None


class LabelGroupSchema(BaseModel):
    """Label group with energy, Maslov index and boundary of each generator."""
    rank: Optional[int] = None
    energy: List[str]
    maslov: List[int]
    boundary: List[List[int]]
    support: List[List[int]] = []
    gap: Optional[str] = None


class OutputTerm(BaseModel):
    """Output basis element with a rational or polynomial-in-s coefficient."""
    basis: str
    coef: Union[str, List[str]]


class EntrySchema(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    in_: List[str] = Field(alias="in")
    out: List[OutputTerm]


class ComponentSchema(BaseModel):
    k: int = Field(ge=0)
    beta: List[int]
    entries: List[EntrySchema] = []


class KeySchema(BaseModel):
    k: int = Field(ge=0)
    beta: List[int]


class OperatorSystemSchema(BaseModel):
    """Operator system; ``target`` defaults to ``space``."""
    space: SpaceSchema
    target: Optional[SpaceSchema] = None
    labels: Optional[LabelGroupSchema] = None
    context: Optional[ContextSchema] = None
    base_degree: Optional[int] = 2
    components: List[ComponentSchema] = []
    known: Optional[List[KeySchema]] = None


class ContractionSchema(BaseModel):
    """Contraction as matrix triples."""
    model_config = ConfigDict(populate_by_name=True)

    model: SpaceSchema
    complex_: SpaceSchema = Field(alias="complex")
    d_model: List[LinearTerm] = []
    d_complex: List[LinearTerm] = []
    i: List[LinearTerm]
    pi: List[LinearTerm]
    G: List[LinearTerm] = []
    strong: bool = True


class GramTerm(BaseModel):
    a: str
    b: str
    coef: str

    @field_validator("coef", mode="before")
    @classmethod
    def check_rational(cls, value):
        return _rational(value)


class InnerProductSchema(BaseModel):
    """Finite complex with a symmetric positive-definite inner product."""
    space: SpaceSchema
    gram: List[GramTerm] = []


class IsotopySchema(BaseModel):
    """Pseudo-isotopy (m^s, c^s); coefficients are polynomials in s."""
    m: OperatorSystemSchema
    c: OperatorSystemSchema


class Inequality(BaseModel):
    b: List[int]
    c: str

    @field_validator("c", mode="before")
    @classmethod
    def check_rational(cls, value):
        return _rational(value)


class PolyhedronSchema(BaseModel):
    ineqs: List[Inequality] = Field(min_length=1)


class ComplexSchema(BaseModel):
    cells: List[PolyhedronSchema]


class ChartSchema(BaseModel):
    """Chart bundle: label group, A-infinity data, basepoint and domain."""
    name: str
    label_group: Optional[LabelGroupSchema] = None
    ainf: OperatorSystemSchema
    basepoint: List[str]
    polyhedron: PolyhedronSchema


class TransitionSchema(BaseModel):
    """Transition from chart ``source`` into chart ``target``."""
    model_config = ConfigDict(populate_by_name=True)

    source: str
    target: str
    F_star: List[List[int]]
    shift: List[str]
    C: Optional[OperatorSystemSchema] = None
    overlap: PolyhedronSchema


class BundleSchema(BaseModel):
    """Charts, transitions and witnesses sharing one truncation context."""
    context: ContextSchema = ContextSchema()
    charts: List[ChartSchema]
    transitions: List[TransitionSchema] = []
    complex_: Optional[ComplexSchema] = Field(default=None, alias="complex")
    witnesses: Dict[str, Any] = {}

    model_config = ConfigDict(populate_by_name=True)


class BuiltinSchema(BaseModel):
    """Reference to a programmatically built fixture."""
    builtin: str
    params: Dict[str, Any] = {}


class TreesParams(BaseModel):
    k: int = Field(ge=0)
    beta: List[int] = []


def dump_linear(source: GradedSpace, target: GradedSpace, entries: Entries) -> list:
    """Linear map as a list of ``{"from", "to", "coef"}`` terms."""
    terms = []
    for (i,), row in sorted(entries.items()):
        for j, coef in sorted(row.items()):
            terms.append({"from": source.names[i], "to": target.names[j], "coef": format_rational(coef)})
    return terms


class HomSchema(BaseModel):
    """A homomorphism together with its source and target algebras."""
    f: OperatorSystemSchema
    source: OperatorSystemSchema
    target: OperatorSystemSchema
