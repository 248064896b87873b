# coalmu/schemas/tableau.py
from fractions import Fraction
from pydantic import BaseModel, ConfigDict, Field
from typing import List, Optional

from coalmu.core.exceptions import CertificateError, CoalMuError
from coalmu.core.formula import Modal, render, render_sequent
from coalmu.core.onestep import (
    Axiom,
    Blueprint,
    ModalInstance,
    PrincipalAnd,
    PrincipalFix,
    PrincipalOr,
    instantiate,
)
from coalmu.core.parser import parse
from coalmu.core.signature import Signature
from coalmu.core.tableau import Tableau, TableauNode


class AnnotationRecord(BaseModel):
    type: str
    formula: Optional[str] = None
    negation: Optional[str] = None
    rule: Optional[str] = None
    premise: Optional[List[str]] = None
    code: Optional[List[str]] = None

    model_config = ConfigDict(extra="forbid")


class TableauNodeRecord(BaseModel):
    id: int
    label: List[str]
    annotation: Optional[AnnotationRecord] = None

    model_config = ConfigDict(extra="forbid")


class TableauEdgeRecord(BaseModel):
    source: int = Field(alias="from")
    to: int
    index: int

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class TableauDocument(BaseModel):
    """JSON form of a tableau; automaton states are not part of it"""

    nodes: List[TableauNodeRecord]
    edges: List[TableauEdgeRecord] = []
    root: int

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_tableau(cls, tableau: Tableau) -> "TableauDocument":
        return cls(
            nodes=[
                TableauNodeRecord(
                    id=n.id,
                    label=render_sequent(n.label),
                    annotation=_annotation_record(n.annotation),
                )
                for n in tableau.nodes
            ],
            edges=[TableauEdgeRecord(source=s, to=t, index=i) for s, t, i in tableau.edges],
            root=tableau.root,
        )

    def to_tableau(self, sig: Signature) -> Tableau:
        nodes = []
        for record in self.nodes:
            try:
                label = frozenset(parse(text, sig) for text in record.label)
                annotation = _blueprint(record.annotation, sig)
            except CertificateError as exc:
                raise CertificateError(f"node {record.id}: {exc}")
            except CoalMuError as exc:
                raise CertificateError(f"node {record.id}: cannot read formula: {exc}")
            nodes.append(TableauNode(record.id, label, annotation))
        edges = [(e.source, e.to, e.index) for e in self.edges]
        return Tableau(nodes, edges, self.root)


def _annotation_record(blueprint: Optional[Blueprint]) -> Optional[AnnotationRecord]:
    if blueprint is None:
        return None
    if isinstance(blueprint, PrincipalAnd):
        return AnnotationRecord(type="and", formula=render(blueprint.formula))
    if isinstance(blueprint, PrincipalOr):
        return AnnotationRecord(type="or", formula=render(blueprint.formula))
    if isinstance(blueprint, PrincipalFix):
        return AnnotationRecord(type="fix", formula=render(blueprint.formula))
    if isinstance(blueprint, Axiom):
        return AnnotationRecord(
            type="axiom", formula=render(blueprint.formula), negation=render(blueprint.negation)
        )
    return AnnotationRecord(
        type="modal",
        rule=blueprint.rule.tag,
        premise=[render(a) for a in blueprint.premise()],
        code=[str(c) for c in blueprint.rule.code],
    )


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CertificateError(f"rule code entry {text!r} is not a number")


def _blueprint(record: Optional[AnnotationRecord], sig: Signature) -> Optional[Blueprint]:
    if record is None:
        return None
    if record.type in ("and", "or", "fix"):
        if record.formula is None:
            raise CertificateError(f"{record.type} annotation needs a formula")
        formula = parse(record.formula, sig)
        return {"and": PrincipalAnd, "or": PrincipalOr, "fix": PrincipalFix}[record.type](formula)
    if record.type == "axiom":
        if record.formula is None or record.negation is None:
            raise CertificateError("axiom annotation needs a formula and its negation")
        return Axiom(parse(record.formula, sig), parse(record.negation, sig))
    if record.type == "modal":
        if record.rule is None or record.premise is None:
            raise CertificateError("modal annotation needs a rule and a premise")
        atoms = [parse(text, sig) for text in record.premise]
        if any(not isinstance(a, Modal) for a in atoms):
            raise CertificateError("modal premise entries must be modal atoms")
        code = [_number(text) for text in record.code or []]
        rule = instantiate(sig, record.rule, atoms, code)
        return ModalInstance(rule, tuple(a.arg for a in atoms))
    raise CertificateError(f"unknown annotation type {record.type!r}")
