# coalmu/schemas/model.py
from fractions import Fraction
from pydantic import BaseModel, ConfigDict
from typing import Dict, List, Optional

from coalmu.core.exceptions import ModelFormatError
from coalmu.core.semantics import CoalgebraModel, GameFrame, validate_model
from coalmu.core.signature import COALITION, GRADED, KINDS, KRIPKE, MONOTONE, PROBABILISTIC


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ModelFormatError(f"Not a rational number: {text!r}")


def _rational_text(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class ModelDocument(BaseModel):
    """JSON form of a finite model; exactly one structure field is used per kind"""

    kind: str
    states: List[str]
    valuation: Dict[str, List[str]] = {}
    transitions: Optional[Dict[str, List[str]]] = None
    weights: Optional[Dict[str, Dict[str, int]]] = None
    dist: Optional[Dict[str, Dict[str, str]]] = None
    neighborhoods: Optional[Dict[str, List[List[str]]]] = None
    agents: Optional[int] = None
    strategies: Optional[Dict[str, List[int]]] = None
    outcome: Optional[Dict[str, Dict[str, str]]] = None
    root: Optional[str] = None

    model_config = ConfigDict(extra="forbid")

    def to_model(self) -> CoalgebraModel:
        if self.kind not in KINDS:
            raise ModelFormatError(f"Unknown model kind {self.kind!r}")
        expected = {
            KRIPKE: {"transitions"},
            GRADED: {"weights"},
            PROBABILISTIC: {"dist"},
            MONOTONE: {"neighborhoods"},
            COALITION: {"agents", "strategies", "outcome"},
        }[self.kind]
        structural = {"transitions", "weights", "dist", "neighborhoods", "agents", "strategies", "outcome"}
        present = {name for name in structural if getattr(self, name) is not None}
        if present != expected:
            raise ModelFormatError(
                f"A {self.kind} model needs exactly the fields {sorted(expected)}, got {sorted(present)}"
            )

        structure = {}
        for x in self.states:
            if self.kind == KRIPKE:
                structure[x] = frozenset(self.transitions.get(x, []))
            elif self.kind == GRADED:
                structure[x] = dict(self.weights.get(x, {}))
            elif self.kind == PROBABILISTIC:
                structure[x] = {y: _rational(m) for y, m in self.dist.get(x, {}).items()}
            elif self.kind == MONOTONE:
                structure[x] = frozenset(frozenset(g) for g in self.neighborhoods.get(x, []))
            else:
                sizes = tuple(self.strategies.get(x, []))
                outcome = {}
                for profile, target in self.outcome.get(x, {}).items():
                    try:
                        key = tuple(int(part) for part in profile.split(","))
                    except ValueError:
                        raise ModelFormatError(f"Bad strategy profile {profile!r} at {x}")
                    outcome[key] = target
                structure[x] = GameFrame(sizes, outcome)

        model = CoalgebraModel(
            kind=self.kind,
            states=tuple(self.states),
            valuation={name: frozenset(value) for name, value in self.valuation.items()},
            structure=structure,
            agents=self.agents,
            root=self.root,
        )
        validate_model(model)
        return model

    @classmethod
    def from_model(cls, model: CoalgebraModel) -> "ModelDocument":
        data = {
            "kind": model.kind,
            "states": list(model.states),
            "valuation": {name: sorted(value) for name, value in sorted(model.valuation.items())},
            "root": model.root,
        }
        order = {x: i for i, x in enumerate(model.states)}
        if model.kind == KRIPKE:
            data["transitions"] = {x: sorted(model.structure[x], key=order.get) for x in model.states}
        elif model.kind == GRADED:
            data["weights"] = {x: dict(model.structure[x]) for x in model.states}
        elif model.kind == PROBABILISTIC:
            data["dist"] = {
                x: {y: _rational_text(m) for y, m in model.structure[x].items()} for x in model.states
            }
        elif model.kind == MONOTONE:
            data["neighborhoods"] = {
                x: sorted((sorted(g, key=order.get) for g in model.structure[x]), key=lambda g: (len(g), g))
                for x in model.states
            }
        else:
            data["agents"] = model.agents
            data["strategies"] = {x: list(model.structure[x].sizes) for x in model.states}
            data["outcome"] = {
                x: {",".join(str(i) for i in p): y for p, y in sorted(model.structure[x].outcome.items())}
                for x in model.states
            }
        return cls(**data)
