# coalmu/core/signature.py
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Optional, Union

from coalmu.core.exceptions import SignatureError

KRIPKE = "kripke"
GRADED = "graded"
PROBABILISTIC = "probabilistic"
COALITION = "coalition"
MONOTONE = "monotone"

KINDS = (KRIPKE, GRADED, PROBABILISTIC, COALITION, MONOTONE)

# command-line spellings of the logic selector
LOGIC_ALIASES = {
    "k": KRIPKE,
    "kripke": KRIPKE,
    "graded": GRADED,
    "prob": PROBABILISTIC,
    "probabilistic": PROBABILISTIC,
    "monotone": MONOTONE,
}

Index = Union[None, int, Fraction, FrozenSet[int]]


@dataclass(frozen=True)
class Modality:
    """A unary modal operator of one of the built-in logics.

    ``dual`` marks the barred operator, interpreted through the complement
    clause. The unbarred operators are box (kripke, monotone), <n> (graded),
    <p> (probabilistic) and [C] (coalition).
    """

    kind: str
    dual: bool = False
    index: Index = None

    def negated(self) -> "Modality":
        return Modality(self.kind, not self.dual, self.index)

    def base(self) -> "Modality":
        return Modality(self.kind, False, self.index)

    @property
    def is_box_like(self) -> bool:
        """True for the operators that behave like a necessity"""
        if self.kind in (KRIPKE, MONOTONE, COALITION):
            return not self.dual
        return self.dual

    def render(self) -> str:
        if self.kind in (KRIPKE, MONOTONE):
            return "dia" if self.dual else "box"
        if self.kind == GRADED:
            return f"[{self.index}]" if self.dual else f"<{self.index}>"
        if self.kind == PROBABILISTIC:
            index = Fraction(self.index)
            text = f"{index.numerator}/{index.denominator}"
            return f"[{text}]" if self.dual else f"<{text}>"
        agents = ",".join(str(a) for a in sorted(self.index))
        return f"<{{{agents}}}>" if self.dual else f"[{{{agents}}}]"

    def sort_key(self) -> tuple:
        if self.kind == COALITION:
            index_key = tuple(sorted(self.index))
        elif self.index is None:
            index_key = ()
        else:
            index_key = (Fraction(self.index),)
        return (self.kind, self.dual, index_key)

    def size(self) -> int:
        """Size contribution s of the operator, numbers coded in binary"""
        if self.kind == GRADED:
            return _log2_ceil(self.index)
        if self.kind == PROBABILISTIC:
            index = Fraction(self.index)
            return _log2_ceil(index.numerator) + _log2_ceil(index.denominator) + 1
        if self.kind == COALITION:
            return 1
        return 0

    def __str__(self) -> str:
        return self.render()


def _log2_ceil(value: int) -> int:
    # ceil(log2 0) is undefined and costs nothing
    if value <= 1:
        return 0
    return (value - 1).bit_length()


@dataclass(frozen=True)
class Signature:
    kind: str
    agents: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SignatureError(f"Unknown logic {self.kind!r}")
        if self.kind == COALITION and (self.agents is None or self.agents < 1):
            raise SignatureError("Coalition logic needs at least one agent")

    @property
    def grand_coalition(self) -> FrozenSet[int]:
        return frozenset(range(1, (self.agents or 0) + 1))

    def validate(self, op: Modality) -> None:
        """Reject operators outside the signature"""
        if op.kind != self.kind:
            raise SignatureError(f"Modality {op} does not belong to the {self.kind} logic")
        if self.kind == GRADED:
            if not isinstance(op.index, int) or op.index < 0:
                raise SignatureError(f"Graded index must be a natural number, got {op.index}")
        elif self.kind == PROBABILISTIC:
            if not 0 <= Fraction(op.index) <= 1:
                raise SignatureError(f"Probabilistic index {op.index} outside [0,1]")
        elif self.kind == COALITION:
            if not set(op.index) <= self.grand_coalition:
                raise SignatureError(
                    f"Coalition {sorted(op.index)} is not a subset of agents 1..{self.agents}"
                )

    def box(self, index: Index = None) -> Modality:
        return Modality(self.kind, False, index)

    def dia(self, index: Index = None) -> Modality:
        return Modality(self.kind, True, index)

    def label(self) -> str:
        if self.kind == COALITION:
            return f"coalition:{self.agents}"
        return self.kind


def parse_logic(selector: str) -> Signature:
    """Turn a --logic selector into a signature"""
    selector = selector.strip().lower()
    if selector.startswith("coalition"):
        _, _, count = selector.partition(":")
        try:
            agents = int(count)
        except ValueError:
            raise SignatureError(f"Coalition selector needs an agent count, got {selector!r}")
        return Signature(COALITION, agents)
    if selector not in LOGIC_ALIASES:
        raise SignatureError(f"Unknown logic {selector!r}")
    return Signature(LOGIC_ALIASES[selector])
