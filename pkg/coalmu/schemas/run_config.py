# coalmu/schemas/run_config.py
from pydantic import BaseModel, ConfigDict, field_validator
from typing import Optional

from coalmu.core.config import get_settings
from coalmu.core.onestep import CoefficientBounds
from coalmu.core.signature import Signature, parse_logic

settings = get_settings()


class RunConfig(BaseModel):
    """Per-invocation options; unset limits fall back to the settings"""

    logic: str = "k"
    coeff_bound: Optional[int] = None
    max_positions: Optional[int] = None
    max_states: Optional[int] = None
    emit_model: Optional[str] = None
    emit_tableau: Optional[str] = None
    dump_arena: Optional[str] = None
    dump_automaton: Optional[str] = None
    stats: bool = False

    model_config = ConfigDict(extra="forbid")

    @field_validator("coeff_bound", "max_positions", "max_states")
    @classmethod
    def positive(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("bounds must be positive")
        return value

    def signature(self) -> Signature:
        return parse_logic(self.logic)

    def bounds(self) -> CoefficientBounds:
        return CoefficientBounds(self.coeff_bound)

    @property
    def position_ceiling(self) -> int:
        return self.max_positions or settings.MAX_POSITIONS

    @property
    def state_cap(self) -> int:
        return self.max_states or settings.MAX_MODEL_STATES
