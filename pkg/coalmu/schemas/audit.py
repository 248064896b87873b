# coalmu/schemas/audit.py
from pydantic import BaseModel
from typing import Dict, List, Optional


class AuditCounterexample(BaseModel):
    atoms: List[str]
    carrier: int
    valuation: Dict[str, List[int]]
    rule: str


class AuditReport(BaseModel):
    logic: str
    samples: int
    coefficient_bound: Optional[int] = None
    soundness_counterexamples: List[AuditCounterexample] = []
    completeness_counterexamples: List[AuditCounterexample] = []
    notes: List[str] = []

    @property
    def clean(self) -> bool:
        return not self.soundness_counterexamples and not self.completeness_counterexamples
