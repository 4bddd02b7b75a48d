import json
import logging
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, validator

from lattice.fock import Params, State, format_rational

logger = logging.getLogger(__name__)

STATUSES = ("pass", "fail", "skipped")


class Check(BaseModel):
    name: str
    suite: str = ""
    anchor: Optional[str] = None
    status: str
    witness: Dict[str, Any] = Field(default_factory=dict)
    informational: bool = False
    timing_ms: Optional[float] = None

    @validator("status")
    def validate_status(cls, v):
        if v not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        return v

    class Config:
        extra = "forbid"

    @property
    def failed(self) -> bool:
        return self.status == "fail" and not self.informational


class Report(BaseModel):
    tool_version: str
    config: Dict[str, Any] = Field(default_factory=dict)
    checks: List[Check] = Field(default_factory=list)

    class Config:
        extra = "forbid"

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    def summary(self) -> Dict[str, int]:
        counts = {s: 0 for s in STATUSES}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    def to_json(self, timings: bool = False) -> str:
        data = self.dict()
        if not timings:
            for c in data["checks"]:
                c.pop("timing_ms", None)
        data["summary"] = self.summary()
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def rational(x) -> str:
    return format_rational(Fraction(x))


def state_terms(s: State, P: Params) -> List[str]:
    """Coefficient·monomial strings in the deterministic basis order."""
    return [f"{rational(c)} {m.format()}" for m, c in s.ordered(P)]


def make_check(name: str, ok: bool, anchor: Optional[str] = None, **witness) -> Check:
    return Check(name=name, anchor=anchor, status="pass" if ok else "fail", witness=witness)


def skipped(name: str, reason: str, anchor: Optional[str] = None) -> Check:
    return Check(name=name, anchor=anchor, status="skipped", witness={"reason": reason})


def run_check(name: str, body: Callable[[], Tuple[bool, Dict]], anchor: Optional[str] = None) -> Check:
    """Run one check; exceptions become failures with the error as witness.

    Without an anchor the suite stamps its own when the report is assembled.
    """
    started = time.perf_counter()
    try:
        ok, witness = body()
        result = make_check(name, ok, anchor, **witness)
    except Exception as e:
        logger.error(f"check {name} raised: {e}")
        result = make_check(name, False, anchor, error=f"{type(e).__name__}: {e}")
    result.timing_ms = round((time.perf_counter() - started) * 1000, 1)
    if result.failed:
        logger.error(f"check {name} failed: {result.witness}")
    return result
