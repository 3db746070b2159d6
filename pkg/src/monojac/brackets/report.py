from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

from ..polyalg import Polynomial


@dataclass
class JacobiReport:
    """Direct (nested-bracket) and closed-form Jacobi residuals side by side.

    In the exact tier the residuals are polynomials and ``discrepancy`` is
    their exact difference; in the grid tier they are floats.
    """

    tier: str
    kind: str
    direct_residual: object
    closed_form_residual: object
    discrepancy: object
    components: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def passed_exact(self) -> bool:
        return isinstance(self.discrepancy, Polynomial) and self.discrepancy.is_zero()

    @property
    def relative_discrepancy(self) -> float:
        if self.tier != "grid":
            return 0.0 if self.passed_exact else float("inf")
        scale = abs(self.closed_form_residual)
        if scale == 0:
            return float("inf") if self.discrepancy else 0.0
        return abs(self.discrepancy) / scale

    def to_dict(self) -> dict:
        def conv(v):
            if isinstance(v, Polynomial):
                return {"polynomial": str(v), "variables": list(v.variables), "is_zero": v.is_zero()}
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            return v

        d = conv(asdict(self))
        d["relative_discrepancy"] = self.relative_discrepancy if self.tier == "grid" else None
        return d
