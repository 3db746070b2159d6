from __future__ import annotations

from enum import Enum


class BracketKind(str, Enum):
    VLASOV_MAXWELL = "VlasovMaxwell"
    VLASOV_MAXWELL_MONOPOLE = "VlasovMaxwellMonopole"
    TWO_PARTICLE = "TwoParticle"
    PARTICLE_IN_EXTERNAL_FIELD = "ParticleInExternalField"

    @property
    def is_field_theory(self) -> bool:
        return self in (BracketKind.VLASOV_MAXWELL, BracketKind.VLASOV_MAXWELL_MONOPOLE)


class BracketError(ValueError):
    pass
