"""Coupling parameters: matter central charge c_m, background charge q, gamma.

The three are tied together by c_m = 25 - 6 q^2 and, when c_m <= 1,
q = 2/gamma + gamma/2 with gamma in (0, 2].
"""
import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class Params:
    c_m: float
    q: float
    gamma: float | None = None

    def __post_init__(self):
        if not self.c_m < 25.0:
            raise DomainError(f"c_m must be < 25, got {self.c_m}")
        if not self.q > 0.0:
            raise DomainError(f"q must be > 0, got {self.q}")
        if abs(self.c_m - (25.0 - 6.0 * self.q * self.q)) > 1e-12 * max(1.0, abs(self.c_m)):
            raise DomainError(f"inconsistent (c_m, q) = ({self.c_m}, {self.q})")
        if self.c_m <= 1.0:
            g = self.gamma
            if g is None:
                raise DomainError("gamma required when c_m <= 1")
            if not (0.0 < g <= 2.0):
                raise DomainError(f"gamma must lie in (0, 2], got {g}")
            if abs(self.q - (2.0 / g + g / 2.0)) > 1e-12 * max(1.0, self.q):
                raise DomainError(f"inconsistent (q, gamma) = ({self.q}, {g})")
        elif self.gamma is not None:
            raise DomainError("gamma undefined for c_m in (1, 25)")

    @property
    def supercritical(self) -> bool:
        """True in the q in (0,2) phase where singularities proliferate."""
        return self.q < 2.0


def params_from_cm(c_m: float) -> Params:
    """Resolve q (and gamma, when defined) from the matter central charge."""
    if not c_m < 25.0:
        raise DomainError(
            f"c_m must be < 25 (q would be non-positive or zero), got {c_m}")
    q = math.sqrt((25.0 - c_m) / 6.0)
    gamma = None
    if c_m <= 1.0:
        # root of g^2/2 - q g + 2 = 0 lying in (0, 2]
        gamma = q - math.sqrt(q * q - 4.0)
        # re-derive c_m so the dataclass consistency check passes exactly
        return Params(c_m=c_m, q=q, gamma=gamma)
    return Params(c_m=c_m, q=q)


def params_from_q(q: float) -> Params:
    """Resolve c_m (and gamma, when defined) from the background charge."""
    if not q > 0.0:
        raise DomainError(f"q must be > 0, got {q}")
    c_m = 25.0 - 6.0 * q * q
    gamma = None
    if q >= 2.0:
        gamma = q - math.sqrt(q * q - 4.0)
    return Params(c_m=c_m, q=q, gamma=gamma)
