"""Result records shared by the density backends."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace


class DensityMethod(str, enum.Enum):
    """Which backend produced a density value."""

    NOLAN_INTEGRAL = "nolan_integral"
    FOURIER_FALLBACK = "fourier_fallback"
    GAUSSIAN_EXACT = "gaussian_exact"


@dataclass(frozen=True)
class DensityResult:
    """A density (or density derivative) value with its provenance."""

    value: float
    abs_error: float
    method: DensityMethod
    converged: bool = True
    n_evals: int = 0

    def scaled(self, factor: float) -> DensityResult:
        """Multiply value and error by a constant."""
        return replace(
            self, value=self.value * factor, abs_error=self.abs_error * abs(factor)
        )

    def negated(self) -> DensityResult:
        """Flip the sign of the value."""
        return replace(self, value=-self.value)
