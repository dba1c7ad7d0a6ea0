from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class BathModel:
    """Bath operators of H = I⊗B₀ + σ_z⊗B_z with certified sup-norms J₀, J_z.

    Validation lives in simulator_service.make_bath.
    """
    b0: np.ndarray
    bz: np.ndarray
    j0: float
    jz: float

    @property
    def dim(self) -> int:
        return self.b0.shape[0]


@dataclass(frozen=True, eq=False)
class SplitPropagator:
    """U(T) = I⊗B₊ + σ_z⊗B₋."""
    b_plus: np.ndarray
    b_minus: np.ndarray

    @property
    def dim(self) -> int:
        return self.b_plus.shape[0]


@dataclass(frozen=True)
class CorrelationFunctions:
    """b_αβ = tr[B_α ρ_B B_β†] for α, β ∈ {+, −}."""
    b_pp: complex
    b_pm: complex
    b_mp: complex
    b_mm: complex

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.b_pp, self.b_pm], [self.b_mp, self.b_mm]], dtype=complex)
