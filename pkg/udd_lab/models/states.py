from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated density matrix. Build it with linops.as_density."""
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CorrelationCheck:
    lhs: float
    rhs: float
    margin: float
    holds: bool
