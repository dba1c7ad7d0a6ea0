from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from udd_lab.exceptions import InvalidParameterError

LETTERS = ("0", "z")
KINDS = ("sin", "cos")


@dataclass(frozen=True)
class AlphaWord:
    """Letters α₁ … α_n over {0, z}; α₁ is the innermost (earliest) integral."""
    letters: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        if len(self.letters) < 1:
            raise InvalidParameterError("an AlphaWord needs at least one letter")
        bad = [c for c in self.letters if c not in LETTERS]
        if bad:
            raise InvalidParameterError(f"letters must be '0' or 'z', got {bad}")

    @classmethod
    def parse(cls, text: str) -> "AlphaWord":
        return cls(tuple(text.replace(",", "").replace(" ", "")))

    @property
    def order(self) -> int:
        return len(self.letters)

    @property
    def z_count(self) -> int:
        return self.letters.count("z")

    def __str__(self) -> str:
        return "".join(self.letters)


@dataclass(frozen=True)
class TrigTerm:
    """coefficient · kind((q + r·N̄)θ); N̄ is supplied by the caller."""
    coefficient: Fraction
    kind: str
    q: int
    r: int

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        if self.kind not in KINDS:
            raise InvalidParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")

    def frequency(self, n_bar: int) -> int:
        return self.q + self.r * n_bar


@dataclass(frozen=True)
class TypeState:
    kind: str
    r_parity: str


@dataclass(frozen=True)
class VanishingReport:
    n_pulses: int
    max_order: int
    timing: str
    words_checked: int
    max_abs_f: float
    argmax_word: str
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n_pulses": self.n_pulses,
            "max_order": self.max_order,
            "timing": self.timing,
            "words_checked": self.words_checked,
            "max_abs_F": self.max_abs_f,
            "argmax_word": self.argmax_word,
            "pass": self.passed,
        }
