"""Exact θ-domain integration of the nested dephasing integrals.

With s = sin²(θ/2) every nested integral becomes a sum of terms
c·sin(Mθ) or c·cos(Mθ), M = q + r·N̄ (N̄ = N + 1). An f₀ letter multiplies
the running integrand by sinθ, an f_z letter by sinθ·sin(r_o·N̄·θ) for one
odd Fourier harmonic r_o of the switching function. The Fourier weights
themselves never enter: only the kind of term and the parity of r matter.
Constant prefactors 2 and 4 are absorbed into the integrand.
"""
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from udd_lab.exceptions import InvalidParameterError, SecularTermError
from udd_lab.models.dyson import AlphaWord, TrigTerm, TypeState

logger = logging.getLogger(__name__)

CASE_NAMES = {
    ("cos", False): "i",
    ("sin", False): "ii",
    ("cos", True): "iii",
    ("sin", True): "iv",
}


def _check_term(term: TrigTerm, n_bar: int):
    if n_bar < 2:
        raise InvalidParameterError(f"n_bar must be at least 2, got {n_bar}")
    if abs(term.q) >= n_bar:
        raise InvalidParameterError(f"|q| must be < n_bar={n_bar}, got q={term.q}")
    if term.kind == "cos" and term.r % 2:
        raise InvalidParameterError(f"cosine-type terms carry even r, got r={term.r}")
    if term.kind == "sin" and term.r % 2 == 0:
        raise InvalidParameterError(f"sine-type terms carry odd r, got r={term.r}")


def integration_case(term: TrigTerm, with_fz: bool) -> str:
    """Case label: i/ii for f₀ on cosine/sine, iii/iv for f_z on cosine/sine."""
    return CASE_NAMES[(term.kind, bool(with_fz))]


def integrand_terms(term: TrigTerm, with_fz: bool, r_o: int, n_bar: int) -> List[TrigTerm]:
    """Expand term·sinθ (f₀) or term·sinθ·sin(r_o·N̄·θ) (f_z) into single harmonics."""
    c, q, r = term.coefficient, term.q, term.r
    if not with_fz:
        if term.kind == "cos":
            return [TrigTerm(c, "sin", q + 1, r), TrigTerm(-c, "sin", q - 1, r)]
        return [TrigTerm(c, "cos", q - 1, r), TrigTerm(-c, "cos", q + 1, r)]
    if term.kind == "cos":
        return [
            TrigTerm(c, "cos", q - 1, r + r_o),
            TrigTerm(-c, "cos", q + 1, r + r_o),
            TrigTerm(-c, "cos", q - 1, r - r_o),
            TrigTerm(c, "cos", q + 1, r - r_o),
        ]
    return [
        TrigTerm(c, "sin", q - 1, r + r_o),
        TrigTerm(c, "sin", q + 1, r - r_o),
        TrigTerm(-c, "sin", q + 1, r + r_o),
        TrigTerm(-c, "sin", q - 1, r - r_o),
    ]


def integrate_term(term: TrigTerm, n_bar: int) -> Optional[TrigTerm]:
    """Antiderivative of one harmonic; None for the identically zero sin(0·θ)."""
    k = term.frequency(n_bar)
    if term.kind == "sin":
        if k == 0:
            return None
        return TrigTerm(-term.coefficient / k, "cos", term.q, term.r)
    if k == 0:
        raise SecularTermError(f"cos(0·θ) term {term} integrates to a secular θ term")
    return TrigTerm(term.coefficient / k, "sin", term.q, term.r)


def simplify_terms(terms: Iterable[TrigTerm], n_bar: int) -> List[TrigTerm]:
    """Canonical form: positive frequencies, like terms merged, zeros dropped."""
    merged: Dict[Tuple[str, int, int], Fraction] = defaultdict(Fraction)
    for term in terms:
        k = term.frequency(n_bar)
        kind, q, r, c = term.kind, term.q, term.r, term.coefficient
        if k == 0:
            if kind == "sin":
                continue
            q, r = 0, 0
        elif k < 0:
            q, r = -q, -r
            if kind == "sin":
                c = -c
        merged[(kind, q, r)] += c
    result = [TrigTerm(c, kind, q, r) for (kind, q, r), c in merged.items() if c != 0]
    return sorted(result, key=lambda t: (t.kind, t.frequency(n_bar), t.q))


def trig_integrate(term: TrigTerm, with_fz: bool, r_o: int, n_bar: int) -> List[TrigTerm]:
    """Antiderivative of one integration step (cases i-iv, special cases included)."""
    _check_term(term, n_bar)
    if with_fz and r_o % 2 == 0:
        raise InvalidParameterError(f"r_o must be odd, got {r_o}")
    logger.debug(f"case {integration_case(term, with_fz)} for {term}")
    integrated = [integrate_term(t, n_bar) for t in integrand_terms(term, with_fz, r_o, n_bar)]
    return simplify_terms([t for t in integrated if t is not None], n_bar)


def derivative_terms(terms: Iterable[TrigTerm], n_bar: int) -> List[TrigTerm]:
    result = []
    for term in terms:
        k = term.frequency(n_bar)
        if term.kind == "sin":
            result.append(TrigTerm(term.coefficient * k, "cos", term.q, term.r))
        else:
            result.append(TrigTerm(-term.coefficient * k, "sin", term.q, term.r))
    return simplify_terms(result, n_bar)


def type_automaton(word: AlphaWord) -> TypeState:
    """Kind and r-parity of the output after integrating every letter of `word`."""
    kind, parity = "cos", "even"
    for letter in word.letters:
        if letter == "z":
            kind = "sin" if kind == "cos" else "cos"
            parity = "odd" if parity == "even" else "even"
    return TypeState(kind, parity)


def theta_nested_integral(
    word: AlphaWord, n_bar: int, harmonics: Optional[Sequence[int]] = None
) -> List[TrigTerm]:
    """Nested integral from 0 to θ of the word's integrands, as exact terms.

    `harmonics` supplies the odd harmonic r_o for each f_z letter, innermost
    first; all ones by default.
    """
    if word.order >= n_bar:
        raise InvalidParameterError(f"word order {word.order} must be below n_bar={n_bar}")
    if harmonics is None:
        harmonics = [1] * word.z_count
    if len(harmonics) != word.z_count:
        raise InvalidParameterError(f"need {word.z_count} harmonics, got {len(harmonics)}")
    remaining = iter(harmonics)
    terms = [TrigTerm(Fraction(1), "cos", 0, 0)]
    for letter in word.letters:
        with_fz = letter == "z"
        r_o = next(remaining) if with_fz else 0
        integrated = [out for term in terms for out in trig_integrate(term, with_fz, r_o, n_bar)]
        # lower limit θ = 0 contributes only through cosine terms
        offset = sum((t.coefficient for t in integrated if t.kind == "cos"), Fraction(0))
        terms = simplify_terms(integrated + [TrigTerm(-offset, "cos", 0, 0)], n_bar)
    return terms


def evaluate_at_pi(terms: Iterable[TrigTerm], n_bar: int) -> Fraction:
    """Exact value at θ = π: sin(kπ) = 0, cos(kπ) = (−1)^k."""
    total = Fraction(0)
    for term in terms:
        if term.kind == "cos":
            total += term.coefficient * (-1 if term.frequency(n_bar) % 2 else 1)
    return total
