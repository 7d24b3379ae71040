"""Closed-form transition probabilities for the tanh-detuning sweep.

For a two-level system with Hamiltonian diag(d, -d) + off-diagonal c, where
d(t) = a + k tanh(t / T), the probability of remaining in the initial
asymptotic branch after a full sweep is an exact ratio of hyperbolic sines,

    survival = sinh(pi T E+) sinh(pi T E-) / (sinh(pi T E_a) sinh(pi T E_e)),

built from four characteristic energies

    E_a = sqrt((a - k)^2 + c^2),   E_e = sqrt((a + k)^2 + c^2),
    E+- = k +- (E_e - E_a) / 2.

The functions here evaluate that ratio over the whole parameter range
(log-domain for arguments that overflow sinh, series limits for the
degenerate corners), the Landau-Zener exponential it reduces to for slow
linear crossings, and the entanglement entropy of the resulting atom-
molecule superposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import PhysicalParams, block_coeffs

__all__ = [
    "CharacteristicEnergies",
    "TransitionResult",
    "characteristic_energies",
    "survival_probability",
    "lz_limit",
    "entanglement_entropy",
    "molecular_probability",
    "ENTROPY_MODES",
]

# Arguments above this overflow double-precision sinh (sinh(710) ~ 1.1e308).
_LOG_DOMAIN_CUTOFF = 700.0
# Below this the ratio sinh(x)/sinh(y) equals x/y to better than 1e-16.
_SMALL_ARG_CUTOFF = 1e-8

ENTROPY_MODES = ("amplitude", "probability")


@dataclass(frozen=True)
class CharacteristicEnergies:
    """The four energies that parametrise the sweep transition probability.

    They satisfy e_a - e_minus = e_e - e_plus = (e_a + e_e)/2 - k, which is
    strictly positive whenever c != 0 and makes both sinh ratios below one.
    """

    e_a: float
    e_e: float
    e_plus: float
    e_minus: float


def characteristic_energies(a: float, k: float, c: float) -> CharacteristicEnergies:
    """Characteristic energies of a sweep with offset a, amplitude k, coupling c.

    Evaluated in a cancellation-free form: e_minus = k - (e_e - e_a)/2 loses
    all significant digits near |a| ~ k with small c if computed literally,
    so the difference is rebuilt from sums of positive terms using
    e^2 identities.
    """
    if not (math.isfinite(a) and math.isfinite(k) and math.isfinite(c)):
        raise ValueError("characteristic energies need finite a, k, c")
    if k <= 0.0:
        raise ValueError("sweep amplitude k must be positive")
    alpha, cc = abs(a), abs(c)
    e_lo = math.hypot(alpha - k, cc)   # E_a for a >= 0
    e_hi = math.hypot(alpha + k, cc)   # E_e for a >= 0
    s = e_lo + e_hi
    half_gap = 2.0 * alpha * k / s     # exactly (e_hi - e_lo)/2
    e_big = k + half_gap
    # e_lo + e_hi - 2 alpha, assembled without subtractive cancellation
    if cc == 0.0:
        excess = 0.0 if alpha >= k else 2.0 * (k - alpha)
    elif alpha >= k:
        excess = cc * cc / (e_lo + (alpha - k)) + cc * cc / (e_hi + alpha + k)
    else:
        excess = (2.0 * (k - alpha)
                  + cc * cc / (e_lo + (k - alpha))
                  + cc * cc / (e_hi + alpha + k))
    e_small = k * excess / s
    if a >= 0.0:
        return CharacteristicEnergies(e_a=e_lo, e_e=e_hi, e_plus=e_big, e_minus=e_small)
    # a -> -a swaps E_a with E_e and E+ with E-
    return CharacteristicEnergies(e_a=e_hi, e_e=e_lo, e_plus=e_small, e_minus=e_big)


def _log_sinh(x: float) -> float:
    """log(sinh(x)) for x > 0 without overflow: x + log(1 - e^(-2x)) - log 2."""
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def _sinh_ratio(e_num: float, e_den: float, pi_t: float) -> float:
    """sinh(pi_t * e_num) / sinh(pi_t * e_den) for 0 <= e_num <= e_den.

    The three regimes are the zero/small-argument limit (the ratio tends to
    e_num/e_den), the plain quotient, and the log-domain path once the
    denominator argument would overflow.  A doubly degenerate pair
    e_num = e_den = 0 only occurs for c = 0 with |a| = k, where the levels
    are decoupled and nothing is transferred: the ratio is taken as 1.
    """
    if e_den == 0.0:
        return 1.0
    if pi_t == 0.0 or pi_t * e_den < _SMALL_ARG_CUTOFF:
        return e_num / e_den
    x, y = pi_t * e_num, pi_t * e_den
    if y < _LOG_DOMAIN_CUTOFF:
        return math.sinh(x) / math.sinh(y)
    if x == 0.0:
        return 0.0
    return math.exp(_log_sinh(x) - _log_sinh(y))


def survival_probability(a: float, k: float, c: float, t_ramp: float) -> float:
    """Probability of no transition after a full sweep (the |D1|^2 of the model).

    Computed as the product of the two bounded factors

        sinh(pi T E-) / sinh(pi T E_a)  *  sinh(pi T E+) / sinh(pi T E_e),

    each of which lies in [0, 1] because E- <= E_a and E+ <= E_e.  The
    t_ramp = 0 sudden limit is E+ E- / (E_a E_e), which equals the overlap
    of the pre- and post-quench eigenstates.  Total and overflow-free for
    pi T E up to at least 1e6.
    """
    for name, v in (("a", a), ("k", k), ("c", c), ("t_ramp", t_ramp)):
        if not math.isfinite(v):
            raise ValueError(f"survival_probability: {name} must be finite, got {v}")
    if t_ramp < 0.0:
        raise ValueError("sweep timescale t_ramp must be non-negative")
    en = characteristic_energies(a, k, c)
    pi_t = math.pi * t_ramp
    ratio = (_sinh_ratio(en.e_minus, en.e_a, pi_t)
             * _sinh_ratio(en.e_plus, en.e_e, pi_t))
    return min(1.0, max(0.0, ratio))


def lz_limit(a: float, k: float, c: float, t_ramp: float) -> float:
    """Landau-Zener approximation exp[-pi T c^2 / (k (1 - a^2/k^2))].

    The exponent is 2 pi c^2 over the detuning slew rate at the crossing
    time t0 solving a + k tanh(t0/T) = 0, so a crossing must exist inside
    the sweep range: |a| < k.  Accurate against the exact ratio once
    e^(kT) >> 1.
    """
    for name, v in (("a", a), ("k", k), ("c", c), ("t_ramp", t_ramp)):
        if not math.isfinite(v):
            raise ValueError(f"lz_limit: {name} must be finite, got {v}")
    if k <= 0.0:
        raise ValueError("sweep amplitude k must be positive")
    if t_ramp < 0.0:
        raise ValueError("sweep timescale t_ramp must be non-negative")
    if abs(a) >= k:
        raise ValueError(
            f"lz_limit needs |a| < k so the sweep crosses resonance; "
            f"got a={a}, k={k}"
        )
    return math.exp(-math.pi * t_ramp * c * c / (k * (1.0 - (a / k) ** 2)))


def entanglement_entropy(d1_abs: float, d2_abs: float,
                         mode: str = "amplitude") -> float:
    """Entanglement entropy of the final superposition D1|e,n> + D2|g,n+1>.

    "amplitude" mode is -sum |D_i| ln |D_i| over the two Schmidt amplitudes,
    maximal at ln(2)/sqrt(2) ~ 0.4901 for an equal superposition.
    "probability" mode is the conventional binary von Neumann entropy
    -sum |D_i|^2 ln |D_i|^2, maximal at ln 2.
    """
    if mode not in ENTROPY_MODES:
        raise ValueError(f"entropy mode must be one of {ENTROPY_MODES}, got {mode!r}")
    if not (math.isfinite(d1_abs) and math.isfinite(d2_abs)):
        raise ValueError("amplitude moduli must be finite")
    if d1_abs < 0.0 or d2_abs < 0.0:
        raise ValueError("amplitude moduli must be non-negative")
    norm = d1_abs * d1_abs + d2_abs * d2_abs
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(
            f"amplitudes must be normalised: |D1|^2 + |D2|^2 = {norm!r}"
        )
    total = 0.0
    for x in (d1_abs, d2_abs):
        if x > 0.0:
            if mode == "amplitude":
                total -= x * math.log(x)
            else:
                # 2 x^2 log x form avoids log(0) when x^2 underflows
                total -= 2.0 * (x * x) * math.log(x)
    return total


@dataclass(frozen=True)
class TransitionResult:
    """Outcome of one sweep in subspace V_{n_b}.

    d1_sq + d2_sq = 1 by construction and p_mol = d2_sq is the probability
    of having produced one extra molecule.
    """

    energies: CharacteristicEnergies
    d1_sq: float
    d2_sq: float
    p_mol: float
    entropy: float


def molecular_probability(n_b: int, params: PhysicalParams,
                          entropy_mode: str = "amplitude") -> TransitionResult:
    """Molecule-production probability and entropy for subspace V_{n_b}."""
    a, c = block_coeffs(n_b, params)
    en = characteristic_energies(a, params.k, c)
    d1_sq = survival_probability(a, params.k, c, params.t_ramp)
    d2_sq = 1.0 - d1_sq
    entropy = entanglement_entropy(math.sqrt(d1_sq), math.sqrt(d2_sq),
                                   mode=entropy_mode)
    return TransitionResult(energies=en, d1_sq=d1_sq, d2_sq=d2_sq,
                            p_mol=d2_sq, entropy=entropy)
