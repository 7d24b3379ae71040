"""Molecule-number statistics under repeated sweeps, pumping and loss.

Atom pairs are injected at rate r_a; each injection converts n -> n + 1
molecules with the sweep transfer probability |D2(n)|^2, and molecules are
lost at rate gamma per molecule.  The number distribution p_n then obeys a
birth-death rate equation with birth rates r_a |D2(n)|^2 and death rates
gamma n, whose stationary solution follows from detailed balance:

    p_n = p_0 * prod_{l=1..n} |D2(l-1)|^2 N_ex / l,      N_ex = r_a / gamma.

With perfect transfer (|D2|^2 = 1) this is a Poisson distribution of mean
N_ex, i.e. the number statistics of a coherent molecular field; imperfect
transfer drags the mean below N_ex and distorts the statistics, which is
what the Mandel Q factor and the total-variation distance from Poisson
quantify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import survival_probability
from .model import PhysicalParams, block_coeffs
from .tdse import in_regime

__all__ = [
    "TailMassError",
    "PumpLossParams",
    "TransitionTable",
    "NumberDistribution",
    "OutputStats",
    "minimum_levels",
    "transition_table",
    "steady_state",
    "master_rhs",
    "evolve_master",
    "statistics",
    "poisson_pmf",
    "feasibility_notes",
    "TAIL_MASS_LIMIT",
]

# Maximum occupancy allowed on the top truncation level of a steady state.
TAIL_MASS_LIMIT = 1e-8


class TailMassError(RuntimeError):
    """The truncation level holds too much probability; raise n_max."""


def minimum_levels(n_ex: float) -> int:
    """Truncation adequate for a distribution of mean ~ n_ex.

    ceil(n_ex + 10 sqrt(n_ex)) + 5 puts the boundary ten standard
    deviations beyond a Poisson bulk; n_ex = 0 needs no levels at all.
    """
    if not math.isfinite(n_ex):
        raise ValueError("n_ex is unbounded; choose n_max explicitly")
    if n_ex < 0.0:
        raise ValueError("n_ex must be non-negative")
    if n_ex == 0.0:
        return 0
    return math.ceil(n_ex + 10.0 * math.sqrt(n_ex)) + 5


@dataclass(frozen=True)
class PumpLossParams:
    """Pumping and loss rates with their truncation level.

    n_ex = r_a / gamma is the only combination the stationary state depends
    on.  tau, when known, is the idle period between injection pulses and is
    kept for feasibility reporting only.
    """

    gamma: float
    r_a: float
    n_max: int
    tau: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.r_a)):
            raise ValueError("rates must be finite")
        if self.gamma < 0.0:
            raise ValueError("dissipation rate gamma must be non-negative")
        if self.r_a < 0.0:
            raise ValueError("pumping rate r_a must be non-negative")
        if self.gamma == 0.0:
            # no stationary state: n_ex is unbounded, truncation is caller's call
            if self.n_max < 1:
                raise ValueError("gamma = 0 (pure pumping) needs an explicit n_max >= 1")
            return
        needed = minimum_levels(self.n_ex)
        if self.n_max < needed:
            raise ValueError(
                f"n_max = {self.n_max} is below the adequate truncation "
                f"{needed} for n_ex = {self.n_ex:g}"
            )

    @property
    def n_ex(self) -> float:
        if self.gamma == 0.0:
            return math.inf if self.r_a > 0.0 else 0.0
        return self.r_a / self.gamma

    @classmethod
    def from_rates(cls, gamma: float, r_a: float,
                   n_max: int | None = None) -> "PumpLossParams":
        if n_max is None:
            n_max = minimum_levels(r_a / gamma if gamma > 0.0 else math.inf)
        return cls(gamma=gamma, r_a=r_a, n_max=n_max)

    @classmethod
    def from_n_ex(cls, gamma: float, n_ex: float,
                  n_max: int | None = None) -> "PumpLossParams":
        if gamma <= 0.0:
            raise ValueError("n_ex = r_a / gamma needs gamma > 0")
        if n_max is None:
            n_max = minimum_levels(n_ex)
        return cls(gamma=gamma, r_a=n_ex * gamma, n_max=n_max)

    @classmethod
    def from_pulse(cls, gamma: float, t_ramp: float, tau: float,
                   n_max: int | None = None) -> "PumpLossParams":
        """Pulsed pumping: rate 1/(t_ramp + tau) for pulses of length t_ramp
        separated by tau."""
        if t_ramp < 0.0 or tau <= 0.0:
            raise ValueError("need t_ramp >= 0 and tau > 0")
        r_a = 1.0 / (t_ramp + tau)
        if n_max is None:
            n_max = minimum_levels(r_a / gamma if gamma > 0.0 else math.inf)
        return cls(gamma=gamma, r_a=r_a, n_max=n_max, tau=tau)


def feasibility_notes(params: PumpLossParams) -> list[str]:
    """Soft warnings on the pulsed-pump coarse graining (never errors)."""
    notes = []
    if params.tau is not None:
        if params.tau > 100.0:
            notes.append(
                f"inter-pulse period tau = {params.tau:g} exceeds ~100 (in 1/chi); "
                "the constant-rate coarse graining becomes questionable")
        if params.tau * params.gamma > 0.3:
            notes.append(
                f"tau = {params.tau:g} is not small against 1/gamma = "
                f"{1.0 / params.gamma:g}; molecules decay appreciably between pulses")
    return notes


@dataclass(frozen=True)
class TransitionTable:
    """Per-level transfer probabilities |D2(n)|^2 with their regime flags."""

    values: np.ndarray
    in_regime: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "in_regime", np.asarray(self.in_regime, dtype=bool))
        if self.values.ndim != 1 or self.values.shape != self.in_regime.shape:
            raise ValueError("values and in_regime must be 1-D and congruent")

    def __len__(self) -> int:
        return len(self.values)


def transition_table(params: PhysicalParams, n_max: int) -> TransitionTable:
    """Transfer probabilities |D2(n)|^2 = 1 - survival for n = 0 .. n_max.

    Levels where the closed form's regime condition k +- a(n) >= 10 c(n)
    fails are still computed but flagged False, so a consumer can tell which
    entries rest on the asymptotic number-state identification.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    values = np.empty(n_max + 1)
    flags = np.empty(n_max + 1, dtype=bool)
    for n in range(n_max + 1):
        a, c = block_coeffs(n, params)
        s = survival_probability(a, params.k, c, params.t_ramp)
        values[n] = min(1.0, max(0.0, 1.0 - s))
        flags[n] = in_regime(a, params.k, c)
    return TransitionTable(values=values, in_regime=flags)


def _table_values(table) -> np.ndarray:
    values = table.values if isinstance(table, TransitionTable) else np.asarray(table, dtype=float)
    if values.ndim != 1:
        raise ValueError("transition table must be one-dimensional")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValueError("transfer probabilities must lie in [0, 1]")
    return values


@dataclass(frozen=True)
class NumberDistribution:
    """Probability vector p_0 .. p_{n_max} over the molecule number."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-D vector")
        if np.any(probs < -1e-12):
            raise ValueError("probabilities must be non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "probs", np.where(probs < 0.0, 0.0, probs))

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def tail_mass(self) -> float:
        return float(self.probs[-1])

    def mean(self) -> float:
        return float(np.arange(self.probs.size) @ self.probs)

    def variance(self) -> float:
        n = np.arange(self.probs.size)
        mu = self.mean()
        return float(((n - mu) ** 2) @ self.probs)


def steady_state(table, params: PumpLossParams) -> NumberDistribution:
    """Stationary distribution of the pump-loss rate equation.

    Detailed balance between the birth flow r_a |D2(n-1)|^2 p_{n-1} and the
    death flow gamma n p_n gives p_n = p_{n-1} |D2(n-1)|^2 N_ex / n.  The
    recursion runs in the log domain (N_ex^n / n! spans hundreds of orders
    of magnitude) and is normalised at the end.  Raises TailMassError if the
    boundary level keeps more than TAIL_MASS_LIMIT of the probability.
    """
    values = _table_values(table)
    if params.gamma == 0.0:
        raise ValueError("no stationary state without dissipation (gamma = 0)")
    n_max = params.n_max
    if len(values) < n_max + 1:
        raise ValueError(
            f"transition table has {len(values)} entries, need n_max + 1 = {n_max + 1}")
    log_p = np.full(n_max + 1, -np.inf)
    log_p[0] = 0.0
    n_ex = params.n_ex
    for n in range(1, n_max + 1):
        step = values[n - 1] * n_ex / n
        if step == 0.0:
            break  # everything above stays empty
        log_p[n] = log_p[n - 1] + math.log(step)
    log_p -= log_p.max()
    probs = np.exp(log_p)
    probs /= probs.sum()
    if n_max > 0 and probs[-1] > TAIL_MASS_LIMIT:
        raise TailMassError(
            f"truncation level n_max = {n_max} holds probability "
            f"{probs[-1]:.3e} > {TAIL_MASS_LIMIT:g}; increase n_max"
        )
    return NumberDistribution(probs=probs)


def master_rhs(probs: np.ndarray, table, params: PumpLossParams) -> np.ndarray:
    """Right-hand side of the number-resolved rate equation.

    dp_n/dt = -r_a |D2(n)|^2 p_n + r_a |D2(n-1)|^2 p_{n-1}
              - gamma n p_n + gamma (n+1) p_{n+1}

    with a reflecting boundary: the birth term out of the top level is
    suppressed, so the total probability is conserved identically.
    """
    probs = np.asarray(probs, dtype=float)
    values = _table_values(table)
    if len(values) < probs.size:
        raise ValueError("transition table shorter than the distribution")
    n = np.arange(probs.size)
    birth = params.r_a * values[:probs.size] * probs
    birth[-1] = 0.0
    rhs = -birth - params.gamma * n * probs
    rhs[1:] += birth[:-1]
    rhs[:-1] += params.gamma * n[1:] * probs[1:]
    return rhs


def evolve_master(initial: NumberDistribution, table, params: PumpLossParams,
                  horizon: float, dt: float) -> NumberDistribution:
    """Explicit-Euler evolution of the rate equation over the given horizon.

    dt must respect the stability bound 0.1 / (gamma n_max + r_a); the
    request is rejected before integrating otherwise.  Probability is
    conserved by construction and checked to 1e-9 at the end.
    """
    if horizon < 0.0:
        raise ValueError("horizon must be non-negative")
    if dt <= 0.0:
        raise ValueError("time step must be positive")
    limit = 0.1 / (params.gamma * params.n_max + params.r_a)
    if dt > limit:
        raise ValueError(
            f"dt = {dt:g} violates the explicit-scheme stability bound {limit:g}")
    values = _table_values(table)
    if len(values) < params.n_max + 1:
        raise ValueError("transition table shorter than n_max + 1")
    probs = initial.probs.copy()
    if probs.size != params.n_max + 1:
        raise ValueError(
            f"initial distribution has {probs.size} levels, expected {params.n_max + 1}")
    n_steps, remainder = divmod(horizon, dt)
    for _ in range(int(n_steps)):
        probs += dt * master_rhs(probs, values, params)
    if remainder > 0.0:
        probs += remainder * master_rhs(probs, values, params)
    drift = abs(float(probs.sum()) - 1.0)
    if drift > 1e-9:
        raise TailMassError(
            f"probability drifted by {drift:.3e} over the horizon; "
            "the evolution is numerically unreliable"
        )
    return NumberDistribution(probs=np.clip(probs, 0.0, None) / probs.sum())


def poisson_pmf(mean: float, n_max: int) -> np.ndarray:
    """Poisson probabilities for n = 0 .. n_max, log-domain for large means."""
    if mean == 0.0:
        pmf = np.zeros(n_max + 1)
        pmf[0] = 1.0
        return pmf
    n = np.arange(n_max + 1, dtype=float)
    log_pmf = n * math.log(mean) - mean - np.array(
        [math.lgamma(v + 1.0) for v in n])
    return np.exp(log_pmf)


@dataclass(frozen=True)
class OutputStats:
    """Counting statistics of the molecular output.

    mandel_q is None for an empty (zero-mean) distribution rather than NaN.
    tv_poisson is the exact total-variation distance to a Poisson law of the
    same mean, including the Poisson tail beyond the truncation.
    """

    mean: float
    variance: float
    mandel_q: float | None
    tv_poisson: float
    linewidth: float


def statistics(dist: NumberDistribution, gamma: float, n_ex: float) -> OutputStats:
    """Mean, variance, Mandel Q, Poisson distance and output linewidth.

    Q = variance/mean - 1 vanishes for Poissonian counting (Q > 0 flags
    super-Poissonian output).  The linewidth of the coherent molecular field
    is 9 gamma / N_ex, narrowing as the pump-to-loss ratio grows.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if n_ex < 0.0:
        raise ValueError("n_ex must be non-negative")
    mean = dist.mean()
    variance = dist.variance()
    mandel_q = (variance / mean - 1.0) if mean > 0.0 else None
    pois = poisson_pmf(mean, dist.n_max)
    tv = 0.5 * (float(np.abs(dist.probs - pois).sum()) + (1.0 - float(pois.sum())))
    linewidth = 9.0 * gamma / n_ex if n_ex > 0.0 else math.inf
    return OutputStats(mean=mean, variance=variance, mandel_q=mandel_q,
                       tv_poisson=min(1.0, max(0.0, tv)), linewidth=linewidth)
