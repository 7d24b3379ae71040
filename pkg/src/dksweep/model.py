"""Two-level sweep model of photoassociation in a single lattice site.

An atom pair |e> is converted into one molecule of a bosonic mode b by a
Raman coupling chi while the two-photon detuning is swept through resonance
as a hyperbolic tangent of time.  Because the coupling moves exactly one
excitation between the pair state and the molecule mode, the Hamiltonian is
block diagonal over two-dimensional invariant subspaces

    V_n = span{ |e, n>, |g, n+1> },    n = 0, 1, 2, ...

and the sweep dynamics can be solved subspace by subspace.  This module
holds the parameter set, the detuning profile, the full (truncated) matrix,
and its reduction to a single 2x2 block.

Units: chi sets the energy unit and 1/chi the time unit; every parameter
below is dimensionless in these units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalParams",
    "BlockSystem",
    "detuning",
    "block_coeffs",
    "block_hamiltonian",
    "full_hamiltonian",
    "reduce_to_block",
    "pair_indices",
    "unpaired_indices",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Model constants, all in units of chi.

    omega_b and omega_f are the bare energies of the atom pair and of one
    molecule, u_f / u_x / u_b the pair-pair, pair-molecule and
    molecule-molecule interaction strengths.  k is the sweep amplitude
    (half the total detuning swing) and t_ramp the sweep timescale: the
    detuning crosses resonance over a window of a few t_ramp around t = 0,
    saturating to within 4% of its asymptotes by |t| = 2 t_ramp.
    """

    omega_b: float = 0.0
    omega_f: float = 0.0
    u_f: float = 0.0
    u_x: float = 0.0
    u_b: float = 0.0
    chi: float = 1.0
    k: float = 20.0
    t_ramp: float = 1.0

    def __post_init__(self):
        values = (self.omega_b, self.omega_f, self.u_f, self.u_x, self.u_b,
                  self.chi, self.k, self.t_ramp)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("all model parameters must be finite")
        if self.chi <= 0.0:
            raise ValueError("chi must be positive; it defines the unit of energy")
        if self.k <= 0.0:
            raise ValueError("sweep amplitude k must be positive")
        if self.t_ramp < 0.0:
            raise ValueError("sweep timescale t_ramp must be non-negative")

    @property
    def m_scatter(self) -> float:
        """Scattering combination u_x - u_b/2 that offsets the block diagonal."""
        return self.u_x - 0.5 * self.u_b

    @property
    def detuning_base(self) -> float:
        """Static part of the detuning, 2*omega_f - omega_b + u_f."""
        return 2.0 * self.omega_f - self.omega_b + self.u_f

    @property
    def Omega_f(self) -> float:
        """Dressed pair energy omega_f + u_f/2."""
        return self.omega_f + 0.5 * self.u_f

    def Omega_b(self, t: float) -> float:
        """Dressed molecule energy omega_b + Delta(t) + u_x (time dependent)."""
        return self.omega_b + float(detuning(t, self)) + self.u_x


def detuning(t, params: PhysicalParams):
    """Two-photon detuning Delta(t) = detuning_base - 2k tanh(t / t_ramp).

    Saturates to detuning_base -/+ 2k as t -> +/- infinity.  A zero t_ramp
    degenerates to a hard step, sign(t) replacing tanh (with sign(0) = 0).
    Accepts scalars or arrays of times.
    """
    t = np.asarray(t, dtype=float)
    if params.t_ramp == 0.0:
        profile = np.sign(t)
    else:
        profile = np.tanh(t / params.t_ramp)
    delta = params.detuning_base - 2.0 * params.k * profile
    return float(delta) if delta.ndim == 0 else delta


def block_coeffs(n_b: int, params: PhysicalParams) -> tuple[float, float]:
    """Diagonal offset a and coupling c of the invariant subspace V_{n_b}.

    a(n_b) = n_b (u_x - u_b/2) and c(n_b) = chi sqrt(n_b + 1); c grows with
    the molecule number through bosonic enhancement and never vanishes.
    """
    if n_b < 0:
        raise ValueError(f"molecule number n_b must be non-negative, got {n_b}")
    a = n_b * params.m_scatter
    c = params.chi * math.sqrt(n_b + 1.0)
    return a, c


@dataclass(frozen=True)
class BlockSystem:
    """One invariant subspace: |e, n_b> paired with |g, n_b + 1>."""

    n_b: int
    a: float
    c: float
    params: PhysicalParams

    @classmethod
    def from_params(cls, params: PhysicalParams, n_b: int) -> "BlockSystem":
        a, c = block_coeffs(n_b, params)
        return cls(n_b=n_b, a=a, c=c, params=params)

    def hamiltonian(self, t: float) -> np.ndarray:
        return block_hamiltonian(self, t)


def _profile_scalar(t: float, t_ramp: float) -> float:
    if t_ramp == 0.0:
        return math.copysign(1.0, t) if t != 0.0 else 0.0
    return math.tanh(t / t_ramp)


def block_hamiltonian(sys: BlockSystem, t: float) -> np.ndarray:
    """Traceless 2x2 block of the sweep Hamiltonian in V_{n_b}.

    In the ordered basis (|e, n_b>, |g, n_b+1>):

        [[ d(t),  c   ],
         [ c,    -d(t)]]      with d(t) = a + k tanh(t / t_ramp).

    Hermitian and traceless by construction; the constant (trace) part of
    the exact block only contributes a global phase and is dropped (see
    reduce_to_block for the consistency check against the full matrix).
    """
    d = sys.a + sys.params.k * _profile_scalar(t, sys.params.t_ramp)
    return np.array([[d, sys.c], [sys.c, -d]], dtype=complex)


def pair_indices(n_b: int) -> tuple[int, int]:
    """Row/column indices of (|e, n_b>, |g, n_b+1>) in the full matrix basis."""
    if n_b < 0:
        raise ValueError(f"molecule number n_b must be non-negative, got {n_b}")
    return 2 * n_b + 1, 2 * n_b + 2


def unpaired_indices(n_max: int) -> tuple[int, int]:
    """Indices of the truncation edge states |g, 0> and |e, n_max>.

    These two states have no sweep partner inside the truncated ladder and
    are carried as 1x1 blocks; block operations require n_b < n_max.
    """
    if n_max < 1:
        raise ValueError(f"truncation level n_max must be at least 1, got {n_max}")
    return 0, 2 * n_max + 1


def full_hamiltonian(n_max: int, t: float, params: PhysicalParams) -> np.ndarray:
    """Full sweep Hamiltonian truncated at n_max molecules.

    Ordered basis {|g,0>, |e,0>, |g,1>, |e,1>, ..., |g,n_max>, |e,n_max>},
    dimension 2 (n_max + 1).  Diagonal entries carry the molecule-mode
    energy, the pair energy and both interaction shifts; the only
    off-diagonal entries are the couplings chi sqrt(n+1) between |e, n> and
    |g, n+1>, so the matrix is block diagonal over the V_n plus the two
    unpaired edge states.
    """
    if n_max < 1:
        raise ValueError(f"truncation level n_max must be at least 1, got {n_max}")
    dim = 2 * (n_max + 1)
    h = np.zeros((dim, dim), dtype=complex)
    omega_b_dressed = params.Omega_b(t)
    omega_f_dressed = params.Omega_f
    for n in range(n_max + 1):
        mode_energy = omega_b_dressed * n + 0.5 * params.u_b * n * (n - 1)
        # sigma_z eigenvalue: -1 on |g, n>, +1 on |e, n>
        h[2 * n, 2 * n] = mode_energy - (omega_f_dressed + params.u_x * n)
        h[2 * n + 1, 2 * n + 1] = mode_energy + (omega_f_dressed + params.u_x * n)
    for n in range(n_max):
        i, j = pair_indices(n)
        h[i, j] = h[j, i] = params.chi * math.sqrt(n + 1.0)
    return h


def reduce_to_block(full: np.ndarray, n_b: int) -> np.ndarray:
    """Extract V_{n_b} from a full matrix and remove the mean diagonal.

    Subtracting the mean of the two diagonal entries is a multiple of the
    identity inside the subspace and therefore a pure global phase in the
    dynamics; the result matches block_hamiltonian entrywise.
    """
    full = np.asarray(full)
    if full.ndim != 2 or full.shape[0] != full.shape[1]:
        raise ValueError("expected a square matrix")
    if n_b < 0:
        raise ValueError(f"molecule number n_b must be non-negative, got {n_b}")
    i, j = pair_indices(n_b)
    if j >= full.shape[0]:
        raise IndexError(
            f"subspace V_{n_b} lies outside a matrix truncated at "
            f"n_max = {full.shape[0] // 2 - 1}; need n_b < n_max"
        )
    block = np.array([[full[i, i], full[i, j]], [full[j, i], full[j, j]]],
                     dtype=complex)
    shift = 0.5 * (block[0, 0] + block[1, 1])
    block[0, 0] -= shift
    block[1, 1] -= shift
    return block
