"""Microcanonical energy shells over noninteracting qudit Hamiltonians,
Haar-typical shell states, and convergence of small reduced states to
Gibbs comparators with the d_s^{2m}/(d_E+1) fluctuation bound.

Site Hamiltonians are diagonal in the computational basis, so the product
energy eigenbasis coincides with the computational basis and shell
membership is a selection of basis indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence, Tuple

import numpy as np

from .states import DensityMatrix, DimensionError, PureState, check_cap, reduced_density
from .tolerances import DEFAULT, Tolerances

ENERGY_SNAP = 1e-12  # energies snapped to this grid before shell membership


class EmptyShellError(ValueError):
    pass


def _snap(E: np.ndarray) -> np.ndarray:
    return np.round(np.asarray(E, dtype=float) / ENERGY_SNAP) * ENERGY_SNAP


@dataclass
class HamiltonianSpec:
    """Free Hamiltonian H = sum_p H_p with per-site spectra in the
    computational basis."""
    d: int
    N: int
    site_spectra: np.ndarray  # (N, d)

    def total_spectrum(self, tol: Tolerances = DEFAULT) -> np.ndarray:
        """All d^N eigenvalues in computational-basis order (qudit 1 most
        significant)."""
        check_cap(self.d ** self.N, tol)
        return _snap(reduce(np.add.outer, self.site_spectra).reshape(-1))

    def subsystem_spectrum(self, sites: Sequence[int]) -> np.ndarray:
        """Eigenvalues of sum of H_p over the given 1-based sites."""
        rows = [self.site_spectra[p - 1] for p in sites]
        return _snap(reduce(np.add.outer, rows).reshape(-1)) if rows else np.zeros(1)


def build_hamiltonian(site_spectra: Sequence[Sequence[float]]) -> HamiltonianSpec:
    spectra = np.asarray(site_spectra, dtype=float)
    if spectra.ndim != 2:
        raise DimensionError("site spectra must be an N x d table")
    N, d = spectra.shape
    return HamiltonianSpec(d=d, N=N, site_spectra=spectra)


@dataclass
class MESShell:
    """Microcanonical shell: energy eigenstates with E in [E_tot - dE, E_tot]."""
    E_tot: float
    dE: float
    d: int
    N: int
    indices: np.ndarray  # member basis indices, ascending

    @property
    def d_E(self) -> int:
        return len(self.indices)

    @property
    def dim(self) -> int:
        return self.d ** self.N

    def isometry(self) -> np.ndarray:
        """dim x d_E selection isometry onto the shell."""
        B = np.zeros((self.dim, self.d_E), dtype=complex)
        B[self.indices, np.arange(self.d_E)] = 1.0
        return B

    def projector_reduced(self, m: int) -> DensityMatrix:
        """Reduced state of the shell-maximally-mixed state on the first m sites."""
        mixed = np.zeros(self.dim)
        mixed[self.indices] = 1.0 / self.d_E
        dm = self.d ** m
        marg = mixed.reshape(dm, -1).sum(axis=1)
        # diagonal since the mixed state is diagonal in a product basis
        return DensityMatrix(dm, np.diag(marg).astype(complex))


def mes_shell(H: HamiltonianSpec, E_tot: float, dE: float,
              tol: Tolerances = DEFAULT) -> MESShell:
    E = H.total_spectrum(tol)
    lo, hi = _snap(np.array([E_tot - dE, E_tot]))
    members = np.nonzero((E >= lo) & (E <= hi))[0]
    if members.size == 0:
        raise EmptyShellError(f"no levels in [{E_tot - dE}, {E_tot}]")
    return MESShell(E_tot=float(E_tot), dE=float(dE), d=H.d, N=H.N, indices=members)


def mes_sample(shell: MESShell, rng: np.random.Generator) -> PureState:
    """Haar-uniform unit vector supported exactly on the shell."""
    z = rng.standard_normal(shell.d_E) + 1j * rng.standard_normal(shell.d_E)
    z /= np.linalg.norm(z)
    amp = np.zeros(shell.dim, dtype=complex)
    amp[shell.indices] = z
    return PureState(shell.d, shell.N, amp)


def level_step(spectrum: np.ndarray) -> float:
    """Median gap between distinct (snapped) levels."""
    uniq = np.unique(_snap(np.asarray(spectrum, dtype=float)))
    if len(uniq) < 2:
        return 0.0
    return float(np.median(np.diff(uniq)))


def estimate_beta(spectrum: np.ndarray, E: float,
                  width: Optional[float] = None, step: Optional[float] = None) -> float:
    """Inverse temperature as the log-derivative of the smoothed density of
    states at E.

    The level counting measure is smoothed with a Gaussian kernel (default
    width: twice the mean level spacing) and differentiated by a central
    log-difference over one distinct-level gap.  At desk scale the density
    of states is a step function, so the estimate depends on these
    recorded smoothing choices.
    """
    E_levels = np.sort(np.asarray(spectrum, dtype=float))
    span = E_levels[-1] - E_levels[0]
    if span == 0.0:
        return 0.0  # flat density of states
    if width is None:
        width = 2.0 * span / max(len(E_levels) - 1, 1)
    if step is None:
        step = level_step(E_levels)

    def log_omega(e: float) -> float:
        dens = np.exp(-0.5 * ((e - E_levels) / width) ** 2).sum()
        if dens <= 0.0:
            raise ValueError(f"no spectral weight near E={e}; widen the kernel")
        return float(np.log(dens))

    return (log_omega(E + 0.5 * step) - log_omega(E - 0.5 * step)) / step


def gibbs_state(subsystem_spectrum: np.ndarray, beta: float) -> DensityMatrix:
    """Gibbs state exp(-beta H_A)/Z on the subsystem, diagonal in the
    product energy basis.  Exponents are shifted for overflow safety."""
    E = np.asarray(subsystem_spectrum, dtype=float)
    x = -beta * E
    x -= x.max()
    p = np.exp(x)
    p /= p.sum()
    return DensityMatrix(len(E), np.diag(p).astype(complex))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    w = np.linalg.eigvalsh(a.entries - b.entries)
    return float(0.5 * np.abs(w).sum())


def hs_distance_sq(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return float(np.trace(diff @ diff.conj().T).real)


@dataclass
class GibbsComparison:
    """Typicality diagnostics for one (shell, subsystem) configuration."""
    beta: float
    d_s: int
    m: int
    d_E: int
    n_samples: int
    mean_state: np.ndarray          # empirical mean reduced state
    reference_state: np.ndarray     # exact reduced shell-maximally-mixed state
    gibbs: np.ndarray
    hs_variance: float              # mean HS distance^2 to the reference state
    variance_bound: float           # d_s^{2m}/(d_E+1)
    hs_distances_sq: np.ndarray     # per-sample HS distance^2 to the reference
    trace_distances: np.ndarray     # per-sample distance to the Gibbs comparator
    mean_state_error: float         # max |mean - reference|
    mean_state_se: float            # std error scale for that deviation


def typicality_report(H: HamiltonianSpec, shell: MESShell, m: int, n_samples: int,
                      rng: np.random.Generator, beta: Optional[float] = None,
                      beta_width: Optional[float] = None) -> GibbsComparison:
    """Sample shell states, reduce to the first m sites, and compare the
    fluctuations and the Gibbs comparator against the typicality bounds."""
    if n_samples < 10:
        raise ValueError("need at least 10 samples")
    if m > H.N // 2:
        raise ValueError(f"subsystem m={m} must satisfy m <= N/2")
    keep = list(range(1, m + 1))
    ref = shell.projector_reduced(m).entries
    if beta is None:
        comp_spectrum = H.subsystem_spectrum(list(range(m + 1, H.N + 1)))
        # the first subsystem excitation probes the interval one level gap
        # below the shell top, so evaluate the log-derivative there
        E_eval = shell.E_tot - 0.5 * level_step(comp_spectrum)
        beta = estimate_beta(comp_spectrum, E_eval, width=beta_width)
    gibbs = gibbs_state(H.subsystem_spectrum(keep), beta)

    dm = H.d ** m
    acc = np.zeros((dm, dm), dtype=complex)
    hs = np.empty(n_samples)
    tds = np.empty(n_samples)
    for t in range(n_samples):
        rho = reduced_density(mes_sample(shell, rng), keep).entries
        acc += rho
        hs[t] = hs_distance_sq(rho, ref)
        tds[t] = trace_distance(DensityMatrix(dm, rho), gibbs)
    mean_state = acc / n_samples

    err = float(np.max(np.abs(mean_state - ref)))
    # entrywise fluctuation scale of the sample mean
    se = float(np.sqrt(hs.mean() / (dm * dm) / n_samples)) if hs.mean() > 0 else 0.0
    return GibbsComparison(
        beta=float(beta), d_s=H.d, m=m, d_E=shell.d_E, n_samples=n_samples,
        mean_state=mean_state, reference_state=ref, gibbs=gibbs.entries,
        hs_variance=float(hs.mean()),
        variance_bound=H.d ** (2 * m) / (shell.d_E + 1),
        hs_distances_sq=hs,
        trace_distances=tds, mean_state_error=err, mean_state_se=se,
    )
