"""Multi-parameter write-and-scramble encoding.

A write operation exp(i theta sigma) on one qudit, alternated with
Haar-random scramblers of the whole register, produces a state whose
parameter dependence factorizes into independent single-qudit capsules up
to O(d^{-(N-3)/2}).  This module builds the circuit, extracts the
per-frequency component vectors by grid inversion, and measures the
orthonormality / factorization residuals that quantify the decoupling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import rng as rngmod
from .haar import haar_batch, haar_isometry, haar_sample_subspace, haar_state_batch
from .states import (DimensionError, PureState, apply_global, apply_local,
                     check_cap, make_basis_state, schmidt)
from .tolerances import DEFAULT, Tolerances


class DegenerateSpectrumError(ValueError):
    """Write-generator eigenvalues collide; frequency extraction is rank-deficient."""


@dataclass
class Generator:
    """Traceless Hermitian write generator with spectral data."""
    d: int
    sigma: np.ndarray
    eigenvalues: np.ndarray   # w_s, sorted descending
    eigenvectors: np.ndarray  # orthonormal columns |s>

    @classmethod
    def from_matrix(cls, sigma: np.ndarray, tol: Tolerances = DEFAULT) -> "Generator":
        d = sigma.shape[0]
        if sigma.shape != (d, d):
            raise DimensionError("generator must be square")
        if np.max(np.abs(sigma - sigma.conj().T)) > tol.hermiticity:
            raise ValueError("generator is not Hermitian")
        if abs(np.trace(sigma)) > tol.trace:
            raise ValueError("generator is not traceless")
        w, V = np.linalg.eigh(sigma)
        order = np.argsort(w)[::-1]
        return cls(d, sigma, w[order], V[:, order])

    @classmethod
    def from_spectrum(cls, w: Sequence[float], basis: Optional[np.ndarray] = None) -> "Generator":
        """Generator with eigenvalues w in the given (default computational) basis."""
        w = np.asarray(w, dtype=float)
        d = len(w)
        V = np.eye(d, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
        sigma = (V * w) @ V.conj().T
        return cls.from_matrix(sigma)

    def conjugated(self, u: np.ndarray) -> "Generator":
        """Same spectrum, eigenbasis rotated by a single-qudit unitary u."""
        return Generator.from_matrix(u @ self.sigma @ u.conj().T)

    def is_degenerate(self, rtol: float = 1e-9) -> bool:
        scale = max(np.max(np.abs(self.eigenvalues)), 1.0)
        return bool(np.min(np.abs(np.diff(self.eigenvalues))) < rtol * scale)


def write_operator(gen: Generator, theta: float) -> np.ndarray:
    """The d x d write unitary sum_s exp(i w_s theta) |s><s|."""
    V = gen.eigenvectors
    return (V * np.exp(1j * gen.eigenvalues * theta)) @ V.conj().T


def capsule_state(gen: Generator, theta: float) -> PureState:
    """Ideal single-qudit capsule (1/sqrt d) sum_s exp(i w_s theta)|s>."""
    amp = gen.eigenvectors @ (np.exp(1j * gen.eigenvalues * theta) / np.sqrt(gen.d))
    return PureState(gen.d, 1, amp)


def capsule_overlap(gen: Generator, dtheta: float) -> complex:
    """<phi(theta)|phi(theta+dtheta)> = (1/d) sum_s exp(i w_s dtheta)."""
    return complex(np.mean(np.exp(1j * gen.eigenvalues * dtheta)))


@dataclass(eq=False)
class EncoderSpec:
    """Parameters of the n-step write/scramble circuit.

    Scramblers U_0..U_n are drawn once from disjoint deterministic streams
    of `master_seed` and cached; `shell_basis`, when given, restricts every
    scrambler to act Haar-randomly on that subspace and as the identity on
    its complement.
    """
    d: int
    N: int
    generators: Tuple[Generator, ...]
    ports: Tuple[int, ...]
    master_seed: int
    scrambler_kind: str = "haar"              # "haar" | "subspace" | "identity"
    shell_basis: Optional[np.ndarray] = None  # d^N x k isometry for "subspace"
    initial_digits: Optional[Tuple[int, ...]] = None
    _scramblers: Optional[List[np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.generators) != len(self.ports):
            raise DimensionError("one port per generator required")
        for p in self.ports:
            if not 1 <= p <= self.N:
                raise ValueError(f"port {p} out of range 1..{self.N}")
        if self.scrambler_kind not in ("haar", "subspace", "identity"):
            raise ValueError(f"unknown scrambler kind {self.scrambler_kind!r}")
        if self.scrambler_kind == "subspace" and self.shell_basis is None:
            raise ValueError("subspace scrambling needs a shell basis")
        check_cap(self.d ** self.N)

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return self.d ** self.N

    def scramblers(self) -> List[np.ndarray]:
        """U_0 .. U_n, sampled once per spec from streams (seed, SCRAMBLER_TAG, k)."""
        if self._scramblers is None:
            mats = []
            for k in range(self.n + 1):
                gen = rngmod.stream(self.master_seed, rngmod.SCRAMBLER_TAG, k)
                if self.scrambler_kind == "haar":
                    mats.append(haar_batch(self.dim, 1, gen)[0])
                elif self.scrambler_kind == "identity":
                    mats.append(np.eye(self.dim, dtype=complex))
                else:
                    mats.append(haar_sample_subspace(self.shell_basis, gen).entries)
            self._scramblers = mats
        return self._scramblers


def initial_state(spec: EncoderSpec) -> PureState:
    digits = spec.initial_digits or tuple([0] * spec.N)
    return make_basis_state(spec.d, spec.N, digits)


def encode(spec: EncoderSpec, thetas: Sequence[float], tol: Tolerances = DEFAULT) -> PureState:
    """|Psi(theta_1..theta_n)> = U_n W(theta_n) ... U_1 W(theta_1) U_0 |0...0>."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (spec.n,):
        raise DimensionError(f"expected {spec.n} parameters, got {thetas.shape}")
    U = spec.scramblers()
    state = apply_global(initial_state(spec), U[0], tol, check=False)
    for j in range(spec.n):
        W = write_operator(spec.generators[j], thetas[j])
        state = apply_local(state, W, spec.ports[j], tol, check=False)
        state = apply_global(state, U[j + 1], tol, check=False)
    return state


def overlap_factorization(spec: EncoderSpec, thetas: Sequence[float],
                          thetas2: Sequence[float]) -> Tuple[float, float]:
    """(measured, predicted) overlap magnitude between two encodings.

    Decoupling predicts |<Psi(theta)|Psi(theta')>| = prod_j |capsule
    overlap at dtheta_j|, exactly in the large-N limit.
    """
    a = encode(spec, thetas)
    b = encode(spec, thetas2)
    measured = abs(np.vdot(a.amp, b.amp))
    predicted = 1.0
    for j, gen in enumerate(spec.generators):
        predicted *= abs(capsule_overlap(gen, float(thetas2[j]) - float(thetas[j])))
    return float(measured), float(predicted)


def default_nodes(gen: Generator) -> np.ndarray:
    """d grid nodes making the node matrix exp(i w_s theta_k) well conditioned."""
    w = gen.eigenvalues
    span = float(w.max() - w.min())
    if span == 0.0:
        raise DegenerateSpectrumError("generator spectrum has zero span")
    return 2.0 * np.pi * np.arange(gen.d) / (gen.d * span)


def node_matrix(gen: Generator, nodes: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.outer(nodes, gen.eigenvalues))


@dataclass
class ComponentSet:
    """Per-frequency component vectors of the encoded state.

    `phi` has shape (d,)*n + (d, d^(N-1)): axes are the step labels
    s_1..s_n, the first-qudit digit, and the remaining-register vector,
    rescaled to unit norm in the ideal limit.  `raw_norms` are the norms
    before the d^{(n+1)/2} rescale.
    """
    d: int
    N: int
    n: int
    phi: np.ndarray
    frequencies: List[np.ndarray]
    raw_norms: np.ndarray
    node_condition: float

    def flat(self) -> np.ndarray:
        """(d^(n+1), d^(N-1)) matrix of component vectors."""
        return self.phi.reshape(self.d ** (self.n + 1), self.d ** (self.N - 1))

    def reassemble(self, thetas: Sequence[float]) -> PureState:
        """Rebuild the encoded state at arbitrary thetas from the components."""
        thetas = np.asarray(thetas, dtype=float)
        out = self.phi.reshape(self.d ** self.n, self.d ** (self.N - 1) * self.d)
        coeff = np.ones(1, dtype=complex)
        for j in range(self.n):
            coeff = np.multiply.outer(coeff, np.exp(1j * self.frequencies[j] * thetas[j])).reshape(-1)
        amp = (coeff @ out) * self.d ** (-(self.n + 1) / 2.0)
        return PureState(self.d, self.N, amp)


def extract_components(spec: EncoderSpec,
                       nodes: Optional[Sequence[np.ndarray]] = None,
                       tol: Tolerances = DEFAULT) -> ComponentSet:
    """Isolate the frequency components of the encoded state by grid inversion.

    The encoded amplitudes are trigonometric polynomials in each theta_j
    with the d generator frequencies, so evaluating on a d-node grid per
    axis and inverting the node matrix recovers the components exactly
    (up to conditioning).  Requires n + 2 <= N and nondegenerate spectra.
    """
    d, N, n = spec.d, spec.N, spec.n
    if n + 2 > N:
        raise DimensionError(f"component extraction needs n + 2 <= N, got n={n}, N={N}")
    for gen in spec.generators:
        if gen.is_degenerate():
            raise DegenerateSpectrumError("degenerate generator spectrum")
    if nodes is None:
        nodes = [default_nodes(g) for g in spec.generators]
    mats = [node_matrix(g, np.asarray(nd)) for g, nd in zip(spec.generators, nodes)]
    cond = max((np.linalg.cond(M) for M in mats), default=1.0)
    if cond > tol.node_condition_max:
        raise ValueError(f"node matrix condition number {cond:.2e} exceeds "
                         f"{tol.node_condition_max:.1e}")

    # encoded states on the d^n product grid
    grid = np.empty((d,) * n + (d ** N,), dtype=complex)
    for idx in itertools.product(range(d), repeat=n):
        th = [nodes[j][idx[j]] for j in range(n)]
        grid[idx] = encode(spec, th, tol).amp

    # per-axis inversion in the exp(i w_s theta) basis
    comps = grid
    for j in range(n):
        inv = np.linalg.inv(mats[j])
        comps = np.moveaxis(np.tensordot(inv, np.moveaxis(comps, j, 0), axes=(1, 0)), 0, j)

    comps = comps.reshape((d,) * n + (d, d ** (N - 1)))
    raw_norms = np.linalg.norm(comps, axis=-1)
    phi = comps * d ** ((n + 1) / 2.0)
    freqs = [g.eigenvalues.copy() for g in spec.generators]
    return ComponentSet(d, N, n, phi, freqs, raw_norms, float(cond))


def gram_residual(cs: ComponentSet) -> float:
    """Max-norm deviation of the component Gram matrix from the identity."""
    F = cs.flat()
    G = F.conj() @ F.T
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


@dataclass
class OverlapStats:
    """Cross-Schmidt-vector overlap magnitudes for one scrambled register."""
    d: int
    N: int
    m: int
    magnitudes: np.ndarray   # |<psi(a', l')|psi(a, l)>| over all l' != l pairs
    median: float


def cross_schmidt_overlaps(seed: int, m: int, d: int, N: int,
                           trial: int = 0, experiment_id: int = 0) -> OverlapStats:
    """Scramble m orthonormal basis states with one shared Haar unitary and
    collect the overlaps between Schmidt vectors of different inputs.

    Only the m relevant columns of the unitary are sampled; their joint
    law equals that of the first m columns of a full Haar draw.
    """
    D = d ** N
    if m > D:
        raise DimensionError(f"m={m} exceeds Hilbert dimension {D}")
    gen = rngmod.trial_stream(seed, experiment_id, trial)
    iso = haar_isometry(D, m, gen)
    rights = []
    for lam in range(m):
        st = PureState(d, N, iso[:, lam])
        sd = schmidt(st)
        rights.append(sd.right)  # (d^(N-1), d) columns
    mags = []
    for l1 in range(m):
        for l2 in range(l1 + 1, m):
            G = np.abs(rights[l1].conj().T @ rights[l2])
            mags.extend(G.reshape(-1).tolist())
    mags = np.asarray(mags)
    return OverlapStats(d, N, m, mags, float(np.median(mags)) if mags.size else 0.0)


def schmidt_uniformity(seed: int, d: int, N: int,
                       trial: int = 0, experiment_id: int = 0) -> float:
    """max_a |p(a) - 1/d| for one Haar-random register state."""
    if N < 3:
        raise DimensionError("needs N >= 3")
    gen = rngmod.trial_stream(seed, experiment_id, trial)
    amp = haar_state_batch(d ** N, 1, gen)[0]
    sd = schmidt(PureState(d, N, amp))
    return float(np.max(np.abs(sd.probs - 1.0 / d)))


def mean_marginal_purity_exact(d: int, N: int) -> float:
    """Exact Haar-ensemble average of the first-qudit purity."""
    return (d + d ** (N - 1)) / (d ** N + 1)


def mean_marginal_purity_mc(seed: int, d: int, N: int, n_samples: int,
                            chunk: int = 4096, experiment_id: int = 0) -> Tuple[float, float]:
    """(mean, std error) of the first-qudit purity over Haar register states."""
    gen = rngmod.trial_stream(seed, experiment_id, 0)
    total = 0.0
    total_sq = 0.0
    done = 0
    D = d ** N
    while done < n_samples:
        b = min(chunk, n_samples - done)
        amps = haar_state_batch(D, b, gen).reshape(b, d, D // d)
        rho = np.einsum("bij,bkj->bik", amps, amps.conj())
        pur = np.einsum("bik,bki->b", rho, rho).real
        total += float(pur.sum())
        total_sq += float((pur ** 2).sum())
        done += b
    mean = total / n_samples
    var = total_sq / n_samples - mean ** 2
    return mean, float(np.sqrt(max(var, 0.0) / n_samples))
