"""Dense N-qudit pure states: local/global unitaries, partial trace,
Schmidt decomposition and entanglement functionals.

Index convention: the linear index of amplitude (i_1, ..., i_N) is
sum_p i_p * d**(N-p), i.e. qudit 1 is the most significant digit.  This
makes the (d, d**(N-1)) Schmidt reshape at the first qudit a contiguous
view; every module shares the convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .tolerances import DEFAULT, Tolerances


class DimensionError(ValueError):
    pass


class CapExceededError(MemoryError):
    pass


def check_cap(dim: int, tol: Tolerances = DEFAULT) -> None:
    if dim > tol.dim_cap:
        raise CapExceededError(f"Hilbert-space dimension {dim} exceeds cap {tol.dim_cap}")


@dataclass
class PureState:
    d: int
    N: int
    amp: np.ndarray  # complex, length d**N, unit norm

    @property
    def dim(self) -> int:
        return self.d ** self.N

    def check(self, tol: Tolerances = DEFAULT) -> None:
        if self.amp.shape != (self.dim,):
            raise DimensionError(f"amplitude length {self.amp.shape} != d^N = {self.dim}")
        nrm = np.linalg.norm(self.amp)
        if abs(nrm - 1.0) > tol.norm:
            raise ValueError(f"state norm {nrm} deviates from 1 beyond {tol.norm}")

    def copy(self) -> "PureState":
        return PureState(self.d, self.N, self.amp.copy())


@dataclass
class DensityMatrix:
    dim: int
    entries: np.ndarray

    def check(self, tol: Tolerances = DEFAULT) -> None:
        M = self.entries
        if M.shape != (self.dim, self.dim):
            raise DimensionError("density matrix shape mismatch")
        if np.max(np.abs(M - M.conj().T)) > tol.hermiticity:
            raise ValueError("density matrix not Hermitian within tolerance")
        if abs(np.trace(M).real - 1.0) > tol.trace:
            raise ValueError("density matrix trace deviates from 1")
        w = np.linalg.eigvalsh(M)
        if w.min() < tol.eigenvalue_floor:
            raise ValueError(f"negative eigenvalue {w.min()}")

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


@dataclass
class SchmidtDecomposition:
    probs: np.ndarray      # descending, sums to 1
    left: np.ndarray       # (d, d) columns |u_k>
    right: np.ndarray      # (d**(N-1), d) columns |v_k>

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())


def make_basis_state(d: int, N: int, digits: Sequence[int], tol: Tolerances = DEFAULT) -> PureState:
    """Computational basis state |digits[0]> ... |digits[N-1]> (qudit 1 first)."""
    if len(digits) != N:
        raise DimensionError(f"expected {N} digits, got {len(digits)}")
    for q in digits:
        if not 0 <= q < d:
            raise ValueError(f"digit {q} out of range for d={d}")
    check_cap(d ** N, tol)
    idx = 0
    for q in digits:
        idx = idx * d + int(q)
    amp = np.zeros(d ** N, dtype=complex)
    amp[idx] = 1.0
    return PureState(d, N, amp)


def _check_unitary(U: np.ndarray, atol: float) -> None:
    D = U.shape[0]
    if U.shape != (D, D):
        raise DimensionError("operator is not square")
    err = np.max(np.abs(U.conj().T @ U - np.eye(D)))
    if err > atol:
        raise ValueError(f"operator fails unitarity check: max deviation {err:.3e}")


def apply_local(state: PureState, op: np.ndarray, port: int,
                tol: Tolerances = DEFAULT, check: bool = True) -> PureState:
    """Apply a d x d unitary to qudit `port` (1-based)."""
    d, N = state.d, state.N
    if not 1 <= port <= N:
        raise ValueError(f"port {port} out of range 1..{N}")
    if check:
        _check_unitary(op, tol.unitarity)
    left = d ** (port - 1)
    right = d ** (N - port)
    a = state.amp.reshape(left, d, right)
    out = np.einsum("ab,ibr->iar", op, a)
    return PureState(d, N, np.ascontiguousarray(out.reshape(-1)))


def apply_global(state: PureState, U: np.ndarray,
                 tol: Tolerances = DEFAULT, check: bool = True) -> PureState:
    """Apply a full d^N x d^N unitary."""
    if U.shape != (state.dim, state.dim):
        raise DimensionError("global unitary dimension mismatch")
    if check:
        _check_unitary(U, tol.unitarity_global)
    return PureState(state.d, state.N, U @ state.amp)


def reduced_density(state: PureState, keep: Iterable[int], tol: Tolerances = DEFAULT) -> DensityMatrix:
    """Partial trace onto the (1-based) ports in `keep`."""
    keep = sorted(set(keep))
    d, N = state.d, state.N
    if not keep:
        raise ValueError("keep set must be nonempty")
    if not all(1 <= p <= N for p in keep):
        raise ValueError(f"keep ports {keep} out of range 1..{N}")
    check_cap(d ** (2 * len(keep)), tol)
    trace_out = [p for p in range(1, N + 1) if p not in keep]
    psi = state.amp.reshape([d] * N)
    # move kept axes first
    perm = [p - 1 for p in keep] + [p - 1 for p in trace_out]
    psi = psi.transpose(perm).reshape(d ** len(keep), d ** len(trace_out))
    rho = psi @ psi.conj().T
    return DensityMatrix(d ** len(keep), rho)


def schmidt(state: PureState, cut_after: int = 1) -> SchmidtDecomposition:
    """Schmidt decomposition across the cut after qudit `cut_after` (only 1 supported)."""
    if state.N < 2:
        raise DimensionError("Schmidt decomposition needs N >= 2")
    if cut_after != 1:
        raise NotImplementedError("only the cut after qudit 1 is supported")
    d = state.d
    A = state.amp.reshape(d, -1)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    probs = s ** 2
    # svd returns descending singular values already
    return SchmidtDecomposition(probs=probs, left=U, right=Vh.T)


def reassemble(sd: SchmidtDecomposition, d: int, N: int) -> PureState:
    """Inverse of `schmidt`: sum_k sqrt(p_k) |u_k> (x) |v_k>."""
    amp = np.einsum("k,ak,bk->ab", np.sqrt(sd.probs), sd.left, sd.right).reshape(-1)
    return PureState(d, N, amp)


def entropy(sd: SchmidtDecomposition) -> float:
    """Entanglement entropy -sum p ln p, in nats."""
    return sd.entropy()


def overlap(a: PureState, b: PureState) -> complex:
    """Inner product <a|b> (conjugate-linear in the first argument)."""
    if (a.d, a.N) != (b.d, b.N):
        raise DimensionError("states live in different Hilbert spaces")
    return complex(np.vdot(a.amp, b.amp))
