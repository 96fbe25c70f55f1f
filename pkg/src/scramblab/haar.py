"""Haar-random unitaries and exact / Monte-Carlo moment formulas.

Sampling is Ginibre + QR with the phases of R's diagonal absorbed into Q,
which makes the draw exactly Haar rather than Haar-up-to-column-phases.
Second and fourth moments of matrix entries have closed forms; the MC
estimator is kept as an independent oracle for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .states import CapExceededError, DimensionError
from .tolerances import DEFAULT, Tolerances

# a moment monomial is a sequence of ((i, j), conjugated) with 1-based indices
Pattern = Sequence[Tuple[Tuple[int, int], bool]]


@dataclass
class UnitaryMatrix:
    D: int
    entries: np.ndarray
    seed_provenance: str = "explicit"

    def check(self, tol: Tolerances = DEFAULT) -> None:
        U = self.entries
        err = np.max(np.abs(U.conj().T @ U - np.eye(self.D)))
        if err > tol.unitarity:
            raise ValueError(f"unitarity violated: {err:.3e}")


@dataclass
class MomentEstimate:
    value: complex
    std_error: float
    samples: int


def haar_batch(D: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n Haar-random D x D unitaries, shape (n, D, D)."""
    z = (rng.standard_normal((n, D, D)) + 1j * rng.standard_normal((n, D, D))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.einsum("nii->ni", r)
    phase = diag / np.abs(diag)
    return q * phase[:, None, :]


def haar_sample(D: int, rng: np.random.Generator,
                tol: Tolerances = DEFAULT, provenance: str = "explicit") -> UnitaryMatrix:
    """One Haar-random D x D unitary."""
    if D < 1:
        raise DimensionError("D must be >= 1")
    if D > tol.dim_cap:
        raise CapExceededError(f"D={D} exceeds cap {tol.dim_cap}")
    return UnitaryMatrix(D, haar_batch(D, 1, rng)[0], provenance)


def haar_isometry(D: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """D x k matrix distributed as the first k columns of a Haar unitary."""
    z = (rng.standard_normal((D, k)) + 1j * rng.standard_normal((D, k))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phase = np.diag(r) / np.abs(np.diag(r))
    return q * phase[None, :]


def haar_state_batch(D: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n Haar-random unit vectors, shape (n, D)."""
    z = rng.standard_normal((n, D)) + 1j * rng.standard_normal((n, D))
    return z / np.linalg.norm(z, axis=1)[:, None]


def haar_sample_subspace(basis: np.ndarray, rng: np.random.Generator,
                         tol: Tolerances = DEFAULT) -> UnitaryMatrix:
    """Haar-random on span(basis), identity on its orthogonal complement.

    `basis` is a D x k isometry; the result is B V B^dag + (I - B B^dag)
    with V a Haar-random k x k unitary.
    """
    D, k = basis.shape
    if not 1 <= k <= D:
        raise DimensionError(f"subspace dimension {k} out of range 1..{D}")
    err = np.max(np.abs(basis.conj().T @ basis - np.eye(k)))
    if err > tol.unitarity:
        raise ValueError(f"basis is not an isometry: max deviation {err:.3e}")
    V = haar_batch(k, 1, rng)[0]
    U = np.eye(D, dtype=complex) - basis @ basis.conj().T
    U += basis @ V @ basis.conj().T
    return UnitaryMatrix(D, U)


def moment2_exact(D: int, idx1: Tuple[int, int], idx2: Tuple[int, int]) -> float:
    """Exact Haar average of U_{i,j} U*_{k,l}: (1/D) delta_ik delta_jl.

    Row indices pair with row indices and columns with columns; that is
    the form fixed by the unitarity constraint and confirmed by the MC
    oracle.
    """
    (i, j), (k, l) = idx1, idx2
    return (1.0 / D) if (i == k and j == l) else 0.0


def moment4_exact(D: int, idx1: Tuple[int, int], idx2: Tuple[int, int],
                  idx3: Tuple[int, int], idx4: Tuple[int, int]) -> float:
    """Exact Haar average of U_{i1,j1} U_{i2,j2} U*_{i3,j3} U*_{i4,j4}.

    Two-term delta structure with coefficients 1/(D^2-1) and
    -1/(D(D^2-1)): the plain factors pair with the conjugated ones either
    straight (1-3, 2-4) or crossed (1-4, 2-3), with a cross term mixing
    the column pairings.  For D=1 the coefficients are singular but the
    average is the trivial U(1) phase integral, which is 1 for this
    balanced monomial.
    """
    (i1, j1), (i2, j2), (i3, j3), (i4, j4) = idx1, idx2, idx3, idx4
    if D == 1:
        return 1.0
    b = 1.0 / (D * D - 1.0)
    c = -1.0 / (D * (D * D - 1.0))
    t1 = ((i1 == i3) * (j1 == j3) * (i2 == i4) * (j2 == j4)
          + (i1 == i4) * (j1 == j4) * (i2 == i3) * (j2 == j3))
    t2 = ((i1 == i3) * (j1 == j4) * (i2 == i4) * (j2 == j3)
          + (i1 == i4) * (j1 == j3) * (i2 == i3) * (j2 == j4))
    return b * t1 + c * t2


def pattern_moment_exact(D: int, pattern: Pattern) -> float:
    """Dispatch a 2- or 4-entry pattern to the closed forms."""
    plain = [idx for idx, conj in pattern if not conj]
    starred = [idx for idx, conj in pattern if conj]
    if len(plain) == 1 and len(starred) == 1:
        return moment2_exact(D, plain[0], starred[0])
    if len(plain) == 2 and len(starred) == 2:
        return moment4_exact(D, plain[0], plain[1], starred[0], starred[1])
    raise ValueError("only balanced second and fourth moments have closed forms here")


def moment_mc(D: int, pattern: Pattern, n_samples: int, rng: np.random.Generator,
              chunk: int = 4096) -> MomentEstimate:
    """Monte-Carlo mean and standard error of a matrix-entry monomial.

    Samples are drawn in fixed-size chunks in a fixed order, so the result
    is bit-reproducible for a given stream.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples for a standard error")
    total = 0.0 + 0.0j
    total_sq = 0.0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        U = haar_batch(D, m, rng)
        vals = np.ones(m, dtype=complex)
        for (i, j), conj in pattern:
            e = U[:, i - 1, j - 1]
            vals *= e.conj() if conj else e
        total += vals.sum()
        total_sq += float((np.abs(vals) ** 2).sum())
        done += m
    mean = total / n_samples
    var = total_sq / n_samples - abs(mean) ** 2
    se = float(np.sqrt(max(var, 0.0) / n_samples))
    return MomentEstimate(value=complex(mean), std_error=se, samples=n_samples)
