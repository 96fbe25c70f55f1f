"""Quantum Fisher information metric of the encoded state.

Derivatives are exact (operator insertion into the circuit, no finite
differences) and the metric is evaluated by two independent routes: the
closed form Re<d_j Psi|d_k Psi> + <Psi|d_j Psi><Psi|d_k Psi>, and the
literal rank-2 symmetric-logarithmic-derivative construction.  The
normalization follows the one-factor convention in which the ideal qubit
capsule with frequencies +-1 has unit metric (the usual QFI is 4x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .encoding import EncoderSpec, encode, initial_state, write_operator
from .states import PureState, apply_global, apply_local
from .tolerances import DEFAULT, Tolerances


@dataclass
class TangentFrame:
    base: PureState
    derivs: np.ndarray   # (n, d^N), not normalized
    theta: np.ndarray

    @property
    def n(self) -> int:
        return self.derivs.shape[0]

    def check(self, atol: float = 1e-8) -> None:
        for j in range(self.n):
            c = np.vdot(self.base.amp, self.derivs[j])
            if abs(c.real) > atol:
                raise ValueError(f"<Psi|d_{j}Psi> has real part {c.real:.3e}")


@dataclass
class FisherMetric:
    g: np.ndarray        # n x n, real symmetric PSD
    theta: np.ndarray
    convention: str = "quarter-qfi"  # standard() gives the usual x4 form

    def standard(self) -> np.ndarray:
        """Metric in the conventional QFI normalization (factor 4)."""
        return 4.0 * self.g

    def check(self, tol: Tolerances = DEFAULT) -> None:
        if np.max(np.abs(self.g - self.g.T)) > tol.norm:
            raise ValueError("metric not symmetric")
        if np.linalg.eigvalsh(self.g).min() < -1e-8:
            raise ValueError("metric not positive semidefinite")


def derivative_states(spec: EncoderSpec, thetas: Sequence[float],
                      tol: Tolerances = DEFAULT) -> TangentFrame:
    """Base state and exact parameter derivatives of the encoding.

    d_j Psi is the circuit with (i sigma_j at port p_j) inserted next to
    the j-th write gate; each derivative reruns the suffix of the circuit
    from the cached post-scramble state of step j-1.
    """
    thetas = np.asarray(thetas, dtype=float)
    U = spec.scramblers()
    # forward pass, caching the state after each scrambler
    after = [apply_global(initial_state(spec), U[0], tol, check=False)]
    for j in range(spec.n):
        W = write_operator(spec.generators[j], thetas[j])
        st = apply_local(after[-1], W, spec.ports[j], tol, check=False)
        after.append(apply_global(st, U[j + 1], tol, check=False))
    base = after[-1]

    derivs = np.empty((spec.n, spec.dim), dtype=complex)
    for j in range(spec.n):
        st = after[j]
        W = write_operator(spec.generators[j], thetas[j])
        st = apply_local(st, W, spec.ports[j], tol, check=False)
        st = apply_local(st, 1j * spec.generators[j].sigma, spec.ports[j], tol, check=False)
        st = apply_global(st, U[j + 1], tol, check=False)
        for k in range(j + 1, spec.n):
            Wk = write_operator(spec.generators[k], thetas[k])
            st = apply_local(st, Wk, spec.ports[k], tol, check=False)
            st = apply_global(st, U[k + 1], tol, check=False)
        derivs[j] = st.amp
    return TangentFrame(base=base, derivs=derivs, theta=thetas)


def qfi_metric(frame: TangentFrame) -> FisherMetric:
    """Closed-form metric: Re<d_j|d_k> + <Psi|d_j><Psi|d_k>."""
    psi = frame.base.amp
    c = frame.derivs.conj() @ psi            # c_j = <d_j Psi|Psi>
    A = frame.derivs.conj() @ frame.derivs.T  # A_jk = <d_j Psi|d_k Psi>
    g = A.real + np.outer(c.conj(), c.conj()).real
    g = 0.5 * (g + g.T)
    return FisherMetric(g=g, theta=frame.theta.copy())


def qfi_metric_direct(frame: TangentFrame) -> FisherMetric:
    """Literal SLD route: L_j = |d_j><Psi| + |Psi><d_j|, then the
    symmetrized expectation <Psi|(L_j L_k + L_k L_j)/2|Psi>.

    L_j is rank <= 2, so L_j|Psi> is formed directly as a vector; the full
    operator is never materialized.
    """
    psi = frame.base.amp
    n = frame.n
    Lpsi = np.empty_like(frame.derivs)
    for j in range(n):
        Lpsi[j] = frame.derivs[j] * np.vdot(psi, psi) + psi * np.vdot(frame.derivs[j], psi)
    g = np.empty((n, n))
    for j in range(n):
        for k in range(j, n):
            # L Hermitian: <Psi|L_j L_k|Psi> = <L_j Psi|L_k Psi>
            val = 0.5 * (np.vdot(Lpsi[j], Lpsi[k]) + np.vdot(Lpsi[k], Lpsi[j]))
            g[j, k] = g[k, j] = val.real
    return FisherMetric(g=g, theta=frame.theta.copy())


def capsule_metric_value(gen) -> float:
    """Metric of the ideal capsule: variance of the generator spectrum
    under the uniform distribution."""
    w = gen.eigenvalues
    return float(np.mean(w ** 2) - np.mean(w) ** 2)


def reparameterize_check(spec: EncoderSpec, thetas: Sequence[float],
                         R: np.ndarray, tol: Tolerances = DEFAULT) -> float:
    """Chain-rule covariance residual under theta' = R theta.

    Route (a): transform the metric at theta as R g R^T.  Route (b):
    build the tangent frame of the composed map theta' -> theta = R^T
    theta' and evaluate the metric directly.  Returns the max-norm
    difference; exact covariance makes it floating-point small for any R.
    """
    R = np.asarray(R, dtype=float)
    if np.max(np.abs(R @ R.T - np.eye(R.shape[0]))) > tol.unitarity:
        raise ValueError("R is not orthogonal")
    thetas = np.asarray(thetas, dtype=float)
    frame = derivative_states(spec, thetas, tol)
    g = qfi_metric(frame).g
    route_a = R @ g @ R.T

    # composed map evaluated at theta' = R theta (so theta matches)
    frame_b = TangentFrame(base=frame.base, derivs=R @ frame.derivs, theta=R @ thetas)
    route_b = qfi_metric(frame_b).g
    return float(np.max(np.abs(route_a - route_b)))


@dataclass
class IsometryReport:
    """Metric samples on a theta grid plus rotational-isometry diagnostics."""
    thetas: List[np.ndarray]
    metrics: List[FisherMetric]
    F_estimate: float
    anisotropy: float       # max off-diagonal magnitude / F
    theta_drift: float      # max diagonal deviation from F, relative
    finite_size_scale: float  # d^{-(N-3)/2} reference for the residuals

    def scaled_anisotropy(self) -> float:
        return self.anisotropy / self.finite_size_scale

    def scaled_drift(self) -> float:
        return self.theta_drift / self.finite_size_scale


def isometry_report(spec: EncoderSpec, axes: Sequence[np.ndarray],
                    tol: Tolerances = DEFAULT) -> IsometryReport:
    """Sample the metric on the product grid of the per-parameter axes and
    summarize how close it is to F * identity with constant F."""
    if any(len(a) == 0 for a in axes) or len(axes) != spec.n:
        raise ValueError("need one nonempty node axis per parameter")
    thetas = []
    metrics = []
    for combo in itertools.product(*[list(map(float, a)) for a in axes]):
        th = np.asarray(combo)
        fm = qfi_metric(derivative_states(spec, th, tol))
        thetas.append(th)
        metrics.append(fm)
    diags = np.array([np.diag(m.g) for m in metrics])
    F = float(diags.mean())
    off = 0.0
    for m in metrics:
        o = m.g - np.diag(np.diag(m.g))
        if o.size:
            off = max(off, float(np.max(np.abs(o))))
    drift = float(np.max(np.abs(diags - F))) if diags.size else 0.0
    scale = spec.d ** (-(spec.N - 3) / 2.0)
    return IsometryReport(
        thetas=thetas, metrics=metrics, F_estimate=F,
        anisotropy=off / F if F > 0 else 0.0,
        theta_drift=drift / F if F > 0 else 0.0,
        finite_size_scale=scale,
    )
