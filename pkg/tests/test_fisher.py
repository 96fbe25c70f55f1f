import numpy as np
import pytest

from scramblab.encoding import EncoderSpec, capsule_state
from scramblab.fisher import (FisherMetric, TangentFrame, capsule_metric_value,
                              derivative_states, isometry_report, qfi_metric,
                              qfi_metric_direct, reparameterize_check)
from scramblab.presets import generator
from scramblab.rng import stream

ZGEN = generator("pauli-z-like")


def spec_for(d=2, N=6, n=2, seed=42, **kw):
    return EncoderSpec(d=d, N=N, generators=(ZGEN,) * n, ports=(1,) * n,
                       master_seed=seed, **kw)


def capsule_frame(theta):
    # ideal single-qudit capsule and its analytic derivative
    base = capsule_state(ZGEN, theta)
    w = ZGEN.eigenvalues
    deriv = (1j * w * np.exp(1j * w * theta)) / np.sqrt(2)
    return TangentFrame(base=base, derivs=deriv[None, :], theta=np.array([theta]))


def test_derivative_eigenstate_phase_evolution():
    # identity scramblers, initial state an eigenvector of sigma:
    # the derivative is i * w_s * Psi
    sp = spec_for(n=1, N=4, scrambler_kind="identity", initial_digits=(0, 0, 0, 0))
    frame = derivative_states(sp, [0.45])
    w0 = ZGEN.eigenvalues[0]
    assert np.max(np.abs(frame.derivs[0] - 1j * w0 * frame.base.amp)) < 1e-12


def test_derivative_norm_bound_and_gauge_condition():
    sp = spec_for(seed=3)
    frame = derivative_states(sp, [0.2, -0.6])
    wmax = np.max(np.abs(ZGEN.eigenvalues))
    for j in range(2):
        assert np.linalg.norm(frame.derivs[j]) <= wmax + 1e-10
        # norm conservation makes <Psi|dPsi> purely imaginary
        assert abs(np.vdot(frame.base.amp, frame.derivs[j]).real) < 1e-8


def test_finite_difference_oracle():
    from scramblab.encoding import encode
    sp = spec_for(seed=5)
    th = np.array([0.3, -0.4])
    frame = derivative_states(sp, th)
    h = 1e-5
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd = (encode(sp, th + e).amp - encode(sp, th - e).amp) / (2 * h)
        rel = np.linalg.norm(fd - frame.derivs[j]) / np.linalg.norm(frame.derivs[j])
        assert rel < 1e-6


def test_qfi_capsule_value():
    g = qfi_metric(capsule_frame(0.37)).g
    assert abs(g[0, 0] - 1.0) < 1e-12
    assert abs(capsule_metric_value(ZGEN) - 1.0) < 1e-12


def test_qfi_zero_for_theta_independent_state():
    base = capsule_state(ZGEN, 0.0)
    frame = TangentFrame(base=base, derivs=np.zeros((2, 2), dtype=complex),
                         theta=np.zeros(2))
    assert np.max(np.abs(qfi_metric(frame).g)) == 0.0
    assert np.max(np.abs(qfi_metric_direct(frame).g)) == 0.0


def test_qfi_product_state_additivity():
    # ideal two-capsule product: g = diag of the spectrum variances
    th = np.array([0.2, 0.9])
    amps = [capsule_state(ZGEN, t).amp for t in th]
    base_amp = np.kron(amps[0], amps[1])
    w = ZGEN.eigenvalues
    damps = [(1j * w * np.exp(1j * w * t)) / np.sqrt(2) for t in th]
    derivs = np.stack([np.kron(damps[0], amps[1]), np.kron(amps[0], damps[1])])
    from scramblab.states import PureState
    frame = TangentFrame(base=PureState(2, 2, base_amp), derivs=derivs, theta=th)
    g = qfi_metric(frame).g
    assert np.max(np.abs(g - np.eye(2))) < 1e-12


def test_two_route_identity_random_frames():
    worst = 0.0
    for t in range(10):
        sp = spec_for(seed=100 + t)
        th = stream(t, 7).uniform(-1, 1, size=2)
        frame = derivative_states(sp, th)
        worst = max(worst, np.max(np.abs(qfi_metric(frame).g
                                         - qfi_metric_direct(frame).g)))
    assert worst < 1e-10


def test_metric_symmetric_psd():
    sp = spec_for(seed=9)
    g = qfi_metric(derivative_states(sp, [0.5, 0.1])).g
    assert np.max(np.abs(g - g.T)) < 1e-10
    assert np.linalg.eigvalsh(g).min() >= -1e-8


def test_gauge_invariance_global_phase():
    sp = spec_for(seed=11)
    frame = derivative_states(sp, [0.3, 0.3])
    phase = np.exp(1j * 1.234)
    from scramblab.states import PureState
    shifted = TangentFrame(base=PureState(2, 6, frame.base.amp * phase),
                           derivs=frame.derivs * phase, theta=frame.theta)
    assert np.max(np.abs(qfi_metric(frame).g - qfi_metric(shifted).g)) < 1e-10


def test_reparameterize_check():
    sp = spec_for(seed=13)
    th = [0.2, -0.3]
    assert reparameterize_check(sp, th, np.eye(2)) <= 1e-12
    c, s = np.cos(0.7), np.sin(0.7)
    R = np.array([[c, -s], [s, c]])
    assert reparameterize_check(sp, th, R) <= 1e-8
    with pytest.raises(ValueError):
        reparameterize_check(sp, th, np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_rotation_moves_metric_only_through_anisotropy():
    sp = spec_for(N=8, seed=15)
    g = qfi_metric(derivative_states(sp, [0.1, 0.4])).g
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    R = np.array([[c, -s], [s, c]])
    F = np.mean(np.diag(g))
    moved = np.max(np.abs(R @ g @ R.T - g))
    assert moved <= 2 * np.linalg.norm(g - F * np.eye(2), 2) + 1e-12


def test_isometry_report_ideal_product_state():
    # a spec with identity scramblers and writes on distinct ports gives
    # the ideal decoupled product: F = Var(w) = 1, no anisotropy or drift
    sp = EncoderSpec(d=2, N=4, generators=(ZGEN, ZGEN), ports=(1, 2),
                     master_seed=0, scrambler_kind="identity")
    # start from the uniform superposition so each capsule is ideal
    H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    U0 = np.eye(16, dtype=complex)
    for p in (0, 1, 2, 3):
        U0 = np.kron(np.kron(np.eye(2 ** p), H), np.eye(2 ** (3 - p))) @ U0
    sp._scramblers = [U0] + [np.eye(16, dtype=complex)] * 2
    axes = [np.linspace(-0.5, 0.5, 3)] * 2
    rep = isometry_report(sp, axes)
    assert abs(rep.F_estimate - 1.0) < 1e-10
    assert rep.anisotropy < 1e-10 and rep.theta_drift < 1e-10


def test_isometry_report_scrambled_register():
    sp = spec_for(N=8, seed=17)
    rep = isometry_report(sp, [np.linspace(-0.6, 0.6, 2)] * 2)
    assert abs(rep.F_estimate - 1.0) < 0.5
    assert rep.anisotropy < 1.0 and rep.theta_drift < 1.0
    assert abs(rep.finite_size_scale - 2 ** (-2.5)) < 1e-15


def test_isometry_report_rejects_empty_axes():
    with pytest.raises(ValueError):
        isometry_report(spec_for(), [np.array([]), np.array([0.0])])
