import numpy as np
import pytest

from scramblab.rng import stream
from scramblab.states import DimensionError, reduced_density
from scramblab.typicality import (EmptyShellError, build_hamiltonian,
                                  estimate_beta, gibbs_state, hs_distance_sq,
                                  level_step, mes_sample, mes_shell,
                                  trace_distance, typicality_report)


def two_level(N):
    return build_hamiltonian([[0.0, 1.0]] * N)


def test_build_hamiltonian_spectra():
    H = build_hamiltonian([[0.0] * 2] * 3)
    assert np.allclose(H.total_spectrum(), 0.0)

    H = two_level(3)
    assert np.allclose(np.sort(H.total_spectrum()), [0, 1, 1, 1, 2, 2, 2, 3])

    H = build_hamiltonian([[-1.0, 0.0, 1.0]])
    assert np.allclose(np.sort(H.total_spectrum()), [-1, 0, 1])

    with pytest.raises(DimensionError):
        build_hamiltonian([0.0, 1.0])


def test_mes_shell_membership():
    H = build_hamiltonian([[0.0] * 2] * 3)
    assert mes_shell(H, 0.0, 0.0).d_E == 8  # H = 0: the full space

    shell = mes_shell(two_level(3), 1.0, 0.0)
    assert shell.d_E == 3  # weight-1 strings

    with pytest.raises(EmptyShellError):
        mes_shell(two_level(3), -5.0, 0.1)

    B = shell.isometry()
    assert np.max(np.abs(B.conj().T @ B - np.eye(3))) < 1e-12


def test_mes_sample_support_and_uniform_weights():
    shell = mes_shell(two_level(4), 2.0, 0.0)
    rng = stream(21, 0)
    outside = np.setdiff1d(np.arange(shell.dim), shell.indices)
    n = 2000
    acc = np.zeros(shell.d_E)
    for _ in range(n):
        st = mes_sample(shell, rng)
        assert np.all(st.amp[outside] == 0)
        acc += np.abs(st.amp[shell.indices]) ** 2
    mean = acc / n
    # each member carries weight 1/d_E on average
    assert np.max(np.abs(mean - 1.0 / shell.d_E)) < 5 / np.sqrt(n)


def test_mes_sample_d_E_1():
    shell = mes_shell(two_level(3), 3.0, 0.0)
    assert shell.d_E == 1
    st = mes_sample(shell, stream(22, 0))
    assert abs(abs(st.amp[-1]) - 1.0) < 1e-12


def test_level_step():
    assert level_step(np.array([0.0, 1.0, 1.0, 2.0])) == 1.0
    assert level_step(np.array([3.0, 3.0])) == 0.0


def test_estimate_beta():
    flat = np.zeros(16)
    assert estimate_beta(flat, 0.0) == 0.0

    spec = two_level(8).total_spectrum()
    # half filling: binomial density of states is symmetric there
    assert abs(estimate_beta(spec, 4.0)) < 1e-10
    # below half filling the density of states still grows: beta > 0
    assert estimate_beta(spec, 1.5) > 0.0
    # oracle: exact binomial counts give beta = ln(C(8,2)/C(8,1)) between
    # the E=1 and E=2 levels; the smoothed estimate tracks it loosely
    exact = np.log(28.0 / 8.0)
    assert abs(estimate_beta(spec, 1.5) - exact) < 0.75 * exact


def test_gibbs_state_examples():
    g = gibbs_state(np.array([0.0, 1.0]), 0.0)
    assert np.allclose(g.entries, np.eye(2) / 2)
    g = gibbs_state(np.array([0.0, 1.0]), 200.0)
    assert np.allclose(g.entries, np.diag([1.0, 0.0]))
    g = gibbs_state(np.array([0.0, 1.0]), np.log(2.0))
    assert np.allclose(np.diag(g.entries).real, [2 / 3, 1 / 3])


def test_distance_helpers():
    a = np.diag([1.0, 0.0]).astype(complex)
    b = np.eye(2, dtype=complex) / 2
    from scramblab.states import DensityMatrix
    assert abs(trace_distance(DensityMatrix(2, a), DensityMatrix(2, b)) - 0.5) < 1e-12
    assert abs(hs_distance_sq(a, b) - 0.5) < 1e-12


def test_typicality_report_h0():
    H = build_hamiltonian([[0.0] * 2] * 8)
    shell = mes_shell(H, 0.0, 0.0)
    rep = typicality_report(H, shell, m=1, n_samples=100, rng=stream(23, 0))
    assert rep.beta == 0.0
    assert np.allclose(rep.gibbs, np.eye(2) / 2)  # comparator maximally mixed
    assert rep.mean_state_error <= 5 * rep.mean_state_se
    assert rep.hs_variance <= 4.0 / 257.0 * (1 + 5 / np.sqrt(100))


def test_typicality_variance_bound_arithmetic():
    H = two_level(8)
    shell = mes_shell(H, 1.0, 0.0)  # d_E = 8
    rep = typicality_report(H, shell, m=1, n_samples=50, rng=stream(24, 0))
    assert abs(rep.variance_bound - 4.0 / 9.0) < 1e-15
    shell16 = mes_shell(two_level(16), 1.0, 0.0)
    assert abs(2 ** 2 / (shell16.d_E + 1) - 4.0 / 17.0) < 1e-15


def test_typicality_quarter_filling_gibbs():
    H = two_level(8)
    shell = mes_shell(H, 2.0, 0.0)
    rep = typicality_report(H, shell, m=1, n_samples=200, rng=stream(25, 0))
    assert rep.hs_variance <= rep.variance_bound * (1 + 5 / np.sqrt(200))
    assert np.mean(rep.trace_distances <= 0.15) >= 0.9
    # beta comparator at quarter filling: exact level-count ratio ln 3
    assert abs(rep.beta - np.log(3.0)) < 0.3


def test_ensemble_mean_matches_shell_mixed_state():
    H = two_level(6)
    shell = mes_shell(H, 2.0, 0.0)
    ref = shell.projector_reduced(2).entries
    rng = stream(26, 0)
    n = 400
    acc = np.zeros_like(ref)
    for _ in range(n):
        acc += reduced_density(mes_sample(shell, rng), [1, 2]).entries
    assert np.max(np.abs(acc / n - ref)) < 5 / np.sqrt(n * shell.d_E)


def test_typicality_report_rejections():
    H = two_level(6)
    shell = mes_shell(H, 2.0, 0.0)
    with pytest.raises(ValueError):
        typicality_report(H, shell, m=4, n_samples=50, rng=stream(27, 0))
    with pytest.raises(ValueError):
        typicality_report(H, shell, m=1, n_samples=5, rng=stream(27, 1))
