"""Seeded experiment drivers.

Each driver returns (rows, summary): `rows` is a list of flat dicts ready
for CSV export, `summary` carries the scalar diagnostics and a `passed`
flag against the configured thresholds.  All results are pure functions
of the master seed; trial fan-out across threads never changes the
output because trials own disjoint streams and reductions run in trial
order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from . import rng as rngmod
from .encoding import (EncoderSpec, Generator, cross_schmidt_overlaps, encode,
                       extract_components, gram_residual,
                       mean_marginal_purity_exact, mean_marginal_purity_mc,
                       overlap_factorization)
from .fisher import (capsule_metric_value, derivative_states, isometry_report,
                     qfi_metric, qfi_metric_direct, reparameterize_check)
from .haar import moment_mc, pattern_moment_exact
from .presets import generator as make_generator
from .tolerances import DEFAULT, Tolerances
from .typicality import build_hamiltonian, mes_shell, typicality_report

Rows = List[Dict]
Summary = Dict


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def child_seed(master_seed: int, trial: int, tag: int = 0) -> int:
    """Deterministic well-separated per-trial seed."""
    return int(rngmod.stream(master_seed, rngmod.TRIAL_TAG, tag, trial).integers(0, 2 ** 62))


# ---------------------------------------------------------------- moments

SECOND_MOMENT_SUITE = [
    ("|U11|^2", [((1, 1), False), ((1, 1), True)]),
    ("U11 U21*", [((1, 1), False), ((2, 1), True)]),
    ("U11 U12*", [((1, 1), False), ((1, 2), True)]),
    ("U11 U22*", [((1, 1), False), ((2, 2), True)]),
]

FOURTH_MOMENT_SUITE = [
    ("|U11|^4", [((1, 1), False), ((1, 1), False), ((1, 1), True), ((1, 1), True)]),
    ("|U11|^2 |U22|^2", [((1, 1), False), ((2, 2), False), ((1, 1), True), ((2, 2), True)]),
    ("|U11|^2 |U12|^2", [((1, 1), False), ((1, 2), False), ((1, 1), True), ((1, 2), True)]),
    ("|U11|^2 |U21|^2", [((1, 1), False), ((2, 1), False), ((1, 1), True), ((2, 1), True)]),
    ("|U12|^2 |U21|^2", [((1, 2), False), ((2, 1), False), ((1, 2), True), ((2, 1), True)]),
    ("|U12|^2 |U22|^2", [((1, 2), False), ((2, 2), False), ((1, 2), True), ((2, 2), True)]),
    ("U11 U22 U12* U21*", [((1, 1), False), ((2, 2), False), ((1, 2), True), ((2, 1), True)]),
    ("U12 U21 U11* U22*", [((1, 2), False), ((2, 1), False), ((1, 1), True), ((2, 2), True)]),
    ("U11 U12 U21* U22*", [((1, 1), False), ((1, 2), False), ((2, 1), True), ((2, 2), True)]),
    ("U11 U11 U12* U12*", [((1, 1), False), ((1, 1), False), ((1, 2), True), ((1, 2), True)]),
    ("U11 U21 U11* U12*", [((1, 1), False), ((2, 1), False), ((1, 1), True), ((1, 2), True)]),
    ("U11 U22 U11* U21*", [((1, 1), False), ((2, 2), False), ((1, 1), True), ((2, 1), True)]),
]


def haar_moments(dim: int, samples: int, master_seed: int, threads: int = 1,
                 tol: Tolerances = DEFAULT) -> Tuple[Rows, Summary]:
    """MC estimates of the fixed second- and fourth-moment suites against
    the closed forms, gated at `tol.moment_sigma` standard errors."""
    suite = [("second", name, p) for name, p in SECOND_MOMENT_SUITE]
    suite += [("fourth", name, p) for name, p in FOURTH_MOMENT_SUITE]

    def run_one(item):
        trial, (order, name, pattern) = item
        gen = rngmod.trial_stream(master_seed, 0, trial)
        est = moment_mc(dim, pattern, samples, gen)
        exact = pattern_moment_exact(dim, pattern)
        dev = abs(est.value - exact)
        nsig = dev / est.std_error if est.std_error > 0 else 0.0
        return {
            "order": order, "pattern": name, "dim": dim, "samples": samples,
            "mc_real": est.value.real, "mc_imag": est.value.imag,
            "exact": exact, "std_error": est.std_error,
            "n_sigma": nsig, "passed": int(nsig <= tol.moment_sigma),
        }

    rows = _map_ordered(run_one, list(enumerate(suite)), threads)
    worst = max(r["n_sigma"] for r in rows)
    return rows, {
        "dim": dim, "samples": samples, "patterns": len(rows),
        "worst_n_sigma": worst, "gate_sigma": tol.moment_sigma,
        "passed": all(r["passed"] for r in rows),
    }


# ------------------------------------------------------------- page purity

def page_purity(d: int, N_list: Sequence[int], samples: int, master_seed: int,
                threads: int = 1, tol: Tolerances = DEFAULT) -> Tuple[Rows, Summary]:
    """Mean first-qudit purity of Haar register states against the exact
    ensemble average, gated at `tol.purity_sigma` standard errors."""

    def run_one(item):
        i, N = item
        mean, se = mean_marginal_purity_mc(child_seed(master_seed, i), d, N, samples)
        exact = mean_marginal_purity_exact(d, N)
        nsig = abs(mean - exact) / se if se > 0 else 0.0
        return {
            "d": d, "N": N, "samples": samples, "mc_purity": mean,
            "exact_purity": exact, "std_error": se, "n_sigma": nsig,
            "passed": int(nsig <= tol.purity_sigma),
        }

    rows = _map_ordered(run_one, list(enumerate(N_list)), threads)
    return rows, {
        "d": d, "samples": samples,
        "worst_n_sigma": max(r["n_sigma"] for r in rows),
        "gate_sigma": tol.purity_sigma,
        "passed": all(r["passed"] for r in rows),
    }


# ------------------------------------------------------------ cross overlap

def cross_overlap(d: int, N_list: Sequence[int], m: int, n_seeds: int,
                  master_seed: int, threads: int = 1,
                  ratio_range: Tuple[float, float] = (0.3, 0.8)) -> Tuple[Rows, Summary]:
    """Median cross-input Schmidt-vector overlap versus register size and
    its per-step decay ratio."""
    N_list = list(N_list)

    def run_N(N):
        def one(t):
            return cross_schmidt_overlaps(master_seed, m, d, N, trial=t,
                                          experiment_id=N).magnitudes
        mags = np.concatenate(_map_ordered(one, range(n_seeds), threads))
        return float(np.median(mags))

    medians = [run_N(N) for N in N_list]
    rows = []
    logs = np.log(medians)
    slope = float(np.polyfit(N_list, logs, 1)[0]) if len(N_list) > 1 else 0.0
    for i, N in enumerate(N_list):
        ratio = medians[i] / medians[i - 1] if i > 0 else float("nan")
        rows.append({
            "d": d, "N": N, "m": m, "seeds": n_seeds,
            "median_overlap": medians[i],
            "ratio_vs_prev": ratio,
            "ideal_ratio": d ** (-0.5 * (N - N_list[i - 1])) if i > 0 else float("nan"),
        })
    decreasing = all(medians[i] < medians[i - 1] for i in range(1, len(medians)))
    ratios = [rows[i]["ratio_vs_prev"] for i in range(1, len(rows))]
    in_range = all(ratio_range[0] <= r <= ratio_range[1] for r in ratios)
    return rows, {
        "d": d, "m": m, "seeds": n_seeds, "decay_exponent": slope,
        "strictly_decreasing": decreasing, "ratios_in_range": in_range,
        "ratio_lo": ratio_range[0], "ratio_hi": ratio_range[1],
        "passed": decreasing and in_range,
    }


# -------------------------------------------------------------- components

def _make_spec(d: int, N: int, gens: Sequence[Generator], ports: Sequence[int],
               seed: int, **kwargs) -> EncoderSpec:
    return EncoderSpec(d=d, N=N, generators=tuple(gens), ports=tuple(ports),
                       master_seed=seed, **kwargs)


def components(d: int, n: int, N_list: Sequence[int], n_seeds: int, master_seed: int,
               generator_name: str = "pauli-z-like", threads: int = 1,
               tol: Tolerances = DEFAULT) -> Tuple[Rows, Summary]:
    """Component-vector Gram residuals over an ensemble of scramblers,
    gated at `tol.gram_constant * d^{-(N-3)/2}` and required to shrink
    from the smallest to the largest register."""
    gen = make_generator(generator_name)

    def run_one(args):
        N, t = args
        spec = _make_spec(d, N, [gen] * n, [1] * n, child_seed(master_seed, t, tag=N))
        return gram_residual(extract_components(spec, tol=tol))

    rows = []
    medians = {}
    for N in N_list:
        res = _map_ordered(run_one, [(N, t) for t in range(n_seeds)], threads)
        med = float(np.median(res))
        medians[N] = med
        scale = d ** (-(N - 3) / 2.0)
        rows.append({
            "d": d, "N": N, "n": n, "seeds": n_seeds, "generator": generator_name,
            "median_gram_residual": med, "max_gram_residual": float(np.max(res)),
            "finite_size_scale": scale, "threshold": tol.gram_constant * scale,
            "passed": int(med <= tol.gram_constant * scale),
        })
    N_lo, N_hi = min(N_list), max(N_list)
    shrinks = medians[N_hi] < medians[N_lo]
    return rows, {
        "d": d, "n": n, "seeds": n_seeds,
        "median_shrinks_with_N": shrinks,
        "passed": all(r["passed"] for r in rows) and shrinks,
    }


# ------------------------------------------------------------ factorization

def factorization(d: int, n: int, N_list: Sequence[int], delta: Sequence[float],
                  n_seeds: int, master_seed: int,
                  generator_name: str = "pauli-z-like", threads: int = 1,
                  error_max: float = 0.1) -> Tuple[Rows, Summary]:
    """Measured vs capsule-product overlap between encodings at theta=0 and
    theta=delta; the median error must honor the gate at the largest N and
    not grow with N."""
    gen = make_generator(generator_name)
    delta = list(delta)

    def run_one(args):
        N, t = args
        spec = _make_spec(d, N, [gen] * n, [1] * n, child_seed(master_seed, t, tag=N))
        measured, predicted = overlap_factorization(spec, [0.0] * n, delta)
        return abs(measured - predicted)

    rows = []
    medians = []
    for N in N_list:
        errs = _map_ordered(run_one, [(N, t) for t in range(n_seeds)], threads)
        med = float(np.median(errs))
        medians.append(med)
        rows.append({
            "d": d, "N": N, "n": n, "seeds": n_seeds, "delta": repr(delta),
            "median_abs_error": med, "max_abs_error": float(np.max(errs)),
            "finite_size_scale": d ** (-(N - 3) / 2.0),
        })
    non_increasing = all(medians[i] <= medians[i - 1] for i in range(1, len(medians)))
    gate = medians[-1] <= error_max
    return rows, {
        "d": d, "n": n, "seeds": n_seeds, "error_max": error_max,
        "median_at_largest_N": medians[-1],
        "non_increasing_in_N": non_increasing,
        "passed": gate and non_increasing,
    }


# ------------------------------------------------------------------ fisher

def fisher_two_route(n_frames: int, master_seed: int, d: int = 2, N: int = 6,
                     n: int = 2, generator_name: str = "pauli-z-like",
                     threads: int = 1, identity_max: float = 1e-10) -> Tuple[Rows, Summary]:
    """Max entry difference between the closed-form and literal-SLD metric
    routes on random encoded frames."""
    gen = make_generator(generator_name)

    def run_one(t):
        seed = child_seed(master_seed, t)
        spec = _make_spec(d, N, [gen] * n, [1] * n, seed)
        theta = rngmod.stream(seed, 7).uniform(-1.0, 1.0, size=n)
        frame = derivative_states(spec, theta)
        g1 = qfi_metric(frame).g
        g2 = qfi_metric_direct(frame).g
        return float(np.max(np.abs(g1 - g2)))

    diffs = _map_ordered(run_one, range(n_frames), threads)
    rows = [{"frame": t, "d": d, "N": N, "n": n, "max_route_diff": v}
            for t, v in enumerate(diffs)]
    worst = max(diffs)
    return rows, {"frames": n_frames, "worst_route_diff": worst,
                  "gate": identity_max, "passed": worst <= identity_max}


def fisher_derivative_check(n_specs: int, master_seed: int, d: int = 2, N: int = 6,
                            n: int = 2, generator_name: str = "pauli-z-like",
                            h: float = 1e-5, rel_max: float = 1e-6,
                            threads: int = 1) -> Tuple[Rows, Summary]:
    """Analytic derivatives against central finite differences at step h,
    with the second-order convergence ratio between h=1e-3 and h=1e-4."""
    gen = make_generator(generator_name)

    def fd_error(spec, theta, step):
        frame = derivative_states(spec, theta)
        worst = 0.0
        for j in range(spec.n):
            e = np.zeros(spec.n)
            e[j] = step
            fd = (encode(spec, theta + e).amp - encode(spec, theta - e).amp) / (2 * step)
            rel = np.linalg.norm(fd - frame.derivs[j]) / np.linalg.norm(frame.derivs[j])
            worst = max(worst, float(rel))
        return worst

    def run_one(t):
        seed = child_seed(master_seed, t)
        spec = _make_spec(d, N, [gen] * n, [1] * n, seed)
        theta = rngmod.stream(seed, 7).uniform(-1.0, 1.0, size=n)
        err_h = fd_error(spec, theta, h)
        err_c = fd_error(spec, theta, 1e-3)
        err_f = fd_error(spec, theta, 1e-4)
        ratio = err_c / err_f if err_f > 0 else float("inf")
        return {"spec": t, "d": d, "N": N, "n": n, "h": h,
                "rel_error": err_h, "err_1e3": err_c, "err_1e4": err_f,
                "convergence_ratio": ratio}

    rows = _map_ordered(run_one, range(n_specs), threads)
    worst = max(r["rel_error"] for r in rows)
    # central differences are O(h^2): a decade in h is a factor ~100 in error
    ratios_ok = all(r["convergence_ratio"] >= 30.0 for r in rows)
    return rows, {"specs": n_specs, "h": h, "worst_rel_error": worst,
                  "gate": rel_max, "second_order_ratios_ok": ratios_ok,
                  "passed": worst <= rel_max and ratios_ok}


# ---------------------------------------------------------------- isometry

def _theta_axes(n: int, grid: int, half_width: float = 0.6) -> List[np.ndarray]:
    return [np.linspace(-half_width, half_width, grid) for _ in range(n)]


def isometry(d: int, N: int, n: int, grid: int, n_seeds: int, master_seed: int,
             generator_name: str = "pauli-z-like", threads: int = 1,
             n_rotations: int = 10, tol: Tolerances = DEFAULT) -> Tuple[Rows, Summary]:
    """Rotational-isometry diagnostics of the metric on a theta grid over an
    ensemble of scramblers, plus exact chain-rule covariance under random
    orthogonal reparameterizations."""
    gen = make_generator(generator_name)
    F_ideal = capsule_metric_value(gen)
    axes = _theta_axes(n, grid)

    def run_one(t):
        spec = _make_spec(d, N, [gen] * n, [1] * n, child_seed(master_seed, t))
        rep = isometry_report(spec, axes, tol)
        return {
            "seed_index": t, "d": d, "N": N, "n": n, "grid": grid,
            "F_estimate": rep.F_estimate, "anisotropy": rep.anisotropy,
            "theta_drift": rep.theta_drift,
            "scaled_anisotropy": rep.scaled_anisotropy(),
            "scaled_drift": rep.scaled_drift(),
        }

    rows = _map_ordered(run_one, range(n_seeds), threads)
    med_aniso = float(np.median([r["anisotropy"] for r in rows]))
    med_drift = float(np.median([r["theta_drift"] for r in rows]))
    med_F = float(np.median([r["F_estimate"] for r in rows]))

    # chain-rule covariance on the first ensemble member
    spec0 = _make_spec(d, N, [gen] * n, [1] * n, child_seed(master_seed, 0))
    rot_rng = rngmod.stream(master_seed, 11)
    worst_chain = 0.0
    for _ in range(n_rotations):
        Q, _r = np.linalg.qr(rot_rng.standard_normal((n, n)))
        worst_chain = max(worst_chain,
                          reparameterize_check(spec0, np.full(n, 0.3), Q, tol))

    passed = (med_aniso <= tol.isometry_anisotropy_max
              and med_drift <= tol.isometry_drift_max
              and abs(med_F - F_ideal) <= 0.2
              and worst_chain <= 1e-8)
    return rows, {
        "d": d, "N": N, "n": n, "seeds": n_seeds,
        "median_anisotropy": med_aniso, "median_theta_drift": med_drift,
        "median_F": med_F, "F_ideal": F_ideal,
        "worst_chain_rule_residual": worst_chain,
        "anisotropy_max": tol.isometry_anisotropy_max,
        "drift_max": tol.isometry_drift_max,
        "passed": passed,
    }


def isometry_low_temperature(d: int, N: int, n: int, grid: int, n_pairs: int,
                             master_seed: int, shell_width: float = 1.0,
                             generator_name: str = "pauli-z-like", threads: int = 1,
                             fraction_min: float = 0.8,
                             tol: Tolerances = DEFAULT) -> Tuple[Rows, Summary]:
    """Paired comparison of metric anisotropy between full-space scrambling
    and scrambling restricted to a narrow low-energy shell."""
    gen = make_generator(generator_name)
    axes = _theta_axes(n, grid)
    H = build_hamiltonian([[0.0, 1.0]] * N) if d == 2 else \
        build_hamiltonian([list(range(d))] * N)
    shell = mes_shell(H, E_tot=shell_width, dE=shell_width)
    basis = shell.isometry()

    def run_one(t):
        seed = child_seed(master_seed, t)
        spec_hot = _make_spec(d, N, [gen] * n, [1] * n, seed)
        spec_cold = _make_spec(d, N, [gen] * n, [1] * n, seed,
                               scrambler_kind="subspace", shell_basis=basis)
        hot = isometry_report(spec_hot, axes, tol)
        cold = isometry_report(spec_cold, axes, tol)
        return {
            "pair": t, "d": d, "N": N, "n": n, "d_E": shell.d_E,
            "anisotropy_full": hot.anisotropy,
            "anisotropy_shell": cold.anisotropy,
            "F_full": hot.F_estimate, "F_shell": cold.F_estimate,
            "shell_larger": int(cold.anisotropy > hot.anisotropy),
        }

    rows = _map_ordered(run_one, range(n_pairs), threads)
    frac = sum(r["shell_larger"] for r in rows) / len(rows)
    return rows, {
        "d": d, "N": N, "n": n, "pairs": n_pairs, "d_E": shell.d_E,
        "fraction_shell_larger": frac, "fraction_min": fraction_min,
        "passed": frac >= fraction_min,
    }


# -------------------------------------------------------------- typicality

def typicality(d: int, N: int, m: int, samples: int, master_seed: int,
               E_tot: float = None, dE: float = 0.0, beta_width: float = None,
               trace_distance_max: float = 0.15, trace_fraction_min: float = 0.9,
               threads: int = 1) -> Tuple[Rows, Summary]:
    """Shell-typicality diagnostics.

    With no energy window given the Hamiltonian is zero (the full space is
    the shell, the comparator is maximally mixed); otherwise two-level
    sites with unit splitting and the window [E_tot - dE, E_tot].
    """
    if E_tot is None:
        H = build_hamiltonian([[0.0] * d] * N)
        shell = mes_shell(H, E_tot=0.0, dE=0.0)
    else:
        H = build_hamiltonian([[0.0, 1.0]] * N) if d == 2 else \
            build_hamiltonian([list(range(d))] * N)
        shell = mes_shell(H, E_tot=E_tot, dE=dE)
    rngs = rngmod.stream(master_seed, rngmod.SHELL_TAG)
    rep = typicality_report(H, shell, m, samples, rngs, beta_width=beta_width)

    var_gate = rep.variance_bound * (1.0 + 5.0 / np.sqrt(samples))
    frac_close = float(np.mean(rep.trace_distances <= trace_distance_max))
    mean_ok = rep.mean_state_error <= 5.0 * max(rep.mean_state_se, 1e-15)
    rows = [{
        "sample": t, "hs_distance_sq": float(v), "trace_distance_to_gibbs": float(td),
    } for t, (v, td) in enumerate(zip(rep.hs_distances_sq, rep.trace_distances))]

    summary = {
        "d": d, "N": N, "m": m, "samples": samples, "d_E": rep.d_E,
        "beta": rep.beta, "hs_variance": rep.hs_variance,
        "variance_bound": rep.variance_bound, "variance_gate": var_gate,
        "mean_state_error": rep.mean_state_error,
        "mean_state_se": rep.mean_state_se,
        "fraction_close_to_gibbs": frac_close,
        "trace_distance_max": trace_distance_max,
        "passed": (rep.hs_variance <= var_gate and mean_ok
                   and frac_close >= trace_fraction_min),
    }
    return rows, summary
