"""Shared numerical tolerance / threshold configuration.

All modules pull their default tolerances from a single record so that a
report can state exactly which thresholds were in force.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Tolerances:
    # linear-algebra hygiene
    unitarity: float = 1e-10
    unitarity_global: float = 1e-8
    norm: float = 1e-10
    hermiticity: float = 1e-12
    trace: float = 1e-10
    eigenvalue_floor: float = -1e-10
    schmidt_reassembly: float = 1e-8

    # statistical gates
    moment_sigma: float = 5.0          # MC-vs-exact gate, units of std error
    purity_sigma: float = 3.0

    # finite-N scaling gates: threshold = constant * d**(-(N-3)/2)
    gram_constant: float = 5.0
    isometry_constant: float = 1.0
    isometry_anisotropy_max: float = 0.2
    isometry_drift_max: float = 0.2

    # extraction grid conditioning
    node_condition_max: float = 1e3

    # memory cap on the global Hilbert-space dimension d**N
    dim_cap: int = 2 ** 16

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
