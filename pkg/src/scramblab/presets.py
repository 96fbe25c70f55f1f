"""Named write-generator presets and experiment registry."""

from __future__ import annotations

import numpy as np

from .encoding import Generator

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _pauli_z_like() -> Generator:
    return Generator.from_spectrum([1.0, -1.0])


def _pauli_x_like() -> Generator:
    return Generator.from_spectrum([1.0, -1.0], basis=_HADAMARD)


def _qutrit_clock() -> Generator:
    return Generator.from_spectrum([1.0, 0.0, -1.0])


GENERATOR_PRESETS = {
    "pauli-z-like": (_pauli_z_like, "d=2, w=+1,-1, computational eigenbasis"),
    "pauli-x-like": (_pauli_x_like, "d=2, w=+1,-1, Hadamard eigenbasis"),
    "qutrit-clock": (_qutrit_clock, "d=3, w=+1,0,-1, computational eigenbasis"),
}

EXPERIMENT_KINDS = (
    "haar-moments",
    "page-purity",
    "cross-overlap",
    "components",
    "factorization",
    "fisher",
    "isometry",
    "isometry-lowT",
    "typicality",
)


def generator(name: str) -> Generator:
    try:
        factory, _ = GENERATOR_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown generator preset {name!r}; "
                       f"known: {sorted(GENERATOR_PRESETS)}") from None
    return factory()


def list_presets() -> str:
    from .tolerances import DEFAULT
    lines = ["generator presets:"]
    for name, (_, desc) in GENERATOR_PRESETS.items():
        lines.append(f"  {name:<14s} ({desc})")
    lines.append("experiment kinds:")
    for kind in EXPERIMENT_KINDS:
        lines.append(f"  {kind}")
    lines.append("default tolerances:")
    for fname, val in vars(DEFAULT).items():
        lines.append(f"  {fname} = {val}")
    return "\n".join(lines)
