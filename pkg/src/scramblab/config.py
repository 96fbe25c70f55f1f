"""Experiment configuration: a flat key-value record with one section,
emitted and parsed losslessly so runs can be reproduced from their own
output directory."""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 1
    d: int = 2
    N: int = 8
    n: int = 2
    m: int = 2
    dim: int = 8
    samples: int = 100000
    seeds: int = 50
    grid: int = 3
    generator: str = "pauli-z-like"
    N_list: Tuple[int, ...] = ()
    delta: Tuple[float, ...] = (0.3, 0.7)
    E_tot: Optional[float] = None
    dE: float = 0.0
    beta_width: Optional[float] = None
    threads: int = 1
    out: str = "results"

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str  # keep N and n distinct
        cp["experiment"] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            cp["experiment"][f.name] = "" if v is None else str(v)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp.read_string(text)
        sec = cp["experiment"]
        kwargs = {}
        for f in fields(cls):
            if f.name not in sec:
                continue
            raw = sec[f.name]
            kwargs[f.name] = _parse_field(f.name, raw)
        return cls(**kwargs)

    def config_hash(self) -> str:
        """Hash of the science-relevant settings; execution details
        (worker count, output path) are excluded so reruns match
        byte-for-byte regardless of them."""
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp.read_string(self.to_ini())
        for name in ("threads", "out"):
            cp.remove_option("experiment", name)
        buf = io.StringIO()
        cp.write(buf)
        return hashlib.sha256(buf.getvalue().encode()).hexdigest()[:12]


_INT_FIELDS = {"seed", "d", "N", "n", "m", "dim", "samples", "seeds", "grid", "threads"}
_OPT_FLOAT_FIELDS = {"E_tot", "beta_width"}
_FLOAT_FIELDS = {"dE"}


def _parse_field(name: str, raw: str):
    if name in _INT_FIELDS:
        return int(raw)
    if name in _FLOAT_FIELDS:
        return float(raw)
    if name in _OPT_FLOAT_FIELDS:
        return None if raw == "" else float(raw)
    if name == "N_list":
        return tuple(int(x) for x in raw.split(",") if x)
    if name == "delta":
        return tuple(float(x) for x in raw.split(",") if x)
    return raw


def as_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)
