"""Tabular result output: UTF-8 CSV tables with provenance comment
headers, plus a sidecar plain-text summary."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Dict, List

from . import __version__


def _provenance_lines(config_hash: str, seed: int) -> List[str]:
    return [
        f"# config_hash={config_hash}",
        f"# master_seed={seed}",
        f"# tool_version={__version__}",
    ]


def render_csv(rows: List[Dict], config_hash: str, seed: int) -> str:
    buf = io.StringIO()
    for line in _provenance_lines(config_hash, seed):
        buf.write(line + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def render_summary(summary: Dict, config_hash: str, seed: int) -> str:
    lines = _provenance_lines(config_hash, seed)
    for k, v in summary.items():
        lines.append(f"{k} = {_fmt(v)}")
    lines.append(f"result = {'PASS' if summary.get('passed') else 'FAIL'}")
    return "\n".join(lines) + "\n"


def write_outputs(out_dir: Path, name: str, rows: List[Dict], summary: Dict,
                  config_text: str, config_hash: str, seed: int) -> Dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out_dir / f"{name}.csv",
        "summary": out_dir / f"{name}_summary.txt",
        "config": out_dir / f"{name}_config.ini",
    }
    paths["csv"].write_text(render_csv(rows, config_hash, seed), encoding="utf-8")
    paths["summary"].write_text(render_summary(summary, config_hash, seed), encoding="utf-8")
    paths["config"].write_text(config_text, encoding="utf-8")
    return paths


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)
