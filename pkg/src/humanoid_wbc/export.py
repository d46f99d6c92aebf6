"""CSV and SVG exports of rollout logs."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .gait import ContactModelParams, contact_probability
from .rewards import TERMS, RewardConfig, compute_rewards, swing_targets
from .rollout import RolloutLog

COLORS = ("#7b3fa0", "#2e8b57", "#1f77b4", "#d4a017", "#c0392b", "#555555")


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def line_plot_svg(x, series: dict, title: str = "", width: int = 640, height: int = 320) -> str:
    """Minimal self-contained SVG line chart."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    pad = 40
    lo = min(float(np.min(v)) for v in ys.values())
    hi = max(float(np.max(v)) for v in ys.values())
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    x0, x1 = float(x[0]), float(x[-1]) if len(x) > 1 else float(x[0]) + 1.0

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{pad - 4}" y="{py(hi):.1f}" text-anchor="end" font-size="10">{hi:.3g}</text>',
        f'<text x="{pad - 4}" y="{py(lo):.1f}" text-anchor="end" font-size="10">{lo:.3g}</text>',
    ]
    for n, (name, y) in enumerate(ys.items()):
        color = COLORS[n % len(COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - pad + 4}" y="{pad + 14 * n}" font-size="10" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def phase_rows(log: RolloutLog) -> list[dict]:
    params = ContactModelParams(log.sigma)
    rows = []
    for s in log.steps:
        pb = s.phi_bar
        c = contact_probability(pb, params)
        rows.append({
            "t": s.t, "phi1": s.phase[0], "phi2": s.phase[1], "phibar1": pb[0], "phibar2": pb[1],
            "clockL": math.sin(2 * math.pi * pb[0]), "clockR": math.sin(2 * math.pi * pb[1]),
            "C1": c[0], "C2": c[1],
        })
    return rows


def swing_rows(log: RolloutLog, config: RewardConfig | None = None) -> list[dict]:
    config = config or RewardConfig()
    rows = []
    for s, c in zip(log.steps, log.commands):
        tgt = swing_targets(s, c, config)
        rows.append({"t": s.t, "target1": tgt[0], "target2": tgt[1],
                     "actual1": s.swing_height[0], "actual2": s.swing_height[1]})
    return rows


def reward_rows(log: RolloutLog, config: RewardConfig | None = None) -> list[dict]:
    config = config or RewardConfig(contact=ContactModelParams(log.sigma))
    rows = []
    for s, c in zip(log.steps, log.commands):
        b = compute_rewards(s, c, config)
        row = {"step": s.step, "t": s.t, "intervention": s.intervention}
        row.update({k: b[k].contribution for k in TERMS})
        row["total"] = b.total
        rows.append(row)
    return rows


REWARD_COLUMNS = ("step", "t", "intervention", *TERMS, "total")
PHASE_COLUMNS = ("t", "phi1", "phi2", "phibar1", "phibar2", "clockL", "clockR", "C1", "C2")
SWING_COLUMNS = ("t", "target1", "target2", "actual1", "actual2")


def export_curves(log: RolloutLog, out_dir: str | Path, svg: bool = False) -> list[Path]:
    """Write phases/swing/rewards CSVs (and SVG plots) into ``out_dir``."""
    if len(log) == 0:
        raise ValueError("cannot export an empty log")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    phases, swing, rewards = phase_rows(log), swing_rows(log), reward_rows(log)
    files = {
        "phases.csv": rows_to_csv(phases, PHASE_COLUMNS),
        "swing.csv": rows_to_csv(swing, SWING_COLUMNS),
        "rewards.csv": rows_to_csv(rewards, REWARD_COLUMNS),
    }
    if svg:
        t = [r["t"] for r in phases]
        files["clocks.svg"] = line_plot_svg(t, {"clockL": [r["clockL"] for r in phases],
                                                "clockR": [r["clockR"] for r in phases]}, "clock signals")
        files["contact.svg"] = line_plot_svg(t, {"C1": [r["C1"] for r in phases],
                                                 "C2": [r["C2"] for r in phases]}, "contact probability")
        files["swing.svg"] = line_plot_svg(t, {k: [r[k] for r in swing] for k in SWING_COLUMNS[1:]},
                                           "swing height target vs actual")
        files["rewards.svg"] = line_plot_svg(t, {"total": [r["total"] for r in rewards]}, "total reward")
    written = []
    for name, text in files.items():
        path = out_dir / name
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    return written
