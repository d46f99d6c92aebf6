"""Write clock, contact and swing-height SVG figures for every gait."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from humanoid_wbc.export import line_plot_svg
from humanoid_wbc.gait import GaitKind, clock_trace, preset
from humanoid_wbc.swing import SwingProfile, trajectory_table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--f", type=float, default=2.0)
    ap.add_argument("--cycles", type=float, default=2.0)
    ap.add_argument("--l", type=float, default=0.15)
    args = ap.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for kind in GaitKind:
        rows = clock_trace(preset(kind), args.f, args.cycles)
        t = [r["t"] for r in rows]
        (out / f"clocks_{kind.value}.svg").write_text(line_plot_svg(
            t, {"clockL": [r["clockL"] for r in rows], "clockR": [r["clockR"] for r in rows]},
            f"{kind.value}: clock signals"))
        (out / f"contact_{kind.value}.svg").write_text(line_plot_svg(
            t, {"C1": [r["C1"] for r in rows], "C2": [r["C2"] for r in rows]},
            f"{kind.value}: expected contact"))
    table = trajectory_table(SwingProfile(args.l), 401)
    x = [r["phibar"] for r in table]
    (out / "swing_height.svg").write_text(line_plot_svg(
        x, {"height": [r["height"] for r in table]}, "swing height target"))
    (out / "swing_derivatives.svg").write_text(line_plot_svg(
        x, {"velocity": [r["velocity"] for r in table], "acceleration": [r["acceleration"] for r in table]},
        "swing derivatives"))
    for p in sorted(out.iterdir()):
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
