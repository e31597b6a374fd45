"""Plot-ready series extracted from run traces and run tables.

Emits plain CSV: coverage-percentage-over-time per run, robot trajectory
polylines, and turnaround time versus robot count when a runs table is
available.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path


def _iter_trace(path: Path):
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def emit_plot_data(trace_dir: Path, out_dir: Path) -> list[Path]:
    """Extract plot series from every ``trace_*.ndjson`` under ``trace_dir``
    (plus ``tt_by_robots.csv`` when a ``runs.csv`` sits beside them)."""
    trace_dir = Path(trace_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    traces = sorted(trace_dir.rglob("trace_*.ndjson"))
    cp_path = out_dir / "cp_series.csv"
    traj_path = out_dir / "trajectories.csv"
    with cp_path.open("w", newline="") as cp_fh, traj_path.open("w", newline="") as tr_fh:
        cp_writer = csv.writer(cp_fh)
        cp_writer.writerow(["scenario", "strategy", "seed", "t", "cp"])
        tr_writer = csv.writer(tr_fh)
        tr_writer.writerow(["scenario", "strategy", "seed", "id", "step", "x", "y"])
        for path in traces:
            scenario = strategy = ""
            seed = 0
            last_cp_t = None
            for rec in _iter_trace(path):
                if rec["type"] == "header":
                    scenario, strategy, seed = rec["scenario"], rec["strategy"], rec["seed"]
                elif rec["type"] == "state":
                    if rec["id"] == 0 and rec["t"] != last_cp_t:
                        cp_writer.writerow([scenario, strategy, seed,
                                            rec["t"], rec["cp"]])
                        last_cp_t = rec["t"]
                    tr_writer.writerow([scenario, strategy, seed, rec["id"],
                                        rec["step"], rec["x"], rec["y"]])
    written += [cp_path, traj_path]

    runs_csv = trace_dir / "runs.csv"
    if runs_csv.exists():
        rows = list(csv.DictReader(runs_csv.open()))
        tt_path = out_dir / "tt_by_robots.csv"
        with tt_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scenario", "strategy", "n_robots", "seed", "tt"])
            for row in rows:
                writer.writerow([row["scenario"], row["strategy"],
                                 row["n_robots"], row["seed"], row["tt"]])
        written.append(tt_path)
    return written
