"""CSV/JSON emission of sweep results and the standalone plot script."""

from __future__ import annotations

import csv
import json
import os

from .sweeps import CSV_COLUMNS, SweepResult, SweepRow


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(result: SweepResult, path: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for row in result.rows:
                w.writerow([_fmt(v) for v in row.as_tuple()])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_csv(path: str) -> list:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        for name, value, kind, r, se, cf in reader:
            v = int(value) if name == "M" else float(value)
            rows.append(SweepRow(name, v, kind, float(r), float(se), float(cf) if cf else None))
    return rows


def to_json(result: SweepResult) -> str:
    doc = {
        "metadata": result.metadata,
        "columns": list(CSV_COLUMNS),
        "rows": [dict(zip(CSV_COLUMNS, row.as_tuple())) for row in result.rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False)


def write_json(result: SweepResult, path: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(to_json(result))
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def emit(result: SweepResult, path: str, fmt: str = "csv") -> list:
    """Write ``result`` to ``path``; CSV output also gets a ``.meta.json`` sidecar.

    Returns the list of files written.
    """
    if fmt == "csv":
        write_csv(result, path)
        meta = os.path.splitext(path)[0] + ".meta.json"
        try:
            with open(meta, "w") as fh:
                json.dump(result.metadata, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"cannot write {meta}: {exc.strerror}") from exc
        return [path, meta]
    if fmt == "json":
        write_json(result, path)
        return [path]
    raise ValueError(f"unknown output format {fmt!r}")


PLOT_SCRIPT = '''\
#!/usr/bin/env python3
"""Render achievable-rate curves from a jamrx sweep CSV.

usage: python {script} [results.csv] [figure.png]
"""
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

LABELS = {{"mrc": "MRC", "mmse": "MMSE-type", "zf": "ZF-type"}}
XLABEL = {{"M": "Number of BS antennas M", "q": "Jamming power q_t = q_d [dB]"}}

src = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
dst = sys.argv[2] if len(sys.argv) > 2 else src.rsplit(".", 1)[0] + ".png"
sim = defaultdict(list)
anal = defaultdict(list)
axis = "M"
with open(src, newline="") as fh:
    for row in csv.DictReader(fh):
        axis = row["axis_name"]
        x = float(row["axis_value"])
        sim[row["filter"]].append((x, float(row["rate_sim_bits_per_symbol"]),
                                   float(row["rate_sim_stderr"])))
        if row["rate_closed_form_bits_per_symbol"]:
            anal[row["filter"]].append((x, float(row["rate_closed_form_bits_per_symbol"])))

fig, ax = plt.subplots(figsize=(5, 3.6))
for i, (kind, pts) in enumerate(sorted(sim.items())):
    x, y, e = zip(*pts)
    line = ax.errorbar(x, y, yerr=e, marker="o", ms=4, capsize=2,
                       label=LABELS.get(kind, kind) + " (Simul.)")
    if anal.get(kind):
        xa, ya = zip(*anal[kind])
        ax.plot(xa, ya, ls="--", color=line[0].get_color(),
                label=LABELS.get(kind, kind) + " (Anal.)")
ax.set_xlabel(XLABEL.get(axis, axis))
ax.set_ylabel("Achievable rate [bits/symbol]")
ax.grid(alpha=0.3, ls="--")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(dst, dpi=200)
print(dst)
'''


def write_plot_script(csv_path: str, script_path: str) -> str:
    with open(script_path, "w") as fh:
        fh.write(PLOT_SCRIPT.format(script=os.path.basename(script_path), csv_path=csv_path))
    os.chmod(script_path, 0o755)
    return script_path
