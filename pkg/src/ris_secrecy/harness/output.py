"""CSV and gnuplot emission for sweep results."""
from __future__ import annotations

import csv
from pathlib import Path

from .experiment import SCHEME_LABELS, SweepResult

HEADER = ("axis", "scheme", "mean_rate", "stderr", "n_trials", "seed")

AXIS_LABELS = {
    "Ps": "P_s (dBm)",
    "N": "number of RIS elements N",
    "x_max": "x_{max} (m)",
    "y_max": "y_{max} (m)",
    "z_max": "z_{max} (m)",
}


def emit_csv(result: SweepResult | None, path) -> Path:
    """One header row, then one row per (axis value, scheme) in sweep order."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        w.writerow(HEADER)
        for r in ([] if result is None else result.rows):
            w.writerow((repr(r.value), r.scheme, repr(r.mean), repr(r.stderr), r.n_trials, r.seed))
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k in ("axis", "mean_rate", "stderr"):
            r[k] = float(r[k])
        for k in ("n_trials", "seed"):
            r[k] = int(r[k])
    return rows


def emit_gnuplot(result: SweepResult, csv_path, script_path, image: str | None = None) -> Path:
    """A gnuplot script drawing mean rate +/- one standard error per scheme."""
    csv_name = Path(csv_path).name
    image = image or Path(csv_path).with_suffix(".png").name
    schemes = list(dict.fromkeys(r.scheme for r in result.rows))
    lines = [
        f"# secrecy rate versus {result.axis}; run with: gnuplot {Path(script_path).name}",
        "set datafile separator ','",
        "set terminal pngcairo size 800,560",
        f"set output '{image}'",
        f"set xlabel '{AXIS_LABELS.get(result.axis, result.axis)}'",
        "set ylabel 'average secrecy rate (bit/s/Hz)'",
        "set key top left",
        "set grid",
    ]
    plots = []
    for s in schemes:
        sel = f'(strcol(2) eq "{s}" ? $3 : NaN)'
        plots.append(f"'{csv_name}' every ::1 using 1:{sel}:4 with yerrorlines "
                     f"title '{SCHEME_LABELS.get(s, s)}'")
    lines.append("plot " + ", \\\n     ".join(plots) if plots else "# no data")
    path = Path(script_path)
    path.write_text("\n".join(lines) + "\n")
    return path
