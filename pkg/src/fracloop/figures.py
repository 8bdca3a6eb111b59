"""Figure rendering for parameter-sweep tables.

Figures are an optional visual aid on the scan path only; verification
reports stay table-only so their bodies remain byte-stable.  Requires the
``figures`` extra (matplotlib).
"""

from __future__ import annotations

import os
from collections import defaultdict
from typing import List, Optional, Sequence, Tuple

Row = Tuple[str, float, str, float]


def render_scan(rows: Sequence[Row], axis: str,
                out: Optional[str] = None) -> List[str]:
    """One PNG per observable, log-log when the axis spans decades.

    Returns the list of written paths.  ``out`` is the CSV path the sweep
    was written to (figures land next to it) or None (current directory).
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    base = os.path.splitext(out)[0] if out else f"scan_{axis}"
    series = defaultdict(list)
    for _, value, observable, observed in rows:
        series[observable].append((float(value), float(observed)))

    paths = []
    for observable, pts in sorted(series.items()):
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(xs, ys, marker="o", lw=1)
        if min(xs) > 0 and max(xs) / min(xs) > 50:
            ax.set_xscale("log")
        if min(ys) > 0 and max(ys) / min(ys) > 50:
            ax.set_yscale("log")
        ax.set_xlabel(axis)
        ax.set_ylabel(observable)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = f"{base}_{observable}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
