"""Plot the output of `nerve-orbits portrait`.

    nerve-orbits portrait --config scenarios/portrait.conf --out out/portrait
    python3 docs/plot.py out/portrait

Writes curves.png (g s against n F(s), whose crossings right of a are the
centers a_n) and portrait.png (the orbit segments in the phase plane).
"""

import csv
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {key: [float(r[key]) for r in rows] for key in rows[0]} if rows else {}


def curves(out):
    data = read(os.path.join(out, "curves.csv"))
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = sorted(set(data["n"]))
    for n in ns:
        idx = [i for i, v in enumerate(data["n"]) if v == n]
        ax.plot([data["s"][i] for i in idx], [data["nF"][i] for i in idx], label=f"n = {n:g}")
    idx = [i for i, v in enumerate(data["n"]) if v == ns[0]]
    ax.plot([data["s"][i] for i in idx], [data["gs"][i] for i in idx], "k--", label="g s")
    ax.axhline(0.0, color="grey", lw=0.5)
    ax.set_xlabel("s")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(out, "curves.png"), dpi=150)


def portrait(out):
    fig, ax = plt.subplots(figsize=(6, 5))
    for path in sorted(glob.glob(os.path.join(out, "portrait_*.csv"))):
        seg = read(path)
        if seg:
            ax.plot(seg["x"], seg["y"], lw=0.8)
    # orbits outside the separatrix escape; keep the view on the bounded ones
    ax.set_xlim(-0.25, 1.5)
    ax.set_ylim(-1.2, 1.2)
    ax.set_xlabel("v")
    ax.set_ylabel("v'")
    fig.tight_layout()
    fig.savefig(os.path.join(out, "portrait.png"), dpi=150)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out"
    curves(out)
    portrait(out)
