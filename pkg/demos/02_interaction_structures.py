"""Efforts and marginal values for the four studied interaction structures.

G1 = sin|u - v|, G2 = logistic in u - v, G3 = block product with 5 levels,
G4 = block-diagonal logistic. Writes the (G, v_p, alpha*) data triplets with
the command-line tool and summarises them here.
"""
import sys
import tempfile
from pathlib import Path

import numpy as np

from graphon_contracts.cli import main
from graphon_contracts.io import read_table

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="figures-"))
assert main(["--out", str(out), "figures"], environ={}) == 0

for fam in ("G1", "G2", "G3", "G4"):
    _, tab = read_table(out / ("figure_%s_marginal.csv" % fam))
    u, vp = tab[:, 0], tab[:, 1]
    _, eff = read_table(out / ("figure_%s_effort.csv" % fam))
    print("%s  v_p in [%.4f, %.4f]  argmax u=%.3f  alpha*(0,.) max %.4f"
          % (fam, vp.min(), vp.max(), u[np.argmax(vp)], eff[0, 1:].max()))

_, g1 = read_table(out / "figure_G1_marginal.csv")
print("\nG1 reflection symmetry |v_p(u) - v_p(1-u)| <= %.1e" % np.max(np.abs(g1[:, 1] - g1[::-1, 1])))
_, g3 = read_table(out / "figure_G3_marginal.csv")
print("G3 levels:", np.unique(np.round(g3[:, 1], 9)))
_, g4 = read_table(out / "figure_G4_marginal.csv")
block = np.concatenate([[0], np.cumsum(np.diff(g4[:, 0]) == 0)])
print("G4 within-block spread of v_p:", np.round([np.ptp(g4[block == b, 1]) for b in range(5)], 4))
print("\ndata written to", out)
