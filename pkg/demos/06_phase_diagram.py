"""A small certificate phase diagram with the two boundary curves.

The full-size experiment (n=300, alpha 2..40, beta 0..10, 20 trials) lives in
the acceptance suite; this demo runs a reduced grid so it finishes in under a
minute and writes both CSVs next to itself.

Run: python demos/06_phase_diagram.py
"""

import pathlib
import time

from sbmx.harness import boundary_curves, format_curves_csv, format_phase_csv, phase_diagram

here = pathlib.Path(__file__).parent
alphas = [4, 8, 12, 16, 20, 24]
betas = [0, 1, 2, 4]

start = time.time()
points = phase_diagram("certificate", 300, alphas, betas, trials=10, base_seed=71, workers=2)
print(f"swept {len(points)} grid points in {time.time() - start:.1f}s\n")

curves = {pt.beta: pt for pt in boundary_curves(betas)}
print("rate grid (rows alpha, cols beta); * marks points above the optimal curve")
header = "alpha\\beta " + "".join(f"{b:>8}" for b in betas)
print(header)
for a in alphas:
    row = [f"{a:>10}"]
    for b in betas:
        pt = next(p for p in points if p.alpha == a and p.beta == b)
        mark = "*" if a > curves[b].alpha_red else " "
        row.append(f"{pt.rate:>7.2f}{mark}")
    print("".join(row))

print("\nboundary curves (alpha roots per beta)")
for b in betas:
    c = curves[b]
    print(f"  beta={b}: optimal {c.alpha_red:.3f}, certificate guarantee {c.alpha_green:.3f}")

phase_csv = here / "phase_demo.csv"
curves_csv = here / "curves_demo.csv"
phase_csv.write_text(format_phase_csv(points))
curves_csv.write_text(format_curves_csv(boundary_curves(betas)))
print(f"\nwrote {phase_csv.name} and {curves_csv.name}")
