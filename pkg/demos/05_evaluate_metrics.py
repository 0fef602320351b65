"""Optimality / sub-optimality / failure metrics from a counting matrix.

Loads the shipped 51-film reference matrix (data/fig7.csv), prints the
metric table, and then rebuilds a matrix from raw (segmented, total)
pairs to show the accumulation path used by the phantom benchmark.
"""

from pathlib import Path

from periseg.evaluation import accumulate, film_totals, load_csv, report

root = Path(__file__).resolve().parent.parent

m = load_csv(root / "data" / "fig7.csv")
print("film totals per scene size:", film_totals(m))
print(report(m).to_table())

# the same machinery consumed pair-by-pair, as the benchmark does
pairs = [(3, 3), (3, 3), (2, 3), (4, 4), (0, 2), (2, 2)]
m2 = accumulate(pairs)
print("from raw pairs", pairs)
print(report(m2).to_table())
