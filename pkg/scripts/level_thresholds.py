"""Tabulate the half-mass radius T(k) and the level threshold n0(k).

For each weight the table lists the least level whose lattice check passes,
and the smallest-norm violating element at every lower level. Output is CSV
on stdout.
"""

import argparse
import csv
import math
import sys

from poincare_lab.certify import level_threshold, mass_radius


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kmin", type=int, default=3)
    parser.add_argument("--kmax", type=int, default=16)
    args = parser.parse_args()

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["k", "T", "exp_T", "n0", "witnesses"])
    for k in range(args.kmin, args.kmax + 1):
        lt = level_threshold(k)
        wit = ";".join(f"N={N}:{list(w.entries())}" for N, w in lt.rejected)
        out.writerow([k, f"{mass_radius(k):.12f}", f"{math.exp(lt.T):.6f}", lt.n0, wit])


if __name__ == "__main__":
    main()
