"""Truncated values, certified tails and absolute partial sums across radii.

Shows how fast the truncated series settles compared with the certified
tail bound, e.g. for the vanishing case k=4, N=2 or the non-vanishing case
k=12, N=3. Output is CSV on stdout.
"""

import argparse
import csv
import sys

from poincare_lab.group import GroupElement
from poincare_lab.poincare import absolute_partial_sums, eval_truncated


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--N", type=int, default=2)
    parser.add_argument("--probe", default="1,0,0,1", help="group element a,b,c,d")
    parser.add_argument("--radii", default="5,10,20,40,80,160")
    args = parser.parse_args()

    g = GroupElement(*(float(x) for x in args.probe.split(",")))
    radii = [float(r) for r in args.radii.split(",")]
    abs_sums = absolute_partial_sums(args.k, args.N, g, radii)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["radius", "terms", "value_re", "value_im", "tail_bound", "abs_partial_sum"])
    for R, s in zip(radii, abs_sums):
        tv = eval_truncated(args.k, args.N, g, R)
        out.writerow([R, tv.term_count, f"{tv.value.real:.15g}", f"{tv.value.imag:.15g}", f"{tv.tail_bound:.6g}",
                      f"{s:.15g}"])


if __name__ == "__main__":
    main()
