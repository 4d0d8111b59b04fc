"""Percentile-clipped heatmap bytes, written independently of the crate.

A 3x4 single-channel attribution map is clipped at the 90th percentile of
|a| (linear interpolation between order statistics) and scaled to 0..255
with round-half-away-from-zero.
"""
import json
import math
import sys

ATTR = [0.5, -2.0, 0.0, 1.25, -0.75, 3.5, 0.1, -0.1, 9.0, 2.0, -1.0, 0.3]
Q = 90.0


def percentile(sorted_vals, q):
    pos = q / 100.0 * (len(sorted_vals) - 1)
    lo, hi = math.floor(pos), math.ceil(pos)
    return sorted_vals[lo] + (sorted_vals[hi] - sorted_vals[lo]) * (pos - lo)


def main():
    mags = [abs(a) for a in ATTR]
    clip = percentile(sorted(mags), Q)
    out = [math.floor(min(m, clip) / clip * 255.0 + 0.5) for m in mags]
    json.dump({"attributions": ATTR, "shape": [3, 4, 1], "percentile": Q, "clip": clip, "bytes": out}, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
