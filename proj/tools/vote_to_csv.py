#!/usr/bin/env python3
"""Convert UCI house-votes-84.data to the pucut CSV layout.

Votes map to y=1, n=-1, ?=0. Democrats are the positive class.
Usage: vote_to_csv.py house-votes-84.data data/vote.csv
"""
import csv
import sys

VOTE = {"y": 1, "n": -1, "?": 0}


def main(src, dst):
    with open(src) as f:
        rows = [line.strip().split(",") for line in f if line.strip()]
    with open(dst, "w", newline="") as f:
        out = csv.writer(f, lineterminator="\n")
        out.writerow(["id"] + [f"v{i}" for i in range(16)] + ["label"])
        for i, row in enumerate(rows):
            label = 1 if row[0] == "democrat" else -1
            out.writerow([i] + [VOTE[v] for v in row[1:]] + [label])


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
