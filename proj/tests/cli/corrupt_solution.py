import csv
import sys

src, dst = sys.argv[1], sys.argv[2]
with open(src) as f:
    rows = list(csv.reader(f))
rows[5][2] = "1.5"
with open(dst, "w", newline="") as f:
    csv.writer(f, lineterminator="\n").writerows(rows)
