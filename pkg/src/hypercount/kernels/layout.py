"""Variable positions of the XStrip matrix: x[0..6] = A0..A6, x[7..13] = B0..B6."""

A0, A1, A2, A3, A4, A5, A6 = range(7)
B0, B1, B2, B3, B4, B5, B6 = range(7, 14)
N_VARS = 14

# coordinates enumerated inside one shard (shards fix A1 and A3)
BASELINE_FREE = (A4, A5, A6, B2, B3, B4, B5, B6)
ACCELERATED_FREE = (A4, A5, A6, B3, B4, B5, B6)
MIDFORM_FREE = (A1, A2, A3, A4, A5, A6, B2, B3, B4, B5, B6)
