"""Upper-bound gap analysis on hand-entered tables.

A blind method's per-case PSNR is compared against per-case upper bounds
(networks trained on exactly one degradation).  The gap table shows where
the blind method loses the most; a negative delta means the method beat
its upper bound on that case.
"""

from degraforge import compute_gap, render_gap_csv, render_gap_markdown

# a classical five-case evaluation: blind one-branch network vs upper bounds
method = {"bic": 26.51, "0.6": 27.25, "1.2": 28.07, "1.8": 28.42, "2.4": 28.43}
upper = {"bic": 26.75, "0.6": 27.46, "1.2": 28.43, "1.8": 28.71, "2.4": 28.74}

gap = compute_gap(method, upper)
print(render_gap_markdown(gap))
print(render_gap_csv(gap))

# swapping the inputs negates every delta (sanity property)
swapped = compute_gap(upper, method)
print("antisymmetry check:",
      all(a.delta == -b.delta for a, b in zip(gap.rows, swapped.rows)))
