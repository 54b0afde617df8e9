"""
Deciding whether a score difference is real
===========================================

Each ladder comparison ends in a paired test over per-sentence word
correct rates at a strict alpha of 0.001. Only a significant increase
counts as a transition. This demo runs the test on three synthetic
situations: no true effect, a small shift, and a clear shift.
"""

import numpy as np

from lombardkit import paired_t_test, paired_wilcoxon_test, student_t_sf

rng = np.random.default_rng(8)
base = 70.0 + rng.normal(0.0, 4.0, 20)

for label, shift in (("no effect", 0.0), ("small shift", 2.0),
                     ("clear shift", 8.0)):
    high = base + shift + rng.normal(0.0, 2.0, 20)
    res = paired_t_test(base, high, alpha=0.001)
    print(f"{label:12s} mean diff = {res.mean_diff:6.2f}  "
          f"t = {res.statistic:7.3f}  p = {res.p_value:.2e}  "
          f"{'TRANSITION' if res.significant else 'no transition'}")

# a decrease is never a transition, no matter how small its p-value
res = paired_t_test(base, base - 8.0, alpha=0.001)
print(f"{'decrease':12s} mean diff = {res.mean_diff:6.2f}  "
      f"t = {res.statistic:7.3f}  p = {res.p_value:.2e}  "
      f"{'TRANSITION' if res.significant else 'no transition'}")

# the rank-based alternative agrees on clear cases
res = paired_wilcoxon_test(base, base + 8.0 + rng.normal(0, 2, 20), alpha=0.001)
print(f"{'wilcoxon':12s} statistic = {res.statistic:5.1f}  p = {res.p_value:.2e}  "
      f"{'TRANSITION' if res.significant else 'no transition'}")

# the tail function behind the t-test is exposed directly
print()
print(f"P(T > 2.093 | df=19) = {student_t_sf(2.093, 19):.6f}")
