"""
Checking the hand-written gradients
===================================

Every parameter block is compared with float64 central differences on a small
random model over a 12-node tree.
"""

# %%
import time

from hiertype.gradcheck import TOLERANCE, run_gradcheck

t0 = time.perf_counter()
worst = {}
for seed in range(10):
    for name, err in run_gradcheck(seed, d_w=6, d_h=8, d_t=8).items():
        worst[name] = max(worst.get(name, 0.0), err)
for name, err in worst.items():
    print(f"{name:<9} {err:.2e}", "ok" if err <= TOLERANCE else "FAIL")
print(f"{time.perf_counter() - t0:.1f}s")
