"""Every margin loss splits into an even part and an odd part; for many
common losses the odd part is exactly a line, and that single slope is all
the supervision machinery needs.  This walkthrough shows the decomposition,
detects the linear-odd members of the catalog, crafts new ones from even
functions, and bounds the odd part of the stubborn cases.
"""

import numpy as np

from meanop import (
    affine_odd_bound,
    catalog,
    craft_lol,
    even_part,
    get_loss,
    lol_slope_check,
    odd_part,
)
from meanop.losses import huber

# %% 1. The decomposition l(x) = l_e(x) + l_o(x), checked pointwise.

grid = np.linspace(-8, 8, 33)
print("decomposition residuals over [-8, 8]:")
for loss in catalog():
    resid = np.max(np.abs(loss.eval(grid) - (even_part(loss, grid) + odd_part(loss, grid))))
    print(f"  {loss.name:<12} max |l - (l_e + l_o)| = {resid:.2e}")

# %% 2. Which catalog losses have a linear odd part, and with what slope?
# The slope convention is (l(x) - l(-x)) / (2x).

print("\nlinear-odd detection on the sign-spanning grid:")
for loss in catalog():
    slope = lol_slope_check(loss)
    verdict = f"slope {slope:+.3f}" if slope is not None else "not linear-odd"
    print(f"  {loss.name:<12} {verdict}")

# %% 3. Any even function plus a line is a valid linear-odd loss.
# rho|x| + 1 with slope -rho reproduces the rho-loss family, which majorizes
# the 0/1 step loss and meets it at the origin.

rho = 1.0
crafted = craft_lol(lambda x: rho * np.abs(x) + 1.0, -rho, name="crafted_rho")
ref = get_loss("rho:1")
print("\ncrafted vs catalog rho-loss, max gap:",
      float(np.max(np.abs(crafted.eval(grid) - ref.eval(grid)))))
step = get_loss("zero_one")
print("majorizes the step loss:", bool(np.all(crafted.eval(grid) >= step.eval(grid))),
      "| value at 0:", float(crafted.eval(0.0)))

# %% 4. Losses with a nonlinear odd part can still be bounded by a line when
# the loss has two finite asymptotes.  The hinge admits the closed form
# -x/2 + 1/2; the Huber margin loss gets a numeric bound; the exponential
# has no affine bound at all (its odd part is -sinh).

b = affine_odd_bound(get_loss("hinge"))
print(f"\nhinge odd part <= {b.slope:+.2f} x + {b.intercept:.2f} (exact={b.exact})")
hb = affine_odd_bound(huber(1.0))
print(f"huber odd part <= {hb.slope:+.2f} x + {hb.intercept:.4f} (exact={hb.exact})")
try:
    affine_odd_bound(get_loss("exponential"))
except ValueError as exc:
    print("exponential:", exc)
