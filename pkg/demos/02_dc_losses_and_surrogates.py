"""The DC loss catalog and its smoothed surrogates.

Each loss splits as phi = f - g with convex parts; the smoothed version
replaces both parts by their Moreau envelopes.  The surrogate brackets
the true loss within mu * max(L_f^2, L_g^2), so driving the smoothing
scale to zero recovers the loss.
"""

import numpy as np

from dcvs import make_loss, surrogate_at_residual

n = 8
z = np.array([0.3, -2.0, 5.0, -0.1, 1.2, -4.0, 0.05, 9.0])

losses = [
    make_loss("l1", n),
    make_loss("mcp", n, lam=1.0, beta=2.0),
    make_loss("capped_l1", n, beta=2.0),
    make_loss("trimmed_l1", n, K=2),
]

print(f"residual z = {z}")
print()
print("== loss values (f - g split) ==")
for loss in losses:
    print(f"  {loss.name:11s}: phi={loss.phi_value(z):8.4f}   "
          f"f={loss.f_value(z):8.4f}   g={loss.g_value(z):8.4f}   "
          f"(L_f={loss.L_f:.2f}, L_g={loss.L_g:.2f})")

print()
print("== surrogate value -> true loss as the smoothing shrinks ==")
header = "  mu      " + "".join(f"{loss.name:>14s}" for loss in losses)
print(header)
for mu in (1.0, 0.3, 0.1, 0.03, 0.01):
    vals = [surrogate_at_residual(loss, z, mu)[0] for loss in losses]
    print(f"  {mu:5.2f} " + "".join(f"{v:14.4f}" for v in vals))
print("  exact " + "".join(f"{loss.phi_value(z):14.4f}" for loss in losses))

print()
print("== the trimmed loss ignores its K largest residuals ==")
for K in (0, 1, 2, 4):
    loss = make_loss("trimmed_l1", n, K=K)
    print(f"  K={K}: phi={loss.phi_value(z):8.4f}")
