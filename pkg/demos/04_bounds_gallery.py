"""The bound calculators in one place: the doubled-sample Rademacher cap and
its Monte Carlo verification, the mean-operator deviation bound, the
excess-risk bounds with and without label noise, and the data-dependent
noise-robustness budget with its minimizer-distance corollary.
"""

import numpy as np

from meanop import (
    BoundInputs,
    NoiseSpec,
    Sample,
    aln_epsilon,
    c_of_XB,
    double_sample,
    empirical_rademacher_mc,
    exact_minimizer_square,
    expected_noisy_mean_vector,
    expected_noisy_risk,
    generalization_bound,
    get_loss,
    mean_op,
    mean_op_deviation_bound,
    minimizer_distance_bound,
    noisy_generalization_bound,
    rademacher_bound,
    rademacher_v,
)

rng = np.random.default_rng(11)

# %% 1. The doubled sample halves nothing for free: opposite-sign pairs
# cancel, pulling the complexity constant v(m) below the generic value.

print("v(m) =", ", ".join(f"{m}:{rademacher_v(m):.4f}" for m in (2, 8, 64, 1024)),
      "-> limit", f"{0.5 + 0.5 / np.sqrt(2):.4f}")

X = rng.normal(size=(64, 8))
X /= np.linalg.norm(X, axis=1).max()
s = Sample(X, rng.choice([-1.0, 1.0], 64))
est, se = empirical_rademacher_mc(double_sample(s), B=1.0, n_draws=50_000, seed=0,
                                  with_stderr=True)
cap = rademacher_bound(1.0, s.feature_bound, s.m)
print(f"MC complexity {est:.5f} (+-{se:.5f}) vs closed-form cap {cap:.5f}")

# %% 2. How far can the sample mean operator drift from its population value?

for m in (100, 1000, 10000):
    print(f"deviation cap (X=1, d=5, delta=0.05, m={m}): "
          f"{mean_op_deviation_bound(1.0, 5, m, 0.05):.4f}")

# %% 3. Excess-risk bounds.  Noise touches only the mean-operator term; the
# complexity term is label-free and survives corruption untouched.

loss = get_loss("logistic")
b = BoundInputs(X=1.0, B=1.0, L=loss.lipschitz, a=loss.odd_slope,
                m=10_000, d=10, delta=0.05, c_XB=c_of_XB(loss, 1.0, 1.0))
print(f"\nclean excess-risk bound:  {generalization_bound(b):.4f}")
for p in (0.1, 0.3, 0.45):
    nb = noisy_generalization_bound(b, NoiseSpec(p, p))
    print(f"noisy bound at p={p:.2f}:    {nb:.4f}")

# %% 4. The robustness budget 4|a| B max(p) ||mu||2 caps how much better the
# noisy-risk minimizer can be than the clean one, under the expected-flip
# risk; with strong convexity it also caps their distance.

X = rng.normal(size=(60, 4))
s = Sample(X, rng.choice([-1.0, 1.0], 60))
sq = get_loss("square")
p = 0.25
noise = NoiseSpec(p, p)
th_star = exact_minimizer_square(s, 0.0)
th_tilde = exact_minimizer_square(s, 0.0, mu=expected_noisy_mean_vector(s, noise))
gap = (expected_noisy_risk(s, sq, noise, th_star)
       - expected_noisy_risk(s, sq, noise, th_tilde))
B = max(np.linalg.norm(th_star.theta), np.linalg.norm(th_tilde.theta))
eps = aln_epsilon(sq.odd_slope, B, noise, mean_op(s).norm)
gamma = 2.0 * float(np.linalg.eigvalsh(X.T @ X / 60).min())
dist = float(np.linalg.norm(th_star.theta - th_tilde.theta))
print(f"\nexcess noisy risk {gap:.5f} <= budget {eps:.5f}")
print(f"minimizer distance {dist:.5f} <= cap {minimizer_distance_bound(eps, gamma):.5f}")
