"""
Diversification and entropy
===========================

Average standard deviation and entropy of random equally weighted
portfolios as the number of holdings grows.
"""
import numpy as np

from entropyrisk import GeneratorConfig, diversification_curve, generate

assets = generate(GeneratorConfig("one_factor_universe", 1858, seed=3,
                                  params={"n_assets": 20, "beta": 1.0, "sigma_m": 0.01,
                                          "sigma_eps": 0.02}))[1:]
curve = diversification_curve(assets, replications=200, seed=5)
theory = np.sqrt(0.01 ** 2 + 0.02 ** 2 / curve.k)

print(f"{'k':>3} {'avg std':>9} {'theory':>9} {'avg H':>8}")
for k, s, t, h in zip(curve.k, curve.avg_std, theory, curve.avg_entropy):
    print(f"{k:3d} {s:9.5f} {t:9.5f} {h:8.3f}")
# the floor is the market risk: sigma_m = 0.01 cannot be diversified away
