"""
Market Model risk and information measures
==========================================

Systematic risk lines up with the information a stock shares with the
market, specific risk with what is left over.
"""
import numpy as np
from scipy import stats

from entropyrisk import (GeneratorConfig, entropy_decomposition, fit_market_model, generate,
                         mutual_information_adaptive)

betas = np.linspace(0.3, 2.4, 8)
noise = np.array([0.02, 0.01, 0.015, 0.022, 0.012, 0.018, 0.011, 0.016])
market, *assets = generate(GeneratorConfig(
    "one_factor_universe", 1858, seed=0,
    params={"n_assets": 8, "beta": betas.tolist(), "sigma_eps": noise.tolist(), "sigma_m": 0.012}))

rows = []
print(f"{'asset':>5} {'beta':>6} {'systematic':>11} {'MI':>7} {'specific':>10} {'H(X|M)':>8}")
for a in assets:
    fit = fit_market_model(a, market)
    mi = mutual_information_adaptive(a, market)[0].value
    h_cond = entropy_decomposition(a, market)["h_cond"]
    rows.append((fit.systematic_risk, mi, fit.specific_risk, h_cond))
    print(f"{a.ticker:>5} {fit.beta:6.2f} {fit.systematic_risk:11.2e} {mi:7.3f} "
          f"{fit.specific_risk:10.2e} {h_cond:8.3f}")

sys_, mi, spec, hc = np.array(rows).T
print(f"\nSpearman(systematic, MI) = {stats.spearmanr(sys_, mi).statistic:.2f}")
print(f"Spearman(specific, H(X|M)) = {stats.spearmanr(spec, hc).statistic:.2f}")
