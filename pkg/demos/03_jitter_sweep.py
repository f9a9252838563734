"""
Median delay MSE of both decoders under uniform timing jitter.

A reduced run (20 trials, three K values) so it finishes in a few seconds;
`iftem experiment mse` runs the full grid.
"""
from iftem.experiments import ExperimentConfig, run_mse_sweep

cfg = ExperimentConfig.mse_sweep(trials=20, K_values=(7, 11, 15))
table = run_mse_sweep(cfg)
print(" K  sigma   robust  baseline   gain (dB)")
for r in table.rows:
    print(f"{r['K']:2d} {r['sigma_s']:6.3f} {r['median_mse_robust_db']:8.1f} "
          f"{r['median_mse_baseline_db']:9.1f} {r['gain_db']:8.1f}")
table.to_csv("mse_sweep_small.csv")
