"""The simulated benchmark table at demo scale.

Runs the full method roster (both shrinkage targets, all mean rules,
cross-validated and analytic intensity selection) on a reduced instance so
it finishes in seconds. The full-scale run (p=1000) is
`rlda experiment --seed 1` or `run_simulated_experiment(seed=1)` and takes
around twenty seconds per seed.
"""

from rlda.selection import render_experiment_text, run_simulated_experiment

report = run_simulated_experiment(seed=1, n=25, m=25, p=120, shift_count=5, folds=5)
print(render_experiment_text(report))
print()
best = max(report["rows"], key=lambda r: (r["accuracy"], -r["n_variables"]))
print(
    f"best row: target={best['target']} mean-reg={best['mean_reg']} "
    f"accuracy={best['accuracy']:.3f} using {best['n_variables']} variables"
)
