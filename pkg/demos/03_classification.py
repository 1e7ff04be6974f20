"""Sparse logistic regression and squared-hinge classification with NTP and StoNTP.

    python3 demos/03_classification.py
"""
from sparsethresh import load_config, misclassification_rate, recipe_path, run_trial

for recipe in ("logistic_ntp", "logistic_stontp", "svm_ntp", "svm_stontp"):
    cfg = load_config(recipe_path(recipe))
    inst, obj, x, trace = run_trial(cfg, 0)
    err = misclassification_rate(inst.matrix, inst.target, x)
    print(f"{recipe:22s} iterations={len(trace) - 1} objective={obj.value(x):.2e} training error={err:.2f}")
