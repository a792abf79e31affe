"""Walk through the core fairness criteria on the bundled 100-row dataset.

Run from the repository root:

    python3 demos/metrics_walkthrough.py
"""

from pathlib import Path

from fairlens import (
    SliceFilter,
    demographic_parity,
    equalized_odds,
    equalized_opportunity,
    load_dataset_csv,
    permutation_test,
    threshold_predictions,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

# The fixture has continuous y_score values, so first turn them into
# binary predictions at the 0.5 operating point.
dataset = load_dataset_csv(
    FIXTURES / "fixture100.csv",
    protected_attributes=["sex", "race"],
    declared_features=["income"],
    name="credit-screening-eval",
)
dataset = threshold_predictions(dataset, 0.5)
print(f"dataset: {dataset.name}, {len(dataset)} records")
print(f"protected attributes: {', '.join(dataset.protected_attributes)}")
print()

# Demographic parity compares positive-prediction rates between groups.
# min_support=1 keeps every group in view; the default of 30 would still
# include them but tag small groups with a warning.
dp = demographic_parity(dataset, "sex", min_support=1)
print("demographic parity by sex")
for group, value in sorted(dp.group_values.items()):
    print(f"  positive rate [{group}]: {value:.4f}")
print(f"  gap:   {dp.gap:.4f}")
print(f"  ratio: {dp.ratio:.4f}")
print()

# Equalized opportunity looks only at records whose ground truth is
# positive: of the people who should have been approved, how many were?
eo = equalized_opportunity(dataset, "sex", min_support=1)
print("equalized opportunity by sex")
for group, value in sorted(eo.group_values.items()):
    print(f"  TPR [{group}]: {value:.4f}")
print(f"  gap: {eo.gap:.4f}")
print()

# Equalized odds constrains both error rates at once. Its headline gap is
# the worse of the TPR and FPR gaps.
odds = equalized_odds(dataset, "race", min_support=1)
print("equalized odds by race")
print(f"  TPR gap: {odds.details['tpr_gap']:.4f}")
print(f"  FPR gap: {odds.details['fpr_gap']:.4f}")
print(f"  FNR gap: {odds.details['fnr_gap']:.4f}  (always equals the TPR gap)")
print(f"  headline gap: {odds.gap:.4f}")
print()

# The same criteria work inside a slice. Here: women only, compared by race.
inside_f = demographic_parity(
    dataset, "race", slice_filter=SliceFilter.of({"sex": "F"}), min_support=1
)
print("demographic parity by race, within sex=F")
for group, value in sorted(inside_f.group_values.items()):
    print(f"  positive rate [{group}]: {value:.4f}")
print()

# Is the observed gap something a random relabeling would produce anyway?
# The permutation test shuffles group labels and counts how often the
# shuffled gap reaches the observed one.
perm = permutation_test(dataset, "sex", "positive_rate", n_permutations=4999, seed=0)
print("permutation test, positive-rate gap by sex")
print(f"  observed gap: {perm.statistic:.4f}")
print(f"  p-value:      {perm.p_value:.4f}  ({perm.n_permutations} permutations)")
