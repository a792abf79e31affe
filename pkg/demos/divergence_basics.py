"""Distribution distances: KL, Jensen-Shannon, total variation, L-p.

    python3 demos/divergence_basics.py
"""

import math
from pathlib import Path

from fairlens import attribute_distribution, divergence, load_dataset_csv

# Two quarters of loan decisions, bucketed by outcome. Mappings are aligned
# by label, so the order they are written in does not matter.
last_quarter = {"approved": 0.42, "referred": 0.13, "rejected": 0.45}
this_quarter = {"approved": 0.30, "referred": 0.22, "rejected": 0.48}

result = divergence(last_quarter, this_quarter)
print("last vs this quarter")
print(f"  KL divergence:   {result.kl:.6f} nats")
print(f"  JS divergence:   {result.js:.6f}  (at most ln 2 = {math.log(2):.6f})")
print(f"  total variation: {result.tv:.6f}  (equals half the L1 distance)")
print(f"  L2 distance:     {result.lp:.6f}")
print()

# KL is asymmetric. JS and TV are not; reversing the arguments leaves them
# unchanged, which is why they make better headline drift numbers.
reverse = divergence(this_quarter, last_quarter)
print(f"  KL reversed:     {reverse.kl:.6f} nats")
print(f"  JS reversed:     {reverse.js:.6f}")
print(f"  TV reversed:     {reverse.tv:.6f}")
print()

# When one side has probability on a label the other gives zero mass, KL
# blows up to infinity; JS and TV stay finite and usable.
disjointish = divergence({"a": 1.0, "b": 0.0}, {"a": 0.0, "b": 1.0})
print("all mass moved between labels:")
print(f"  KL = {disjointish.kl}, JS = {disjointish.js:.6f}, TV = {disjointish.tv}")
print()

# A scale reference worth memorizing:
print(f"KL([.5,.5] || [.25,.75]) = {divergence([0.5, 0.5], [0.25, 0.75]).kl:.6f} nats")
print()

# The same machinery reads distributions straight off a dataset. The bundled
# fixture was deliberately built with identical race mixes in both sex
# groups, so every distance between them is exactly zero.
FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
dataset = load_dataset_csv(
    FIXTURES / "fixture100.csv",
    protected_attributes=["sex", "race"],
    name="credit-screening-eval",
)
from fairlens import SliceFilter

labels = dataset.observed_categories("race")
within_f = attribute_distribution(
    dataset, "race", slice_filter=SliceFilter.of({"sex": "F"}), labels=labels
)
within_m = attribute_distribution(
    dataset, "race", slice_filter=SliceFilter.of({"sex": "M"}), labels=labels
)
balanced = divergence(within_f, within_m)
print(f"fixture race mix, F vs M: {within_f} vs {within_m}")
print(f"JS = {balanced.js}, TV = {balanced.tv}  (balanced by construction)")
