"""
Profile-based discretization
============================

A lab value is only "high" or "low" relative to the patient it came from.
Here the same hemoglobin and creatinine readings are labeled differently
for a man and a woman, and ESR uses an age-dependent cut.
"""

from cadpipe import load_config
from cadpipe.profiling import assign_profile, discretize_value

study = load_config()
print("profiles:", [p.id for p in study.profiles.profiles])

# a 40 year old man and a 40 year old woman
man = assign_profile({"Age": 40, "Gender": "Male"}, study.profiles)
woman = assign_profile({"Age": 40, "Gender": "Female"}, study.profiles)
print("profiles of the two patients:", man, woman)

for feature, value in [("HB", 12.5), ("Cr", 1.1)]:
    print(f"{feature}={value}: man -> {discretize_value(feature, value, 40, man, study.ranges)}, "
          f"woman -> {discretize_value(feature, value, 40, woman, study.ranges)}")

# ESR's upper cut grows with age (age / 2 for men)
for age in (50, 70):
    profile = assign_profile({"Age": age, "Gender": "Male"}, study.profiles)
    print(f"ESR=30 at age {age}: {discretize_value('ESR', 30, age, profile, study.ranges)}")
