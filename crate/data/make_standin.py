"""Writes psa_standin.csv: synthetic age / PSA pairs with a mild negative rank
association. 480 subjects, 7 of them missing one value. Not real patient data."""
import numpy as np

rng = np.random.default_rng(20240520)
n = 480
age = np.round(rng.normal(64.0, 8.0, n).clip(38, 91))
z = (age - 64.0) / 8.0
log_psa = 3.2 - 0.3 * z + rng.standard_t(6, n) * 1.6
psa = np.round(np.exp(log_psa), 2).clip(0.01, None)

age_s = [f"{a:.0f}" for a in age]
psa_s = [f"{p:.2f}" for p in psa]
for i in rng.choice(n, 7, replace=False):
    if rng.random() < 0.5:
        age_s[i] = ""
    else:
        psa_s[i] = "NA"

with open("psa_standin.csv", "w") as f:
    f.write("subject,age,psa\n")
    for i in range(n):
        f.write(f"S{i + 1:04d},{age_s[i]},{psa_s[i]}\n")
