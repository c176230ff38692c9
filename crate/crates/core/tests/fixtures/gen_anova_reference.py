"""Regenerates the repeated-measures ANOVA reference fixtures.

Writes anova_data.csv (10 seeded 18-subject 2x2 datasets) and
anova_expected.csv (F and p per effect from statsmodels AnovaRM).
"""
import numpy as np
import pandas as pd
from statsmodels.stats.anova import AnovaRM

rows = []
expected = []
for ds in range(10):
    rng = np.random.default_rng(1000 + ds)
    effect_a, effect_b, effect_ab = rng.normal(0, 3, size=3)
    for s in range(18):
        offset = rng.normal(50, 10)
        for a, iface in enumerate(["GUI", "AR"]):
            for b, prev in enumerate(["off", "on"]):
                v = offset + effect_a * a + effect_b * b + effect_ab * a * b + rng.normal(0, 5)
                rows.append((ds, f"s{s:02d}", iface, prev, "score", round(v, 4)))
df = pd.DataFrame(rows, columns=["dataset", "subject", "interface", "preview", "measure", "value"])
df.to_csv("anova_data.csv", index=False)
for ds, g in df.groupby("dataset"):
    res = AnovaRM(g, "value", "subject", within=["interface", "preview"]).fit().anova_table
    for name, key in [("interface", "interface"), ("preview", "preview"), ("interaction", "interface:preview")]:
        r = res.loc[key]
        expected.append((ds, name, repr(float(r["F Value"])), repr(float(r["Pr > F"]))))
pd.DataFrame(expected, columns=["dataset", "effect", "f", "p"]).to_csv("anova_expected.csv", index=False)
