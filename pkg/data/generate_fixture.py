"""Regenerate the synthetic demonstration dataset in this directory.

Every number here is synthetic.  Entity names are real Indian states and
union territories so the files read naturally, and four income figures are
anchored to published per-capita values, but the indicator values are drawn
from a latent-quality model and the remaining incomes are round stand-ins.
The script is deterministic; rerunning it reproduces the committed CSVs.

Shape of the data:
  - 33 entities, 131 indicators named ind_001 .. ind_131.
  - 15 indicators have missing cells: 9 are missing only for Chandigarh and
    6 are missing for one or two other entities.  Dropping all incomplete
    indicators leaves 116; dropping Chandigarh first leaves 125.
  - 6 indicators are integer-valued counts, which produces occasional exact
    ties between entities; the rest round to one decimal.
  - Incomes are spaced at least 0.05 apart in log so the income kernel at
    the default length scale stays well conditioned.
  - Latent quality follows a smooth curve in log income plus a small
    idiosyncratic jitter, so the smoothing prior has structure to exploit
    without demanding roughness it prices at near-zero variance.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SEED = 20240817

# noise level of the indicator model relative to the quality signal; chosen
# so a short chain at the default step size lands in the target acceptance
# band and the likelihood-only ranking agrees with the posterior at the ends
NOISE = 0.55

# (name, income); four incomes are published figures, the rest are synthetic
# stand-ins laid out so consecutive log gaps stay at or above 0.05
ENTITIES = [
    ("Andaman and Nicobar Islands", 212_500),
    ("Andhra Pradesh", 151_200),
    ("Arunachal Pradesh", 160_100),
    ("Assam", 70_450),
    ("Bihar", 49_800),
    ("Chandigarh", 334_000),
    ("Chhattisgarh", 62_944),
    ("Delhi", 354_000),
    ("Goa", 472_000),
    ("Gujarat", 189_200),
    ("Haryana", 315_400),
    ("Himachal Pradesh", 169_500),
    ("Jammu and Kashmir", 135_050),
    ("Jharkhand", 56_600),
    ("Karnataka", 266_100),
    ("Kerala", 226_800),
    ("Madhya Pradesh", 66_750),
    ("Maharashtra", 127_550),
    ("Manipur", 85_550),
    ("Meghalaya", 74_489),
    ("Mizoram", 116_229),
    ("Nagaland", 90_970),
    ("Odisha", 80_050),
    ("Puducherry", 290_300),
    ("Punjab", 142_700),
    ("Rajasthan", 108_100),
    ("Sikkim", 425_000),
    ("Tamil Nadu", 199_400),
    ("Telangana", 244_400),
    ("Tripura", 96_360),
    ("Uttar Pradesh", 53_200),
    ("Uttarakhand", 179_050),
    ("West Bengal", 102_000),
]

N_INDICATORS = 131
N_COARSE = 6
N_MISSING_SINGLE = 9  # incomplete only at Chandigarh
N_MISSING_OTHER = 6  # incomplete at one or two other entities


def generate(out_dir: Path) -> None:
    rng = np.random.default_rng(SEED)
    names = [name for name, _ in ENTITIES]
    incomes = np.array([income for _, income in ENTITIES], dtype=float)
    m = len(names)

    # latent quality: a smooth curve in log income plus a small jitter
    z = np.log(incomes)
    z = (z - z.mean()) / z.std()
    quality = z + 0.45 * np.sin(1.8 * z + 0.6) + 0.2 * rng.standard_normal(m)
    quality = (quality - quality.mean()) / quality.std()

    indicator_names = [f"ind_{k + 1:03d}" for k in range(N_INDICATORS)]
    polarity = np.where(rng.random(N_INDICATORS) < 0.55, 1, -1)
    strength = rng.uniform(0.6, 1.4, N_INDICATORS)
    sigma = NOISE * rng.uniform(0.7, 1.3, N_INDICATORS)
    offset = rng.uniform(20.0, 70.0, N_INDICATORS)
    coarse = rng.choice(N_INDICATORS, size=N_COARSE, replace=False)

    signal = strength[None, :] * quality[:, None]
    noise = sigma[None, :] * rng.standard_normal((m, N_INDICATORS))
    values = offset[None, :] + 4.0 * polarity[None, :] * (signal + noise)
    values = np.round(values, 1)
    for k in coarse:
        values[:, k] = np.round(
            np.clip(8.0 + 2.0 * polarity[k] * (signal[:, k] + noise[:, k]), 0.0, None)
        )

    # missing pattern
    chandigarh = names.index("Chandigarh")
    incomplete = rng.choice(
        N_INDICATORS, size=N_MISSING_SINGLE + N_MISSING_OTHER, replace=False
    )
    missing = np.zeros((m, N_INDICATORS), dtype=bool)
    for k in incomplete[:N_MISSING_SINGLE]:
        missing[chandigarh, k] = True
    others = [i for i in range(m) if i != chandigarh]
    for k in incomplete[N_MISSING_SINGLE:]:
        hit = rng.choice(others, size=int(rng.integers(1, 3)), replace=False)
        missing[hit, k] = True

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "indicators.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["entity", *indicator_names])
        for i, name in enumerate(names):
            row = [name]
            for k in range(N_INDICATORS):
                if missing[i, k]:
                    row.append("")
                elif k in coarse:
                    row.append(str(int(values[i, k])))
                else:
                    row.append(f"{values[i, k]:.1f}")
            writer.writerow(row)

    with open(out_dir / "polarity.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["indicator", "polarity"])
        for name, sign in zip(indicator_names, polarity):
            writer.writerow([name, f"{sign:+d}"])

    with open(out_dir / "income.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["entity", "income"])
        for name, income in ENTITIES:
            writer.writerow([name, income])


if __name__ == "__main__":
    generate(Path(__file__).resolve().parent)
    print("wrote indicators.csv, polarity.csv, income.csv")
