"""Synthetic case-data generator.

Produces a cases CSV, a long-format TSH series CSV, and a matching
pipeline config, shaped like the clinical dataset the pipeline targets:
22 features that discretize into 102 items (19 of them N/A bins), a
roughly 259/1673 malignant prevalence, plus label-dropped and
out-of-range rows for the ingestion filter to remove. A latent severity
value per case correlates the features, so malignant cases share bins
often enough for mining to reach deep levels.
"""

import csv
import math
import os
import random

from ._jsonio import write_json

DEFAULT_ROWS = 1673
DEFAULT_MPU = 417
DEFAULT_SEED = 20240501

_N_TRI = 12   # three-level categorical indicators
_N_QUAD = 4   # four-level categorical indicators


def _columns_doc():
    cols = [
        {"name": "case_id", "type": "categorical", "role": "id"},
        {
            "name": "max_diagram", "type": "continuous", "role": "feature",
            "bins": {"kind": "fixed_width", "start": 1.0, "width": 1.0, "n_interior": 3},
        },
        {
            "name": "mean_diagram", "type": "continuous", "role": "feature",
            "bins": {"kind": "fixed_width", "start": 1.0, "width": 1.0, "n_interior": 3},
        },
        {
            "name": "bmi", "type": "continuous", "role": "feature",
            "bins": {
                "kind": "cutpoints",
                "boundaries": [18.5, 24.0, 28.0],
                "labels": ["underweight", "normal weight", "overweight", "obese"],
            },
        },
        {
            "name": "age", "type": "continuous", "role": "feature",
            "bins": {"kind": "decades", "width": 10, "anchor_step": 5},
        },
        {
            "name": "mean_tsh_score", "type": "continuous", "role": "feature",
            "series": "mean_score",
            "bins": {"kind": "kmeans", "k": 5, "normalize": True},
        },
        {
            "name": "tsh_trmssd", "type": "continuous", "role": "feature",
            "series": "trmssd",
            "bins": {"kind": "kmeans", "k": 5, "log_offset": 1e-5, "normalize": True},
        },
    ]
    for i in range(1, _N_TRI + 1):
        cols.append(
            {
                "name": f"indicator_{i:02d}", "type": "categorical",
                "role": "feature", "categories": ["L0", "L1", "L2"],
            }
        )
    for i in range(_N_TRI + 1, _N_TRI + _N_QUAD + 1):
        cols.append(
            {
                "name": f"indicator_{i:02d}", "type": "categorical",
                "role": "feature", "categories": ["L0", "L1", "L2", "L3"],
            }
        )
    cols.append(
        {
            "name": "pathology", "type": "categorical", "role": "target",
            "benign": "benign", "malignant": "malignant", "drop": ["MPU"],
        }
    )
    return cols


def pipeline_config_doc(seed=DEFAULT_SEED, min_support=10):
    return {
        "cases_csv": "cases.csv",
        "tsh_csv": "tsh.csv",
        "na_tokens": ["", "NA", "N/A"],
        "columns": _columns_doc(),
        "miner": {"min_support": min_support, "min_confidence": "beta-squared"},
        "analysis": {
            "kappa": 0.223,
            "pic_threshold": 0.75,
            "acb_threshold": 1.2,
            "swarm_cap": 100,
        },
        "seed": seed,
    }


def _level_weights(rng, n_levels):
    """Benign and malignant level profiles for one categorical indicator.

    Each indicator gets one "hot" level that dominates at high severity;
    concentrating malignant cases on hot levels is what lets frequent
    itemsets survive to deep levels, as real correlated signs would.
    """
    hot = rng.randrange(1, n_levels)
    benign = [rng.uniform(0.5, 1.0) if j == 0 else rng.uniform(0.05, 0.35) for j in range(n_levels)]
    malignant = [
        rng.uniform(1.4, 2.2) if j == hot else rng.uniform(0.05, 0.15)
        for j in range(n_levels)
    ]
    return (
        [w / sum(benign) for w in benign],
        [w / sum(malignant) for w in malignant],
    )


def _pick_level(rng, benign_w, malignant_w, severity):
    weights = [(1 - severity) * b + severity * m for b, m in zip(benign_w, malignant_w)]
    return rng.choices(range(len(weights)), weights)[0]


def _case_row(rng, label, severity, profiles, miss_rates):
    row = {"pathology": label}
    max_d = math.exp(rng.gauss(math.log(1.25) + 1.05 * severity, 0.55))
    max_d = min(8.0, max(0.2, max_d))
    row["max_diagram"] = f"{max_d:.2f}"
    row["mean_diagram"] = f"{max_d * rng.uniform(0.55, 0.95):.2f}"
    if rng.random() < miss_rates["bmi"]:
        row["bmi"] = ""
    else:
        bmi = min(38.0, max(14.0, rng.gauss(22.5 + 3.2 * severity, 3.4)))
        row["bmi"] = f"{bmi:.1f}"
    row["age"] = str(min(69, max(20, int(rng.gauss(38 + 14 * severity, 11)))))
    for name, (benign_w, malignant_w) in profiles.items():
        if rng.random() < miss_rates[name]:
            row[name] = ""
        else:
            row[name] = f"L{_pick_level(rng, benign_w, malignant_w, severity)}"
    return row


def _tsh_records(rng, severity):
    """(timestamp, tsh) records for one case; empty when never tested."""
    if rng.random() < 0.08:
        return []
    m = rng.choices([1, 2, 3, 4], [0.25, 0.35, 0.25, 0.15])[0]
    # malignant cases trend toward lower and more volatile TSH
    level = rng.gauss(0.45 - 1.1 * severity, 0.5)
    step_sigma = 0.25 + 0.5 * severity
    t = 0.0
    records = []
    for i in range(m):
        if i:
            dt = rng.uniform(14, 360)
            t += dt
            level += rng.gauss(0.0, step_sigma * math.sqrt(dt / 180.0))
        records.append((round(t, 1), round(math.exp(level), 4)))
    return records


def generate(out_dir, rows=DEFAULT_ROWS, mpu=DEFAULT_MPU, invalid=1,
             malignant=None, seed=DEFAULT_SEED, min_support=10):
    """Write cases.csv, tsh.csv, and config.json under `out_dir`.

    `rows` counts analysis-ready cases; `mpu` label-dropped and `invalid`
    out-of-range rows are appended on top, so the ingestion filter retains
    exactly `rows`. Fully deterministic given `seed`.
    """
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(seed)
    if malignant is None:
        malignant = round(rows * 259 / 1673)

    names = [f"indicator_{i:02d}" for i in range(1, _N_TRI + _N_QUAD + 1)]
    profiles = {
        name: _level_weights(rng, 3 if i < _N_TRI else 4)
        for i, name in enumerate(names)
    }
    miss_rates = {"bmi": 0.05}
    for i, name in enumerate(names):
        miss_rates[name] = 0.04 + 0.08 * ((i * 7) % 5) / 4.0

    mal_rows = set(rng.sample(range(rows), malignant))
    cases = []
    for r in range(rows):
        is_mal = r in mal_rows
        severity = rng.betavariate(7.0, 1.1) if is_mal else rng.betavariate(2.0, 4.0)
        label = "malignant" if is_mal else "benign"
        cases.append((_case_row(rng, label, severity, profiles, miss_rates),
                      _tsh_records(rng, severity)))
    for _ in range(mpu):
        severity = rng.betavariate(2.5, 2.5)
        cases.append((_case_row(rng, "MPU", severity, profiles, miss_rates),
                      _tsh_records(rng, severity)))
    for _ in range(invalid):
        severity = rng.betavariate(2.0, 4.0)
        row = _case_row(rng, "benign", severity, profiles, miss_rates)
        row["indicator_01"] = "OUT_OF_RANGE"
        cases.append((row, _tsh_records(rng, severity)))
    rng.shuffle(cases)

    width = len(str(len(cases)))
    header = ["case_id", "max_diagram", "mean_diagram", "bmi", "age", *names, "pathology"]
    cases_path = os.path.join(out_dir, "cases.csv")
    tsh_path = os.path.join(out_dir, "tsh.csv")
    with open(cases_path, "w", encoding="utf-8", newline="") as cfh, \
         open(tsh_path, "w", encoding="utf-8", newline="") as tfh:
        cases_writer = csv.writer(cfh, lineterminator="\n")
        tsh_writer = csv.writer(tfh, lineterminator="\n")
        cases_writer.writerow(header)
        tsh_writer.writerow(["case_id", "timestamp", "tsh"])
        for idx, (row, records) in enumerate(cases, start=1):
            case_id = f"case_{idx:0{width}d}"
            cases_writer.writerow([case_id] + [row.get(col, "") for col in header[1:]])
            for t, v in records:
                tsh_writer.writerow([case_id, t, v])

    config = pipeline_config_doc(seed=seed, min_support=min_support)
    config_path = os.path.join(out_dir, "config.json")
    write_json(config_path, config)
    return {
        "cases_csv": cases_path,
        "tsh_csv": tsh_path,
        "config": config_path,
        "rows": rows,
        "mpu": mpu,
        "invalid": invalid,
        "malignant": malignant,
    }
