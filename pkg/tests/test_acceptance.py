"""Acceptance gate.

One test per criterion, each printing a [PASS]/[FAIL] line (visible with
`pytest -s`). Random suites run on fixed seeds with explicit case counts;
tolerances are pinned in the assertions.
"""

import json
import math
import os
import random
import resource
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from ruleboost import (
    MinerConfig,
    brute_force_mine,
    generate_rules,
    mine_frequent,
    support_count,
)
from ruleboost.analysis import (
    AnalysisConfig,
    RulePair,
    acb,
    classify,
    compute_indicator_metrics,
    find_rule_pairs,
    pic,
)
from ruleboost.binning import (
    Cutpoints,
    FixedWidth,
    TshSeries,
    bin_cutpoints,
    bin_fixed_width,
    kmeans_1d,
    log_offset_transform,
    mean_tsh_score,
    tsh_trmssd,
)
from ruleboost.cli import (
    MANIFEST_JSON,
    load_settings,
    load_store,
    run_pipeline,
)
from ruleboost.synth import generate
from conftest import random_store


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def naive_count(store, items):
    wanted = set(items)
    return sum(1 for t in store.transactions if wanted <= set(t))


# ---------------------------------------------------------------------------

def test_oracle_equivalence_500_random_stores():
    with criterion("oracle equivalence on 500 random stores in < 60 s"):
        rng = random.Random(0xACCE97)
        start = time.monotonic()
        for case in range(500):
            store, malignant, _ = random_store(rng, max_items=12, max_trans=200)
            eta = rng.randint(1, 20)
            beta = support_count(store, (malignant,)) / store.n
            gamma = rng.choice([0.0, beta * beta, 0.5])
            config = MinerConfig.for_store(store, malignant, eta, gamma)
            mined = mine_frequent(store, config)
            brute = brute_force_mine(store, config)
            assert mined == brute, f"case {case}: level tables differ"
            assert generate_rules(store, mined, config) == generate_rules(
                store, brute, config
            ), f"case {case}: rules differ"
        elapsed = time.monotonic() - start
        assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s"


def test_metric_fixtures_on_toy_store(toy_store):
    with criterion("toy-store metric fixtures at 1e-12 relative tolerance"):
        a, b, m = 0, 1, 2
        # hand-enumeration oracle: counts by naive transaction scan
        n = toy_store.n
        count_a = naive_count(toy_store, (a,))
        count_am = naive_count(toy_store, (a, m))
        count_m = naive_count(toy_store, (m,))
        assert (count_a, count_am, count_m, n) == (4, 3, 3, 5)

        conf_a = count_am / count_a
        assert conf_a == pytest.approx(3 / 4, rel=1e-12)
        lift_a = conf_a / (count_m / n)
        assert lift_a == pytest.approx(1.25, rel=1e-12)

        config = MinerConfig(2, 0.0, m, frozenset())
        rules = generate_rules(toy_store, mine_frequent(toy_store, config), config)
        crs_a = sorted(p.cr for p in find_rule_pairs(rules, a))
        crs_b = sorted(p.cr for p in find_rule_pairs(rules, b))
        assert crs_a == pytest.approx([1.25, 1.5], rel=1e-12)
        assert crs_b == pytest.approx([10 / 9, 4 / 3], rel=1e-12)


# -- invariant suites, 200 random cases each ---------------------------------

def test_invariant_anti_monotonicity():
    with criterion("anti-monotonicity of support, 200 cases"):
        rng = random.Random(101)
        for _ in range(200):
            store, _, _ = random_store(rng, max_items=8, max_trans=60)
            n_items = len(store.vocabulary)
            small = tuple(sorted(rng.sample(range(n_items), rng.randint(0, 3))))
            extra = tuple(
                sorted(set(small) | set(rng.sample(range(n_items), rng.randint(0, 3))))
            )
            assert support_count(store, small) >= support_count(store, extra)


def test_invariant_downward_closure():
    with criterion("downward closure in mined level tables, 200 cases"):
        rng = random.Random(102)
        for _ in range(200):
            store, malignant, _ = random_store(rng, max_items=8, max_trans=60)
            config = MinerConfig.for_store(store, malignant, rng.randint(1, 6), 0.0)
            frequent = set(mine_frequent(store, config).antecedents())
            for antecedent in frequent:
                for i in range(len(antecedent)):
                    sub = antecedent[:i] + antecedent[i + 1 :]
                    assert not sub or sub in frequent


def test_invariant_threshold_monotonicity():
    with criterion("threshold monotonicity of mining output, 200 cases"):
        rng = random.Random(103)
        for _ in range(200):
            store, malignant, _ = random_store(rng, max_items=7, max_trans=60)
            eta = rng.randint(1, 5)
            gamma = rng.uniform(0.0, 0.4)
            base = MinerConfig.for_store(store, malignant, eta, gamma)
            tighter = MinerConfig.for_store(
                store, malignant, eta + rng.randint(1, 3), min(1.0, gamma + 0.3)
            )
            base_table = mine_frequent(store, base)
            tight_table = mine_frequent(store, tighter)
            assert set(tight_table.antecedents()) <= set(base_table.antecedents())
            base_rules = {r.antecedent for r in generate_rules(store, base_table, base)}
            tight_rules = {
                r.antecedent for r in generate_rules(store, tight_table, tighter)
            }
            assert tight_rules <= base_rules


def _random_cr_pairs(rng, n):
    out = []
    base = rng.uniform(0.01, 0.2)
    from ruleboost import Rule

    without = Rule((1,), (999,), base / 2, base, 1.0, 1, 2)
    for i in range(n):
        cr = math.exp(rng.uniform(-3.5, 3.5))
        with_rule = Rule((1, 10 + i), (999,), base / 2, base * cr, 1.0, 1, 2)
        out.append(RulePair(10 + i, with_rule, without, cr))
    return out


def test_invariant_acb_inversion_symmetry():
    with criterion("ACB inversion symmetry, 200 cases"):
        rng = random.Random(104)
        for _ in range(200):
            pairs = _random_cr_pairs(rng, rng.randint(1, 25))
            kappa = rng.uniform(0.0, 0.6)
            inverted = [
                RulePair(p.item, p.rule_without, p.rule_with, 1 / p.cr) for p in pairs
            ]
            fwd, n_fwd = acb(pairs, kappa)
            inv, n_inv = acb(inverted, kappa)
            assert n_fwd == n_inv
            if fwd is None:
                assert inv is None
            else:
                assert inv == pytest.approx(1 / fwd, rel=1e-9)


def test_invariant_pic_range():
    with criterion("PIC stays within [0, 1], 200 cases"):
        rng = random.Random(105)
        for _ in range(200):
            pairs = _random_cr_pairs(rng, rng.randint(1, 25))
            value = pic(pairs)
            assert 0.0 <= value <= 1.0


def test_invariant_kappa_zero_plain_geometric_mean():
    with criterion("kappa=0 reduces ACB to the plain geometric mean, 200 cases"):
        rng = random.Random(106)
        for _ in range(200):
            pairs = _random_cr_pairs(rng, rng.randint(1, 25))
            value, kept = acb(pairs, 0.0)
            expected = math.exp(sum(math.log(p.cr) for p in pairs) / len(pairs))
            assert kept == len(pairs)
            assert value == pytest.approx(expected, rel=1e-9)


def test_invariant_tier_monotonicity():
    with criterion("tier never drops when ACB or PIC rises, 200 cases"):
        rng = random.Random(107)
        order = {"Low": 0, "Moderate": 1, "High": 2}
        cfg = AnalysisConfig()
        for _ in range(200):
            acb_value = rng.uniform(0.2, 4.0)
            pic_value = rng.uniform(0.0, 1.0)
            before = order[classify(acb_value, pic_value, cfg)]
            after = order[
                classify(
                    acb_value + rng.uniform(0.0, 3.0),
                    min(1.0, pic_value + rng.uniform(0.0, 1.0)),
                    cfg,
                )
            ]
            assert after >= before


# -- binning conformance ------------------------------------------------------

def test_binning_conformance():
    with criterion("supervised bin labels, log-offset value, k-means recovery"):
        bmi = Cutpoints(
            (18.5, 24.0, 28.0),
            ("underweight", "normal weight", "overweight", "obese"),
        )
        assert bin_cutpoints([23.9], bmi) == ["normal weight"]
        assert bin_cutpoints([24.0], bmi) == ["overweight"]

        diagram = FixedWidth(start=1.0, width=1.0, n_interior=3)
        assert bin_fixed_width([4.0], diagram) == ["≥4"]
        assert bin_fixed_width([0.5], diagram) == ["<1"]

        assert log_offset_transform([0.0])[0] == pytest.approx(
            math.log(1e-5), rel=1e-12
        )

        for seed in range(200):
            result = kmeans_1d([0.0, 1.0, 10.0, 11.0], 2, seed)
            assert result.labels == [0, 0, 1, 1], f"seed {seed}"


def test_kmeans_contiguity_1000_random_datasets():
    with criterion("k-means clusters are contiguous intervals, 1000 datasets"):
        rng = random.Random(108)
        for _ in range(1000):
            n = rng.randint(2, 80)
            values = [rng.uniform(-50, 50) for _ in range(n)]
            if rng.random() < 0.3:  # add duplicates
                values += rng.choices(values, k=rng.randint(1, 10))
            k = rng.randint(1, min(6, len(set(values))))
            result = kmeans_1d(values, k, seed=rng.randrange(2**31))
            for left, right in zip(result.clusters, result.clusters[1:]):
                assert left.high < right.low


def test_tsh_features():
    with criterion("TSH mean score and tRMSSD fixtures at 1e-12"):
        constant = TshSeries(((0.0, math.exp(2.0)), (5.0, math.exp(2.0)), (9.0, math.exp(2.0))))
        assert tsh_trmssd(constant) == 0.0
        assert mean_tsh_score(constant) == pytest.approx(2.0, rel=1e-12)

        fixture = TshSeries(
            ((0.0, math.exp(1.0)), (1.0, math.exp(3.0)), (3.0, math.exp(3.0)))
        )
        assert mean_tsh_score(fixture) == pytest.approx(8 / 3, rel=1e-12)
        assert tsh_trmssd(fixture) == pytest.approx(math.sqrt(2), rel=1e-12)


# -- scale, performance, determinism ------------------------------------------

def test_full_scale_pipeline_within_budget(tmp_path):
    with criterion("paper-shaped pipeline finishes in <= 300 s and <= 8 GB"):
        data = str(tmp_path / "data")
        out = str(tmp_path / "out")
        generate(data, rows=1673, mpu=417, invalid=1, seed=20240501)
        settings = load_settings(os.path.join(data, "config.json"))

        start = time.monotonic()
        manifest = run_pipeline(settings, out, jobs=os.cpu_count() or 1)
        elapsed = time.monotonic() - start

        assert elapsed <= 300.0, f"pipeline took {elapsed:.0f}s"
        peak_kib = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        assert peak_kib <= 8 * 1024 * 1024, f"peak rss {peak_kib / 1024**2:.2f} GiB"

        # store shape matches the target dataset
        assert manifest["rows"]["retained"] == 1673
        assert manifest["counts"]["items"] == 102
        assert manifest["counts"]["missing_bins"] == 19
        store, malignant, _ = load_store(out)
        assert store.n == 1673
        assert support_count(store, (malignant,)) == 259
        assert manifest["config"]["resolved"]["min_support_count"] == 10
        beta = 259 / 1673
        assert manifest["config"]["resolved"]["gamma"] == pytest.approx(
            beta * beta, rel=1e-15
        )
        # nontrivial workload, in the ballpark of the reference run
        assert manifest["counts"]["frequent_itemsets"] > 100_000
        assert manifest["counts"]["max_level"] >= 8
        print(
            f"    ({elapsed:.0f}s, {manifest['counts']['frequent_itemsets']:,} itemsets, "
            f"max level {manifest['counts']['max_level']}, "
            f"rss {peak_kib / 1024**2:.2f} GiB)"
        )


def test_determinism_across_jobs(tmp_path):
    with criterion("byte-identical artifacts across --jobs settings"):
        data = str(tmp_path / "data")
        generate(data, rows=260, mpu=15, invalid=1, seed=77)
        config = os.path.join(data, "config.json")
        outs = []
        for jobs in ("1", "7"):
            out = str(tmp_path / f"out{jobs}")
            proc = subprocess.run(
                [
                    sys.executable, "-m", "ruleboost.cli", "run",
                    "--config", config, "--out", out, "--jobs", jobs,
                ],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
            outs.append(out)

        data_artifacts = [
            "binned.csv", "store.json", "frequent.jsonl",
            "rules.jsonl", "indicators.json", "plotdata.json",
        ]
        for name in data_artifacts:
            a = open(os.path.join(outs[0], name), "rb").read()
            b = open(os.path.join(outs[1], name), "rb").read()
            assert a == b, f"{name} differs across --jobs"

        # manifest is identical apart from wall-clock details
        manifests = []
        for out in outs:
            doc = json.load(open(os.path.join(out, MANIFEST_JSON)))
            doc.pop("execution")
            manifests.append(doc)
        assert manifests[0] == manifests[1]
