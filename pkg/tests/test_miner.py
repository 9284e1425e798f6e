import random

import pytest

from ruleboost import (
    InputError,
    ItemMeta,
    LevelTable,
    MinerConfig,
    SupportCache,
    TransactionStore,
    available_kernels,
    brute_force_mine,
    generate_rules,
    mine_frequent,
    support_count,
)
from ruleboost.miner import PrefixIndex, eligible_items
from conftest import TOY_A, TOY_B, TOY_M, random_store


def toy_config(min_count=2, gamma=0.0, max_k=None):
    return MinerConfig(min_count, gamma, TOY_M, frozenset(), max_k)


class TestConfig:
    def test_rejects_zero_support(self):
        with pytest.raises(InputError):
            MinerConfig(0, 0.5, 1)

    def test_rejects_bad_confidence(self):
        with pytest.raises(InputError):
            MinerConfig(1, 1.5, 1)

    def test_rejects_excluded_target(self):
        with pytest.raises(InputError):
            MinerConfig(1, 0.5, 1, frozenset({1}))

    def test_for_store_excludes_missing_and_benign(self):
        rng = random.Random(1)
        store, mal, ben = random_store(rng)
        config = MinerConfig.for_store(store, mal, 1, 0.0)
        assert ben in config.excluded
        assert set(store.missing_items()) <= config.excluded
        assert mal not in config.excluded


class TestToyMining:
    def test_antecedents_min_count_2(self, toy_store):
        table = mine_frequent(toy_store, toy_config())
        assert table.antecedents() == [(TOY_A,), (TOY_B,), (TOY_A, TOY_B)]

    def test_counts(self, toy_store):
        table = mine_frequent(toy_store, toy_config())
        by_antecedent = {e.antecedent: e for e in table.entries()}
        assert by_antecedent[(TOY_A,)].joint_count == 3
        assert by_antecedent[(TOY_A,)].antecedent_count == 4
        assert by_antecedent[(TOY_B,)].joint_count == 2
        assert by_antecedent[(TOY_B,)].antecedent_count == 3
        assert by_antecedent[(TOY_A, TOY_B)].joint_count == 2
        assert by_antecedent[(TOY_A, TOY_B)].antecedent_count == 2

    def test_floor_above_target_count_mines_nothing(self, toy_store):
        table = mine_frequent(toy_store, toy_config(min_count=4))
        assert table.total() == 0

    def test_max_k_caps_antecedent_size(self, toy_store):
        table = mine_frequent(toy_store, toy_config(max_k=1))
        assert table.max_level == 1

    def test_invalid_target(self, toy_store):
        with pytest.raises(InputError):
            mine_frequent(toy_store, MinerConfig(1, 0.0, 99))


class TestToyRules:
    def test_rules_at_half_confidence(self, toy_store):
        config = toy_config(gamma=0.5)
        table = mine_frequent(toy_store, config)
        rules = generate_rules(toy_store, table, config, include_empty_baseline=False)
        got = {r.antecedent: r.confidence for r in rules}
        assert got == {(TOY_A,): 3 / 4, (TOY_B,): 2 / 3, (TOY_A, TOY_B): 1.0}

    def test_gamma_zero_keeps_every_antecedent(self, toy_store):
        config = toy_config(gamma=0.0)
        table = mine_frequent(toy_store, config)
        rules = generate_rules(toy_store, table, config, include_empty_baseline=False)
        assert len(rules) == table.total()

    def test_baseline_rule(self, toy_store):
        config = toy_config()
        rules = generate_rules(toy_store, mine_frequent(toy_store, config), config)
        baseline = rules[0]
        assert baseline.antecedent == ()
        assert baseline.confidence == 3 / 5
        assert baseline.lift == 1.0

    def test_high_gamma_still_emits_baseline(self, toy_store):
        config = toy_config(gamma=0.9)
        rules = generate_rules(toy_store, mine_frequent(toy_store, config), config)
        antecedents = [r.antecedent for r in rules]
        assert () in antecedents
        assert (TOY_A, TOY_B) in antecedents  # conf 1.0 passes
        assert (TOY_A,) not in antecedents    # conf 0.75 fails

    def test_rule_lift_is_confidence_over_beta(self, toy_store):
        config = toy_config(gamma=0.0)
        rules = generate_rules(toy_store, mine_frequent(toy_store, config), config)
        beta = 3 / 5
        for r in rules:
            assert r.lift == pytest.approx(r.confidence / beta, rel=1e-15)


class TestBruteForce:
    def test_matches_on_toy(self, toy_store):
        config = toy_config()
        assert brute_force_mine(toy_store, config) == mine_frequent(toy_store, config)

    def test_empty_when_target_absent(self):
        vocab = [ItemMeta("f", "x"), ItemMeta("label", "malignant", is_target=True)]
        store = TransactionStore(vocab, [(0,), (0,)])
        table = brute_force_mine(store, MinerConfig(1, 0.0, 1))
        assert table.total() == 0

    def test_guard_on_too_many_items(self):
        vocab = [ItemMeta(f"f{i}", "x") for i in range(25)]
        vocab.append(ItemMeta("label", "malignant", is_target=True))
        store = TransactionStore(vocab, [(0, 25)])
        with pytest.raises(InputError):
            brute_force_mine(store, MinerConfig(1, 0.0, 25))


class TestOracleEquivalence:
    def test_small_random_stores(self):
        rng = random.Random(2024)
        for _ in range(60):
            store, mal, _ = random_store(rng, max_items=9, max_trans=80)
            config = MinerConfig.for_store(
                store, mal, rng.randint(1, 12), rng.choice([0.0, 0.3, 0.5])
            )
            mined = mine_frequent(store, config)
            brute = brute_force_mine(store, config)
            assert mined == brute
            assert generate_rules(store, mined, config) == generate_rules(
                store, brute, config
            )

    def test_with_max_k(self):
        rng = random.Random(7)
        for _ in range(20):
            store, mal, _ = random_store(rng, max_items=8, max_trans=50)
            config = MinerConfig.for_store(store, mal, rng.randint(1, 6), 0.0,
                                           max_k=rng.randint(1, 4))
            assert mine_frequent(store, config) == brute_force_mine(store, config)


class TestMinerInvariants:
    def test_downward_closure(self):
        rng = random.Random(5)
        for _ in range(30):
            store, mal, _ = random_store(rng, max_items=10, max_trans=100)
            config = MinerConfig.for_store(store, mal, rng.randint(1, 8), 0.0)
            table = mine_frequent(store, config)
            frequent = set(table.antecedents())
            for a in frequent:
                for i in range(len(a)):
                    sub = a[:i] + a[i + 1 :]
                    if sub:
                        assert sub in frequent

    def test_no_excluded_items_in_antecedents(self):
        rng = random.Random(6)
        for _ in range(30):
            store, mal, ben = random_store(rng, max_items=8, max_trans=80)
            config = MinerConfig.for_store(store, mal, 1, 0.0)
            bad = set(store.missing_items()) | {mal, ben}
            for a in mine_frequent(store, config).antecedents():
                assert not (set(a) & bad)

    def test_threshold_monotonicity(self):
        rng = random.Random(8)
        for _ in range(20):
            store, mal, _ = random_store(rng, max_items=8, max_trans=80)
            eta = rng.randint(1, 6)
            loose = MinerConfig.for_store(store, mal, eta, 0.2)
            tight_eta = MinerConfig.for_store(store, mal, eta + 2, 0.2)
            tight_gamma = MinerConfig.for_store(store, mal, eta, 0.5)
            loose_set = set(mine_frequent(store, loose).antecedents())
            assert set(mine_frequent(store, tight_eta).antecedents()) <= loose_set
            loose_rules = {r.antecedent for r in generate_rules(
                store, mine_frequent(store, loose), loose)}
            tight_rules = {r.antecedent for r in generate_rules(
                store, mine_frequent(store, tight_gamma), tight_gamma)}
            assert tight_rules <= loose_rules

    def test_transaction_order_invariance(self):
        rng = random.Random(9)
        store, mal, _ = random_store(rng, max_items=8, max_trans=60)
        config = MinerConfig.for_store(store, mal, 2, 0.0)
        shuffled = list(store.transactions)
        rng.shuffle(shuffled)
        store2 = TransactionStore(store.vocabulary, shuffled)
        assert mine_frequent(store, config) == mine_frequent(store2, config)

    def test_stored_counts_match_fresh_recount(self, toy_store):
        config = toy_config()
        for e in mine_frequent(toy_store, config).entries():
            assert e.antecedent_count == support_count(toy_store, e.antecedent)
            assert e.joint_count == support_count(
                toy_store, e.antecedent + (TOY_M,)
            )


class TestSupportCache:
    def test_mining_with_cache_is_identical(self):
        rng = random.Random(10)
        store, mal, _ = random_store(rng, max_items=8, max_trans=60)
        config = MinerConfig.for_store(store, mal, 2, 0.0)
        cache = SupportCache()
        with_cache = mine_frequent(store, config, cache=cache)
        without = mine_frequent(store, config)
        assert with_cache == without
        assert len(cache) > 0

    def test_cached_values_equal_fresh_recounts(self):
        rng = random.Random(11)
        store, mal, _ = random_store(rng, max_items=8, max_trans=60)
        config = MinerConfig.for_store(store, mal, 1, 0.0)
        cache = SupportCache()
        table = mine_frequent(store, config, cache=cache)
        for e in table.entries():
            assert cache.get(e.antecedent) == support_count(store, e.antecedent)
            joint = tuple(sorted(e.antecedent + (mal,)))
            assert cache.get(joint) == support_count(store, joint)

    def test_count_is_a_pure_memo(self, toy_store):
        cache = SupportCache()
        first = cache.count(toy_store, (TOY_A, TOY_B))
        second = cache.count(toy_store, (TOY_A, TOY_B))
        assert first == second == 2
        assert cache.hits == 1


class TestKernelsAndJobs:
    def test_kernel_lanes_agree(self):
        rng = random.Random(12)
        for _ in range(10):
            store, mal, _ = random_store(rng, max_items=10, max_trans=150)
            config = MinerConfig.for_store(store, mal, rng.randint(1, 5), 0.0)
            tables = [
                mine_frequent(store, config, kernel=k) for k in available_kernels()
            ]
            assert all(t == tables[0] for t in tables)

    def test_jobs_do_not_change_output(self):
        rng = random.Random(13)
        store, mal, _ = random_store(rng, max_items=12, max_trans=200)
        config = MinerConfig.for_store(store, mal, 2, 0.0)
        assert mine_frequent(store, config, jobs=1) == mine_frequent(
            store, config, jobs=8
        )


class TestPrefixIndex:
    def test_groups_by_shared_prefix(self):
        idx = PrefixIndex.build([(1, 2), (1, 3), (2, 3)])
        assert set(idx.groups) == {(1,), (2,)}
        joins = list(idx.joins())
        assert [c for _, _, c in joins] == [(1, 2, 3)]

    def test_level_one_joins_everything(self):
        idx = PrefixIndex.build([(1,), (4,), (9,)])
        cands = [c for _, _, c in idx.joins()]
        assert cands == [(1, 4), (1, 9), (4, 9)]


def test_eligible_items_sorted(toy_store):
    config = toy_config()
    assert eligible_items(toy_store, config) == [TOY_A, TOY_B]


def test_level_table_helpers(toy_store):
    table = mine_frequent(toy_store, toy_config())
    assert table.max_level == 2
    assert table.total() == 3
    assert LevelTable().max_level == 0
