"""Target-constrained apriori.

Mines every antecedent A over eligible items whose joint count with the
target item meets the support floor, then emits single-consequent rules
A → {target} above the confidence floor. The target never enters
candidate generation: every counted itemset is A ∪ {target} implicitly,
which realizes target pruning while keeping the standard prefix join.
Candidate joins run level by level through a prefix index, and counting
goes through the store's bitset engine.

Levels index antecedent size; a level-k antecedent corresponds to a
(k+1)-item itemset once the target is counted in.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import InputError, Rule, TransactionStore, canonical_itemset


@dataclass(frozen=True)
class MinerConfig:
    """Thresholds and item roles for one mining run.

    `min_support_count` is an integer count on A ∪ {target}; comparing
    counts instead of fractions sidesteps float ties at thresholds like
    10/1673. `min_confidence` stays a fraction.
    """

    min_support_count: int
    min_confidence: float
    target: int
    excluded: frozenset = frozenset()
    max_k: int = None

    def __post_init__(self):
        if self.min_support_count < 1:
            raise InputError("min_support_count must be >= 1")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise InputError("min_confidence must be in [0, 1]")
        if self.target in self.excluded:
            raise InputError("target item cannot be excluded")
        if self.max_k is not None and self.max_k < 1:
            raise InputError("max_k must be >= 1 when set")
        object.__setattr__(self, "excluded", frozenset(self.excluded))

    @classmethod
    def for_store(cls, store, target, min_support_count, min_confidence, max_k=None):
        """Config with the standard exclusions: missing bins + other label items."""
        excluded = set(store.missing_items())
        excluded.update(i for i in store.target_items() if i != target)
        return cls(min_support_count, min_confidence, target, frozenset(excluded), max_k)


@dataclass(frozen=True)
class LevelEntry:
    antecedent: tuple
    joint_count: int
    antecedent_count: int


@dataclass
class LevelTable:
    """Frequent antecedents by level, each with joint and antecedent counts.

    Entries per level are in ascending lexicographic antecedent order, so
    two tables compare equal iff they hold exactly the same result.
    """

    levels: dict = field(default_factory=dict)

    def entries(self):
        for k in sorted(self.levels):
            yield from self.levels[k]

    def antecedents(self):
        return [e.antecedent for e in self.entries()]

    @property
    def max_level(self) -> int:
        return max(self.levels, default=0)

    def total(self) -> int:
        return sum(len(v) for v in self.levels.values())


class PrefixIndex:
    """Level antecedents grouped by their shared (k-1)-item prefix.

    Two antecedents join into a level-(k+1) candidate iff they sit in the
    same group and differ in the last item.
    """

    def __init__(self, groups):
        self.groups = groups

    @classmethod
    def build(cls, antecedents):
        groups = {}
        for row, a in enumerate(antecedents):
            groups.setdefault(a[:-1], []).append((a[-1], row))
        return cls(groups)

    def joins(self):
        """Yield (parent_row, new_item, candidate) in lexicographic order."""
        for prefix, members in self.groups.items():
            for x in range(len(members)):
                last_a, row_a = members[x]
                for y in range(x + 1, len(members)):
                    yield row_a, members[y][0], prefix + (last_a, members[y][0])


class SupportCache:
    """Memo from canonical itemset byte encoding to support count.

    A pure memo: a cached value always equals a fresh recount, and running
    with the cache disabled changes nothing but speed.
    """

    def __init__(self):
        self._table = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(items) -> bytes:
        return b"".join(i.to_bytes(4, "little") for i in items)

    def get(self, items):
        got = self._table.get(self._key(items))
        if got is None:
            self.misses += 1
        else:
            self.hits += 1
        return got

    def put(self, items, count: int):
        self._table[self._key(items)] = count

    def count(self, store: TransactionStore, items) -> int:
        """Memoized support count of `items` in `store`."""
        items = canonical_itemset(items)
        got = self.get(items)
        if got is None:
            got = store.engine().count_itemset(items)
            self.put(items, got)
        return got

    def __len__(self):
        return len(self._table)


def eligible_items(store: TransactionStore, config: MinerConfig):
    return [
        i
        for i in range(len(store.vocabulary))
        if i != config.target and i not in config.excluded
    ]


def _validate(store, config):
    if store.n < 1:
        raise InputError("cannot mine an empty store")
    if not 0 <= config.target < len(store.vocabulary):
        raise InputError(f"target item {config.target} not in vocabulary")


def mine_frequent(store, config, *, kernel=None, jobs=1, cache=None) -> LevelTable:
    """All antecedents A over eligible items with count(A ∪ {target}) ≥ floor.

    Complete and sound versus brute-force enumeration; output canonically
    sorted within each level. `cache`, when given, is populated with every
    count the run computes. Engines that expose compiled candidate
    generation get the array-based level loop; results are identical
    either way.
    """
    _validate(store, config)
    eng = store.engine(kernel)

    def remember(entry):
        if cache is not None:
            cache.put(entry.antecedent, entry.antecedent_count)
            joint = tuple(sorted(entry.antecedent + (config.target,)))
            cache.put(joint, entry.joint_count)

    table = LevelTable()
    elig = eligible_items(store, config)
    if getattr(eng, "generate_candidates", None) is not None:
        _mine_arrays(eng, config, elig, table, remember, jobs)
    else:
        _mine_tuples(eng, config, elig, table, remember, jobs)
    return table


def _mine_tuples(eng, config, elig, table, remember, jobs):
    target = config.target
    min_count = config.min_support_count
    buf, joint, ante = eng.singletons(elig, target)
    keep = [r for r in range(len(elig)) if joint[r] >= min_count]
    entries = [LevelEntry((elig[r],), joint[r], ante[r]) for r in keep]
    for e in entries:
        remember(e)
    if not entries:
        return
    table.levels[1] = entries
    buf = eng.select(buf, keep)
    antecedents = [e.antecedent for e in entries]

    k = 2
    while config.max_k is None or k <= config.max_k:
        frequent_prev = set(antecedents)
        parents, new_items, candidates = [], [], []
        for row_a, item_b, cand in PrefixIndex.build(antecedents).joins():
            # prefix join covers two (k-1)-subsets; check the remaining ones
            closed = all(
                cand[:i] + cand[i + 1 :] in frequent_prev for i in range(len(cand) - 2)
            )
            if closed:
                parents.append(row_a)
                new_items.append(item_b)
                candidates.append(cand)
        if not candidates:
            break
        cbuf, joint, ante = eng.join_and_count(buf, parents, new_items, target, jobs=jobs)
        keep = [c for c in range(len(candidates)) if joint[c] >= min_count]
        if not keep:
            break
        entries = [LevelEntry(candidates[c], joint[c], ante[c]) for c in keep]
        for e in entries:
            remember(e)
        table.levels[k] = entries
        buf = eng.select(cbuf, keep)
        antecedents = [e.antecedent for e in entries]
        k += 1


def _mine_arrays(eng, config, elig, table, remember, jobs):
    target = config.target
    min_count = config.min_support_count
    buf, joint, ante = eng.singletons(elig, target)
    joint = np.asarray(joint)
    keep = np.nonzero(joint >= min_count)[0]
    if keep.size == 0:
        return
    kept_items = np.asarray(elig, dtype=np.int32)[keep]
    entries = [
        LevelEntry((i,), j, a)
        for i, j, a in zip(
            kept_items.tolist(), joint[keep].tolist(), np.asarray(ante)[keep].tolist()
        )
    ]
    for e in entries:
        remember(e)
    table.levels[1] = entries
    buf = eng.select(buf, keep)
    prev = kept_items.reshape(-1, 1)

    k = 2
    while config.max_k is None or k <= config.max_k:
        parents, new_items, cand = eng.generate_candidates(prev)
        if len(parents) == 0:
            break
        cbuf, joint, ante = eng.join_and_count(buf, parents, new_items, target, jobs=jobs)
        joint = np.asarray(joint)
        keep = np.nonzero(joint >= min_count)[0]
        if keep.size == 0:
            break
        cand_kept = np.ascontiguousarray(cand[keep])
        entries = [
            LevelEntry(tuple(r), j, a)
            for r, j, a in zip(
                cand_kept.tolist(), joint[keep].tolist(), np.asarray(ante)[keep].tolist()
            )
        ]
        for e in entries:
            remember(e)
        table.levels[k] = entries
        buf = eng.select(cbuf, keep)
        prev = cand_kept
        k += 1


def generate_rules(store, levels: LevelTable, config: MinerConfig, include_empty_baseline=True):
    """Rules A → {target} for stored antecedents passing the confidence floor.

    The empty-antecedent baseline rule ∅ → {target} (confidence equal to
    the target prevalence β) is emitted unconditionally when the flag is
    on: it is the reference point for single-item rule pairs downstream.
    """
    _validate(store, config)
    target = config.target
    n = store.n
    target_count = store.engine().count_itemset((target,))
    beta = target_count / n
    rules = []
    if include_empty_baseline and target_count > 0:
        rules.append(Rule((), (target,), beta, beta, 1.0, target_count, n))
    for entry in levels.entries():
        conf = entry.joint_count / entry.antecedent_count
        if conf >= config.min_confidence:
            rules.append(
                Rule(
                    entry.antecedent,
                    (target,),
                    entry.joint_count / n,
                    conf,
                    conf / beta,
                    entry.joint_count,
                    entry.antecedent_count,
                )
            )
    return rules


BRUTE_FORCE_MAX_ITEMS = 20


def brute_force_mine(store, config) -> LevelTable:
    """Oracle: exhaustive subset enumeration with naive per-transaction counting.

    Shares nothing with the fast path except the output contract. Guarded
    to at most 20 eligible items.
    """
    _validate(store, config)
    elig = eligible_items(store, config)
    if len(elig) > BRUTE_FORCE_MAX_ITEMS:
        raise InputError(
            f"brute force guard: {len(elig)} eligible items exceeds {BRUTE_FORCE_MAX_ITEMS}"
        )
    tsets = [frozenset(t) for t in store.transactions]
    target = config.target
    min_count = config.min_support_count
    table = LevelTable()
    top = len(elig) if config.max_k is None else min(config.max_k, len(elig))
    for k in range(1, top + 1):
        entries = []
        for combo in itertools.combinations(elig, k):
            joint = 0
            ante = 0
            s = frozenset(combo)
            for t in tsets:
                if s <= t:
                    ante += 1
                    if target in t:
                        joint += 1
            if joint >= min_count:
                entries.append(LevelEntry(combo, joint, ante))
        if not entries:
            break  # anti-monotonicity: no larger set can reach the floor
        table.levels[k] = entries
    return table
