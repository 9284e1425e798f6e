"""Itemset and transaction model plus the three classical rule measures.

Items are dense integer ids into a vocabulary of (feature, bin) pairs.
Itemsets are kept in canonical form everywhere: strictly ascending tuples
of ids. Supports are exact integer counts; the fractional forms returned
by :func:`support`, :func:`confidence` and :func:`lift` are plain double
divisions of those counts.
"""

from dataclasses import dataclass, field

from ._kernel import get_engine_class

ItemId = int
Itemset = tuple  # tuple[ItemId, ...] in canonical (sorted, duplicate-free) form


class InputError(ValueError):
    """Invalid user input: bad item ids, malformed files, contradictory config."""


class UndefinedMetricError(ValueError):
    """A ratio metric was requested where its denominator has zero support."""


class InternalError(RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""


def canonical_itemset(items) -> tuple:
    """Return `items` as a sorted duplicate-free tuple of non-negative ints."""
    out = tuple(sorted(set(items)))
    for i in out:
        if not isinstance(i, int) or i < 0:
            raise InputError(f"item ids must be non-negative integers, got {i!r}")
    return out


@dataclass(frozen=True)
class ItemMeta:
    """One vocabulary entry: a (feature, bin) pair with its role flags."""

    feature: str
    bin: str
    is_missing: bool = False
    is_target: bool = False

    @property
    def label(self) -> str:
        return f"{self.feature}: {self.bin}"


class TransactionStore:
    """Encoded case database: item vocabulary plus one itemset per case.

    Immutable after construction and safe to share across threads; all
    operations are pure reads. Construction canonicalizes transactions and
    checks ids against the vocabulary. The stricter invariants that hold
    for encoded datasets (exactly one label item per transaction, at most
    one bin per feature) are checked by :meth:`validate_encoded`, so ad-hoc
    stores without label items can still be built for experiments.
    """

    def __init__(self, vocabulary, transactions):
        self.vocabulary = list(vocabulary)
        n_items = len(self.vocabulary)
        canon = []
        for t in transactions:
            items = canonical_itemset(t)
            if items and items[-1] >= n_items:
                raise InputError(
                    f"transaction references item {items[-1]} outside the "
                    f"{n_items}-item vocabulary"
                )
            canon.append(items)
        self.transactions = canon
        self._engines = {}

    @property
    def n(self) -> int:
        return len(self.transactions)

    def engine(self, kernel=None):
        """Counting engine for this store (vertical bitmap representation).

        Engines are cached per kernel name; which kernel runs never changes
        any count.
        """
        cls = get_engine_class(kernel)
        eng = self._engines.get(cls.NAME)
        if eng is None:
            eng = cls(self.transactions, len(self.vocabulary), self.n)
            self._engines[cls.NAME] = eng
        return eng

    def meta(self, item: int) -> ItemMeta:
        return self.vocabulary[item]

    def find_item(self, feature: str, bin_label: str) -> int:
        for i, m in enumerate(self.vocabulary):
            if m.feature == feature and m.bin == bin_label:
                return i
        raise InputError(f"no item named ({feature!r}, {bin_label!r}) in vocabulary")

    def target_items(self) -> tuple:
        return tuple(i for i, m in enumerate(self.vocabulary) if m.is_target)

    def missing_items(self) -> tuple:
        return tuple(i for i, m in enumerate(self.vocabulary) if m.is_missing)

    def validate_encoded(self):
        """Check the invariants an encoded dataset must satisfy."""
        if self.n < 1:
            raise InputError("store has no transactions")
        targets = set(self.target_items())
        if len(targets) != 2:
            raise InputError(f"expected exactly 2 label items, found {len(targets)}")
        seen = set()
        for m in self.vocabulary:
            key = (m.feature, m.bin)
            if key in seen:
                raise InputError(f"duplicate vocabulary entry {key}")
            seen.add(key)
        for row, t in enumerate(self.transactions):
            n_label = sum(1 for i in t if i in targets)
            if n_label != 1:
                raise InputError(f"transaction {row} carries {n_label} label items")
            features = [self.vocabulary[i].feature for i in t]
            if len(features) != len(set(features)):
                raise InputError(f"transaction {row} has two bins of one feature")
        return self


def _checked(store: TransactionStore, items) -> tuple:
    items = canonical_itemset(items)
    if items and items[-1] >= len(store.vocabulary):
        raise InputError(f"item {items[-1]} outside vocabulary")
    return items


def support_count(store: TransactionStore, itemset) -> int:
    """Number of transactions containing every item of `itemset`."""
    items = _checked(store, itemset)
    return store.engine().count_itemset(items)


def support(store: TransactionStore, itemset) -> float:
    """Fraction of transactions containing `itemset`; support(∅) is 1."""
    return support_count(store, itemset) / store.n


def confidence(store: TransactionStore, antecedent, consequent) -> float:
    """support(antecedent ∪ consequent) / support(antecedent)."""
    a = _checked(store, antecedent)
    c = _checked(store, consequent)
    if set(a) & set(c):
        raise InputError("antecedent and consequent must be disjoint")
    denom = support_count(store, a)
    if denom == 0:
        raise UndefinedMetricError("confidence undefined: antecedent has zero support")
    joint = support_count(store, a + c)
    return joint / denom


def lift(store: TransactionStore, antecedent, consequent) -> float:
    """confidence(antecedent → consequent) / support(consequent)."""
    c = _checked(store, consequent)
    c_count = support_count(store, c)
    if c_count == 0:
        raise UndefinedMetricError("lift undefined: consequent has zero support")
    return confidence(store, antecedent, c) / (c_count / store.n)


@dataclass(frozen=True)
class Rule:
    """Single-consequent association rule antecedent → consequent.

    `support` is the joint support of antecedent ∪ consequent. Exact counts
    ride along so thresholds and serialization never depend on float
    boundaries.
    """

    antecedent: tuple
    consequent: tuple
    support: float
    confidence: float
    lift: float
    joint_count: int
    antecedent_count: int

    def __post_init__(self):
        if set(self.antecedent) & set(self.consequent):
            raise InputError("rule antecedent and consequent overlap")
