"""Association-rule mining pipeline with per-indicator confidence-boost metrics.

Discretizes tabular case data into an item vocabulary, mines
target-constrained frequent itemsets and rules, and ranks each indicator
by how much its presence boosts rule confidence toward the target.
"""

__version__ = "0.1.0"

from ._kernel import available_kernels, default_kernel
from .core import (
    InputError,
    InternalError,
    ItemMeta,
    Rule,
    TransactionStore,
    UndefinedMetricError,
    canonical_itemset,
    confidence,
    lift,
    support,
    support_count,
)
from .miner import (
    LevelEntry,
    LevelTable,
    MinerConfig,
    SupportCache,
    brute_force_mine,
    generate_rules,
    mine_frequent,
)
