import random

import pytest

from ruleboost import ItemMeta, TransactionStore

# 5-transaction store used across modules:
# T1={a,M}, T2={a,b,M}, T3={a}, T4={b}, T5={a,b,M} with target M
TOY_A, TOY_B, TOY_M = 0, 1, 2


@pytest.fixture
def toy_store():
    vocab = [
        ItemMeta("fa", "a"),
        ItemMeta("fb", "b"),
        ItemMeta("label", "malignant", is_target=True),
    ]
    return TransactionStore(
        vocab, [(0, 2), (0, 1, 2), (0,), (1,), (0, 1, 2)]
    )


def naive_count(store, items):
    """Independent oracle: plain subset scan over the transaction list."""
    wanted = set(items)
    return sum(1 for t in store.transactions if wanted <= set(t))


def random_store(rng: random.Random, max_items=12, max_trans=200,
                 n_missing_max=3, force_target=None):
    """Random store with eligible, missing, and two label items.

    Returns (store, malignant_id, benign_id). Transactions carry exactly
    one label item; eligible and missing items appear independently.
    """
    n_elig = rng.randint(1, max_items)
    n_missing = rng.randint(0, n_missing_max)
    vocab = [ItemMeta(f"f{i}", "x") for i in range(n_elig)]
    vocab += [
        ItemMeta(f"m{j}", "N/A", is_missing=True) for j in range(n_missing)
    ]
    benign = len(vocab)
    vocab.append(ItemMeta("label", "benign", is_target=True))
    malignant = len(vocab)
    vocab.append(ItemMeta("label", "malignant", is_target=True))

    n_trans = rng.randint(1, max_trans)
    p_item = rng.uniform(0.15, 0.7)
    p_missing = rng.uniform(0.0, 0.3)
    beta = force_target if force_target is not None else rng.uniform(0.05, 0.6)
    transactions = []
    for _ in range(n_trans):
        items = [i for i in range(n_elig) if rng.random() < p_item]
        items += [n_elig + j for j in range(n_missing) if rng.random() < p_missing]
        items.append(malignant if rng.random() < beta else benign)
        transactions.append(tuple(sorted(items)))
    return TransactionStore(vocab, transactions), malignant, benign
