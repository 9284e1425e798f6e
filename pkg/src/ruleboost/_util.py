"""Small shared helpers."""

import hashlib


def derive_seed(root, *scope) -> int:
    """Stable 64-bit seed for one purpose, derived from the run seed.

    Every random choice in a pipeline run flows from the single top-level
    seed through this derivation, so stages rerun standalone stay
    consistent with full-pipeline runs.
    """
    text = "|".join([str(root), *map(str, scope)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
