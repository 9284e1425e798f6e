"""Pure-Python bitset engine: one arbitrary-precision int bitmap per item."""


class BitsetEngine:
    """Counts itemset support via bitwise AND over per-item bitmaps.

    Bit r of an item's mask is set iff transaction r contains the item.
    Mask buffers handed back to callers are plain lists of ints.
    """

    NAME = "python"

    def __init__(self, transactions, n_items, n_trans):
        masks = [0] * n_items
        for row, items in enumerate(transactions):
            bit = 1 << row
            for i in items:
                masks[i] |= bit
        self._masks = masks
        self.n_items = n_items
        self.n_trans = n_trans

    def count_itemset(self, items):
        if not items:
            return self.n_trans
        masks = self._masks
        acc = masks[items[0]]
        for i in items[1:]:
            acc &= masks[i]
            if not acc:
                return 0
        return acc.bit_count()

    def singletons(self, items, target):
        """Masks plus (joint-with-target, plain) counts for singleton antecedents."""
        masks = self._masks
        tmask = masks[target]
        buf = [masks[i] for i in items]
        joint = [(m & tmask).bit_count() for m in buf]
        ante = [m.bit_count() for m in buf]
        return buf, joint, ante

    def join_and_count(self, buf, parent_rows, item_ids, target, jobs=1):
        """Candidate masks parent&item plus both counts; `jobs` is a no-op here."""
        masks = self._masks
        tmask = masks[target]
        out = [buf[p] & masks[i] for p, i in zip(parent_rows, item_ids)]
        joint = [(m & tmask).bit_count() for m in out]
        ante = [m.bit_count() for m in out]
        return out, joint, ante

    def select(self, buf, rows):
        return [buf[r] for r in rows]
