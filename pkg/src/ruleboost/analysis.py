"""Per-indicator attribution from mined rule pairs.

For an indicator item i, every pair of rules whose antecedents differ by
exactly {i} contributes one confidence ratio. The geometric mean of those
ratios over pairs with a non-negligible change (the kappa filter) is the
indicator's average confidence boost; the fraction of pairs with a strict
confidence increase (unfiltered) is its PIC. Both feed a three-tier risk
classification and the plot-data document.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._util import derive_seed
from .core import InputError, UndefinedMetricError

# |ln cr| floors for the near-unity pair filter: the default excludes
# ratio changes below about 25%, the alternative below 5%.
KAPPA_25_PERCENT = 0.223
KAPPA_5_PERCENT = math.log(1 / 0.95)

HISTOGRAM_HIGHLIGHT = 1.2

TIER_HIGH = "High"
TIER_MODERATE = "Moderate"
TIER_LOW = "Low"
TIER_UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class AnalysisConfig:
    kappa: float = KAPPA_25_PERCENT
    pic_threshold: float = 0.75
    acb_threshold: float = 1.2
    swarm_cap: int = 100
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise InputError("kappa must be finite and non-negative")
        if not (math.isfinite(self.pic_threshold) and math.isfinite(self.acb_threshold)):
            raise InputError("tier thresholds must be finite")
        if self.swarm_cap < 1:
            raise InputError("swarm_cap must be >= 1")


@dataclass(frozen=True)
class RulePair:
    """Two rules whose antecedents differ by exactly one item."""

    item: int
    rule_with: object
    rule_without: object
    cr: float


def confidence_ratio(rule_with, rule_without) -> float:
    """Confidence of the with-item rule over the without-item rule."""
    if rule_without.confidence == 0:
        raise UndefinedMetricError("confidence ratio undefined: zero denominator")
    return rule_with.confidence / rule_without.confidence


def find_rule_pairs(rules, item: int):
    """All pairs (r_with, r_without) for `item` among deduplicated rules.

    The without-antecedent is the with-antecedent minus the item, so the
    empty-antecedent baseline rule pairs with every single-item rule.
    """
    by_antecedent = {r.antecedent: r for r in rules}
    pairs = []
    for r in rules:
        if item not in r.antecedent:
            continue
        reduced = tuple(i for i in r.antecedent if i != item)
        partner = by_antecedent.get(reduced)
        if partner is not None:
            pairs.append(RulePair(item, r, partner, confidence_ratio(r, partner)))
    return pairs


def acb(pairs, kappa: float):
    """Geometric mean of cr over pairs with |ln cr| >= kappa.

    Returns (acb, n_kept); acb is None when the filter drops every pair.
    """
    if not pairs:
        raise InputError("acb needs at least one rule pair")
    total = 0.0
    kept = 0
    for p in pairs:
        log_cr = math.log(p.cr)
        if abs(log_cr) < kappa:
            continue
        total += log_cr
        kept += 1
    if kept == 0:
        return None, 0
    return math.exp(total / kept), kept


def pic(pairs) -> float:
    """Fraction of pairs whose confidence strictly increases; no kappa filter."""
    if not pairs:
        raise InputError("pic needs at least one rule pair")
    up = sum(1 for p in pairs if p.rule_with.confidence > p.rule_without.confidence)
    return up / len(pairs)


def classify(acb_value, pic_value, config: AnalysisConfig) -> str:
    """High iff both thresholds hold, Moderate iff exactly one, else Low."""
    if acb_value is None:
        return TIER_UNCLASSIFIED
    hits = (pic_value >= config.pic_threshold) + (acb_value >= config.acb_threshold)
    return (TIER_LOW, TIER_MODERATE, TIER_HIGH)[hits]


def swarm_sample(values, cap: int, seed: int):
    """Uniform sample without replacement of min(cap, n) values, seed-determined.

    Sampled values keep their original relative order.
    """
    if cap < 1:
        raise InputError("swarm cap must be >= 1")
    if len(values) <= cap:
        return list(values)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(values), size=cap, replace=False)
    return [values[i] for i in sorted(idx)]


@dataclass
class IndicatorMetrics:
    """One indicator's pair population and attribution metrics."""

    item: int
    n_pairs_total: int
    n_pairs_kept: int
    acb: float            # None when the kappa filter kept nothing
    pic: float
    cr_values: list       # every pair's cr, in canonical rule order
    tier: str

    def kept_crs(self, kappa: float):
        return [c for c in self.cr_values if abs(math.log(c)) >= kappa]


def compute_indicator_metrics(rules, config: AnalysisConfig, items=None):
    """Metrics for every indicator with at least one rule pair.

    Single pass over the rule list: each rule containing an item pairs
    with the rule for the antecedent minus that item, when mined. Returns
    {item id: IndicatorMetrics}, keyed in ascending item order.
    """
    by_antecedent = {r.antecedent: r for r in rules}
    wanted = set(items) if items is not None else None

    crs = {}
    ups = {}
    for r in rules:
        for item in r.antecedent:
            if wanted is not None and item not in wanted:
                continue
            reduced = tuple(i for i in r.antecedent if i != item)
            partner = by_antecedent.get(reduced)
            if partner is None:
                continue
            crs.setdefault(item, []).append(r.confidence / partner.confidence)
            if r.confidence > partner.confidence:
                ups[item] = ups.get(item, 0) + 1

    out = {}
    for item in sorted(crs):
        values = crs[item]
        total = 0.0
        kept = 0
        for c in values:
            log_cr = math.log(c)
            if abs(log_cr) >= config.kappa:
                total += log_cr
                kept += 1
        acb_value = math.exp(total / kept) if kept else None
        pic_value = ups.get(item, 0) / len(values)
        out[item] = IndicatorMetrics(
            item=item,
            n_pairs_total=len(values),
            n_pairs_kept=kept,
            acb=acb_value,
            pic=pic_value,
            cr_values=values,
            tier=classify(acb_value, pic_value, config),
        )
    return out


def _ranked(metrics):
    """Descending acb with unclassified entries last; item id breaks ties."""
    return sorted(
        metrics.values(),
        key=lambda m: (m.acb is None, -(m.acb or 0.0), m.item),
    )


def build_indicator_report(store, metrics):
    """indicators.json content: one row per indicator, descending acb."""
    rows = []
    for m in _ranked(metrics):
        meta = store.vocabulary[m.item]
        rows.append(
            {
                "feature": meta.feature,
                "bin": meta.bin,
                "n_pairs_total": m.n_pairs_total,
                "n_pairs_kept": m.n_pairs_kept,
                "acb": m.acb,
                "pic": m.pic,
                "tier": m.tier,
            }
        )
    return rows


def build_plotdata(store, metrics, config: AnalysisConfig):
    """plotdata.json content for the downstream renderers.

    Covers every indicator the kappa filter left classifiable; the violin
    section holds all kept ln-cr values, the swarm section a seeded sample
    of the kept raw ratios, the histogram each indicator's acb.
    """
    scatter = []
    violin = {}
    swarm = {}
    histogram = {}
    for m in _ranked(metrics):
        if m.acb is None:
            continue
        label = store.vocabulary[m.item].label
        kept = m.kept_crs(config.kappa)
        scatter.append({"label": label, "pic": m.pic, "acb": m.acb, "tier": m.tier})
        violin[label] = [math.log(c) for c in kept]
        swarm[label] = swarm_sample(kept, config.swarm_cap, derive_seed(config.seed, "swarm", m.item))
        histogram[label] = m.acb
    return {
        "scatter": scatter,
        "violin": violin,
        "swarm": swarm,
        "histogram": histogram,
        "thresholds": {
            "pic": config.pic_threshold,
            "acb": config.acb_threshold,
            "histogram_highlight": HISTOGRAM_HIGHLIGHT,
        },
    }
