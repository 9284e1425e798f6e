"""End-to-end pipeline driver.

`run` executes bin → mine → analyze and writes a reproduction manifest;
each stage is also a standalone subcommand working over the same
interchange files, and `run` composes the stages through those files, so
staged and full runs produce identical bytes. All randomness flows from
the single configured seed.
"""

import hashlib
import math
import os
import sys
import time
import traceback
from dataclasses import dataclass
from fractions import Fraction

import click

from . import __version__, binning
from ._jsonio import read_json, read_jsonl, write_json
from ._util import derive_seed
from .analysis import (
    AnalysisConfig,
    build_indicator_report,
    build_plotdata,
    compute_indicator_metrics,
)
from .core import InputError, ItemMeta, Rule, TransactionStore
from .miner import MinerConfig, generate_rules, mine_frequent
from . import synth as synth_mod

BINNED_CSV = "binned.csv"
STORE_JSON = "store.json"
FREQUENT_JSONL = "frequent.jsonl"
RULES_JSONL = "rules.jsonl"
INDICATORS_JSON = "indicators.json"
PLOTDATA_JSON = "plotdata.json"
MANIFEST_JSON = "manifest.json"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


@dataclass
class Settings:
    """Effective pipeline parameters after config file + flag merging."""

    base_dir: str = "."
    doc: dict = None
    binning_config: object = None
    cases_csv: str = None
    tsh_csv: str = None
    min_support: object = 10
    min_confidence: object = "beta-squared"
    max_k: int = None
    kappa: float = 0.223
    pic_threshold: float = 0.75
    acb_threshold: float = 1.2
    swarm_cap: int = 100
    seed: int = 0


def load_settings(config_path=None, **overrides) -> Settings:
    s = Settings()
    if config_path:
        doc = read_json(config_path)
        s.base_dir = os.path.dirname(os.path.abspath(config_path))
        s.doc = doc
        if doc.get("columns"):
            s.binning_config = binning.parse_binning_config(doc)
        s.cases_csv = doc.get("cases_csv")
        s.tsh_csv = doc.get("tsh_csv")
        miner = doc.get("miner", {})
        s.min_support = miner.get("min_support", s.min_support)
        s.min_confidence = miner.get("min_confidence", s.min_confidence)
        s.max_k = miner.get("max_k", s.max_k)
        ana = doc.get("analysis", {})
        s.kappa = ana.get("kappa", s.kappa)
        s.pic_threshold = ana.get("pic_threshold", s.pic_threshold)
        s.acb_threshold = ana.get("acb_threshold", s.acb_threshold)
        s.swarm_cap = ana.get("swarm_cap", s.swarm_cap)
        s.seed = doc.get("seed", s.seed)
    for key, value in overrides.items():
        if value is not None:
            setattr(s, key, value)
    return s


def _input_path(settings: Settings, configured: str, what: str) -> str:
    if not configured:
        raise InputError(f"config does not name a {what} file")
    return os.path.join(settings.base_dir, configured)


def resolve_min_support(value, n: int) -> int:
    """Normalize a count or fraction-of-n to an integer count (ceiling)."""
    if isinstance(value, str):
        try:
            value = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse min support {value!r}") from None
    if isinstance(value, float):
        value = Fraction(str(value))
    if isinstance(value, Fraction):
        if value >= 1 and value.denominator == 1:
            value = int(value)
        elif 0 < value < 1:
            scaled = value * n
            return int(math.ceil(scaled)) if scaled.denominator != 1 else int(scaled)
        else:
            raise InputError(f"min support fraction {value} outside (0, 1)")
    if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
        return value
    raise InputError(f"min support must be a count >= 1 or a fraction of n, got {value!r}")


def resolve_min_confidence(value, beta: float) -> float:
    """Either an explicit fraction or 'beta-squared' from the loaded data."""
    if value == "beta-squared":
        return beta * beta
    try:
        gamma = float(value)
    except (TypeError, ValueError):
        raise InputError(f"cannot parse min confidence {value!r}") from None
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"min confidence {gamma} outside [0, 1]")
    return gamma


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _vocabulary_doc(store: TransactionStore):
    return [
        {
            "id": i,
            "feature": m.feature,
            "bin": m.bin,
            "is_missing": m.is_missing,
            "is_target": m.is_target,
        }
        for i, m in enumerate(store.vocabulary)
    ]


# ---------------------------------------------------------------------------
# stages

def stage_bin(settings: Settings, out_dir: str) -> dict:
    """cases CSV (+ TSH series) + config -> binned.csv + store.json."""
    if settings.binning_config is None:
        raise InputError("binning needs a --config file with a columns section")
    cfg = settings.binning_config
    cases_path = _input_path(settings, settings.cases_csv, "cases CSV")
    table = binning.load_cases_csv(cases_path, cfg)
    inputs = {"cases_csv": {"path": settings.cases_csv, "sha256": _sha256(cases_path)}}
    if any(c.series for c in cfg.features):
        tsh_path = _input_path(settings, settings.tsh_csv, "TSH series CSV")
        series = binning.load_tsh_csv(tsh_path, cfg.na_tokens)
        binning.attach_series_features(table, series)
        inputs["tsh_csv"] = {"path": settings.tsh_csv, "sha256": _sha256(tsh_path)}

    binned = binning.bin_table(
        table, seed_for=lambda name: derive_seed(settings.seed, "kmeans", name)
    )
    store = binning.encode_dataset(binned).validate_encoded()

    import csv as _csv

    with open(os.path.join(out_dir, BINNED_CSV), "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        id_col = cfg.id_column
        header = ([id_col] if id_col else []) + [c.name for c in binned.features] + [binned.target.name]
        writer.writerow(header)
        for r in range(binned.n_rows):
            row = [binned.ids[r]] if id_col else []
            row += [c.labels[r] for c in binned.features]
            row.append(binned.target.labels[r])
            writer.writerow(row)

    tcol = cfg.target
    write_json(
        os.path.join(out_dir, STORE_JSON),
        {
            "n": store.n,
            "benign_item": store.find_item(tcol.name, tcol.benign),
            "malignant_item": store.find_item(tcol.name, tcol.malignant),
            "vocabulary": _vocabulary_doc(store),
            "transactions": [list(t) for t in store.transactions],
        },
    )
    return {
        "inputs": inputs,
        "rows": {
            "loaded": table.stats.loaded,
            "dropped_label": table.stats.dropped_label,
            "dropped_invalid": table.stats.dropped_invalid,
            "retained": table.stats.retained,
        },
        "items": len(store.vocabulary),
        "missing_bins": len(store.missing_items()),
    }


def _require(out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    if not os.path.exists(path):
        raise InputError(f"missing expected file {path}; run the earlier stage first")
    return path


def load_store(out_dir: str):
    doc = read_json(_require(out_dir, STORE_JSON))
    vocab = [
        ItemMeta(v["feature"], v["bin"], v["is_missing"], v["is_target"])
        for v in doc["vocabulary"]
    ]
    store = TransactionStore(vocab, [tuple(t) for t in doc["transactions"]])
    return store, doc["malignant_item"], doc["benign_item"]


def _names(store, items):
    return [[store.vocabulary[i].feature, store.vocabulary[i].bin] for i in items]


def _item_name_json(store):
    """Per-item (feature, bin) pair pre-encoded as a JSON fragment."""
    import json as _json

    return [
        _json.dumps([m.feature, m.bin], ensure_ascii=False, separators=(",", ":"))
        for m in store.vocabulary
    ]


def _f17(x: float) -> str:
    return format(x, ".17g")


def write_frequent_jsonl(path, store, table):
    # schema-specialized writer: these files run to hundreds of MB
    name = _item_name_json(store)
    n = store.n
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in table.entries():
            ante = ",".join(name[i] for i in e.antecedent)
            k = len(e.antecedent)
            fh.write(
                f'{{"level":{k},"itemset_size":{k + 1},"antecedent":[{ante}],'
                f'"joint_count":{e.joint_count},"antecedent_count":{e.antecedent_count},'
                f'"support":{_f17(e.joint_count / n)}}}\n'
            )


def write_rules_jsonl(path, store, rules):
    name = _item_name_json(store)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in rules:
            ante = ",".join(name[i] for i in r.antecedent)
            fh.write(
                f'{{"antecedent":[{ante}],"consequent":{name[r.consequent[0]]},'
                f'"joint_count":{r.joint_count},"antecedent_count":{r.antecedent_count},'
                f'"support":{_f17(r.support)},"confidence":{_f17(r.confidence)},'
                f'"lift":{_f17(r.lift)}}}\n'
            )


def stage_mine(settings: Settings, out_dir: str, jobs: int = 1) -> dict:
    """store.json -> frequent.jsonl + rules.jsonl."""
    store, malignant, _benign = load_store(out_dir)
    min_count = resolve_min_support(settings.min_support, store.n)
    beta = store.engine().count_itemset((malignant,)) / store.n
    gamma = resolve_min_confidence(settings.min_confidence, beta)
    config = MinerConfig.for_store(
        store, malignant, min_count, gamma, max_k=settings.max_k
    )
    table = mine_frequent(store, config, jobs=jobs)
    rules = generate_rules(store, table, config)

    write_frequent_jsonl(os.path.join(out_dir, FREQUENT_JSONL), store, table)
    write_rules_jsonl(os.path.join(out_dir, RULES_JSONL), store, rules)
    return {
        "min_support_count": min_count,
        "beta": beta,
        "gamma": gamma,
        "frequent_itemsets": table.total(),
        "max_level": table.max_level,
        "rules": len(rules),
    }


def load_rules(out_dir: str, store: TransactionStore):
    index = {(m.feature, m.bin): i for i, m in enumerate(store.vocabulary)}

    def item(pair):
        try:
            return index[(pair[0], pair[1])]
        except KeyError:
            raise InputError(f"rules file references unknown item {pair!r}") from None

    rules = []
    for doc in read_jsonl(_require(out_dir, RULES_JSONL)):
        rules.append(
            Rule(
                tuple(sorted(item(p) for p in doc["antecedent"])),
                (item(doc["consequent"]),),
                doc["support"],
                doc["confidence"],
                doc["lift"],
                doc["joint_count"],
                doc["antecedent_count"],
            )
        )
    return rules


def stage_analyze(settings: Settings, out_dir: str) -> dict:
    """rules.jsonl + store.json -> indicators.json + plotdata.json."""
    store, _malignant, _benign = load_store(out_dir)
    rules = load_rules(out_dir, store)
    config = AnalysisConfig(
        kappa=settings.kappa,
        pic_threshold=settings.pic_threshold,
        acb_threshold=settings.acb_threshold,
        swarm_cap=settings.swarm_cap,
        seed=settings.seed,
    )
    metrics = compute_indicator_metrics(rules, config)
    write_json(os.path.join(out_dir, INDICATORS_JSON), build_indicator_report(store, metrics))
    write_json(os.path.join(out_dir, PLOTDATA_JSON), build_plotdata(store, metrics, config))
    tiers = {}
    for m in metrics.values():
        tiers[m.tier] = tiers.get(m.tier, 0) + 1
    return {"indicators": len(metrics), "tiers": tiers}


def render_report(out_dir: str) -> str:
    rows = read_json(_require(out_dir, INDICATORS_JSON))
    lines = ["Indicator | ACB | PIC"]
    for r in rows:
        acb = "n/a" if r["acb"] is None else f"{r['acb']:.4f}"
        lines.append(f"{r['feature']}: {r['bin']} | {acb} | {r['pic']:.4f}")
    return "\n".join(lines)


def run_pipeline(settings: Settings, out_dir: str, jobs: int = 1) -> dict:
    """All stages over the interchange files, plus manifest.json."""
    os.makedirs(out_dir, exist_ok=True)
    timing = {}
    t0 = time.perf_counter()
    bin_info = stage_bin(settings, out_dir)
    timing["bin"] = time.perf_counter() - t0
    t1 = time.perf_counter()
    mine_info = stage_mine(settings, out_dir, jobs=jobs)
    timing["mine"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    analyze_info = stage_analyze(settings, out_dir)
    timing["analyze"] = time.perf_counter() - t2
    timing["total"] = time.perf_counter() - t0

    store_doc = read_json(os.path.join(out_dir, STORE_JSON))
    manifest = {
        "tool": {"name": "ruleboost", "version": __version__},
        "config": {
            "source": settings.doc,
            "resolved": {
                "min_support": str(settings.min_support),
                "min_support_count": mine_info["min_support_count"],
                "min_confidence": str(settings.min_confidence),
                "beta": mine_info["beta"],
                "gamma": mine_info["gamma"],
                "max_k": settings.max_k,
                "kappa": settings.kappa,
                "pic_threshold": settings.pic_threshold,
                "acb_threshold": settings.acb_threshold,
                "swarm_cap": settings.swarm_cap,
                "seed": settings.seed,
            },
        },
        "inputs": bin_info["inputs"],
        "rows": bin_info["rows"],
        "vocabulary": store_doc["vocabulary"],
        "counts": {
            "items": bin_info["items"],
            "missing_bins": bin_info["missing_bins"],
            "frequent_itemsets": mine_info["frequent_itemsets"],
            "max_level": mine_info["max_level"],
            "rules": mine_info["rules"],
            "indicators": analyze_info["indicators"],
        },
        # wall-clock details vary run to run; everything above is reproducible
        "execution": {"jobs": jobs, "timing_s": timing},
    }
    write_json(os.path.join(out_dir, MANIFEST_JSON), manifest)
    return manifest


# ---------------------------------------------------------------------------
# command-line interface

def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except Exception:
            traceback.print_exc()
            sys.exit(EXIT_INTERNAL)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_COMMON = [
    click.option("--min-support", default=None, help="Support floor: count N or fraction of n."),
    click.option("--min-confidence", default=None, help="Confidence floor X, or 'beta-squared'."),
    click.option("--max-k", type=int, default=None, help="Cap on antecedent size."),
]
_ANALYSIS = [
    click.option("--kappa", type=float, default=None, help="Near-unity pair filter on |ln cr|."),
    click.option("--pic-threshold", type=float, default=None),
    click.option("--acb-threshold", type=float, default=None),
    click.option("--swarm-cap", type=int, default=None),
]


def _apply(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


def _default_jobs():
    return os.cpu_count() or 1


@click.group()
@click.version_option(__version__)
def main():
    """Discretize, mine target-constrained rules, and rank indicators."""


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@_apply(_COMMON)
@_apply(_ANALYSIS)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None, help="Worker threads for support counting.")
@_guarded
def cmd_run(config_path, out_dir, min_support, min_confidence, max_k,
            kappa, pic_threshold, acb_threshold, swarm_cap, seed, jobs):
    """Full pipeline: bin, mine, analyze, manifest."""
    settings = load_settings(
        config_path,
        min_support=min_support,
        min_confidence=min_confidence,
        max_k=max_k,
        kappa=kappa,
        pic_threshold=pic_threshold,
        acb_threshold=acb_threshold,
        swarm_cap=swarm_cap,
        seed=seed,
    )
    manifest = run_pipeline(settings, out_dir, jobs=jobs or _default_jobs())
    counts = manifest["counts"]
    click.echo(
        f"retained {manifest['rows']['retained']} rows, {counts['items']} items, "
        f"{counts['frequent_itemsets']} frequent itemsets, {counts['rules']} rules, "
        f"{counts['indicators']} indicators"
    )


@main.command("bin")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@_guarded
def cmd_bin(config_path, out_dir, seed):
    """Discretize the cases CSV into binned.csv + store.json."""
    settings = load_settings(config_path, seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    info = stage_bin(settings, out_dir)
    click.echo(
        f"retained {info['rows']['retained']} of {info['rows']['loaded']} rows; "
        f"{info['items']} items ({info['missing_bins']} N/A bins)"
    )


@main.command("mine")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@_apply(_COMMON)
@click.option("--jobs", type=int, default=None)
@_guarded
def cmd_mine(config_path, out_dir, min_support, min_confidence, max_k, jobs):
    """Mine store.json into frequent.jsonl + rules.jsonl."""
    settings = load_settings(
        config_path, min_support=min_support, min_confidence=min_confidence, max_k=max_k
    )
    info = stage_mine(settings, out_dir, jobs=jobs or _default_jobs())
    click.echo(
        f"{info['frequent_itemsets']} frequent itemsets up to level {info['max_level']}, "
        f"{info['rules']} rules (floor count {info['min_support_count']}, "
        f"confidence {info['gamma']:.6g})"
    )


@main.command("analyze")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@_apply(_ANALYSIS)
@click.option("--seed", type=int, default=None)
@_guarded
def cmd_analyze(config_path, out_dir, kappa, pic_threshold, acb_threshold, swarm_cap, seed):
    """Pair rules and write indicators.json + plotdata.json."""
    settings = load_settings(
        config_path,
        kappa=kappa,
        pic_threshold=pic_threshold,
        acb_threshold=acb_threshold,
        swarm_cap=swarm_cap,
        seed=seed,
    )
    info = stage_analyze(settings, out_dir)
    click.echo(f"scored {info['indicators']} indicators: {info['tiers']}")


@main.command("report")
@click.option("--out", "out_dir", required=True, type=click.Path())
@_guarded
def cmd_report(out_dir):
    """Print the indicator table (descending ACB)."""
    click.echo(render_report(out_dir))


@main.command("synth")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--rows", type=int, default=synth_mod.DEFAULT_ROWS)
@click.option("--mpu", type=int, default=synth_mod.DEFAULT_MPU)
@click.option("--invalid", type=int, default=1)
@click.option("--seed", type=int, default=synth_mod.DEFAULT_SEED)
@click.option("--min-support", "min_support", type=int, default=10)
@_guarded
def cmd_synth(out_dir, rows, mpu, invalid, seed, min_support):
    """Write a synthetic cases.csv, tsh.csv, and config.json."""
    info = synth_mod.generate(
        out_dir, rows=rows, mpu=mpu, invalid=invalid, seed=seed, min_support=min_support
    )
    click.echo(
        f"wrote {info['rows']} cases (+{info['mpu']} label-dropped, "
        f"+{info['invalid']} invalid) to {out_dir}"
    )


if __name__ == "__main__":
    main()
