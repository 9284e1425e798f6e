"""Discretization of raw case tables into an item vocabulary.

Continuous columns are binned by fixed-width grids, explicit cutpoints,
or seeded 1-D k-means; categorical columns pass through; every column
gets a dedicated N/A bin for missing cells. Two thyroid-function features
are derived from a long-format examination series before binning. The
binned table then encodes into a :class:`~ruleboost.core.TransactionStore`
with deterministic item numbering.
"""

import csv
import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace

from .core import InputError, ItemMeta, TransactionStore

NA_LABEL = "N/A"
DEFAULT_NA_TOKENS = ("", "NA", "N/A")
DEFAULT_LOG_OFFSET = 1e-5


def _fmt(x: float) -> str:
    return f"{x:g}"


# ---------------------------------------------------------------------------
# bin specs

@dataclass(frozen=True)
class FixedWidth:
    """Equal-width interior bins, left-closed right-open, with open end bins."""

    start: float
    width: float
    n_interior: int
    open_below: bool = True
    open_above: bool = True
    unit: str = ""

    def __post_init__(self):
        if self.width <= 0 or self.n_interior < 0:
            raise InputError("fixed-width spec needs width > 0 and n_interior >= 0")

    @property
    def high(self) -> float:
        return self.start + self.n_interior * self.width

    def labels(self):
        out = []
        if self.open_below:
            out.append(f"<{_fmt(self.start)}{self.unit}")
        for j in range(self.n_interior):
            lo = self.start + j * self.width
            out.append(f"{_fmt(lo)}-{_fmt(lo + self.width)}{self.unit}")
        if self.open_above:
            out.append(f"≥{_fmt(self.high)}{self.unit}")
        return out

    def assign(self, v: float) -> str:
        if not math.isfinite(v):
            raise InputError(f"non-finite value {v!r}")
        if v < self.start:
            if not self.open_below:
                raise InputError(f"value {v} below closed range start {self.start}")
            return f"<{_fmt(self.start)}{self.unit}"
        if v >= self.high:
            if not self.open_above:
                raise InputError(f"value {v} at or above closed range end {self.high}")
            return f"≥{_fmt(self.high)}{self.unit}"
        j = int((v - self.start) // self.width)
        j = min(j, self.n_interior - 1)  # float edge right at the top boundary
        lo = self.start + j * self.width
        return f"{_fmt(lo)}-{_fmt(lo + self.width)}{self.unit}"


@dataclass(frozen=True)
class Cutpoints:
    """Explicit strictly ascending boundaries; left-closed right-open bins."""

    boundaries: tuple
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        object.__setattr__(self, "labels", tuple(self.labels))
        if list(self.boundaries) != sorted(set(self.boundaries)):
            raise InputError("cutpoint boundaries must be strictly ascending")
        if len(self.labels) != len(self.boundaries) + 1:
            raise InputError("cutpoints need exactly len(boundaries) + 1 labels")

    def assign(self, v: float) -> str:
        if not math.isfinite(v):
            raise InputError(f"non-finite value {v!r}")
        # count of boundaries <= v, so a value on a boundary opens the next bin
        return self.labels[bisect_right(self.boundaries, v)]


@dataclass(frozen=True)
class Decades:
    """Data-anchored equal-width grid, labeled like "[35,45)".

    The anchor is the data minimum rounded down to a multiple of
    `anchor_step`.
    """

    width: float = 10.0
    anchor_step: float = 5.0

    def fit(self, values) -> Cutpoints:
        finite = [v for v in values if v is not None]
        if not finite:
            raise InputError("cannot anchor a grid on an all-missing column")
        anchor = math.floor(min(finite) / self.anchor_step) * self.anchor_step
        n_bins = int((max(finite) - anchor) // self.width) + 1
        boundaries = [anchor + j * self.width for j in range(1, n_bins)]
        labels = [
            f"[{_fmt(anchor + j * self.width)},{_fmt(anchor + (j + 1) * self.width)})"
            for j in range(n_bins)
        ]
        return Cutpoints(tuple(boundaries), tuple(labels))


@dataclass(frozen=True)
class KMeans1D:
    """Seeded 1-D k-means binning, optionally on transformed values.

    `log_offset` applies ln(x + offset) before clustering; `normalize`
    rescales the transformed values to [-1, 1]. Both transforms are
    strictly monotone, so cluster membership always induces interval bins
    on the raw values, and bin labels report raw-value intervals.
    """

    k: int
    log_offset: float = None
    normalize: bool = True
    seed: int = None

    def __post_init__(self):
        if self.k < 1:
            raise InputError("kmeans binning needs k >= 1")


# ---------------------------------------------------------------------------
# elementwise operations

def bin_fixed_width(values, spec: FixedWidth):
    return [NA_LABEL if v is None else spec.assign(v) for v in values]


def bin_cutpoints(values, spec: Cutpoints):
    return [NA_LABEL if v is None else spec.assign(v) for v in values]


def log_offset_transform(values, offset: float = DEFAULT_LOG_OFFSET):
    """Elementwise ln(x + offset); defined for x down to -offset exclusive."""
    out = []
    for v in values:
        shifted = v + offset
        if not math.isfinite(v) or shifted <= 0:
            raise InputError(f"log transform undefined for value {v!r}")
        out.append(math.log(shifted))
    return out


def minmax_normalize(values):
    """Affine rescale onto [-1, 1]; needs at least two distinct values."""
    lo, hi = min(values), max(values)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise InputError("cannot normalize non-finite values")
    if lo == hi:
        raise InputError("degenerate range: all values equal")
    span = hi - lo
    return [2.0 * (v - lo) / span - 1.0 for v in values]


# ---------------------------------------------------------------------------
# 1-D k-means

@dataclass(frozen=True)
class ClusterBin:
    """One k-means cluster as a closed raw-value interval."""

    low: float
    high: float
    centroid: float
    count: int

    @property
    def label(self) -> str:
        return f"[{_fmt(self.low)},{_fmt(self.high)}]"


@dataclass
class KMeansResult:
    labels: list          # cluster index per input value, ascending-centroid order
    clusters: list        # ClusterBin per cluster
    boundaries: list      # midpoints between adjacent cluster extremes

    def assign(self, v: float) -> int:
        """Cluster index for a future value (boundary ties go left)."""
        return bisect_left(self.boundaries, v)


def _farthest_point_seeds(distinct, k, seed):
    rng = random.Random(seed)
    centers = [distinct[rng.randrange(len(distinct))]]
    while len(centers) < k:
        best_v, best_d = None, -1.0
        for v in distinct:
            d = min(abs(v - c) for c in centers)
            if d > best_d:  # ties keep the smallest value, scanned ascending
                best_v, best_d = v, d
        centers.append(best_v)
    return sorted(centers)


def kmeans_1d(values, k: int, seed: int, tol: float = 1e-9, max_iter: int = 300) -> KMeansResult:
    """Lloyd iteration on a line, deterministic given `seed`.

    Seeding picks one random value then farthest points. Assignment is by
    nearest centroid with midpoint ties going to the lower cluster, so
    clusters are always contiguous intervals. Clusters come back relabeled
    in ascending centroid order.
    """
    vals = list(values)
    for v in vals:
        if v is None or not math.isfinite(v):
            raise InputError(f"kmeans input must be finite, got {v!r}")
    distinct = sorted(set(vals))
    if len(distinct) < k:
        raise InputError(f"kmeans needs >= {k} distinct values, got {len(distinct)}")

    centers = _farthest_point_seeds(distinct, k, seed)
    assign_prev = None
    for _ in range(max_iter):
        cuts = [(centers[j] + centers[j + 1]) / 2.0 for j in range(k - 1)]
        assign = [bisect_left(cuts, v) for v in vals]
        occupied = set(assign)
        if len(occupied) < k:
            # re-seed each empty cluster on the free value farthest from any center
            for j in range(k):
                if j not in occupied:
                    taken = set(centers)
                    centers[j] = max(
                        (v for v in distinct if v not in taken),
                        key=lambda v: min(abs(v - c) for c in centers),
                    )
            centers.sort()
            continue
        if assign == assign_prev:
            break
        sums = [0.0] * k
        counts = [0] * k
        for v, j in zip(vals, assign):
            sums[j] += v
            counts[j] += 1
        new_centers = [sums[j] / counts[j] for j in range(k)]
        shift = max(abs(a - b) for a, b in zip(centers, new_centers))
        centers = new_centers
        assign_prev = assign
        if shift < tol:
            cuts = [(centers[j] + centers[j + 1]) / 2.0 for j in range(k - 1)]
            assign = [bisect_left(cuts, v) for v in vals]
            break

    clusters = []
    for j in range(k):
        members = [v for v, a in zip(vals, assign) if a == j]
        clusters.append(ClusterBin(min(members), max(members), sum(members) / len(members), len(members)))
    boundaries = [
        (clusters[j].high + clusters[j + 1].low) / 2.0 for j in range(k - 1)
    ]
    return KMeansResult(assign, clusters, boundaries)


def kmeans_bin_column(raw_values, spec: KMeans1D, seed: int):
    """Bin one column by k-means on (optionally transformed) non-missing values.

    Returns (labels per row, ordered bin labels, KMeansResult). Bin labels
    are closed intervals of the raw values in each cluster.
    """
    present = [(i, v) for i, v in enumerate(raw_values) if v is not None]
    work = [v for _, v in present]
    if spec.log_offset is not None:
        work = log_offset_transform(work, spec.log_offset)
    if spec.normalize and len(set(work)) >= 2:
        work = minmax_normalize(work)
    result = kmeans_1d(work, spec.k, spec.seed if spec.seed is not None else seed)

    raw_members = [[] for _ in range(spec.k)]
    for (_, raw), a in zip(present, result.labels):
        raw_members[a].append(raw)
    bins = [
        ClusterBin(min(m), max(m), sum(m) / len(m), len(m)) for m in raw_members
    ]
    labels = [NA_LABEL] * len(raw_values)
    for (i, _), a in zip(present, result.labels):
        labels[i] = bins[a].label
    return labels, [b.label for b in bins], result


# ---------------------------------------------------------------------------
# TSH series features

@dataclass(frozen=True)
class TshSeries:
    """Time-ordered (timestamp, tsh) points for one case; N/A records removed.

    Timestamps are real-valued days; tsh must be positive so its log is
    finite.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise InputError("empty TSH series")
        for t, v in pts:
            if v <= 0 or not math.isfinite(v) or not math.isfinite(t):
                raise InputError(f"TSH points need finite time and tsh > 0, got {(t, v)}")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if t1 == t0:
                raise InputError(f"zero interval: duplicate timestamp {t1}")
            if t1 < t0:
                raise InputError("TSH timestamps must be strictly increasing")

    @property
    def log_values(self):
        return [math.log(v) for _, v in self.points]

    @property
    def times(self):
        return [t for t, _ in self.points]


def mean_tsh_score(series: TshSeries) -> float:
    """Time-interval-weighted trapezoidal mean of logTSH.

    A single-record series scores its only logTSH value.
    """
    ell = series.log_values
    if len(ell) == 1:
        return ell[0]
    t = series.times
    num = 0.0
    den = 0.0
    for i in range(len(ell) - 1):
        dt = t[i + 1] - t[i]
        num += (ell[i] + ell[i + 1]) / 2.0 * dt
        den += dt
    return num / den


def tsh_trmssd(series: TshSeries):
    """Root mean square of per-interval logTSH slopes; None for one record.

    Single-record series carry no volatility information and route to the
    N/A bin.
    """
    ell = series.log_values
    if len(ell) == 1:
        return None
    t = series.times
    acc = 0.0
    for i in range(len(ell) - 1):
        slope = (ell[i + 1] - ell[i]) / (t[i + 1] - t[i])
        acc += slope * slope
    return math.sqrt(acc / (len(ell) - 1))


# ---------------------------------------------------------------------------
# table-level configuration

@dataclass
class ColumnSpec:
    """One column of the binning config."""

    name: str
    type: str                  # continuous | categorical
    role: str                  # feature | target | id | excluded
    bins: object = None        # FixedWidth | Cutpoints | Decades | KMeans1D
    categories: tuple = None   # allowed categorical levels, in bin order
    valid_range: tuple = None  # inclusive numeric range; outside -> row dropped
    series: str = None         # mean_score | trmssd, derived from the TSH file
    benign: str = "benign"
    malignant: str = "malignant"
    drop: tuple = ("MPU",)

    def __post_init__(self):
        if self.type not in ("continuous", "categorical"):
            raise InputError(f"column {self.name}: unknown type {self.type!r}")
        if self.role not in ("feature", "target", "id", "excluded"):
            raise InputError(f"column {self.name}: unknown role {self.role!r}")
        if self.categories is not None:
            self.categories = tuple(self.categories)
        if self.drop is not None:
            self.drop = tuple(self.drop)


@dataclass
class BinningConfig:
    columns: list
    na_tokens: tuple = DEFAULT_NA_TOKENS

    def __post_init__(self):
        targets = [c for c in self.columns if c.role == "target"]
        if len(targets) != 1:
            raise InputError(f"config needs exactly one target column, found {len(targets)}")
        names = [c.name for c in self.columns]
        if len(names) != len(set(names)):
            raise InputError("duplicate column names in config")

    @property
    def target(self) -> ColumnSpec:
        return next(c for c in self.columns if c.role == "target")

    @property
    def id_column(self):
        for c in self.columns:
            if c.role == "id":
                return c.name
        return None

    @property
    def features(self):
        return [c for c in self.columns if c.role == "feature"]


_BINSPEC_KINDS = {
    "fixed_width": lambda d: FixedWidth(
        d["start"], d["width"], d["n_interior"],
        d.get("open_below", True), d.get("open_above", True), d.get("unit", ""),
    ),
    "cutpoints": lambda d: Cutpoints(tuple(d["boundaries"]), tuple(d["labels"])),
    "decades": lambda d: Decades(d.get("width", 10.0), d.get("anchor_step", 5.0)),
    "kmeans": lambda d: KMeans1D(
        d["k"], d.get("log_offset"), d.get("normalize", True), d.get("seed"),
    ),
}


def parse_binspec(doc: dict):
    kind = doc.get("kind")
    if kind not in _BINSPEC_KINDS:
        raise InputError(f"unknown binspec kind {kind!r}")
    try:
        return _BINSPEC_KINDS[kind](doc)
    except KeyError as exc:
        raise InputError(f"binspec {kind!r} missing field {exc}") from None


def parse_binning_config(doc: dict) -> BinningConfig:
    columns = []
    for c in doc.get("columns", []):
        try:
            col = ColumnSpec(
                name=c["name"],
                type=c.get("type", "categorical"),
                role=c.get("role", "feature"),
                bins=parse_binspec(c["bins"]) if c.get("bins") else None,
                categories=c.get("categories"),
                valid_range=tuple(c["valid_range"]) if c.get("valid_range") else None,
                series=c.get("series"),
                benign=c.get("benign", "benign"),
                malignant=c.get("malignant", "malignant"),
                drop=tuple(c.get("drop", ("MPU",))),
            )
        except KeyError as exc:
            raise InputError(f"column config missing field {exc}") from None
        if col.role == "feature" and col.type == "continuous" and col.bins is None:
            raise InputError(f"continuous feature {col.name!r} needs a binspec")
        columns.append(col)
    return BinningConfig(columns, tuple(doc.get("na_tokens", DEFAULT_NA_TOKENS)))


# ---------------------------------------------------------------------------
# CSV ingestion

@dataclass
class RowFilterStats:
    loaded: int = 0
    dropped_label: int = 0    # label in the configured drop list (e.g. MPU)
    dropped_invalid: int = 0  # out-of-range coded value

    @property
    def retained(self) -> int:
        return self.loaded - self.dropped_label - self.dropped_invalid


@dataclass
class RawTable:
    """Parsed and row-filtered case table; cells are float | str | None."""

    config: BinningConfig
    rows: list
    stats: RowFilterStats


def _parse_cell(raw, col: ColumnSpec, na_tokens, where):
    if raw is None or raw.strip() in na_tokens:
        return None
    raw = raw.strip()
    if col.type == "continuous":
        try:
            return float(raw)
        except ValueError:
            raise InputError(f"{where}: column {col.name!r} expects a number, got {raw!r}") from None
    return raw


def load_cases_csv(path, config: BinningConfig) -> RawTable:
    """Read the UTF-8 cases CSV, parse cells, and apply row filtering.

    Rows whose label sits in the drop list are discarded; rows carrying a
    coded value outside a column's configured categories or valid range
    are discarded as invalid. A missing or unknown label is an error.
    """
    target = config.target
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in config.columns:
            if col.role != "excluded" and col.series is None and col.name not in header:
                raise InputError(f"{path}: missing column {col.name!r} in CSV header")
        stats = RowFilterStats()
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            stats.loaded += 1
            where = f"{path}:{lineno}"
            label = rec.get(target.name)
            if label is not None:
                label = label.strip()
            if label in target.drop:
                stats.dropped_label += 1
                continue
            if label is None or label in config.na_tokens:
                raise InputError(f"{where}: row has no {target.name!r} label")
            if label not in (target.benign, target.malignant):
                raise InputError(f"{where}: unknown label {label!r} in column {target.name!r}")
            row = {target.name: label}
            ok = True
            for col in config.columns:
                if col.role in ("target", "excluded") or col.series is not None:
                    continue
                value = _parse_cell(rec.get(col.name), col, config.na_tokens, where)
                if value is not None:
                    if col.categories is not None and value not in col.categories:
                        ok = False
                        break
                    if col.valid_range is not None and not (
                        col.valid_range[0] <= value <= col.valid_range[1]
                    ):
                        ok = False
                        break
                row[col.name] = value
            if not ok:
                stats.dropped_invalid += 1
                continue
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: no rows retained after filtering")
    return RawTable(config, rows, stats)


def load_tsh_csv(path, na_tokens=DEFAULT_NA_TOKENS) -> dict:
    """Long-format (case_id, timestamp, tsh) series, keyed by case id.

    Records with a missing tsh value are filtered out before the series is
    built; cases whose records are all missing get no series at all.
    """
    by_case = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = {"case_id", "timestamp", "tsh"}
        if not need <= set(reader.fieldnames or []):
            raise InputError(f"{path}: TSH series CSV needs columns {sorted(need)}")
        for lineno, rec in enumerate(reader, start=2):
            raw = (rec.get("tsh") or "").strip()
            if raw in na_tokens:
                continue
            try:
                t = float(rec["timestamp"])
                v = float(raw)
            except (TypeError, ValueError):
                raise InputError(f"{path}:{lineno}: bad timestamp or tsh value") from None
            by_case.setdefault(rec["case_id"].strip(), []).append((t, v))
    series = {}
    for case, pts in by_case.items():
        pts.sort(key=lambda p: p[0])
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if t0 == t1:
                raise InputError(f"{path}: case {case!r} has duplicate timestamp {t1}")
        series[case] = TshSeries(tuple(pts))
    return series


def attach_series_features(table: RawTable, series: dict):
    """Fill series-derived columns (mean score, tRMSSD) into each row."""
    cfg = table.config
    id_col = cfg.id_column
    derived = [c for c in cfg.features if c.series is not None]
    if not derived:
        return
    if id_col is None:
        raise InputError("series-derived columns need an id column in the config")
    for row in table.rows:
        s = series.get(str(row.get(id_col)))
        for col in derived:
            if s is None:
                row[col.name] = None
            elif col.series == "mean_score":
                row[col.name] = mean_tsh_score(s)
            elif col.series == "trmssd":
                row[col.name] = tsh_trmssd(s)
            else:
                raise InputError(f"unknown series feature {col.series!r}")


# ---------------------------------------------------------------------------
# binned dataset and encoding

@dataclass
class BinnedColumn:
    name: str
    bin_order: list   # every declared bin label in canonical order, N/A last
    labels: list      # assigned label per row

    def counts(self):
        out = {b: 0 for b in self.bin_order}
        for lab in self.labels:
            out[lab] += 1
        return out


@dataclass
class BinnedDataset:
    features: list            # BinnedColumn per feature column, config order
    target: BinnedColumn      # bin_order = [benign, malignant]
    ids: list = None

    @property
    def n_rows(self) -> int:
        return len(self.target.labels)


def bin_column(col: ColumnSpec, values, seed: int = 0) -> BinnedColumn:
    """Apply one column's spec to its raw values."""
    if col.type == "categorical":
        observed = sorted({v for v in values if v is not None})
        order = list(col.categories) if col.categories is not None else observed
        labels = [NA_LABEL if v is None else v for v in values]
    else:
        spec = col.bins
        if isinstance(spec, Decades):
            spec = spec.fit(values)
        if isinstance(spec, FixedWidth):
            labels = bin_fixed_width(values, spec)
            order = spec.labels()
        elif isinstance(spec, Cutpoints):
            labels = bin_cutpoints(values, spec)
            order = list(spec.labels)
        elif isinstance(spec, KMeans1D):
            labels, order, _ = kmeans_bin_column(values, spec, seed)
        else:
            raise InputError(f"column {col.name!r} has no usable binspec")
    if any(v is None for v in values):
        order = list(order) + [NA_LABEL]
    return BinnedColumn(col.name, list(order), labels)


def bin_table(table: RawTable, seed_for=lambda name: 0) -> BinnedDataset:
    """Bin every feature column of a filtered raw table.

    `seed_for` maps a column name to the k-means seed used when the
    column's spec does not pin one.
    """
    cfg = table.config
    feats = []
    for col in cfg.features:
        values = [row.get(col.name) for row in table.rows]
        feats.append(bin_column(col, values, seed_for(col.name)))
    tcol = cfg.target
    tlabels = [row[tcol.name] for row in table.rows]
    target = BinnedColumn(tcol.name, [tcol.benign, tcol.malignant], tlabels)
    ids = None
    if cfg.id_column:
        ids = [row.get(cfg.id_column) for row in table.rows]
    return BinnedDataset(feats, target, ids)


def encode_dataset(binned: BinnedDataset) -> TransactionStore:
    """Number occupied (feature, bin) pairs and emit one transaction per row.

    Ids follow column order then bin order; the two label items come last.
    Bins that no row occupies get no item.
    """
    vocab = []
    index = {}
    for col in binned.features:
        occupied = set(col.labels)
        for bin_label in col.bin_order:
            if bin_label in occupied:
                index[(col.name, bin_label)] = len(vocab)
                vocab.append(ItemMeta(col.name, bin_label, is_missing=bin_label == NA_LABEL))
        stray = occupied - set(col.bin_order)
        if stray:
            raise InputError(f"column {col.name!r} produced undeclared bins {sorted(stray)}")
    tcol = binned.target
    for bin_label in tcol.bin_order:
        if bin_label not in set(tcol.labels):
            continue
        index[(tcol.name, bin_label)] = len(vocab)
        vocab.append(ItemMeta(tcol.name, bin_label, is_target=True))

    transactions = []
    for r in range(binned.n_rows):
        label = tcol.labels[r]
        if label not in (tcol.bin_order[0], tcol.bin_order[1]):
            raise InputError(f"row {r} has no benign/malignant label")
        items = [index[(col.name, col.labels[r])] for col in binned.features]
        items.append(index[(tcol.name, label)])
        transactions.append(tuple(sorted(items)))
    return TransactionStore(vocab, transactions)


def decode_store(store: TransactionStore):
    """Inverse of encoding: per-row {feature: bin label} mappings."""
    return [
        {store.vocabulary[i].feature: store.vocabulary[i].bin for i in t}
        for t in store.transactions
    ]
