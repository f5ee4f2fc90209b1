"""Adult ingestion, encoding and sampling, plus small synthetic instances.

Every clustering feature lives in [0, 1]. Continuous attributes are min/max
scaled; categorical attributes are one-hot encoded with the hot component set
to 1/sqrt(2), so that the squared distance between two different values of a
single attribute is exactly 1. The maximum squared distance between two
examples (``delta``) is therefore the number of original attributes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

CONTINUOUS = ("age", "education-num", "capital-gain", "capital-loss", "hours-per-week")
CATEGORICAL = ("workclass", "education", "occupation")
SENSITIVE = "sex"
PREDICTOR_ALIASES = ("annual-income", "income", "income-per-year", "class", "salary")

# Column order of the headerless UCI files (adult.data / adult.test).
UCI_COLUMNS = (
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
)

HOT = 1.0 / math.sqrt(2.0)
MISSING = "?"
DEFAULT_GROUP_MAP = {"Female": 0, "Male": 1}


class DatasetError(ValueError):
    """Invalid input data or an impossible sampling request."""


class MissingColumnError(DatasetError):
    pass


@dataclass(frozen=True)
class RawRecord:
    continuous: tuple[float, ...]
    categorical: tuple[str, ...]
    sex: str
    predictor: str


@dataclass
class IngestResult:
    records: list[RawRecord]
    n_missing: int = 0
    n_unparseable: int = 0

    @property
    def rejected(self) -> int:
        return self.n_missing + self.n_unparseable

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Block:
    """Columns occupied by one original attribute in the encoded matrix."""

    name: str
    kind: str  # "continuous" | "onehot"
    start: int
    width: int
    categories: tuple[str, ...] = ()
    lo: float | None = None
    hi: float | None = None

    def to_json(self) -> dict:
        d = {"name": self.name, "kind": self.kind, "start": self.start, "width": self.width}
        if self.kind == "onehot":
            d["categories"] = list(self.categories)
        else:
            d["lo"] = self.lo
            d["hi"] = self.hi
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "Block":
        return cls(
            name=d["name"],
            kind=d["kind"],
            start=int(d["start"]),
            width=int(d["width"]),
            categories=tuple(d.get("categories", ())),
            lo=d.get("lo"),
            hi=d.get("hi"),
        )


@dataclass(frozen=True)
class Example:
    id: int
    features: np.ndarray
    group: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Encoded examples. ``features`` never contains the sensitive attribute."""

    features: np.ndarray
    groups: np.ndarray
    delta: float
    attribute_count: int
    group_labels: tuple[str, str] = ("0", "1")
    layout: tuple[Block, ...] = ()
    predictor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.float64, copy=True)
        if feats.ndim != 2:
            feats = feats.reshape(len(feats), -1) if feats.size else np.zeros((0, 0))
        groups = np.array(self.groups, dtype=np.int64, copy=True).reshape(-1)
        if len(groups) != len(feats):
            raise DatasetError("features and groups differ in length")
        if groups.size and not np.isin(groups, (0, 1)).all():
            raise DatasetError("group tags must be 0 or 1")
        feats.setflags(write=False)
        groups.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "groups", groups)
        if self.predictor is not None:
            pred = np.asarray(self.predictor, dtype=object).copy()
            pred.setflags(write=False)
            object.__setattr__(self, "predictor", pred)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> Example:
        return Example(i, self.features[i], int(self.groups[i]))

    @property
    def examples(self) -> list[Example]:
        return [self[i] for i in range(self.n)]

    def group_counts(self) -> tuple[int, int]:
        return int((self.groups == 0).sum()), int((self.groups == 1).sum())

    def subset(self, idx: Sequence[int]) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            features=self.features[idx].reshape(len(idx), self.feature_count),
            groups=self.groups[idx],
            delta=self.delta,
            attribute_count=self.attribute_count,
            group_labels=self.group_labels,
            layout=self.layout,
            predictor=None if self.predictor is None else self.predictor[idx],
        )

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.groups).astype("<i8").tobytes())
        h.update(repr((float(self.delta), self.feature_count)).encode())
        return h.hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "feature_count": self.feature_count,
            "delta": float(self.delta),
            "attribute_count": self.attribute_count,
            "group_labels": list(self.group_labels),
            "layout": [b.to_json() for b in self.layout],
            "features": self.features.tolist(),
            "groups": self.groups.tolist(),
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "Dataset":
        F = int(d["feature_count"])
        feats = np.array(d["features"], dtype=np.float64).reshape(-1, F)
        return cls(
            features=feats,
            groups=np.array(d["groups"], dtype=np.int64),
            delta=float(d["delta"]),
            attribute_count=int(d.get("attribute_count", d["delta"])),
            group_labels=tuple(d.get("group_labels", ("0", "1"))),
            layout=tuple(Block.from_json(b) for b in d.get("layout", ())),
        )


def save_dataset(dataset: Dataset, path: str | os.PathLike) -> None:
    # json writes floats via repr, which round-trips exactly
    Path(path).write_text(json.dumps(dataset.to_json()))


def load_dataset(path: str | os.PathLike) -> Dataset:
    return Dataset.from_json(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# ingestion


def _open_text(source) -> io.TextIOBase:
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="")
    return source


def _resolve_columns(first_row: list[str]) -> tuple[dict[str, int], bool]:
    names = [c.strip().lower() for c in first_row]
    required = (*CONTINUOUS, *CATEGORICAL, SENSITIVE)
    if all(r in names for r in required):
        pred = next((a for a in PREDICTOR_ALIASES if a in names), None)
        if pred is None:
            raise MissingColumnError(
                f"missing predictor column (one of {', '.join(PREDICTOR_ALIASES)})"
            )
        cols = {r: names.index(r) for r in required}
        cols["predictor"] = names.index(pred)
        return cols, True
    # headerless UCI layout
    if len(first_row) == len(UCI_COLUMNS):
        try:
            float(first_row[0])
        except ValueError:
            pass
        else:
            cols = {r: UCI_COLUMNS.index(r) for r in required}
            cols["predictor"] = UCI_COLUMNS.index("income")
            return cols, False
    missing = [r for r in required if r not in names]
    raise MissingColumnError(f"missing required column(s): {', '.join(missing)}")


def ingest_adult(source) -> IngestResult:
    """Read an Adult-format CSV and keep complete records for the used attributes.

    ``source`` is a path or a text stream. A header row naming the attributes is
    expected; the headerless 15-column UCI layout is also recognised. Records with
    ``?`` (or empty) in any used attribute are dropped and counted.
    """
    fh = _open_text(source)
    try:
        reader = csv.reader(fh, skipinitialspace=True)
        first = next(reader, None)
        if first is None:
            return IngestResult([])
        cols, has_header = _resolve_columns(first)
        rows: Iterable[list[str]] = reader
        if not has_header:
            rows = _chain_first(first, reader)
        out = IngestResult([])
        width = max(cols.values()) + 1
        for row in rows:
            if not row or (len(row) == 1 and not row[0].strip()) or row[0].startswith("|"):
                continue  # blank lines, and the "|1x3 Cross validator" line of adult.test
            if len(row) < width:
                out.n_missing += 1
                continue
            vals = {name: row[i].strip() for name, i in cols.items()}
            if any(v in ("", MISSING) for v in vals.values()):
                out.n_missing += 1
                continue
            try:
                cont = tuple(float(vals[c]) for c in CONTINUOUS)
            except ValueError:
                out.n_unparseable += 1
                continue
            if not all(math.isfinite(v) for v in cont):
                out.n_unparseable += 1
                continue
            out.records.append(
                RawRecord(
                    continuous=cont,
                    categorical=tuple(vals[c] for c in CATEGORICAL),
                    sex=vals[SENSITIVE],
                    predictor=vals["predictor"].rstrip("."),
                )
            )
    finally:
        if fh is not source:
            fh.close()
    if out.rejected:
        log.info(
            "ingest: kept %d records, rejected %d (%d missing, %d unparseable)",
            len(out.records), out.rejected, out.n_missing, out.n_unparseable,
        )
    return out


def _chain_first(first, rest):
    yield first
    yield from rest


# ---------------------------------------------------------------------------
# encoding


def encode(
    records: Sequence[RawRecord],
    group_map: Mapping[str, int] | None = None,
) -> Dataset:
    """Scale continuous attributes to [0, 1] and one-hot the categorical ones.

    Scaling constants come from ``records`` and are kept in the layout. Category
    order inside a block is lexicographic. ``group_map`` maps the sex values onto
    groups 0 and 1 (default Female=0, Male=1).
    """
    if not records:
        raise DatasetError("cannot encode an empty record collection")
    group_map = dict(DEFAULT_GROUP_MAP if group_map is None else group_map)
    if sorted(set(group_map.values())) != [0, 1]:
        raise DatasetError("group map must use both groups 0 and 1")

    n = len(records)
    cont = np.array([r.continuous for r in records], dtype=np.float64).reshape(n, len(CONTINUOUS))
    cats = [sorted({r.categorical[j] for r in records}) for j in range(len(CATEGORICAL))]
    F = len(CONTINUOUS) + sum(len(c) for c in cats)

    X = np.zeros((n, F))
    layout: list[Block] = []
    col = 0
    for j, name in enumerate(CONTINUOUS):
        lo, hi = float(cont[:, j].min()), float(cont[:, j].max())
        if hi > lo:
            X[:, col] = (cont[:, j] - lo) / (hi - lo)
        else:
            warnings.warn(f"attribute {name!r} is constant; encoded as zeros", RuntimeWarning)
        layout.append(Block(name, "continuous", col, 1, lo=lo, hi=hi))
        col += 1
    for j, name in enumerate(CATEGORICAL):
        index = {v: i for i, v in enumerate(cats[j])}
        hot = np.array([index[r.categorical[j]] for r in records])
        X[np.arange(n), col + hot] = HOT
        layout.append(Block(name, "onehot", col, len(cats[j]), categories=tuple(cats[j])))
        col += len(cats[j])

    try:
        groups = np.array([group_map[r.sex] for r in records])
    except KeyError as e:
        raise DatasetError(f"sex value {e.args[0]!r} not in group map") from None
    labels = ["", ""]
    for name, g in sorted(group_map.items(), key=lambda kv: kv[1]):
        labels[g] = labels[g] or name
    n_attr = len(CONTINUOUS) + len(CATEGORICAL)
    return Dataset(
        features=X,
        groups=groups,
        delta=float(n_attr),
        attribute_count=n_attr,
        group_labels=(labels[0], labels[1]),
        layout=tuple(layout),
        predictor=np.array([r.predictor for r in records], dtype=object),
    )


# ---------------------------------------------------------------------------
# sampling


def sample_for_parity(
    dataset: Dataset, per_class: int, seed: int, keep_predictor: bool = False
) -> Dataset:
    """Balance the two predictor classes, then draw ``per_class`` from each.

    Two seeded uniform draws without replacement: first the majority class is
    undersampled to the minority size, then ``per_class`` examples are drawn from
    each class. Output keeps input order and re-indexes ids; the predictor is
    dropped unless ``keep_predictor`` is set.
    """
    if dataset.predictor is None:
        raise DatasetError("dataset carries no predictor values")
    if per_class < 0:
        raise DatasetError("per_class must be non-negative")
    classes = sorted(set(dataset.predictor.tolist()))
    if len(classes) != 2:
        raise DatasetError(f"expected a binary predictor, found {len(classes)} classes")
    rng = np.random.default_rng(seed)
    members = [np.flatnonzero(dataset.predictor == c) for c in classes]
    size = min(len(m) for m in members)
    balanced = [m if len(m) == size else np.sort(rng.choice(m, size, replace=False)) for m in members]
    chosen = []
    for cls, m in zip(classes, balanced):
        if len(m) < per_class:
            raise DatasetError(
                f"predictor class {cls!r} has {len(m)} examples after parity, need {per_class}"
            )
        chosen.append(rng.choice(m, per_class, replace=False))
    idx = np.sort(np.concatenate(chosen)) if chosen else np.zeros(0, dtype=np.int64)
    sub = dataset.subset(idx)
    if keep_predictor:
        return sub
    return Dataset(
        features=sub.features,
        groups=sub.groups,
        delta=sub.delta,
        attribute_count=sub.attribute_count,
        group_labels=sub.group_labels,
        layout=sub.layout,
    )


# ---------------------------------------------------------------------------
# small synthetic instances


def make_tiny_instance(
    features: Sequence[Sequence[float]] | Sequence[float],
    groups: Sequence[int],
    attribute_count: int | None = None,
) -> Dataset:
    """Build a dataset from explicit vectors; ``delta`` equals the attribute count.

    A flat sequence of numbers is read as one feature per example.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.size == 0:
        raise DatasetError("tiny instance needs at least one example")
    if X.ndim == 1:
        X = X[:, None]
    if ((X < 0) | (X > 1)).any() or not np.isfinite(X).all():
        raise DatasetError("features must lie in [0, 1]")
    m = attribute_count if attribute_count is not None else X.shape[1]
    return Dataset(features=X, groups=groups, delta=float(m), attribute_count=m)


def make_random_instance(
    n: int, n_features: int, seed: int, minority_frac: float = 0.3
) -> Dataset:
    """Uniform features in [0, 1]^F with a seeded binary group split."""
    rng = np.random.default_rng(seed)
    X = rng.random((n, n_features))
    groups = (rng.random(n) >= minority_frac).astype(np.int64)
    if n >= 2:
        groups[0], groups[1] = 0, 1  # both groups always present
    return Dataset(features=X, groups=groups, delta=float(n_features), attribute_count=n_features)
