"""Transaction CSV parsing, chronological ordering, undersampling, and
stratified splitting.

The default column layout matches the public IBM AML file; both the order
and the timestamp format are configurable because other exports of the same
data shuffle columns. Timestamps are naive local strings interpreted as UTC
so parsing is machine-independent.
"""

import csv
import gzip
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import (
    BadLabelError,
    BadNumberError,
    BadTimestampError,
    DegenerateClassError,
    MalformedRowError,
    NoPositivesError,
)

COLUMN_NAMES = (
    "timestamp",
    "from_bank",
    "from_account",
    "to_bank",
    "to_account",
    "amount_received",
    "receiving_currency",
    "amount_paid",
    "payment_currency",
    "payment_format",
    "label",
)


@dataclass(frozen=True)
class CsvLayout:
    """Column order and timestamp format of a transaction CSV."""

    columns: tuple = COLUMN_NAMES
    timestamp_format: str = "%Y/%m/%d %H:%M"

    def __post_init__(self):
        if sorted(self.columns) != sorted(COLUMN_NAMES):
            raise ValueError(f"layout must name exactly the fields {COLUMN_NAMES}")

    def index(self, name):
        return self.columns.index(name)


DEFAULT_LAYOUT = CsvLayout()


@dataclass(frozen=True)
class Transaction:
    """One parsed row; ids stay verbatim strings, timestamp is epoch seconds."""

    timestamp: int
    from_bank: str
    from_account: str
    to_bank: str
    to_account: str
    amount_paid: float
    payment_currency: str
    amount_received: float
    receiving_currency: str
    payment_format: str
    label: int


def parse_timestamp(text, fmt):
    try:
        return int(datetime.strptime(text.strip(), fmt).replace(tzinfo=timezone.utc).timestamp())
    except ValueError as exc:
        raise BadTimestampError(f"cannot parse timestamp {text!r} with format {fmt!r}") from exc


def _parse_amount(text, name):
    try:
        value = float(text)
    except ValueError as exc:
        raise BadNumberError(f"{name} {text!r} is not a number") from exc
    if not value > 0:
        raise BadNumberError(f"{name} must be positive, got {value}")
    return value


def parse_row(raw_line, layout=DEFAULT_LAYOUT):
    """Parse one CSV line into a Transaction.

    Raises MalformedRow on a wrong field count, BadNumber / BadTimestamp /
    BadLabel on unparseable values.
    """
    fields = next(csv.reader([raw_line]))
    return parse_fields(fields, layout)


def parse_fields(fields, layout=DEFAULT_LAYOUT):
    if len(fields) != len(layout.columns):
        raise MalformedRowError(f"expected {len(layout.columns)} fields, got {len(fields)}")

    def get(name):
        return fields[layout.index(name)]

    label_text = get("label").strip()
    if label_text not in ("0", "1"):
        raise BadLabelError(f"label must be 0 or 1, got {label_text!r}")
    return Transaction(
        timestamp=parse_timestamp(get("timestamp"), layout.timestamp_format),
        from_bank=get("from_bank"),
        from_account=get("from_account"),
        to_bank=get("to_bank"),
        to_account=get("to_account"),
        amount_paid=_parse_amount(get("amount_paid"), "amount_paid"),
        payment_currency=get("payment_currency"),
        amount_received=_parse_amount(get("amount_received"), "amount_received"),
        receiving_currency=get("receiving_currency"),
        payment_format=get("payment_format"),
        label=int(label_text),
    )


def _open_text(path, mode="rt"):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode, encoding="utf-8", newline="")
    return open(path, mode, encoding="utf-8", newline="")


def read_transactions(path, layout=DEFAULT_LAYOUT, has_header=True, limit=None):
    """Read and chronologically sort a transaction CSV (.gz accepted).

    The sort is stable, so rows sharing a timestamp keep file order. Parse
    errors carry the 1-based row number in their message.
    """
    txs = []
    with _open_text(path) as handle:
        reader = csv.reader(handle)
        for row_number, fields in enumerate(reader, start=1):
            if row_number == 1 and has_header:
                continue
            if not fields:
                continue
            try:
                txs.append(parse_fields(fields, layout))
            except Exception as exc:
                raise type(exc)(f"row {row_number}: {exc}") from exc
            if limit is not None and len(txs) >= limit:
                break
    return sort_by_time(txs)


def sort_by_time(txs):
    return sorted(txs, key=lambda t: t.timestamp)


def format_transaction(tx, layout=DEFAULT_LAYOUT):
    """Render a Transaction back into CSV fields under ``layout``."""
    stamp = datetime.fromtimestamp(tx.timestamp, tz=timezone.utc).strftime(layout.timestamp_format)
    values = {
        "timestamp": stamp,
        "from_bank": tx.from_bank,
        "from_account": tx.from_account,
        "to_bank": tx.to_bank,
        "to_account": tx.to_account,
        "amount_received": repr(tx.amount_received),
        "receiving_currency": tx.receiving_currency,
        "amount_paid": repr(tx.amount_paid),
        "payment_currency": tx.payment_currency,
        "payment_format": tx.payment_format,
        "label": str(tx.label),
    }
    return [values[name] for name in layout.columns]


def write_transactions(path, txs, layout=DEFAULT_LAYOUT, header=True):
    with _open_text(path, "wt") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if header:
            writer.writerow(layout.columns)
        for tx in txs:
            writer.writerow(format_transaction(tx, layout))


# --- class rebalancing and splitting ----------------------------------------


def undersample_indices(labels, timestamps, ratio, seed):
    """Indices keeping all positives plus ratio x positives negatives,
    uniformly sampled without replacement, returned in timestamp order."""
    if ratio < 1:
        raise ValueError(f"ratio must be >= 1, got {ratio}")
    labels = np.asarray(labels)
    positives = np.flatnonzero(labels == 1)
    if positives.size == 0:
        raise NoPositivesError("cannot undersample a stream with no positive rows")
    negatives = np.flatnonzero(labels == 0)
    want = ratio * positives.size
    if negatives.size > want:
        rng = np.random.default_rng(seed)
        negatives = rng.choice(negatives, size=want, replace=False)
    # ascending index order first so the stable time sort breaks ties by
    # original stream position
    keep = np.sort(np.concatenate([positives, negatives]))
    timestamps = np.asarray(timestamps)
    return keep[np.argsort(timestamps[keep], kind="stable")]


def undersample(txs, ratio=9, seed=0):
    """Transaction-level undersampling; see undersample_indices."""
    labels = [t.label for t in txs]
    times = [t.timestamp for t in txs]
    return [txs[i] for i in undersample_indices(labels, times, ratio, seed)]


@dataclass
class DatasetSplit:
    """Disjoint train/test feature matrices with aligned labels."""

    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    seed: int
    test_fraction: float
    train_indices: np.ndarray = field(repr=False, default=None)
    test_indices: np.ndarray = field(repr=False, default=None)


def stratified_split_indices(labels, test_fraction, seed):
    """Per-class shuffled split; test share within one row per class."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0,1), got {test_fraction}")
    labels = np.asarray(labels)
    train_parts, test_parts = [], []
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if members.size < 2:
            raise DegenerateClassError(f"class {cls} has {members.size} rows, need >= 2")
        rng = np.random.default_rng([seed, cls])
        shuffled = rng.permutation(members)
        n_test = int(round(test_fraction * members.size))
        n_test = min(max(n_test, 1), members.size - 1)
        test_parts.append(shuffled[:n_test])
        train_parts.append(shuffled[n_test:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return train, test


def stratified_split(X, y, test_fraction=0.2, seed=0):
    X = np.asarray(X)
    y = np.asarray(y)
    train_idx, test_idx = stratified_split_indices(y, test_fraction, seed)
    return DatasetSplit(
        x_train=X[train_idx],
        y_train=y[train_idx],
        x_test=X[test_idx],
        y_test=y[test_idx],
        seed=seed,
        test_fraction=test_fraction,
        train_indices=train_idx,
        test_indices=test_idx,
    )
