"""Streaming behavioural features over a chronological transaction stream.

Every vector is computed from strictly prior history: for each transaction
the pipeline extracts features first and folds the transaction into the
running state afterwards, so a row never sees itself or anything later.
Labels are never read during extraction.

Amount-derived numerics are log1p-transformed (heavy tails destabilize the
linear model and angle encodings). Cold-start conventions: statistics 0,
recency features a large sentinel, change flags 0.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import FEATURE_SCHEMA_VERSION
from .errors import BadAlphaError, OutOfOrderError, SchemaMismatchError

TIME_SENTINEL = 1e7


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs for the extractor; defaults match the benchmark pipeline."""

    ewma_alpha: float = 0.3
    time_sentinel: float = TIME_SENTINEL
    strict_time: bool = False
    receiver_change_flags: bool = False


# --- running statistics -------------------------------------------------------


@dataclass
class RunningStats:
    """Single-pass count/mean/m2/max/min with sample (n-1) deviation."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    max: float = 0.0
    min: float = 0.0

    @property
    def std(self):
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1))


def welford_update(stats, x):
    """Fold one observation into ``stats`` (mutates and returns it)."""
    if stats.count == 0:
        stats.max = x
        stats.min = x
    else:
        stats.max = max(stats.max, x)
        stats.min = min(stats.min, x)
    stats.count += 1
    delta = x - stats.mean
    stats.mean += delta / stats.count
    stats.m2 += delta * (x - stats.mean)
    return stats


def ewma_update(prev, x, alpha):
    """alpha-smoothed update; the first observation initializes the average."""
    if not 0.0 < alpha <= 1.0:
        raise BadAlphaError(f"alpha must be in (0, 1], got {alpha}")
    if prev is None:
        return x
    return alpha * x + (1.0 - alpha) * prev


def pair_equilibrium(sum_ab, sum_ba):
    """Signed balance of bilateral flow in [-1, 1]; 0 for an empty pair."""
    total = sum_ab + sum_ba
    if total == 0:
        return 0.0
    return (sum_ab - sum_ba) / total


# --- per-entity state ----------------------------------------------------------


@dataclass
class AccountState:
    """Sending and receiving behaviour of one account."""

    as_sender: RunningStats = field(default_factory=RunningStats)
    as_receiver: RunningStats = field(default_factory=RunningStats)
    last_sent: int | None = None
    last_received: int | None = None
    ewma_amount_sent: float | None = None
    ewma_amount_received: float | None = None
    ewma_send_gap: float | None = None
    # category -> [count, last_use_seq]; counts cover sending activity only
    currency_hist: dict = field(default_factory=dict)
    format_hist: dict = field(default_factory=dict)
    recv_currency_hist: dict = field(default_factory=dict)
    recv_format_hist: dict = field(default_factory=dict)
    seq: int = 0


def modal_category(hist):
    """Most frequent category; ties go to the most recently used."""
    if not hist:
        return None
    return max(hist.items(), key=lambda kv: (kv[1][0], kv[1][1]))[0]


def _bump(hist, category, seq):
    entry = hist.setdefault(category, [0, 0])
    entry[0] += 1
    entry[1] = seq


@dataclass(frozen=True)
class PairState:
    """Read view of one ordered pair a->b, with the reverse flow for balance."""

    count_ab: int
    sum_amount_ab: float
    sum_amount_ba: float
    last_pair_tx_time: int | None

    @property
    def mean_amount_ab(self):
        return self.sum_amount_ab / self.count_ab if self.count_ab else 0.0


class StateStore:
    """All account and pair state; one logical writer, snapshot-exportable."""

    def __init__(self):
        self.accounts = {}
        self._directed = {}
        self._pair_time = {}

    def account(self, key):
        state = self.accounts.get(key)
        if state is None:
            state = AccountState()
            self.accounts[key] = state
        return state

    def peek_account(self, key):
        return self.accounts.get(key) or AccountState()

    def pair(self, sender, receiver):
        forward = self._directed.get((sender, receiver))
        backward = self._directed.get((receiver, sender))
        unordered = (sender, receiver) if sender <= receiver else (receiver, sender)
        return PairState(
            count_ab=forward[0] if forward else 0,
            sum_amount_ab=forward[1] if forward else 0.0,
            sum_amount_ba=backward[1] if backward else 0.0,
            last_pair_tx_time=self._pair_time.get(unordered),
        )

    def record_pair(self, sender, receiver, amount, timestamp):
        entry = self._directed.setdefault((sender, receiver), [0, 0.0])
        entry[0] += 1
        entry[1] += amount
        unordered = (sender, receiver) if sender <= receiver else (receiver, sender)
        self._pair_time[unordered] = timestamp

    def save(self, path):
        with open(path, "w", encoding="utf-8") as out:
            out.write(json.dumps({"format": "fraudq-state", "version": 1}) + "\n")
            for key in sorted(self.accounts):
                a = self.accounts[key]
                out.write(
                    json.dumps(
                        {
                            "kind": "account",
                            "key": key,
                            "sender": _stats_payload(a.as_sender),
                            "receiver": _stats_payload(a.as_receiver),
                            "last_sent": a.last_sent,
                            "last_received": a.last_received,
                            "ewma_sent": a.ewma_amount_sent,
                            "ewma_received": a.ewma_amount_received,
                            "ewma_gap": a.ewma_send_gap,
                            "currency_hist": a.currency_hist,
                            "format_hist": a.format_hist,
                            "recv_currency_hist": a.recv_currency_hist,
                            "recv_format_hist": a.recv_format_hist,
                            "seq": a.seq,
                        }
                    )
                    + "\n"
                )
            for (sender, receiver), (count, total) in sorted(self._directed.items()):
                out.write(
                    json.dumps(
                        {"kind": "pair", "from": sender, "to": receiver, "count": count, "sum": total}
                    )
                    + "\n"
                )
            for (a, b), t in sorted(self._pair_time.items()):
                out.write(json.dumps({"kind": "pair_time", "a": a, "b": b, "time": t}) + "\n")

    def apply_record(self, rec):
        """Load one snapshot record (the line format ``save`` writes)."""
        if rec["kind"] == "account":
            state = AccountState(
                as_sender=_stats_from(rec["sender"]),
                as_receiver=_stats_from(rec["receiver"]),
                last_sent=rec["last_sent"],
                last_received=rec["last_received"],
                ewma_amount_sent=rec["ewma_sent"],
                ewma_amount_received=rec["ewma_received"],
                ewma_send_gap=rec["ewma_gap"],
                currency_hist={k: list(v) for k, v in rec["currency_hist"].items()},
                format_hist={k: list(v) for k, v in rec["format_hist"].items()},
                recv_currency_hist={
                    k: list(v) for k, v in rec.get("recv_currency_hist", {}).items()
                },
                recv_format_hist={
                    k: list(v) for k, v in rec.get("recv_format_hist", {}).items()
                },
                seq=rec["seq"],
            )
            self.accounts[rec["key"]] = state
        elif rec["kind"] == "pair":
            self._directed[(rec["from"], rec["to"])] = [rec["count"], rec["sum"]]
        elif rec["kind"] == "pair_time":
            self._pair_time[(rec["a"], rec["b"])] = rec["time"]
        else:
            raise ValueError(f"unknown state record kind {rec.get('kind')!r}")

    @classmethod
    def from_records(cls, records):
        """Store built from snapshot records supplied inline (no file)."""
        store = cls()
        for rec in records:
            store.apply_record(rec)
        return store

    @classmethod
    def load(cls, path):
        store = cls()
        with open(path, encoding="utf-8") as handle:
            header = json.loads(handle.readline())
            if header.get("format") != "fraudq-state":
                raise ValueError(f"{path} is not a state snapshot")
            for line in handle:
                store.apply_record(json.loads(line))
        return store


def _stats_payload(s):
    return [s.count, s.mean, s.m2, s.max, s.min]


def _stats_from(payload):
    count, mean, m2, mx, mn = payload
    return RunningStats(count=count, mean=mean, m2=m2, max=mx, min=mn)


# --- schema ---------------------------------------------------------------------

NUMERIC = "numeric"
FLAG = "flag"
ONE_HOT = "one_hot"

_SIDE_CAR_MAGIC = "fraudq-feature-schema"


class FeatureSchema:
    """Ordered, versioned column layout: (name, kind) pairs."""

    def __init__(self, columns, version=FEATURE_SCHEMA_VERSION):
        self.columns = list(columns)
        self.version = version

    @property
    def names(self):
        return [name for name, _ in self.columns]

    def __len__(self):
        return len(self.columns)

    def index(self, name):
        return self.names.index(name)

    def to_text(self):
        lines = [f"{_SIDE_CAR_MAGIC} v{self.version}"]
        lines += [f"{i}\t{name}\t{kind}" for i, (name, kind) in enumerate(self.columns)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        magic, version = lines[0].rsplit(" v", 1)
        if magic != _SIDE_CAR_MAGIC:
            raise ValueError("not a feature schema file")
        columns = []
        for line in lines[1:]:
            _, name, kind = line.split("\t")
            columns.append((name, kind))
        return cls(columns, version=int(version))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as out:
            out.write(self.to_text())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as handle:
            return cls.from_text(handle.read())


# --- extraction -------------------------------------------------------------------


def _log1p(x):
    return math.log1p(x)


class FeatureExtractor:
    """Builds the feature schema from a training stream and emits vectors.

    ``fit`` freezes the one-hot vocabularies; ``transform`` replays a stream
    through extract-then-update from empty state. At serving time ``extract``
    reads a caller-supplied StateStore without mutating it.
    """

    def __init__(self, config=None):
        self.config = config or FeatureConfig()
        self.currency_vocab = []
        self.format_vocab = []
        self._schema = None

    @property
    def schema(self):
        if self._schema is None:
            raise ValueError("extractor is not fitted")
        return self._schema

    def fit(self, txs):
        currencies, formats = set(), set()
        for tx in txs:
            currencies.add(tx.payment_currency)
            formats.add(tx.payment_format)
        self.currency_vocab = sorted(currencies)
        self.format_vocab = sorted(formats)
        self._schema = FeatureSchema(self._build_columns())
        return self

    @classmethod
    def from_schema(cls, schema, config=None):
        """Rebuild a fitted extractor from a saved schema sidecar.

        The one-hot vocabularies are recovered from the column names, so the
        result emits vectors identical to the extractor that wrote the schema.
        """
        extractor = cls(config)
        for name, kind in schema.columns:
            if kind != ONE_HOT:
                continue
            field, _, category = name.partition("=")
            if field == "payment_currency":
                extractor.currency_vocab.append(category)
            elif field == "payment_format":
                extractor.format_vocab.append(category)
        extractor._schema = FeatureSchema(extractor._build_columns(), version=schema.version)
        if extractor._schema.names != schema.names:
            raise SchemaMismatchError("schema sidecar does not describe this extractor layout")
        return extractor

    def _build_columns(self):
        cols = [
            ("log_amount_paid", NUMERIC),
            ("log_amount_received", NUMERIC),
            ("same_bank", FLAG),
            ("is_self_loop", FLAG),
        ]
        cols += [(f"payment_currency={c}", ONE_HOT) for c in self.currency_vocab]
        cols += [(f"payment_format={f}", ONE_HOT) for f in self.format_vocab]
        cols += [
            ("sender_tx_count", NUMERIC),
            ("sender_amount_mean", NUMERIC),
            ("sender_amount_std", NUMERIC),
            ("sender_amount_max", NUMERIC),
            ("sender_amount_min", NUMERIC),
            ("sender_seconds_since_last", NUMERIC),
            ("sender_ewma_amount", NUMERIC),
            ("sender_ewma_send_gap", NUMERIC),
            ("sender_currency_change", FLAG),
            ("sender_format_change", FLAG),
            ("receiver_tx_count", NUMERIC),
            ("receiver_amount_mean", NUMERIC),
            ("receiver_amount_std", NUMERIC),
            ("receiver_amount_max", NUMERIC),
            ("receiver_amount_min", NUMERIC),
            ("receiver_seconds_since_last", NUMERIC),
            ("receiver_ewma_amount", NUMERIC),
            ("pair_count", NUMERIC),
            ("pair_amount_sum", NUMERIC),
            ("pair_amount_mean", NUMERIC),
            ("pair_equilibrium", NUMERIC),
            ("pair_seconds_since_last", NUMERIC),
        ]
        if self.config.receiver_change_flags:
            cols += [
                ("receiver_currency_change", FLAG),
                ("receiver_format_change", FLAG),
            ]
        return cols

    def extract(self, tx, store, allow_unknown=False):
        """Feature vector for ``tx`` from prior state only; never mutates."""
        if self._schema is None:
            raise ValueError("extractor is not fitted")
        cfg = self.config
        sender = store.peek_account(tx.from_account)
        receiver = store.peek_account(tx.to_account)
        pair = store.pair(tx.from_account, tx.to_account)

        row = [
            _log1p(tx.amount_paid),
            _log1p(tx.amount_received),
            1.0 if tx.from_bank == tx.to_bank else 0.0,
            1.0 if tx.from_account == tx.to_account else 0.0,
        ]
        row += self._one_hot(tx.payment_currency, self.currency_vocab, allow_unknown)
        row += self._one_hot(tx.payment_format, self.format_vocab, allow_unknown)

        row += self._stats_block(sender.as_sender)
        row.append(self._since(sender.last_sent, tx.timestamp))
        row.append(_log1p(sender.ewma_amount_sent) if sender.ewma_amount_sent is not None else 0.0)
        row.append(sender.ewma_send_gap if sender.ewma_send_gap is not None else cfg.time_sentinel)
        row.append(_change_flag(sender.currency_hist, tx.payment_currency))
        row.append(_change_flag(sender.format_hist, tx.payment_format))

        row += self._stats_block(receiver.as_receiver)
        row.append(self._since(receiver.last_received, tx.timestamp))
        row.append(
            _log1p(receiver.ewma_amount_received)
            if receiver.ewma_amount_received is not None
            else 0.0
        )

        row.append(float(pair.count_ab))
        row.append(_log1p(pair.sum_amount_ab))
        row.append(_log1p(pair.mean_amount_ab))
        row.append(pair_equilibrium(pair.sum_amount_ab, pair.sum_amount_ba))
        row.append(self._since(pair.last_pair_tx_time, tx.timestamp))

        if cfg.receiver_change_flags:
            row.append(_change_flag(receiver.recv_currency_hist, tx.payment_currency))
            row.append(_change_flag(receiver.recv_format_hist, tx.payment_format))
        return np.array(row, dtype=np.float64)

    def _one_hot(self, category, vocab, allow_unknown):
        hot = [0.0] * len(vocab)
        try:
            hot[vocab.index(category)] = 1.0
        except ValueError:
            if not allow_unknown:
                raise SchemaMismatchError(
                    f"category {category!r} not in the frozen training vocabulary"
                ) from None
        return hot

    def _stats_block(self, stats):
        if stats.count == 0:
            return [0.0] * 5
        return [
            float(stats.count),
            _log1p(stats.mean),
            _log1p(stats.std),
            _log1p(stats.max),
            _log1p(stats.min),
        ]

    def _since(self, last, now):
        if last is None:
            return self.config.time_sentinel
        return float(now - last)

    def update(self, tx, store):
        """Fold ``tx`` into the store; call exactly once per tx, after extract."""
        cfg = self.config
        sender = store.account(tx.from_account)
        receiver = store.account(tx.to_account)
        if cfg.strict_time:
            for state, key in ((sender, tx.from_account), (receiver, tx.to_account)):
                last = max(state.last_sent or 0, state.last_received or 0)
                if state.as_sender.count + state.as_receiver.count > 0 and tx.timestamp < last:
                    raise OutOfOrderError(
                        f"transaction at {tx.timestamp} precedes account {key!r} history ({last})"
                    )

        amount = tx.amount_paid
        welford_update(sender.as_sender, amount)
        if sender.last_sent is not None:
            gap = float(tx.timestamp - sender.last_sent)
            sender.ewma_send_gap = ewma_update(sender.ewma_send_gap, gap, cfg.ewma_alpha)
        sender.ewma_amount_sent = ewma_update(sender.ewma_amount_sent, amount, cfg.ewma_alpha)
        sender.last_sent = tx.timestamp
        sender.seq += 1
        _bump(sender.currency_hist, tx.payment_currency, sender.seq)
        _bump(sender.format_hist, tx.payment_format, sender.seq)

        welford_update(receiver.as_receiver, amount)
        receiver.ewma_amount_received = ewma_update(
            receiver.ewma_amount_received, amount, cfg.ewma_alpha
        )
        receiver.last_received = tx.timestamp
        if cfg.receiver_change_flags:
            receiver.seq += 1
            _bump(receiver.recv_currency_hist, tx.payment_currency, receiver.seq)
            _bump(receiver.recv_format_hist, tx.payment_format, receiver.seq)

        store.record_pair(tx.from_account, tx.to_account, amount, tx.timestamp)

    def transform(self, txs, allow_unknown=False):
        """Replay a chronological stream; returns (matrix, labels)."""
        store = StateStore()
        rows = np.empty((len(txs), len(self.schema)), dtype=np.float64)
        labels = np.empty(len(txs), dtype=np.int64)
        for i, tx in enumerate(txs):
            rows[i] = self.extract(tx, store, allow_unknown)
            self.update(tx, store)
            labels[i] = tx.label
        return rows, labels

    def transform_with_store(self, txs, allow_unknown=False):
        """As transform, but also returns the final StateStore for snapshots."""
        store = StateStore()
        rows = np.empty((len(txs), len(self.schema)), dtype=np.float64)
        labels = np.empty(len(txs), dtype=np.int64)
        for i, tx in enumerate(txs):
            rows[i] = self.extract(tx, store, allow_unknown)
            self.update(tx, store)
            labels[i] = tx.label
        return rows, labels, store

    def fit_transform(self, txs):
        return self.fit(txs).transform(txs)


def _change_flag(hist, category):
    modal = modal_category(hist)
    if modal is None:
        return 0.0
    return 0.0 if category == modal else 1.0


def featurize_stream(txs, config=None):
    """One-call pipeline: fit vocabularies, replay, return (schema, X, y)."""
    extractor = FeatureExtractor(config)
    X, y = extractor.fit_transform(txs)
    return extractor.schema, X, y


# --- matrix export ------------------------------------------------------------


def write_feature_csv(path, schema, X, y):
    """Feature matrix as CSV with a header row; floats via repr round-trip."""
    with open(path, "w", encoding="utf-8") as out:
        out.write(",".join(schema.names + ["label"]) + "\n")
        for row, label in zip(X, y):
            out.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")


def read_feature_csv(path):
    """Reads a matrix written by write_feature_csv; returns (names, X, y)."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        names = header.split(",")[:-1]
        rows, labels = [], []
        for line in handle:
            parts = line.rstrip("\n").split(",")
            rows.append([float(v) for v in parts[:-1]])
            labels.append(int(parts[-1]))
    X = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(names)))
    return names, X, np.array(labels, dtype=np.int64)
