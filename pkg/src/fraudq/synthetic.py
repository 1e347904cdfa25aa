"""Deterministic generator of synthetic transaction logs.

Output matches the CSV layout the ingest module reads, so the whole pipeline
can run without the external dataset. Fraud comes in two archetypes whose
deviations point in opposite directions on every informative axis:

* burst: rapid repeat sends (seconds apart) of amounts well above the
  account's own running mean, to counterparties the account never paid;
* drain: a rarely-sending account moves an amount well below its own mean
  to an already-established counterparty after days of silence.

Background traffic plants look-alikes beyond each band (merchant rapid-fire
settlement legs, oversized licit transfers, micro payments, cold-start
first sends), and categorical choices follow the same distributions for
licit and fraud rows. No single column separates the classes and the two
archetypes cancel on any linear score; only the conjunction of history
features identifies a row.
"""

from dataclasses import dataclass

import numpy as np

from .ingest import Transaction, write_transactions

CURRENCIES = ("USD", "EUR", "GBP", "JPY", "CHF", "CAD", "AUD", "CNY")
FORMATS = ("ACH", "Cheque", "Credit Card", "Wire", "Reinvestment")

# epoch of 2022/09/01 00:00 UTC
DEFAULT_START = 1661990400


@dataclass
class GeneratorConfig:
    n_rows: int = 20000
    n_accounts: int = 300
    n_banks: int = 12
    fraud_rate: float = 0.03
    seed: int = 0
    start_time: int = DEFAULT_START
    mean_gap_seconds: float = 40.0


class _Account:
    __slots__ = ("index", "name", "bank", "home_currency", "preferred_format",
                 "peers", "amount_scale", "kind", "sent_to")

    def __init__(self, index, bank, home_currency, preferred_format, peers,
                 amount_scale, kind):
        self.index = index
        self.name = f"A{index:05d}"
        self.bank = bank
        self.home_currency = home_currency
        self.preferred_format = preferred_format
        self.peers = peers
        self.amount_scale = amount_scale
        self.kind = kind
        self.sent_to = set()


def _build_accounts(rng, config):
    currency_weights = np.array([0.38, 0.22, 0.12, 0.08, 0.06, 0.06, 0.04, 0.04])
    accounts = []
    for i in range(config.n_accounts):
        peers = rng.choice(config.n_accounts, size=int(rng.integers(3, 9)), replace=False)
        roll = rng.random()
        kind = "merchant" if roll < 0.1 else ("quiet" if roll < 0.25 else "regular")
        accounts.append(
            _Account(
                index=i,
                bank=f"B{int(rng.integers(config.n_banks)):03d}",
                home_currency=str(rng.choice(CURRENCIES, p=currency_weights)),
                preferred_format=str(rng.choice(FORMATS)),
                peers=[int(p) for p in peers if p != i],
                amount_scale=float(rng.uniform(5.0, 6.0)),
                kind=kind,
            )
        )
    return accounts


def _pick(rng, items):
    return items[int(rng.integers(len(items)))]


def _row(rng, sender, receiver, when, paid, label):
    """One output row; currency and format distributions are shared by licit
    and fraud rows so the categorical columns carry no class signal."""
    currency = sender.home_currency if rng.random() < 0.93 else str(rng.choice(CURRENCIES))
    fmt = sender.preferred_format if rng.random() < 0.9 else str(rng.choice(FORMATS))
    paid = round(max(paid, 0.01), 2)
    received = paid if rng.random() < 0.98 else round(paid * float(rng.uniform(0.97, 1.0)), 2)
    sender.sent_to.add(receiver.index)
    return Transaction(
        timestamp=when,
        from_bank=sender.bank,
        from_account=sender.name,
        to_bank=receiver.bank,
        to_account=receiver.name,
        amount_paid=paid,
        payment_currency=currency,
        amount_received=received,
        receiving_currency=currency,
        payment_format=fmt,
        label=label,
    )


def _licit_amount(rng, sender):
    base = float(np.exp(rng.normal(sender.amount_scale, 0.5)))
    roll = rng.random()
    if roll < 0.04:
        return base * float(rng.uniform(10.0, 40.0))
    if roll < 0.10:
        return base * float(rng.uniform(0.02, 0.2))
    return base


def _other_account(rng, accounts, sender):
    while True:
        other = _pick(rng, accounts)
        if other.index != sender.index:
            return other


def _fresh_receiver(rng, accounts, sender):
    for _ in range(10):
        other = _other_account(rng, accounts, sender)
        if other.index not in sender.sent_to:
            return other
    return other


def _background_row(rng, accounts, pools, when):
    roll = rng.random()
    if roll < 0.35 and pools["merchant"]:
        sender = _pick(rng, pools["merchant"])
    elif roll < 0.98 or not pools["quiet"]:
        sender = _pick(rng, pools["regular"] or accounts)
    else:
        sender = _pick(rng, pools["quiet"])
    if sender.peers and rng.random() < 0.92:
        receiver = accounts[_pick(rng, sender.peers)]
    else:
        receiver = _other_account(rng, accounts, sender)
    return _row(rng, sender, receiver, when, _licit_amount(rng, sender), 0), sender


def _merchant_rush(rng, accounts, sender, when):
    """Licit rapid-fire settlement legs; keeps short send gaps common in
    background traffic."""
    rows = []
    clock = when
    for _ in range(int(rng.integers(1, 3))):
        clock += int(rng.uniform(5, 120))
        if sender.peers:
            receiver = accounts[_pick(rng, sender.peers)]
        else:
            receiver = _other_account(rng, accounts, sender)
        rows.append(_row(rng, sender, receiver, clock, _licit_amount(rng, sender), 0))
    return rows, clock


def _burst(rng, accounts, pools, when):
    """2-4 rapid sends of amounts 2-4 sender sigmas above the sender's own
    log-mean, each to a counterparty the sender never paid before."""
    sender = _pick(rng, pools["regular"] or accounts)
    rows = []
    clock = when
    for _ in range(int(rng.integers(2, 5))):
        receiver = _fresh_receiver(rng, accounts, sender)
        paid = float(np.exp(sender.amount_scale + rng.uniform(1.0, 2.0)))
        rows.append(_row(rng, sender, receiver, clock, paid, 1))
        clock += int(rng.uniform(5, 60))
    return rows, clock


def _drain(rng, accounts, pools, when):
    """Single send from a rarely-active account, 2-4 sigmas below its own
    log-mean, to a counterparty it already paid before."""
    sender = _pick(rng, pools["quiet"] or pools["regular"] or accounts)
    if sender.sent_to:
        receiver = accounts[_pick(rng, sorted(sender.sent_to))]
    elif sender.peers:
        receiver = accounts[_pick(rng, sender.peers)]
    else:
        receiver = _other_account(rng, accounts, sender)
    paid = float(np.exp(sender.amount_scale - rng.uniform(1.0, 2.0)))
    return _row(rng, sender, receiver, when, paid, 1)


def generate_transactions(config=None):
    """Seeded stream of Transaction rows in timestamp order."""
    config = config or GeneratorConfig()
    rng = np.random.default_rng(config.seed)
    accounts = _build_accounts(rng, config)
    pools = {kind: [a for a in accounts if a.kind == kind]
             for kind in ("merchant", "regular", "quiet")}

    # bursts average ~3 rows and drains 1, so these per-event rates give an
    # even archetype split at the requested overall fraud fraction
    burst_rate = config.fraud_rate / 6.0
    drain_rate = config.fraud_rate / 2.0
    rows = []
    clock = config.start_time
    while len(rows) < config.n_rows:
        clock += max(1, int(rng.exponential(config.mean_gap_seconds)))
        roll = rng.random()
        if roll < burst_rate:
            burst, clock = _burst(rng, accounts, pools, clock)
            rows.extend(burst)
        elif roll < burst_rate + drain_rate:
            rows.append(_drain(rng, accounts, pools, clock))
        else:
            row, sender = _background_row(rng, accounts, pools, clock)
            rows.append(row)
            if sender.kind == "merchant" and rng.random() < 0.25:
                rush, clock = _merchant_rush(rng, accounts, sender, clock)
                rows.extend(rush)
    del rows[config.n_rows:]
    rows.sort(key=lambda tx: tx.timestamp)
    return rows


def write_synthetic_csv(path, config=None):
    """Generate and write one dataset; returns the number of rows written."""
    rows = generate_transactions(config)
    write_transactions(path, rows)
    return len(rows)
