"""Stateless scoring API: model routing, quantum-to-classical fallback, and
engine-provenance flags.

Every response says which engine actually produced the probability. A request
for a quantum model never fails just because the quantum path is down: if the
model is disabled, unloaded, or exceeds the configured timeout, the mapped
classical surrogate answers and the response is flagged fallback_used=true.

Feature state is caller-supplied: requests either carry a ready feature
vector or a raw transaction plus account/pair state snapshot records. Nothing
server-side mutates between requests, so any permutation of a request batch
yields the same multiset of responses given fixed routing draws.
"""

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, model_validator

from .errors import (
    FraudqError,
    NoFallbackConfiguredError,
    SchemaMismatchError,
    UnknownModelError,
)
from .features import FeatureExtractor, FeatureSchema, StateStore
from .ingest import DEFAULT_LAYOUT, Transaction, parse_timestamp
from .models import load_model

DEFAULT_TIMEOUT_MS = 2000.0
DEFAULT_SURROGATE = "rf"
SCHEMA_SIDECAR = "feature_schema.txt"


@dataclass
class RoutingConfig:
    """Router behaviour; immutable after startup."""

    default_model: str = DEFAULT_SURROGATE
    ab_weights: dict = field(default_factory=dict)
    fallback_map: dict = field(default_factory=dict)
    quantum_enabled: bool = True
    quantum_timeout: float = DEFAULT_TIMEOUT_MS

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def apply_env(self, env=os.environ):
        flag = env.get("FRAUDQ_QUANTUM_ENABLED")
        if flag is not None:
            self.quantum_enabled = flag.strip().lower() in ("1", "true", "yes", "on")
        return self


class TransactionBody(BaseModel):
    timestamp: int | str
    from_bank: str
    from_account: str
    to_bank: str
    to_account: str
    amount_paid: float
    payment_currency: str
    amount_received: float
    receiving_currency: str
    payment_format: str

    def to_transaction(self):
        stamp = self.timestamp
        if isinstance(stamp, str):
            stamp = parse_timestamp(stamp, DEFAULT_LAYOUT.timestamp_format)
        return Transaction(
            timestamp=int(stamp),
            from_bank=self.from_bank,
            from_account=self.from_account,
            to_bank=self.to_bank,
            to_account=self.to_account,
            amount_paid=self.amount_paid,
            payment_currency=self.payment_currency,
            amount_received=self.amount_received,
            receiving_currency=self.receiving_currency,
            payment_format=self.payment_format,
            label=0,
        )


class PredictRequest(BaseModel):
    request_id: str
    requested_model: str = "auto"
    feature_vector: list[float] | None = None
    schema_version: int | None = None
    transaction: TransactionBody | None = None
    state_records: list[dict] | None = None

    @model_validator(mode="after")
    def _exactly_one_form(self):
        has_vector = self.feature_vector is not None
        has_raw = self.transaction is not None
        if has_vector == has_raw:
            raise ValueError("provide exactly one of feature_vector or transaction")
        if has_vector and self.state_records is not None:
            raise ValueError("state_records only accompany a raw transaction")
        return self


class PredictResponse(BaseModel):
    prediction: int
    probability: float
    engine: str
    model_id: str
    fallback_used: bool
    request_id: str
    latency: float


class ModelStore:
    """Artifacts loaded once from a directory; id = file stem."""

    def __init__(self, models, schema=None):
        self.models = models
        self.schema = schema
        self.extractor = FeatureExtractor.from_schema(schema) if schema else None

    @classmethod
    def from_dir(cls, models_dir):
        models_dir = Path(models_dir)
        models = {}
        for path in sorted(models_dir.glob("*.json")):
            models[path.stem] = load_model(path)
        schema_path = models_dir / SCHEMA_SIDECAR
        schema = FeatureSchema.load(schema_path) if schema_path.exists() else None
        return cls(models, schema)

    def __contains__(self, model_id):
        return model_id in self.models

    def __getitem__(self, model_id):
        try:
            return self.models[model_id]
        except KeyError:
            raise UnknownModelError(f"no model {model_id!r} is loaded") from None

    def quantum_ids(self):
        return [mid for mid, m in self.models.items() if m.engine == "quantum"]


def validate_fallbacks(store, config):
    """Every loaded quantum model needs a loaded classical surrogate.

    Raised at startup, never per request. A missing map entry falls back to
    the default surrogate when that surrogate is loaded and classical.
    """
    for model_id in store.quantum_ids():
        surrogate = config.fallback_map.get(model_id)
        if surrogate is None and DEFAULT_SURROGATE in store:
            surrogate = DEFAULT_SURROGATE
            config.fallback_map[model_id] = surrogate
        if surrogate is None or surrogate not in store:
            raise NoFallbackConfiguredError(
                f"quantum model {model_id!r} has no loaded classical surrogate")
        if store[surrogate].engine != "classical":
            raise NoFallbackConfiguredError(
                f"fallback target {surrogate!r} for {model_id!r} is not classical")


def route(requested_model, config, draw):
    """Explicit model id, or a weighted draw over ab_weights for "auto".

    The draw is a uniform [0,1) value supplied by the caller, so routing is
    deterministic given the draw sequence.
    """
    if requested_model != "auto":
        return requested_model
    weights = config.ab_weights or {config.default_model: 1.0}
    items = sorted(weights.items())
    total = sum(w for _, w in items)
    if total <= 0:
        raise NoFallbackConfiguredError("ab_weights must sum to a positive value")
    edge = draw * total
    acc = 0.0
    for model_id, weight in items:
        acc += weight
        if edge < acc:
            return model_id
    return items[-1][0]


def _score(model, x):
    proba = np.asarray(model.predict_proba(x), dtype=np.float64)
    p = float(proba[0])
    return p, int(p >= 0.5)


def predict_with_fallback(store, config, model_id, x, executor, delay_s=0.0):
    """Score one row; quantum paths degrade to the surrogate, never to an
    error, unless the model id is unknown to both the store and the map."""
    model = store.models.get(model_id)
    if model is not None and model.engine == "classical":
        p, label = _score(model, x)
        return p, label, "classical", model_id, False
    if model is None and model_id not in config.fallback_map:
        raise UnknownModelError(f"no model {model_id!r} is loaded")

    if model is not None and config.quantum_enabled:
        def quantum_task():
            if delay_s > 0:
                time.sleep(delay_s)
            return _score(model, x)

        future = executor.submit(quantum_task)
        try:
            p, label = future.result(timeout=config.quantum_timeout / 1000.0)
            return p, label, "quantum", model_id, False
        except FutureTimeoutError:
            future.cancel()

    surrogate = config.fallback_map[model_id]
    p, label = _score(store[surrogate], x)
    return p, label, "classical", surrogate, True


def _feature_row(store, req, routed_model=None):
    if req.feature_vector is not None:
        if req.schema_version is not None:
            loaded = None
            if routed_model is not None and routed_model.schema_version is not None:
                loaded = routed_model.schema_version
            elif store.schema is not None:
                loaded = store.schema.version
            if loaded is not None and req.schema_version != loaded:
                raise SchemaMismatchError(
                    f"request schema_version {req.schema_version} != "
                    f"loaded schema version {loaded}")
        return np.asarray([req.feature_vector], dtype=np.float64)
    if store.extractor is None:
        raise SchemaMismatchError(
            "raw-transaction requests need a feature schema sidecar in the models directory")
    snapshot = StateStore.from_records(req.state_records or [])
    tx = req.transaction.to_transaction()
    return np.asarray([store.extractor.extract(tx, snapshot, allow_unknown=True)])


def create_app(models_dir, config=None, draw_fn=None, quantum_delay_s=0.0, seed=0):
    """Build the API around one artifact directory and a frozen config.

    draw_fn injects the routing draw sequence for tests; quantum_delay_s is a
    fault-injection hook that stalls the quantum path per request.
    """
    config = config or RoutingConfig()
    store = ModelStore.from_dir(models_dir)
    validate_fallbacks(store, config)
    executor = ThreadPoolExecutor(max_workers=8)
    if draw_fn is None:
        rng = np.random.default_rng(seed)
        lock = threading.Lock()

        def draw_fn():
            with lock:
                return float(rng.random())

    app = FastAPI(title="fraudq scoring service")
    app.state.store = store
    app.state.config = config

    def error_body(status, kind, detail, request_id=None):
        return JSONResponse(
            status_code=status,
            content={"error": kind, "detail": detail, "request_id": request_id},
        )

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return error_body(422, "validation", str(exc.errors()[:3]))

    @app.get("/v1/health")
    def health():
        quantum_ids = store.quantum_ids()
        return {
            "status": "ok",
            "models_loaded": len(store.models),
            "quantum_enabled": config.quantum_enabled,
            "quantum_path": "ready" if config.quantum_enabled and quantum_ids else
                            ("disabled" if quantum_ids else "absent"),
        }

    @app.get("/v1/models")
    def models():
        return [
            {
                "model_id": mid,
                "kind": model.kind,
                "engine": model.engine,
                "schema_version": model.schema_version,
            }
            for mid, model in sorted(store.models.items())
        ]

    @app.post("/v1/predict")
    def predict(req: PredictRequest):
        started = time.perf_counter()
        try:
            model_id = route(req.requested_model, config, draw_fn())
            x = _feature_row(store, req, store.models.get(model_id))
            p, label, engine, used_id, fellback = predict_with_fallback(
                store, config, model_id, x, executor, delay_s=quantum_delay_s)
        except UnknownModelError as exc:
            return error_body(404, "unknown_model", str(exc), req.request_id)
        except SchemaMismatchError as exc:
            return error_body(409, "schema_mismatch", str(exc), req.request_id)
        except FraudqError as exc:
            return error_body(422, type(exc).__name__, str(exc), req.request_id)
        return PredictResponse(
            prediction=label,
            probability=p,
            engine=engine,
            model_id=used_id,
            fallback_used=fellback,
            request_id=req.request_id,
            latency=(time.perf_counter() - started) * 1000.0,
        )

    return app


def run_server(models_dir, config=None, port=None, host="127.0.0.1"):
    """Foreground server; port resolves CLI flag > FRAUDQ_PORT > 8000."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("FRAUDQ_PORT", "8000"))
    app = create_app(models_dir, config)
    uvicorn.run(app, host=host, port=port, log_level="warning")
