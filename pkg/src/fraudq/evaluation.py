"""Confusion-matrix metrics and the end-to-end benchmark harness.

The harness replays the whole experiment shape: ingest a transaction CSV,
build behavioural features, undersample to the configured class ratio, split,
fit every configured model and score the holdout. Reports carry the five
headline statistics plus measured train/infer wall times. Zero-denominator
metrics are defined as 0 so a degenerate all-negative classifier on 9:1 data
reports accuracy 0.9 with F, precision, recall and FPR all 0.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import features, ingest
from .errors import EmptyMatrixError, LengthMismatchError, UnknownModelError
from .models import (
    DecisionTreeModel,
    GradientBoostedModel,
    HqnnModel,
    KernelSvmModel,
    LogisticRegressionModel,
    QsvmModel,
    RandomForestModel,
    VqcModel,
)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class MetricsReport:
    model_id: str
    accuracy: float
    f_measure: float
    precision: float
    recall: float
    fpr: float
    wall_time_train: float = 0.0
    wall_time_infer: float = 0.0


def confusion(labels, predictions):
    """Exact 2x2 counts over 0/1 labels and predictions."""
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape:
        raise LengthMismatchError(
            f"{labels.shape[0]} labels vs {predictions.shape[0]} predictions")
    for name, values in (("labels", labels), ("predictions", predictions)):
        if not np.all((values == 0) | (values == 1)):
            raise ValueError(f"{name} must be 0 or 1")
    return ConfusionMatrix(
        tp=int(np.sum((labels == 1) & (predictions == 1))),
        fp=int(np.sum((labels == 0) & (predictions == 1))),
        tn=int(np.sum((labels == 0) & (predictions == 0))),
        fn=int(np.sum((labels == 1) & (predictions == 0))),
    )


def metrics(cm, model_id="", wall_time_train=0.0, wall_time_infer=0.0):
    """The five headline statistics with zero-denominator values pinned to 0."""
    if cm.total == 0:
        raise EmptyMatrixError("confusion matrix has no entries")

    def ratio(num, den):
        return num / den if den > 0 else 0.0

    precision = ratio(cm.tp, cm.tp + cm.fp)
    recall = ratio(cm.tp, cm.tp + cm.fn)
    return MetricsReport(
        model_id=model_id,
        accuracy=(cm.tp + cm.tn) / cm.total,
        f_measure=ratio(2.0 * precision * recall, precision + recall),
        precision=precision,
        recall=recall,
        fpr=ratio(cm.fp, cm.fp + cm.tn),
        wall_time_train=wall_time_train,
        wall_time_infer=wall_time_infer,
    )


def evaluate_predictions(labels, predictions, model_id=""):
    return metrics(confusion(labels, predictions), model_id=model_id)


# --- benchmark harness ------------------------------------------------------

def _builders():
    return {
        "lr": lambda X, y, seed: LogisticRegressionModel.fit(X, y),
        "dt": lambda X, y, seed: DecisionTreeModel.fit(X, y),
        "rf": lambda X, y, seed: RandomForestModel.fit(X, y, seed=seed),
        "xgb": lambda X, y, seed: GradientBoostedModel.fit(X, y),
        "svm": lambda X, y, seed: KernelSvmModel.fit(X, y, kernel="linear"),
        "qsvc_2q": lambda X, y, seed: QsvmModel.fit(X, y, n_qubits=2, C=50.0, repetitions=2),
        "qsvc_4q": lambda X, y, seed: QsvmModel.fit(X, y, n_qubits=4, C=50.0, repetitions=2),
        "vqc_1l_4q": lambda X, y, seed: VqcModel.fit(X, y, n_qubits=4, layers=1, seed=seed),
        "vqc_2l_4q": lambda X, y, seed: VqcModel.fit(X, y, n_qubits=4, layers=2, seed=seed),
        "hqnn_1l_4q": lambda X, y, seed: HqnnModel.fit(X, y, n_qubits=4, layers=1, seed=seed),
        "hqnn_2l_4q": lambda X, y, seed: HqnnModel.fit(X, y, n_qubits=4, layers=2, seed=seed),
    }


MODEL_IDS = tuple(_builders().keys())

CLASSICAL_MODEL_IDS = ("lr", "dt", "rf", "xgb")

# the ten rows of the headline comparison table
FULL_MODEL_IDS = (
    "lr", "dt", "rf", "xgb",
    "vqc_1l_4q", "vqc_2l_4q",
    "hqnn_1l_4q", "hqnn_2l_4q",
    "qsvc_2q", "qsvc_4q",
)

# variational and kernel trainers scale badly past this many rows on a
# dense simulator; the cap subsamples their training split only
QUANTUM_TRAIN_ROW_CAP = 1000


@dataclass
class BenchmarkConfig:
    model_ids: tuple = CLASSICAL_MODEL_IDS
    subsample: int | None = None
    ratio: int = 9
    seed: int = 0
    test_fraction: float = 0.2
    quantum_train_rows: int = QUANTUM_TRAIN_ROW_CAP
    feature_config: features.FeatureConfig = field(default_factory=features.FeatureConfig)


def _is_quantum(model_id):
    return model_id.startswith(("qsvc", "vqc", "hqnn"))


def _cap_rows(X, y, cap, seed):
    n = X.shape[0]
    if n <= cap:
        return X, y
    rng = np.random.default_rng([seed, 104729])
    keep = np.sort(rng.choice(n, size=cap, replace=False))
    return X[keep], y[keep]


def run_benchmark(path, config=None):
    """Ingest -> featurize -> undersample -> split -> fit -> score.

    Returns a list of MetricsReport, one per configured model id, in the
    configured order. Deterministic given (dataset, config.seed).
    """
    config = config or BenchmarkConfig()
    builders = _builders()
    for model_id in config.model_ids:
        if model_id not in builders:
            raise UnknownModelError(f"unknown benchmark model id {model_id!r}")

    txs = ingest.read_transactions(path, limit=config.subsample)
    txs = ingest.undersample(txs, ratio=config.ratio, seed=config.seed)
    _, X, y = features.featurize_stream(txs, config.feature_config)
    split = ingest.stratified_split(X, y, test_fraction=config.test_fraction, seed=config.seed)

    reports = []
    for model_id in config.model_ids:
        x_train, y_train = split.x_train, split.y_train
        if _is_quantum(model_id):
            x_train, y_train = _cap_rows(x_train, y_train, config.quantum_train_rows, config.seed)
        start = time.perf_counter()
        model = builders[model_id](x_train, y_train, config.seed)
        trained = time.perf_counter()
        _, predicted = model.predict(split.x_test)
        done = time.perf_counter()
        reports.append(
            metrics(
                confusion(split.y_test, predicted),
                model_id=model_id,
                wall_time_train=trained - start,
                wall_time_infer=done - trained,
            )
        )
    return reports


# --- report output ----------------------------------------------------------

CSV_HEADER = "model_id,accuracy,f_measure,precision,recall,fpr"


def report_csv(reports):
    """Metrics-only CSV; wall times stay out so reruns are byte-identical."""
    lines = [CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.model_id},{r.accuracy!r},{r.f_measure!r},"
            f"{r.precision!r},{r.recall!r},{r.fpr!r}"
        )
    return "\n".join(lines) + "\n"


def report_text(reports):
    """Aligned table with the five metrics plus measured wall times."""
    header = ("model", "accuracy", "f_measure", "precision", "recall", "fpr",
              "train_s", "infer_s")
    rows = [header]
    for r in reports:
        rows.append((
            r.model_id,
            f"{r.accuracy:.4f}", f"{r.f_measure:.4f}", f"{r.precision:.4f}",
            f"{r.recall:.4f}", f"{r.fpr:.4f}",
            f"{r.wall_time_train:.2f}", f"{r.wall_time_infer:.2f}",
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    out = []
    for row in rows:
        out.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"


def write_reports(reports, csv_path=None, text_path=None):
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8") as out:
            out.write(report_csv(reports))
    if text_path is not None:
        with open(text_path, "w", encoding="utf-8") as out:
            out.write(report_text(reports))
