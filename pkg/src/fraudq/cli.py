"""Operator entry points: featurize, train, benchmark, serve, simulate.

Exit codes: 0 success, 1 usage error, 2 data or IO error, 3 internal error.
"""

import click

from . import FEATURE_SCHEMA_VERSION, __version__
from .errors import FraudqError
from .evaluation import (
    BenchmarkConfig,
    CLASSICAL_MODEL_IDS,
    FULL_MODEL_IDS,
    evaluate_predictions,
    report_text,
    run_benchmark,
    write_reports,
)
from .features import FeatureExtractor, read_feature_csv, write_feature_csv
from .ingest import read_transactions
from .models import (
    DecisionTreeModel,
    GradientBoostedModel,
    HqnnModel,
    KernelSvmModel,
    LogisticRegressionModel,
    QsvmModel,
    RandomForestModel,
    VqcModel,
    save_model,
)
from .service import RoutingConfig, run_server
from .synthetic import GeneratorConfig, write_synthetic_csv

MODEL_KINDS = ("lr", "dt", "rf", "xgb", "svm", "qsvm", "vqc", "hqnn")


@click.group(help=f"Transaction fraud scoring pipeline "
                  f"(feature schema version {FEATURE_SCHEMA_VERSION}).")
@click.version_option(version=__version__, prog_name="fraudq")
def cli():
    pass


@cli.command()
@click.argument("input_csv", type=click.Path(dir_okay=False))
@click.argument("output_csv", type=click.Path(dir_okay=False, writable=True))
@click.option("--schema", "schema_path", type=click.Path(dir_okay=False),
              default=None, help="Schema sidecar path (default OUTPUT.schema.txt).")
@click.option("--state", "state_path", type=click.Path(dir_okay=False),
              default=None, help="State snapshot path (default OUTPUT.state.jsonl).")
@click.option("--limit", type=int, default=None, help="Read at most N rows.")
def featurize(input_csv, output_csv, schema_path, state_path, limit):
    """Build the feature matrix, schema sidecar, and state snapshot."""
    txs = read_transactions(input_csv, limit=limit)
    extractor = FeatureExtractor().fit(txs)
    X, y, store = extractor.transform_with_store(txs)
    write_feature_csv(output_csv, extractor.schema, X, y)
    extractor.schema.save(schema_path or f"{output_csv}.schema.txt")
    store.save(state_path or f"{output_csv}.state.jsonl")
    click.echo(f"wrote {X.shape[0]} rows x {X.shape[1]} features to {output_csv}")


def _train_model(kind, X, y, opts):
    if kind == "lr":
        return LogisticRegressionModel.fit(X, y)
    if kind == "dt":
        return DecisionTreeModel.fit(X, y)
    if kind == "rf":
        return RandomForestModel.fit(X, y, seed=opts["seed"])
    if kind == "xgb":
        return GradientBoostedModel.fit(X, y)
    if kind == "svm":
        return KernelSvmModel.fit(X, y, C=opts["c"], kernel="linear")
    if kind == "qsvm":
        return QsvmModel.fit(X, y, n_qubits=opts["qubits"], C=opts["c"],
                             repetitions=opts["repetitions"])
    if kind == "vqc":
        return VqcModel.fit(X, y, n_qubits=opts["qubits"], layers=opts["layers"],
                            epochs=opts["epochs"], batch_size=opts["batch_size"],
                            learning_rate=opts["learning_rate"], seed=opts["seed"])
    return HqnnModel.fit(X, y, n_qubits=opts["qubits"], layers=opts["layers"],
                         epochs=opts["epochs"], batch_size=opts["batch_size"],
                         learning_rate=opts["learning_rate"], seed=opts["seed"],
                         encoder_layers=opts["encoder_layers"])


@cli.command()
@click.argument("features_csv", type=click.Path(dir_okay=False))
@click.argument("artifact", type=click.Path(dir_okay=False, writable=True))
@click.option("--kind", type=click.Choice(MODEL_KINDS), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--qubits", type=int, default=4, show_default=True)
@click.option("--layers", type=int, default=1, show_default=True)
@click.option("--encoder-layers", type=int, default=1, show_default=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--learning-rate", type=float, default=0.01, show_default=True)
@click.option("--c", type=float, default=1.0, show_default=True,
              help="SVM box constraint.")
@click.option("--repetitions", type=int, default=1, show_default=True,
              help="Feature-map repetitions for qsvm.")
@click.option("--limit", type=int, default=None, help="Train on at most N rows.")
def train(features_csv, artifact, kind, **opts):
    """Train one model on a feature CSV and write a versioned artifact."""
    names, X, y = read_feature_csv(features_csv)
    limit = opts.pop("limit")
    if limit is not None:
        X, y = X[:limit], y[:limit]
    model = _train_model(kind, X, y, opts)
    model.schema_version = FEATURE_SCHEMA_VERSION
    save_model(model, artifact)
    _, labels = model.predict(X)
    m = evaluate_predictions(y, labels, model_id=kind)
    click.echo(f"trained {kind} on {X.shape[0]} rows; artifact {artifact}")
    click.echo(f"training metrics: accuracy {m.accuracy:.4f}  f {m.f_measure:.4f}  "
               f"precision {m.precision:.4f}  recall {m.recall:.4f}  fpr {m.fpr:.4f}")


def _model_set(spec_text):
    if spec_text == "classical":
        return CLASSICAL_MODEL_IDS
    if spec_text == "full":
        return FULL_MODEL_IDS
    return tuple(part.strip() for part in spec_text.split(",") if part.strip())


@cli.command()
@click.argument("data_csv", type=click.Path(dir_okay=False))
@click.option("--models", default="classical", show_default=True,
              help='"classical", "full", or a comma-separated id list.')
@click.option("--out-csv", type=click.Path(dir_okay=False, writable=True),
              default="fraudq_benchmark.csv", show_default=True)
@click.option("--out-text", type=click.Path(dir_okay=False, writable=True),
              default="fraudq_benchmark.txt", show_default=True)
@click.option("--subsample", type=int, default=None, help="Cap ingested rows.")
@click.option("--ratio", type=int, default=9, show_default=True,
              help="Licit-to-fraud undersampling ratio.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--quantum-rows", type=int, default=1000, show_default=True,
              help="Training-row cap for quantum models.")
def benchmark(data_csv, models, out_csv, out_text, subsample, ratio, seed, quantum_rows):
    """Run the comparison harness and write the report table (text + CSV)."""
    config = BenchmarkConfig(
        model_ids=_model_set(models),
        subsample=subsample,
        ratio=ratio,
        seed=seed,
        quantum_train_rows=quantum_rows,
    )
    reports = run_benchmark(data_csv, config)
    write_reports(reports, csv_path=out_csv, text_path=out_text)
    click.echo(report_text(reports))
    click.echo(f"wrote {out_csv} and {out_text}")


@cli.command()
@click.option("--models-dir", type=click.Path(file_okay=False),
              envvar="FRAUDQ_MODELS_DIR", required=True,
              help="Artifact directory (env FRAUDQ_MODELS_DIR).")
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              default=None, help="Routing config JSON.")
@click.option("--port", type=int, default=None,
              help="Listen port (default env FRAUDQ_PORT, then 8000).")
def serve(models_dir, config_path, port):
    """Serve the scoring API over the artifacts in --models-dir."""
    config = RoutingConfig.from_file(config_path) if config_path else RoutingConfig()
    config.apply_env()
    run_server(models_dir, config, port=port)


@cli.command()
@click.argument("output_csv", type=click.Path(dir_okay=False, writable=True))
@click.option("--rows", type=int, default=20000, show_default=True)
@click.option("--accounts", type=int, default=300, show_default=True)
@click.option("--banks", type=int, default=12, show_default=True)
@click.option("--fraud-rate", type=float, default=0.03, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def simulate(output_csv, rows, accounts, banks, fraud_rate, seed):
    """Write a synthetic transaction log in the ingestion CSV layout."""
    config = GeneratorConfig(n_rows=rows, n_accounts=accounts, n_banks=banks,
                             fraud_rate=fraud_rate, seed=seed)
    n = write_synthetic_csv(output_csv, config)
    click.echo(f"wrote {n} rows to {output_csv}")


def main(argv=None):
    """Console entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.exceptions.Abort:
        return 3
    except (FraudqError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
