"""Versioned JSON persistence for trained models.

Payloads round-trip bit-exactly (floats serialize via shortest-repr), so a
reloaded model reproduces predictions exactly. The reader accepts any 1.x
schema, warning when the minor version differs; other majors are refused.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings

import numpy as np

from .errors import ModelFormatError, SchemaVersionError
from .learners import ClassifierConfig, Standardizer, TrainedModel
from .learners.adaboost import AdaParams
from .learners.forest import ForestParams, TreeNodes
from .learners.gbt import GbtParams, ObliviousGbtParams, ObliviousTree
from .learners.svm import SvmParams

MODEL_SCHEMA_VERSION = "1.1"


def _tree_payload(tree: TreeNodes) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
    }


def _tree_from(payload: dict) -> TreeNodes:
    return TreeNodes(
        feature=np.array(payload["feature"], dtype=np.int64),
        threshold=np.array(payload["threshold"], dtype=np.float64),
        left=np.array(payload["left"], dtype=np.int64),
        right=np.array(payload["right"], dtype=np.int64),
        value=np.array(payload["value"], dtype=np.float64),
    )


def _params_payload(kind: str, params) -> dict:
    if kind == "forest":
        return {"trees": [_tree_payload(t) for t in params.trees],
                "n_features": params.n_features}
    if kind == "ada":
        return {
            "feature": params.feature.tolist(),
            "threshold": params.threshold.tolist(),
            "low_value": params.low_value.tolist(),
            "high_value": params.high_value.tolist(),
            "alpha": params.alpha.tolist(),
            "n_features": params.n_features,
        }
    if kind == "gbt-a":
        return {
            "trees": [_tree_payload(t) for t in params.trees],
            "learning_rate": params.learning_rate,
            "n_features": params.n_features,
        }
    if kind == "gbt-b":
        return {
            "trees": [
                {
                    "features": t.features.tolist(),
                    "thresholds": t.thresholds.tolist(),
                    "leaf_values": t.leaf_values.tolist(),
                }
                for t in params.trees
            ],
            "learning_rate": params.learning_rate,
            "n_features": params.n_features,
        }
    if kind == "svm":
        return {"w": params.w.tolist(), "b": params.b, "n_features": params.n_features}
    raise ModelFormatError(f"unknown classifier kind {kind!r}")


def _params_from(kind: str, payload: dict):
    if kind == "forest":
        return ForestParams(trees=[_tree_from(t) for t in payload["trees"]],
                            n_features=payload["n_features"])
    if kind == "ada":
        return AdaParams(
            feature=np.array(payload["feature"], dtype=np.int64),
            threshold=np.array(payload["threshold"], dtype=np.float64),
            low_value=np.array(payload["low_value"], dtype=np.int64),
            high_value=np.array(payload["high_value"], dtype=np.int64),
            alpha=np.array(payload["alpha"], dtype=np.float64),
            n_features=payload["n_features"],
        )
    if kind == "gbt-a":
        return GbtParams(trees=[_tree_from(t) for t in payload["trees"]],
                         learning_rate=payload["learning_rate"],
                         n_features=payload["n_features"])
    if kind == "gbt-b":
        return ObliviousGbtParams(
            trees=[
                ObliviousTree(
                    features=np.array(t["features"], dtype=np.int64),
                    thresholds=np.array(t["thresholds"], dtype=np.float64),
                    leaf_values=np.array(t["leaf_values"], dtype=np.float64),
                )
                for t in payload["trees"]
            ],
            learning_rate=payload["learning_rate"],
            n_features=payload["n_features"],
        )
    if kind == "svm":
        return SvmParams(w=np.array(payload["w"], dtype=np.float64),
                         b=float(payload["b"]), n_features=payload["n_features"])
    raise ModelFormatError(f"unknown classifier kind {kind!r}")


def model_payload(model: TrainedModel) -> dict:
    std = None
    if model.standardizer is not None:
        std = {"mean": model.standardizer.mean.tolist(),
               "std": model.standardizer.std.tolist()}
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": model.config.kind,
        "config": {
            "kind": model.config.kind,
            "seed": model.config.seed,
            "n_trees": model.config.n_trees,
            "n_rounds": model.config.n_rounds,
            "learning_rate": model.config.learning_rate,
            "tree_depth": model.config.tree_depth,
            "oblivious": model.config.oblivious,
            "svm_c": model.config.svm_c,
            "svm_epochs": model.config.svm_epochs,
        },
        "fingerprint": model.fingerprint,
        "n_features": model.n_features,
        "standardizer": std,
        "params": _params_payload(model.config.kind, model.params),
        "train_loss": list(model.train_loss) if model.train_loss else None,
    }


def model_from_payload(payload: dict) -> TrainedModel:
    try:
        version = str(payload["schema_version"])
        major, _, minor = version.partition(".")
        if major != MODEL_SCHEMA_VERSION.partition(".")[0]:
            raise SchemaVersionError(
                f"model schema {version} is incompatible with {MODEL_SCHEMA_VERSION}"
            )
        if minor != MODEL_SCHEMA_VERSION.partition(".")[2]:
            warnings.warn(
                f"model written under schema {version}; reading as {MODEL_SCHEMA_VERSION}"
            )
        config = ClassifierConfig(**payload["config"])
        std = payload.get("standardizer")
        standardizer = None
        if std is not None:
            standardizer = Standardizer(
                mean=np.array(std["mean"], dtype=np.float64),
                std=np.array(std["std"], dtype=np.float64),
            )
        params = _params_from(config.kind, payload["params"])
        loss = payload.get("train_loss")
        return TrainedModel(
            config=config,
            n_features=int(payload["n_features"]),
            standardizer=standardizer,
            params=params,
            train_loss=tuple(loss) if loss else None,
        )
    except SchemaVersionError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model payload: {exc}") from exc


def save_model(model: TrainedModel, path) -> None:
    text = json.dumps(model_payload(model), indent=1)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_model(path) -> TrainedModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError:
        raise
    except ValueError as exc:
        raise ModelFormatError(f"cannot parse model file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelFormatError(f"model file {path} does not hold an object")
    return model_from_payload(payload)
