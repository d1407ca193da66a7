"""Versioned JSON persistence for fitted models.

Arrays travel as base64-encoded little-endian buffers with explicit dtype
and shape, so documents are plain text yet byte-exact on round trip.
"""

from __future__ import annotations

import base64
import json

import numpy as np

from . import __version__
from .covariance import RegularizedCovariance
from .datamodel import GroupMeans
from .discriminant import RldaModel, SvdRidgeModel
from .regmeans import RegularizedMeans

__all__ = ["decode_array", "encode_array", "load_model", "model_to_dict", "save_model"]

FORMAT = "rlda-model"
SCHEMA_VERSION = 1


def encode_array(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr)
    canonical = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
    return {
        "dtype": canonical.dtype.str,
        "shape": list(arr.shape),
        "data": base64.b64encode(canonical.tobytes()).decode("ascii"),
    }


def decode_array(doc: dict) -> np.ndarray:
    raw = base64.b64decode(doc["data"])
    return np.frombuffer(raw, dtype=np.dtype(doc["dtype"])).reshape(doc["shape"]).copy()


def model_to_dict(model: RldaModel | SvdRidgeModel, extra_config: dict | None = None) -> dict:
    """Serialize a fitted model (either kernel) to a JSON-ready document."""
    doc = {
        "format": FORMAT,
        "version": SCHEMA_VERSION,
        "tool_version": __version__,
    }
    if isinstance(model, RldaModel):
        doc.update(
            {
                "algorithm": "chol",
                "group_names": list(model.group_names),
                "pooled_mean": encode_array(model.pooled_mean),
                "reg_means": encode_array(model.reg_means.per_group),
                "active_mask": encode_array(model.reg_means.active_mask.astype(np.uint8)),
                "priors": encode_array(model.priors),
                "factor": encode_array(model.cov.factor),
                "cov_lambda": model.cov.lam,
                "cov_rule": model.cov.rule,
                "s_convention": model.cov.s_convention,
                "config": dict(model.config, **(extra_config or {})),
            }
        )
    elif isinstance(model, SvdRidgeModel):
        doc.update(
            {
                "algorithm": "svd",
                "group_names": list(model.group_names),
                "pooled_mean": encode_array(model.means.pooled),
                "per_group_means": encode_array(model.means.per_group),
                "group_counts": encode_array(model.means.counts.astype(np.int64)),
                "right_vectors": encode_array(model.right_vectors),
                "singular_values": encode_array(model.singular_values),
                "column_variances": encode_array(model.column_variances),
                "cov_lambda": model.lam,
                "mode": model.mode,
                "config": dict(extra_config or {}),
            }
        )
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def save_model(model, path, extra_config: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, extra_config), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_model(path):
    """Load a persisted model; returns ``(model, config)``."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a model document")
    if doc.get("version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')}")
    if doc["algorithm"] == "chol":
        factor = decode_array(doc["factor"])
        cov = RegularizedCovariance(
            matrix=factor @ factor.T,
            lam=doc["cov_lambda"],
            factor=factor,
            rule=doc["cov_rule"],
            s_convention=doc["s_convention"],
        )
        per_group = decode_array(doc["reg_means"])
        mask = decode_array(doc["active_mask"]).astype(bool)
        model = RldaModel(
            reg_means=RegularizedMeans(per_group=per_group, active_mask=mask),
            pooled_mean=decode_array(doc["pooled_mean"]),
            cov=cov,
            priors=decode_array(doc["priors"]),
            group_names=tuple(doc["group_names"]),
            config=doc["config"],
        )
        return model, doc["config"]
    if doc["algorithm"] == "svd":
        means = GroupMeans(
            pooled=decode_array(doc["pooled_mean"]),
            per_group=decode_array(doc["per_group_means"]),
            counts=decode_array(doc["group_counts"]),
        )
        model = SvdRidgeModel(
            right_vectors=decode_array(doc["right_vectors"]),
            singular_values=decode_array(doc["singular_values"]),
            column_variances=decode_array(doc["column_variances"]),
            lam=doc["cov_lambda"],
            mode=doc["mode"],
            means=means,
            group_names=tuple(doc["group_names"]),
        )
        return model, doc["config"]
    raise ValueError(f"{path}: unknown algorithm {doc['algorithm']!r}")
