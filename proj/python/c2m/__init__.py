"""Python interface to the c2m library: learn a clustering metric from
labelled datasets, then cluster unlabelled ones by maximizing it."""

import json

from ._c2m import (
    C2mError,
    CheckpointError,
    Model,
    ParseError,
    ShapeError,
    ValidationError,
    _train,
    acc,
    gen_family,
    load_dataset,
    nmi,
    standardize,
)

__all__ = [
    "C2mError",
    "CheckpointError",
    "Model",
    "ParseError",
    "ShapeError",
    "ValidationError",
    "acc",
    "gen_family",
    "load_dataset",
    "nmi",
    "standardize",
    "train",
]


def train(datasets, preset="standard", config=None, seed=0, report=False):
    """Train a metric on labelled datasets.

    datasets is a sequence of (points, labels) pairs sharing one feature
    dimension. config is an optional dict of training settings in the
    checkpoint's config layout (unknown keys raise ValidationError); it is
    applied on top of the preset. With report=True the per-update training
    log is returned alongside the model.
    """
    model, rows = _train(list(datasets), preset, json.dumps(config) if config else "", seed)
    return (model, rows) if report else model
