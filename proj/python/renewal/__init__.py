"""Similarity and loss-change driven model renewal for data streams."""

from ._core import (
    Batch,
    Error,
    ParseError,
    Predictor,
    RenewalFlag,
    Schema,
    Thresholds,
    TrainingError,
    ValidationError,
    auc,
    batch_similarity,
    binary_similarity,
    decide,
    fit,
    flag_for,
    generate,
    loss_change_rate,
    numeric_similarity,
    perceptron_loss,
    relative_improvement,
    restore,
    rmse,
    simulate,
    weighted_similarity,
)

__all__ = [
    "Batch",
    "Error",
    "ParseError",
    "Predictor",
    "RenewalFlag",
    "Schema",
    "Thresholds",
    "TrainingError",
    "ValidationError",
    "auc",
    "batch_similarity",
    "binary_similarity",
    "decide",
    "fit",
    "flag_for",
    "generate",
    "loss_change_rate",
    "numeric_similarity",
    "perceptron_loss",
    "relative_improvement",
    "restore",
    "rmse",
    "simulate",
    "weighted_similarity",
]
