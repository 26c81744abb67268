"""Conditional feature->image translator: networks, losses, training,
checkpointing and deterministic inference."""

from satforge.translator.networks import (
    GeneratorSpec,
    DiscriminatorSpec,
    build_generator,
    build_discriminators,
    param_checksum,
)
from satforge.translator.losses import cgan_losses
from satforge.translator.training import TrainConfig, train_translator
from satforge.translator.checkpoint import TranslatorCheckpoint, translate

__all__ = [
    "GeneratorSpec",
    "DiscriminatorSpec",
    "build_generator",
    "build_discriminators",
    "param_checksum",
    "cgan_losses",
    "TrainConfig",
    "train_translator",
    "TranslatorCheckpoint",
    "translate",
]
