"""Checkpoint persistence and deterministic inference.

A checkpoint directory is self-describing: weights.pt holds generator
parameters, meta.json records specs, training config, provenance and the
final loss summary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from satforge.errors import DimMismatch, UnreadableFile
from satforge.imaging import Tile


@dataclass
class TranslatorCheckpoint:
    generator_state: dict
    generator_spec: "GeneratorSpec"
    discriminator_spec: "DiscriminatorSpec"
    train_config: "TrainConfig"
    provenance: dict
    loss_summary: dict
    tile_size: int
    loss_log: list = field(default_factory=list, repr=False)
    _model: object = field(default=None, repr=False, compare=False)

    def save(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        torch.save(self.generator_state, d / "weights.pt")
        meta = {
            "generator_spec": self.generator_spec.to_json(),
            "discriminator_spec": self.discriminator_spec.to_json(),
            "train_config": self.train_config.to_json(),
            "provenance": self.provenance,
            "loss_summary": self.loss_summary,
            "tile_size": self.tile_size,
        }
        (d / "meta.json").write_text(json.dumps(meta, indent=2))

    @classmethod
    def load(cls, directory: str | Path) -> "TranslatorCheckpoint":
        from satforge.translator.networks import DiscriminatorSpec, GeneratorSpec
        from satforge.translator.training import TrainConfig

        d = Path(directory)
        if not (d / "meta.json").is_file() or not (d / "weights.pt").is_file():
            raise UnreadableFile(f"not a checkpoint directory: {d}")
        meta = json.loads((d / "meta.json").read_text())
        state = torch.load(d / "weights.pt", map_location="cpu", weights_only=True)
        return cls(
            generator_state=state,
            generator_spec=GeneratorSpec.from_json(meta["generator_spec"]),
            discriminator_spec=DiscriminatorSpec.from_json(meta["discriminator_spec"]),
            train_config=TrainConfig.from_json(meta["train_config"]),
            provenance=meta["provenance"],
            loss_summary=meta["loss_summary"],
            tile_size=meta["tile_size"],
        )

    def model(self) -> torch.nn.Module:
        """Generator with the stored weights, cached and in eval mode."""
        if self._model is None:
            from satforge.translator.networks import build_generator

            gen = build_generator(self.generator_spec)
            gen.load_state_dict(self.generator_state)
            gen.eval()
            self._model = gen
        return self._model


def translate(checkpoint: TranslatorCheckpoint, feature, coord: tuple[int, int] = (0, 0)) -> Tile:
    """Deterministic feature->tile inference.

    Generator outputs in [-1, 1] map affinely to [0, 255] and round
    half-to-even; repeated calls are bit-identical.
    """
    if feature.data.shape != (checkpoint.tile_size, checkpoint.tile_size):
        raise DimMismatch(
            f"feature {feature.data.shape} does not match checkpoint tile size {checkpoint.tile_size}"
        )
    gen = checkpoint.model()
    x = torch.from_numpy(feature.data.astype(np.float32) / 127.5 - 1.0)[None, None]
    with torch.no_grad():
        y = gen(x)[0].numpy()
    pixels = np.clip(np.rint((y.transpose(1, 2, 0) + 1.0) * 0.5 * 255.0), 0, 255).astype(np.uint8)
    return Tile(grid_coord=coord, pixels=pixels, valid_region=(checkpoint.tile_size, checkpoint.tile_size))
