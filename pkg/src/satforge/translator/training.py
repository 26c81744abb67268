"""One-shot training loop: alternate discriminator and generator updates
over (feature image, tile) pairs from a single scene, deliberately
overfitting so erased objects get filled with memorized background."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
import torch

from satforge.errors import EmptyTrainingSet, NonFiniteLoss, ShapeMismatch
from satforge.translator import losses as L
from satforge.translator.checkpoint import TranslatorCheckpoint
from satforge.translator.networks import (
    DiscriminatorSpec,
    GeneratorSpec,
    build_discriminators,
    build_generator,
)


@dataclass
class TrainConfig:
    steps: int = 2000
    learning_rate: float = 2e-4
    batch_size: int = 1
    adversarial_loss_form: str = "least_squares"  # | cross_entropy
    feature_matching_weight: float = 10.0
    l1_weight: float = 10.0
    seed: int = 0
    beta1: float = 0.5
    beta2: float = 0.999
    device: str = "cpu"
    snapshot_every: int | None = None

    def validate(self) -> None:
        if self.steps < 1 or self.batch_size < 1:
            raise ValueError("steps and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.feature_matching_weight < 0 or self.l1_weight < 0:
            raise ValueError("loss weights must be >= 0")
        if self.adversarial_loss_form not in ("least_squares", "cross_entropy"):
            raise ValueError(f"unknown adversarial_loss_form {self.adversarial_loss_form!r}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "TrainConfig":
        return cls(**d)


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed % 2 ** 32)
    torch.manual_seed(seed)


def pairs_to_tensors(pairs, device="cpu"):
    """(FeatureImage, Tile) pairs -> ([-1,1] feature batch, [-1,1] image batch)."""
    feats, imgs = [], []
    for feature, tile in pairs:
        if feature.data.shape[0] != tile.pixels.shape[0]:
            raise ShapeMismatch(
                f"feature {feature.data.shape} does not match tile {tile.pixels.shape[:2]}"
            )
        feats.append(feature.data.astype(np.float32) / 127.5 - 1.0)
        imgs.append(tile.pixels.astype(np.float32) / 127.5 - 1.0)
    f = torch.from_numpy(np.stack(feats)[:, None]).to(device)
    i = torch.from_numpy(np.stack(imgs).transpose(0, 3, 1, 2)).to(device)
    return f, i


def train_translator(
    pairs,
    g_spec: GeneratorSpec,
    d_spec: DiscriminatorSpec,
    config: TrainConfig,
    provenance: dict | None = None,
    log_path: str | Path | None = None,
    progress_cb=None,
) -> TranslatorCheckpoint:
    """Train the feature->image translator on the given pairs.

    Logs (step, d_loss, g_adv, g_fm, g_l1) per step; aborts with a
    diagnostic when any loss goes non-finite.
    """
    if not pairs:
        raise EmptyTrainingSet("no (feature, tile) pairs supplied")
    sizes = {feature.data.shape[0] for feature, _ in pairs}
    if len(sizes) != 1:
        raise ShapeMismatch(f"mixed tile sizes in training pairs: {sorted(sizes)}")
    tile_size = sizes.pop()

    config.validate()
    seed_everything(config.seed)
    device = torch.device(config.device)

    feats, imgs = pairs_to_tensors(pairs, device)
    gen = build_generator(g_spec).to(device)
    disc = build_discriminators(d_spec).to(device)
    opt_g = torch.optim.Adam(gen.parameters(), lr=config.learning_rate, betas=(config.beta1, config.beta2))
    opt_d = torch.optim.Adam(disc.parameters(), lr=config.learning_rate, betas=(config.beta1, config.beta2))

    use_sigmoid = config.adversarial_loss_form == "cross_entropy"

    def run_d(feature, image):
        outs = disc(torch.cat([feature, image], dim=1))
        if use_sigmoid:
            outs = [scale[:-1] + [torch.sigmoid(scale[-1])] for scale in outs]
        return outs

    rng = np.random.default_rng(config.seed)
    n = feats.shape[0]
    loss_log = []

    for step in range(config.steps):
        idx = rng.integers(0, n, size=min(config.batch_size, n))
        f = feats[idx]
        x = imgs[idx]
        fake = gen(f)

        # discriminator update
        opt_d.zero_grad()
        d_real = run_d(f, x)
        d_fake = run_d(f, fake.detach())
        d_loss = L.adversarial_d_loss(d_real, d_fake, config.adversarial_loss_form)
        d_loss.backward()
        opt_d.step()

        # generator update
        opt_g.zero_grad()
        d_real = run_d(f, x)
        d_fake = run_d(f, fake)
        g_adv = L.adversarial_g_loss(d_fake, config.adversarial_loss_form)
        g_fm = L.feature_matching_loss(d_real, d_fake)
        g_l1 = torch.mean(torch.abs(fake - x))
        g_loss = g_adv + config.feature_matching_weight * g_fm + config.l1_weight * g_l1
        g_loss.backward()
        opt_g.step()

        row = (step, float(d_loss.detach()), float(g_adv.detach()), float(g_fm.detach()), float(g_l1.detach()))
        if not all(math.isfinite(v) for v in row[1:]):
            raise NonFiniteLoss(f"non-finite loss at step {step}: {row}", step=step)
        loss_log.append(row)
        if progress_cb is not None and (step % 25 == 0 or step == config.steps - 1):
            progress_cb(step + 1, config.steps)

    if log_path is not None:
        with open(log_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "d_loss", "g_adv", "g_fm", "g_l1"])
            writer.writerows(loss_log)

    gen.eval()
    with torch.no_grad():
        final_l1 = float(torch.mean(torch.abs(gen(feats) - imgs)))

    window = loss_log[-min(100, len(loss_log)):]
    summary = {
        "final_train_l1": final_l1,
        "last_window_d_loss": float(np.mean([r[1] for r in window])),
        "last_window_g_l1": float(np.mean([r[4] for r in window])),
        "steps": config.steps,
    }

    return TranslatorCheckpoint(
        generator_state={k: v.detach().cpu() for k, v in gen.state_dict().items()},
        generator_spec=g_spec,
        discriminator_spec=d_spec,
        train_config=config,
        provenance=provenance or {},
        loss_summary=summary,
        tile_size=tile_size,
        loss_log=loss_log,
    )
