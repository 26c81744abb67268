"""Forged-image detectors.

binary_cnn: ten weighted layers — four blocks of (3x3 conv + strided 3x3
conv) with channels 32/64/128/256, then a 128-unit dense layer and a
single output unit. Adam, lr 0.001, 100 epochs by default.

finetune_pretrained: MobileNetV2 backbone with a fresh single-logit head,
RMSprop, 100 epochs by default. ImageNet weights are used when available
locally; otherwise training starts from a seeded random init with a
warning (no network access is assumed).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
from PIL import Image

from satforge.errors import DegenerateManifest, SingleClass
from satforge.forensics.roc import ROCReport, roc_curve

log = logging.getLogger(__name__)

DETECTOR_KINDS = ("binary_cnn", "finetune_pretrained")
_DEFAULT_OPTIMIZERS = {"binary_cnn": "adam", "finetune_pretrained": "rmsprop"}


@dataclass
class DetectorConfig:
    kind: str = "binary_cnn"
    epochs: int = 100
    learning_rate: float = 0.001
    optimizer: str | None = None  # defaults by kind
    input_size: int = 256
    seed: int = 0
    batch_size: int = 16

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if self.epochs < 1 or self.learning_rate <= 0 or self.input_size < 32:
            raise ValueError("hyperparameters must be positive")
        if self.optimizer is None:
            self.optimizer = _DEFAULT_OPTIMIZERS[self.kind]

    def to_json(self) -> dict:
        return asdict(self)


class BinaryCnn(nn.Module):
    def __init__(self, input_size: int = 256):
        super().__init__()
        layers = []
        ch_in = 3
        for ch_out in (32, 64, 128, 256):
            layers += [
                nn.Conv2d(ch_in, ch_out, 3, padding=1), nn.ReLU(),
                nn.Conv2d(ch_out, ch_out, 3, stride=2, padding=1), nn.ReLU(),
            ]
            ch_in = ch_out
        self.features = nn.Sequential(*layers)
        spatial = input_size // 16
        self.classifier = nn.Sequential(
            nn.AdaptiveAvgPool2d(min(spatial, 4)),
            nn.Flatten(),
            nn.Linear(256 * min(spatial, 4) ** 2, 128), nn.ReLU(),
            nn.Linear(128, 1),
        )

    def forward(self, x):
        return self.classifier(self.features(x))


def _build_finetune(seed: int) -> nn.Module:
    import torchvision

    torch.manual_seed(seed)
    try:
        net = torchvision.models.mobilenet_v2(weights=torchvision.models.MobileNet_V2_Weights.IMAGENET1K_V1)
    except Exception as exc:  # weights not cached, no network
        warnings.warn(f"pretrained MobileNetV2 weights unavailable ({exc}); using random init")
        net = torchvision.models.mobilenet_v2(weights=None)
    net.classifier = nn.Sequential(nn.Dropout(0.2), nn.Linear(net.last_channel, 1))
    return net


def load_image_for_detector(path: str | Path, size: int) -> np.ndarray:
    """Decode and bilinearly resize (not crop) to size x size RGB."""
    img = Image.open(path).convert("RGB")
    if img.size != (size, size):
        img = img.resize((size, size), Image.BILINEAR)
    return np.asarray(img, dtype=np.uint8)


def _to_tensor(images: list[np.ndarray]) -> torch.Tensor:
    arr = np.stack(images).astype(np.float32) / 127.5 - 1.0
    return torch.from_numpy(arr.transpose(0, 3, 1, 2))


class DetectorHandle:
    """Trained detector: maps a 256x256x3 image to a forged probability."""

    def __init__(self, net: nn.Module, config: DetectorConfig, history: list):
        self.net = net
        self.config = config
        self.history = history  # [(epoch, loss, accuracy), ...]
        self.kind = config.kind

    def predict_proba(self, images: list[np.ndarray]) -> np.ndarray:
        self.net.eval()
        with torch.no_grad():
            logits = self.net(_to_tensor(images)).squeeze(1)
        return torch.sigmoid(logits).numpy()

    def save(self, directory: str | Path) -> None:
        import json

        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        torch.save(self.net.state_dict(), d / "detector.pt")
        (d / "config.json").write_text(json.dumps({"config": self.config.to_json(), "history": self.history}))

    @classmethod
    def load(cls, directory: str | Path) -> "DetectorHandle":
        import json

        d = Path(directory)
        meta = json.loads((d / "config.json").read_text())
        config = DetectorConfig(**meta["config"])
        net = BinaryCnn(config.input_size) if config.kind == "binary_cnn" else _build_finetune(config.seed)
        net.load_state_dict(torch.load(d / "detector.pt", map_location="cpu", weights_only=True))
        return cls(net, config, meta["history"])


def _manifest_split(manifest, split: str, size: int):
    entries = manifest.splits.get(split, [])
    images, labels = [], []
    for e in entries:
        images.append(load_image_for_detector(e["image_path"], size))
        labels.append(1 if e["label"] == "forged" else 0)
    return images, np.array(labels, dtype=np.int64)


def train_detector(manifest, config: DetectorConfig) -> DetectorHandle:
    """Train on the manifest's train split; logs per-epoch loss/accuracy."""
    images, labels = _manifest_split(manifest, "train", config.input_size)
    if labels.size == 0 or labels.sum() == 0 or labels.sum() == labels.size:
        raise DegenerateManifest("training split needs at least one forged and one pristine image")

    torch.manual_seed(config.seed)
    np.random.seed(config.seed % 2 ** 32)
    net = BinaryCnn(config.input_size) if config.kind == "binary_cnn" else _build_finetune(config.seed)

    if config.optimizer == "adam":
        opt = torch.optim.Adam(net.parameters(), lr=config.learning_rate)
    elif config.optimizer == "rmsprop":
        opt = torch.optim.RMSprop(net.parameters(), lr=config.learning_rate)
    else:
        raise ValueError(f"unknown optimizer {config.optimizer!r}")

    x = _to_tensor(images)
    y = torch.from_numpy(labels).float()
    loss_fn = nn.BCEWithLogitsLoss()
    rng = np.random.default_rng(config.seed)
    n = y.shape[0]
    history = []

    net.train()
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        total = 0.0
        correct = 0
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            logits = net(x[idx]).squeeze(1)
            loss = loss_fn(logits, y[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += float(loss.detach()) * len(idx)
            correct += int(((logits.detach() > 0).float() == y[idx]).sum())
        history.append((epoch, total / n, correct / n))
        if epoch % 10 == 0 or epoch == config.epochs - 1:
            log.info("detector %s epoch %d loss %.4f acc %.3f", config.kind, epoch, total / n, correct / n)

    return DetectorHandle(net, config, history)


def evaluate_detectors(manifest, configs: list[DetectorConfig]) -> dict[str, ROCReport]:
    """Train each config and report ROC on the validation split."""
    val_images, val_labels = _manifest_split(manifest, "validation", configs[0].input_size if configs else 256)
    if val_labels.size == 0 or val_labels.sum() in (0, val_labels.size):
        raise SingleClass("validation split needs both classes")

    reports = {}
    for config in configs:
        handle = train_detector(manifest, config)
        scores = handle.predict_proba(val_images)
        reports[config.kind] = roc_curve(scores, val_labels)
        log.info("detector %s validation AUC %.3f", config.kind, reports[config.kind].auc)
    return reports
