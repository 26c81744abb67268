"""2-D embedding projection of forged vs pristine images.

Each image is reduced to the 1000 class probabilities of a fixed
classification backbone, then laid out in 2-D with t-SNE under a fixed
seed so the projection is reproducible.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from satforge.errors import BackboneUnavailable, TooFewImages


@dataclass
class EmbeddingProjection:
    features: np.ndarray  # N x 1000 probabilities
    points_2d: np.ndarray  # N x 2
    labels: list  # "forged" | "pristine" per image
    seed: int

    def to_json(self) -> dict:
        return {
            "points": self.points_2d.tolist(),
            "labels": list(self.labels),
            "seed": self.seed,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    def plot(self, path: str | Path) -> None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 5))
        pts = self.points_2d
        for label, color in (("pristine", "tab:blue"), ("forged", "tab:red")):
            sel = [i for i, l in enumerate(self.labels) if l == label]
            if sel:
                ax.scatter(pts[sel, 0], pts[sel, 1], s=14, c=color, label=label, alpha=0.8)
        ax.legend()
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)


class HistogramBackbone:
    """Deterministic offline stand-in: softmax over a 1000-bin grayscale
    intensity histogram. Useful for tests and environments without
    pretrained weights."""

    n_classes = 1000

    def __call__(self, images: list[np.ndarray]) -> np.ndarray:
        feats = []
        for img in images:
            gray = img.astype(np.float64).mean(axis=2) if img.ndim == 3 else img.astype(np.float64)
            hist, _ = np.histogram(gray, bins=self.n_classes, range=(0.0, 256.0))
            z = hist / max(gray.size, 1)
            e = np.exp(z - z.max())
            feats.append(e / e.sum())
        return np.asarray(feats)


class TorchBackbone:
    """ResNet50 softmax probabilities. Falls back to a seeded random init
    (still fixed and deterministic) when pretrained weights are not
    cached locally."""

    def __init__(self, seed: int = 0):
        try:
            import torch
            import torchvision
        except ImportError as exc:
            raise BackboneUnavailable(f"torch/torchvision unavailable: {exc}") from exc
        self._torch = torch
        torch.manual_seed(seed)
        try:
            self.net = torchvision.models.resnet50(weights=torchvision.models.ResNet50_Weights.IMAGENET1K_V2)
        except Exception as exc:
            warnings.warn(f"pretrained ResNet50 weights unavailable ({exc}); using seeded random init")
            self.net = torchvision.models.resnet50(weights=None)
        self.net.eval()

    def __call__(self, images: list[np.ndarray]) -> np.ndarray:
        torch = self._torch
        arr = np.stack([
            np.asarray(img, dtype=np.float32) / 255.0 for img in images
        ]).transpose(0, 3, 1, 2)
        mean = np.array([0.485, 0.456, 0.406], dtype=np.float32).reshape(1, 3, 1, 1)
        std = np.array([0.229, 0.224, 0.225], dtype=np.float32).reshape(1, 3, 1, 1)
        x = torch.from_numpy((arr - mean) / std)
        with torch.no_grad():
            logits = self.net(x)
            probs = torch.softmax(logits, dim=1)
        return probs.numpy().astype(np.float64)


def embed_projection(images: list[np.ndarray], backbone, seed: int = 0, labels=None) -> EmbeddingProjection:
    """Backbone probabilities -> t-SNE 2-D layout, deterministic per seed."""
    if backbone is None:
        raise BackboneUnavailable("no backbone handle supplied")
    if len(images) < 3:
        raise TooFewImages(f"need >= 3 images, got {len(images)}")

    feats = np.asarray(backbone(images), dtype=np.float64)
    sums = feats.sum(axis=1)
    if not np.allclose(sums, 1.0, atol=1e-5):
        raise BackboneUnavailable(f"backbone output is not a probability simplex (sums {sums[:3]}...)")

    from sklearn.manifold import TSNE

    perplexity = min(30.0, (len(images) - 1) / 3.0)
    perplexity = max(perplexity, 1.0)
    tsne = TSNE(n_components=2, random_state=seed, init="pca", perplexity=perplexity)
    points = tsne.fit_transform(feats)
    return EmbeddingProjection(
        features=feats,
        points_2d=np.asarray(points, dtype=np.float64),
        labels=list(labels) if labels is not None else ["unknown"] * len(images),
        seed=seed,
    )
