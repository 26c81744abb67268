"""ROC curves and AUC by threshold sweep + trapezoidal integration."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from satforge.errors import ShapeMismatch, SingleClass


@dataclass
class ROCReport:
    points: list  # [(fpr, tpr), ...] from (0,0) to (1,1)
    auc: float
    thresholds: list

    def to_json(self) -> dict:
        return {"points": [list(p) for p in self.points], "auc": self.auc, "thresholds": self.thresholds}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    def plot(self, path: str | Path, label: str = "detector") -> None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fpr = [p[0] for p in self.points]
        tpr = [p[1] for p in self.points]
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.plot(fpr, tpr, label=f"{label} (AUC={self.auc:.3f})")
        ax.plot([0, 1], [0, 1], "k--", lw=0.8)
        ax.set_xlabel("false positive rate")
        ax.set_ylabel("true positive rate")
        ax.legend(loc="lower right")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)


def roc_curve(scores, labels) -> ROCReport:
    """Sweep unique score thresholds from high to low.

    With ties, diagonal trapezoid segments make the AUC equal the
    Mann-Whitney pairwise-concordance statistic (ties counted 0.5).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape:
        raise ShapeMismatch(f"{scores.shape} vs {labels.shape}")
    if scores.size < 2:
        raise SingleClass("need at least 2 samples")
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("both classes must be present")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    thresholds = []
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < s.size:
        t = s[i]
        while i < s.size and s[i] == t:
            tp += int(y[i] == 1)
            fp += int(y[i] == 0)
            i += 1
        thresholds.append(float(t))
        points.append((fp / n_neg, tp / n_pos))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))

    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    auc = float(trapezoid(ys, xs))
    return ROCReport(points=points, auc=auc, thresholds=thresholds)
