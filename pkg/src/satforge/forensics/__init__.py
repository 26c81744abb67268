"""Forgery evaluation: detection scoring, forged-image detectors,
ROC/AUC reports and 2-D embedding projections."""

from satforge.forensics.roc import ROCReport, roc_curve
from satforge.forensics.scoring import DetectionScore, StubScorer, ExternalScorer, score_objects, TABLE2_FIXTURE
from satforge.forensics.detectors import DetectorConfig, DetectorHandle, train_detector, evaluate_detectors
from satforge.forensics.embedding import EmbeddingProjection, embed_projection, HistogramBackbone, TorchBackbone

__all__ = [
    "ROCReport", "roc_curve",
    "DetectionScore", "StubScorer", "ExternalScorer", "score_objects", "TABLE2_FIXTURE",
    "DetectorConfig", "DetectorHandle", "train_detector", "evaluate_detectors",
    "EmbeddingProjection", "embed_projection", "HistogramBackbone", "TorchBackbone",
]
