"""Pluggable object-detection scoring.

The offline stub scorer is deterministic and manifest-driven: it returns
high confidence for labels whose annotated objects survive in the image
and omits removed ones, so detection-score tables can be generated
hermetically. The external commercial scorer is an optional client behind
the same interface and is never exercised in CI.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

from satforge.errors import ScorerUnavailable

# Printed reference values (label x {CFI, SFI} x columns A-D) kept as
# fixture data for report formatting. The Airplane, Aircraft and Vehicle
# blocks are numerically identical in the source table; each label is
# still formatted independently and the duplication is flagged, not
# enforced.
TABLE2_FIXTURE = {
    "Airplane": {
        "CFI": {"A": 99.3, "B": 99.2, "C": 97.5, "D": 87.8},
        "SFI": {"A": 99.3, "B": 99.2, "C": 97.4, "D": 97.5},
    },
    "Aircraft": {
        "CFI": {"A": 99.3, "B": 99.2, "C": 97.5, "D": 87.8},
        "SFI": {"A": 99.3, "B": 99.2, "C": 97.4, "D": 97.5},
    },
    "Terminal": {
        "CFI": {"A": 0, "B": 55.9, "C": 55.1, "D": 0},
        "SFI": {"A": 55.7, "B": 55.6, "C": 69.2, "D": 56.3},
    },
    "Vehicle": {
        "CFI": {"A": 99.3, "B": 99.2, "C": 97.5, "D": 87.8},
        "SFI": {"A": 99.3, "B": 99.2, "C": 97.4, "D": 97.5},
    },
}
TABLE2_DUPLICATED_BLOCKS = ("Airplane", "Aircraft", "Vehicle")  # flagged anomaly


@dataclass
class DetectionScore:
    label: str
    confidence: float  # percent in [0, 100]; absent label = 0 by convention

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 100.0):
            raise ValueError(f"confidence must be in [0, 100], got {self.confidence}")


class StubScorer:
    """Rule-based scorer over an image->labels registry.

    registry maps image id to a list of {"label": str, "removed": bool}
    records; surviving labels score ``present_confidence``, removed and
    unknown ones are omitted.
    """

    present_confidence = 99.0

    def __init__(self, registry: dict):
        self.registry = registry

    def score(self, image, image_id: str | None = None) -> list[DetectionScore]:
        records = self.registry.get(image_id, [])
        seen = {}
        for rec in records:
            if rec.get("removed"):
                continue
            label = rec["label"]
            conf = float(rec.get("confidence", self.present_confidence))
            seen[label] = max(seen.get(label, 0.0), conf)
        return [DetectionScore(label, conf) for label, conf in seen.items()]


class ExternalScorer:
    """Placeholder client for a commercial detection service.

    Credentials come from the environment only; without them every call
    raises ScorerUnavailable. Supporting engineering, not an acceptance
    target, and excluded from CI.
    """

    def __init__(self, endpoint_env: str = "SATFORGE_SCORER_ENDPOINT", key_env: str = "SATFORGE_SCORER_KEY"):
        self.endpoint = os.environ.get(endpoint_env)
        self.api_key = os.environ.get(key_env)

    def score(self, image, image_id: str | None = None) -> list[DetectionScore]:
        if not self.endpoint or not self.api_key:
            raise ScorerUnavailable("external scorer not configured (set endpoint and key env vars)")
        raise ScorerUnavailable("external scorer client is not enabled in this build")


def score_objects(image, scorer, image_id: str | None = None) -> list[DetectionScore]:
    """Scores sorted by confidence descending, labels deduplicated."""
    raw = scorer.score(image, image_id=image_id)
    best = {}
    for s in raw:
        if s.label not in best or s.confidence > best[s.label].confidence:
            best[s.label] = s
    return sorted(best.values(), key=lambda s: -s.confidence)


def scores_to_csv(table: dict) -> str:
    """Serialize {label: {family: {column: confidence}}} in the reference
    table's layout."""
    cols = sorted({c for fams in table.values() for vals in fams.values() for c in vals})
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["label", "family", *cols])
    for label, fams in table.items():
        for fam, vals in fams.items():
            writer.writerow([label, fam, *[vals.get(c, 0) for c in cols]])
    return buf.getvalue()
