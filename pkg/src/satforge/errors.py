"""Exception taxonomy shared across the workbench."""


class SatforgeError(Exception):
    """Base class; carries a machine-readable code for CLI/API surfaces."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__doc__)
        self.details = details

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


# imaging
class UnreadableFile(SatforgeError):
    code = "unreadable_file"


class UnsupportedFormat(SatforgeError):
    code = "unsupported_format"


class InvalidTileSize(SatforgeError):
    code = "invalid_tile_size"


class InconsistentGrid(SatforgeError):
    code = "inconsistent_grid"


class OutOfBounds(SatforgeError):
    code = "out_of_bounds"


# feature extraction
class InvalidParams(SatforgeError):
    code = "invalid_params"


class DegeneratePolygon(SatforgeError):
    code = "degenerate_polygon"


# translator
class InvalidSpec(SatforgeError):
    code = "invalid_spec"


class ShapeMismatch(SatforgeError):
    code = "shape_mismatch"


class EmptyTrainingSet(SatforgeError):
    code = "empty_training_set"


class NonFiniteLoss(SatforgeError):
    code = "non_finite_loss"


class DimMismatch(SatforgeError):
    code = "dim_mismatch"


# removal
class MaskOutOfBounds(SatforgeError):
    code = "mask_out_of_bounds"


class WrongFeatureKind(SatforgeError):
    code = "wrong_feature_kind"


class CheckpointMismatch(SatforgeError):
    code = "checkpoint_mismatch"


# metrics
class WindowTooLarge(SatforgeError):
    code = "window_too_large"


# forensics
class ScorerUnavailable(SatforgeError):
    code = "scorer_unavailable"


class DegenerateManifest(SatforgeError):
    code = "degenerate_manifest"


class SingleClass(SatforgeError):
    code = "single_class"


class BackboneUnavailable(SatforgeError):
    code = "backbone_unavailable"


class TooFewImages(SatforgeError):
    code = "too_few_images"


# dataset
class MissingAnnotations(SatforgeError):
    code = "missing_annotations"


class EmptyDirectory(SatforgeError):
    code = "empty_directory"


class JobFailed(SatforgeError):
    code = "job_failed"
