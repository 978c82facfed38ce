"""Exception hierarchy shared across the pipeline stages."""


class DefectAugError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(DefectAugError):
    """Invalid configuration: bad ratios, unknown keys, out-of-range values."""


class CurationError(DefectAugError):
    """Raw annotation data that cannot be curated (empty, inconsistent)."""


class DataError(DefectAugError):
    """Malformed runtime data, e.g. negative token counters."""


class ManifestError(DefectAugError):
    """Training manifests that violate their contract (overlap, bad labels)."""


class SelectionError(DefectAugError):
    """Selection request that the candidate pool cannot satisfy."""


class UndefinedRatioError(DefectAugError):
    """Diversity ratio requested with zero real-pair distance."""


class ConflictError(DefectAugError):
    """Write-once violation: duplicate registration or second decision."""


class NotFoundError(DefectAugError):
    """Lookup of an unknown candidate, batch, or prompt."""


class StateError(DefectAugError):
    """Operation applied to an entity in the wrong state."""


class GenerationPaused(DefectAugError):
    """Generation backend failed past its retry budget; batch state is
    persisted and the batch can be resumed with the same command."""


class LeakageError(DefectAugError):
    """A split shares insulator groups with the training manifest."""


class TrainingError(DefectAugError):
    """Training preconditions violated (empty class, degenerate manifest)."""


class EvaluationError(DefectAugError):
    """Evaluation asked to score unlabeled or unreadable items."""


class MissingArtifactError(DefectAugError):
    """A pipeline stage input is missing; names the subcommand that makes it."""

    def __init__(self, artifact: str, producer: str):
        super().__init__(
            f"missing artifact {artifact!r}: run `defectaug {producer}` first"
        )
        self.artifact = artifact
        self.producer = producer


class BackendUnavailable(DefectAugError):
    """Optional model backend cannot be constructed in this environment."""
