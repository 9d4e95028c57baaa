"""Exception types raised across the toolkit.

Every module raises subclasses of ToolkitError so callers (and the CLI)
can separate data/contract problems from genuine bugs.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


# audio_io
class UnsupportedFormat(ToolkitError):
    """WAV file is not 16 kHz / mono / 16-bit PCM."""


class IoError(ToolkitError):
    """Underlying read/write failed."""


# level
class SilentInput(ToolkitError):
    """All-zero waveform where speech level is required."""


# mixing
class ZeroEnergy(ToolkitError):
    """A signal has no energy over the mixed extent."""


class LengthMismatch(ToolkitError):
    """Waveforms that must align have different lengths."""


class EmptyPool(ToolkitError):
    """Noise pool contains no clips."""


# corpus
class ParseError(ToolkitError):
    """Registry row failed to parse; message carries the line number."""


class DuplicateId(ToolkitError):
    """Registry contains a repeated utt_id."""


class MissingGender(ToolkitError):
    """Interferer registry lacks one of the required genders."""


class EmptyResult(ToolkitError):
    """Filtering removed every record."""


class CorpusError(ToolkitError):
    """Triplet emission failed; message carries the item context."""


# features
class BadMagic(ToolkitError):
    """File does not start with the FMX1 magic."""


class TruncatedFile(ToolkitError):
    """FMX1 payload is shorter than the header promises."""


class DimensionOverflow(ToolkitError):
    """Matrix dimensions do not fit the u32 header fields."""


class ZeroVector(ToolkitError):
    """Cosine similarity of a zero vector is undefined."""


class DimMismatch(ToolkitError):
    """Operands disagree on feature dimension or shape."""


class PoolTooSmall(ToolkitError):
    """Reference pool has fewer frames than neighbours requested."""


# curriculum
class MissingEmbedding(ToolkitError):
    """A manifest speaker has no embedding; message names the speaker."""


class EmptyStage(ToolkitError):
    """A curriculum stage ended up with no items."""


class UnknownPool(ToolkitError):
    """Alternation schedule names a synthetic pool the plan lacks."""


# spectral
class TooShort(ToolkitError):
    """Signal shorter than one analysis window."""


# metrics
class ZeroTarget(ToolkitError):
    """Reference signal has no energy."""


class MissingEstimate(ToolkitError):
    """Estimate WAV missing for a manifest item (fatal only in strict mode)."""
