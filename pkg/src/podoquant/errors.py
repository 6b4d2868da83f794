"""Exception hierarchy shared by the library and the CLI.

Every error that can surface from a pipeline run derives from
:class:`PipelineError` and carries a distinct ``exit_code`` so shell callers
can tell failure classes apart.  Codes start at 10 because argparse already
owns 2 and 1 is reserved for unexpected crashes.
"""


class PipelineError(Exception):
    """Base class for all expected pipeline failures."""

    exit_code = 10


class InputFileNotFoundError(PipelineError, FileNotFoundError):
    """An input path does not exist."""

    exit_code = 11


class MalformedTiffError(PipelineError):
    """A TIFF could not be parsed or has an unsupported layout."""

    exit_code = 12


class ChannelOutOfRangeError(PipelineError):
    """Requested channel index exceeds the channels present."""

    exit_code = 13


class SliceOutOfRangeError(PipelineError):
    """Requested Z slice index exceeds the stack depth."""

    exit_code = 14


class MalformedMaskError(PipelineError):
    """A mask file is unreadable or contains out-of-vocabulary values."""

    exit_code = 15


class MaskWriteError(PipelineError):
    """A mask or table artifact could not be written."""

    exit_code = 16


class ImageSmallerThanPatchError(PipelineError):
    """Image extent is smaller than the patch size on some axis."""

    exit_code = 17


class PatchOutOfBoundsError(PipelineError):
    """A patch origin places the patch partly outside the image."""

    exit_code = 18


class UncoveredPixelError(PipelineError):
    """Stitching received patches that leave some pixel with no vote."""

    exit_code = 19


class DimensionMismatchError(PipelineError):
    """Rasters that must share extent do not."""

    exit_code = 20


class PatchSizeMismatchError(PipelineError):
    """A provider was handed a patch of the wrong size."""

    exit_code = 21


class ProviderFailureError(PipelineError):
    """A segmentation provider raised or returned an invalid map."""

    exit_code = 22


class UnknownInstanceError(PipelineError):
    """Instance id outside ``1..count`` for the given instance map."""

    exit_code = 23


class ZeroVarianceError(PipelineError):
    """A correlation was requested for a constant series."""

    exit_code = 24


class TooFewPointsError(PipelineError):
    """Not enough paired observations for the requested statistic."""

    exit_code = 25


class NonPositiveMarginError(PipelineError):
    """Equivalence margin must be strictly positive."""

    exit_code = 26


class InvalidDofError(PipelineError):
    """Degrees of freedom below 1."""

    exit_code = 27


class NonPositiveTimeError(PipelineError):
    """A timing denominator was zero or negative."""

    exit_code = 28


class KeyMismatchError(PipelineError):
    """Two feature tables do not share the same set of row keys."""

    exit_code = 29


class SeedPlacementError(PipelineError):
    """No valid synthetic layout exists for the requested SynthSpec."""

    exit_code = 30


class ZeroPerimeterError(PipelineError):
    """Circularity was requested with a non-positive perimeter."""

    exit_code = 31
