"""Exception hierarchy for zero-coref.

Every error is a ``ValueError`` so callers that only care about bad input can catch
that, while the CLI and tests can match the precise subclass.
"""


class ZeroCorefError(ValueError):
    """Base class for all toolkit errors."""


class ConllFormatError(ZeroCorefError):
    """Malformed CoNLL-2012 input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MalformedHeader(ConllFormatError):
    """A ``#begin document`` header could not be read or is out of sequence."""


class ColumnCountMismatch(ConllFormatError):
    """A token row has too few columns or disagrees with its sentence."""


class MalformedCorefTag(ConllFormatError):
    """A coreference cell holds something other than bracketed chain ids."""


class UnbalancedCorefBrackets(ConllFormatError):
    """A coreference mention is opened without being closed, or the reverse."""


class MalformedParseBit(ConllFormatError):
    """A parse bit does not carry exactly one ``*`` leaf placeholder."""


class NonUtf8Input(ConllFormatError):
    """Input bytes are not valid UTF-8."""


class InvariantViolation(ZeroCorefError):
    """An in-memory value breaks a documented invariant."""


class OnfFormatError(ZeroCorefError):
    """Malformed ONF coreference-chain listing."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MalformedChainHeader(OnfFormatError):
    """A ``Chain <id> (<KIND>)`` header or its block is malformed."""


class MalformedCoordinate(OnfFormatError):
    """A member coordinate is not of the form ``sentence.start-end``."""


class DuplicateChainId(OnfFormatError):
    """The same chain id appears twice in one ONF document."""


class MergeError(ZeroCorefError):
    """Failure while injecting ONF AZPs into a CoNLL document."""


class DocumentIdMismatch(MergeError):
    """ONF and CoNLL inputs describe different documents."""


class UnalignableMember(MergeError):
    """An ONF chain member cannot be located in the CoNLL document."""


class AmbiguousChainMatch(MergeError):
    """ONF chain members map into more than one CoNLL chain."""


class StalePlan(MergeError):
    """A merge plan is applied to a document it was not planned for."""


class FeatureError(ZeroCorefError):
    """Failure while computing AZP or cluster features."""


class NoOvertMention(FeatureError):
    """A cluster holds only AZPs and cannot be represented by a mention."""


class DimensionMismatch(FeatureError):
    """Embedding dimensions disagree with the configured layout."""


class ResolutionError(ZeroCorefError):
    """Failure inside the resolution harness."""


class ResolverContractViolation(ResolutionError):
    """A resolver returned ids or positions outside its allowed universe."""


class PluginError(ResolutionError):
    """An external resolver process failed."""


class PluginProcessError(PluginError):
    """The resolver process exited abnormally or timed out."""


class PluginProtocolError(PluginError):
    """The resolver process answered with an invalid message."""


class LossError(ZeroCorefError):
    """Invalid input to a training objective."""


class LengthMismatch(LossError):
    """Labels and probabilities differ in length."""


class EmptyInput(LossError):
    """A loss was asked to average over zero samples."""


class MissingGold(LossError):
    """A training instance has no gold candidate."""


class NormalizationError(LossError):
    """Candidate probabilities do not sum to one."""


class CliError(ZeroCorefError):
    """User-facing validation error raised by a CLI command."""


class ScoringError(ZeroCorefError):
    """Key and response cannot be scored together."""


class UnmatchedDocuments(ScoringError):
    """Key and response files hold different document ids."""
