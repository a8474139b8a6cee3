"""Exception types shared across the toolkit."""


class CorpusDivError(Exception):
    """Base class for all corpusdiv errors."""


class CorpusFormatError(CorpusDivError, ValueError):
    """Malformed input data: bad UTF-8, wrong column layout, bad header."""


class EmptyCorpusError(CorpusDivError, ValueError):
    """A loader or metric received a corpus with no usable tokens."""


class AnnotationLevelError(CorpusDivError, ValueError):
    """An operation that needs lemma annotations got a surface-only corpus."""


class MetricInputError(CorpusDivError, ValueError):
    """Metric preconditions not met, e.g. empty reference table or no
    distribution with a positive count total."""
