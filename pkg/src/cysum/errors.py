"""Exception types raised across the package."""


class CysumError(Exception):
    """Base class for all errors raised by cysum."""


class MalformedFile(CysumError, ValueError):
    """A dataset file does not follow the expected tagged layout."""


class BadHeader(CysumError, ValueError):
    """An embedding file does not start with a ``<count> <dim>`` header."""


class EmptyCorpus(CysumError, ValueError):
    pass


class EmptyDocument(CysumError, ValueError):
    pass


class NoReferences(CysumError, ValueError):
    pass


class ConfigError(CysumError, ValueError):
    """The requested evaluation or summarization setup cannot be satisfied."""
