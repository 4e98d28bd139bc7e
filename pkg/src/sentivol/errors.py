"""Exception hierarchy.

``DataError`` subclasses signal bad inputs (CLI exit code 1), ``ConfigError``
signals a bad configuration (exit code 2).
"""


class SentivolError(Exception):
    pass


class DataError(SentivolError):
    pass


class ConfigError(SentivolError):
    pass


class IoFailure(DataError):
    pass


# corpus
class EmptyPost(DataError):
    pass


class EmptyCorpus(DataError):
    pass


# sentiment
class DimensionMismatch(DataError):
    pass


class EmptyDataset(DataError):
    pass


class UnlabeledPost(DataError):
    pass


class DegenerateLabels(DataError):
    pass


# indicators
class DomainError(DataError, ValueError):
    pass


class IndexOutOfRange(DataError, IndexError):
    pass


class EmptyCalendar(DataError):
    pass


# market
class NonPositivePrice(DataError, ValueError):
    pass


class DegenerateRange(DataError, ValueError):
    pass


class EmptyIntersection(DataError):
    pass


class DuplicateDate(DataError):
    pass


# evaluation
class LengthMismatch(DataError, ValueError):
    pass


class EmptyVector(DataError, ValueError):
    pass


class InsufficientData(DataError):
    pass


class MissingCell(DataError):
    pass


class DegenerateSeries(DataError, ValueError):
    pass


# ingestion / synthesis
class NoValidPosts(DataError):
    pass


class InvalidSpec(ConfigError):
    pass
