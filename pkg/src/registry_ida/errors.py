"""Exception hierarchy for the registry IDA toolkit.

Two broad families: configuration problems (bad schema, unknown
columns, contradictory settings) and data problems (files that do not
match the schema, cells that cannot be parsed, cohorts that end up
empty).  The CLI maps ConfigError to exit code 2 and DataError to exit
code 3; anything else is an internal error (exit code 4).
"""


class RegistryIdaError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(RegistryIdaError):
    """The schema or run configuration is invalid."""


class DataError(RegistryIdaError):
    """The data does not conform to the schema or is unusable."""


class InvalidConfig(ConfigError):
    """A configuration document is malformed or self-contradictory."""


class UnknownColumn(ConfigError):
    """A configuration entry names a column the schema does not declare."""


class UnknownProvider(ConfigError):
    """A configuration entry names a provider the schema does not declare."""


class DuplicateColumn(ConfigError):
    """The same column name is declared more than once for a table."""


class ConflictingGroup(ConfigError):
    """A column is claimed by more than one multi-source group."""


class UnknownFilterColumn(ConfigError):
    """A cohort filter references a column the table does not declare."""


class FileMissing(DataError):
    """An expected delimited file is absent from the bundle."""


class HeaderMismatch(DataError):
    """A file header does not match the declared column set."""


class RaggedRow(DataError):
    """A data row has a different cell count than the header."""


class CellParseError(DataError):
    """A non-empty cell cannot be parsed as its declared type."""

    def __init__(self, table: str, column: str, row: int, text: str, reason: str):
        self.table = table
        self.column = column
        self.row = row
        self.text = text
        self.reason = reason
        super().__init__(
            f"{table}.{column} row {row}: cannot parse {text!r} ({reason})"
        )


class EmptyProviderIndex(DataError):
    """A provider observes no rows at all, so its denominators vanish."""


class RowOutsideProviderIndex(DataError):
    """A per-row statistic was requested outside the provider's rows."""


class NoSharedRows(DataError):
    """Two columns are never observed in the same row."""


class NoUsableFeatures(DataError):
    """No column passes the feature filter for tree fitting."""


class NoMissingTarget(DataError):
    """The tree target is constant because no provider cell is missing."""


class EmptyCohort(DataError):
    """A cohort filter or outcome assembly removed every recipient."""


class ProviderMismatch(ConfigError):
    """Two columns expected to share a provider do not."""
