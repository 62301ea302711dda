"""Provider-aware initial data analysis for multi-source registry exports.

The toolkit loads CSV bundles described by a schema config, computes
provider-adjusted missingness statistics (counts, per-row proportions,
influx and outflux), explains missingness structure with regression
trees using surrogate splits, measures cross-provider consistency of
multi-sourced variables, derives event-time outcomes under alternative
provider-combination rules with Kaplan-Meier estimation, and generates
synthetic bundles with known ground truth for validation.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, RegistryIdaError
from .model import ColumnMeta, RegistryTable
from .schema import SchemaConfig, load_schema

__all__ = [
    "ColumnMeta",
    "ConfigError",
    "DataError",
    "RegistryIdaError",
    "RegistryTable",
    "SchemaConfig",
    "load_schema",
    "__version__",
]
