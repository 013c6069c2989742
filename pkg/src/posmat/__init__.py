"""Exact and high-precision tools for structured positive matrices."""
from .matrix import Matrix, diag, from_csv, from_json, identity, ingest_matrix, to_csv, to_json
from .numerics import DEFAULT_PRECISION, FAIL, INDETERMINATE, PASS, DomainError, HPReal, gamma_hp
from .positivity import CheckReport

__all__ = [
    "CheckReport", "DEFAULT_PRECISION", "DomainError", "FAIL", "HPReal", "INDETERMINATE", "Matrix",
    "PASS", "diag", "from_csv", "from_json", "gamma_hp", "identity", "ingest_matrix", "to_csv", "to_json",
]
__version__ = "0.1.0"
