"""Fairness self-reporting toolkit: metrics engine, audit artifacts, registry.

The package has three layers. The engine computes group-fairness criteria,
distribution divergences, subgroup slices, permutation tests, and drift over
labeled datasets. The audit layer wraps results into canonical, digestable,
certifiable report documents chained into a tamper-evident ledger. The
registry serves the public record over HTTP, and the CLI ties the layers
together for vendors and auditors.
"""

from .audit import (
    CANONICAL_DISCLAIMER,
    AuditEvent,
    AuditReport,
    build_audit_report,
    record_audit,
    with_boc,
)
from .canonical import INF, canonical_bytes, canonical_digest, canonical_dumps, sha256_hex
from .crypto import (
    BOC,
    EncryptedSnapshotInfo,
    decrypt_snapshot,
    encrypt_snapshot,
    generate_secret_key,
    generate_signing_key,
    issue_boc,
    verify_boc,
)
from .dataset import (
    EMPTY_FILTER,
    UNSPECIFIED,
    LabeledDataset,
    LabeledRecord,
    SliceFilter,
    load_dataset_csv,
    subsample,
    threshold_predictions,
)
from .divergence import DivergenceResult, attribute_distribution, divergence
from .errors import FairlensError
from .ledger import GENESIS_PREV_HASH, ChainVerification, Ledger, LedgerEntry, verify_chain
from .metrics import (
    AWARENESS,
    DEMOGRAPHIC_PARITY,
    EQUALIZED_ODDS,
    EQUALIZED_OPPORTUNITY,
    GROUPED_CRITERIA,
    UNAWARENESS,
    AwarenessConfig,
    ConfusionCounts,
    CustomCriterion,
    GroupMetrics,
    LipschitzCheckResult,
    MetricResult,
    UnawarenessResult,
    awareness_check,
    confusion,
    custom_metric,
    demographic_parity,
    equalized_odds,
    equalized_opportunity,
    group_metrics,
    unawareness_check,
)
from .permutation import PermutationTestResult, permutation_test
from .report import (
    ENGINE_VERSION,
    DriftResult,
    EngineConfig,
    FairnessReport,
    compute_report,
    drift,
)
from .slicing import SliceEnumeration, dataset_slices, enumerate_slices

__version__ = ENGINE_VERSION

# The seven legally protected attribute classes used throughout the examples.
PROTECTED_ATTRIBUTE_CLASSES = (
    "race_and_color",
    "religion",
    "sex",
    "national_origin",
    "age",
    "disability",
    "genetic_information",
)

__all__ = [
    "AWARENESS",
    "AuditEvent",
    "AuditReport",
    "AwarenessConfig",
    "BOC",
    "CANONICAL_DISCLAIMER",
    "ChainVerification",
    "ConfusionCounts",
    "CustomCriterion",
    "DEMOGRAPHIC_PARITY",
    "DivergenceResult",
    "DriftResult",
    "EMPTY_FILTER",
    "ENGINE_VERSION",
    "EQUALIZED_ODDS",
    "EQUALIZED_OPPORTUNITY",
    "EncryptedSnapshotInfo",
    "EngineConfig",
    "FairlensError",
    "FairnessReport",
    "GENESIS_PREV_HASH",
    "GROUPED_CRITERIA",
    "GroupMetrics",
    "INF",
    "LabeledDataset",
    "LabeledRecord",
    "Ledger",
    "LedgerEntry",
    "LipschitzCheckResult",
    "MetricResult",
    "PROTECTED_ATTRIBUTE_CLASSES",
    "PermutationTestResult",
    "SliceEnumeration",
    "SliceFilter",
    "UNAWARENESS",
    "UNSPECIFIED",
    "UnawarenessResult",
    "attribute_distribution",
    "awareness_check",
    "build_audit_report",
    "canonical_bytes",
    "canonical_digest",
    "canonical_dumps",
    "compute_report",
    "confusion",
    "custom_metric",
    "dataset_slices",
    "decrypt_snapshot",
    "demographic_parity",
    "divergence",
    "drift",
    "encrypt_snapshot",
    "enumerate_slices",
    "equalized_odds",
    "equalized_opportunity",
    "generate_secret_key",
    "generate_signing_key",
    "group_metrics",
    "issue_boc",
    "load_dataset_csv",
    "permutation_test",
    "record_audit",
    "sha256_hex",
    "subsample",
    "threshold_predictions",
    "unawareness_check",
    "verify_boc",
    "verify_chain",
    "with_boc",
    "__version__",
]
