"""Uniform, rate-limited access to heterogeneous biomedical KG services."""
from biokgr.federation.descriptors import (
    QuerySpec,
    RetryPolicy,
    SourceDescriptor,
    default_registry,
)
from biokgr.federation.ratelimit import RateLimiter, SystemClock
from biokgr.federation.client import (
    AuthMissing,
    FederationError,
    FetchRequest,
    KgClient,
    RequestFailed,
    SourceUnavailable,
)
from biokgr.federation.queries import (
    RELATION_PREDICATES,
    UnknownPredicate,
    UnsupportedEntityType,
    build_boolean_query,
)
from biokgr.federation.unified import (
    AllSourcesFailed,
    Federation,
    FetchResult,
    InvalidQuery,
    SourceStatus,
    UnifiedRecord,
)
from biokgr.federation.persist import WorkspaceUnavailable, load_records, persist_results

__all__ = [
    "QuerySpec",
    "RetryPolicy",
    "SourceDescriptor",
    "default_registry",
    "RateLimiter",
    "SystemClock",
    "AuthMissing",
    "FederationError",
    "FetchRequest",
    "KgClient",
    "RequestFailed",
    "SourceUnavailable",
    "RELATION_PREDICATES",
    "UnknownPredicate",
    "UnsupportedEntityType",
    "build_boolean_query",
    "AllSourcesFailed",
    "Federation",
    "FetchResult",
    "InvalidQuery",
    "SourceStatus",
    "UnifiedRecord",
    "WorkspaceUnavailable",
    "load_records",
    "persist_results",
]
