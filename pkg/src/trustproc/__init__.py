"""Provenance-aware trust filtering of claims packaged as nanopublications."""

from .chain import (
    Blocker,
    ChainResolver,
    ChainResult,
    EvidenceGraph,
    UnknownClaim,
    build_evidence_graph,
    resolve_all,
    resolve_chain,
)
from .claims import (
    AmbiguousSource,
    ClaimMeta,
    MalformedTimestamp,
    Nanopublication,
    Violation,
    extract_meta,
    validate_nanopub,
)
from .engine import (
    Context,
    Decision,
    MissingRequester,
    PolicyInvalid,
    TrustedData,
    evaluate_claim,
    explain,
    filter,
    publish_filter,
)
from .nquads import DocumentSyntaxError, parse_nquads, serialize_nquads
from .policy import AgentSet, ParseError, Policy, check_policy, parse_policy, print_policy
from .store import IngestReport, Pattern, Snapshot, Store, ValidationFailed, query, snapshot
from .terms import BlankNode, InvalidIri, Iri, Literal, Quad, canonicalize_iri
from .vocab import DEFAULT_VOCABULARY, Vocabulary

__version__ = "0.1.0"
