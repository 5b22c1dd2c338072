"""Reserved IRIs and the configurable metadata vocabulary.

The nanopublication head IRIs are fixed. The three metadata predicates are
engine configuration: ``Vocabulary()`` gives the PROV defaults and every
field can be overridden (the CLI exposes ``--vocab-*`` flags for this).
See ``docs/vocabulary.md`` for the full table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Iri

RDF_TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")

NP_NAMESPACE = "http://www.nanopub.org/nschema#"
NANOPUBLICATION = Iri(NP_NAMESPACE + "Nanopublication")
HAS_ASSERTION = Iri(NP_NAMESPACE + "hasAssertion")
HAS_PROVENANCE = Iri(NP_NAMESPACE + "hasProvenance")
HAS_PUBLICATION_INFO = Iri(NP_NAMESPACE + "hasPublicationInfo")

HEAD_PREDICATES = frozenset({HAS_ASSERTION, HAS_PROVENANCE, HAS_PUBLICATION_INFO})

PROV_NAMESPACE = "http://www.w3.org/ns/prov#"
XSD_DATETIME = Iri("http://www.w3.org/2001/XMLSchema#dateTime")

# Reserved context keys injected by the publisher-side filter.
REQUESTER_KEY = "requester.iri"
ACTION_KEY = "action.id"


@dataclass(frozen=True, slots=True)
class Vocabulary:
    attribution: Iri = Iri(PROV_NAMESPACE + "wasAttributedTo")
    derivation: Iri = Iri(PROV_NAMESPACE + "wasDerivedFrom")
    published: Iri = Iri(PROV_NAMESPACE + "generatedAtTime")

    def predicates(self) -> frozenset[Iri]:
        return frozenset({self.attribution, self.derivation, self.published})


DEFAULT_VOCABULARY = Vocabulary()
