from privlabel.ingest.fetch import HostRateLimiter, RawDocument, fetch_with_backoff, load_snapshot
from privlabel.ingest.html import CleanDocument, TextBlock, extract_readable
from privlabel.ingest.records import (
    AnnotatedCorpus,
    AnnotatedSegment,
    AppMetadata,
    DeclaredLabel,
    LabelTriple,
    load_annotated_corpus,
    load_declared_labels,
    load_metadata,
    parse_app_metadata,
    parse_declared_label,
    serialize_declared_label,
)
from privlabel.ingest.segment import Segment, Sentence, segment_document, split_sentences, tokenize

__all__ = [
    "AnnotatedCorpus", "AnnotatedSegment", "AppMetadata", "CleanDocument",
    "DeclaredLabel", "HostRateLimiter", "LabelTriple", "RawDocument", "Segment",
    "Sentence", "TextBlock", "extract_readable", "fetch_with_backoff",
    "load_annotated_corpus", "load_declared_labels", "load_metadata",
    "load_snapshot", "parse_app_metadata", "parse_declared_label",
    "segment_document", "serialize_declared_label", "split_sentences", "tokenize",
]
