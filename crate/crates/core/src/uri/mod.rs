//! URI origins, labels, identifier variants and semantic mismatch.

mod catalog;
mod labels;
mod mismatch;
mod variants;

pub use catalog::{
    load_labels, CatalogEntry, CatalogError, NamespacePattern, Origin, OriginCatalog, OriginKind,
    OriginMatch, STARTER_CATALOG,
};
pub use labels::{extract_label, label_from_local_name, LabelEndpoint, LabelMethod, LabeledUri};
pub use mismatch::{
    detect_semantic_mismatch, detect_semantic_mismatch_with_threshold, instance_pattern_links,
    mismatch_tsv, pattern_prefix, MismatchReason, MismatchRecord, PatternLink,
    DEFAULT_MISMATCH_THRESHOLD,
};
pub use variants::{detect_uri_variants, variant_groups_tsv, VariantGroup, VariantMember};
