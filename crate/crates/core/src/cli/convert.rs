//! Conversion of external result tables into the canonical layout.

use std::io::Read;

use crate::error::Result;
use crate::runstore::{self, IngestWarning, Schema};

pub struct Converted {
    /// Canonical dataset text.
    pub canonical: String,
    pub warnings: Vec<IngestWarning>,
    pub synthesized: usize,
}

/// Reads `source` through `mapping` and re-emits it canonically.
pub fn convert_official<R: Read>(source: R, mapping: &Schema) -> Result<Converted> {
    let ingested = runstore::ingest(source, mapping)?;
    Ok(Converted {
        canonical: runstore::canonical_string(&ingested.dataset),
        warnings: ingested.warnings,
        synthesized: ingested.synthesized,
    })
}
