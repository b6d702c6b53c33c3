//! Competition result data: model, ingestion and canonical output.

mod ingest;
mod model;

pub use ingest::{
    canonical_string, ingest, ingest_path, write_canonical, ColumnSpec, Columns, Defaults, Schema, TimeUnit,
    CANONICAL_COLUMNS,
};
pub use model::{
    solver_set, Dataset, DatasetBuilder, IngestWarning, Ingested, InstanceMeta, ProblemKind, RunRecord,
    SolverMeta, SolverSet, Status, WarningKind,
};
