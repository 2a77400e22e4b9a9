//! Library side of the `lrhub` command: pipeline, evaluation harness and
//! statistics, kept callable from tests.

pub mod config;
pub mod eval;
pub mod histogram;
pub mod pipeline;

pub use config::{PipelineConfig, Source, SourceFormat};
pub use eval::{run_eval, EvalQuerySet, EvalReport, EvalRow, Judgment, Mode, RowStatus};
pub use histogram::{language_histogram, LanguageBucket};
pub use pipeline::{build, ingest_source, run_pipeline, PipelineRun};
