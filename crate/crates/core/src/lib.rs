pub mod rdf;
pub mod catalog;
pub mod harmonize;
pub mod ingest;
pub mod dedup;
pub mod store;
pub mod sparql;
