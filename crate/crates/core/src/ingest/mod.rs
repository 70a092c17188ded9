//! Dataset ingestion: official formats in, canonical [`GoldEntry`] values
//! out, plus reproducible sampling.

mod adapters;
mod entry;
mod sample;

use std::io::Read;

use thiserror::Error;

pub use adapters::LoadOptions;
pub use entry::{
    read_entries, write_entries, Answer, CanonicalError, Dataset, EntryError, GoldEntry, Passage,
    SentenceRef, UnknownDataset,
};
pub use sample::{sample, SampleError, SamplePlan, SampleRng};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("parse error in {item}: {message}")]
    Parse { item: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses one dataset's development-set file.
pub fn load<R: Read>(dataset: Dataset, source: R) -> Result<Vec<GoldEntry>, IngestError> {
    load_with(dataset, source, LoadOptions::default())
}

pub fn load_with<R: Read>(
    dataset: Dataset,
    mut source: R,
    options: LoadOptions,
) -> Result<Vec<GoldEntry>, IngestError> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    match dataset {
        Dataset::MSMarco => adapters::load_msmarco(&buf),
        Dataset::HotpotQA => adapters::load_hotpotqa(&buf),
        Dataset::ReCoRd => adapters::load_record(&buf),
        Dataset::MultiRC => adapters::load_multirc(&buf),
        Dataset::NewsQA => adapters::load_newsqa(&buf, options),
        Dataset::DROP => adapters::load_drop(&buf),
    }
}
