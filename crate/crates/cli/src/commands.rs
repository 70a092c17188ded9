use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use mrc_audit::cuebaseline::{
    entry_features, loo_by_dataset, loo_evaluate, AnnotatedEntry, ClassWeight, EvalConfig, FitConfig,
};
use mrc_audit::ingest::{self, read_entries, write_entries, GoldEntry, LoadOptions, SamplePlan};
use mrc_audit::schema::{read_records, validate as validate_record, AnnotationRecord};
use mrc_audit::scoring::{aggregate_by_dataset, agreement as agreement_report};
use mrc_audit::textlex::{FeatureConfig, FeatureVector, TokenizerConfig};
use serde_json::json;
use workbench::{App, Store, TokenTable};

use crate::manifest::{emit, RunManifest};
use crate::render;
use crate::{
    AgreementArgs, BaselineArgs, ClassWeightArg, FeaturesArgs, Format, IngestArgs, ReportArgs, SampleArgs, ServeArgs,
    TextArgs, ValidateArgs,
};

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn load_entries(path: &Path) -> Result<Vec<GoldEntry>> {
    read_entries(open(path)?).with_context(|| format!("reading entries from {}", path.display()))
}

fn load_records(path: &Path, annotator: Option<&str>) -> Result<Vec<AnnotationRecord>> {
    let mut records = read_records(open(path)?).with_context(|| format!("reading records from {}", path.display()))?;
    if let Some(a) = annotator {
        records.retain(|r| r.annotator_id == a);
    }
    Ok(records)
}

fn json_bytes(v: &impl serde::Serialize) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

impl TextArgs {
    fn tokenizer(&self) -> TokenizerConfig {
        TokenizerConfig { lowercase: !self.keep_case }
    }

    fn features(&self) -> FeatureConfig {
        FeatureConfig { remove_stopwords: self.remove_stopwords }
    }
}

pub fn ingest(args: IngestArgs) -> Result<ExitCode> {
    let options = LoadOptions { all_splits: args.all_splits };
    let entries = ingest::load_with(args.dataset.dataset(), open(&args.input)?, options)
        .with_context(|| format!("ingesting {}", args.input.display()))?;
    info!("ingested {} entries", entries.len());
    let mut out = Vec::new();
    write_entries(&mut out, &entries)?;
    let manifest = RunManifest::new("ingest", &args, &[&args.input], None)?;
    emit(args.output.as_deref(), &out, &manifest)?;
    Ok(ExitCode::SUCCESS)
}

pub fn sample(args: SampleArgs) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let plan = SamplePlan {
        dataset: args.dataset.map(|d| d.dataset()),
        n: args.n,
        seed: args.seed,
        unique_paragraphs: !args.allow_shared_paragraphs,
    };
    let picked = ingest::sample(&entries, &plan)?;
    let mut out = Vec::new();
    write_entries(&mut out, &picked)?;
    let manifest = RunManifest::new("sample", &args, &[&args.entries], Some(args.seed))?;
    emit(args.output.as_deref(), &out, &manifest)?;
    Ok(ExitCode::SUCCESS)
}

pub fn serve(args: ServeArgs) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let tokens = TokenTable::load(&args.tokens)?;
    let store = Store::open(&args.log)?;
    info!("replayed {} events from {}", store.events().len(), args.log.display());
    let app = Arc::new(App::new(entries, tokens, store)?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&args.addr)
            .await
            .with_context(|| format!("binding {}", args.addr))?;
        let addr = listener.local_addr()?;
        let mut out = std::io::stdout().lock();
        writeln!(out, "{addr}")?;
        out.flush()?;
        drop(out);
        info!("serving on http://{addr}");
        workbench::serve(listener, app).await?;
        Ok(ExitCode::SUCCESS)
    })
}

pub fn validate(args: ValidateArgs, format: Format) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let by_id: BTreeMap<&str, &GoldEntry> = entries.iter().map(|e| (e.id.as_str(), e)).collect();
    let records = load_records(&args.records, None)?;
    let mut results = Vec::with_capacity(records.len());
    for r in &records {
        let entry = by_id.get(r.entry_id.as_str()).with_context(|| format!("record for unknown entry `{}`", r.entry_id))?;
        results.push((r, validate_record(r, entry)?));
    }
    let failed = results.iter().filter(|(_, v)| !v.is_valid()).count();
    let out = match format {
        Format::Table => render::validation_table(&results).into_bytes(),
        Format::Machine => {
            let mut out = Vec::new();
            for (r, v) in &results {
                let line = json!({
                    "entry_id": r.entry_id,
                    "annotator_id": r.annotator_id,
                    "valid": v.is_valid(),
                    "errors": v.errors,
                    "warnings": v.warnings,
                });
                serde_json::to_writer(&mut out, &line)?;
                out.push(b'\n');
            }
            out
        }
    };
    let manifest = RunManifest::new("validate", &args, &[&args.entries, &args.records], None)?;
    emit(args.output.as_deref(), &out, &manifest)?;
    if failed > 0 {
        eprintln!("{failed} of {} records failed validation", results.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn features(args: FeaturesArgs, format: Format) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let facts: Option<BTreeMap<String, AnnotatedEntry>> = match &args.records {
        Some(p) => {
            let records = load_records(p, None)?;
            let pairs = AnnotatedEntry::pair(&entries, &records, args.annotator.as_deref());
            Some(pairs.into_iter().map(|a| (a.entry.id.clone(), a)).collect())
        }
        None => None,
    };
    let mut out = Vec::new();
    if format == Format::Table {
        let mut header = vec!["entry_id", "passage", "sentence"];
        header.extend(FeatureVector::NAMES);
        if facts.is_some() {
            header.push("supporting");
        }
        writeln!(out, "{}", header.join("\t"))?;
    }
    for e in &entries {
        let annotated = match &facts {
            Some(f) => match f.get(&e.id) {
                Some(a) => Some(a),
                None => continue,
            },
            None => None,
        };
        let vectors = entry_features(e, args.text.tokenizer(), args.text.features());
        for (r, v) in e.sentence_refs().into_iter().zip(vectors) {
            let supporting = annotated.map(|a| a.supporting_facts.contains(&r));
            match format {
                Format::Table => {
                    let mut cells = vec![e.id.clone(), r.passage.to_string(), r.sentence.to_string()];
                    cells.extend(render::feature_cells(&v));
                    if let Some(s) = supporting {
                        cells.push(u8::from(s).to_string());
                    }
                    writeln!(out, "{}", cells.join("\t"))?;
                }
                Format::Machine => {
                    let mut line = json!({ "entry_id": e.id, "sentence": r, "features": v });
                    if let Some(s) = supporting {
                        line["supporting"] = json!(s);
                    }
                    serde_json::to_writer(&mut out, &line)?;
                    out.push(b'\n');
                }
            }
        }
    }
    let mut inputs = vec![args.entries.as_path()];
    inputs.extend(args.records.as_deref());
    let manifest = RunManifest::new("features", &args, &inputs, None)?;
    emit(args.output.as_deref(), &out, &manifest)?;
    Ok(ExitCode::SUCCESS)
}

pub fn baseline(args: BaselineArgs, format: Format) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let records = load_records(&args.records, None)?;
    let sample = AnnotatedEntry::pair(&entries, &records, args.annotator.as_deref());
    if sample.is_empty() {
        bail!("no entry in {} has a matching record", args.entries.display());
    }
    let config = EvalConfig {
        fit: FitConfig {
            learning_rate: args.learning_rate,
            iterations: args.iterations,
            l2: args.l2,
            seed: args.seed,
            shuffle: !args.no_shuffle,
            class_weight: match args.class_weight {
                ClassWeightArg::None => ClassWeight::None,
                ClassWeightArg::Balanced => ClassWeight::Balanced,
            },
        },
        runs: args.runs,
        tokenizer: args.text.tokenizer(),
        features: args.text.features(),
    };
    let rows: Vec<(String, _)> = if args.pooled {
        vec![("all".to_string(), loo_evaluate(&sample, &config)?)]
    } else {
        loo_by_dataset(&sample, &config)?.into_iter().map(|(d, s)| (d.name().to_string(), s)).collect()
    };
    for (name, s) in &rows {
        if !s.excluded.is_empty() {
            warn!("{name}: {} entries without supporting facts were not scored", s.excluded.len());
        }
    }
    let out = match format {
        Format::Table => render::baseline_table(&rows).into_bytes(),
        Format::Machine => {
            let results: Vec<_> = rows.iter().map(|(d, s)| json!({ "dataset": d, "scores": s })).collect();
            json_bytes(&json!({ "config": config, "results": results }))?
        }
    };
    let manifest = RunManifest::new("baseline", &args, &[&args.entries, &args.records], Some(args.seed))?;
    emit(args.output.as_deref(), &out, &manifest)?;
    Ok(ExitCode::SUCCESS)
}

pub fn agreement(args: AgreementArgs, format: Format) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let mut records = Vec::new();
    for p in &args.records {
        records.extend(load_records(p, None)?);
    }
    let pick = |who: &str| -> Vec<AnnotationRecord> {
        records.iter().filter(|r| r.annotator_id == who).cloned().collect()
    };
    let report = agreement_report(&pick(&args.first), &pick(&args.second), &entries)?;
    let out = match format {
        Format::Table => render::agreement_table(&report).into_bytes(),
        Format::Machine => json_bytes(&report)?,
    };
    let mut inputs = vec![args.entries.as_path()];
    inputs.extend(args.records.iter().map(|p| p.as_path()));
    let manifest = RunManifest::new("agreement", &args, &inputs, None)?;
    emit(args.output.as_deref(), &out, &manifest)?;
    Ok(ExitCode::SUCCESS)
}

pub fn report(args: ReportArgs, format: Format) -> Result<ExitCode> {
    let entries = load_entries(&args.entries)?;
    let records = load_records(&args.records, args.annotator.as_deref())?;
    let reports = aggregate_by_dataset(&records, &entries)?;
    let out = match format {
        Format::Table => render::report_table(&reports).into_bytes(),
        Format::Machine => json_bytes(&reports)?,
    };
    let manifest = RunManifest::new("report", &args, &[&args.entries, &args.records], None)?;
    emit(args.output.as_deref(), &out, &manifest)?;
    if let Some(chart) = &args.chart {
        emit(Some(chart), render::chart_series(&reports).as_bytes(), &manifest)?;
    }
    Ok(ExitCode::SUCCESS)
}
