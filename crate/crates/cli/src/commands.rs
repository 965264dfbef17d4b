use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use namerace_core::audit::{
    dirichlet_sample, model_snapshot, standard_models, threshold_grid, threshold_sweep,
    weight_grid, write_snapshot_csv, write_sweep_csv,
};
use namerace_core::inference::{
    distinct_names, infer_corpus, read_authors, write_inferences_csv, AuthorRecord, Tables,
};
use namerace_core::ingest::{
    apply_expansion, compute_expansion_factors, ExpansionFactors, IngestReport, ReferenceTable,
    RowError, TableKind,
};
use namerace_core::CategoryDistribution;
use serde::Serialize;

use crate::config::{Manifest, Preset, RunConfig, TableSource};

/// Seed offset separating the family-name samples from the given-name ones.
const FAMILY_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// What a finished command reports back for the exit status.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    /// Rows skipped in any input file.
    pub row_errors: usize,
}

struct Writer<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir,
            outcome: Outcome::default(),
        })
    }

    fn file(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>,
    ) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        let f = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        let mut w = BufWriter::new(f);
        body(&mut w)?;
        w.flush()?;
        self.outcome.outputs.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        self.file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    fn finish(mut self, command: &str, cfg: &RunConfig) -> anyhow::Result<Outcome> {
        let manifest = Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            outputs: self
                .outcome
                .outputs
                .iter()
                .filter_map(|p| p.file_name())
                .map(|n| n.to_string_lossy().into_owned())
                .collect(),
            row_errors: self.outcome.row_errors,
        };
        self.json(&format!("{command}_manifest.json"), &manifest)?;
        Ok(self.outcome)
    }
}

struct Loaded {
    tables: Tables,
    reports: Vec<(&'static str, IngestReport)>,
    expansion: Option<Expansion>,
}

#[derive(Serialize)]
struct Expansion {
    factors: ExpansionFactors,
    target: CategoryDistribution,
    aggregate: CategoryDistribution,
    entries: usize,
}

fn ingest_one(
    source: &TableSource,
    fallback: Preset,
    kind: TableKind,
) -> anyhow::Result<(ReferenceTable, IngestReport)> {
    let schema = source.resolved_schema(fallback);
    schema.validate()?;
    let f = File::open(&source.path)
        .with_context(|| format!("cannot open {}", source.path.display()))?;
    ReferenceTable::ingest(BufReader::new(f), &schema, kind)
        .with_context(|| format!("cannot ingest {}", source.path.display()))
}

fn load_tables(cfg: &RunConfig) -> anyhow::Result<Loaded> {
    let mut out = Loaded {
        tables: Tables::default(),
        reports: Vec::new(),
        expansion: None,
    };
    if let Some(src) = &cfg.family {
        let (t, r) = ingest_one(src, Preset::CensusSurnames, TableKind::Family)?;
        out.tables.family = Some(t);
        out.reports.push(("family", r));
    }
    if let Some(src) = &cfg.given {
        let (t, r) = ingest_one(src, Preset::MortgageGivenNames, TableKind::Given)?;
        out.tables.given = Some(t);
        out.reports.push(("given", r));
    }
    if cfg.normalize_given {
        if let (Some(fam), Some(giv)) = (&out.tables.family, &out.tables.given) {
            let factors = compute_expansion_factors(giv, fam.aggregate())?;
            let expanded = apply_expansion(giv, &factors)?;
            out.expansion = Some(Expansion {
                factors,
                target: *fam.aggregate(),
                aggregate: *expanded.aggregate(),
                entries: expanded.len(),
            });
            out.tables.given_normalized = Some(expanded);
        }
    }
    Ok(out)
}

fn table_row_errors(reports: &[(&str, IngestReport)]) -> usize {
    reports
        .iter()
        .map(|(_, r)| r.rows_rejected + r.rows_unusable)
        .sum()
}

fn load_authors(cfg: &RunConfig) -> anyhow::Result<(Vec<AuthorRecord>, Vec<RowError>)> {
    let src = cfg
        .authors
        .as_ref()
        .ok_or_else(|| anyhow!("no author corpus configured"))?;
    let f = File::open(&src.path).with_context(|| format!("cannot open {}", src.path.display()))?;
    let out = read_authors(BufReader::new(f), &src.columns)
        .with_context(|| format!("cannot read {}", src.path.display()))?;
    let authors = if src.distinct_names {
        distinct_names(&out.authors)
    } else {
        out.authors
    };
    if authors.is_empty() {
        return Err(namerace_core::Error::EmptyCorpus.into());
    }
    Ok((authors, out.errors))
}

pub fn ingest(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    if cfg.family.is_none() && cfg.given.is_none() {
        return Err(anyhow!(
            "nothing to ingest: configure a family or given table"
        ));
    }
    let loaded = load_tables(cfg)?;
    let mut w = Writer::new(&cfg.out_dir)?;
    for (label, report) in &loaded.reports {
        let table = match *label {
            "family" => loaded.tables.family.as_ref(),
            _ => loaded.tables.given.as_ref(),
        }
        .expect("report implies table");
        w.file(&format!("{label}_table.csv"), |f| Ok(table.write_csv(f)?))?;
        w.json(&format!("{label}_report.json"), report)?;
    }
    if let (Some(t), Some(e)) = (&loaded.tables.given_normalized, &loaded.expansion) {
        w.file("given_normalized_table.csv", |f| Ok(t.write_csv(f)?))?;
        w.json("given_normalized_report.json", e)?;
    }
    w.outcome.row_errors = table_row_errors(&loaded.reports);
    w.finish("ingest", cfg)
}

#[derive(Serialize)]
struct InferOutput<'a> {
    strategy: &'static str,
    #[serde(flatten)]
    summary: namerace_core::inference::InferenceSummary,
    author_row_errors: &'a [RowError],
}

pub fn infer(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let loaded = load_tables(cfg)?;
    let (authors, errors) = load_authors(cfg)?;
    let run = infer_corpus(&authors, &loaded.tables, &cfg.inference)?;
    let mut w = Writer::new(&cfg.out_dir)?;
    w.file("inferences.csv", |f| {
        Ok(write_inferences_csv(f, &run.inferences)?)
    })?;
    w.json(
        "summary.json",
        &InferOutput {
            strategy: cfg.inference.strategy.as_str(),
            summary: run.summary(),
            author_row_errors: &errors,
        },
    )?;
    w.outcome.row_errors = errors.len() + table_row_errors(&loaded.reports);
    w.finish("infer", cfg)
}

pub fn sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let grid = threshold_grid(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.step)?;
    let loaded = load_tables(cfg)?;
    let (authors, errors) = load_authors(cfg)?;
    let models = if cfg.sweep.models.is_empty() {
        standard_models(cfg.sweep.weight)
    } else {
        cfg.sweep.models.clone()
    };
    let rows = threshold_sweep(&authors, &loaded.tables, &models, &grid)?;
    let mut w = Writer::new(&cfg.out_dir)?;
    w.file("sweep.csv", |f| Ok(write_sweep_csv(f, &rows)?))?;
    w.outcome.row_errors = errors.len() + table_row_errors(&loaded.reports);
    w.finish("sweep", cfg)
}

pub fn snapshot(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let loaded = load_tables(cfg)?;
    let (authors, errors) = load_authors(cfg)?;
    let models = if cfg.snapshot.models.is_empty() {
        standard_models(cfg.snapshot.weight)
    } else {
        cfg.snapshot.models.clone()
    };
    let entries = model_snapshot(&authors, &loaded.tables, &models, cfg.snapshot.threshold)?;
    let mut w = Writer::new(&cfg.out_dir)?;
    w.file("snapshot.csv", |f| Ok(write_snapshot_csv(f, &entries)?))?;
    w.outcome.row_errors = errors.len() + table_row_errors(&loaded.reports);
    w.finish("snapshot", cfg)
}

pub fn simulate(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let sim = &cfg.simulate;
    let alpha = sim.alpha.expand();
    let given = dirichlet_sample(sim.k, alpha, cfg.seed)?;
    let family = dirichlet_sample(sim.k, alpha, cfg.seed ^ FAMILY_SEED_SALT)?;
    let grid = weight_grid(&given, &family, &sim.weight)?;
    let mut w = Writer::new(&cfg.out_dir)?;
    w.file("grid.csv", |f| Ok(grid.write_csv(f)?))?;
    w.finish("simulate", cfg)
}
