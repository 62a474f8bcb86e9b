use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

use oovrank_core::corpus::Split;
use oovrank_core::eval::{
    default_cutoffs, evaluate as eval_metrics, report_diff, DocTargets, EvalReport, RankedList,
};

use super::{load_prepared, load_vocabulary, Ctx};
use crate::layout::{header_value, read_jsonl, write_text};

/// Evaluate ranked-list files into Recall@N / MAP@N report CSVs; with
/// exactly two inputs also emit their difference report.
pub fn evaluate(ctx: &Ctx, files: &[std::path::PathBuf]) -> Result<()> {
    if files.is_empty() {
        bail!("evaluate needs at least one ranked-list file");
    }
    let mut reports = Vec::new();
    for file in files {
        let report = eval_one(ctx, file)?;
        let out = ctx
            .layout
            .reports_dir()
            .join(format!("{}.eval.csv", stem(file)));
        write_report(ctx, &out, &report)?;
        println!(
            "{}: n_docs={} retrievable={}/{} -> {}",
            report.method,
            report.n_docs,
            report.n_targets_retrievable,
            report.n_targets_total,
            out.display()
        );
        print_summary(&report);
        reports.push(report);
    }
    if let [a, b] = &reports[..] {
        let diff = report_diff(a, b)?;
        let out = ctx
            .layout
            .reports_dir()
            .join(format!("diff_{}_minus_{}.csv", stem(&files[1]), stem(&files[0])));
        write_report(ctx, &out, &diff)?;
        println!("diff ({} - {}) -> {}", b.method, a.method, out.display());
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.strip_suffix(".jsonl").unwrap_or(&name).to_string()
}

fn eval_one(ctx: &Ctx, file: &Path) -> Result<EvalReport> {
    let (header, lists) = read_jsonl::<RankedList>(file)?;
    let split = header_value(&header, "split")
        .ok_or_else(|| anyhow::anyhow!("{}: no `split` header; not a ranked-list file?", file.display()))?;
    let split = Split::from_str(split)?;
    let method = header_value(&header, "method").unwrap_or("unknown").to_string();

    let prepared = load_prepared(ctx, split)?;
    let by_id: HashMap<&str, &super::PreparedRecord> =
        prepared.iter().map(|r| (r.doc.id.as_str(), r)).collect();
    let mut targets = Vec::with_capacity(lists.len());
    for list in &lists {
        let rec = by_id.get(list.doc_id.as_str()).with_context(|| {
            format!(
                "{}: document `{}` not in the prepared {} split",
                file.display(),
                list.doc_id,
                split.name()
            )
        })?;
        targets.push(DocTargets::new(
            rec.doc.targets().collect(),
            rec.targets_total,
        ));
    }

    let vocab = load_vocabulary(ctx)?;
    let cutoffs = match &ctx.config.eval.cutoffs {
        Some(c) => c.clone(),
        None => default_cutoffs(vocab.n_oov()),
    };
    Ok(eval_metrics(method, &lists, &targets, &cutoffs)?)
}

fn write_report(ctx: &Ctx, path: &Path, report: &EvalReport) -> Result<()> {
    let mut text = String::new();
    for (k, v) in ctx.header() {
        text.push_str(&format!("# {k}={v}\n"));
    }
    text.push_str(&report.to_csv());
    write_text(path, &text)
}

fn print_summary(report: &EvalReport) {
    let take = report.cutoffs.len().min(8);
    print!("  N:     ");
    for &n in report.cutoffs.iter().take(take) {
        print!(" {n:>7}");
    }
    print!("\n  recall:");
    for r in report.recall_at.iter().take(take) {
        print!(" {r:>7.4}");
    }
    print!("\n  map:   ");
    for m in report.map_at.iter().take(take) {
        print!(" {m:>7.4}");
    }
    println!();
}
