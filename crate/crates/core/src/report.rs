//! CSV and plain-text renderings of results.
//!
//! Floats use Rust's shortest round-trip formatting, which never depends on
//! locale, so identical inputs give byte-identical output.

use std::fmt::Write as _;

use crate::funcnorm::NormResult;
use crate::halmos::{HalmosModel, SplitBoundCheck, ScanRow};
use crate::verify::{DirectSumReport, VGapReport, VPrimeEstimate};
use crate::witness::Witness;

/// Column order of [`scan_csv`].
pub const SCAN_COLUMNS: [&str; 6] = ["lambda_j", "lambda_k", "lhs", "norm", "ratio", "growth_bound"];
/// Column order of [`vgap_csv`].
pub const VGAP_COLUMNS: [&str; 10] =
    ["model", "pair_hash", "seed", "lhs", "norm_lower", "norm_upper", "margin", "satisfied", "verdict", "converged"];
/// Column order of [`vprime_csv`].
pub const VPRIME_COLUMNS: [&str; 2] = ["trial", "ratio"];

fn csv<I: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: I) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|f| quote(f)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn scan_csv(rows: &[ScanRow<f64>]) -> String {
    csv(
        &SCAN_COLUMNS,
        rows.iter().map(|r| {
            [r.lambda_j, r.lambda_k, r.lhs, r.norm, r.ratio, r.growth_bound].iter().map(f64::to_string).collect()
        }),
    )
}

pub fn scan_text(rows: &[ScanRow<f64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "pair ({}, {}): lambda_j={} lambda_k={} lhs={} norm={} ratio={} bound={} [{}]",
            r.j,
            r.k,
            r.lambda_j,
            r.lambda_k,
            r.lhs,
            r.norm,
            r.ratio,
            r.growth_bound,
            if r.assertions_hold { "ok" } else { "FAILED" }
        );
    }
    out
}

fn vgap_fields(r: &VGapReport<f64>) -> Vec<String> {
    vec![
        r.model.clone(),
        r.pair_hash.clone(),
        r.seed.map_or_else(String::new, |s| s.to_string()),
        r.lhs.to_string(),
        r.norm_lower.to_string(),
        r.norm_upper.to_string(),
        r.margin.to_string(),
        r.satisfied.to_string(),
        r.verdict.to_string(),
        r.converged.to_string(),
    ]
}

pub fn vgap_csv(reports: &[VGapReport<f64>]) -> String {
    csv(&VGAP_COLUMNS, reports.iter().map(vgap_fields))
}

pub fn vgap_text(r: &VGapReport<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model:       {}", r.model);
    let _ = writeln!(out, "pair:        {}", r.pair_hash);
    if let Some(s) = r.seed {
        let _ = writeln!(out, "seed:        {s}");
    }
    let _ = writeln!(out, "lattice:     {} (argmin rank {})", r.lhs, r.lhs_argmin.rank());
    let _ = writeln!(out, "norm:        [{}, {}]", r.norm_lower, r.norm_upper);
    let _ = writeln!(out, "margin:      {}", r.margin);
    let _ = writeln!(out, "verdict:     {}{}", r.verdict, if r.converged { "" } else { " (bracket not converged)" });
    out
}

pub fn norm_text(r: &NormResult<f64>) -> String {
    format!(
        "lower: {}\nupper: {}\nwidth: {}\niterations: {}\nconverged: {}\n",
        r.lower,
        r.upper,
        r.width(),
        r.iterations,
        r.converged
    )
}

pub fn norm_csv(r: &NormResult<f64>) -> String {
    csv(
        &["lower", "upper", "width", "iterations", "converged"],
        [vec![r.lower.to_string(), r.upper.to_string(), r.width().to_string(), r.iterations.to_string(), r.converged.to_string()]],
    )
}

pub fn vprime_csv(e: &VPrimeEstimate<f64>) -> String {
    csv(&VPRIME_COLUMNS, e.ratios.iter().enumerate().map(|(i, r)| vec![i.to_string(), r.to_string()]))
}

pub fn vprime_text(e: &VPrimeEstimate<f64>) -> String {
    format!("c_hat: {}\nworst trial: {}\ntrials: {}\n", e.c_hat, e.worst_index, e.ratios.len())
}

pub fn direct_sum_text(r: &DirectSumReport<f64>) -> String {
    format!(
        "lattice: parts {} assembled {} (defect {})\nnorm: parts [{}, {}] assembled [{}, {}] (defect {})\nadditivity: {}\n",
        r.lhs_parts,
        r.lhs_assembled,
        r.lhs_defect,
        r.norm_parts.0,
        r.norm_parts.1,
        r.norm_assembled.0,
        r.norm_assembled.1,
        r.norm_defect,
        if r.holds { "holds" } else { "FAILED" }
    )
}

pub fn witness_text(w: &Witness<f64>, member: bool, norm: f64, split_ok: bool) -> String {
    format!(
        "split rank: {}\nsplit inequalities: {}\nlattice distance: {}\nwitness value: {}\nwitness norm: {}\nmember: {}\n",
        w.split.p.rank(),
        if split_ok { "hold" } else { "FAILED" },
        w.lat_distance,
        w.value,
        norm,
        member
    )
}

pub fn halmos_text(model: &HalmosModel<f64>, bounds: Option<&SplitBoundCheck<f64>>) -> String {
    let mut out = String::new();
    let spectrum: Vec<String> = model.spectrum().iter().map(f64::to_string).collect();
    let _ = writeln!(out, "h0 dimension: {}", model.h0_dim());
    let _ = writeln!(out, "spectrum: {}", spectrum.join(", "));
    let _ = writeln!(out, "angle positive: {}", model.angle_positive());
    if let Some(l) = bounds {
        let c: Vec<String> = l.constants.c.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "constants: {} (max {})", c.join(", "), l.constants.max);
        let _ = writeln!(out, "condition: {}", l.condition);
        let _ = writeln!(out, "pairs sampled: {}", l.pairs);
        let _ = writeln!(out, "min m <= norm: {}", if l.split_bound_ok { "holds" } else { "FAILED" });
        let _ = writeln!(out, "a <= c m: {}", if l.paired_bound_ok { "holds" } else { "FAILED" });
        let _ = writeln!(out, "worst ratio: {}", l.worst_ratio);
    }
    out
}
