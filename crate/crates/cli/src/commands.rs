use std::path::{Path, PathBuf};

use dinf_core::bilimit::{Bilimit, PartialBilimit};
use dinf_core::format::{
    ep_to_json, load_any, load_diagram, load_equation, map_to_json, poset_to_dot, poset_to_json, poset_to_text,
    strict_ep_to_json, Artifact, FormatError, LoadedDiagram,
};
use dinf_core::presheaf::InternalPartialBilimit;
use dinf_core::solver::{iterate_chain, omega_bar, truncated_bilimit, ChainMode, SolverError};
use dinf_core::suite::{run_suite, SuiteConfig, SuiteMode};
use dinf_core::{Budget, Report};
use serde_json::{json, Value};

use crate::render::{presheaf_to_dot, presheaf_to_json, presheaf_to_text, pretty};
use crate::{Format, Global, Mode};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure { code: if e.is_validation() { 2 } else { 1 }, message: format!("error: {e}") }
    }
}

type Outcome = Result<(), Failure>;

fn budget(g: &Global) -> Budget {
    let mut b = Budget::default();
    if let Some(n) = g.budget {
        b.enumeration = n;
    }
    b
}

fn emit(g: &Global, text: &str) -> Outcome {
    match &g.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("error: {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn no_dot(g: &Global, what: &str) -> Outcome {
    if g.format == Some(Format::Dot) {
        return Err(Failure::usage(format!("error: `{what}` has no DOT output")));
    }
    Ok(())
}

fn report_failure(r: &Report) -> Outcome {
    match r.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::invalid(format!(
            "failed: {}{}",
            c.property,
            c.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
        ))),
    }
}

pub fn check(g: &Global, paths: &[PathBuf]) -> Outcome {
    no_dot(g, "check")?;
    let b = budget(g);
    let mut rows = Vec::new();
    let mut worst = 0u8;
    for p in paths {
        let (status, detail) = match load_any(p, &b) {
            Ok(a) => ("valid", a.kind().to_string()),
            Err(e) => {
                let code = if e.is_validation() { 2 } else { 1 };
                worst = if worst == 1 || code == 1 { 1 } else { 2 };
                (if code == 2 { "invalid" } else { "error" }, e.to_string())
            }
        };
        rows.push((p.display().to_string(), status, detail));
    }
    let text = if g.format == Some(Format::Json) {
        let files: Vec<Value> =
            rows.iter().map(|(p, s, d)| json!({ "path": p, "status": s, "detail": d })).collect();
        pretty(&json!({ "files": files, "valid": worst == 0 }))
    } else {
        rows.iter().map(|(p, s, d)| format!("{s:<7} {p}: {d}\n")).collect()
    };
    emit(g, &text)?;
    match worst {
        0 => Ok(()),
        code => Err(Failure { code, message: format!("{} of {} files failed", rows.iter().filter(|r| r.1 != "valid").count(), rows.len()) }),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Total => "total",
        Mode::Partial => "partial",
        Mode::Internal => "internal",
    }
}

pub fn bilimit(g: &Global, path: &Path) -> Outcome {
    let b = budget(g);
    let d = match load_diagram(path, &b) {
        Ok(d) => d,
        Err(e) if e.is_validation() => {
            let text = format!("FAIL diagram -- {e}\n");
            if g.format != Some(Format::Json) {
                emit(g, &text)?;
            } else {
                emit(g, &pretty(&json!({ "valid": false, "error": e.to_string() })))?;
            }
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(m) = g.mode {
        if mode_name(m) != d.mode() {
            return Err(Failure::usage(format!("error: {} is a {} diagram, not {}", path.display(), d.mode(), mode_name(m))));
        }
    }
    let sizes: Vec<usize>;
    let (apex_json, apex_text, apex_dot, apex_size, report) = match &d {
        LoadedDiagram::Total(d) => {
            sizes = d.objects().iter().map(|o| o.len()).collect();
            let lim = Bilimit::build(d).map_err(|e| Failure::invalid(format!("failed: {e}")))?;
            let a = lim.apex();
            (poset_to_json(a), poset_to_text(a), poset_to_dot(a), a.len(), lim.invariant_report())
        }
        LoadedDiagram::Partial(d) => {
            sizes = d.objects().iter().map(|o| o.len()).collect();
            let lim = PartialBilimit::build(d).map_err(|e| Failure::invalid(format!("failed: {e}")))?;
            let a = lim.apex();
            (poset_to_json(a), poset_to_text(a), poset_to_dot(a), a.len(), lim.invariant_report())
        }
        LoadedDiagram::Internal(d) => {
            sizes = d.objects().iter().map(|o| o.total_size()).collect();
            let lim = InternalPartialBilimit::build(d, &b).map_err(|e| Failure::invalid(format!("failed: {e}")))?;
            let a = lim.apex();
            let r = lim.invariant_report().map_err(|e| Failure::invalid(format!("failed: {e}")))?;
            (presheaf_to_json(a), presheaf_to_text(a), presheaf_to_dot(a), a.total_size(), r)
        }
    };
    let text = match g.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "mode": d.mode(),
            "index_size": d.index().len(),
            "object_sizes": sizes,
            "apex_size": apex_size,
            "apex": apex_json,
            "report": report,
            "pass": report.all_pass(),
        })),
        Format::Dot => apex_dot,
        Format::Text => format!(
            "{} bilimit over an index of {} elements, object sizes {:?}\napex size {apex_size}\n{}\n{}",
            d.mode(),
            d.index().len(),
            sizes,
            report.render_text(),
            apex_text
        ),
    };
    emit(g, &text)?;
    report_failure(&report)
}

pub fn verify(g: &Global, case: Option<u64>, max_object: Option<usize>) -> Outcome {
    no_dot(g, "verify")?;
    let mode = match g.mode.unwrap_or(Mode::Total) {
        Mode::Total => SuiteMode::Total,
        Mode::Partial => SuiteMode::Partial,
        Mode::Internal => SuiteMode::Internal,
    };
    let mut cfg = SuiteConfig::new(mode, g.seed, g.count);
    if let Some(k) = case {
        cfg.cases = vec![k];
    }
    cfg.max_object = max_object;
    cfg.budget = budget(g);
    let report = run_suite(&cfg);
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Text => report.summary_text(),
        _ => {
            let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    emit(g, &text)?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::invalid(format!(
            "{} of {} cases failed; first: {}",
            report.failed,
            report.count,
            report.failures.first().cloned().unwrap_or_default()
        )))
    }
}

fn solver_failure(e: SolverError) -> Failure {
    let hint = match &e {
        SolverError::NoStarterEp(_) => {
            "\nhint: total chains need an ep-pair base ⇄ F(base); pick a nonempty base or use `--mode partial`"
        }
        SolverError::BudgetExceeded(_) => "\nhint: lower `--depth`, or raise `--budget` if the levels are small",
        _ => "",
    };
    Failure::invalid(format!("error: {e}{hint}"))
}

pub fn solve(g: &Global, path: &Path) -> Outcome {
    let eq = load_equation(path)?;
    let mode = match g.mode {
        None => eq.mode.unwrap_or(ChainMode::Total),
        Some(Mode::Total) => ChainMode::Total,
        Some(Mode::Partial) => ChainMode::Partial,
        Some(Mode::Internal) => return Err(Failure::usage("error: `solve` runs in total or partial mode")),
    };
    let depth = g.depth.or(eq.depth).unwrap_or(3);
    let b = budget(g);
    let chain = iterate_chain(&eq.expr, &eq.base, depth, mode, &b).map_err(solver_failure)?;
    let links = chain.coherence_report(&b).map_err(solver_failure)?;
    let mut truncs = Vec::new();
    for k in 0..=chain.depth() {
        truncs.push(truncated_bilimit(&chain, k).map_err(solver_failure)?);
    }
    let mut all = links.clone();
    for t in &truncs {
        all.extend(&format!("level_{}", t.level), t.report.clone());
    }
    let last = chain.level(chain.depth()).map_err(solver_failure)?;
    let text = match g.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "domain": eq.name,
            "expr": eq.expr.to_string(),
            "mode": mode.to_string(),
            "base": eq.base_ref,
            "depth": chain.depth(),
            "sizes": chain.sizes(),
            "links": links,
            "truncations": truncs,
            "pass": all.all_pass(),
        })),
        Format::Dot => poset_to_dot(last),
        Format::Text => {
            let mut s = format!("domain {} = {}  ({} mode, base {})\n", eq.name, eq.expr, mode, eq.base_ref);
            s.push_str("level  size  apex  iso\n");
            for t in &truncs {
                let iso = if t.passed() { "ok" } else { "FAIL" };
                s.push_str(&format!("{:>5}  {:>4}  {:>4}  {iso}\n", t.level, t.level_size, t.apex_size));
            }
            s.push_str(&links.render_text());
            s
        }
    };
    emit(g, &text)?;
    report_failure(&all)
}

pub fn omegabar(g: &Global) -> Outcome {
    if matches!(g.mode, Some(m) if m != Mode::Partial) {
        return Err(Failure::usage("error: `omegabar` always runs in partial mode"));
    }
    let n = g.depth.unwrap_or(6);
    let w = omega_bar(n, &budget(g)).map_err(solver_failure)?;
    let text = match g.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "depth": n,
            "sizes": w.chain.sizes(),
            "report": w.report,
            "pass": w.report.all_pass(),
        })),
        Format::Dot => poset_to_dot(w.chain.level(n).map_err(solver_failure)?),
        Format::Text => format!("lift chain from 0, levels {:?}\n{}", w.chain.sizes(), w.report.render_text()),
    };
    emit(g, &text)?;
    report_failure(&w.report)
}

/// Posets and presheaves convert directly; maps and ep-pairs are JSON only;
/// a diagram exports its bilimit apex and an equation its deepest level.
pub fn export(g: &Global, path: &Path) -> Outcome {
    let b = budget(g);
    let f = g.format.unwrap_or(Format::Text);
    let artifact = load_any(path, &b)?;
    let poset = |p: &dinf_core::FinPoset| match f {
        Format::Text => poset_to_text(p),
        Format::Json => pretty(&poset_to_json(p)),
        Format::Dot => poset_to_dot(p),
    };
    let json_only = |v: Value| match f {
        Format::Dot => Err(Failure::usage("error: maps and ep-pairs export as JSON only")),
        _ => Ok(pretty(&v)),
    };
    let text = match artifact {
        Artifact::Poset(p) => poset(&p),
        Artifact::Map(m) => json_only(map_to_json(&m))?,
        Artifact::Ep(e) => json_only(ep_to_json(&e))?,
        Artifact::StrictEp(e) => json_only(strict_ep_to_json(&e))?,
        Artifact::Presheaf(a) => match f {
            Format::Text => presheaf_to_text(&a),
            Format::Json => pretty(&presheaf_to_json(&a)),
            Format::Dot => presheaf_to_dot(&a),
        },
        Artifact::Diagram(d) => match *d {
            LoadedDiagram::Total(d) => poset(Bilimit::build(&d).map_err(|e| Failure::invalid(format!("failed: {e}")))?.apex()),
            LoadedDiagram::Partial(d) => {
                poset(PartialBilimit::build(&d).map_err(|e| Failure::invalid(format!("failed: {e}")))?.apex())
            }
            LoadedDiagram::Internal(d) => {
                let lim = InternalPartialBilimit::build(&d, &b).map_err(|e| Failure::invalid(format!("failed: {e}")))?;
                match f {
                    Format::Text => presheaf_to_text(lim.apex()),
                    Format::Json => pretty(&presheaf_to_json(lim.apex())),
                    Format::Dot => presheaf_to_dot(lim.apex()),
                }
            }
        },
        Artifact::Equation(eq) => {
            let mode = match g.mode {
                Some(Mode::Partial) => ChainMode::Partial,
                Some(Mode::Total) => ChainMode::Total,
                _ => eq.mode.unwrap_or(ChainMode::Total),
            };
            let depth = g.depth.or(eq.depth).unwrap_or(3);
            let chain = iterate_chain(&eq.expr, &eq.base, depth, mode, &b).map_err(solver_failure)?;
            poset(chain.level(chain.depth()).map_err(solver_failure)?)
        }
    };
    emit(g, &text)
}
