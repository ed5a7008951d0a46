//! Seeded verification runs over random diagrams. Reports contain no timings
//! or other run-dependent data, so equal configurations give equal bytes.

use rayon::prelude::*;
use serde::Serialize;

use crate::bilimit::{verify_universal, verify_universal_partial, Bilimit, PartialBilimit};
use crate::gen::{
    case_rng, random_extension, random_internal_diagram, random_internal_extension, random_partial_diagram,
    random_strict_extension, random_total_diagram, GenConfig,
};
use crate::presheaf::{
    boolean_bilimit_iso, boolean_lift_iso, from_boolean_diagram, monad_law_report, verify_universal_internal,
    BaseSite, InternalPartialBilimit,
};
use crate::report::Report;
use crate::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteMode {
    Total,
    Partial,
    Internal,
}

impl SuiteMode {
    pub fn name(self) -> &'static str {
        match self {
            SuiteMode::Total => "total",
            SuiteMode::Partial => "partial",
            SuiteMode::Internal => "internal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub mode: SuiteMode,
    pub seed: u64,
    /// Case numbers to run; `0..count` for a full run.
    pub cases: Vec<u64>,
    /// Overrides the generator's largest object size.
    pub max_object: Option<usize>,
    pub budget: Budget,
}

impl SuiteConfig {
    pub fn new(mode: SuiteMode, seed: u64, count: u64) -> Self {
        SuiteConfig { mode, seed, cases: (0..count).collect(), max_object: None, budget: Budget::default() }
    }

    fn gen_config(&self) -> GenConfig {
        let mut g = match self.mode {
            SuiteMode::Total => GenConfig::total(),
            SuiteMode::Partial => GenConfig::partial(),
            SuiteMode::Internal => GenConfig::internal(),
        };
        if let Some(m) = self.max_object {
            g.max_object = m;
            g.min_object = g.min_object.min(m);
        }
        g
    }

    fn repro(&self, case: u64) -> String {
        let mut cmd = format!("dinf verify --mode {} --seed {} --case {case}", self.mode.name(), self.seed);
        if let Some(m) = self.max_object {
            cmd.push_str(&format!(" --max-object {m}"));
        }
        if self.budget != Budget::default() {
            cmd.push_str(&format!(" --budget {}", self.budget.enumeration));
        }
        cmd
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeReport {
    /// `own`, `top` or `extended`.
    pub cone: String,
    pub apex_size: usize,
    pub commuting_projections: usize,
    pub commuting_maps: usize,
    pub pass: bool,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: u64,
    pub pass: bool,
    pub degenerate: bool,
    pub index_size: usize,
    /// Object sizes; total stage sizes in internal mode.
    pub object_sizes: Vec<usize>,
    pub apex_size: usize,
    pub invariants: Report,
    pub cones: Vec<ConeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub repro: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub mode: SuiteMode,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub failed: usize,
    pub degenerate: usize,
    pub cones_checked: usize,
    pub max_apex_size: usize,
    pub max_index_size: usize,
    pub failures: Vec<String>,
    pub cases: Vec<CaseReport>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn summary_text(&self) -> String {
        let mut out = format!(
            "verify {} seed {}: {}/{} passed ({} degenerate, {} cones, max apex {}, max index {})\n",
            self.mode.name(),
            self.seed,
            self.passed,
            self.count,
            self.degenerate,
            self.cones_checked,
            self.max_apex_size,
            self.max_index_size
        );
        for c in self.cases.iter().filter(|c| !c.pass) {
            let why = c
                .error
                .clone()
                .or_else(|| c.invariants.first_failure().map(|f| format!("{}: {:?}", f.property, f.witness)))
                .or_else(|| {
                    c.cones.iter().find(|k| !k.pass).and_then(|k| {
                        k.report.first_failure().map(|f| format!("{} cone, {}: {:?}", k.cone, f.property, f.witness))
                    })
                })
                .unwrap_or_default();
            out.push_str(&format!("FAIL case {}: {why}\n  repro: {}\n", c.case, c.repro));
        }
        out
    }
}

struct Outcome {
    degenerate: bool,
    index_size: usize,
    object_sizes: Vec<usize>,
    apex_size: usize,
    invariants: Report,
    cones: Vec<ConeReport>,
}

fn cone(name: &str, apex_size: usize, projections: usize, maps: usize, pass: bool, report: Report) -> ConeReport {
    ConeReport { cone: name.into(), apex_size, commuting_projections: projections, commuting_maps: maps, pass, report }
}

fn total_case(cfg: &SuiteConfig, case: u64) -> Result<Outcome, String> {
    let b = &cfg.budget;
    let mut rng = case_rng(cfg.seed, case);
    let g = random_total_diagram(&mut rng, &cfg.gen_config(), b);
    let lim = Bilimit::build(&g.diagram).map_err(|e| e.to_string())?;
    let own = lim.own_cone();
    let ext = random_extension(&mut rng, own.apex(), b);
    let cones = [("own", own.clone()), ("top", lim.top_cone()), ("extended", own.extend(&ext).map_err(|e| e.to_string())?)];
    let mut out = Vec::new();
    for (name, c) in cones {
        let u = verify_universal(&lim, &c, b).map_err(|e| e.to_string())?;
        out.push(cone(name, c.apex().len(), u.commuting_projections, u.commuting_maps, u.passed(), u.to_report()));
    }
    Ok(Outcome {
        degenerate: g.degenerate,
        index_size: g.diagram.index().len(),
        object_sizes: g.diagram.objects().iter().map(|o| o.len()).collect(),
        apex_size: lim.apex().len(),
        invariants: lim.invariant_report(),
        cones: out,
    })
}

fn partial_case(cfg: &SuiteConfig, case: u64) -> Result<Outcome, String> {
    let b = &cfg.budget;
    let mut rng = case_rng(cfg.seed, case);
    let g = random_partial_diagram(&mut rng, &cfg.gen_config(), b);
    let lim = PartialBilimit::build(&g.diagram).map_err(|e| e.to_string())?;
    let own = lim.own_cone();
    let ext = random_strict_extension(&mut rng, own.apex(), b);
    let cones = [("own", own.clone()), ("top", lim.top_cone()), ("extended", own.extend(&ext).map_err(|e| e.to_string())?)];
    let mut out = Vec::new();
    for (name, c) in cones {
        let u = verify_universal_partial(&lim, &c, b).map_err(|e| e.to_string())?;
        out.push(cone(
            name,
            c.apex().len(),
            u.commuting_strict_projections,
            u.commuting_strict_maps,
            u.passed(),
            u.to_report(),
        ));
    }
    Ok(Outcome {
        degenerate: g.degenerate,
        index_size: g.diagram.index().len(),
        object_sizes: g.diagram.objects().iter().map(|o| o.len()).collect(),
        apex_size: lim.apex().len(),
        invariants: lim.invariant_report(),
        cones: out,
    })
}

/// A random diagram over the Sierpinski base with its three cones, the monad
/// laws on every object, and the comparison with the two-valued construction
/// on a random diagram transported to the one-point base.
fn internal_case(cfg: &SuiteConfig, case: u64) -> Result<Outcome, String> {
    let b = &cfg.budget;
    let gc = cfg.gen_config();
    let mut rng = case_rng(cfg.seed, case);
    let site = BaseSite::sierpinski();
    let g = random_internal_diagram(&mut rng, &site, &gc, b).map_err(|e| e.to_string())?;
    let lim = InternalPartialBilimit::build(&g.diagram, b).map_err(|e| e.to_string())?;
    let mut invariants = lim.invariant_report().map_err(|e| e.to_string())?;
    for (k, o) in g.diagram.objects().iter().enumerate() {
        invariants.extend(&format!("monad[{k}]"), monad_law_report(o, b).map_err(|e| e.to_string())?);
    }

    let pg = random_partial_diagram(&mut rng, &GenConfig { max_object: gc.max_object, ..GenConfig::partial() }, b);
    let boolean = PartialBilimit::build(&pg.diagram).map_err(|e| e.to_string())?;
    let moved = from_boolean_diagram(&pg.diagram, b).map_err(|e| e.to_string())?;
    let internal = InternalPartialBilimit::build(&moved, b).map_err(|e| e.to_string())?;
    invariants.extend("point", boolean_bilimit_iso(&boolean, &internal).map_err(|e| e.to_string())?);
    for (k, o) in pg.diagram.objects().iter().enumerate() {
        invariants.extend(&format!("point.lift[{k}]"), boolean_lift_iso(o, b).map_err(|e| e.to_string())?);
    }

    let own = lim.own_cone();
    let ext = random_internal_extension(&mut rng, own.lifted_apex(), &gc, b);
    let cones = [("own", own.clone()), ("top", lim.top_cone()), ("extended", own.extend(&ext).map_err(|e| e.to_string())?)];
    let mut out = Vec::new();
    for (name, c) in cones {
        let u = verify_universal_internal(&lim, &c, b).map_err(|e| e.to_string())?;
        out.push(cone(
            name,
            c.apex().total_size(),
            u.commuting_strict_projections,
            u.commuting_strict_maps,
            u.passed(),
            u.to_report(),
        ));
    }
    Ok(Outcome {
        degenerate: g.degenerate,
        index_size: g.diagram.index().len(),
        object_sizes: g.diagram.objects().iter().map(|o| o.total_size()).collect(),
        apex_size: lim.apex().total_size(),
        invariants,
        cones: out,
    })
}

pub fn run_case(cfg: &SuiteConfig, case: u64) -> CaseReport {
    let outcome = match cfg.mode {
        SuiteMode::Total => total_case(cfg, case),
        SuiteMode::Partial => partial_case(cfg, case),
        SuiteMode::Internal => internal_case(cfg, case),
    };
    let repro = cfg.repro(case);
    match outcome {
        Ok(o) => CaseReport {
            case,
            pass: o.invariants.all_pass() && o.cones.iter().all(|c| c.pass),
            degenerate: o.degenerate,
            index_size: o.index_size,
            object_sizes: o.object_sizes,
            apex_size: o.apex_size,
            invariants: o.invariants,
            cones: o.cones,
            error: None,
            repro,
        },
        Err(e) => CaseReport {
            case,
            pass: false,
            degenerate: false,
            index_size: 0,
            object_sizes: Vec::new(),
            apex_size: 0,
            invariants: Report::new(),
            cones: Vec::new(),
            error: Some(e),
            repro,
        },
    }
}

/// Runs the cases in parallel; the report lists them in the configured order.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let cases: Vec<CaseReport> = cfg.cases.par_iter().map(|&k| run_case(cfg, k)).collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    SuiteReport {
        mode: cfg.mode,
        seed: cfg.seed,
        count: cases.len(),
        passed,
        failed: cases.len() - passed,
        degenerate: cases.iter().filter(|c| c.degenerate).count(),
        cones_checked: cases.iter().map(|c| c.cones.len()).sum(),
        max_apex_size: cases.iter().map(|c| c.apex_size).max().unwrap_or(0),
        max_index_size: cases.iter().map(|c| c.index_size).max().unwrap_or(0),
        failures: cases.iter().filter(|c| !c.pass).map(|c| c.repro.clone()).collect(),
        cases,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run_passes() {
        let r = run_suite(&SuiteConfig::new(SuiteMode::Total, 1, 0));
        assert!(r.all_pass());
        assert_eq!(r.count, 0);
    }

    #[test]
    fn small_runs_pass_in_every_mode() {
        for mode in [SuiteMode::Total, SuiteMode::Partial, SuiteMode::Internal] {
            let r = run_suite(&SuiteConfig::new(mode, 7, 4));
            assert!(r.all_pass(), "{}", r.summary_text());
            assert!(r.cases.iter().all(|c| c.cones.len() == 3));
        }
    }

    #[test]
    fn single_case_matches_full_run() {
        let full = run_suite(&SuiteConfig::new(SuiteMode::Partial, 11, 5));
        let mut one = SuiteConfig::new(SuiteMode::Partial, 11, 0);
        one.cases = vec![3];
        assert_eq!(run_suite(&one).cases[0], full.cases[3]);
    }

    #[test]
    fn tiny_objects_degenerate_but_pass() {
        let mut cfg = SuiteConfig::new(SuiteMode::Total, 5, 10);
        cfg.max_object = Some(1);
        let r = run_suite(&cfg);
        assert!(r.all_pass(), "{}", r.summary_text());
        assert!(r.cases.iter().all(|c| c.object_sizes.iter().all(|&n| n == 1)));
    }
}
