//! End-to-end construction and verification.
//!
//! The pipeline validates the fan, checks the global log frame, solves
//! the chart decompositions, builds transitions and the canonical
//! connection, and then runs the selected verification stages.  Every
//! comparison is an exact identity in the Laurent ring; the report
//! records one outcome per check, has a stable field order, and carries
//! no timestamps, so identical inputs produce identical bytes.

use serde::Serialize;

use crate::builtins::Tamper;
use crate::connection::{
    canonical_connection, check_first_chern, check_flat_frames, check_flatness, check_gauge_law,
    check_residues,
};
use crate::fan::{Fan, FanSummary};
use crate::klyachko::{
    build_bundle, check_cocycle_identities, check_pullback_invariance, KlyachkoData,
    KlyachkoError,
};
use crate::log_tangent::check_global_frame;

/// Which verification stages to run; construction always happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckSet {
    pub lemma1: bool,
    pub cocycle: bool,
    pub connection: bool,
    pub prop3: bool,
}

impl CheckSet {
    pub fn all() -> Self {
        CheckSet { lemma1: true, cocycle: true, connection: true, prop3: true }
    }

    pub fn none() -> Self {
        CheckSet { lemma1: false, cocycle: false, connection: false, prop3: false }
    }

    /// Parses a comma-separated list of check tokens.
    pub fn parse(text: &str) -> Result<Self, String> {
        if text.trim() == "all" {
            return Ok(Self::all());
        }
        let mut set = Self::none();
        for token in text.split(',') {
            match token.trim() {
                "lemma1" => set.lemma1 = true,
                "cocycle" => set.cocycle = true,
                "connection" => set.connection = true,
                "prop3" => set.prop3 = true,
                "" => {}
                other => {
                    return Err(format!(
                        "unknown check {other:?}; known: lemma1, cocycle, connection, prop3"
                    ))
                }
            }
        }
        Ok(set)
    }
}

/// Where in the pipeline a failure occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Fan,
    Lemma1,
    Decomposition,
    Cocycle,
    Connection,
    Prop3,
}

/// Process exit code reserved for failures of each stage.
pub fn stage_exit_code(stage: Stage) -> i32 {
    match stage {
        Stage::Parse => 10,
        Stage::Fan => 11,
        Stage::Lemma1 => 12,
        Stage::Decomposition => 13,
        Stage::Cocycle => 14,
        Stage::Connection => 15,
        Stage::Prop3 => 16,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineFailure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn passed(name: &str) -> Self {
        CheckOutcome { name: name.into(), status: "passed".into(), detail: None }
    }
    fn failed(name: &str, detail: String) -> Self {
        CheckOutcome { name: name.into(), status: "failed".into(), detail: Some(detail) }
    }
    fn skipped(name: &str, detail: String) -> Self {
        CheckOutcome { name: name.into(), status: "skipped".into(), detail: Some(detail) }
    }
    fn blocked(name: &str) -> Self {
        CheckOutcome {
            name: name.into(),
            status: "blocked".into(),
            detail: Some("not reached because an earlier stage failed".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleSummary {
    pub rank: usize,
    pub rays: usize,
    /// per-ray jump sums: the divisor data of the determinant line
    pub jump_sums: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueReport {
    pub ray: usize,
    pub eigenvalues: Vec<String>,
    pub trace: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub slots: usize,
    /// trivializing character per line slot and chart
    pub characters: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleSummary>,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residues: Option<Vec<ResidueReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pullback: Option<PullbackReport>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text rendering for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("check {:<24} {}\n", c.name, c.status));
            if let Some(d) = &c.detail {
                out.push_str(&format!("    {d}\n"));
            }
        }
        if let Some(rs) = &self.residues {
            for r in rs {
                out.push_str(&format!(
                    "residue ray {:<2} eigenvalues [{}] trace {}\n",
                    r.ray,
                    r.eigenvalues.join(", "),
                    r.trace
                ));
            }
        }
        if let Some(p) = &self.pullback {
            out.push_str(&format!(
                "pullback split into {} line slot(s), characters {:?}\n",
                p.slots, p.characters
            ));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

#[derive(Debug, Clone)]
pub struct PipelineInput {
    pub fan: Fan,
    pub data: KlyachkoData,
    pub tamper: Tamper,
    pub checks: CheckSet,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: VerificationReport,
    pub failure: Option<PipelineFailure>,
}

struct Runner {
    checks: Vec<CheckOutcome>,
    failure: Option<PipelineFailure>,
}

impl Runner {
    fn fail(&mut self, stage: Stage, name: &str, message: String) {
        self.checks.push(CheckOutcome::failed(name, message.clone()));
        if self.failure.is_none() {
            self.failure = Some(PipelineFailure { stage, message });
        }
    }
}

pub fn run_pipeline(input: &PipelineInput) -> PipelineOutcome {
    let sel = input.checks;
    let plan: Vec<(&str, bool)> = vec![
        ("fan", true),
        ("lemma1", sel.lemma1),
        ("decomposition", true),
        ("cocycle", sel.cocycle),
        ("connection.gauge", sel.connection),
        ("connection.flatness", sel.connection),
        ("connection.frames", sel.connection),
        ("connection.residues", sel.connection),
        ("connection.chern", sel.connection),
        ("prop3", sel.prop3),
    ];
    let enabled: Vec<&str> = plan.iter().filter(|(_, on)| *on).map(|(n, _)| *n).collect();
    let mut r = Runner { checks: Vec::new(), failure: None };
    let mut fan_summary = None;
    let mut bundle_summary = None;
    let mut residues = None;
    let mut pullback = None;

    'run: {
        // fan structure
        let errs = input.fan.validate();
        if !errs.is_empty() {
            let msg =
                errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ");
            r.fail(Stage::Fan, "fan", msg);
            break 'run;
        }
        r.checks.push(CheckOutcome::passed("fan"));
        fan_summary = Some(input.fan.summary());
        let atlas = crate::fan::Atlas::new(input.fan.clone()).expect("fan was validated");

        // global log frame
        if sel.lemma1 {
            match check_global_frame(&atlas) {
                Ok(_) => r.checks.push(CheckOutcome::passed("lemma1")),
                Err(e) => {
                    r.fail(Stage::Lemma1, "lemma1", e.to_string());
                    break 'run;
                }
            }
        }

        // decomposition and transitions
        let mut bundle = match build_bundle(&atlas, &input.data) {
            Ok(b) => b,
            Err(e) => {
                r.fail(Stage::Decomposition, "decomposition", e.to_string());
                break 'run;
            }
        };
        r.checks.push(CheckOutcome::passed("decomposition"));
        bundle_summary = Some(BundleSummary {
            rank: bundle.rank,
            rays: input.fan.rays().len(),
            jump_sums: (0..input.fan.rays().len()).map(|i| bundle.data.jump_sum(i)).collect(),
        });
        input.tamper.apply_to_bundle(&atlas, &mut bundle);

        if sel.cocycle {
            match check_cocycle_identities(&atlas, &bundle) {
                Ok(_) => r.checks.push(CheckOutcome::passed("cocycle")),
                Err(e) => {
                    r.fail(Stage::Cocycle, "cocycle", e.to_string());
                    break 'run;
                }
            }
        }

        if sel.connection {
            let mut conn = canonical_connection(&atlas, &bundle);
            input.tamper.apply_to_connection(&mut conn);
            let subchecks: Vec<(&str, Result<(), crate::connection::ConnectionError>)> = vec![
                ("connection.gauge", check_gauge_law(&atlas, &bundle, &conn).map(|_| ())),
                ("connection.flatness", check_flatness(&conn).map(|_| ())),
                ("connection.frames", check_flat_frames(&atlas, &bundle, &conn)),
                (
                    "connection.residues",
                    check_residues(&atlas, &bundle, &conn).map(|spectra| {
                        residues = Some(
                            spectra
                                .iter()
                                .map(|s| ResidueReport {
                                    ray: s.ray,
                                    eigenvalues: s
                                        .eigenvalues
                                        .iter()
                                        .map(crate::algebra::rational::format_rat)
                                        .collect(),
                                    trace: crate::algebra::rational::format_rat(&s.trace),
                                })
                                .collect(),
                        );
                    }),
                ),
                ("connection.chern", check_first_chern(&atlas, &bundle, &conn).map(|_| ())),
            ];
            for (name, res) in subchecks {
                match res {
                    Ok(()) => r.checks.push(CheckOutcome::passed(name)),
                    Err(e) => {
                        r.fail(Stage::Connection, name, e.to_string());
                        break 'run;
                    }
                }
            }
        }

        if sel.prop3 {
            match check_pullback_invariance(&atlas, &bundle.cocycles) {
                Ok(split) => {
                    pullback = Some(PullbackReport {
                        slots: split.slots,
                        characters: split.exponents.clone(),
                    });
                    r.checks.push(CheckOutcome::passed("prop3"));
                }
                Err(KlyachkoError::NotSplit { detail }) => {
                    r.checks.push(CheckOutcome::skipped(
                        "prop3",
                        format!("only meaningful for sums of lines: {detail}"),
                    ));
                }
                Err(e) => {
                    r.fail(Stage::Prop3, "prop3", e.to_string());
                    break 'run;
                }
            }
        }
    }

    // mark everything that never ran
    for name in enabled {
        if !r.checks.iter().any(|c| c.name == name) {
            r.checks.push(CheckOutcome::blocked(name));
        }
    }
    let verdict = if r.failure.is_none() { "pass" } else { "fail" };
    PipelineOutcome {
        report: VerificationReport {
            verdict: verdict.into(),
            fan: fan_summary,
            bundle: bundle_summary,
            checks: r.checks,
            residues,
            pullback,
        },
        failure: r.failure,
    }
}
