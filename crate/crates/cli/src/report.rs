//! Machine-readable documents. Field order is fixed and no field depends on
//! wall-clock time, so equal inputs and seeds give byte-identical output.

use hollowsep::io::StateFile;
use hollowsep::separability::{Evidence, SeparabilityVerdict};
use serde::Serialize;

#[derive(Serialize)]
pub struct OpsDoc {
    pub command: &'static str,
    pub shape: Vec<usize>,
    pub family: &'static str,
    pub count: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operators: Option<Vec<OperatorRow>>,
}

#[derive(Serialize)]
pub struct OperatorRow {
    pub alpha: usize,
    pub indices: [usize; 4],
    pub label: String,
}

#[derive(Serialize)]
pub struct ConcurrenceRow {
    pub alpha: usize,
    pub operator: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thompson_gap: Option<f64>,
}

#[derive(Serialize)]
pub struct ConcurrenceDoc {
    pub command: &'static str,
    pub shape: Vec<usize>,
    pub kind: &'static str,
    pub rank: usize,
    pub tolerance: f64,
    pub verdict: &'static str,
    pub reason: String,
    pub concurrences: Vec<ConcurrenceRow>,
}

#[derive(Serialize)]
pub struct Settings {
    pub tol: f64,
    pub p_max: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub skip_ppt: bool,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EvidenceDoc {
    Decomposition {
        p: usize,
        components: usize,
        dropped: usize,
        reconstruction_error: f64,
        max_component_concurrence: f64,
    },
    Concurrence {
        alpha: usize,
        value: f64,
        tolerance: f64,
    },
    PptWitness {
        /// One-based parties transposed.
        partition: Vec<usize>,
        min_eigenvalue: f64,
    },
    NotProportional {
        alpha: usize,
        beta: usize,
        deviation: f64,
    },
    Diagnostics {
        max_concurrence: f64,
        min_ppt_eigenvalue: Option<f64>,
        attempts: Vec<AttemptDoc>,
    },
}

#[derive(Serialize)]
pub struct AttemptDoc {
    pub p: usize,
    pub found: bool,
    pub residual: f64,
    pub short_circuited: bool,
}

#[derive(Serialize)]
pub struct ComponentDoc {
    pub weight: f64,
    pub state: StateFile,
}

#[derive(Serialize)]
pub struct SeparabilityDoc {
    pub command: &'static str,
    pub shape: Vec<usize>,
    pub verdict: &'static str,
    pub rank: usize,
    pub settings: Settings,
    pub concurrences: Vec<ConcurrenceRow>,
    pub evidence: EvidenceDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<ComponentDoc>>,
}

pub fn evidence_doc(v: &SeparabilityVerdict) -> EvidenceDoc {
    match &v.evidence {
        Evidence::Decomposition(d) => EvidenceDoc::Decomposition {
            p: d.p,
            components: d.components.len(),
            dropped: d.dropped,
            reconstruction_error: d.report.reconstruction_error,
            max_component_concurrence: d.report.max_component_concurrence,
        },
        Evidence::Concurrence {
            alpha,
            value,
            tolerance,
        } => EvidenceDoc::Concurrence {
            alpha: alpha + 1,
            value: *value,
            tolerance: *tolerance,
        },
        Evidence::Ppt {
            partition,
            min_eigenvalue,
        } => EvidenceDoc::PptWitness {
            partition: partition.iter().map(|k| k + 1).collect(),
            min_eigenvalue: *min_eigenvalue,
        },
        Evidence::Proportionality { alpha, beta, deviation } => EvidenceDoc::NotProportional {
            alpha: alpha + 1,
            beta: beta + 1,
            deviation: *deviation,
        },
        Evidence::Diagnostics {
            max_concurrence,
            min_ppt_eigenvalue,
            attempts,
        } => EvidenceDoc::Diagnostics {
            max_concurrence: *max_concurrence,
            min_ppt_eigenvalue: *min_ppt_eigenvalue,
            attempts: attempts
                .iter()
                .map(|a| AttemptDoc {
                    p: a.p,
                    found: a.status == hollowsep::hollowizer::HollowStatus::Found,
                    residual: a.residual,
                    short_circuited: a.short_circuited,
                })
                .collect(),
        },
    }
}

/// Closed pipes are ignored.
pub fn print_machine<T: Serialize>(doc: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(doc).expect("documents serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
