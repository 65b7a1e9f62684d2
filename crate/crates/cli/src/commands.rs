use std::path::Path;

use hollowsep::bundled;
use hollowsep::concurrence::{self, pure_concurrences, MixedAnalysis};
use hollowsep::io::{read_state, State, StateFile};
use hollowsep::operators::{
    basis_label, count_minimal, count_redundant, generate_minimal, generate_redundant, OperatorCatalog,
    SpinFlipOperator,
};
use hollowsep::separability::{classify, ClassifyOptions, Evidence, SeparabilityVerdict, VerdictStatus};
use hollowsep::states::{PureState, SystemShape};

use crate::report::*;
use crate::{status_code, Failure, Format, EXIT_SEPARABLE};

fn load(path: &Path) -> Result<State, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(read_state(&text)?)
}

fn operator_rows(shape: &SystemShape, ops: &[SpinFlipOperator]) -> Vec<OperatorRow> {
    ops.iter()
        .enumerate()
        .map(|(k, op)| OperatorRow {
            alpha: k + 1,
            indices: op.indices(),
            label: op.label(shape),
        })
        .collect()
}

pub fn ops(shape: &SystemShape, redundant: bool, count_only: bool, format: Format) -> Result<u8, Failure> {
    let (family, count) = if redundant {
        ("redundant", count_redundant(shape))
    } else {
        ("minimal", count_minimal(shape))
    };
    let operators = if count_only {
        None
    } else if redundant {
        Some(generate_redundant(shape)?)
    } else {
        Some(generate_minimal(shape)?.operators().to_vec())
    };
    let rows = operators.map(|ops| operator_rows(shape, &ops));
    match format {
        Format::Machine => print_machine(&OpsDoc {
            command: "ops",
            shape: shape.dims().to_vec(),
            family,
            count,
            operators: rows,
        }),
        Format::Human => {
            println!("{family} operators for shape {shape}: {count}");
            for row in rows.iter().flatten() {
                println!("{:>6}  {}", row.alpha, row.label);
            }
        }
    }
    Ok(EXIT_SEPARABLE)
}

fn concurrence_rows(catalog: &OperatorCatalog, values: &[f64], gaps: Option<&[f64]>) -> Vec<ConcurrenceRow> {
    catalog
        .iter()
        .enumerate()
        .map(|(k, op)| ConcurrenceRow {
            alpha: k + 1,
            operator: op.label(catalog.shape()),
            value: values[k],
            thompson_gap: gaps.map(|g| g[k]),
        })
        .collect()
}

fn print_table(rows: &[ConcurrenceRow]) {
    let gaps = rows.iter().any(|r| r.thompson_gap.is_some());
    if gaps {
        println!("{:>6}  {:>14}  {:>14}  operator", "alpha", "C_alpha", "gap");
    } else {
        println!("{:>6}  {:>14}  operator", "alpha", "C_alpha");
    }
    for r in rows {
        match r.thompson_gap {
            Some(g) => println!("{:>6}  {:>14.6e}  {:>14.6e}  {}", r.alpha, r.value, g, r.operator),
            None => println!("{:>6}  {:>14.6e}  {}", r.alpha, r.value, r.operator),
        }
    }
}

pub fn concurrence(path: &Path, tol: Option<f64>, format: Format) -> Result<u8, Failure> {
    let state = load(path)?;
    let catalog = generate_minimal(state.shape())?;
    let (kind, rank, values, gaps, tolerance) = match &state {
        State::Pure(psi) => {
            let tol = tol.unwrap_or(concurrence::DEFAULT_PURE_TOL);
            ("pure", 1, pure_concurrences(psi, &catalog)?, None, tol)
        }
        State::Mixed(rho) => {
            let analysis = MixedAnalysis::new(rho, &catalog, hollowsep::states::DEFAULT_RANK_TOL)?;
            let tol = tol.unwrap_or(concurrence::DEFAULT_MIXED_TOL) * analysis.scale().max(1.0);
            (
                "mixed",
                analysis.rank(),
                analysis.concurrences(),
                Some(analysis.gaps()),
                tol,
            )
        }
    };
    let max = values.iter().copied().fold(0.0, f64::max);
    let qubit_pair = state.shape().dims() == [2, 2];
    let (status, reason) = if max > tolerance {
        (VerdictStatus::Entangled, "a concurrence is nonzero".to_string())
    } else if kind == "pure" || rank == 1 {
        (
            VerdictStatus::Separable,
            "pure state with vanishing concurrences".to_string(),
        )
    } else if qubit_pair {
        (
            VerdictStatus::Separable,
            "two qubits with vanishing concurrence".to_string(),
        )
    } else {
        (
            VerdictStatus::Undecided,
            "all concurrences vanish; run `separability` to decide".to_string(),
        )
    };
    let rows = concurrence_rows(&catalog, &values, gaps.as_deref());
    match format {
        Format::Machine => print_machine(&ConcurrenceDoc {
            command: "concurrence",
            shape: state.shape().dims().to_vec(),
            kind,
            rank,
            tolerance,
            verdict: status.as_str(),
            reason,
            concurrences: rows,
        }),
        Format::Human => {
            println!("{kind} state, shape {}, rank {rank}", state.shape());
            print_table(&rows);
            println!("verdict: {} ({reason})", status.as_str());
        }
    }
    Ok(status_code(status))
}

fn amplitude_summary(psi: &PureState) -> String {
    let shape = psi.shape();
    let parts: Vec<String> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-9)
        .map(|(k, z)| {
            let ket = basis_label(shape, k);
            if z.im.abs() <= 1e-9 {
                format!("{:+.6}|{ket}>", z.re)
            } else {
                format!("({:+.6}{:+.6}i)|{ket}>", z.re, z.im)
            }
        })
        .collect();
    parts.join(" ")
}

fn print_verdict_human(v: &SeparabilityVerdict, rows: &[ConcurrenceRow], shape: &SystemShape) {
    println!("shape {shape}, rank {}", v.rank);
    print_table(rows);
    println!("verdict: {}", v.status.as_str());
    match &v.evidence {
        Evidence::Decomposition(d) => {
            println!(
                "decomposition over {} product states (p = {}, reconstruction error {:.3e})",
                d.components.len(),
                d.p,
                d.report.reconstruction_error
            );
            for (k, c) in d.components.iter().enumerate() {
                println!(
                    "  {:>3}  weight {:.6}  {}",
                    k + 1,
                    c.weight,
                    amplitude_summary(&c.state)
                );
            }
        }
        Evidence::Concurrence {
            alpha,
            value,
            tolerance,
        } => {
            println!("witness: C_{} = {value:.6e} > {tolerance:.1e}", alpha + 1)
        }
        Evidence::Ppt {
            partition,
            min_eigenvalue,
        } => {
            let parties: Vec<String> = partition.iter().map(|k| (k + 1).to_string()).collect();
            println!(
                "witness: partial transpose over parties {{{}}} has eigenvalue {min_eigenvalue:.6e}",
                parties.join(",")
            )
        }
        Evidence::Proportionality { alpha, beta, deviation } => println!(
            "witness: tau_{} and tau_{} are not proportional (deviation {deviation:.3e})",
            alpha + 1,
            beta + 1
        ),
        Evidence::Diagnostics {
            max_concurrence,
            min_ppt_eigenvalue,
            attempts,
        } => {
            println!("max concurrence {max_concurrence:.3e}");
            if let Some(m) = min_ppt_eigenvalue {
                println!("min partial-transpose eigenvalue {m:.3e}");
            }
            for a in attempts {
                println!(
                    "  p = {:>3}  residual {:.3e}{}",
                    a.p,
                    a.residual,
                    if a.short_circuited { " (a single tau fails)" } else { "" }
                );
            }
        }
    }
}

pub fn separability(path: &Path, opts: &ClassifyOptions, format: Format) -> Result<u8, Failure> {
    let state = load(path)?;
    let rho = state.density();
    let catalog = generate_minimal(rho.shape())?;
    let v = classify(&rho, &catalog, opts)?;
    let rows = concurrence_rows(&catalog, &v.concurrences, Some(&v.thompson_gaps));
    match format {
        Format::Machine => {
            let decomposition = v.decomposition().map(|d| {
                d.components
                    .iter()
                    .map(|c| ComponentDoc {
                        weight: c.weight,
                        state: StateFile::from_pure(&c.state),
                    })
                    .collect()
            });
            print_machine(&SeparabilityDoc {
                command: "separability",
                shape: rho.shape().dims().to_vec(),
                verdict: v.status.as_str(),
                rank: v.rank,
                settings: Settings {
                    tol: opts.tol,
                    p_max: opts.p_max,
                    restarts: opts.hollowise.restarts,
                    seed: opts.hollowise.seed,
                    max_iters: opts.hollowise.max_iters,
                    skip_ppt: opts.skip_ppt,
                },
                concurrences: rows,
                evidence: evidence_doc(&v),
                decomposition,
            })
        }
        Format::Human => print_verdict_human(&v, &rows, rho.shape()),
    }
    Ok(status_code(v.status))
}

pub fn examples(name: Option<&str>, out_dir: Option<&Path>) -> Result<u8, Failure> {
    let write = |dir: &Path, name: &str| -> Result<(), Failure> {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, bundled::render(name)?)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    };
    match (name, out_dir) {
        (None, None) => {
            for n in bundled::NAMES {
                println!("{n}");
            }
        }
        (None, Some(dir)) => {
            for n in bundled::NAMES {
                write(dir, n)?;
            }
        }
        (Some(n), None) => print!("{}", bundled::render(n)?),
        (Some(n), Some(dir)) => write(dir, n)?,
    }
    Ok(EXIT_SEPARABLE)
}
