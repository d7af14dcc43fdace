//! Task execution. Tasks run in manifest order; with `parallel` the
//! independent tasks run concurrently and exactness tasks follow once the
//! values they test are available. The report is identical either way.

use qclass_core::cocycles::{cocycle_report, DEFAULT_MAX_ORDER};
use qclass_core::cohomology::{
    exactness_witness_capped, function_cohomology_dims, transgression, ExactnessStatus, DEFAULT_UNKNOWN_CAP,
};
use qclass_core::random::{random_tensor, rng, PolyShape};
use qclass_core::{bracket, delta, Parity, TensorField};
use rayon::prelude::*;

use crate::manifest::{Expectation, Manifest, Target, Task, TaskKind};
use crate::report::{model_json, Detail, Report, Status, Summary, TaskReport, TensorJson};

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub parallel: bool,
    pub max_order: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            parallel: false,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

struct Outcome {
    status: Status,
    detail: Detail,
    /// The computed cocycle, kept for later exactness tasks.
    value: Option<TensorField>,
}

type TaskResult = Result<Outcome, String>;

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn run_task(m: &Manifest, task: &Task, opts: RunOptions, target: Option<&TaskResult>) -> TaskResult {
    let q = &m.model.q;
    let err = |e: qclass_core::Error| e.to_string();
    match &task.kind {
        TaskKind::CheckQ => {
            let b = bracket(q.field(), q.field()).map_err(err)?;
            Ok(Outcome {
                status: pass_if(b.is_zero()),
                detail: Detail::CheckQ {
                    bracket: TensorJson::from_tensor(&b),
                },
                value: None,
            })
        }
        TaskKind::VerifyRelations {
            connection,
            endomorphisms,
        } => {
            let c = &m.connections[connection];
            let report = c.verify_structural_relations(q).map_err(err)?;
            let mut checked = 0;
            let mut failures = Vec::new();
            if let Some(sample) = endomorphisms {
                let mut r = rng(sample.seed);
                for n in 0..sample.count {
                    let parity = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
                    let a = random_tensor(&mut r, m.chart(), 1, 1, parity, 0.5, PolyShape::default());
                    if !c.verify_cov_lie_relation(q, &a).map_err(err)?.is_zero() {
                        failures.push(n);
                    }
                    checked += 1;
                }
            }
            let chart = m.chart();
            Ok(Outcome {
                status: pass_if(report.all_zero() && failures.is_empty()),
                detail: Detail::VerifyRelations {
                    connection: connection.clone(),
                    nabla_q_q: TensorJson::from_tensor(&report.nabla_q_q),
                    second: TensorJson::from_tensor(&report.second),
                    third_failures: report
                        .failing_third()
                        .iter()
                        .map(|&a| chart.name(a).to_string())
                        .collect(),
                    endomorphisms_checked: checked,
                    cov_lie_failures: failures,
                },
                value: None,
            })
        }
        TaskKind::Compute {
            series,
            order,
            connection,
        } => {
            let c = &m.connections[connection];
            let r = cocycle_report(*series, *order, q, c, &m.model.name, opts.max_order).map_err(err)?;
            Ok(Outcome {
                status: pass_if(r.is_closed()),
                detail: Detail::Compute {
                    series: series.to_string(),
                    order: *order,
                    connection: r.connection.clone(),
                    value: TensorJson::from_tensor(&r.value),
                    closedness_residual: TensorJson::from_tensor(&r.closedness_residual),
                },
                value: Some(r.value),
            })
        }
        TaskKind::Exactness {
            target: which,
            degree_bound,
            expect,
            unknown_cap,
        } => {
            let (t, label) = match which {
                Target::Q => (q.field().clone(), "q".to_string()),
                Target::Task(i) => {
                    let id = &m.tasks[*i].id;
                    match target {
                        Some(Ok(Outcome { value: Some(v), .. })) => (v.clone(), id.clone()),
                        _ => return Err(format!("target task `{id}` did not produce a value")),
                    }
                }
            };
            let cap = unknown_cap.unwrap_or(DEFAULT_UNKNOWN_CAP);
            let v = exactness_witness_capped(q, &t, *degree_bound, cap).map_err(err)?;
            // witnesses are re-verified here as well as in the solver
            let witness_ok = match &v.witness {
                Some(w) => delta(q, w).map_err(err)? == t,
                None => true,
            };
            let expectation_ok = match expect {
                Some(Expectation::Exact) => v.status == ExactnessStatus::ExactWithWitness,
                Some(Expectation::NotExact) => v.status == ExactnessStatus::NotExactWithinBound,
                None => true,
            };
            let closed = v.status != ExactnessStatus::NotClosed;
            Ok(Outcome {
                status: pass_if(witness_ok && expectation_ok && closed),
                detail: Detail::Exactness {
                    target: label,
                    status: v.status.to_string(),
                    degree_bound: v.bound,
                    conclusive: v.conclusive,
                    unknowns: v.unknowns,
                    witness: v.witness.as_ref().map(TensorJson::from_tensor),
                    residual: v.residual.as_ref().map(TensorJson::from_tensor),
                    expected: expect.map(|e| match e {
                        Expectation::Exact => "exact".to_string(),
                        Expectation::NotExact => "not-exact".to_string(),
                    }),
                },
                value: None,
            })
        }
        TaskKind::Transgression {
            series,
            order,
            connections: [a, b],
        } => {
            let (c0, c1) = (&m.connections[a], &m.connections[b]);
            let r = transgression(*series, *order, &m.model, c0, c1, opts.max_order).map_err(err)?;
            Ok(Outcome {
                status: pass_if(r.is_exact()),
                detail: Detail::Transgression {
                    series: series.to_string(),
                    order: *order,
                    connections: [a.clone(), b.clone()],
                    psi: TensorJson::from_tensor(&r.psi),
                    difference: TensorJson::from_tensor(&r.difference),
                    residual: TensorJson::from_tensor(&r.residual),
                },
                value: None,
            })
        }
        TaskKind::CohomologyDims { expect } => {
            let dims = function_cohomology_dims(q).map_err(err)?;
            Ok(Outcome {
                status: pass_if(expect.as_ref().is_none_or(|e| *e == dims)),
                detail: Detail::CohomologyDims {
                    dims,
                    expected: expect.clone(),
                },
                value: None,
            })
        }
    }
}

fn target_of(task: &Task) -> Option<usize> {
    match task.kind {
        TaskKind::Exactness {
            target: Target::Task(i),
            ..
        } => Some(i),
        _ => None,
    }
}

/// Runs every task; failures are recorded per task and never abort the
/// run.
pub fn run_tasks(m: &Manifest, opts: RunOptions) -> Report {
    let n = m.tasks.len();
    let mut results: Vec<Option<TaskResult>> = (0..n).map(|_| None).collect();
    if opts.parallel {
        let dependent = |i: usize| matches!(m.tasks[i].kind, TaskKind::Exactness { .. });
        let first: Vec<(usize, TaskResult)> = (0..n)
            .into_par_iter()
            .filter(|&i| !dependent(i))
            .map(|i| (i, run_task(m, &m.tasks[i], opts, None)))
            .collect();
        for (i, r) in first {
            results[i] = Some(r);
        }
        let second: Vec<(usize, TaskResult)> = (0..n)
            .into_par_iter()
            .filter(|&i| dependent(i))
            .map(|i| {
                let target = target_of(&m.tasks[i]).and_then(|t| results[t].as_ref());
                (i, run_task(m, &m.tasks[i], opts, target))
            })
            .collect();
        for (i, r) in second {
            results[i] = Some(r);
        }
    } else {
        for i in 0..n {
            let target = target_of(&m.tasks[i]).and_then(|t| results[t].as_ref());
            let r = run_task(m, &m.tasks[i], opts, target);
            results[i] = Some(r);
        }
    }
    let mut summary = Summary::default();
    let tasks = results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let task = &m.tasks[i];
            let (status, message, detail) = match r.expect("every task ran") {
                Ok(o) => (o.status, None, Some(o.detail)),
                Err(e) => (Status::Error, Some(e), None),
            };
            match status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Error => summary.errors += 1,
            }
            TaskReport {
                index: i,
                id: task.id.clone(),
                kind: task.kind.name().to_string(),
                status,
                message,
                detail,
            }
        })
        .collect();
    Report {
        manifest: m.name.clone(),
        model: model_json(&m.model),
        max_order: opts.max_order,
        tasks,
        summary,
    }
}
