//! CGLS-vs-BRA comparison harness: runs both reconstructions over a schedule
//! of iteration counts and tabulates percent-correct and wrong-pixel counts
//! per row, CSV-ready.
//!
//! Schedule entries are independent solves and may run on separate threads;
//! `GRIDTOMO_THREADS` caps the worker count and rows always come back in
//! schedule order.

use std::io::Write;

use crate::bra::{binary_round, bra, BraConfig};
use crate::error::{Error, Result};
use crate::lattice::{check_binary_uniqueness, DirectionSet, GridDims};
use crate::metrics::compare;
use crate::phantom::{generate_phantom, PhantomSpec};
use crate::projector::{Image, ProjectionVector, SparseProjectionMatrix};
use crate::solver::{cgls, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub kappa: usize,
    pub cgls_percent: f64,
    pub bra_percent: f64,
    pub cgls_wrong: usize,
    pub bra_wrong: usize,
}

/// Worker cap: `GRIDTOMO_THREADS` when set (minimum 1), else the machine's
/// available parallelism.
pub fn thread_cap() -> usize {
    match std::env::var("GRIDTOMO_THREADS") {
        Ok(v) => v.trim().parse::<usize>().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

fn bench_row(
    s: &DirectionSet,
    grid: GridDims,
    a: &SparseProjectionMatrix,
    p: &ProjectionVector,
    truth: &Image,
    kappa: usize,
) -> Result<BenchRow> {
    let (xk, _) = cgls(a, p, &SolverConfig::fixed(kappa))?;
    let plain = compare(truth, &binary_round(&xk))?;
    let res = bra(s, grid, p, &BraConfig::new(kappa))?;
    let corrected = compare(truth, &res.binary)?;
    Ok(BenchRow {
        kappa,
        cgls_percent: plain.percent_correct,
        bra_percent: corrected.percent_correct,
        cgls_wrong: plain.wrong_count,
        bra_wrong: corrected.wrong_count,
    })
}

/// Runs the schedule against a generated phantom with the default worker
/// cap. Requires a set of binary uniqueness, like the reconstruction
/// pipeline itself.
pub fn run_bench(
    spec: &PhantomSpec,
    s: &DirectionSet,
    schedule: &[usize],
) -> Result<Vec<BenchRow>> {
    run_bench_on(spec, s, schedule, thread_cap())
}

/// Like [`run_bench`] with an explicit worker count (1 = fully sequential).
pub fn run_bench_on(
    spec: &PhantomSpec,
    s: &DirectionSet,
    schedule: &[usize],
    workers: usize,
) -> Result<Vec<BenchRow>> {
    let grid = spec.dims;
    let report = check_binary_uniqueness(s, grid);
    if !report.is_binary_uniqueness_set {
        return Err(Error::NotUniquenessSet(format!(
            "bench requires a set of binary uniqueness on {grid}"
        )));
    }
    let truth = generate_phantom(spec)?;
    let a = SparseProjectionMatrix::build(s, grid);
    let p = a.forward_project(&truth)?;

    let workers = workers.max(1).min(schedule.len().max(1));
    let mut rows: Vec<Option<Result<BenchRow>>> = Vec::new();
    rows.resize_with(schedule.len(), || None);
    if workers <= 1 {
        for (slot, &kappa) in rows.iter_mut().zip(schedule) {
            *slot = Some(bench_row(s, grid, &a, &p, &truth, kappa));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut rows);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= schedule.len() {
                        break;
                    }
                    let row = bench_row(s, grid, &a, &p, &truth, schedule[i]);
                    slots.lock().unwrap()[i] = Some(row);
                });
            }
        });
    }
    rows.into_iter().map(|r| r.expect("every slot filled")).collect()
}

/// CSV in schedule order: iterations, the two percent-correct columns, and
/// the two wrong-pixel columns.
pub fn write_bench_csv<W: Write>(w: &mut W, rows: &[BenchRow]) -> Result<()> {
    writeln!(w, "kappa,cgls_percent,bra_percent,cgls_wrong,bra_wrong")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.2},{:.2},{},{}",
            r.kappa, r.cgls_percent, r.bra_percent, r.cgls_wrong, r.bra_wrong
        )?;
    }
    Ok(())
}

/// Rows where plain CGLS rounding beat the corrected reconstruction. The
/// corrected column is expected to dominate; violations are worth logging
/// but are not an error.
pub fn trend_violations(rows: &[BenchRow]) -> Vec<usize> {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| r.bra_percent < r.cgls_percent)
        .map(|(i, _)| i)
        .collect()
}
