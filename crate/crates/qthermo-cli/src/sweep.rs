//! Grid sweeps of the gap and the three bounds. Bell-diagonal states sweep
//! a 2-D (beta, gamma) grid over [0, pi]^2; the lambda families sweep
//! [0, 1]. Grid points are independent, so they are evaluated by a worker
//! pool and reassembled in row-major order.

use clap::Args;
use serde::Serialize;

use qthermo::cert::{certify, CertificationReport, Verdict};
use qthermo::states::{bell_diagonal, BellDiagonalParams};

use crate::output::write_records;
use crate::resolve::{parse_partition, resolve_system, resolve_unit, Family};
use crate::{compute_err, Failure, OutputArgs};

#[derive(Args)]
pub struct SweepArgs {
    /// Named system, config file path, or path#name
    #[arg(long)]
    system: String,
    /// Family to sweep: bell-diag walks (beta, gamma), the others walk lambda
    #[arg(long, value_enum)]
    family: Family,
    /// Qubits on the near side of the cut, comma-separated
    #[arg(long, default_value = "1")]
    partition: String,
    /// Points per grid axis
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    /// Energy unit for the table: MHz or the system's reference gap name
    #[arg(long)]
    units: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct AngleRow {
    beta: f64,
    gamma: f64,
    delta: f64,
    bound_gl: f64,
    bound_g: f64,
    bound_i: f64,
    verdict_gl: u8,
    verdict_g: u8,
    verdict_i: u8,
    units: String,
}

#[derive(Serialize)]
struct LambdaRow {
    lambda: f64,
    delta: f64,
    bound_gl: f64,
    bound_g: f64,
    bound_i: f64,
    verdict_gl: u8,
    verdict_g: u8,
    verdict_i: u8,
    units: String,
}

fn flag(v: Verdict) -> u8 {
    match v {
        Verdict::Entangled => 1,
        Verdict::Inconclusive => 0,
    }
}

pub fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.resolution < 2 {
        return Err(Failure::Input(format!(
            "resolution {} too small: a sweep needs at least 2 points per axis",
            args.resolution
        )));
    }
    let sys = resolve_system(&args.system)?;
    let part = parse_partition(&args.partition, sys.h.qubit_count())?;
    let unit = resolve_unit(args.units.as_deref(), &sys)?;

    match args.family {
        Family::BellDiag => {
            if sys.h.qubit_count() != 2 {
                return Err(Failure::Input(format!(
                    "family bell-diag needs a 2-qubit system, got {} qubits",
                    sys.h.qubit_count()
                )));
            }
            let r = args.resolution;
            let angle = |i: usize| i as f64 * std::f64::consts::PI / (r - 1) as f64;
            let grid: Vec<(f64, f64)> = (0..r)
                .flat_map(|i| (0..r).map(move |j| (angle(i), angle(j))))
                .collect();
            let rows = parallel_map(&grid, |&(beta, gamma)| {
                let params = BellDiagonalParams::new(beta, gamma).map_err(compute_err)?;
                let report = certify(&bell_diagonal(params), &sys.h, &part, (&unit.0, unit.1))
                    .map_err(compute_err)?;
                Ok(angle_row(beta, gamma, report))
            })?;
            write_records(&rows, args.output.format, args.output.out.as_deref())
        }
        family => {
            let r = args.resolution;
            let lambdas: Vec<f64> =
                (0..r).map(|i| i as f64 / (r - 1) as f64).collect();
            let rows = parallel_map(&lambdas, |&lambda| {
                let rho = family.lambda_state(&sys.h, lambda).map_err(compute_err)?;
                let report =
                    certify(&rho, &sys.h, &part, (&unit.0, unit.1)).map_err(compute_err)?;
                Ok(lambda_row(lambda, report))
            })?;
            write_records(&rows, args.output.format, args.output.out.as_deref())
        }
    }
}

fn angle_row(beta: f64, gamma: f64, report: CertificationReport) -> AngleRow {
    AngleRow {
        beta,
        gamma,
        delta: report.delta,
        bound_gl: report.bound_gl,
        bound_g: report.bound_g,
        bound_i: report.bound_i,
        verdict_gl: flag(report.verdict_gl),
        verdict_g: flag(report.verdict_g),
        verdict_i: flag(report.verdict_i),
        units: report.units,
    }
}

fn lambda_row(lambda: f64, report: CertificationReport) -> LambdaRow {
    LambdaRow {
        lambda,
        delta: report.delta,
        bound_gl: report.bound_gl,
        bound_g: report.bound_g,
        bound_i: report.bound_i,
        verdict_gl: flag(report.verdict_gl),
        verdict_g: flag(report.verdict_g),
        verdict_i: flag(report.verdict_i),
        units: report.units,
    }
}

/// Maps `eval` over `params` on a scoped worker pool. Output order matches
/// input order no matter how the workers are scheduled, so sweep tables are
/// reproducible byte for byte.
fn parallel_map<P, R, F>(params: &[P], eval: F) -> Result<Vec<R>, Failure>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> Result<R, Failure> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
        .min(params.len().max(1));
    let chunk_len = params.len().div_ceil(workers);
    let mut slots: Vec<Option<R>> = (0..params.len()).map(|_| None).collect();

    std::thread::scope(|scope| -> Result<(), Failure> {
        let eval = &eval;
        let mut handles = Vec::with_capacity(workers);
        for (param_chunk, slot_chunk) in params.chunks(chunk_len).zip(slots.chunks_mut(chunk_len))
        {
            handles.push(scope.spawn(move || -> Result<(), Failure> {
                for (param, slot) in param_chunk.iter().zip(slot_chunk.iter_mut()) {
                    *slot = Some(eval(param)?);
                }
                Ok(())
            }));
        }
        for handle in handles {
            handle.join().expect("sweep worker panicked")?;
        }
        Ok(())
    })?;

    Ok(slots.into_iter().map(|slot| slot.expect("filled by worker")).collect())
}
