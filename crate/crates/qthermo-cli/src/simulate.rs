//! Runs a preparation or passivization program at the density-matrix level
//! and reports the energy at every labeled snapshot plus the fidelity of
//! the final state against its analytic target.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use qthermo::circuit::{
    bell_diag_program, ghz_program, passivization_program, run, str_lopsidedness, GateProgram,
    PassivizationFamily,
};
use qthermo::cert::{mean_energy, passive_state};
use qthermo::hamiltonian::QubitHamiltonian;
use qthermo::states::{
    bell_diagonal, fidelity, noisy_ghz, pseudo_pure, pure_state, BellDiagonalParams,
    DensityOperator, NoisyGhzParams,
};
use qthermo::C64;

use crate::output::write_records;
use crate::resolve::{resolve_system, resolve_unit, ResolvedSystem};
use crate::{compute_err, input_err, Failure, OutputArgs};

#[derive(Args)]
pub struct SimulateArgs {
    /// Named program (ghz, bell-diag, exp3) or a program file path
    program: String,
    /// Register size for ghz (taken from --system when omitted)
    #[arg(long)]
    n: Option<usize>,
    /// GHZ preparation angle; the mixing parameter is cos(theta)
    #[arg(long)]
    theta: Option<f64>,
    /// First Bell preparation angle
    #[arg(long)]
    beta: Option<f64>,
    /// Second Bell preparation angle
    #[arg(long)]
    gamma: Option<f64>,
    /// Mixing parameter for exp3
    #[arg(long)]
    lambda: Option<f64>,
    /// System for energies; defaults: bell-diag NAFP, exp3 DBFM,
    /// ghz identical:<n>:500
    #[arg(long)]
    system: Option<String>,
    /// Append the family's passivization circuit after the preparation
    #[arg(long)]
    passivize: bool,
    /// Input state file for a program loaded from disk (default: ground)
    #[arg(long)]
    state: Option<PathBuf>,
    /// Write the final density matrix to this file
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Energy unit: MHz or the system's reference gap name
    #[arg(long)]
    units: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct SimulateRow {
    stage: String,
    energy: f64,
    fidelity: Option<f64>,
    lopsidedness: Option<f64>,
    units: String,
}

struct Job {
    system: ResolvedSystem,
    program: GateProgram,
    input: DensityOperator,
    /// Analytic final state, where the family defines one.
    target: Option<DensityOperator>,
    /// Extra stage for the three-qubit experiment: the {1,2} marginal
    /// passivized by its own one-gate circuit.
    local_stage: Option<(DensityOperator, QubitHamiltonian, DensityOperator)>,
}

fn ground_vector(qubit_count: usize) -> Vec<C64> {
    let mut psi = vec![C64::new(0.0, 0.0); 1 << qubit_count];
    psi[0] = C64::new(1.0, 0.0);
    psi
}

fn concat_programs(a: &GateProgram, b: &GateProgram) -> qthermo::Result<GateProgram> {
    let mut steps = a.steps().to_vec();
    steps.extend_from_slice(b.steps());
    GateProgram::new(a.qubit_count(), steps)
}

fn resolve_simulation(args: &SimulateArgs) -> Result<Job, Failure> {
    match args.program.as_str() {
        "ghz" => {
            let system = match (&args.system, args.n) {
                (Some(spec), _) => resolve_system(spec)?,
                (None, Some(n)) => resolve_system(&format!("identical:{n}:500"))?,
                (None, None) => {
                    return Err(Failure::Input("ghz needs --n or --system".into()))
                }
            };
            let n = system.h.qubit_count();
            if let Some(flag_n) = args.n {
                if flag_n != n {
                    return Err(Failure::Input(format!(
                        "--n {flag_n} disagrees with the {n}-qubit system {}",
                        system.label
                    )));
                }
            }
            let theta =
                args.theta.ok_or_else(|| Failure::Input("ghz needs --theta".into()))?;
            let (prep, lambda) = ghz_program(n, theta).map_err(input_err)?;
            let params = NoisyGhzParams::new(lambda, n).map_err(input_err)?;
            let input = pseudo_pure(&ground_vector(n), lambda).map_err(input_err)?;
            let (program, target) = if args.passivize {
                let pass =
                    passivization_program(PassivizationFamily::NoisyGhz { qubit_count: n })
                        .map_err(input_err)?;
                (concat_programs(&prep, &pass).map_err(input_err)?, input.clone())
            } else {
                (prep, noisy_ghz(params))
            };
            Ok(Job { system, program, input, target: Some(target), local_stage: None })
        }
        "bell-diag" => {
            let system = match &args.system {
                Some(spec) => resolve_system(spec)?,
                None => resolve_system("NAFP")?,
            };
            if system.h.qubit_count() != 2 {
                return Err(Failure::Input(format!(
                    "bell-diag needs a 2-qubit system, got {}",
                    system.h.qubit_count()
                )));
            }
            let (beta, gamma) = match (args.beta, args.gamma) {
                (Some(b), Some(g)) => (b, g),
                _ => return Err(Failure::Input("bell-diag needs --beta and --gamma".into())),
            };
            let params = BellDiagonalParams::new(beta, gamma).map_err(input_err)?;
            let prep = bell_diag_program(beta, gamma).map_err(input_err)?;
            // The preparation acts on |11>.
            let mut psi = vec![C64::new(0.0, 0.0); 4];
            psi[3] = C64::new(1.0, 0.0);
            let input = pure_state(&psi).map_err(input_err)?;
            let mixed = bell_diagonal(params);
            let (program, target) = if args.passivize {
                let pass = passivization_program(PassivizationFamily::BellDiagonal(params))
                    .map_err(input_err)?;
                let passive = passive_state(&mixed, &system.h).map_err(compute_err)?;
                (concat_programs(&prep, &pass).map_err(input_err)?, passive)
            } else {
                (prep, mixed)
            };
            Ok(Job { system, program, input, target: Some(target), local_stage: None })
        }
        "exp3" => {
            if args.passivize {
                return Err(Failure::Input(
                    "exp3 already is the passivization stage; drop --passivize".into(),
                ));
            }
            let system = match &args.system {
                Some(spec) => resolve_system(spec)?,
                None => resolve_system("DBFM")?,
            };
            if system.h.qubit_count() != 3 {
                return Err(Failure::Input(format!(
                    "exp3 needs a 3-qubit system, got {}",
                    system.h.qubit_count()
                )));
            }
            let lambda =
                args.lambda.ok_or_else(|| Failure::Input("exp3 needs --lambda".into()))?;
            let params = NoisyGhzParams::new(lambda, 3).map_err(input_err)?;
            let input = noisy_ghz(params);
            let program =
                passivization_program(PassivizationFamily::Exp3Ghz).map_err(input_err)?;
            let target = pseudo_pure(&ground_vector(3), lambda).map_err(input_err)?;

            let marginal = input.marginal(&[1, 2]).map_err(compute_err)?;
            let h12 = QubitHamiltonian::new(vec![system.h.qubit(1), system.h.qubit(2)])
                .map_err(compute_err)?;
            let local_passive =
                qthermo::circuit::exp3_local_passive(&marginal).map_err(compute_err)?;
            Ok(Job {
                system,
                program,
                input,
                target: Some(target),
                local_stage: Some((local_passive, h12, marginal)),
            })
        }
        path => {
            if args.passivize {
                return Err(Failure::Input(
                    "--passivize applies to the named families only".into(),
                ));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read program {path}: {e}")))?;
            let state = match &args.state {
                Some(p) => {
                    let file = std::fs::File::open(p).map_err(input_err)?;
                    let mut reader = std::io::BufReader::new(file);
                    Some(qthermo::states::read_matrix(&mut reader).map_err(input_err)?)
                }
                None => None,
            };
            // The text form carries no register size; take it from the
            // system, the --n flag, or the input state, in that order.
            let system = match (&args.system, args.n, &state) {
                (Some(spec), _, _) => resolve_system(spec)?,
                (None, Some(n), _) => resolve_system(&format!("identical:{n}:500"))?,
                (None, None, Some(rho)) => {
                    resolve_system(&format!("identical:{}:500", rho.qubit_count()))?
                }
                (None, None, None) => {
                    return Err(Failure::Input(
                        "a program file needs --system, --n, or --state to fix the register size"
                            .into(),
                    ))
                }
            };
            let n = system.h.qubit_count();
            if let Some(flag_n) = args.n {
                if flag_n != n {
                    return Err(Failure::Input(format!(
                        "--n {flag_n} disagrees with the {n}-qubit system {}",
                        system.label
                    )));
                }
            }
            let program = GateProgram::parse(&text, n).map_err(input_err)?;
            let input = match state {
                Some(rho) => {
                    if rho.qubit_count() != n {
                        return Err(Failure::Input(format!(
                            "input state holds {} qubits, program needs {n}",
                            rho.qubit_count()
                        )));
                    }
                    rho
                }
                None => pure_state(&ground_vector(n)).map_err(compute_err)?,
            };
            Ok(Job { system, program, input, target: None, local_stage: None })
        }
    }
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let job = resolve_simulation(&args)?;
    let unit = resolve_unit(args.units.as_deref(), &job.system)?;

    let trace = run(&job.program, &job.input).map_err(compute_err)?;
    let mut rows = Vec::new();
    for (label, state) in trace.snapshots() {
        rows.push(SimulateRow {
            stage: label.clone(),
            energy: mean_energy(state, &job.system.h).map_err(compute_err)? / unit.1,
            fidelity: None,
            lopsidedness: None,
            units: unit.0.clone(),
        });
    }

    if let Some((local_passive, h12, marginal)) = &job.local_stage {
        let local_target = passive_state(marginal, h12).map_err(compute_err)?;
        rows.push(SimulateRow {
            stage: "local-passive".to_string(),
            energy: mean_energy(local_passive, h12).map_err(compute_err)? / unit.1,
            fidelity: Some(fidelity(local_passive, &local_target).map_err(compute_err)?),
            lopsidedness: None,
            units: unit.0.clone(),
        });
    }

    let final_state = trace.final_state();
    rows.push(SimulateRow {
        stage: "final".to_string(),
        energy: mean_energy(final_state, &job.system.h).map_err(compute_err)? / unit.1,
        fidelity: match &job.target {
            Some(target) => Some(fidelity(final_state, target).map_err(compute_err)?),
            None => None,
        },
        lopsidedness: str_lopsidedness(&job.system.h).ok(),
        units: unit.0.clone(),
    });

    if let Some(path) = &args.dump {
        let mut file = std::fs::File::create(path)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
        qthermo::states::write_matrix(&mut file, final_state).map_err(compute_err)?;
    }

    write_records(&rows, args.output.format, args.output.out.as_deref())
}
