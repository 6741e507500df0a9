//! Turns command-line strings into library objects: systems (built-in names
//! or config files), energy units, partitions, and state families.

use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use qthermo::cert::Bipartition;
use qthermo::hamiltonian::{
    default_unit, named_system, parse_system_config, NamedSystem, QubitHamiltonian,
};
use qthermo::states::{
    bell_diagonal, noisy_ghz, werner, BellDiagonalParams, DensityOperator, NoisyGhzParams,
};

use crate::{input_err, Failure};

pub struct ResolvedSystem {
    pub label: String,
    pub h: QubitHamiltonian,
    pub named: Option<NamedSystem>,
}

/// Accepts a built-in name (`NAFP`, `identical:3:500`, ...), a config file
/// path, or `path#name` to pick one system out of a multi-entry file.
pub fn resolve_system(spec: &str) -> Result<ResolvedSystem, Failure> {
    if let Some((path, name)) = spec.split_once('#') {
        let entries = load_config(Path::new(path))?;
        return entries
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(label, h)| ResolvedSystem { label, h, named: None })
            .ok_or_else(|| {
                Failure::Input(format!("config file {path} has no system named '{name}'"))
            });
    }
    if let Ok(named) = NamedSystem::from_str(spec) {
        let h = named_system(named).map_err(input_err)?;
        return Ok(ResolvedSystem { label: named.to_string(), h, named: Some(named) });
    }
    let path = Path::new(spec);
    if path.exists() {
        let mut entries = load_config(path)?;
        return match entries.len() {
            1 => {
                let (label, h) = entries.pop().expect("one entry");
                Ok(ResolvedSystem { label, h, named: None })
            }
            0 => Err(Failure::Input(format!("config file {spec} defines no systems"))),
            _ => {
                let names: Vec<String> = entries.into_iter().map(|(n, _)| n).collect();
                Err(Failure::Input(format!(
                    "config file {spec} defines several systems ({}); pick one with {spec}#name",
                    names.join(", ")
                )))
            }
        };
    }
    Err(Failure::Input(format!(
        "unknown system '{spec}': not a built-in name and no file at that path"
    )))
}

fn load_config(path: &Path) -> Result<Vec<(String, QubitHamiltonian)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_system_config(&text).map_err(input_err)
}

/// `None` picks the system's reference gap (MHz for config-file systems);
/// otherwise the flag must be `MHz` or that reference gap's name.
pub fn resolve_unit(
    flag: Option<&str>,
    sys: &ResolvedSystem,
) -> Result<(String, f64), Failure> {
    let default = sys.named.map(default_unit);
    match flag {
        None => Ok(default
            .map(|(name, scale)| (name.to_string(), scale))
            .unwrap_or_else(|| ("MHz".to_string(), 1.0))),
        Some(name) if name.eq_ignore_ascii_case("mhz") => Ok(("MHz".to_string(), 1.0)),
        Some(name) => {
            if let Some((def_name, scale)) = default {
                if name == def_name {
                    return Ok((def_name.to_string(), scale));
                }
            }
            let allowed = match default {
                Some((def_name, _)) => format!("MHz or {def_name}"),
                None => "MHz".to_string(),
            };
            Err(Failure::Input(format!(
                "unknown unit '{name}' for system {}: expected {allowed}",
                sys.label
            )))
        }
    }
}

/// Comma-separated 1-based qubit indices, e.g. `1,3`.
pub fn parse_partition(spec: &str, qubit_count: usize) -> Result<Bipartition, Failure> {
    let indices: Vec<usize> = spec
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Input(format!("bad partition index '{}'", tok.trim())))
        })
        .collect::<Result<_, _>>()?;
    Bipartition::new(indices, qubit_count).map_err(input_err)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Two-qubit Bell-diagonal states from preparation angles beta, gamma
    #[value(name = "bell-diag")]
    BellDiag,
    /// Two-qubit Werner states from a mixing parameter lambda
    Werner,
    /// N-qubit noisy GHZ states from a mixing parameter lambda
    #[value(name = "noisy-ghz")]
    NoisyGhz,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::BellDiag => "bell-diag",
            Family::Werner => "werner",
            Family::NoisyGhz => "noisy-ghz",
        }
    }

    pub fn build(
        self,
        h: &QubitHamiltonian,
        beta: Option<f64>,
        gamma: Option<f64>,
        lambda: Option<f64>,
    ) -> Result<DensityOperator, Failure> {
        match self {
            Family::BellDiag => {
                require_qubits(h, 2, self)?;
                let (beta, gamma) = match (beta, gamma) {
                    (Some(b), Some(g)) => (b, g),
                    _ => {
                        return Err(Failure::Input(
                            "family bell-diag needs --beta and --gamma".into(),
                        ))
                    }
                };
                Ok(bell_diagonal(BellDiagonalParams::new(beta, gamma).map_err(input_err)?))
            }
            Family::Werner => {
                require_qubits(h, 2, self)?;
                let lambda = lambda
                    .ok_or_else(|| Failure::Input("family werner needs --lambda".into()))?;
                werner(lambda).map_err(input_err)
            }
            Family::NoisyGhz => {
                let lambda = lambda
                    .ok_or_else(|| Failure::Input("family noisy-ghz needs --lambda".into()))?;
                Ok(noisy_ghz(
                    NoisyGhzParams::new(lambda, h.qubit_count()).map_err(input_err)?,
                ))
            }
        }
    }

    /// The noisy GHZ family follows the system size; the two-qubit families
    /// are fixed at lambda in a 2-qubit register.
    pub fn lambda_state(
        self,
        h: &QubitHamiltonian,
        lambda: f64,
    ) -> qthermo::Result<DensityOperator> {
        match self {
            Family::Werner => werner(lambda),
            Family::NoisyGhz => Ok(noisy_ghz(NoisyGhzParams::new(lambda, h.qubit_count())?)),
            Family::BellDiag => Err(qthermo::Error::InvalidParameter(
                "bell-diag is not a lambda family".into(),
            )),
        }
    }
}

fn require_qubits(h: &QubitHamiltonian, n: usize, family: Family) -> Result<(), Failure> {
    if h.qubit_count() != n {
        return Err(Failure::Input(format!(
            "family {} needs a {n}-qubit system, got {} qubits",
            family.name(),
            h.qubit_count()
        )));
    }
    Ok(())
}
