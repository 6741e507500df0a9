//! Non-interacting multi-qubit Hamiltonians and their sorted level
//! structures.
//!
//! Each qubit l carries a ground-energy offset E_l and a gap alpha_l >= 0, in
//! angular-frequency units (MHz throughout this crate). The full Hamiltonian
//! is the sum of the single-qubit terms, so it is diagonal in the
//! computational basis and its levels are subset sums of the gaps. Scalar
//! couplings of the physical molecules are far smaller than the gaps and are
//! kept as metadata only; they never enter level energies.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::{C64, ComplexMatrix};

/// Per-qubit energies (E_l, alpha_l), qubit 1 first.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitHamiltonian {
    qubits: Vec<(f64, f64)>,
    j_coupling_hz: Option<f64>,
}

impl QubitHamiltonian {
    pub fn new(qubits: Vec<(f64, f64)>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::InvalidParameter("at least one qubit required".into()));
        }
        for (l, &(e, a)) in qubits.iter().enumerate() {
            if !e.is_finite() || !a.is_finite() {
                return Err(Error::InvalidParameter(format!("qubit {}: non-finite energy", l + 1)));
            }
            if a < 0.0 {
                return Err(Error::InvalidParameter(format!("qubit {}: negative gap {a}", l + 1)));
            }
        }
        Ok(Self { qubits, j_coupling_hz: None })
    }

    /// All offsets zero, the common case for the named systems.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        Self::new(gaps.iter().map(|&a| (0.0, a)).collect())
    }

    pub fn with_j_coupling_hz(mut self, j: f64) -> Self {
        self.j_coupling_hz = Some(j);
        self
    }

    /// Scalar coupling in Hz, if the molecule has a published value.
    /// Metadata only; level energies ignore it.
    pub fn j_coupling_hz(&self) -> Option<f64> {
        self.j_coupling_hz
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits.len()
    }

    /// (E_l, alpha_l) for 1-based qubit index l.
    pub fn qubit(&self, l: usize) -> (f64, f64) {
        self.qubits[l - 1]
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.qubits.iter().map(|&(_, a)| a).collect()
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubit_count()
    }

    /// Diagonal energy of computational-basis index b (qubit 1 = MSB).
    pub fn basis_energy(&self, b: usize) -> f64 {
        let n = self.qubit_count();
        self.qubits
            .iter()
            .enumerate()
            .map(|(i, &(e, a))| e + ((b >> (n - 1 - i)) & 1) as f64 * a)
            .sum()
    }
}

/// Sorted energy levels of a qubit subset: offsets above the subset ground
/// energy in non-decreasing order, offsets[0] = 0, with the computational
/// bitstring of every level. Ties are broken by ascending bitstring value so
/// the indexing is deterministic for identical gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStructure {
    pub offsets: Vec<f64>,
    pub ground_energy: f64,
    pub basis_labels: Vec<String>,
}

impl LevelStructure {
    pub fn count(&self) -> usize {
        self.offsets.len()
    }
}

/// Full 2^N diagonal matrix of the register Hamiltonian.
pub fn full_matrix(h: &QubitHamiltonian) -> ComplexMatrix {
    let dim = h.dim();
    let mut m = ComplexMatrix::zeros(dim);
    for b in 0..dim {
        m.set(b, b, C64::new(h.basis_energy(b), 0.0));
    }
    m
}

/// Level structure of the sub-Hamiltonian on `subset` (1-based indices).
pub fn level_structure(h: &QubitHamiltonian, subset: &[usize]) -> Result<LevelStructure> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = h.qubit_count();
    let mut qubits: Vec<usize> = Vec::with_capacity(subset.len());
    for &q in subset {
        if q == 0 || q > n {
            return Err(Error::IndexOutOfRange { index: q, qubits: n });
        }
        if qubits.contains(&q) {
            return Err(Error::DuplicateIndex(q));
        }
        qubits.push(q);
    }
    qubits.sort_unstable();

    let kappa = qubits.len();
    let ground_energy: f64 = qubits.iter().map(|&q| h.qubit(q).0).sum();

    let mut levels: Vec<(f64, usize)> = (0..1usize << kappa)
        .map(|v| {
            let offset: f64 = qubits
                .iter()
                .enumerate()
                .map(|(i, &q)| ((v >> (kappa - 1 - i)) & 1) as f64 * h.qubit(q).1)
                .sum();
            (offset, v)
        })
        .collect();
    // Stable sort on offset keeps ascending-bitstring order within ties.
    levels.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite offsets"));

    Ok(LevelStructure {
        offsets: levels.iter().map(|&(o, _)| o).collect(),
        ground_energy,
        basis_labels: levels.iter().map(|&(_, v)| format!("{v:0kappa$b}")).collect(),
    })
}

/// The spin systems studied in this crate, with their literature gap
/// assignments in MHz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedSystem {
    /// Sodium fluorophosphate: 19F and 31P.
    Nafp,
    /// 5-bromothiophene-2-carbaldehyde: two protons, treated as identical
    /// gaps (the 192 Hz chemical-shift difference is negligible at MHz
    /// scale).
    Brtp,
    /// Fluoroacetonitrile star register: central 19F, two satellite protons.
    Fan,
    /// Trimethyl phosphite star register: central 31P, nine satellite
    /// protons.
    Tmp,
    /// Dibromofluoromethane: 1H, 13C, 19F.
    Dbfm,
    /// N qubits with one common gap.
    Identical { n: usize, gap: f64 },
}

pub const OMEGA_F_MHZ: f64 = 470.385;
pub const OMEGA_P_MHZ: f64 = 202.404;
pub const OMEGA_H_MHZ: f64 = 500.0;
pub const OMEGA_H_BRTP_MHZ: f64 = 500.2;
pub const OMEGA_C_MHZ: f64 = 125.721;

pub fn named_system(sys: NamedSystem) -> Result<QubitHamiltonian> {
    match sys {
        NamedSystem::Nafp => QubitHamiltonian::from_gaps(&[OMEGA_F_MHZ, OMEGA_P_MHZ]),
        NamedSystem::Brtp => {
            Ok(QubitHamiltonian::from_gaps(&[OMEGA_H_BRTP_MHZ, OMEGA_H_BRTP_MHZ])?.with_j_coupling_hz(4.01))
        }
        NamedSystem::Fan => {
            Ok(QubitHamiltonian::from_gaps(&[OMEGA_F_MHZ, OMEGA_H_MHZ, OMEGA_H_MHZ])?.with_j_coupling_hz(45.5))
        }
        NamedSystem::Tmp => {
            let mut gaps = vec![OMEGA_P_MHZ];
            gaps.extend(std::iter::repeat(OMEGA_H_MHZ).take(9));
            Ok(QubitHamiltonian::from_gaps(&gaps)?.with_j_coupling_hz(11.04))
        }
        NamedSystem::Dbfm => QubitHamiltonian::from_gaps(&[OMEGA_H_MHZ, OMEGA_C_MHZ, OMEGA_F_MHZ]),
        NamedSystem::Identical { n, gap } => {
            if n == 0 {
                return Err(Error::InvalidParameter("identical system needs n >= 1".into()));
            }
            QubitHamiltonian::from_gaps(&vec![gap; n])
        }
    }
}

/// Reference gap a system's reports are normalized by when the caller does
/// not choose one: the unit the corresponding plots are drawn in.
pub fn default_unit(sys: NamedSystem) -> (&'static str, f64) {
    match sys {
        NamedSystem::Nafp => ("omega_P", OMEGA_P_MHZ),
        NamedSystem::Brtp => ("omega_H", OMEGA_H_BRTP_MHZ),
        NamedSystem::Fan | NamedSystem::Tmp | NamedSystem::Dbfm => ("omega_H", OMEGA_H_MHZ),
        NamedSystem::Identical { gap, .. } => ("alpha", gap),
    }
}

impl fmt::Display for NamedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedSystem::Nafp => write!(f, "NAFP"),
            NamedSystem::Brtp => write!(f, "BRTP"),
            NamedSystem::Fan => write!(f, "FAN"),
            NamedSystem::Tmp => write!(f, "TMP"),
            NamedSystem::Dbfm => write!(f, "DBFM"),
            NamedSystem::Identical { n, gap } => write!(f, "identical:{n}:{gap}"),
        }
    }
}

impl FromStr for NamedSystem {
    type Err = Error;

    /// Accepts the molecule names case-insensitively, plus
    /// `identical:<n>:<gap>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NAFP" => return Ok(NamedSystem::Nafp),
            "BRTP" => return Ok(NamedSystem::Brtp),
            "FAN" => return Ok(NamedSystem::Fan),
            "TMP" => return Ok(NamedSystem::Tmp),
            "DBFM" => return Ok(NamedSystem::Dbfm),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("identical:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() == 2 {
                let n = parts[0]
                    .parse::<usize>()
                    .map_err(|_| Error::UnknownSystem(s.to_string()))?;
                let gap = parts[1]
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownSystem(s.to_string()))?;
                return Ok(NamedSystem::Identical { n, gap });
            }
        }
        Err(Error::UnknownSystem(s.to_string()))
    }
}

/// Parses a plain-text system table, one system per line:
/// `name = gap1,gap2,...` with gaps in MHz. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_system_config(text: &str) -> Result<Vec<(String, QubitHamiltonian)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let (name, gaps) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "expected `name = gap1,gap2,...`".into(),
        })?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Parse { line: lineno, msg: "empty system name".into() });
        }
        let gaps: Vec<f64> = gaps
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad gap value '{}'", tok.trim()),
                })
            })
            .collect::<Result<_>>()?;
        let h = QubitHamiltonian::from_gaps(&gaps).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        out.push((name.to_string(), h));
    }
    Ok(out)
}
