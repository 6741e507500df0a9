//! Density operators and the state families used by the certification
//! examples: Bell-diagonal two-qubit states, noisy GHZ mixtures, the Werner
//! line, and pseudo-pure mixtures.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::tensor::{self, C64, ComplexMatrix, HERMITICITY_TOL};

pub const TRACE_TOL: f64 = 1e-10;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A validated N-qubit density operator: Hermitian within 1e-10, unit trace
/// within 1e-10, eigenvalues above -1e-10.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    qubit_count: usize,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, qubit_count: usize) -> Result<Self> {
        if matrix.dim() != 1usize << qubit_count {
            return Err(Error::DimMismatch(matrix.dim(), 1usize << qubit_count));
        }
        let rho = Self { matrix, qubit_count };
        rho.check_invariants()?;
        Ok(rho)
    }

    /// For constructors whose output is positive with unit trace by
    /// construction. Debug builds verify shape, hermiticity and trace;
    /// positivity stays the constructor's guarantee, so no eigensolve
    /// runs here.
    pub(crate) fn trusted(matrix: ComplexMatrix, qubit_count: usize) -> Self {
        debug_assert_eq!(matrix.dim(), 1usize << qubit_count);
        let rho = Self { matrix, qubit_count };
        debug_assert!(rho.matrix.hermiticity_defect() <= HERMITICITY_TOL);
        debug_assert!({
            let tr = rho.matrix.trace();
            (tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL
        });
        rho
    }

    pub fn check_invariants(&self) -> Result<()> {
        let defect = self.matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { defect, tol: HERMITICITY_TOL });
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {} is not 1", tr.re)));
        }
        let eigs = tensor::hermitian_eigenvalues(&self.matrix)?;
        if let Some(&min) = eigs.last() {
            if min < EIGENVALUE_FLOOR {
                return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues in non-increasing order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        tensor::hermitian_eigenvalues(&self.matrix)
    }

    /// Reduced state on `keep` (1-based qubit indices, qubit 1 = MSB).
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityOperator> {
        let m = tensor::partial_trace(&self.matrix, keep, self.qubit_count)?;
        Ok(Self { matrix: m, qubit_count: keep.len() })
    }

    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        let m = tensor::apply_unitary(&self.matrix, u)?;
        Ok(Self { matrix: m, qubit_count: self.qubit_count })
    }
}

/// Preparation angles of the Bell-diagonal family, both in [0, pi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDiagonalParams {
    pub beta: f64,
    pub gamma: f64,
}

impl BellDiagonalParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma)] {
            if !(0.0..=std::f64::consts::PI).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, pi]")));
            }
        }
        Ok(Self { beta, gamma })
    }
}

/// Mixing parameter and register size of the noisy GHZ family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyGhzParams {
    pub lambda: f64,
    pub qubit_count: usize,
}

impl NoisyGhzParams {
    pub fn new(lambda: f64, qubit_count: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
        }
        if qubit_count < 2 {
            return Err(Error::InvalidParameter("noisy GHZ needs at least 2 qubits".into()));
        }
        Ok(Self { lambda, qubit_count })
    }
}

/// Bell vector |B_ij>: i selects the parity sector, j the relative sign.
fn bell_vector(i: usize, j: usize) -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if j == 0 { s } else { -s };
    let mut v = [C64::new(0.0, 0.0); 4];
    if i == 0 {
        v[0] = C64::new(s, 0.0);
        v[3] = C64::new(sign, 0.0);
    } else {
        v[1] = C64::new(s, 0.0);
        v[2] = C64::new(sign, 0.0);
    }
    v
}

/// Bell-basis weights (p00, p01, p10, p11) for the preparation angles.
pub fn bell_weights(params: BellDiagonalParams) -> [f64; 4] {
    let (sb, cb) = ((params.beta / 2.0).sin(), (params.beta / 2.0).cos());
    let (sg, cg) = ((params.gamma / 2.0).sin(), (params.gamma / 2.0).cos());
    [(sb * sg).powi(2), (sb * cg).powi(2), (cb * sg).powi(2), (cb * cg).powi(2)]
}

/// Two-qubit state diagonal in the Bell basis with `bell_weights`.
pub fn bell_diagonal(params: BellDiagonalParams) -> DensityOperator {
    let w = bell_weights(params);
    let mut m = ComplexMatrix::zeros(4);
    for (k, &p) in w.iter().enumerate() {
        let v = bell_vector(k / 2, k % 2);
        let term = ComplexMatrix::outer(&v).scaled(C64::new(p, 0.0));
        m = m.add(&term).expect("same dims");
    }
    DensityOperator::trusted(m, 2)
}

/// lambda |GHZ><GHZ| + (1 - lambda) I / 2^N.
pub fn noisy_ghz(params: NoisyGhzParams) -> DensityOperator {
    let dim = 1usize << params.qubit_count;
    let bg = (1.0 - params.lambda) / dim as f64;
    let mut m = ComplexMatrix::zeros(dim);
    for d in 0..dim {
        m.set(d, d, C64::new(bg, 0.0));
    }
    let corner = C64::new(params.lambda / 2.0, 0.0);
    for &(r, c) in &[(0, 0), (0, dim - 1), (dim - 1, 0), (dim - 1, dim - 1)] {
        let cur = m.get(r, c);
        m.set(r, c, cur + corner);
    }
    DensityOperator::trusted(m, params.qubit_count)
}

/// Spectrum of `noisy_ghz`, non-increasing: one level at
/// (1 + (2^N - 1) lambda) / 2^N and 2^N - 1 levels at (1 - lambda) / 2^N.
pub fn noisy_ghz_spectrum(params: NoisyGhzParams) -> Vec<f64> {
    let dim = 1usize << params.qubit_count;
    let top = (1.0 + (dim as f64 - 1.0) * params.lambda) / dim as f64;
    let rest = (1.0 - params.lambda) / dim as f64;
    let mut t = vec![rest; dim];
    t[0] = top;
    t
}

/// lambda |psi-><psi-| + (1 - lambda) I / 4 with the singlet psi-.
pub fn werner(lambda: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)];
    let mut m = ComplexMatrix::outer(&singlet).scaled(C64::new(lambda, 0.0));
    for d in 0..4 {
        let cur = m.get(d, d);
        m.set(d, d, cur + C64::new((1.0 - lambda) / 4.0, 0.0));
    }
    Ok(DensityOperator::trusted(m, 2))
}

/// Spectrum of `werner`, non-increasing.
pub fn werner_spectrum(lambda: f64) -> Vec<f64> {
    vec![(1.0 + 3.0 * lambda) / 4.0, (1.0 - lambda) / 4.0, (1.0 - lambda) / 4.0, (1.0 - lambda) / 4.0]
}

/// Werner mixing parameter after free evolution for time tau under
/// long-lived-singlet relaxation with time constant t_lls (same time unit).
pub fn werner_purity_at(tau: f64, t_lls: f64) -> Result<f64> {
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be non-negative")));
    }
    if t_lls <= 0.0 || !t_lls.is_finite() {
        return Err(Error::InvalidParameter(format!("t_lls = {t_lls} must be positive")));
    }
    Ok((-tau / t_lls).exp())
}

/// Entanglement class of a noisy GHZ state by its exact separability
/// thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzClass {
    FullySeparable,
    BiseparableRegion,
    GenuinelyEntangled,
}

/// Classifies `params` against the known thresholds: fully separable iff
/// lambda <= 1 / (1 + 2^(N-1)), genuinely entangled iff
/// lambda > (1 - 2^(1-N)) / (2 - 2^(1-N)).
pub fn ghz_classifier(params: NoisyGhzParams) -> GhzClass {
    let half_dim = (1u64 << (params.qubit_count - 1)) as f64;
    let sep = 1.0 / (1.0 + half_dim);
    let gme = (1.0 - 1.0 / half_dim) / (2.0 - 1.0 / half_dim);
    if params.lambda <= sep {
        GhzClass::FullySeparable
    } else if params.lambda > gme {
        GhzClass::GenuinelyEntangled
    } else {
        GhzClass::BiseparableRegion
    }
}

/// epsilon |psi><psi| + (1 - epsilon) I / 2^N, the pseudo-pure preparation.
/// `psi` must be normalized; its length fixes the qubit count.
pub fn pseudo_pure(psi: &[C64], epsilon: f64) -> Result<DensityOperator> {
    let dim = psi.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside [0, 1]")));
    }
    let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("state vector norm^2 = {norm2} is not 1")));
    }
    let mut m = ComplexMatrix::outer(psi).scaled(C64::new(epsilon, 0.0));
    for d in 0..dim {
        let cur = m.get(d, d);
        m.set(d, d, cur + C64::new((1.0 - epsilon) / dim as f64, 0.0));
    }
    Ok(DensityOperator::trusted(m, dim.trailing_zeros() as usize))
}

/// Pure-state density operator, the epsilon = 1 pseudo-pure mixture.
pub fn pure_state(psi: &[C64]) -> Result<DensityOperator> {
    pseudo_pure(psi, 1.0)
}

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2. Symmetric in its
/// arguments; 1 iff the states coincide.
pub fn fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let dec = tensor::eig_hermitian(&a.matrix)?;
    let n = a.dim();
    // sqrt(a) from the eigenbasis, clamping the -1e-10-scale noise floor.
    let mut scaled = dec.eigenvectors.clone();
    for (j, &w) in dec.eigenvalues.iter().enumerate() {
        let s = w.max(0.0).sqrt();
        for i in 0..n {
            let v = scaled.get(i, j);
            scaled.set(i, j, v * s);
        }
    }
    let sqrt_a = scaled.matmul(&dec.eigenvectors.dagger())?;
    let inner = sqrt_a.matmul(&b.matrix)?.matmul(&sqrt_a)?;
    let eigs = tensor::hermitian_eigenvalues(&inner)?;
    let root_sum: f64 = eigs.iter().map(|&w| w.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

/// Trace distance (1/2) ||a - b||_1.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let diff = a.matrix.sub(&b.matrix)?;
    let eigs = tensor::hermitian_eigenvalues(&diff)?;
    Ok(eigs.iter().map(|w| w.abs()).sum::<f64>() / 2.0)
}

/// Writes the plain-text matrix format: a `qubits N` header, then 2^N rows
/// of 2^N whitespace-separated `re+imj` entries.
pub fn write_matrix<W: Write>(w: &mut W, rho: &DensityOperator) -> Result<()> {
    writeln!(w, "qubits {}", rho.qubit_count())?;
    let dim = rho.dim();
    for r in 0..dim {
        let row: Vec<String> = (0..dim).map(|c| format_entry(rho.matrix.get(r, c))).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

fn format_entry(z: C64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}j", z.re, z.im)
    } else {
        format!("{}-{}j", z.re, -z.im)
    }
}

/// Reads the format written by `write_matrix`, re-validating every density
/// operator invariant.
pub fn read_matrix<R: BufRead>(r: &mut R) -> Result<DensityOperator> {
    let mut lines = r.lines().enumerate();
    let (lineno, header) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (i + 1, line);
                }
            }
            None => return Err(Error::Parse { line: 1, msg: "empty input".into() }),
        }
    };
    let qubit_count = header
        .trim()
        .strip_prefix("qubits")
        .map(str::trim)
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse { line: lineno, msg: "expected header `qubits N`".into() })?;
    if qubit_count == 0 || qubit_count > 20 {
        return Err(Error::Parse { line: lineno, msg: format!("unsupported qubit count {qubit_count}") });
    }

    let dim = 1usize << qubit_count;
    let mut m = ComplexMatrix::zeros(dim);
    let mut row = 0usize;
    for (i, line) in &mut lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if row >= dim {
            return Err(Error::Parse { line: i + 1, msg: format!("more than {dim} rows") });
        }
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != dim {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected {dim} entries, found {}", entries.len()),
            });
        }
        for (c, tok) in entries.iter().enumerate() {
            let z = parse_entry(tok).ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("bad entry '{tok}'"),
            })?;
            m.set(row, c, z);
        }
        row += 1;
    }
    if row != dim {
        return Err(Error::Parse { line: 0, msg: format!("expected {dim} rows, found {row}") });
    }
    DensityOperator::new(m, qubit_count)
}

/// Parses `re+imj` / `re-imj`; a token without the imaginary part is taken
/// as real.
fn parse_entry(tok: &str) -> Option<C64> {
    if let Some(body) = tok.strip_suffix(['j', 'J']) {
        // The split sign is the last +/- not part of an exponent.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let b = bytes[k];
            if (b == b'+' || b == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let k = split?;
        let re: f64 = body[..k].parse().ok()?;
        let im_mag: f64 = body[k + 1..].parse().ok()?;
        let im = if bytes[k] == b'+' { im_mag } else { -im_mag };
        Some(C64::new(re, im))
    } else {
        tok.parse::<f64>().ok().map(|re| C64::new(re, 0.0))
    }
}
