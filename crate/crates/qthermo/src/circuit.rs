//! Ideal-gate density-matrix simulation of the preparation and passivization
//! sequences used on the NMR registers: Bell-diagonal mixing, star-topology
//! GHZ preparation with purity control, and the crusher-gradient dephasing
//! step.
//!
//! Gates are applied by two-level row/column updates and basis permutations,
//! never by building the full 2^N x 2^N unitary, so a single gate costs
//! O(4^N) regardless of register size. The full-matrix constructors
//! [`rotation_matrix`], [`hadamard_matrix`] and [`cnot_matrix`] exist for
//! callers that need the unitary itself (reference checks, permutation-set
//! enumeration); `run` does not use them.

use crate::error::{Error, Result};
use crate::hamiltonian::QubitHamiltonian;
use crate::states::{bell_weights, BellDiagonalParams, DensityOperator};
use crate::tensor::{kron, C64, ComplexMatrix};

/// Rotation generator: exp(-i * angle * sigma_axis / 2) on each target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// One program step. Qubit indices are 1-based with qubit 1 the most
/// significant bit, matching the Hamiltonian convention.
#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    /// Same-angle rotation applied to every target qubit (the factors
    /// commute, so the order within `targets` is immaterial).
    Rotation { axis: Axis, angle: f64, targets: Vec<usize> },
    Hadamard { target: usize },
    Cnot { control: usize, target: usize },
    /// Pulsed-field-gradient idealization: zeroes every off-diagonal element
    /// of the density matrix in the computational basis.
    Crusher,
    /// No-op that records a snapshot under the given name.
    Label(String),
}

/// An ordered gate sequence on a fixed-size register.
#[derive(Clone, Debug, PartialEq)]
pub struct GateProgram {
    qubit_count: usize,
    steps: Vec<Instruction>,
}

impl GateProgram {
    /// Validates every step against the register size. Rotation targets are
    /// stored sorted ascending.
    pub fn new(qubit_count: usize, steps: Vec<Instruction>) -> Result<Self> {
        if qubit_count == 0 || qubit_count > 20 {
            return Err(Error::InvalidParameter(format!(
                "register size {qubit_count} outside 1..=20"
            )));
        }
        let mut steps = steps;
        for step in &mut steps {
            match step {
                Instruction::Rotation { angle, targets, .. } => {
                    if !angle.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "non-finite rotation angle {angle}"
                        )));
                    }
                    if targets.is_empty() {
                        return Err(Error::EmptySubset);
                    }
                    for &t in targets.iter() {
                        check_index(t, qubit_count)?;
                    }
                    targets.sort_unstable();
                    for pair in targets.windows(2) {
                        if pair[0] == pair[1] {
                            return Err(Error::DuplicateIndex(pair[0]));
                        }
                    }
                }
                Instruction::Hadamard { target } => check_index(*target, qubit_count)?,
                Instruction::Cnot { control, target } => {
                    check_index(*control, qubit_count)?;
                    check_index(*target, qubit_count)?;
                    if control == target {
                        return Err(Error::DuplicateIndex(*target));
                    }
                }
                Instruction::Crusher => {}
                Instruction::Label(text) => {
                    let trimmed = text.trim();
                    if trimmed.is_empty() || trimmed.lines().count() != 1 {
                        return Err(Error::InvalidParameter(
                            "label must be a single non-empty line".into(),
                        ));
                    }
                    *text = trimmed.to_string();
                }
            }
        }
        Ok(Self { qubit_count, steps })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn steps(&self) -> &[Instruction] {
        &self.steps
    }

    /// Parses the line-oriented text form: one instruction per line, blank
    /// lines and `#` comments skipped, mnemonics case-insensitive, angles in
    /// radians, qubits 1-based. Example lines:
    /// `RY 0.7853981633974483 1 2`, `CNOT 1 2`, `H 1`, `CRUSH`,
    /// `LABEL after-prep`.
    pub fn parse(text: &str, qubit_count: usize) -> Result<Self> {
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mnemonic: String = line.split_whitespace().next().unwrap().to_ascii_uppercase();
            let rest = line[mnemonic.len()..].trim();
            let mut tokens = rest.split_whitespace();
            let step = match mnemonic.as_str() {
                "RX" | "RY" | "RZ" => {
                    let axis = match mnemonic.as_str() {
                        "RX" => Axis::X,
                        "RY" => Axis::Y,
                        _ => Axis::Z,
                    };
                    let angle = parse_angle(tokens.next(), line_no)?;
                    let targets: Vec<usize> = tokens
                        .map(|t| parse_index(t, line_no))
                        .collect::<Result<_>>()?;
                    if targets.is_empty() {
                        return Err(parse_error(line_no, "rotation needs at least one target"));
                    }
                    Instruction::Rotation { axis, angle, targets }
                }
                "H" => {
                    let target = parse_index(require(tokens.next(), line_no, "target")?, line_no)?;
                    require_end(tokens.next(), line_no)?;
                    Instruction::Hadamard { target }
                }
                "CNOT" => {
                    let control = parse_index(require(tokens.next(), line_no, "control")?, line_no)?;
                    let target = parse_index(require(tokens.next(), line_no, "target")?, line_no)?;
                    require_end(tokens.next(), line_no)?;
                    Instruction::Cnot { control, target }
                }
                "CRUSH" => {
                    require_end(tokens.next(), line_no)?;
                    Instruction::Crusher
                }
                "LABEL" => {
                    if rest.is_empty() {
                        return Err(parse_error(line_no, "label text missing"));
                    }
                    Instruction::Label(rest.to_string())
                }
                other => {
                    return Err(parse_error(line_no, &format!("unknown instruction `{other}`")));
                }
            };
            steps.push(step);
        }
        Self::new(qubit_count, steps)
    }

    /// Canonical text form; `parse` of the result reproduces the program.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            match step {
                Instruction::Rotation { axis, angle, targets } => {
                    out.push('R');
                    out.push(axis.letter());
                    out.push_str(&format!(" {angle}"));
                    for t in targets {
                        out.push_str(&format!(" {t}"));
                    }
                }
                Instruction::Hadamard { target } => out.push_str(&format!("H {target}")),
                Instruction::Cnot { control, target } => {
                    out.push_str(&format!("CNOT {control} {target}"));
                }
                Instruction::Crusher => out.push_str("CRUSH"),
                Instruction::Label(text) => out.push_str(&format!("LABEL {text}")),
            }
            out.push('\n');
        }
        out
    }
}

fn check_index(q: usize, qubit_count: usize) -> Result<()> {
    if q == 0 || q > qubit_count {
        return Err(Error::IndexOutOfRange { index: q, qubits: qubit_count });
    }
    Ok(())
}

fn parse_error(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

fn require<'a>(token: Option<&'a str>, line: usize, what: &str) -> Result<&'a str> {
    token.ok_or_else(|| parse_error(line, &format!("{what} missing")))
}

fn require_end(token: Option<&str>, line: usize) -> Result<()> {
    match token {
        None => Ok(()),
        Some(t) => Err(parse_error(line, &format!("unexpected trailing token `{t}`"))),
    }
}

fn parse_angle(token: Option<&str>, line: usize) -> Result<f64> {
    let t = require(token, line, "rotation angle")?;
    t.parse::<f64>()
        .map_err(|_| parse_error(line, &format!("bad angle `{t}`")))
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_error(line, &format!("bad qubit index `{token}`")))
}

/// States recorded while running a program: one snapshot per `LABEL` step,
/// plus the final state. Every snapshot is invariant-checked.
#[derive(Clone, Debug)]
pub struct SimulationTrace {
    snapshots: Vec<(String, DensityOperator)>,
    final_state: DensityOperator,
}

impl SimulationTrace {
    pub fn snapshots(&self) -> &[(String, DensityOperator)] {
        &self.snapshots
    }

    pub fn final_state(&self) -> &DensityOperator {
        &self.final_state
    }

    pub fn into_final(self) -> DensityOperator {
        self.final_state
    }
}

/// Runs `program` on `input`. Rotations apply
/// exp(-i * angle * sigma_axis / 2) to each target, Hadamard and CNOT are the
/// standard unitaries, and the crusher zeroes all off-diagonal elements in
/// the computational basis.
pub fn run(program: &GateProgram, input: &DensityOperator) -> Result<SimulationTrace> {
    let n = program.qubit_count();
    if input.qubit_count() != n {
        return Err(Error::DimMismatch(1usize << n, input.dim()));
    }
    let mut work = input.matrix().clone();
    let mut snapshots = Vec::new();
    for step in program.steps() {
        match step {
            Instruction::Rotation { axis, angle, targets } => {
                let gate = rotation_gate(*axis, *angle);
                for &t in targets {
                    apply_one_qubit(&mut work, &gate, t, n);
                }
            }
            Instruction::Hadamard { target } => {
                apply_one_qubit(&mut work, &hadamard_gate(), *target, n);
            }
            Instruction::Cnot { control, target } => {
                apply_cnot(&mut work, *control, *target, n);
            }
            Instruction::Crusher => apply_crusher(&mut work),
            Instruction::Label(text) => {
                snapshots.push((text.clone(), DensityOperator::new(work.clone(), n)?));
            }
        }
    }
    let final_state = DensityOperator::new(work, n)?;
    Ok(SimulationTrace { snapshots, final_state })
}

/// 2x2 gate in row-major order [a b; c d].
type Gate2 = [C64; 4];

fn rotation_gate(axis: Axis, angle: f64) -> Gate2 {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    let re = |x: f64| C64::new(x, 0.0);
    match axis {
        Axis::X => [re(c), C64::new(0.0, -s), C64::new(0.0, -s), re(c)],
        Axis::Y => [re(c), re(-s), re(s), re(c)],
        Axis::Z => [C64::new(c, -s), re(0.0), re(0.0), C64::new(c, s)],
    }
}

fn hadamard_gate() -> Gate2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [h, h, h, -h]
}

/// rho <- (U rho) U^dag for a single-qubit U, via paired row updates then
/// paired column updates. Cost O(dim^2).
fn apply_one_qubit(m: &mut ComplexMatrix, gate: &Gate2, qubit: usize, qubit_count: usize) {
    let dim = 1usize << qubit_count;
    let mask = 1usize << (qubit_count - qubit);
    let [a, b, c, d] = *gate;
    let data = m.entries_mut();
    for i0 in 0..dim {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        for j in 0..dim {
            let lo = data[i0 * dim + j];
            let hi = data[i1 * dim + j];
            data[i0 * dim + j] = a * lo + b * hi;
            data[i1 * dim + j] = c * lo + d * hi;
        }
    }
    let (ac, bc, cc, dc) = (a.conj(), b.conj(), c.conj(), d.conj());
    for i in 0..dim {
        let row = i * dim;
        for j0 in 0..dim {
            if j0 & mask != 0 {
                continue;
            }
            let j1 = j0 | mask;
            let lo = data[row + j0];
            let hi = data[row + j1];
            data[row + j0] = lo * ac + hi * bc;
            data[row + j1] = lo * cc + hi * dc;
        }
    }
}

/// rho <- P rho P^T where P permutes computational-basis states.
/// `image[v]` is the index state |v> is mapped to.
fn apply_basis_permutation(m: &mut ComplexMatrix, image: &[usize]) {
    let dim = image.len();
    let mut out = ComplexMatrix::zeros(dim);
    {
        let src = m.entries();
        let dst = out.entries_mut();
        for i in 0..dim {
            for j in 0..dim {
                dst[image[i] * dim + image[j]] = src[i * dim + j];
            }
        }
    }
    *m = out;
}

fn cnot_image(control: usize, target: usize, qubit_count: usize) -> Vec<usize> {
    let dim = 1usize << qubit_count;
    let cmask = 1usize << (qubit_count - control);
    let tmask = 1usize << (qubit_count - target);
    (0..dim).map(|v| if v & cmask != 0 { v ^ tmask } else { v }).collect()
}

fn apply_cnot(m: &mut ComplexMatrix, control: usize, target: usize, qubit_count: usize) {
    apply_basis_permutation(m, &cnot_image(control, target, qubit_count));
}

fn apply_crusher(m: &mut ComplexMatrix) {
    let dim = m.dim();
    let data = m.entries_mut();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                data[i * dim + j] = C64::new(0.0, 0.0);
            }
        }
    }
}

/// Full 2^N unitary of a same-angle rotation on `targets` (1-based).
pub fn rotation_matrix(
    axis: Axis,
    angle: f64,
    targets: &[usize],
    qubit_count: usize,
) -> Result<ComplexMatrix> {
    if !angle.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite rotation angle {angle}")));
    }
    if targets.is_empty() {
        return Err(Error::EmptySubset);
    }
    for &t in targets {
        check_index(t, qubit_count)?;
    }
    let g = rotation_gate(axis, angle);
    Ok(one_qubit_factors(&g, targets, qubit_count))
}

/// Full 2^N unitary of a Hadamard on `target` (1-based).
pub fn hadamard_matrix(target: usize, qubit_count: usize) -> Result<ComplexMatrix> {
    check_index(target, qubit_count)?;
    Ok(one_qubit_factors(&hadamard_gate(), &[target], qubit_count))
}

fn one_qubit_factors(gate: &Gate2, targets: &[usize], qubit_count: usize) -> ComplexMatrix {
    let single = ComplexMatrix::from_fn(2, |i, j| gate[i * 2 + j]);
    let eye = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::identity(1);
    for q in 1..=qubit_count {
        let factor = if targets.contains(&q) { &single } else { &eye };
        out = kron(&out, factor);
    }
    out
}

/// Full 2^N CNOT permutation matrix (1-based control and target).
pub fn cnot_matrix(control: usize, target: usize, qubit_count: usize) -> Result<ComplexMatrix> {
    check_index(control, qubit_count)?;
    check_index(target, qubit_count)?;
    if control == target {
        return Err(Error::DuplicateIndex(target));
    }
    let image = cnot_image(control, target, qubit_count);
    let dim = image.len();
    let mut m = ComplexMatrix::zeros(dim);
    for (v, &w) in image.iter().enumerate() {
        m.set(w, v, C64::new(1.0, 0.0));
    }
    Ok(m)
}

/// Two-qubit preparation circuit that maps |11><11| to the Bell-diagonal
/// state with the sin^2/cos^2 half-angle weights: y-rotations set the
/// diagonal mixture, the crusher removes coherences, and the Hadamard/CNOT
/// tail rotates the computational basis onto the Bell basis. Angles are
/// unrestricted radians; the weights are periodic in both.
pub fn bell_diag_program(beta: f64, gamma: f64) -> Result<GateProgram> {
    GateProgram::new(
        2,
        vec![
            Instruction::Rotation { axis: Axis::Y, angle: beta, targets: vec![1] },
            Instruction::Rotation { axis: Axis::Y, angle: gamma, targets: vec![2] },
            Instruction::Crusher,
            Instruction::Label("mixture".into()),
            Instruction::Hadamard { target: 2 },
            Instruction::Cnot { control: 2, target: 1 },
        ],
    )
}

/// Star-topology GHZ preparation: Hadamard on the center, then a CNOT fan to
/// every satellite. Returns the program together with the purity
/// lambda = cos(theta); running it on `pseudo_pure(|0...0>, cos(theta))`
/// yields exactly `noisy_ghz(cos(theta), N)`.
pub fn ghz_program(qubit_count: usize, theta: f64) -> Result<(GateProgram, f64)> {
    if qubit_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "GHZ preparation needs at least two qubits, got {qubit_count}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite angle {theta}")));
    }
    let mut steps = vec![Instruction::Hadamard { target: 1 }];
    for t in 2..=qubit_count {
        steps.push(Instruction::Cnot { control: 1, target: t });
    }
    Ok((GateProgram::new(qubit_count, steps)?, theta.cos()))
}

/// State family a passivization circuit is requested for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PassivizationFamily {
    BellDiagonal(BellDiagonalParams),
    NoisyGhz { qubit_count: usize },
    /// Three-qubit GHZ family on the heteronuclear register; identical
    /// circuit to `NoisyGhz { qubit_count: 3 }`, kept as its own case
    /// because the experiment treats it separately.
    Exp3Ghz,
}

/// Circuit taking the family's state to its passive form.
///
/// For the GHZ families this is the inverse preparation, which maps
/// (1-lambda) I/2^N + lambda |GHZ><GHZ| to
/// (1-lambda) I/2^N + lambda |0...0><0...0| for every lambda at once.
///
/// For the Bell-diagonal family the tail `CNOT(1,2), H(1)` moves the Bell
/// weights onto the computational basis as diag(p00, p10, p01, p11); a
/// permutation drawn from the 24-element group generated by CNOTs and pi
/// pulses then reorders the populations to descend along the energy levels.
/// The level order is pinned to ascending basis index, which holds whenever
/// the first qubit's gap is at least the second's (true for every named
/// two-qubit system here); ties follow the stable convention of
/// `passive_state`, so the output matches it exactly.
pub fn passivization_program(family: PassivizationFamily) -> Result<GateProgram> {
    match family {
        PassivizationFamily::BellDiagonal(params) => bell_passivization(params),
        PassivizationFamily::NoisyGhz { qubit_count } => ghz_passivization(qubit_count),
        PassivizationFamily::Exp3Ghz => ghz_passivization(3),
    }
}

fn ghz_passivization(qubit_count: usize) -> Result<GateProgram> {
    if qubit_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "GHZ passivization needs at least two qubits, got {qubit_count}"
        )));
    }
    let mut steps: Vec<Instruction> = (2..=qubit_count)
        .rev()
        .map(|t| Instruction::Cnot { control: 1, target: t })
        .collect();
    steps.push(Instruction::Hadamard { target: 1 });
    GateProgram::new(qubit_count, steps)
}

fn bell_passivization(params: BellDiagonalParams) -> Result<GateProgram> {
    // After CNOT(1,2), H(1) the weight p_ij sits on basis state |ji>.
    let w = bell_weights(params);
    let populations = [w[0], w[2], w[1], w[3]];
    // Stable descending order: rank k should end up on basis index k.
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| populations[b].partial_cmp(&populations[a]).unwrap());
    let mut target_image = [0usize; 4];
    for (rank, &v) in order.iter().enumerate() {
        target_image[v] = rank;
    }
    let tail = permutation_candidates()
        .into_iter()
        .find(|(image, _)| *image == target_image)
        .map(|(_, steps)| steps)
        .expect("the candidate set realizes every permutation of four states");
    let mut steps = vec![
        Instruction::Cnot { control: 1, target: 2 },
        Instruction::Hadamard { target: 1 },
        Instruction::Label("computational-diagonal".into()),
    ];
    steps.extend(tail);
    GateProgram::new(2, steps)
}

/// All 24 permutations of the two-qubit basis, each as an instruction
/// sequence of pi pulses (index translations) followed by CNOT words
/// (invertible linear maps). Returned as (image, steps) pairs in a fixed
/// enumeration order; `image[v]` is where basis state v ends up.
fn permutation_candidates() -> Vec<([usize; 4], Vec<Instruction>)> {
    let pi = std::f64::consts::PI;
    let ry = |targets: Vec<usize>| Instruction::Rotation { axis: Axis::Y, angle: pi, targets };
    let locals: [(usize, Vec<Instruction>); 4] = [
        (0b00, vec![]),
        (0b10, vec![ry(vec![1])]),
        (0b01, vec![ry(vec![2])]),
        (0b11, vec![ry(vec![1, 2])]),
    ];
    let c12 = Instruction::Cnot { control: 1, target: 2 };
    let c21 = Instruction::Cnot { control: 2, target: 1 };
    let globals: [Vec<Instruction>; 6] = [
        vec![],
        vec![c12.clone()],
        vec![c21.clone()],
        vec![c12.clone(), c21.clone()],
        vec![c21.clone(), c12.clone()],
        vec![c12.clone(), c21.clone(), c12],
    ];
    let step_image = |step: &Instruction, v: usize| -> usize {
        match step {
            Instruction::Cnot { control: 1, target: 2 } => v ^ ((v >> 1) & 1),
            Instruction::Cnot { control: 2, target: 1 } => v ^ ((v & 1) << 1),
            _ => unreachable!(),
        }
    };
    let mut out = Vec::with_capacity(24);
    for (flip, local_steps) in &locals {
        for global_steps in &globals {
            let mut image = [0usize; 4];
            for v in 0..4 {
                let mut w = v ^ flip;
                for step in global_steps {
                    w = step_image(step, w);
                }
                image[v] = w;
            }
            let mut steps = local_steps.clone();
            steps.extend(global_steps.iter().cloned());
            out.push((image, steps));
        }
    }
    out
}

/// Passive form of the two-qubit marginal of the three-qubit GHZ family:
/// a single CNOT(2,1) swaps the |01> and |11> populations, taking
/// diag((1+l)/4, (1-l)/4, (1-l)/4, (1+l)/4) to
/// diag((1+l)/4, (1+l)/4, (1-l)/4, (1-l)/4).
pub fn exp3_local_passive(rho12: &DensityOperator) -> Result<DensityOperator> {
    let program = GateProgram::new(2, vec![Instruction::Cnot { control: 2, target: 1 }])?;
    Ok(run(&program, rho12)?.into_final())
}

/// Gradient lopsidedness l0 = 1 + (N-1) * alpha_satellite / alpha_center for
/// a star register with center qubit 1 and identical satellites. Reported as
/// preparation metadata; the simulation itself works at the state level.
pub fn str_lopsidedness(h: &QubitHamiltonian) -> Result<f64> {
    let n = h.qubit_count();
    if n < 2 {
        return Err(Error::InvalidParameter("star register needs at least two qubits".into()));
    }
    let gaps = h.gaps();
    let center = gaps[0];
    let satellite = gaps[1];
    if center <= 0.0 {
        return Err(Error::InvalidParameter("center gap must be positive".into()));
    }
    if gaps[1..].iter().any(|&a| a != satellite) {
        return Err(Error::InvalidParameter("satellite gaps must be identical".into()));
    }
    Ok(1.0 + (n - 1) as f64 * satellite / center)
}
