//! Clifford+T gate lists: representation, text format and T-count.
//!
//! The text format is line oriented:
//!
//! ```text
//! qubits 3          # required first item
//! init q0 A         # init q<i> <Z|X|A>
//! cnot q0 q1        # control first
//! h q2
//! t q2
//! measure q1 Z      # measure q<i> <Z|X>
//! ```
//!
//! Keywords and basis letters are case-insensitive, `#` starts a comment and
//! blank lines are skipped.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    InitZ,
    InitX,
    /// Initialisation into a distilled magic state.
    InitA,
    MeasureZ,
    MeasureX,
    H,
    S,
    T,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::InitZ,
        GateKind::InitX,
        GateKind::InitA,
        GateKind::MeasureZ,
        GateKind::MeasureX,
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Cnot,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// True for the kinds that pull one distilled state out of the pool.
    pub fn consumes_t_state(self) -> bool {
        matches!(self, GateKind::T | GateKind::InitA)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("{kind:?} takes {expected} operand(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("operand q{0} repeated")]
    RepeatedOperand(usize),
    #[error("operand q{index} out of range for {num_qubits} qubits")]
    OutOfRange { index: usize, num_qubits: usize },
}

/// One circuit element. For CNOT the control comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    operands: [usize; 2],
}

impl Gate {
    pub fn new(kind: GateKind, operands: &[usize]) -> Result<Self, GateError> {
        if operands.len() != kind.arity() {
            return Err(GateError::Arity {
                kind,
                expected: kind.arity(),
                got: operands.len(),
            });
        }
        if operands.len() == 2 && operands[0] == operands[1] {
            return Err(GateError::RepeatedOperand(operands[0]));
        }
        let mut stored = [operands[0]; 2];
        stored[..operands.len()].copy_from_slice(operands);
        Ok(Gate {
            kind,
            operands: stored,
        })
    }

    fn single(kind: GateKind, qubit: usize) -> Self {
        Gate {
            kind,
            operands: [qubit; 2],
        }
    }

    pub fn init_z(q: usize) -> Self {
        Self::single(GateKind::InitZ, q)
    }

    pub fn init_x(q: usize) -> Self {
        Self::single(GateKind::InitX, q)
    }

    pub fn init_a(q: usize) -> Self {
        Self::single(GateKind::InitA, q)
    }

    pub fn measure_z(q: usize) -> Self {
        Self::single(GateKind::MeasureZ, q)
    }

    pub fn measure_x(q: usize) -> Self {
        Self::single(GateKind::MeasureX, q)
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }

    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }

    pub fn t(q: usize) -> Self {
        Self::single(GateKind::T, q)
    }

    /// # Panics
    /// If `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "cnot needs two distinct qubits");
        Gate {
            kind: GateKind::Cnot,
            operands: [control, target],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.operands[..self.kind.arity()]
    }

    pub fn consumes_t_state(&self) -> bool {
        self.kind.consumes_t_state()
    }

    /// Lowest operand index; used for deterministic tie-breaking.
    pub fn min_qubit(&self) -> usize {
        self.qubits().iter().copied().min().unwrap_or(0)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.operands[0];
        match self.kind {
            GateKind::InitZ => write!(f, "init q{q} Z"),
            GateKind::InitX => write!(f, "init q{q} X"),
            GateKind::InitA => write!(f, "init q{q} A"),
            GateKind::MeasureZ => write!(f, "measure q{q} Z"),
            GateKind::MeasureX => write!(f, "measure q{q} X"),
            GateKind::H => write!(f, "h q{q}"),
            GateKind::S => write!(f, "s q{q}"),
            GateKind::T => write!(f, "t q{q}"),
            GateKind::Cnot => write!(f, "cnot q{} q{}", self.operands[0], self.operands[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected `qubits <N>` before any gate, found `{token}`")]
    MissingHeader { line: usize, token: String },
    #[error("input has no `qubits <N>` header")]
    Empty,
    #[error("line {line}: malformed item at `{token}`")]
    Malformed { line: usize, token: String },
    #[error("line {line}: {source}")]
    InvalidGate {
        line: usize,
        #[source]
        source: GateError,
    },
    #[error("line {line}: duplicate `qubits` header")]
    DuplicateHeader { line: usize },
}

/// An ordered gate sequence over `num_qubits` wires. The sequence order is
/// the per-qubit dependency order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GateList {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl GateList {
    pub fn new(num_qubits: usize) -> Self {
        GateList {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, GateError> {
        let mut list = GateList::new(num_qubits);
        list.gates.reserve(gates.len());
        for gate in gates {
            list.push(gate)?;
        }
        Ok(list)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), GateError> {
        if let Some(&index) = gate.qubits().iter().find(|&&q| q >= self.num_qubits) {
            return Err(GateError::OutOfRange {
                index,
                num_qubits: self.num_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other`, which must use the same qubit count.
    pub fn extend_from(&mut self, other: &GateList) -> Result<(), GateError> {
        for gate in other.iter() {
            self.push(*gate)?;
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Gate> {
        self.gates.iter()
    }

    /// Number of T gates plus magic-state initialisations.
    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| g.consumes_t_state()).count()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut list: Option<GateList> = None;
        for (line_no, tokens) in content_lines(text) {
            match list.as_mut() {
                None => list = Some(GateList::new(parse_header(line_no, &tokens)?)),
                Some(list) => {
                    if tokens[0].eq_ignore_ascii_case("qubits") {
                        return Err(ParseError::DuplicateHeader { line: line_no });
                    }
                    let gate = parse_gate(line_no, &tokens)?;
                    list.push(gate).map_err(|source| ParseError::InvalidGate {
                        line: line_no,
                        source,
                    })?;
                }
            }
        }
        list.ok_or(ParseError::Empty)
    }

    /// Text form; no trailing newline.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GateList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qubits {}", self.num_qubits)?;
        for gate in &self.gates {
            write!(f, "\n{gate}")?;
        }
        Ok(())
    }
}

impl FromStr for GateList {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateList::parse(s)
    }
}

impl<'a> IntoIterator for &'a GateList {
    type Item = &'a Gate;
    type IntoIter = std::slice::Iter<'a, Gate>;

    fn into_iter(self) -> Self::IntoIter {
        self.gates.iter()
    }
}

/// Yields `(1-based line number, tokens)` for every line that has content
/// once comments are stripped.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

pub(crate) fn parse_header(line: usize, tokens: &[&str]) -> Result<usize, ParseError> {
    if !tokens[0].eq_ignore_ascii_case("qubits") {
        return Err(ParseError::MissingHeader {
            line,
            token: tokens[0].to_string(),
        });
    }
    match tokens {
        [_, count] => count.parse().map_err(|_| ParseError::Malformed {
            line,
            token: count.to_string(),
        }),
        [_] => Err(ParseError::Malformed {
            line,
            token: tokens[0].to_string(),
        }),
        [_, _, extra, ..] => Err(ParseError::Malformed {
            line,
            token: extra.to_string(),
        }),
        [] => unreachable!("content lines are never empty"),
    }
}

fn parse_qubit(line: usize, token: &str) -> Result<usize, ParseError> {
    let malformed = || ParseError::Malformed {
        line,
        token: token.to_string(),
    };
    let digits = token
        .strip_prefix('q')
        .or_else(|| token.strip_prefix('Q'))
        .ok_or_else(malformed)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    digits.parse().map_err(|_| malformed())
}

/// Parses one gate item. Range checks against the qubit count are left to
/// the caller.
pub(crate) fn parse_gate(line: usize, tokens: &[&str]) -> Result<Gate, ParseError> {
    let malformed = |token: &str| ParseError::Malformed {
        line,
        token: token.to_string(),
    };
    let keyword = tokens[0].to_ascii_lowercase();
    let (kind, operand_count) = match keyword.as_str() {
        "init" | "measure" => {
            let basis = tokens.get(2).ok_or_else(|| malformed(tokens[0]))?;
            let kind = match (keyword.as_str(), basis.to_ascii_uppercase().as_str()) {
                ("init", "Z") => GateKind::InitZ,
                ("init", "X") => GateKind::InitX,
                ("init", "A") => GateKind::InitA,
                ("measure", "Z") => GateKind::MeasureZ,
                ("measure", "X") => GateKind::MeasureX,
                _ => return Err(malformed(basis)),
            };
            if let Some(extra) = tokens.get(3) {
                return Err(malformed(extra));
            }
            let q = parse_qubit(line, tokens.get(1).ok_or_else(|| malformed(tokens[0]))?)?;
            return Ok(Gate::single(kind, q));
        }
        "h" => (GateKind::H, 1),
        "s" => (GateKind::S, 1),
        "t" => (GateKind::T, 1),
        "cnot" => (GateKind::Cnot, 2),
        _ => return Err(malformed(tokens[0])),
    };
    if tokens.len() != operand_count + 1 {
        let at = tokens.get(operand_count + 1).unwrap_or(&tokens[0]);
        return Err(malformed(at));
    }
    let operands = tokens[1..]
        .iter()
        .map(|tok| parse_qubit(line, tok))
        .collect::<Result<Vec<_>, _>>()?;
    Gate::new(kind, &operands).map_err(|source| ParseError::InvalidGate { line, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_cnot() {
        let list = GateList::parse("qubits 2\ncnot q0 q1").unwrap();
        assert_eq!(list, GateList::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap());
    }

    #[test]
    fn parses_magic_init_and_t() {
        let list = GateList::parse("qubits 1\ninit q0 A\nt q0").unwrap();
        assert_eq!(list.gates(), &[Gate::init_a(0), Gate::t(0)]);
        assert_eq!(list.t_count(), 2);
    }

    #[test]
    fn operand_out_of_range() {
        let err = GateList::parse("qubits 1\ncnot q0 q5").unwrap_err();
        assert_eq!(
            err,
            ParseError::InvalidGate {
                line: 2,
                source: GateError::OutOfRange {
                    index: 5,
                    num_qubits: 1
                }
            }
        );
    }

    #[test]
    fn missing_header() {
        let err = GateList::parse("# only a comment\nh q0").unwrap_err();
        assert_eq!(
            err,
            ParseError::MissingHeader {
                line: 2,
                token: "h".into()
            }
        );
        assert_eq!(GateList::parse("\n  # nothing\n").unwrap_err(), ParseError::Empty);
    }

    #[test]
    fn malformed_lines_report_token() {
        let err = GateList::parse("qubits 2\nh q0\nfrob q1").unwrap_err();
        assert_eq!(
            err,
            ParseError::Malformed {
                line: 3,
                token: "frob".into()
            }
        );
        let err = GateList::parse("qubits 2\nmeasure q0 A").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 2, ref token } if token == "A"));
        let err = GateList::parse("qubits 2\ncnot q0").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 2, .. }));
        let err = GateList::parse("qubits 2\nh x0").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 2, ref token } if token == "x0"));
        let err = GateList::parse("qubits 2\ncnot q1 q1").unwrap_err();
        assert!(matches!(
            err,
            ParseError::InvalidGate {
                source: GateError::RepeatedOperand(1),
                ..
            }
        ));
    }

    #[test]
    fn keywords_are_case_insensitive_and_comments_skipped() {
        let text = "QUBITS 3 # header\n\nCNOT Q0 q2\nInit q1 x\nMEASURE q1 z # done\n";
        let list = GateList::parse(text).unwrap();
        assert_eq!(
            list.gates(),
            &[Gate::cnot(0, 2), Gate::init_x(1), Gate::measure_z(1)]
        );
    }

    #[test]
    fn serializes() {
        let list = GateList::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap();
        assert_eq!(list.to_text(), "qubits 2\ncnot q0 q1");
        assert_eq!(GateList::new(1).to_text(), "qubits 1");
        let list = GateList::from_gates(3, vec![Gate::h(2), Gate::t(2)]).unwrap();
        assert_eq!(list.to_text(), "qubits 3\nh q2\nt q2");
    }

    #[test]
    fn t_count_counts_t_and_magic_inits() {
        assert_eq!(GateList::new(4).t_count(), 0);
        let list =
            GateList::from_gates(1, vec![Gate::init_a(0), Gate::t(0), Gate::h(0)]).unwrap();
        assert_eq!(list.t_count(), 2);
    }

    #[test]
    fn gate_constructor_checks_arity() {
        assert!(matches!(
            Gate::new(GateKind::Cnot, &[0]),
            Err(GateError::Arity { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::H, &[0, 1]),
            Err(GateError::Arity { expected: 1, got: 2, .. })
        ));
        assert_eq!(Gate::new(GateKind::Cnot, &[3, 1]).unwrap().qubits(), &[3, 1]);
    }

    #[test]
    fn only_t_and_init_a_consume_states() {
        let consuming: Vec<_> = GateKind::ALL
            .iter()
            .filter(|k| k.consumes_t_state())
            .collect();
        assert_eq!(consuming, [&GateKind::InitA, &GateKind::T]);
    }
}
