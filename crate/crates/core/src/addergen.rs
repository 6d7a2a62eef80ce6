//! Ripple-carry adders built from temporary logical-AND blocks.
//!
//! Qubit layout for an `n`-bit adder: `a[i] = i`, `b[i] = n + i`,
//! `anc[i] = 2n + i`. Every ancilla starts with `init Z`.
//!
//! The compute pass has `n - 1` blocks, each with four T gates. Block `k`
//! works on `x = a[k]`, `y = b[k]`, `t = anc[k]`, with carry-in
//! `c = anc[k-1]` for `k > 0`:
//!
//! ```text
//! k = 0:  s x (x6), s y (x6),
//!         t x, t y, cnot x t, cnot y t, t t, cnot t x, cnot t y,
//!         t t, cnot t x, h t
//! k > 0:  cnot c x, t x, cnot c y, cnot x t, cnot y t, t t,
//!         cnot t x, cnot t y, t y, s t (x3), t t, cnot t x, h t, cnot c t
//! ```
//!
//! The S padding on block 0 and the S run inside later blocks set the
//! spacing of T gates. Once serialized, block `k > 0` consumes a state at
//! steps `14k + 2, 14k + 5, 14k + 8, 14k + 11`, which is one state per 3.5
//! steps on average and never faster than the distillery can refill.
//!
//! The top bit is a CNOT fan-out from `anc[n-2]`, and the uncompute pass
//! walks back from `k = n - 2` to 0 using H, Z measurement and CNOTs only,
//! so the circuit ends with a T-free suffix.

use thiserror::Error;

use crate::gatelist::{Gate, GateList};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdderError {
    #[error("adder width must be at least 2, got {0}")]
    TooNarrow(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdderSpec {
    n: usize,
}

impl AdderSpec {
    pub fn new(n: usize) -> Result<Self, AdderError> {
        if n < 2 {
            return Err(AdderError::TooNarrow(n));
        }
        Ok(AdderSpec { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_qubits(&self) -> usize {
        3 * self.n
    }

    pub fn t_count(&self) -> usize {
        4 * self.n - 4
    }

    /// Scheduled depth in time steps, with or without T serialization.
    pub fn expected_depth(&self) -> usize {
        18 * self.n - 16
    }

    /// The block spacing was tuned on 64..512-bit instances. Narrower
    /// adders are valid circuits but their pool profiles are dominated by
    /// the block 0 and tail boundary effects.
    pub fn is_calibrated(&self) -> bool {
        self.n >= 8
    }
}

pub fn generate_adder(spec: &AdderSpec) -> GateList {
    let n = spec.n;
    let a = |i: usize| i;
    let b = |i: usize| n + i;
    let anc = |i: usize| 2 * n + i;

    let mut g: Vec<Gate> = Vec::with_capacity(40 * n);
    g.extend((0..n).map(|i| Gate::init_z(anc(i))));

    for k in 0..n - 1 {
        let (x, y, t) = (a(k), b(k), anc(k));
        if k == 0 {
            g.extend(std::iter::repeat_n(Gate::s(x), 6));
            g.extend(std::iter::repeat_n(Gate::s(y), 6));
            g.extend([
                Gate::t(x),
                Gate::t(y),
                Gate::cnot(x, t),
                Gate::cnot(y, t),
                Gate::t(t),
                Gate::cnot(t, x),
                Gate::cnot(t, y),
                Gate::t(t),
                Gate::cnot(t, x),
                Gate::h(t),
            ]);
        } else {
            let c = anc(k - 1);
            g.extend([
                Gate::cnot(c, x),
                Gate::t(x),
                Gate::cnot(c, y),
                Gate::cnot(x, t),
                Gate::cnot(y, t),
                Gate::t(t),
                Gate::cnot(t, x),
                Gate::cnot(t, y),
                Gate::t(y),
                Gate::s(t),
                Gate::s(t),
                Gate::s(t),
                Gate::t(t),
                Gate::cnot(t, x),
                Gate::h(t),
                Gate::cnot(c, t),
            ]);
        }
    }

    let top = n - 1;
    let carry = anc(n - 2);
    g.extend([
        Gate::cnot(carry, anc(top)),
        Gate::cnot(carry, a(top)),
        Gate::cnot(carry, b(top)),
        Gate::cnot(a(top), b(top)),
    ]);

    for k in (0..n - 1).rev() {
        let (x, y, t) = (a(k), b(k), anc(k));
        let c = (k > 0).then(|| anc(k - 1));
        if let Some(c) = c {
            g.push(Gate::cnot(c, t));
        }
        g.extend([
            Gate::h(t),
            Gate::measure_z(t),
            Gate::h(y),
            Gate::cnot(x, y),
            Gate::h(y),
        ]);
        match c {
            Some(c) => g.extend([Gate::cnot(c, x), Gate::cnot(x, y), Gate::cnot(c, y)]),
            None => g.push(Gate::cnot(x, y)),
        }
    }

    GateList::from_gates(spec.num_qubits(), g).expect("adder operands are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatelist::GateKind;

    fn adder(n: usize) -> GateList {
        generate_adder(&AdderSpec::new(n).unwrap())
    }

    #[test]
    fn rejects_one_bit() {
        assert_eq!(AdderSpec::new(1), Err(AdderError::TooNarrow(1)));
        assert_eq!(AdderSpec::new(0), Err(AdderError::TooNarrow(0)));
        assert!(AdderSpec::new(2).is_ok());
    }

    #[test]
    fn benchmark_sizes() {
        let g = adder(64);
        assert_eq!(g.t_count(), 252);
        assert_eq!(g.num_qubits(), 192);
        assert_eq!(adder(512).t_count(), 2044);
        assert_eq!(adder(3).t_count(), 8);
        assert_eq!(adder(2).t_count(), 4);
    }

    #[test]
    fn counts_follow_width() {
        for n in 2..40 {
            let spec = AdderSpec::new(n).unwrap();
            let g = generate_adder(&spec);
            assert_eq!(g.t_count(), 4 * n - 4);
            assert_eq!(g.num_qubits(), 3 * n);
            assert_eq!(spec.t_count(), g.t_count());
        }
    }

    #[test]
    fn ends_with_clifford_suffix() {
        for n in [2, 3, 17] {
            let g = adder(n);
            let last_t = g.iter().rposition(|x| x.consumes_t_state()).unwrap();
            assert!(last_t + 1 < g.len());
            assert!(g.gates()[last_t + 1..].iter().all(|x| !x.consumes_t_state()));
        }
    }

    #[test]
    fn every_ancilla_is_initialised_and_measured_once_except_carry_out() {
        let n = 5;
        let g = adder(n);
        for i in 0..n {
            let q = 2 * n + i;
            let inits = g.iter().filter(|x| x.kind() == GateKind::InitZ && x.qubits() == [q]).count();
            let meas = g.iter().filter(|x| x.kind() == GateKind::MeasureZ && x.qubits() == [q]).count();
            assert_eq!(inits, 1);
            assert_eq!(meas, usize::from(i < n - 1));
        }
    }

    #[test]
    fn scheduled_depth() {
        use crate::scheduler::{schedule_asap, serialize_t};
        for n in [2, 3, 8, 33] {
            let spec = AdderSpec::new(n).unwrap();
            let asap = schedule_asap(&generate_adder(&spec));
            assert_eq!(asap.depth(), spec.expected_depth());
            assert_eq!(serialize_t(&asap).depth(), spec.expected_depth());
        }
    }

    #[test]
    fn calibration_flag() {
        assert!(!AdderSpec::new(3).unwrap().is_calibrated());
        assert!(AdderSpec::new(64).unwrap().is_calibrated());
    }
}
