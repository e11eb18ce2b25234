//! Interferometer components and circuit evaluation.
//!
//! Paths are levels of the first subsystem of the circuit's basis. Spin and
//! other internal tokens are looked up in the remaining subsystems; a token
//! must live in exactly one of them. Every component acts as the identity on
//! subsystems it does not mention.
//!
//! Conventions:
//! - beam splitter on paths `(a, b)`: `[[cos θ, i sin θ], [i sin θ, cos θ]]`,
//!   θ = π/4 for a 50:50 splitter;
//! - phase shifter: `e^{iφ}` on one path;
//! - spin turner: `exp(-i·angle·σ_axis/2)` on the `(up, down)` pair of one path;
//! - magnetic field: coherent Stern–Gerlach routing `|in,↑⟩ ↔ |up_out,↑⟩`,
//!   `|in,↓⟩ ↔ |down_out,↓⟩` (a permutation, hence unitary);
//! - analyzer: projector onto one `(path, level)` pair;
//! - detector: path projector, only allowed at the end of a circuit.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::qstate::{apply, CompositeBasis, LinearOperator, StateVector};
use crate::{Error, Result, EXACT_TOL};

pub const SPIN_UP: &str = "s_up";
pub const SPIN_DOWN: &str = "s_dn";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        }
    }

    /// Pauli matrix in the `(up, down)` basis, row-major.
    pub fn pauli(self) -> [Complex64; 4] {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Axis::X => [z, one, one, z],
            Axis::Y => [z, -i, i, z],
            Axis::Z => [one, z, z, -one],
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A pair of internal levels treated as spin up/down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinPair {
    pub up: String,
    pub down: String,
}

impl Default for SpinPair {
    fn default() -> Self {
        SpinPair { up: SPIN_UP.into(), down: SPIN_DOWN.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    BeamSplitter { path_a: String, path_b: String, theta: f64 },
    PhaseShifter { path: String, phi: f64 },
    SpinTurner { path: String, axis: Axis, angle: f64, spins: SpinPair },
    MagneticField { input: String, up_out: String, down_out: String, spins: SpinPair },
    Analyzer { path: String, level: String },
    Detector { name: String, path: String },
}

impl Component {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Component::BeamSplitter { .. } => "beam splitter",
            Component::PhaseShifter { .. } => "phase shifter",
            Component::SpinTurner { .. } => "spin turner",
            Component::MagneticField { .. } => "magnetic field",
            Component::Analyzer { .. } => "analyzer",
            Component::Detector { .. } => "detector",
        }
    }

    fn is_detector(&self) -> bool {
        matches!(self, Component::Detector { .. })
    }
}

fn path_index(basis: &CompositeBasis, path: &str) -> Result<usize> {
    basis.level_index(0, path)
}

/// Composite indices whose first-subsystem digit is `path` and whose digit in
/// subsystem `k` is `level`, paired with the index reached by replacing the
/// path with `to_path` and the level with `to_level`.
fn index_pairs(
    basis: &CompositeBasis,
    path: usize,
    k: usize,
    level: usize,
    to_path: usize,
    to_level: usize,
) -> Vec<(usize, usize)> {
    let path_stride = basis.stride(0);
    let level_stride = basis.stride(k);
    (0..basis.dim())
        .filter(|&i| basis.digits(i)[0] == path && basis.digits(i)[k] == level)
        .map(|i| {
            let j = i - path * path_stride + to_path * path_stride;
            let j = j - level * level_stride + to_level * level_stride;
            (i, j)
        })
        .collect()
}

fn spin_levels(basis: &CompositeBasis, spins: &SpinPair) -> Result<(usize, usize, usize)> {
    let missing =
        |label: &str| Error::InvalidComponent(alloc::format!("property token `{label}` is absent from the basis"));
    let (ku, up) = basis.find_level(&spins.up, true).map_err(|_| missing(&spins.up))?;
    let (kd, down) = basis.find_level(&spins.down, true).map_err(|_| missing(&spins.down))?;
    if ku != kd {
        return Err(Error::InvalidComponent(alloc::format!(
            "`{}` and `{}` live in different subsystems",
            spins.up,
            spins.down
        )));
    }
    if up == down {
        return Err(Error::InvalidComponent("spin pair must name two distinct levels".into()));
    }
    Ok((ku, up, down))
}

/// Compiles one component to its operator on `basis`.
pub fn component_operator(c: &Component, basis: &Arc<CompositeBasis>) -> Result<LinearOperator> {
    let dim = basis.dim();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = vec![zero; dim * dim];
    match c {
        Component::BeamSplitter { path_a, path_b, theta } => {
            let a = path_index(basis, path_a)?;
            let b = path_index(basis, path_b)?;
            if a == b {
                return Err(Error::InvalidComponent("beam splitter needs two distinct paths".into()));
            }
            let n = basis.subsystems()[0].len();
            let mut local = vec![zero; n * n];
            for p in 0..n {
                local[p * n + p] = one;
            }
            let (cs, sn) = (libm::cos(*theta), libm::sin(*theta));
            local[a * n + a] = Complex64::new(cs, 0.0);
            local[b * n + b] = Complex64::new(cs, 0.0);
            local[a * n + b] = Complex64::new(0.0, sn);
            local[b * n + a] = Complex64::new(0.0, sn);
            return LinearOperator::embed(basis.clone(), 0, &local);
        }
        Component::PhaseShifter { path, phi } => {
            let p = path_index(basis, path)?;
            let n = basis.subsystems()[0].len();
            let mut local = vec![zero; n * n];
            for q in 0..n {
                local[q * n + q] = one;
            }
            local[p * n + p] = Complex64::new(libm::cos(*phi), libm::sin(*phi));
            return LinearOperator::embed(basis.clone(), 0, &local);
        }
        Component::SpinTurner { path, axis, angle, spins } => {
            let p = path_index(basis, path)?;
            let (k, up, down) = spin_levels(basis, spins)?;
            for i in 0..dim {
                m[i * dim + i] = one;
            }
            // exp(-iθσ/2) = cos(θ/2)·1 - i·sin(θ/2)·σ
            let (cs, sn) = (libm::cos(angle / 2.0), libm::sin(angle / 2.0));
            let sigma = axis.pauli();
            let rot = |r: usize, col: usize| {
                let id = if r == col { one } else { zero };
                id * cs - Complex64::new(0.0, sn) * sigma[r * 2 + col]
            };
            let levels = [up, down];
            for (col, &from) in levels.iter().enumerate() {
                for (i, _) in index_pairs(basis, p, k, from, p, from) {
                    for (r, &to) in levels.iter().enumerate() {
                        let j = i - from * basis.stride(k) + to * basis.stride(k);
                        m[j * dim + i] = rot(r, col);
                    }
                }
            }
        }
        Component::MagneticField { input, up_out, down_out, spins } => {
            if up_out == down_out {
                return Err(Error::InvalidComponent("magnetic field needs distinct up and down output paths".into()));
            }
            let pin = path_index(basis, input)?;
            let pu = path_index(basis, up_out)?;
            let pd = path_index(basis, down_out)?;
            let (k, up, down) = spin_levels(basis, spins)?;
            let mut target: Vec<usize> = (0..dim).collect();
            for (level, out) in [(up, pu), (down, pd)] {
                for (i, j) in index_pairs(basis, pin, k, level, out, level) {
                    target[i] = j;
                    target[j] = i;
                }
            }
            for (i, &j) in target.iter().enumerate() {
                m[j * dim + i] = one;
            }
        }
        Component::Analyzer { path, level } => {
            let p = path_index(basis, path)?;
            let (k, l) = basis.find_level(level, true).map_err(|_| {
                Error::InvalidComponent(alloc::format!("property token `{level}` is absent from the basis"))
            })?;
            for (i, _) in index_pairs(basis, p, k, l, p, l) {
                m[i * dim + i] = one;
            }
        }
        Component::Detector { path, .. } => {
            let name = basis.subsystems()[0].name().to_string();
            return LinearOperator::level_projector(basis.clone(), &name, path);
        }
    }
    LinearOperator::from_entries(basis.clone(), m)
}

/// An ordered list of components, compiled once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    basis: Arc<CompositeBasis>,
    elements: Vec<Component>,
    operators: Vec<LinearOperator>,
}

impl Circuit {
    pub fn new(basis: Arc<CompositeBasis>, elements: Vec<Component>) -> Result<Self> {
        if let Some(first_detector) = elements.iter().position(Component::is_detector) {
            if elements[first_detector..].iter().any(|c| !c.is_detector()) {
                return Err(Error::InvalidComponent("detectors must appear only at the end of a circuit".into()));
            }
        }
        let mut operators = Vec::with_capacity(elements.len());
        for (i, c) in elements.iter().enumerate() {
            let op = component_operator(c, &basis)?;
            match c {
                Component::Detector { .. } => {}
                Component::Analyzer { .. } => {
                    if !op.is_projector(EXACT_TOL) {
                        return Err(Error::NotProjector(alloc::format!("element {i} (analyzer)")));
                    }
                }
                _ => {
                    if !op.is_unitary(EXACT_TOL) {
                        return Err(Error::NotUnitary(alloc::format!("element {i} ({})", c.kind_name())));
                    }
                }
            }
            operators.push(op);
        }
        Ok(Circuit { basis, elements, operators })
    }

    pub fn basis(&self) -> &Arc<CompositeBasis> {
        &self.basis
    }

    pub fn elements(&self) -> &[Component] {
        &self.elements
    }

    /// Operators of the non-detector elements, in order.
    pub fn stages(&self) -> impl Iterator<Item = &LinearOperator> {
        self.elements.iter().zip(&self.operators).filter(|(c, _)| !c.is_detector()).map(|(_, op)| op)
    }

    pub fn is_unitary_only(&self) -> bool {
        self.elements.iter().all(|c| !matches!(c, Component::Analyzer { .. } | Component::Detector { .. }))
    }

    /// Product of all non-detector operators (last element leftmost).
    pub fn evolution_operator(&self) -> Result<LinearOperator> {
        let mut total = LinearOperator::identity(self.basis.clone());
        for op in self.stages() {
            total = op.compose(&total)?;
        }
        Ok(total)
    }

    pub fn detector_names(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().filter_map(|c| match c {
            Component::Detector { name, .. } => Some(name.as_str()),
            _ => None,
        })
    }
}

/// Applies every non-detector element in order.
pub fn run_circuit(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    let mut state = input.clone();
    for op in c.stages() {
        state = apply(op, &state)?;
    }
    Ok(state)
}

/// `‖Π_path · run_circuit(c, input)‖²` for the named detector.
pub fn detector_click_probability(c: &Circuit, input: &StateVector, detector_name: &str) -> Result<f64> {
    let projector = c
        .elements
        .iter()
        .zip(&c.operators)
        .find_map(|(el, op)| match el {
            Component::Detector { name, .. } if name == detector_name => Some(op),
            _ => None,
        })
        .ok_or_else(|| Error::UnknownDetector(detector_name.to_string()))?;
    let out = run_circuit(c, input)?;
    Ok(apply(projector, &out)?.norm_sqr().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{basis_ket, inner, superpose};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn paper_basis() -> Arc<CompositeBasis> {
        Arc::new(
            CompositeBasis::new([
                ("path", vec!["1", "2", "3", "4", "5"]),
                ("prop", vec!["L_p", "L_-p", "s_up", "s_dn"]),
            ])
            .unwrap(),
        )
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &StateVector, b: &StateVector, tol: f64) {
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn two_balanced_splitters_swap_with_phase() {
        let basis = paper_basis();
        let bs = Component::BeamSplitter { path_a: "1".into(), path_b: "2".into(), theta: FRAC_PI_4 };
        let circuit = Circuit::new(basis.clone(), vec![bs.clone(), bs]).unwrap();
        let out = run_circuit(&circuit, &basis_ket(&basis, &["1", "L_p"]).unwrap()).unwrap();
        let expected = basis_ket(&basis, &["2", "L_p"]).unwrap().scaled(c(0.0, 1.0));
        assert_close(&out, &expected, 1e-15);
    }

    #[test]
    fn magnetic_field_splits_spin_coherently() {
        let basis = paper_basis();
        let b = Component::MagneticField {
            input: "2".into(),
            up_out: "3".into(),
            down_out: "4".into(),
            spins: SpinPair::default(),
        };
        let op = component_operator(&b, &basis).unwrap();
        assert!(op.entries().iter().all(|z| *z == c(0.0, 0.0) || *z == c(1.0, 0.0)));
        assert!(op.is_unitary(1e-12));
        let h = c(FRAC_1_SQRT_2, 0.0);
        let up2 = basis_ket(&basis, &["2", "s_up"]).unwrap();
        let dn2 = basis_ket(&basis, &["2", "s_dn"]).unwrap();
        let input = superpose(&[(h, &up2), (h, &dn2)]).unwrap();
        let up3 = basis_ket(&basis, &["3", "s_up"]).unwrap();
        let dn4 = basis_ket(&basis, &["4", "s_dn"]).unwrap();
        let expected = superpose(&[(h, &up3), (h, &dn4)]).unwrap();
        assert_eq!(apply(&op, &input).unwrap(), expected);
        // Unrelated labels are untouched.
        let l2 = basis_ket(&basis, &["2", "L_p"]).unwrap();
        assert_eq!(apply(&op, &l2).unwrap(), l2);
    }

    #[test]
    fn magnetic_field_rejects_equal_outputs() {
        let b = Component::MagneticField {
            input: "2".into(),
            up_out: "3".into(),
            down_out: "3".into(),
            spins: SpinPair::default(),
        };
        assert!(matches!(component_operator(&b, &paper_basis()), Err(Error::InvalidComponent(_))));
    }

    #[test]
    fn spin_turner_half_turn_about_x() {
        let basis = paper_basis();
        let st = Component::SpinTurner { path: "3".into(), axis: Axis::X, angle: PI, spins: SpinPair::default() };
        let op = component_operator(&st, &basis).unwrap();
        assert!(op.is_unitary(1e-12));
        let out = apply(&op, &basis_ket(&basis, &["3", "s_up"]).unwrap()).unwrap();
        let expected = basis_ket(&basis, &["3", "s_dn"]).unwrap().scaled(c(0.0, -1.0));
        assert_close(&out, &expected, 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-15);
        // Other paths are untouched.
        let other = basis_ket(&basis, &["4", "s_up"]).unwrap();
        assert_eq!(apply(&op, &other).unwrap(), other);
    }

    #[test]
    fn missing_tokens_are_reported() {
        let basis = Arc::new(CompositeBasis::new([("path", vec!["L", "R"]), ("pol", vec!["H", "V"])]).unwrap());
        let st = Component::SpinTurner { path: "L".into(), axis: Axis::Y, angle: 1.0, spins: SpinPair::default() };
        assert!(matches!(component_operator(&st, &basis), Err(Error::InvalidComponent(_))));
        let custom = SpinPair { up: "H".into(), down: "V".into() };
        let st = Component::SpinTurner { path: "L".into(), axis: Axis::Y, angle: 1.0, spins: custom };
        assert!(component_operator(&st, &basis).unwrap().is_unitary(1e-12));
    }

    #[test]
    fn detectors_must_come_last() {
        let basis = paper_basis();
        let d = Component::Detector { name: "D1".into(), path: "1".into() };
        let ps = Component::PhaseShifter { path: "1".into(), phi: 0.3 };
        assert!(Circuit::new(basis.clone(), vec![d.clone(), ps.clone()]).is_err());
        assert!(Circuit::new(basis, vec![ps, d]).is_ok());
    }

    #[test]
    fn click_probabilities() {
        let basis = paper_basis();
        let detectors: Vec<Component> = ["1", "2", "3", "4", "5"]
            .iter()
            .map(|p| Component::Detector { name: alloc::format!("D{p}"), path: (*p).into() })
            .collect();
        let circuit = Circuit::new(basis.clone(), detectors).unwrap();
        let on_path = basis_ket(&basis, &["3", "s_dn"]).unwrap();
        assert_eq!(detector_click_probability(&circuit, &on_path, "D3").unwrap(), 1.0);
        assert_eq!(detector_click_probability(&circuit, &on_path, "D1").unwrap(), 0.0);
        assert!(matches!(detector_click_probability(&circuit, &on_path, "D9"), Err(Error::UnknownDetector(_))));
        let h = c(FRAC_1_SQRT_2, 0.0);
        let a = basis_ket(&basis, &["1", "L_p"]).unwrap();
        let s = superpose(&[(h, &a), (h, &on_path)]).unwrap();
        let total: f64 = circuit.detector_names().map(|d| detector_click_probability(&circuit, &s, d).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((inner(&s, &s).unwrap().re - 1.0).abs() < 1e-15);
    }
}
