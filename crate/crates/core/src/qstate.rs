//! Dense complex states and operators over labeled composite bases.
//!
//! A [`CompositeBasis`] is an ordered list of named subsystems, each with its
//! own ordered level labels. Composite indices are row-major: the last
//! subsystem varies fastest, so `|path, prop⟩` sits at
//! `path_index * prop_levels + prop_index`.
//!
//! States and operators share their basis through an [`Arc`], so cloning is
//! cheap and values can move freely between threads.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::{Error, Result, EXACT_TOL, MAX_DIM};

/// A complex amplitude.
pub type Amplitude = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    name: String,
    levels: Vec<String>,
}

impl Subsystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeBasis {
    subsystems: Vec<Subsystem>,
    dim: usize,
}

impl CompositeBasis {
    pub fn new<N, L>(subsystems: impl IntoIterator<Item = (N, Vec<L>)>) -> Result<Self>
    where
        N: Into<String>,
        L: Into<String>,
    {
        let subsystems: Vec<Subsystem> = subsystems
            .into_iter()
            .map(|(name, levels)| Subsystem { name: name.into(), levels: levels.into_iter().map(Into::into).collect() })
            .collect();
        Self::from_subsystems(subsystems)
    }

    fn from_subsystems(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidBasis("at least one subsystem is required".into()));
        }
        let mut dim: usize = 1;
        for (i, sub) in subsystems.iter().enumerate() {
            if sub.levels.is_empty() {
                return Err(Error::InvalidBasis(alloc::format!("subsystem `{}` has no levels", sub.name)));
            }
            if subsystems[..i].iter().any(|s| s.name == sub.name) {
                return Err(Error::InvalidBasis(alloc::format!("duplicate subsystem name `{}`", sub.name)));
            }
            for (j, level) in sub.levels.iter().enumerate() {
                if sub.levels[..j].contains(level) {
                    return Err(Error::InvalidBasis(alloc::format!(
                        "duplicate level `{level}` in subsystem `{}`",
                        sub.name
                    )));
                }
            }
            dim = dim
                .checked_mul(sub.levels.len())
                .filter(|&d| d <= MAX_DIM)
                .ok_or(Error::DimensionTooLarge(dim.saturating_mul(sub.levels.len())))?;
        }
        Ok(CompositeBasis { subsystems, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn subsystem_index(&self, name: &str) -> Result<usize> {
        self.subsystems.iter().position(|s| s.name == name).ok_or_else(|| Error::UnknownSubsystem(name.to_string()))
    }

    /// Number of composite indices between consecutive levels of subsystem `k`.
    pub fn stride(&self, k: usize) -> usize {
        self.subsystems[k + 1..].iter().map(Subsystem::len).product()
    }

    pub fn level_index(&self, subsystem: usize, label: &str) -> Result<usize> {
        let sub = &self.subsystems[subsystem];
        sub.level_index(label)
            .ok_or_else(|| Error::UnknownLevel { subsystem: sub.name.clone(), label: label.to_string() })
    }

    /// Composite index of one label per subsystem, in subsystem order.
    pub fn index_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        if labels.len() != self.subsystems.len() {
            return Err(Error::LabelCount { expected: self.subsystems.len(), found: labels.len() });
        }
        let mut index = 0;
        for (k, label) in labels.iter().enumerate() {
            let level = self.level_index(k, label.as_ref())?;
            index = index * self.subsystems[k].len() + level;
        }
        Ok(index)
    }

    /// Level index of every subsystem for a composite index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.subsystems.len()];
        for (k, sub) in self.subsystems.iter().enumerate().rev() {
            digits[k] = index % sub.len();
            index /= sub.len();
        }
        digits
    }

    pub fn labels_of(&self, index: usize) -> Vec<&str> {
        self.digits(index).into_iter().zip(&self.subsystems).map(|(d, s)| s.levels[d].as_str()).collect()
    }

    /// Finds the unique non-first subsystem holding `label`.
    pub fn find_level(&self, label: &str, skip_first: bool) -> Result<(usize, usize)> {
        let start = usize::from(skip_first);
        let mut found = None;
        for (k, sub) in self.subsystems.iter().enumerate().skip(start) {
            if let Some(level) = sub.level_index(label) {
                if found.is_some() {
                    return Err(Error::InvalidBasis(alloc::format!("level `{label}` is ambiguous across subsystems")));
                }
                found = Some((k, level));
            }
        }
        found.ok_or_else(|| Error::UnknownLevel {
            subsystem: if skip_first { "<property>".into() } else { "<any>".into() },
            label: label.to_string(),
        })
    }

    fn tensor(&self, other: &CompositeBasis) -> Result<CompositeBasis> {
        let dim = self.dim.saturating_mul(other.dim);
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        Self::from_subsystems(subsystems)
    }
}

impl fmt::Display for CompositeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, sub) in self.subsystems.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊗ ")?;
            }
            write!(f, "{}{{{}}}", sub.name, sub.levels.join(","))?;
        }
        Ok(())
    }
}

fn same_basis(a: &Arc<CompositeBasis>, b: &Arc<CompositeBasis>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch)
    }
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Arc<CompositeBasis>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(basis: Arc<CompositeBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        check_finite(&amps)?;
        Ok(StateVector { basis, amps })
    }

    pub fn zero(basis: Arc<CompositeBasis>) -> Self {
        let amps = vec![ZERO; basis.dim()];
        StateVector { basis, amps }
    }

    pub fn basis(&self) -> &Arc<CompositeBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= EXACT_TOL
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector { basis: self.basis.clone(), amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    /// Sum of two states on the same basis.
    pub fn plus(&self, other: &StateVector) -> Result<StateVector> {
        superpose(&[(ONE, self), (ONE, other)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    basis: Arc<CompositeBasis>,
    /// Row-major `dim × dim`.
    entries: Vec<Complex64>,
}

impl LinearOperator {
    pub fn from_entries(basis: Arc<CompositeBasis>, entries: Vec<Complex64>) -> Result<Self> {
        let dim = basis.dim();
        if entries.len() != dim * dim {
            return Err(Error::BasisMismatch);
        }
        check_finite(&entries)?;
        Ok(LinearOperator { basis, entries })
    }

    pub fn zero(basis: Arc<CompositeBasis>) -> Self {
        let dim = basis.dim();
        LinearOperator { basis, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(basis: Arc<CompositeBasis>) -> Self {
        let mut op = Self::zero(basis);
        let dim = op.dim();
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    /// `1 ⊗ … ⊗ local ⊗ … ⊗ 1` with `local` acting on subsystem `k`.
    ///
    /// `local` is row-major over the levels of that subsystem.
    pub fn embed(basis: Arc<CompositeBasis>, k: usize, local: &[Complex64]) -> Result<Self> {
        let n = basis.subsystems().get(k).ok_or_else(|| Error::UnknownSubsystem(alloc::format!("#{k}")))?.len();
        if local.len() != n * n {
            return Err(Error::BasisMismatch);
        }
        check_finite(local)?;
        let mut op = Self::zero(basis);
        let dim = op.dim();
        let stride = op.basis.stride(k);
        for col in 0..dim {
            let digit = (col / stride) % n;
            let base = col - digit * stride;
            for row_digit in 0..n {
                let v = local[row_digit * n + digit];
                if v != ZERO {
                    op.entries[(base + row_digit * stride) * dim + col] = v;
                }
            }
        }
        Ok(op)
    }

    /// Projector onto one level of one subsystem, identity elsewhere.
    pub fn level_projector(basis: Arc<CompositeBasis>, subsystem: &str, level: &str) -> Result<Self> {
        let k = basis.subsystem_index(subsystem)?;
        let l = basis.level_index(k, level)?;
        let n = basis.subsystems()[k].len();
        let mut local = vec![ZERO; n * n];
        local[l * n + l] = ONE;
        Self::embed(basis, k, &local)
    }

    pub fn basis(&self) -> &Arc<CompositeBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn adjoint(&self) -> LinearOperator {
        let dim = self.dim();
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[c * dim + r] = self.entries[r * dim + c].conj();
            }
        }
        LinearOperator { basis: self.basis.clone(), entries }
    }

    /// Operator product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        same_basis(&self.basis, &rhs.basis)?;
        let dim = self.dim();
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let a = self.entries[r * dim + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.entries[k * dim..(k + 1) * dim];
                for (out, b) in entries[r * dim..(r + 1) * dim].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        Ok(LinearOperator { basis: self.basis.clone(), entries })
    }

    pub fn add(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        self.combine(ONE, rhs, ONE)
    }

    /// `a·self + b·rhs`.
    pub fn combine(&self, a: Complex64, rhs: &LinearOperator, b: Complex64) -> Result<LinearOperator> {
        same_basis(&self.basis, &rhs.basis)?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(x, y)| a * x + b * y).collect();
        Ok(LinearOperator { basis: self.basis.clone(), entries })
    }

    pub fn scaled(&self, factor: Complex64) -> LinearOperator {
        LinearOperator { basis: self.basis.clone(), entries: self.entries.iter().map(|e| e * factor).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &LinearOperator) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| (r..dim).all(|c| (self.entry(r, c) - self.entry(c, r).conj()).norm() <= tol))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        match self.adjoint().compose(self) {
            Ok(p) => p.max_deviation(&LinearOperator::identity(self.basis.clone())) <= tol,
            Err(_) => false,
        }
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.compose(self).map(|sq| sq.max_deviation(self) <= tol).unwrap_or(false)
    }

    /// Matrix element `⟨bra|self|ket⟩`.
    pub fn sandwich(&self, bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
        inner(bra, &apply(self, ket)?)
    }
}

/// Unit vector for one label per subsystem.
pub fn basis_ket<S: AsRef<str>>(basis: &Arc<CompositeBasis>, labels: &[S]) -> Result<StateVector> {
    let index = basis.index_of(labels)?;
    let mut state = StateVector::zero(basis.clone());
    state.amps[index] = ONE;
    Ok(state)
}

/// Linear combination `Σ c_k |s_k⟩`; never renormalizes.
pub fn superpose(terms: &[(Amplitude, &StateVector)]) -> Result<StateVector> {
    let (_, first) = terms.first().ok_or(Error::EmptySuperposition)?;
    let mut out = StateVector::zero(first.basis.clone());
    for (coef, state) in terms {
        same_basis(&out.basis, &state.basis)?;
        check_finite(core::slice::from_ref(coef))?;
        for (o, a) in out.amps.iter_mut().zip(&state.amps) {
            *o += coef * a;
        }
    }
    check_finite(&out.amps)?;
    Ok(out)
}

/// `⟨bra|ket⟩`, conjugate-linear in `bra`.
pub fn inner(bra: &StateVector, ket: &StateVector) -> Result<Amplitude> {
    same_basis(&bra.basis, &ket.basis)?;
    Ok(bra.amps.iter().zip(&ket.amps).map(|(b, k)| b.conj() * k).sum())
}

pub fn normalize(state: &StateVector) -> Result<StateVector> {
    let norm = state.norm();
    if norm.is_nan() || norm <= 1e-14 {
        return Err(Error::NullState);
    }
    Ok(state.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Kronecker product; the result's subsystems are `a`'s followed by `b`'s.
pub fn tensor_state(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let basis = Arc::new(a.basis.tensor(&b.basis)?);
    let mut amps = Vec::with_capacity(basis.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(StateVector { basis, amps })
}

pub fn tensor_op(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    let basis = Arc::new(a.basis.tensor(&b.basis)?);
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    let mut entries = vec![ZERO; dim * dim];
    for ar in 0..da {
        for ac in 0..da {
            let x = a.entry(ar, ac);
            if x == ZERO {
                continue;
            }
            for br in 0..db {
                for bc in 0..db {
                    entries[(ar * db + br) * dim + ac * db + bc] = x * b.entry(br, bc);
                }
            }
        }
    }
    Ok(LinearOperator { basis, entries })
}

/// `Σ |v⟩⟨v|` over an orthonormal family.
pub fn projector_onto(states: &[StateVector]) -> Result<LinearOperator> {
    let first = states.first().ok_or(Error::EmptySuperposition)?;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i..] {
            let ip = inner(a, b)?;
            let expected = if core::ptr::eq(a, b) { ONE } else { ZERO };
            if (ip - expected).norm() > 1e-10 {
                return Err(Error::NotOrthonormal);
            }
        }
    }
    let mut op = LinearOperator::zero(first.basis.clone());
    let dim = op.dim();
    for v in states {
        for r in 0..dim {
            if v.amps[r] == ZERO {
                continue;
            }
            for c in 0..dim {
                op.entries[r * dim + c] += v.amps[r] * v.amps[c].conj();
            }
        }
    }
    Ok(op)
}

pub fn apply(op: &LinearOperator, state: &StateVector) -> Result<StateVector> {
    same_basis(&op.basis, &state.basis)?;
    let dim = op.dim();
    let amps = (0..dim)
        .map(|r| op.entries[r * dim..(r + 1) * dim].iter().zip(&state.amps).map(|(m, a)| m * a).sum())
        .collect();
    Ok(StateVector { basis: state.basis.clone(), amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

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

    #[test]
    fn basis_ket_is_canonical_vector() {
        let basis = paper_basis();
        let k = basis_ket(&basis, &["1", "L_p"]).unwrap();
        assert_eq!(k.amplitudes()[0], ONE);
        assert_eq!(k.norm_sqr(), 1.0);
        let k3 = basis_ket(&basis, &["3", "s_up"]).unwrap();
        assert_eq!(k3.amplitudes()[2 * 4 + 2], ONE);
        assert_eq!(inner(&k3, &k3).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn unknown_level_names_subsystem() {
        let basis = paper_basis();
        let err = basis_ket(&basis, &["9", "L_p"]).unwrap_err();
        assert_eq!(err, Error::UnknownLevel { subsystem: "path".into(), label: "9".into() });
        assert!(alloc::format!("{err}").contains("unknown level"));
    }

    #[test]
    fn invalid_bases_are_rejected() {
        let empty: [(&str, Vec<&str>); 0] = [];
        assert!(CompositeBasis::new(empty).is_err());
        assert!(CompositeBasis::new([("a", Vec::<&str>::new())]).is_err());
        assert!(CompositeBasis::new([("a", vec!["x", "x"])]).is_err());
        assert!(CompositeBasis::new([("a", vec!["x"]), ("a", vec!["y"])]).is_err());
        let big: Vec<String> = (0..65).map(|i| alloc::format!("{i}")).collect();
        assert!(matches!(CompositeBasis::new([("a", big.clone()), ("b", big)]), Err(Error::DimensionTooLarge(_))));
    }

    #[test]
    fn superpose_cases() {
        let basis = paper_basis();
        let a = basis_ket(&basis, &["1", "L_p"]).unwrap();
        let b = basis_ket(&basis, &["2", "s_up"]).unwrap();
        let h = c(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = superpose(&[(h, &a), (h, &b)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);

        let z = superpose(&[(ONE, &a), (-ONE, &a)]).unwrap();
        assert_eq!(z.norm_sqr(), 0.0);
        assert_eq!(normalize(&z).unwrap_err(), Error::NullState);

        assert_eq!(superpose(&[]).unwrap_err(), Error::EmptySuperposition);
        let other = Arc::new(CompositeBasis::new([("q", vec!["0", "1"])]).unwrap());
        let q = basis_ket(&other, &["0"]).unwrap();
        assert_eq!(superpose(&[(ONE, &a), (ONE, &q)]).unwrap_err(), Error::BasisMismatch);
        assert_eq!(inner(&a, &q).unwrap_err(), Error::BasisMismatch);
    }

    #[test]
    fn helicity_sign_pre_state_is_unit() {
        let basis = paper_basis();
        let h = c(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let up = basis_ket(&basis, &["2", "s_up"]).unwrap();
        let dn = basis_ket(&basis, &["2", "s_dn"]).unwrap();
        let spin = superpose(&[(h, &up), (h, &dn)]).unwrap();
        let l = basis_ket(&basis, &["1", "L_p"]).unwrap();
        let pre = superpose(&[(h, &l), (h, &spin)]).unwrap();
        assert!((pre.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_keeps_input() {
        let basis = paper_basis();
        let a = basis_ket(&basis, &["4", "s_dn"]).unwrap().scaled(c(3.0, 4.0));
        let n = normalize(&a).unwrap();
        assert!((n.norm() - 1.0).abs() <= 1e-12);
        assert_eq!(a.norm_sqr(), 25.0);
    }

    #[test]
    fn tensor_identity_and_units() {
        let q = Arc::new(CompositeBasis::new([("q", vec!["0", "1"])]).unwrap());
        let r = Arc::new(CompositeBasis::new([("r", vec!["a", "b", "c"])]).unwrap());
        let i = tensor_op(&LinearOperator::identity(q.clone()), &LinearOperator::identity(r.clone())).unwrap();
        assert_eq!(i, LinearOperator::identity(i.basis().clone()));
        let s = tensor_state(&basis_ket(&q, &["1"]).unwrap(), &basis_ket(&r, &["c"]).unwrap()).unwrap();
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.basis().labels_of(5), vec!["1", "c"]);
        assert!(matches!(tensor_state(&s, &s), Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn projectors() {
        let basis = paper_basis();
        let k = basis_ket(&basis, &["1", "L_p"]).unwrap();
        let p = projector_onto(&[k]).unwrap();
        assert_eq!(p.trace(), ONE);
        assert_eq!(p.entry(0, 0), ONE);
        assert!(p.is_projector(1e-12));

        let kets: Vec<_> =
            ["L_p", "L_-p", "s_up", "s_dn"].iter().map(|l| basis_ket(&basis, &["2", *l]).unwrap()).collect();
        let p2 = projector_onto(&kets).unwrap();
        assert_eq!(p2.trace(), c(4.0, 0.0));
        assert_eq!(p2, LinearOperator::level_projector(basis.clone(), "path", "2").unwrap());

        let p3 = LinearOperator::level_projector(basis.clone(), "path", "3").unwrap();
        assert!(p3.compose(&p3).unwrap().max_deviation(&p3) == 0.0);

        let a = basis_ket(&basis, &["1", "L_p"]).unwrap();
        let not_orth = superpose(&[(ONE, &a), (ONE, &kets[0])]).unwrap();
        assert_eq!(projector_onto(&[a, not_orth]).unwrap_err(), Error::NotOrthonormal);
    }

    #[test]
    fn embed_places_local_operator() {
        let basis = paper_basis();
        let k = basis.subsystem_index("prop").unwrap();
        let mut flip = vec![ZERO; 16];
        flip[2 * 4 + 3] = ONE;
        flip[3 * 4 + 2] = ONE;
        flip[0] = ONE;
        flip[5] = ONE;
        let op = LinearOperator::embed(basis.clone(), k, &flip).unwrap();
        assert!(op.is_unitary(1e-12));
        let up = basis_ket(&basis, &["4", "s_up"]).unwrap();
        let dn = basis_ket(&basis, &["4", "s_dn"]).unwrap();
        assert_eq!(apply(&op, &up).unwrap(), dn);
    }
}
