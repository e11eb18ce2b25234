//! Built-in pre/post-selection scenarios, their evaluation and audit.
//!
//! Each scenario is available under two interpretations:
//! - [`Interpretation::Literal`]: the pre- and post-selected states are used
//!   exactly as written (renormalized), with no evolution in between;
//! - [`Interpretation::Evolved`]: the scenario's circuit runs between
//!   pre-selection and the measurement plane.
//!
//! Published values are carried as [`Claim`]s. They are reported next to the
//! computed weak values and never feed into any computation.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use core::fmt;

use num_complex::Complex64;

use crate::optics::{Axis, Circuit, Component, SpinPair};
use crate::qstate::{basis_ket, inner, normalize, superpose, Amplitude, CompositeBasis, LinearOperator, StateVector};
use crate::weakval::{postselect_probability, reversed_weak_value, weak_value, PrePostEnsemble};
use crate::{Error, Result};

/// Tolerance for the completeness sum rule and the helicity verdict.
pub const SUM_RULE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Helicity {
    sign: i8,
}

impl Helicity {
    pub const POSITIVE: Helicity = Helicity { sign: 1 };
    pub const NEGATIVE: Helicity = Helicity { sign: -1 };

    pub fn sign(self) -> i8 {
        self.sign
    }
}

/// Sign of the projection of the spin axis on the momentum axis.
pub fn helicity_sign(spin_axis: [f64; 3], momentum_axis: [f64; 3]) -> Result<Helicity> {
    let dot: f64 = spin_axis.iter().zip(&momentum_axis).map(|(s, p)| s * p).sum();
    let len = |v: &[f64; 3]| libm::sqrt(v.iter().map(|x| x * x).sum());
    let (ls, lp) = (len(&spin_axis), len(&momentum_axis));
    if !(ls > 0.0 && lp > 0.0) || !dot.is_finite() || dot.abs() <= 1e-12 * ls * lp {
        return Err(Error::HelicityUndefined);
    }
    Ok(if dot > 0.0 { Helicity::POSITIVE } else { Helicity::NEGATIVE })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Interpretation {
    Literal,
    Evolved,
}

impl Interpretation {
    pub const ALL: [Interpretation; 2] = [Interpretation::Literal, Interpretation::Evolved];

    pub fn name(self) -> &'static str {
        match self {
            Interpretation::Literal => "literal",
            Interpretation::Evolved => "evolved",
        }
    }

    pub fn parse(s: &str) -> Option<Interpretation> {
        match s {
            "literal" => Some(Interpretation::Literal),
            "evolved" => Some(Interpretation::Evolved),
            _ => None,
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub observable: String,
    pub value: Amplitude,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub summary: String,
    pub basis: Arc<CompositeBasis>,
    pub pre: StateVector,
    pub post: StateVector,
    pub evolution: Option<Circuit>,
    pub observables: Vec<(String, LinearOperator)>,
    pub claims: Vec<Claim>,
    /// States whose overlap with the post-selection is audited (a
    /// non-demolition finding in an arm, for instance).
    pub probes: Vec<(String, StateVector)>,
    /// Observable whose weak value decides the helicity verdict.
    pub helicity_observable: Option<String>,
    pub interpretation: Interpretation,
}

impl Scenario {
    /// Checks the scenario invariants; `pre` and `post` are renormalized.
    pub fn validated(mut self) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        self.pre = normalize(&self.pre)?;
        self.post = normalize(&self.post)?;
        for s in [&self.pre, &self.post] {
            if **s.basis() != *self.basis {
                return Err(Error::BasisMismatch);
            }
        }
        for (name, op) in &self.observables {
            if **op.basis() != *self.basis {
                return invalid(alloc::format!("observable `{name}` is on a different basis"));
            }
        }
        for (i, (name, _)) in self.observables.iter().enumerate() {
            if self.observables[..i].iter().any(|(n, _)| n == name) {
                return invalid(alloc::format!("observable `{name}` is defined twice"));
            }
        }
        for (name, probe) in &self.probes {
            if **probe.basis() != *self.basis {
                return invalid(alloc::format!("probe `{name}` is on a different basis"));
            }
        }
        for claim in &self.claims {
            if self.observable(&claim.observable).is_none() {
                return Err(Error::UnknownObservable(claim.observable.clone()));
            }
        }
        if let Some(name) = &self.helicity_observable {
            if self.observable(name).is_none() {
                return Err(Error::UnknownObservable(name.clone()));
            }
        }
        if let Some(circuit) = &self.evolution {
            if **circuit.basis() != *self.basis {
                return Err(Error::BasisMismatch);
            }
            if !circuit.is_unitary_only() {
                return invalid("the evolution circuit may not contain analyzers or detectors".into());
            }
        }
        Ok(self)
    }

    pub fn observable(&self, name: &str) -> Option<&LinearOperator> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, op)| op)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.observable == name)
    }

    pub fn with_interpretation(&self, interpretation: Interpretation) -> Scenario {
        Scenario { interpretation, ..self.clone() }
    }

    /// The ensemble under this scenario's interpretation.
    pub fn ensemble(&self) -> Result<PrePostEnsemble> {
        let evolution = match (&self.evolution, self.interpretation) {
            (Some(circuit), Interpretation::Evolved) => Some(circuit.evolution_operator()?),
            _ => None,
        };
        PrePostEnsemble::new(self.pre.clone(), self.post.clone(), evolution)
    }

    /// Projectors onto every level of the first (path) subsystem.
    pub fn path_projectors(&self) -> Result<Vec<(String, LinearOperator)>> {
        let path = &self.basis.subsystems()[0];
        path.levels()
            .iter()
            .map(|level| {
                let op = LinearOperator::level_projector(self.basis.clone(), path.name(), level)?;
                Ok((level.clone(), op))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelicityVerdict {
    /// Weak value 1: the detector clicks with certainty.
    Positive,
    /// Weak value 0: the detector never clicks.
    Negative,
    Indeterminate,
}

impl HelicityVerdict {
    pub fn from_weak_value(w: Amplitude) -> HelicityVerdict {
        if (w - Complex64::new(1.0, 0.0)).norm() <= SUM_RULE_TOL {
            HelicityVerdict::Positive
        } else if w.norm() <= SUM_RULE_TOL {
            HelicityVerdict::Negative
        } else {
            HelicityVerdict::Indeterminate
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HelicityVerdict::Positive => "positive",
            HelicityVerdict::Negative => "negative",
            HelicityVerdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableReport {
    pub name: String,
    /// `⟨Ψ_f|A U|Ψ_i⟩ / ⟨Ψ_f|U|Ψ_i⟩`; `None` when post-selection is impossible.
    pub weak_value: Option<Amplitude>,
    /// `⟨UΨ_i|A|Ψ_f⟩ / ⟨UΨ_i|Ψ_f⟩`.
    pub reversed: Option<Amplitude>,
    pub claimed: Option<Claim>,
    /// `|computed - claimed|` when both exist.
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditFinding {
    pub check: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditRecord {
    pub findings: Vec<AuditFinding>,
}

impl AuditRecord {
    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.passed)
    }

    pub fn finding(&self, check: &str) -> Option<&AuditFinding> {
        self.findings.iter().find(|f| f.check == check)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub interpretation: Interpretation,
    pub feasible: bool,
    pub postselect_prob: f64,
    pub observables: Vec<ObservableReport>,
    pub helicity: Option<HelicityVerdict>,
    pub audit: AuditRecord,
}

impl ScenarioReport {
    pub fn observable(&self, name: &str) -> Option<&ObservableReport> {
        self.observables.iter().find(|o| o.name == name)
    }
}

/// Weak values in both bra/ket orderings, deviations from claims and the audit.
pub fn evaluate_scenario(s: &Scenario) -> Result<ScenarioReport> {
    let ensemble = s.ensemble()?;
    let feasible = !ensemble.is_orthogonal();
    let mut observables = Vec::with_capacity(s.observables.len());
    for (name, op) in &s.observables {
        let (weak, reversed) = if feasible {
            (Some(weak_value(name, op, &ensemble)?.value), Some(reversed_weak_value(op, &ensemble)?))
        } else {
            (None, None)
        };
        let claimed = s.claim(name).cloned();
        let deviation = match (&weak, &claimed) {
            (Some(w), Some(c)) => Some((w - c.value).norm()),
            _ => None,
        };
        observables.push(ObservableReport { name: name.clone(), weak_value: weak, reversed, claimed, deviation });
    }
    let helicity = s.helicity_observable.as_ref().and_then(|name| {
        observables.iter().find(|o| &o.name == name).and_then(|o| o.weak_value).map(HelicityVerdict::from_weak_value)
    });
    Ok(ScenarioReport {
        scenario: s.name.clone(),
        interpretation: s.interpretation,
        feasible,
        postselect_prob: postselect_probability(&ensemble),
        observables,
        helicity,
        audit: consistency_audit(s),
    })
}

/// Checks that survive formalization: probe orthogonality, the path
/// completeness sum rule and feasibility of the post-selection.
pub fn consistency_audit(s: &Scenario) -> AuditRecord {
    let mut findings = Vec::new();
    let ensemble = match s.ensemble() {
        Ok(e) => e,
        Err(err) => {
            findings.push(AuditFinding {
                check: "ensemble".into(),
                passed: false,
                value: None,
                detail: err.to_string(),
            });
            return AuditRecord { findings };
        }
    };
    if ensemble.is_orthogonal() {
        findings.push(AuditFinding {
            check: "postselection".into(),
            passed: false,
            value: None,
            detail: "post-selection impossible".into(),
        });
        return AuditRecord { findings };
    }
    let prob = postselect_probability(&ensemble);
    findings.push(AuditFinding {
        check: "postselection".into(),
        passed: prob > 0.0,
        value: Some(prob),
        detail: alloc::format!("post-selection probability {prob}"),
    });

    for (name, probe) in &s.probes {
        let finding = match inner(probe, &s.post) {
            Ok(overlap) => {
                let magnitude = overlap.norm();
                AuditFinding {
                    check: alloc::format!("orthogonality:{name}"),
                    passed: magnitude == 0.0,
                    value: Some(magnitude),
                    detail: if magnitude == 0.0 {
                        alloc::format!("`{name}` is orthogonal to the post-selected state")
                    } else {
                        alloc::format!("`{name}` overlaps the post-selected state by {magnitude}")
                    },
                }
            }
            Err(err) => AuditFinding {
                check: alloc::format!("orthogonality:{name}"),
                passed: false,
                value: None,
                detail: err.to_string(),
            },
        };
        findings.push(finding);
    }

    let completeness = s.path_projectors().and_then(|projectors| {
        projectors.iter().map(|(name, op)| Ok(weak_value(name, op, &ensemble)?.value)).sum::<Result<Amplitude>>()
    });
    findings.push(match completeness {
        Ok(total) => {
            let dev = (total - Complex64::new(1.0, 0.0)).norm();
            AuditFinding {
                check: "completeness".into(),
                passed: dev <= SUM_RULE_TOL,
                value: Some(dev),
                detail: alloc::format!("path projector weak values sum to {} + {}i", total.re, total.im),
            }
        }
        Err(err) => AuditFinding { check: "completeness".into(), passed: false, value: None, detail: err.to_string() },
    });
    AuditRecord { findings }
}

pub const BUILTIN_NAMES: [&str; 4] = ["helicity-sign", "helicity-preserving", "helicity-reversing", "cheshire-cat"];

/// Path ⊗ property basis shared by the three helicity scenarios.
pub fn helicity_basis() -> Arc<CompositeBasis> {
    Arc::new(
        CompositeBasis::new([("path", vec!["1", "2", "3", "4", "5"]), ("prop", vec!["L_p", "L_-p", "s_up", "s_dn"])])
            .expect("static basis"),
    )
}

pub fn cheshire_basis() -> Arc<CompositeBasis> {
    Arc::new(CompositeBasis::new([("path", vec!["L", "R"]), ("pol", vec!["H", "V"])]).expect("static basis"))
}

fn ket(basis: &Arc<CompositeBasis>, path: &str, prop: &str) -> StateVector {
    basis_ket(basis, &[path, prop]).expect("static labels")
}

fn combo(terms: &[(Complex64, &StateVector)]) -> StateVector {
    superpose(terms).expect("shared basis")
}

fn path_projector(basis: &Arc<CompositeBasis>, path: &str) -> LinearOperator {
    LinearOperator::level_projector(basis.clone(), "path", path).expect("static labels")
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn one_claim(observable: &str, reference: &str) -> Claim {
    Claim { observable: observable.into(), value: real(1.0), reference: reference.into() }
}

fn helicity_sign_scenario() -> Result<Scenario> {
    let b = helicity_basis();
    let h = real(FRAC_1_SQRT_2);
    // Spin superposition on arm 2, renormalized so the pre state is a unit vector.
    let spin = combo(&[(h, &ket(&b, "2", "s_up")), (h, &ket(&b, "2", "s_dn"))]);
    let pre = combo(&[(h, &ket(&b, "1", "L_p")), (h, &spin)]);
    let post = combo(&[(h, &ket(&b, "1", "L_p")), (h, &ket(&b, "3", "s_up"))]);
    let field = Component::MagneticField {
        input: "2".into(),
        up_out: "3".into(),
        down_out: "4".into(),
        spins: SpinPair::default(),
    };
    Scenario {
        name: "helicity-sign".into(),
        summary: "weak value at path 3 after a Stern-Gerlach split of the separated spin".into(),
        basis: b.clone(),
        pre,
        post,
        evolution: Some(Circuit::new(b.clone(), vec![field])?),
        observables: vec![
            ("P1".into(), path_projector(&b, "1")),
            ("P2".into(), path_projector(&b, "2")),
            ("P3".into(), path_projector(&b, "3")),
        ],
        claims: vec![one_claim("P3", "published weak value at path 3 (positive helicity)")],
        probes: vec![("arm2".into(), ket(&b, "2", "L_p"))],
        helicity_observable: Some("P3".into()),
        interpretation: Interpretation::Literal,
    }
    .validated()
}

/// Routes path 3 onto path 4: a full-reflection splitter (θ = π/2) maps
/// `|3⟩ → i|4⟩`.
fn relabel_3_to_4() -> Component {
    Component::BeamSplitter { path_a: "3".into(), path_b: "4".into(), theta: FRAC_PI_2 }
}

fn helicity_preserving_scenario() -> Result<Scenario> {
    let b = helicity_basis();
    let h = real(FRAC_1_SQRT_2);
    let pre = combo(&[(h, &ket(&b, "5", "L_-p")), (h, &ket(&b, "3", "s_up"))]);
    let post = combo(&[(h, &ket(&b, "5", "L_-p")), (h, &ket(&b, "4", "s_dn"))]);
    // i|4,↑⟩ then exp(-iπσx/2) = -iσx gives |4,↓⟩, so U|pre⟩ = |post⟩.
    let circuit = vec![
        relabel_3_to_4(),
        Component::SpinTurner { path: "4".into(), axis: Axis::X, angle: PI, spins: SpinPair::default() },
    ];
    let spin_down = LinearOperator::level_projector(b.clone(), "prop", "s_dn").expect("static labels");
    Scenario {
        name: "helicity-preserving".into(),
        summary: "momentum reversed on path 5 with the spin flipped onto path 4".into(),
        basis: b.clone(),
        pre,
        post,
        evolution: Some(Circuit::new(b.clone(), circuit)?),
        observables: vec![
            ("P4".into(), path_projector(&b, "4")),
            ("S4dn".into(), path_projector(&b, "4").compose(&spin_down)?),
        ],
        claims: vec![one_claim("P4", "published weak value at path 4 (helicity preserved)")],
        probes: vec![],
        helicity_observable: None,
        interpretation: Interpretation::Literal,
    }
    .validated()
}

fn helicity_reversing_scenario() -> Result<Scenario> {
    let b = helicity_basis();
    let h = real(FRAC_1_SQRT_2);
    let pre = combo(&[(h, &ket(&b, "5", "L_p")), (h, &ket(&b, "3", "s_up"))]);
    let post = combo(&[(h, &ket(&b, "5", "L_-p")), (h, &ket(&b, "4", "s_up"))]);
    // i|4,↑⟩ then a -π/2 phase on path 4 gives |4,↑⟩.
    let circuit = vec![relabel_3_to_4(), Component::PhaseShifter { path: "4".into(), phi: -FRAC_PI_2 }];
    Scenario {
        name: "helicity-reversing".into(),
        summary: "momentum reversed on path 5 with the spin orientation kept on path 4".into(),
        basis: b.clone(),
        pre,
        post,
        evolution: Some(Circuit::new(b.clone(), circuit)?),
        observables: vec![("P4".into(), path_projector(&b, "4"))],
        claims: vec![one_claim("P4", "published weak value at path 4 (helicity reversed)")],
        probes: vec![],
        helicity_observable: None,
        interpretation: Interpretation::Literal,
    }
    .validated()
}

/// Circular polarization `|+⟩⟨+| - |-⟩⟨-|` with `|±⟩ = (|H⟩ ± i|V⟩)/√2`,
/// i.e. σ_y in the linear (H, V) basis.
pub fn circular_polarization(basis: &Arc<CompositeBasis>) -> Result<LinearOperator> {
    let k = basis.subsystem_index("pol")?;
    LinearOperator::embed(basis.clone(), k, &Axis::Y.pauli())
}

fn cheshire_cat_scenario() -> Result<Scenario> {
    let b = cheshire_basis();
    let h = real(FRAC_1_SQRT_2);
    let pre = combo(&[(Complex64::new(0.0, FRAC_1_SQRT_2), &ket(&b, "L", "H")), (h, &ket(&b, "R", "H"))]);
    let post = combo(&[(h, &ket(&b, "L", "H")), (h, &ket(&b, "R", "V"))]);
    let sz = circular_polarization(&b)?;
    let pl = path_projector(&b, "L");
    let pr = path_projector(&b, "R");
    Scenario {
        name: "cheshire-cat".into(),
        summary: "canonical Cheshire Cat: photon in the left arm, circular polarization in the right".into(),
        basis: b.clone(),
        pre,
        post,
        evolution: None,
        observables: vec![
            ("PL".into(), pl.clone()),
            ("PR".into(), pr.clone()),
            ("SzL".into(), sz.compose(&pl)?),
            ("SzR".into(), sz.compose(&pr)?),
        ],
        claims: vec![],
        probes: vec![],
        helicity_observable: None,
        interpretation: Interpretation::Literal,
    }
    .validated()
}

/// One built-in scenario by name, under the given interpretation.
pub fn builtin(name: &str, interpretation: Interpretation) -> Option<Scenario> {
    let scenario = match name {
        "helicity-sign" => helicity_sign_scenario(),
        "helicity-preserving" => helicity_preserving_scenario(),
        "helicity-reversing" => helicity_reversing_scenario(),
        "cheshire-cat" => cheshire_cat_scenario(),
        _ => return None,
    };
    Some(scenario.expect("built-in scenarios are valid").with_interpretation(interpretation))
}

/// Every built-in scenario under both interpretations.
pub fn builtin_scenarios() -> Vec<Scenario> {
    BUILTIN_NAMES.iter().flat_map(|name| Interpretation::ALL.iter().filter_map(move |&i| builtin(name, i))).collect()
}
