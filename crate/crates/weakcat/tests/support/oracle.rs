//! Term-expansion oracle. A state is a list of `(coefficient, labels)` terms
//! and every operator is a rule that maps one labeled basis term to a list of
//! terms. Weak values come from explicit term-by-term inner products; no
//! engine vector, matrix or circuit code is involved.

use std::f64::consts::{FRAC_PI_2, PI};

use weakcat_core::Complex64;

pub type Labels = [&'static str; 2];
pub type Ket = Vec<(Complex64, Labels)>;
pub type Rule = Box<dyn Fn(Labels) -> Ket>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity() -> Rule {
    Box::new(|l| vec![(c(1.0, 0.0), l)])
}

pub fn apply(rule: &Rule, ket: &Ket) -> Ket {
    let mut out = Ket::new();
    for (amp, labels) in ket {
        for (a, l) in rule(*labels) {
            out.push((amp * a, l));
        }
    }
    out
}

fn then(first: Rule, second: Rule) -> Rule {
    Box::new(move |l| {
        let mid = first(l);
        apply(&second, &mid)
    })
}

/// `Σ conj(a_j) b_k` over pairs of terms with equal labels.
pub fn inner(bra: &Ket, ket: &Ket) -> Complex64 {
    let mut total = c(0.0, 0.0);
    for (a, la) in bra {
        for (b, lb) in ket {
            if la == lb {
                total += a.conj() * b;
            }
        }
    }
    total
}

fn on_path(path: &'static str) -> Rule {
    Box::new(move |l| if l[0] == path { vec![(c(1.0, 0.0), l)] } else { vec![] })
}

fn on_path_level(path: &'static str, level: &'static str) -> Rule {
    Box::new(move |l| if l[0] == path && l[1] == level { vec![(c(1.0, 0.0), l)] } else { vec![] })
}

/// Splitter on paths a, b: |a⟩ → cos θ|a⟩ + i sin θ|b⟩, |b⟩ → i sin θ|a⟩ + cos θ|b⟩.
fn splitter(a: &'static str, b: &'static str, theta: f64) -> Rule {
    Box::new(move |l| {
        let (cs, sn) = (c(theta.cos(), 0.0), c(0.0, theta.sin()));
        if l[0] == a {
            vec![(cs, l), (sn, [b, l[1]])]
        } else if l[0] == b {
            vec![(sn, [a, l[1]]), (cs, l)]
        } else {
            vec![(c(1.0, 0.0), l)]
        }
    })
}

fn phase(path: &'static str, phi: f64) -> Rule {
    Box::new(move |l| vec![(if l[0] == path { Complex64::from_polar(1.0, phi) } else { c(1.0, 0.0) }, l)])
}

/// cos(θ/2) − i sin(θ/2) σ_x on the spin pair of one path.
fn turn_x(path: &'static str, angle: f64) -> Rule {
    Box::new(move |l| {
        let (cs, sn) = (c((angle / 2.0).cos(), 0.0), c(0.0, -(angle / 2.0).sin()));
        match (l[0] == path, l[1]) {
            (true, "s_up") => vec![(cs, l), (sn, [path, "s_dn"])],
            (true, "s_dn") => vec![(sn, [path, "s_up"]), (cs, l)],
            _ => vec![(c(1.0, 0.0), l)],
        }
    })
}

/// Stern-Gerlach routing: spin up on `input` swaps with `up`, spin down with `down`.
fn field(input: &'static str, up: &'static str, down: &'static str) -> Rule {
    Box::new(move |l| {
        let to = match (l[0], l[1]) {
            (p, "s_up") if p == input => [up, "s_up"],
            (p, "s_up") if p == up => [input, "s_up"],
            (p, "s_dn") if p == input => [down, "s_dn"],
            (p, "s_dn") if p == down => [input, "s_dn"],
            _ => l,
        };
        vec![(c(1.0, 0.0), to)]
    })
}

/// σ_y on polarization: |H⟩ → i|V⟩, |V⟩ → −i|H⟩, restricted to one path.
fn sigma_y_on(path: &'static str) -> Rule {
    Box::new(move |l| match (l[0] == path, l[1]) {
        (true, "H") => vec![(c(0.0, 1.0), [path, "V"])],
        (true, "V") => vec![(c(0.0, -1.0), [path, "H"])],
        _ => vec![],
    })
}

pub struct OracleScenario {
    pub name: &'static str,
    pub pre: Ket,
    pub post: Ket,
    pub evolution: Rule,
    pub observables: Vec<(&'static str, Rule)>,
}

impl OracleScenario {
    /// `⟨post|A U|pre⟩ / ⟨post|U|pre⟩`; `None` when the ensemble is orthogonal.
    pub fn weak_value(&self, observable: &str, evolved: bool) -> Option<Complex64> {
        let rule = &self.observables.iter().find(|(n, _)| *n == observable)?.1;
        let state = if evolved { apply(&self.evolution, &self.pre) } else { self.pre.clone() };
        let scale = (inner(&self.pre, &self.pre).re * inner(&self.post, &self.post).re).sqrt();
        let den = inner(&self.post, &state);
        if den.norm() < 1e-12 * scale {
            return None;
        }
        Some(inner(&self.post, &apply(rule, &state)) / den)
    }
}

pub fn scenarios() -> Vec<OracleScenario> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let one = c(1.0, 0.0);
    vec![
        OracleScenario {
            name: "helicity-sign",
            pre: vec![(c(h, 0.0), ["1", "L_p"]), (c(0.5, 0.0), ["2", "s_up"]), (c(0.5, 0.0), ["2", "s_dn"])],
            post: vec![(c(h, 0.0), ["1", "L_p"]), (c(h, 0.0), ["3", "s_up"])],
            evolution: field("2", "3", "4"),
            observables: vec![("P1", on_path("1")), ("P2", on_path("2")), ("P3", on_path("3"))],
        },
        OracleScenario {
            name: "helicity-preserving",
            pre: vec![(one, ["5", "L_-p"]), (one, ["3", "s_up"])],
            post: vec![(one, ["5", "L_-p"]), (one, ["4", "s_dn"])],
            evolution: then(splitter("3", "4", FRAC_PI_2), turn_x("4", PI)),
            observables: vec![("P4", on_path("4")), ("S4dn", on_path_level("4", "s_dn"))],
        },
        OracleScenario {
            name: "helicity-reversing",
            pre: vec![(one, ["5", "L_p"]), (one, ["3", "s_up"])],
            post: vec![(one, ["5", "L_-p"]), (one, ["4", "s_up"])],
            evolution: then(splitter("3", "4", FRAC_PI_2), phase("4", -FRAC_PI_2)),
            observables: vec![("P4", on_path("4"))],
        },
        OracleScenario {
            name: "cheshire-cat",
            pre: vec![(c(0.0, 1.0), ["L", "H"]), (one, ["R", "H"])],
            post: vec![(one, ["L", "H"]), (one, ["R", "V"])],
            evolution: identity(),
            observables: vec![
                ("PL", on_path("L")),
                ("PR", on_path("R")),
                ("SzL", sigma_y_on("L")),
                ("SzR", sigma_y_on("R")),
            ],
        },
    ]
}
