use std::collections::{HashMap, HashSet};
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use weakcat_core::optics::{component_operator, Circuit, Component, SpinPair};
use weakcat_core::scenarios::{Claim, Interpretation, Scenario};
use weakcat_core::{basis_ket, Complex64, CompositeBasis, Error, LinearOperator, StateVector};

use super::ast::*;
use super::exact::{Coef, CoefError};

/// A lowered scenario and the warnings produced on the way.
#[derive(Debug, Clone)]
pub struct Lowered {
    pub scenario: Scenario,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(Coef),
    State(StateVector),
    Op(LinearOperator),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "a number",
            Value::State(_) => "a state",
            Value::Op(_) => "an operator",
        }
    }
}

/// `Silent` marks a reference to a definition that already failed; the
/// original error has been reported.
enum EvalError {
    Diag(Diagnostic),
    Silent,
}

impl From<Diagnostic> for EvalError {
    fn from(d: Diagnostic) -> Self {
        EvalError::Diag(d)
    }
}

type Eval<T> = Result<T, EvalError>;

fn core_err(span: Span, e: Error) -> EvalError {
    EvalError::Diag(Diagnostic::error(span, e.to_string()))
}

struct Lowering {
    basis_decls: Vec<(Label, Vec<Label>)>,
    basis: Option<Arc<CompositeBasis>>,
    basis_failed: bool,
    env: HashMap<String, Value>,
    failed: HashSet<String>,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

impl Lowering {
    fn report(&mut self, e: EvalError) {
        if let EvalError::Diag(d) = e {
            self.errors.push(d);
        }
    }

    /// The basis, built from the declarations seen so far.
    fn basis(&mut self, span: Span) -> Eval<Arc<CompositeBasis>> {
        if let Some(b) = &self.basis {
            return Ok(b.clone());
        }
        if self.basis_failed {
            return Err(EvalError::Silent);
        }
        if self.basis_decls.is_empty() {
            return Err(Diagnostic::error(span, "basis not declared").into());
        }
        let decls = self
            .basis_decls
            .iter()
            .map(|(n, ls)| (n.text.clone(), ls.iter().map(|l| l.text.clone()).collect::<Vec<_>>()));
        match CompositeBasis::new(decls) {
            Ok(b) => {
                let b = Arc::new(b);
                self.basis = Some(b.clone());
                Ok(b)
            }
            Err(e) => {
                self.basis_failed = true;
                Err(core_err(self.basis_decls[0].0.span, e))
            }
        }
    }

    fn scalar(&mut self, e: &Expr) -> Eval<Coef> {
        match self.eval(e)? {
            Value::Scalar(c) => Ok(c),
            other => Err(Diagnostic::error(e.span, format!("expected a number, found {}", other.kind())).into()),
        }
    }

    fn real(&mut self, e: &Expr) -> Eval<f64> {
        let z = self.scalar(e)?.to_complex();
        if z.im.abs() > 1e-12 || !z.re.is_finite() {
            return Err(Diagnostic::error(e.span, format!("expected a real number, found {z}")).into());
        }
        Ok(z.re)
    }

    fn level(&self, basis: &CompositeBasis, k: usize, label: &Label) -> Eval<usize> {
        basis.level_index(k, &label.text).map_err(|_| {
            let sub = basis.subsystems()[k].name();
            Diagnostic::error(label.span, format!("unknown level `{}` in subsystem `{sub}`", label.text)).into()
        })
    }

    /// Looks up a level by name in any subsystem, then with an `s_` prefix.
    fn find_level(&self, basis: &CompositeBasis, label: &Label) -> Eval<(usize, usize)> {
        basis
            .find_level(&label.text, false)
            .or_else(|e| basis.find_level(&format!("s_{}", label.text), false).map_err(|_| e))
            .map_err(|e| match e {
                Error::UnknownLevel { .. } => {
                    Diagnostic::error(label.span, format!("unknown level `{}`", label.text)).into()
                }
                other => core_err(label.span, other),
            })
    }

    fn eval(&mut self, e: &Expr) -> Eval<Value> {
        let span = e.span;
        let scalar = |c| Ok(Value::Scalar(c));
        match &e.kind {
            ExprKind::Num(Number::Int(n)) => scalar(Coef::integer(*n)),
            ExprKind::Num(Number::Real(x)) => scalar(Coef::real(*x)),
            ExprKind::Imag => scalar(Coef::imaginary_unit()),
            ExprKind::Pi => scalar(Coef::real(PI)),
            ExprKind::Identity => Ok(Value::Op(LinearOperator::identity(self.basis(span)?))),
            ExprKind::Var(name) => match self.env.get(name) {
                Some(v) => Ok(v.clone()),
                None if self.failed.contains(name) => Err(EvalError::Silent),
                None => Err(Diagnostic::error(span, format!("unknown name `{name}`")).into()),
            },
            ExprKind::Call(f, arg) => {
                let c = self.scalar(arg)?;
                let z = c.to_complex();
                let out = match f {
                    Func::Sqrt => c.sqrt(),
                    Func::Exp => Coef::Approx(z.exp()),
                    Func::Cos => Coef::Approx(z.cos()),
                    Func::Sin => Coef::Approx(z.sin()),
                    Func::Conj => Coef::Approx(z.conj()),
                };
                let w = out.to_complex();
                if !(w.re.is_finite() && w.im.is_finite()) {
                    return Err(Diagnostic::error(span, format!("{}() overflows", f.name())).into());
                }
                scalar(out)
            }
            ExprKind::Ket(labels) => {
                let basis = self.basis(span)?;
                let n = basis.subsystems().len();
                if labels.len() != n {
                    return Err(Diagnostic::error(
                        span,
                        format!("dimension mismatch: ket has {} labels, basis has {n} subsystems", labels.len()),
                    )
                    .into());
                }
                for (k, l) in labels.iter().enumerate() {
                    self.level(&basis, k, l)?;
                }
                let texts: Vec<&str> = labels.iter().map(|l| l.text.as_str()).collect();
                basis_ket(&basis, &texts).map(Value::State).map_err(|e| core_err(span, e))
            }
            ExprKind::Proj(pairs) => {
                let basis = self.basis(span)?;
                let mut op = LinearOperator::identity(basis.clone());
                for (sub, level) in pairs {
                    let k = basis
                        .subsystem_index(&sub.text)
                        .map_err(|_| Diagnostic::error(sub.span, format!("unknown subsystem `{}`", sub.text)))?;
                    self.level(&basis, k, level)?;
                    let p = LinearOperator::level_projector(basis.clone(), &sub.text, &level.text)
                        .map_err(|e| core_err(level.span, e))?;
                    op = op.compose(&p).map_err(|e| core_err(span, e))?;
                }
                Ok(Value::Op(op))
            }
            ExprKind::Sigma(label) => {
                let basis = self.basis(span)?;
                let (k, idx) = self.find_level(&basis, label)?;
                let sub = &basis.subsystems()[k];
                LinearOperator::level_projector(basis.clone(), sub.name(), &sub.levels()[idx])
                    .map(Value::Op)
                    .map_err(|e| core_err(span, e))
            }
            ExprKind::Pauli(axis, a, b) => {
                let basis = self.basis(span)?;
                let (ka, ia) = self.find_level(&basis, a)?;
                let (kb, ib) = self.find_level(&basis, b)?;
                if ka != kb || ia == ib {
                    return Err(Diagnostic::error(span, "pauli() needs two distinct levels of one subsystem").into());
                }
                let n = basis.subsystems()[ka].len();
                let mut local = vec![Complex64::new(0.0, 0.0); n * n];
                let m = axis.pauli();
                local[ia * n + ia] = m[0];
                local[ia * n + ib] = m[1];
                local[ib * n + ia] = m[2];
                local[ib * n + ib] = m[3];
                LinearOperator::embed(basis, ka, &local).map(Value::Op).map_err(|e| core_err(span, e))
            }
            ExprKind::Neg(inner) => Ok(match self.eval(inner)? {
                Value::Scalar(c) => Value::Scalar(c.neg()),
                Value::State(s) => Value::State(s.scaled(Complex64::new(-1.0, 0.0))),
                Value::Op(o) => Value::Op(o.scaled(Complex64::new(-1.0, 0.0))),
            }),
            ExprKind::Binary(op, l, r) => {
                let lv = self.eval(l)?;
                let rv = self.eval(r)?;
                self.binary(*op, lv, rv, span)
            }
        }
    }

    fn binary(&mut self, op: BinOp, l: Value, r: Value, span: Span) -> Eval<Value> {
        use Value::*;
        let one = Complex64::new(1.0, 0.0);
        let mismatch = |l: &Value, r: &Value| -> EvalError {
            Diagnostic::error(span, format!("cannot apply `{}` to {} and {}", op.symbol(), l.kind(), r.kind())).into()
        };
        let core = |e: Error| core_err(span, e);
        Ok(match (op, l, r) {
            (BinOp::Add, Scalar(a), Scalar(b)) => Scalar(a.add(b)),
            (BinOp::Sub, Scalar(a), Scalar(b)) => Scalar(a.sub(b)),
            (BinOp::Add, State(a), State(b)) => State(a.plus(&b).map_err(core)?),
            (BinOp::Sub, State(a), State(b)) => State(a.plus(&b.scaled(-one)).map_err(core)?),
            (BinOp::Add, Op(a), Op(b)) => Op(a.combine(one, &b, one).map_err(core)?),
            (BinOp::Sub, Op(a), Op(b)) => Op(a.combine(one, &b, -one).map_err(core)?),
            (BinOp::Mul, Scalar(a), Scalar(b)) => Scalar(a.mul(b)),
            (BinOp::Mul, Scalar(c), State(s)) | (BinOp::Mul, State(s), Scalar(c)) => State(s.scaled(c.to_complex())),
            (BinOp::Mul, Scalar(c), Op(o)) | (BinOp::Mul, Op(o), Scalar(c)) => Op(o.scaled(c.to_complex())),
            (BinOp::Mul, Op(a), Op(b)) => Op(a.compose(&b).map_err(core)?),
            (BinOp::Mul, Op(a), State(s)) => State(weakcat_core::apply(&a, &s).map_err(core)?),
            (BinOp::Div, x, Scalar(c)) => {
                if c.is_zero() {
                    return Err(Diagnostic::error(span, "division by zero").into());
                }
                match x {
                    Scalar(a) => match a.div(c) {
                        Ok(q) => Scalar(q),
                        Err(CoefError::DivisionByZero) => {
                            return Err(Diagnostic::error(span, "division by zero").into())
                        }
                    },
                    State(s) => State(s.scaled(one / c.to_complex())),
                    Op(o) => Op(o.scaled(one / c.to_complex())),
                }
            }
            (_, l, r) => return Err(mismatch(&l, &r)),
        })
    }

    fn component(&mut self, el: &CircuitElement) -> Eval<Component> {
        let spins = |p: &Option<(Label, Label)>| match p {
            Some((u, d)) => SpinPair { up: u.text.clone(), down: d.text.clone() },
            None => SpinPair::default(),
        };
        Ok(match &el.element {
            Element::BeamSplitter { a, b, theta } => Component::BeamSplitter {
                path_a: a.text.clone(),
                path_b: b.text.clone(),
                theta: match theta {
                    Some(t) => self.real(t)?,
                    None => FRAC_PI_4,
                },
            },
            Element::Phase { path, phi } => Component::PhaseShifter { path: path.text.clone(), phi: self.real(phi)? },
            Element::SpinTurner { path, axis, angle, spins: s } => Component::SpinTurner {
                path: path.text.clone(),
                axis: *axis,
                angle: self.real(angle)?,
                spins: spins(s),
            },
            Element::BField { input, up, down, spins: s } => Component::MagneticField {
                input: input.text.clone(),
                up_out: up.text.clone(),
                down_out: down.text.clone(),
                spins: spins(s),
            },
            Element::Analyzer { path, level } => {
                Component::Analyzer { path: path.text.clone(), level: level.text.clone() }
            }
            Element::Detector { name, path } => {
                Component::Detector { name: name.text.clone(), path: path.text.clone() }
            }
        })
    }

    fn define(&mut self, name: &Label, value: Eval<Value>) -> Option<Value> {
        if is_reserved(&name.text) {
            self.errors.push(Diagnostic::error(name.span, format!("`{}` is a reserved word", name.text)));
            return None;
        }
        if self.env.contains_key(&name.text) || self.failed.contains(&name.text) {
            self.errors.push(Diagnostic::error(name.span, format!("`{}` is already defined", name.text)));
            return None;
        }
        match value {
            Ok(v) => {
                self.env.insert(name.text.clone(), v.clone());
                Some(v)
            }
            Err(e) => {
                self.failed.insert(name.text.clone());
                self.report(e);
                None
            }
        }
    }
}

/// Lowers a parsed document to a validated scenario. `default_name` is used
/// when the document has no `scenario` line.
pub fn lower(doc: &ScenarioDoc, default_name: &str) -> Result<Lowered, Vec<Diagnostic>> {
    let mut lw = Lowering {
        basis_decls: Vec::new(),
        basis: None,
        basis_failed: false,
        env: HashMap::new(),
        failed: HashSet::new(),
        errors: Vec::new(),
        warnings: Vec::new(),
    };
    let mut name = default_name.to_string();
    let mut summary = String::new();
    let mut named = false;
    let mut pre: Option<StateVector> = None;
    let mut post: Option<StateVector> = None;
    let mut probes = Vec::new();
    let mut observables: Vec<(String, LinearOperator)> = Vec::new();
    let mut elements: Vec<(Component, Span)> = Vec::new();
    let mut circuit_span = None;
    let mut claims: Vec<(Label, Complex64, String)> = Vec::new();
    let mut interpretation: Option<Interpretation> = None;
    let mut helicity: Option<Label> = None;

    for stmt in &doc.statements {
        let span = stmt.span;
        match &stmt.statement {
            Statement::Scenario { name: n, summary: s } => {
                if named {
                    lw.warnings.push(Diagnostic::warning(span, "scenario name given twice; the last one wins"));
                }
                named = true;
                name = n.text.clone();
                summary = s.clone().unwrap_or_default();
            }
            Statement::Basis { name: n, levels } => {
                if lw.basis.is_some() || lw.basis_failed {
                    lw.errors.push(Diagnostic::error(span, "basis must be declared before it is used"));
                } else {
                    lw.basis_decls.push((n.clone(), levels.clone()));
                }
            }
            Statement::State { name: n, expr } | Statement::Probe { name: n, expr } => {
                let value = lw.eval(expr).and_then(|v| match v {
                    Value::State(s) => Ok(Value::State(s)),
                    other => {
                        Err(Diagnostic::error(expr.span, format!("expected a state, found {}", other.kind())).into())
                    }
                });
                let Some(Value::State(s)) = lw.define(n, value) else { continue };
                match &stmt.statement {
                    Statement::Probe { .. } => probes.push((n.text.clone(), s)),
                    _ if n.text == "pre" => pre = Some(s),
                    _ if n.text == "post" => post = Some(s),
                    _ => {}
                }
            }
            Statement::Observe { name: n, expr } => {
                let value = lw.eval(expr).and_then(|v| match v {
                    Value::Op(o) => Ok(Value::Op(o)),
                    other => {
                        Err(Diagnostic::error(expr.span, format!("expected an operator, found {}", other.kind()))
                            .into())
                    }
                });
                if let Some(Value::Op(o)) = lw.define(n, value) {
                    if !o.is_hermitian(1e-10) {
                        lw.warnings
                            .push(Diagnostic::warning(n.span, format!("observable `{}` is not Hermitian", n.text)));
                    }
                    observables.push((n.text.clone(), o));
                }
            }
            Statement::Circuit(els) => {
                circuit_span.get_or_insert(span);
                let basis = match lw.basis(span) {
                    Ok(b) => b,
                    Err(e) => {
                        lw.report(e);
                        continue;
                    }
                };
                for el in els {
                    match lw.component(el) {
                        Ok(c) => match component_operator(&c, &basis) {
                            Ok(_) => elements.push((c, el.span)),
                            Err(e) => {
                                lw.errors.push(Diagnostic::error(el.span, format!("{}: {e}", el.element.keyword())))
                            }
                        },
                        Err(e) => lw.report(e),
                    }
                }
            }
            Statement::Claim { observable, value, reference } => match lw.scalar(value) {
                Ok(c) => claims.push((observable.clone(), c.to_complex(), reference.clone().unwrap_or_default())),
                Err(e) => lw.report(e),
            },
            Statement::Interpretation(i) => {
                if interpretation.is_some() {
                    lw.warnings.push(Diagnostic::warning(span, "interpretation given twice; the last one wins"));
                }
                interpretation = Some(*i);
            }
            Statement::Helicity(obs) => helicity = Some(obs.clone()),
        }
    }

    for (obs, _, _) in &claims {
        if !observables.iter().any(|(n, _)| *n == obs.text) {
            lw.errors.push(Diagnostic::error(obs.span, format!("claim names unknown observable `{}`", obs.text)));
        }
    }
    if let Some(obs) = &helicity {
        if !observables.iter().any(|(n, _)| *n == obs.text) {
            lw.errors.push(Diagnostic::error(obs.span, format!("helicity names unknown observable `{}`", obs.text)));
        }
    }
    let start = Span::new(1, 1);
    for (label, state) in [("pre", &pre), ("post", &post)] {
        if state.is_none() && !lw.failed.contains(label) {
            lw.errors.push(Diagnostic::error(start, format!("missing `state {label}`")));
        }
    }
    let basis = match lw.basis(start) {
        Ok(b) => Some(b),
        Err(e) => {
            // Already reported when a statement needed the basis.
            if lw.errors.is_empty() {
                lw.report(e);
            }
            None
        }
    };
    let evolution = match (&basis, circuit_span) {
        (Some(b), Some(span)) if lw.errors.is_empty() => {
            match Circuit::new(b.clone(), elements.iter().map(|(c, _)| c.clone()).collect()) {
                Ok(c) if !c.is_unitary_only() => {
                    lw.errors
                        .push(Diagnostic::error(span, "the evolution circuit may not contain analyzers or detectors"));
                    None
                }
                Ok(c) => Some(c),
                Err(e) => {
                    lw.errors.push(Diagnostic::error(span, e.to_string()));
                    None
                }
            }
        }
        _ => None,
    };
    if !lw.errors.is_empty() {
        return Err(lw.errors);
    }
    let (Some(basis), Some(pre), Some(post)) = (basis, pre, post) else {
        return Err(vec![Diagnostic::error(start, "incomplete scenario")]);
    };
    let scenario = Scenario {
        name,
        summary,
        basis,
        pre,
        post,
        evolution,
        observables,
        claims: claims
            .into_iter()
            .map(|(obs, value, reference)| Claim { observable: obs.text, value, reference })
            .collect(),
        probes,
        helicity_observable: helicity.map(|l| l.text),
        interpretation: interpretation.unwrap_or(Interpretation::Literal),
    };
    match scenario.validated() {
        Ok(scenario) => Ok(Lowered { scenario, warnings: lw.warnings }),
        Err(e) => Err(vec![Diagnostic::error(start, e.to_string())]),
    }
}
