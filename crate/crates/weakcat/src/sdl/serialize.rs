use std::fmt::Write;

use super::ast::*;

/// Prints a real with 17 significant digits, always with a `.` or exponent
/// so it reads back as a real.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (16 - exp) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new leading digit (9.99… → 10.0…).
        if s.contains('.') {
            return s;
        }
        format!("{s}.0")
    } else {
        format!("{x:.16e}")
    }
}

fn number(n: Number) -> String {
    match n {
        Number::Int(v) => v.to_string(),
        Number::Real(x) => format_real(x),
    }
}

fn labels(ls: &[Label]) -> String {
    ls.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join(",")
}

fn quote(s: &str) -> String {
    let mut out = String::from('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, _, _) => op.precedence(),
        ExprKind::Neg(_) => 3,
        _ => 4,
    }
}

/// Writes `e`, parenthesized when it binds looser than `min`.
fn expr_into(out: &mut String, e: &Expr, min: u8) {
    let paren = precedence(e) < min;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Num(n) => out.push_str(&number(*n)),
        ExprKind::Imag => out.push('i'),
        ExprKind::Pi => out.push_str("pi"),
        ExprKind::Identity => out.push_str("id"),
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Call(f, arg) => {
            out.push_str(f.name());
            out.push('(');
            expr_into(out, arg, 0);
            out.push(')');
        }
        ExprKind::Ket(ls) => {
            let _ = write!(out, "|{}>", labels(ls));
        }
        ExprKind::Proj(pairs) => {
            let inner: Vec<String> = pairs.iter().map(|(s, l)| format!("{}={}", s.text, l.text)).collect();
            let _ = write!(out, "proj({})", inner.join(", "));
        }
        ExprKind::Sigma(l) => {
            let _ = write!(out, "sigma({})", l.text);
        }
        ExprKind::Pauli(axis, a, b) => {
            let _ = write!(out, "pauli({}, {}, {})", axis.name(), a.text, b.text);
        }
        ExprKind::Neg(inner) => {
            out.push('-');
            expr_into(out, inner, 3);
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            expr_into(out, l, p);
            if *op == BinOp::Mul && matches!(r.kind, ExprKind::Ket(_)) {
                out.push(' ');
            } else {
                let _ = write!(out, " {} ", op.symbol());
            }
            expr_into(out, r, p + 1);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn serialize_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr_into(&mut out, e, 0);
    out
}

fn element(e: &Element) -> String {
    let pair = |p: &Option<(Label, Label)>| match p {
        Some((a, b)) => format!(", {}, {}", a.text, b.text),
        None => String::new(),
    };
    let args = match e {
        Element::BeamSplitter { a, b, theta } => match theta {
            Some(t) => format!("{}, {}, {}", a.text, b.text, serialize_expr(t)),
            None => format!("{}, {}", a.text, b.text),
        },
        Element::Phase { path, phi } => format!("{}, {}", path.text, serialize_expr(phi)),
        Element::SpinTurner { path, axis, angle, spins } => {
            format!("{}, {}, {}{}", path.text, axis.name(), serialize_expr(angle), pair(spins))
        }
        Element::BField { input, up, down, spins } => {
            format!("{} -> {}, {}{}", input.text, up.text, down.text, pair(spins))
        }
        Element::Analyzer { path, level } => format!("{}, {}", path.text, level.text),
        Element::Detector { name, path } => format!("{}, {}", name.text, path.text),
    };
    format!("{}({args})", e.keyword())
}

pub fn serialize_statement(s: &Statement) -> String {
    match s {
        Statement::Scenario { name, summary } => match summary {
            Some(text) => format!("scenario {} {}", name.text, quote(text)),
            None => format!("scenario {}", name.text),
        },
        Statement::Basis { name, levels } => {
            let ls: Vec<&str> = levels.iter().map(|l| l.text.as_str()).collect();
            format!("basis {} = {}", name.text, ls.join(" "))
        }
        Statement::State { name, expr } => format!("state {} = {}", name.text, serialize_expr(expr)),
        Statement::Probe { name, expr } => format!("probe {} = {}", name.text, serialize_expr(expr)),
        Statement::Observe { name, expr } => format!("observe {} = {}", name.text, serialize_expr(expr)),
        Statement::Circuit(elements) => {
            let parts: Vec<String> = elements.iter().map(|e| element(&e.element)).collect();
            format!("circuit = {}", parts.join("; "))
        }
        Statement::Claim { observable, value, reference } => {
            let mut line = format!("claim {} = {}", observable.text, serialize_expr(value));
            if let Some(r) = reference {
                line.push(' ');
                line.push_str(&quote(r));
            }
            line
        }
        Statement::Interpretation(i) => format!("interpretation = {}", i.name()),
        Statement::Helicity(obs) => format!("helicity = {}", obs.text),
    }
}

/// One statement per line; `parse(serialize(d)) == d`.
pub fn serialize(doc: &ScenarioDoc) -> String {
    let mut out = String::new();
    for stmt in &doc.statements {
        out.push_str(&serialize_statement(&stmt.statement));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdl::parser::parse_expr;

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(format_real(0.5), "0.50000000000000000");
        assert_eq!(format_real(1.0), "1.0000000000000000");
        assert_eq!(format_real(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(format_real(1e-9), "1.0000000000000001e-9");
        for x in [0.1, 2.0 / 3.0, 9.999_999_999_999_999, 1e300, 123456.789, 1e-5, 1e16] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x, "{x}");
        }
    }

    #[test]
    fn expressions_round_trip() {
        for src in [
            "(1/sqrt2)|1,L_p> + (1/2)|2,s_up>",
            "a - (b - c)",
            "a / (b * c)",
            "-(1 + 2) * -i",
            "2 - -3",
            "proj(path=4) * sigma(dn) + pauli(y, H, V)",
            "exp(i*pi/4) |L,H>",
            "(a + b) |x>",
            "1.5e-300 + 0.25",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = serialize_expr(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
