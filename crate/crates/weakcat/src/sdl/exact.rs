//! Coefficient arithmetic that stays exact for `rational · √integer`
//! components and falls back to `f64` otherwise.

use weakcat_core::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    const ZERO: Rational = Rational { num: 0, den: 1 };

    fn new(num: i128, den: i128) -> Option<Rational> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Some(Rational { num: sign * num / g, den: sign * den / g })
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn add(self, o: Rational) -> Option<Rational> {
        let num = self.num.checked_mul(o.den)?.checked_add(o.num.checked_mul(self.den)?)?;
        Rational::new(num, self.den.checked_mul(o.den)?)
    }

    fn mul(self, o: Rational) -> Option<Rational> {
        Rational::new(self.num.checked_mul(o.num)?, self.den.checked_mul(o.den)?)
    }

    fn recip(self) -> Option<Rational> {
        Rational::new(self.den, self.num)
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `q·√n` with `n` square-free; zero is `0·√1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surd {
    q: Rational,
    n: u64,
}

/// Splits `n` into `s²·m` with `m` square-free. Gives up on large inputs.
fn square_free(n: u64) -> Option<(u64, u64)> {
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut m = n;
    let mut s = 1u64;
    let mut f = 2u64;
    while f * f <= m {
        while m.is_multiple_of(f * f) {
            m /= f * f;
            s *= f;
        }
        f += 1;
    }
    Some((s, m))
}

impl Surd {
    const ZERO: Surd = Surd { q: Rational::ZERO, n: 1 };

    fn rational(q: Rational) -> Surd {
        Surd { q, n: 1 }
    }

    fn is_zero(self) -> bool {
        self.q.is_zero()
    }

    fn normalized(q: Rational, n: u64) -> Option<Surd> {
        if q.is_zero() || n == 0 {
            return Some(Surd::ZERO);
        }
        let (s, m) = square_free(n)?;
        Some(Surd { q: q.mul(Rational::new(s as i128, 1)?)?, n: m })
    }

    fn add(self, o: Surd) -> Option<Surd> {
        if self.is_zero() {
            return Some(o);
        }
        if o.is_zero() {
            return Some(self);
        }
        if self.n != o.n {
            return None;
        }
        Surd::normalized(self.q.add(o.q)?, self.n)
    }

    fn neg(self) -> Surd {
        Surd { q: Rational { num: -self.q.num, den: self.q.den }, n: self.n }
    }

    fn mul(self, o: Surd) -> Option<Surd> {
        Surd::normalized(self.q.mul(o.q)?, self.n.checked_mul(o.n)?)
    }

    /// `self / o` for nonzero `o`: `(q₁/(q₂ n₂)) √(n₁ n₂)`.
    fn div(self, o: Surd) -> Option<Surd> {
        let scale = o.q.mul(Rational::new(o.n as i128, 1)?)?.recip()?;
        Surd::normalized(self.q.mul(scale)?, self.n.checked_mul(o.n)?)
    }

    fn square(self) -> Option<Rational> {
        self.q.mul(self.q)?.mul(Rational::new(self.n as i128, 1)?)
    }

    fn to_f64(self) -> f64 {
        if self.n == 1 {
            self.q.to_f64()
        } else {
            self.q.num as f64 * (self.n as f64).sqrt() / self.q.den as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coef {
    Exact { re: Surd, im: Surd },
    Approx(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefError {
    DivisionByZero,
}

impl Coef {
    pub fn integer(n: u64) -> Coef {
        match Rational::new(i128::from(n), 1) {
            Some(q) => Coef::Exact { re: Surd::rational(q), im: Surd::ZERO },
            None => Coef::Approx(Complex64::new(n as f64, 0.0)),
        }
    }

    pub fn real(x: f64) -> Coef {
        Coef::Approx(Complex64::new(x, 0.0))
    }

    pub fn imaginary_unit() -> Coef {
        Coef::Exact { re: Surd::ZERO, im: Surd::rational(Rational { num: 1, den: 1 }) }
    }

    #[cfg(test)]
    pub fn is_exact(&self) -> bool {
        matches!(self, Coef::Exact { .. })
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Coef::Exact { re, im } => Complex64::new(re.to_f64(), im.to_f64()),
            Coef::Approx(z) => z,
        }
    }

    fn exact_or(
        self,
        other: Coef,
        exact: impl FnOnce(Surd, Surd, Surd, Surd) -> Option<(Surd, Surd)>,
        approx: impl FnOnce(Complex64, Complex64) -> Complex64,
    ) -> Coef {
        if let (Coef::Exact { re: a, im: b }, Coef::Exact { re: c, im: d }) = (self, other) {
            if let Some((re, im)) = exact(a, b, c, d) {
                return Coef::Exact { re, im };
            }
        }
        Coef::Approx(approx(self.to_complex(), other.to_complex()))
    }

    pub fn add(self, o: Coef) -> Coef {
        self.exact_or(o, |a, b, c, d| Some((a.add(c)?, b.add(d)?)), |x, y| x + y)
    }

    pub fn sub(self, o: Coef) -> Coef {
        self.add(o.neg())
    }

    pub fn neg(self) -> Coef {
        match self {
            Coef::Exact { re, im } => Coef::Exact { re: re.neg(), im: im.neg() },
            Coef::Approx(z) => Coef::Approx(-z),
        }
    }

    pub fn mul(self, o: Coef) -> Coef {
        self.exact_or(
            o,
            |a, b, c, d| {
                let re = a.mul(c)?.add(b.mul(d)?.neg())?;
                let im = a.mul(d)?.add(b.mul(c)?)?;
                Some((re, im))
            },
            |x, y| x * y,
        )
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Exact { re, im } => re.is_zero() && im.is_zero(),
            Coef::Approx(z) => *z == Complex64::new(0.0, 0.0),
        }
    }

    pub fn div(self, o: Coef) -> Result<Coef, CoefError> {
        if o.is_zero() {
            return Err(CoefError::DivisionByZero);
        }
        Ok(self.exact_or(
            o,
            |a, b, c, d| {
                if d.is_zero() {
                    Some((a.div(c)?, b.div(c)?))
                } else if c.is_zero() {
                    // (a + ib) / (id) = b/d - i a/d
                    Some((b.div(d)?, a.div(d)?.neg()))
                } else {
                    let norm = Surd::rational(c.square()?.add(d.square()?)?);
                    let re = a.mul(c)?.add(b.mul(d)?)?;
                    let im = b.mul(c)?.add(a.mul(d)?.neg())?;
                    Some((re.div(norm)?, im.div(norm)?))
                }
            },
            |x, y| x / y,
        ))
    }

    /// Principal square root; exact for rationals.
    pub fn sqrt(self) -> Coef {
        if let Coef::Exact { re, im } = self {
            if im.is_zero() && re.n == 1 {
                let q = re.q;
                let root = |num: i128| -> Option<Surd> {
                    // √(p/d) = √(p·d) / d
                    let radicand = u64::try_from(num.checked_mul(q.den)?).ok()?;
                    Surd::normalized(Rational::new(1, q.den)?, radicand)
                };
                if q.num >= 0 {
                    if let Some(s) = root(q.num) {
                        return Coef::Exact { re: s, im: Surd::ZERO };
                    }
                } else if let Some(s) = root(-q.num) {
                    return Coef::Exact { re: Surd::ZERO, im: s };
                }
            }
        }
        Coef::Approx(self.to_complex().sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_root_two_is_exact() {
        let h = Coef::integer(1).div(Coef::integer(2).sqrt()).unwrap();
        assert!(h.is_exact());
        assert_eq!(h.mul(h), Coef::Exact { re: Surd::rational(Rational::new(1, 2).unwrap()), im: Surd::ZERO });
        assert_eq!(h.mul(Coef::integer(2).sqrt()), Coef::integer(1));
        assert_eq!(h.to_complex().re, std::f64::consts::SQRT_2 / 2.0);
    }

    #[test]
    fn complex_division() {
        let i = Coef::imaginary_unit();
        let one_plus_i = Coef::integer(1).add(i);
        let q = Coef::integer(1).div(one_plus_i).unwrap();
        let half = Coef::integer(1).div(Coef::integer(2)).unwrap();
        assert_eq!(q, half.sub(half.mul(i)));
        assert_eq!(Coef::integer(1).div(Coef::integer(0)), Err(CoefError::DivisionByZero));
    }

    #[test]
    fn incompatible_radicals_fall_back() {
        let s = Coef::integer(2).sqrt().add(Coef::integer(3).sqrt());
        assert!(!s.is_exact());
        assert!((s.to_complex().re - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        assert!(Coef::integer(8).sqrt().is_exact());
        assert_eq!(Coef::integer(8).sqrt(), Coef::integer(2).mul(Coef::integer(2).sqrt()));
        let neg = Coef::integer(0).sub(Coef::integer(4)).sqrt();
        assert_eq!(neg, Coef::integer(2).mul(Coef::imaginary_unit()));
    }
}
