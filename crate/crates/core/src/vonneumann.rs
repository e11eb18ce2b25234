//! Von Neumann pointer model of a weak measurement.
//!
//! A Gaussian meter `ψ(x) ∝ exp(-x²/4σ²)` (ħ = 1, so `Var(x) = σ²` and
//! `Var(p) = 1/4σ²`) is coupled to the system through `exp(-i g A⊗p̂)`. For a
//! Hermitian `A = Σ λ P_λ` this splits the joint state into branches
//! `P_λ U|Ψ_i⟩ ⊗ ψ(x - gλ)`. Post-selecting `|Ψ_f⟩` leaves the meter in
//! `χ(x) = Σ_λ ⟨Ψ_f|P_λ U|Ψ_i⟩ ψ(x - gλ)`, whose mean position and momentum
//! shifts read out `g·Re(A_w)` and `2g·Var(p)·Im(A_w)` to first order in `g`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::fft;
use crate::qstate::{apply, inner, LinearOperator};
use crate::weakval::{weak_value, PrePostEnsemble, SpectralDecomposition};
use crate::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 256;

/// Default grid half-width in units of σ.
pub const DEFAULT_SPAN_SIGMAS: f64 = 16.0;

/// Meter wavefunction sampled on the periodic grid `x_k = -span + k·dx`,
/// `dx = 2·span / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerState {
    x0: f64,
    dx: f64,
    sigma: f64,
    amps: Vec<Complex64>,
}

/// Prepares a normalized Gaussian meter centred at the origin.
///
/// `span` is the grid half-width; the grid covers `[-span, span)`.
pub fn gaussian_pointer(sigma: f64, n: usize, span: f64) -> Result<PointerState> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidPointer(alloc::format!("sigma must be positive, got {sigma}")));
    }
    if !n.is_power_of_two() || !(64..=512).contains(&n) {
        return Err(Error::InvalidPointer(alloc::format!("grid size must be a power of two in [64, 512], got {n}")));
    }
    if !(span.is_finite() && span >= 8.0 * sigma) {
        return Err(Error::InvalidPointer(alloc::format!("span {span} must be at least 8σ = {}", 8.0 * sigma)));
    }
    let dx = 2.0 * span / n as f64;
    let x0 = -span;
    let mut amps: Vec<Complex64> = (0..n)
        .map(|k| {
            let x = x0 + k as f64 * dx;
            Complex64::new(libm::exp(-x * x / (4.0 * sigma * sigma)), 0.0)
        })
        .collect();
    let norm = libm::sqrt(amps.iter().map(Complex64::norm_sqr).sum::<f64>() * dx);
    for a in &mut amps {
        *a /= norm;
    }
    Ok(PointerState { x0, dx, sigma, amps })
}

impl PointerState {
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    /// Grid half-width.
    pub fn span(&self) -> f64 {
        self.dx * self.amps.len() as f64 / 2.0
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn position(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    /// Momentum of FFT bin `k` (ħ = 1).
    pub fn momentum(&self, k: usize) -> f64 {
        let n = self.amps.len();
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * PI * signed / (n as f64 * self.dx)
    }

    /// `Σ|ψ_k|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>() * self.dx
    }

    fn position_moments(&self) -> (f64, f64) {
        let total = self.norm_sqr();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (k, a) in self.amps.iter().enumerate() {
            let x = self.position(k);
            let w = a.norm_sqr() * self.dx;
            m1 += x * w;
            m2 += x * x * w;
        }
        (m1 / total, m2 / total)
    }

    fn momentum_moments(&self) -> (f64, f64) {
        let mut spectrum = self.amps.clone();
        fft(&mut spectrum, false);
        let total: f64 = spectrum.iter().map(Complex64::norm_sqr).sum();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (k, a) in spectrum.iter().enumerate() {
            let p = self.momentum(k);
            let w = a.norm_sqr();
            m1 += p * w;
            m2 += p * p * w;
        }
        (m1 / total, m2 / total)
    }

    pub fn mean_position(&self) -> f64 {
        self.position_moments().0
    }

    pub fn position_variance(&self) -> f64 {
        let (m1, m2) = self.position_moments();
        m2 - m1 * m1
    }

    pub fn mean_momentum(&self) -> f64 {
        self.momentum_moments().0
    }

    pub fn momentum_variance(&self) -> f64 {
        let (m1, m2) = self.momentum_moments();
        m2 - m1 * m1
    }

    /// `ψ(x - shift)`, computed as the phase `e^{-i p shift}` in momentum space.
    pub fn translated(&self, shift: f64) -> PointerState {
        let mut spectrum = self.amps.clone();
        if shift != 0.0 {
            fft(&mut spectrum, false);
            for (k, a) in spectrum.iter_mut().enumerate() {
                let phase = -self.momentum(k) * shift;
                *a *= Complex64::new(libm::cos(phase), libm::sin(phase));
            }
            fft(&mut spectrum, true);
            let n = spectrum.len() as f64;
            for a in &mut spectrum {
                *a /= n;
            }
        }
        PointerState { amps: spectrum, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingResult {
    pub mean_position_shift: f64,
    pub mean_momentum_shift: f64,
    pub success_prob: f64,
    pub g: f64,
    /// Joint system⊗meter norm after coupling, before post-selection.
    pub joint_norm_check: f64,
}

/// Couples `A` to the meter with strength `g`, post-selects and reads the
/// conditional meter's mean shifts.
pub fn couple_and_postselect(
    a: &LinearOperator,
    e: &PrePostEnsemble,
    ptr: &PointerState,
    g: f64,
) -> Result<CouplingResult> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::InvalidPointer(alloc::format!("coupling g must be non-negative, got {g}")));
    }
    let spectrum = SpectralDecomposition::new(a)?;
    let limit = ptr.span() / 4.0;
    let max_shift = spectrum.eigenvalues().iter().map(|l| (g * l).abs()).fold(0.0, f64::max);
    if max_shift > limit {
        return Err(Error::PointerOverflow { shift: max_shift, limit });
    }

    let evolved = e.evolved_pre();
    let mut conditional = alloc::vec![Complex64::new(0.0, 0.0); ptr.len()];
    let mut joint_norm = 0.0;
    for (lambda, projector) in spectrum.eigenvalues().iter().zip(spectrum.projectors()) {
        let branch = apply(projector, evolved)?;
        let branch_norm = branch.norm_sqr();
        if branch_norm == 0.0 {
            continue;
        }
        let shifted = ptr.translated(g * lambda);
        joint_norm += branch_norm * shifted.norm_sqr();
        let weight = inner(e.post(), &branch)?;
        for (out, amp) in conditional.iter_mut().zip(shifted.amplitudes()) {
            *out += weight * amp;
        }
    }

    let meter = PointerState { amps: conditional, ..*ptr };
    let success_prob = meter.norm_sqr();
    if success_prob.is_nan() || success_prob <= 1e-24 {
        return Err(Error::OrthogonalEnsemble);
    }
    Ok(CouplingResult {
        mean_position_shift: meter.mean_position() - ptr.mean_position(),
        mean_momentum_shift: meter.mean_momentum() - ptr.mean_momentum(),
        success_prob: success_prob.min(1.0),
        g,
        joint_norm_check: joint_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakLimitRow {
    pub g: f64,
    pub position_shift: f64,
    pub momentum_shift: f64,
    /// `g·Re(A_w)`.
    pub predicted_pos: f64,
    /// `2g·Var(p)·Im(A_w)`.
    pub predicted_mom: f64,
}

impl WeakLimitRow {
    pub fn position_error(&self) -> f64 {
        (self.position_shift - self.predicted_pos).abs()
    }

    pub fn momentum_error(&self) -> f64 {
        (self.momentum_shift - self.predicted_mom).abs()
    }
}

/// Runs [`couple_and_postselect`] on a default meter for every `g` in
/// `g_list` (positive, strictly descending).
pub fn weak_limit_report(
    a: &LinearOperator,
    e: &PrePostEnsemble,
    sigma: f64,
    g_list: &[f64],
) -> Result<Vec<WeakLimitRow>> {
    if g_list.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidPointer("coupling strengths must be positive".into()));
    }
    if g_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidPointer("coupling strengths must be strictly descending".into()));
    }
    let ptr = gaussian_pointer(sigma, DEFAULT_GRID_POINTS, DEFAULT_SPAN_SIGMAS * sigma)?;
    let var_p = ptr.momentum_variance();
    let aw = weak_value("A", a, e)?.value;
    g_list
        .iter()
        .map(|&g| {
            let r = couple_and_postselect(a, e, &ptr, g)?;
            Ok(WeakLimitRow {
                g,
                position_shift: r.mean_position_shift,
                momentum_shift: r.mean_momentum_shift,
                predicted_pos: g * aw.re,
                predicted_mom: 2.0 * g * var_p * aw.im,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let p = gaussian_pointer(1.0, 256, 16.0).unwrap();
        assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(p.mean_position().abs() < 1e-10);
        assert!(p.mean_momentum().abs() < 1e-10);
        assert!((p.position_variance() - 1.0).abs() < 1e-6);
        assert!((p.momentum_variance() - 0.25).abs() < 1e-6);

        let p2 = gaussian_pointer(2.0, 256, 32.0).unwrap();
        assert!((p2.position_variance() - 4.0).abs() < 1e-6);
        assert!((p2.momentum_variance() - 1.0 / 16.0).abs() < 1e-6);
    }

    #[test]
    fn grid_validation() {
        assert!(gaussian_pointer(0.0, 256, 16.0).is_err());
        assert!(gaussian_pointer(1.0, 100, 16.0).is_err());
        assert!(gaussian_pointer(1.0, 1024, 16.0).is_err());
        assert!(gaussian_pointer(1.0, 32, 16.0).is_err());
        assert!(gaussian_pointer(1.0, 256, 7.9).is_err());
        assert!(gaussian_pointer(1.0, 64, 8.0).is_ok());
    }

    #[test]
    fn translation_moves_mean() {
        let p = gaussian_pointer(1.0, 256, 16.0).unwrap();
        let t = p.translated(0.75);
        assert!((t.mean_position() - 0.75).abs() < 1e-10);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(t.mean_momentum().abs() < 1e-10);
    }
}
