//! Pre/post-selected ensembles, weak values, Born-rule expectation and
//! projective (strong) measurement.
//!
//! The weak value of `A` for pre-selection `|Ψ_i⟩`, intermediate evolution
//! `U` and post-selection `|Ψ_f⟩` is
//!
//! ```text
//! A_w = ⟨Ψ_f| A U |Ψ_i⟩ / ⟨Ψ_f| U |Ψ_i⟩
//! ```
//!
//! i.e. `A` acts at the measurement plane after `U`. The post state always
//! sits in the bra; [`reversed_weak_value`] gives the opposite ordering.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::eigen::hermitian_eigen;
use crate::qstate::{apply, inner, normalize, Amplitude, LinearOperator, StateVector};
use crate::{Error, Result, EXACT_TOL};

/// Below this overlap modulus the ensemble is treated as orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-12;

/// Eigenvalues closer than this share one spectral projector.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PrePostEnsemble {
    pre: StateVector,
    post: StateVector,
    mid_evolution: Option<LinearOperator>,
    evolved_pre: StateVector,
    overlap: Amplitude,
}

impl PrePostEnsemble {
    /// Builds an ensemble from unit states; `mid_evolution` must be unitary.
    pub fn new(pre: StateVector, post: StateVector, mid_evolution: Option<LinearOperator>) -> Result<Self> {
        if !pre.is_normalized() || !post.is_normalized() {
            return Err(Error::NotNormalized);
        }
        inner(&post, &pre)?;
        let evolved_pre = match &mid_evolution {
            Some(u) => {
                if !u.is_unitary(EXACT_TOL) {
                    return Err(Error::NotUnitary("mid evolution".into()));
                }
                apply(u, &pre)?
            }
            None => pre.clone(),
        };
        let overlap = inner(&post, &evolved_pre)?;
        Ok(PrePostEnsemble { pre, post, mid_evolution, evolved_pre, overlap })
    }

    /// Like [`PrePostEnsemble::new`] but normalizes `pre` and `post` first.
    pub fn normalized(pre: &StateVector, post: &StateVector, mid_evolution: Option<LinearOperator>) -> Result<Self> {
        Self::new(normalize(pre)?, normalize(post)?, mid_evolution)
    }

    pub fn pre(&self) -> &StateVector {
        &self.pre
    }

    pub fn post(&self) -> &StateVector {
        &self.post
    }

    pub fn mid_evolution(&self) -> Option<&LinearOperator> {
        self.mid_evolution.as_ref()
    }

    /// `U|Ψ_i⟩`, the pre-selected state at the measurement plane.
    pub fn evolved_pre(&self) -> &StateVector {
        &self.evolved_pre
    }

    /// `⟨Ψ_f|U|Ψ_i⟩`.
    pub fn overlap(&self) -> Amplitude {
        self.overlap
    }

    pub fn is_orthogonal(&self) -> bool {
        self.overlap.norm() < ORTHOGONAL_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue {
    pub value: Amplitude,
    pub observable_name: String,
    pub overlap: Amplitude,
    pub postselect_prob: f64,
}

pub fn weak_value(name: &str, a: &LinearOperator, e: &PrePostEnsemble) -> Result<WeakValue> {
    let numerator = a.sandwich(&e.post, &e.evolved_pre)?;
    if e.is_orthogonal() {
        return Err(Error::OrthogonalEnsemble);
    }
    Ok(WeakValue {
        value: numerator / e.overlap,
        observable_name: name.to_string(),
        overlap: e.overlap,
        postselect_prob: e.overlap.norm_sqr(),
    })
}

/// `⟨UΨ_i| A |Ψ_f⟩ / ⟨UΨ_i|Ψ_f⟩`; the complex conjugate of the weak value
/// whenever `A` is Hermitian.
pub fn reversed_weak_value(a: &LinearOperator, e: &PrePostEnsemble) -> Result<Amplitude> {
    let numerator = a.sandwich(&e.evolved_pre, &e.post)?;
    if e.is_orthogonal() {
        return Err(Error::OrthogonalEnsemble);
    }
    Ok(numerator / e.overlap.conj())
}

/// `|⟨Ψ_f|U|Ψ_i⟩|²`, clamped into `[0, 1]`.
pub fn postselect_probability(e: &PrePostEnsemble) -> f64 {
    e.overlap.norm_sqr().clamp(0.0, 1.0)
}

/// `⟨s|A|s⟩` for Hermitian `A` and unit `s`.
pub fn expectation(a: &LinearOperator, s: &StateVector) -> Result<f64> {
    if !a.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian);
    }
    if (s.norm_sqr() - 1.0).abs() > HERMITIAN_TOL {
        return Err(Error::NotNormalized);
    }
    let value = a.sandwich(s, s)?;
    debug_assert!(value.im.abs() <= HERMITIAN_TOL, "imaginary residue {}", value.im);
    Ok(value.re)
}

/// Distinct eigenvalues of a Hermitian operator with their eigenspace projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<LinearOperator>,
}

impl SpectralDecomposition {
    pub fn new(a: &LinearOperator) -> Result<Self> {
        if !a.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::NotHermitian);
        }
        let n = a.dim();
        let (values, vectors) = hermitian_eigen(a.entries(), n);
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut projectors: Vec<LinearOperator> = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && values[end] - values[end - 1] <= EIGEN_CLUSTER_TOL {
                end += 1;
            }
            let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
            let mut entries = alloc::vec![Complex64::new(0.0, 0.0); n * n];
            for col in start..end {
                for r in 0..n {
                    let vr = vectors[r * n + col];
                    if vr == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..n {
                        entries[r * n + c] += vr * vectors[c * n + col].conj();
                    }
                }
            }
            eigenvalues.push(mean);
            projectors.push(LinearOperator::from_entries(a.basis().clone(), entries)?);
            start = end;
        }
        Ok(SpectralDecomposition { eigenvalues, projectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[LinearOperator] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Born probabilities `‖P_λ s‖²` in eigenvalue order.
    pub fn probabilities(&self, s: &StateVector) -> Result<Vec<f64>> {
        self.projectors.iter().map(|p| Ok(apply(p, s)?.norm_sqr())).collect()
    }

    /// Draws one outcome index with Born probabilities.
    pub fn sample_index(&self, probabilities: &[f64], rng: &mut impl RngCore) -> usize {
        let total: f64 = probabilities.iter().sum();
        let u = uniform(rng) * total;
        let mut acc = 0.0;
        for (k, p) in probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        // Rounding can leave `u` just past the last partial sum.
        probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// Samples an eigenvalue and returns it with the collapsed, renormalized state.
    pub fn measure(&self, s: &StateVector, rng: &mut impl RngCore) -> Result<(f64, StateVector)> {
        let probs = self.probabilities(s)?;
        let k = self.sample_index(&probs, rng);
        let collapsed = normalize(&apply(&self.projectors[k], s)?)?;
        Ok((self.eigenvalues[k], collapsed))
    }

    /// Outcome counts of `shots` independent measurements of fresh copies of `s`.
    pub fn sample_counts(&self, s: &StateVector, shots: usize, seed: u64) -> Result<Vec<usize>> {
        let probs = self.probabilities(s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = alloc::vec![0; self.len()];
        for _ in 0..shots {
            counts[self.sample_index(&probs, &mut rng)] += 1;
        }
        Ok(counts)
    }
}

fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Projective measurement of `A` on `s`, deterministic for a fixed seed.
pub fn strong_measure(a: &LinearOperator, s: &StateVector, seed: u64) -> Result<(f64, StateVector)> {
    if (s.norm_sqr() - 1.0).abs() > HERMITIAN_TOL {
        return Err(Error::NotNormalized);
    }
    let spectrum = SpectralDecomposition::new(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spectrum.measure(s, &mut rng)
}
