use crate::{PropagatorError, Result};

/// `μ = 4^{-1/3}`, `λ = √3 μ`, `R₀ = (μ λ; μ −λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizerConstants {
    pub mu: f64,
    pub lambda: f64,
}

impl SymmetrizerConstants {
    pub fn new() -> Self {
        let mu = 4f64.powf(-1.0 / 3.0);
        SymmetrizerConstants { mu, lambda: 3f64.sqrt() * mu }
    }

    /// Rows of `R₀`.
    pub fn r0(&self) -> [[f64; 2]; 2] {
        [[self.mu, self.lambda], [self.mu, -self.lambda]]
    }

    pub fn r0_inverse(&self) -> [[f64; 2]; 2] {
        let d = 2.0 * self.mu * self.lambda;
        // inverse of (μ λ; μ −λ) is (λ λ; μ −μ)/(2λμ)
        [[self.lambda / d, self.lambda / d], [self.mu / d, -self.mu / d]]
    }

    pub fn abs_det(&self) -> f64 {
        2.0 * self.lambda * self.mu
    }
}

impl Default for SymmetrizerConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `(ξ, η) = R₀ᵀ(ξ′, η′) = (μ(ξ′+η′), λ(ξ′−η′))`.
pub fn symmetrize_freq(k: &[f64]) -> Result<[f64; 2]> {
    if k.len() != 2 {
        return Err(PropagatorError::NotTwoDimensional);
    }
    let c = SymmetrizerConstants::new();
    Ok([c.mu * (k[0] + k[1]), c.lambda * (k[0] - k[1])])
}
