use crate::Result;
use spectral_core::{apply_real_table, Field, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RieszOp {
    /// `|ξ|^σ`
    Ix,
    /// `|η|^σ`, η the transverse frequency vector
    Iy,
    /// `|ξ|^σ |η|^σ`
    IxIy,
    /// `|(ξ, η)|^σ`
    I,
    /// `(1 + |η|²)^{σ/2}`
    Jy,
    /// `|3ξ² − |η|²|^σ`
    K,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszSpec {
    pub op: RieszOp,
    pub sigma: f64,
}

impl RieszSpec {
    pub fn new(op: RieszOp, sigma: f64) -> Self {
        RieszSpec { op, sigma }
    }

    /// Multiplier value; vanishing bases map to 0 and `σ = 0` is the identity.
    pub fn symbol(&self, k: &[f64]) -> f64 {
        if self.sigma == 0.0 {
            return 1.0;
        }
        let xi = k[0].abs();
        let eta2: f64 = k[1..].iter().map(|v| v * v).sum();
        let homog = |base: f64| if base == 0.0 { 0.0 } else { base.powf(self.sigma) };
        match self.op {
            RieszOp::Ix => homog(xi),
            RieszOp::Iy => homog(eta2.sqrt()),
            RieszOp::IxIy => homog(xi) * homog(eta2.sqrt()),
            RieszOp::I => homog((xi * xi + eta2).sqrt()),
            RieszOp::Jy => (1.0 + eta2).powf(0.5 * self.sigma),
            RieszOp::K => homog((3.0 * xi * xi - eta2).abs()),
        }
    }
}

pub fn riesz_table(grid: &GridSpec, spec: &RieszSpec) -> Vec<f64> {
    let n = grid.dim();
    (0..grid.len()).map(|i| spec.symbol(&grid.kappa(i)[..n])).collect()
}

/// Applies a product of multipliers; result in frequency rep.
pub fn riesz_apply(f: &Field, specs: &[RieszSpec]) -> Result<Field> {
    let grid = f.grid();
    let n = grid.dim();
    let table: Vec<f64> = (0..grid.len())
        .map(|i| {
            let k = grid.kappa(i);
            specs.iter().map(|s| s.symbol(&k[..n])).product()
        })
        .collect();
    Ok(apply_real_table(f, &table)?)
}
