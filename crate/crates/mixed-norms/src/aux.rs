//! `|P_N u|_{(k)}`: three weighted mixed norms per dyadic band, and the
//! Besov-type aggregate `‖u‖_{(k,q,T)} = (Σ_N |P_N u|^q_{(k)})^{1/q}`.

use crate::riesz::{RieszOp, RieszSpec};
use crate::spec::MixedSpec;
use crate::{MixedError, Result};
use littlewood_paley::{critical_index, lq_norm, BandLayout, DyadicBand};
use propagators::PhaseKind;
use spectral_core::{fft::fft_nd, Complex64, FieldPath};

/// Which smoothing weight the first summand carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxFlavor {
    /// `K(I_x, I_y)^{1/8}`, 2D ZK frame.
    Original,
    /// `(I_x I_y)^{1/8}`, 2D symmetrized frame.
    Symmetrized,
    /// `I_x^{1/10}`, 3D.
    ThreeD,
}

impl AuxFlavor {
    pub fn for_phase(kind: PhaseKind) -> Self {
        match kind {
            PhaseKind::Zk2d => AuxFlavor::Original,
            PhaseKind::Sym2d => AuxFlavor::Symmetrized,
            PhaseKind::Zk3d | PhaseKind::Sym3d => AuxFlavor::ThreeD,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AuxFlavor::ThreeD => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    pub n: usize,
    pub k: i64,
    pub q: f64,
    /// Window length; the norms run over `[0, T]`.
    pub t: f64,
}

impl AuxParams {
    pub fn new(n: usize, k: i64, q: f64, t: f64) -> Result<Self> {
        let p = AuxParams { n, k, q, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(MixedError::PowerTooSmall(self.k));
        }
        critical_index(self.n, self.k)?;
        if !(self.q >= 1.0) {
            return Err(MixedError::BadExponent(self.q));
        }
        if !(self.t > 0.0) {
            return Err(MixedError::BadWindow { t: self.t, len: f64::NAN });
        }
        Ok(())
    }

    /// Band weight exponents of the three summands.
    pub fn weights(&self) -> [f64; 3] {
        let sc = critical_index(self.n, self.k).expect("validated");
        let k = self.k as f64;
        if self.n == 2 {
            [sc, sc, 0.5 - 5.0 / (4.0 * k)]
        } else {
            [sc, sc, 0.75 - 3.0 / (2.0 * k)]
        }
    }

    /// Mixed specs of the three summands.
    pub fn specs(&self) -> [MixedSpec; 3] {
        let k = self.k as f64;
        if self.n == 2 {
            [MixedSpec::full(4.0).unwrap(), MixedSpec::space_time(4.0, 6.0).unwrap(), MixedSpec::space_time(4.0, 4.0 * k).unwrap()]
        } else {
            [MixedSpec::full(3.75).unwrap(), MixedSpec::full(4.0).unwrap(), MixedSpec::space_time(4.0, 6.0 * k).unwrap()]
        }
    }

    pub fn first_weight(&self, flavor: AuxFlavor) -> Vec<RieszSpec> {
        match (self.n, flavor) {
            (3, _) | (_, AuxFlavor::ThreeD) => vec![RieszSpec::new(RieszOp::Ix, 0.1)],
            (_, AuxFlavor::Original) => vec![RieszSpec::new(RieszOp::K, 0.125)],
            (_, AuxFlavor::Symmetrized) => vec![RieszSpec::new(RieszOp::IxIy, 0.125)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuxTerms {
    pub term1: f64,
    pub term2: f64,
    pub term3: f64,
}

impl AuxTerms {
    pub fn total(&self) -> f64 {
        self.term1 + self.term2 + self.term3
    }
}

fn window_steps(u: &FieldPath, t: f64) -> Result<usize> {
    let len = u.t_end();
    if !(t > 0.0) || t > len * (1.0 + 1e-12) {
        return Err(MixedError::BadWindow { t, len });
    }
    let j = ((t / u.dt()) * (1.0 + 1e-12)).floor() as usize;
    if j == 0 {
        return Err(MixedError::BadWindow { t, len });
    }
    Ok(j.min(u.steps()))
}

/// Per-band terms for every band of the grid's window.
pub fn aux_table(u: &FieldPath, prm: &AuxParams, flavor: AuxFlavor) -> Result<Vec<(DyadicBand, AuxTerms)>> {
    prm.validate()?;
    let grid = *u.grid();
    if grid.dim() != prm.n {
        return Err(MixedError::AxisMismatch);
    }
    let steps = window_steps(u, prm.t)?;
    let layout = BandLayout::new(&grid);
    let n = grid.dim();
    let first: Vec<f64> = {
        let specs = prm.first_weight(flavor);
        (0..grid.len()).map(|i| specs.iter().map(|s| s.symbol(&grid.kappa(i)[..n])).product()).collect()
    };
    let spectra: Vec<_> = u.snapshots()[..=steps].iter().map(|s| s.to_frequency()).collect();
    // bands carrying any energy over the window
    let mut live = vec![false; layout.count()];
    for s in &spectra {
        for (i, v) in s.values().iter().enumerate() {
            if let Some(b) = layout.band_of(i) {
                if *v != Complex64::default() {
                    live[b] = true;
                }
            }
        }
    }
    let specs = prm.specs();
    let wexp = prm.weights();
    let scale = grid.length().powi(-(n as i32));
    let mut out = Vec::new();
    let mut buf = vec![Complex64::default(); grid.len()];
    for (bi, band) in layout.bands().into_iter().enumerate() {
        if !live[bi] {
            out.push((band, AuxTerms::default()));
            continue;
        }
        let mut accs: Vec<_> = specs.iter().map(|s| s.accumulator(&grid, steps, u.dt())).collect();
        for (j, s) in spectra.iter().enumerate() {
            for pass in 0..2 {
                for (i, (b, v)) in buf.iter_mut().zip(s.values()).enumerate() {
                    *b = if layout.band_of(i) == Some(bi) {
                        let w = if pass == 0 { first[i] } else { 1.0 };
                        // inverse transform with the node-shift parity folded in
                        let idx = grid.unflatten(i);
                        let par: usize = idx[..n].iter().sum();
                        let sgn = if par % 2 == 0 { scale } else { -scale };
                        v * (w * sgn)
                    } else {
                        Complex64::default()
                    };
                }
                fft_nd(&mut buf, n, grid.points(), true);
                if pass == 0 {
                    accs[0].push(j, &buf);
                } else {
                    accs[1].push(j, &buf);
                    accs[2].push(j, &buf);
                }
            }
        }
        let nn = band.n();
        let vals: Vec<f64> = accs.into_iter().map(|a| a.finish()).collect();
        out.push((
            band,
            AuxTerms { term1: nn.powf(wexp[0]) * vals[0], term2: nn.powf(wexp[1]) * vals[1], term3: nn.powf(wexp[2]) * vals[2] },
        ));
    }
    Ok(out)
}

pub fn aux_band_quantity(u: &FieldPath, band: DyadicBand, prm: &AuxParams, flavor: AuxFlavor) -> Result<AuxTerms> {
    let layout = BandLayout::new(u.grid());
    let pos = layout.position(band)?;
    Ok(aux_table(u, prm, flavor)?[pos].1)
}

pub fn aux_norm(u: &FieldPath, prm: &AuxParams, flavor: AuxFlavor) -> Result<f64> {
    let table = aux_table(u, prm, flavor)?;
    let totals: Vec<f64> = table.iter().map(|(_, t)| t.total()).collect();
    Ok(lq_norm(&totals, prm.q))
}

/// `‖u‖_{(k,q,T)}` for each window length in `ts`.
pub fn vanishing_window_check(u: &FieldPath, prm: &AuxParams, flavor: AuxFlavor, ts: &[f64]) -> Result<Vec<f64>> {
    ts.iter().map(|&t| aux_norm(u, &AuxParams { t, ..*prm }, flavor)).collect()
}

pub fn aux_table_csv(table: &[(DyadicBand, AuxTerms)]) -> String {
    let mut s = String::from("N, term1, term2, term3, total\n");
    for (b, t) in table {
        s.push_str(&format!("{:.15e}, {:.15e}, {:.15e}, {:.15e}, {:.15e}\n", b.n(), t.term1, t.term2, t.term3, t.total()));
    }
    s
}
