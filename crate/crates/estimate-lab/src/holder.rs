//! Hölder exponent tables for the multilinear dyadic estimates, in exact
//! rational arithmetic, with the validity checks they must satisfy.

use crate::{LabError, Result};
use num_rational::Ratio;
use std::fmt;

type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    One,
    /// Case 1 with the roles of `x` and `y` exchanged.
    Two,
    Three,
}

impl std::str::FromStr for Case {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Case::One),
            "2" => Ok(Case::Two),
            "3" => Ok(Case::Three),
            _ => Err(LabError::BadParameter(format!("case '{s}'"))),
        }
    }
}

/// Reciprocal exponents of factor `j`: `1/p_j` (x), `1/q_j` (y), `1/r_j` (t).
/// The 3D Case 1 table splits `L^p_x L^q_{yt}` only and has no `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderRow {
    pub p: Q,
    pub q: Q,
    pub r: Option<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderTable {
    pub n: usize,
    pub k: i64,
    pub case: Case,
    pub eps: Q,
    /// `x` and `y` labels exchanged (Case 2).
    pub swapped: bool,
    pub rows: Vec<HolderRow>,
    pub sum_p_is_one: bool,
    pub sum_q_is_half: bool,
    pub sum_r_is_half: bool,
    /// `p_j ≥ 4` and `q_j ≥ 4` for every `j`.
    pub exponents_at_least_4: bool,
}

impl HolderTable {
    pub fn sums(&self) -> (Q, Q, Option<Q>) {
        let sp = self.rows.iter().map(|r| r.p).sum();
        let sq = self.rows.iter().map(|r| r.q).sum();
        let sr = self.rows.iter().map(|r| r.r).sum::<Option<Q>>();
        (sp, sq, sr)
    }

    pub fn valid(&self) -> bool {
        self.sum_p_is_one && self.sum_q_is_half && self.sum_r_is_half && self.exponents_at_least_4
    }
}

impl fmt::Display for HolderTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# n = {}, k = {}, case = {:?}, eps = {}", self.n, self.k, self.case, self.eps)?;
        let (a, b) = if self.swapped { ("1/q", "1/p") } else { ("1/p", "1/q") };
        writeln!(f, "j, {a}, {b}, 1/r")?;
        for (j, r) in self.rows.iter().enumerate() {
            let rr = r.r.map_or("-".to_string(), |v| v.to_string());
            writeln!(f, "{}, {}, {}, {}", j + 1, r.p, r.q, rr)?;
        }
        let (sp, sq, sr) = self.sums();
        writeln!(f, "sum, {sp}, {sq}, {}", sr.map_or("-".to_string(), |v| v.to_string()))?;
        writeln!(f, "sum_p_is_one = {}", self.sum_p_is_one)?;
        writeln!(f, "sum_q_is_half = {}", self.sum_q_is_half)?;
        writeln!(f, "sum_r_is_half = {}", self.sum_r_is_half)?;
        write!(f, "exponents_at_least_4 = {}", self.exponents_at_least_4)
    }
}

fn rat(v: f64) -> Result<Q> {
    Ratio::approximate_float(v).ok_or_else(|| LabError::BadParameter(format!("ε = {v} has no rational form")))
}

fn q(a: i64, b: i64) -> Q {
    Ratio::new(a, b)
}

/// Table for `n ∈ {2, 3}`, `k ≥ 3`. Errors when `ε` pushes an entry out of
/// its range (named in the message).
pub fn holder_exponent_table(n: usize, k: i64, case: Case, eps: f64) -> Result<HolderTable> {
    if k < 3 {
        return Err(LabError::BadParameter(format!("k = {k}: the tables need k ≥ 3")));
    }
    if !(eps >= 0.0) {
        return Err(LabError::BadParameter(format!("ε = {eps} must be nonnegative")));
    }
    let e = rat(eps)?;
    let kk = k as usize;
    let base = q(3, 4 * k);
    let quarter_k = q(1, 4 * k);
    let third_k = q(1, 3 * k);
    let two3 = q(2, 3);
    let mut rows = Vec::with_capacity(kk + 1);
    match (n, case) {
        (2, Case::One | Case::Two) => {
            rows.push(HolderRow { p: base, q: quarter_k + e, r: Some(third_k - two3 * e) });
            for _ in 2..=kk {
                rows.push(HolderRow { p: base, q: quarter_k, r: Some(third_k) });
            }
            rows.push(HolderRow { p: q(1, 4), q: q(1, 4) - e, r: Some(q(1, 6) + two3 * e) });
        }
        (2, Case::Three) => {
            for _ in 1..kk {
                rows.push(HolderRow { p: base, q: quarter_k, r: Some(third_k) });
            }
            rows[0] = HolderRow { p: base, q: quarter_k + e, r: Some(third_k - two3 * e) };
            rows.push(HolderRow { p: base, q: quarter_k - e, r: Some(third_k + two3 * e) });
            rows.push(HolderRow { p: q(1, 4), q: q(1, 4), r: Some(q(1, 6)) });
        }
        (3, Case::One) => {
            let s = e / 6;
            rows.push(HolderRow { p: base - s, q: quarter_k - s, r: None });
            for _ in 2..=kk {
                rows.push(HolderRow { p: base, q: quarter_k, r: None });
            }
            rows.push(HolderRow { p: q(1, 4) + s, q: q(1, 4) + s, r: None });
        }
        (3, Case::Two) => {
            let h = e / 2;
            rows.push(HolderRow { p: base, q: quarter_k - h, r: Some(quarter_k) });
            for _ in 2..kk {
                rows.push(HolderRow { p: base, q: quarter_k, r: Some(quarter_k) });
            }
            rows.push(HolderRow { p: base, q: quarter_k + h, r: Some(quarter_k) });
            rows.push(HolderRow { p: q(1, 4), q: q(1, 4), r: Some(q(1, 4)) });
        }
        (3, Case::Three) => return Err(LabError::BadParameter("the 3D estimate has cases 1 and 2 only".into())),
        _ => return Err(LabError::BadParameter(format!("dimension {n}"))),
    }
    // ranges: reciprocals in (0, 1/4]; the 3D Case 1 last factor is only
    // kept inside 15/4 ≤ p, q
    let cap = if (n, case) == (3, Case::One) { q(4, 15) } else { q(1, 4) };
    for (j, r) in rows.iter().enumerate() {
        for (name, v) in [("1/p", Some(r.p)), ("1/q", Some(r.q)), ("1/r", r.r)] {
            let Some(v) = v else { continue };
            if v <= q(0, 1) {
                return Err(LabError::EpsilonTooLarge(format!("{name}_{} = {v} must stay positive", j + 1)));
            }
            if name != "1/r" && v > cap {
                return Err(LabError::EpsilonTooLarge(format!("{name}_{} = {v} exceeds {cap}", j + 1)));
            }
        }
    }
    let mut t = HolderTable {
        n,
        k,
        case,
        eps: e,
        swapped: n == 2 && case == Case::Two,
        rows,
        sum_p_is_one: false,
        sum_q_is_half: false,
        sum_r_is_half: false,
        exponents_at_least_4: false,
    };
    let (sp, sq, sr) = t.sums();
    t.sum_p_is_one = sp == q(1, 1);
    t.sum_q_is_half = sq == q(1, 2);
    t.sum_r_is_half = sr.is_none_or(|v| v == q(1, 2));
    t.exponents_at_least_4 = t.rows.iter().all(|r| r.p <= q(1, 4) && r.q <= q(1, 4));
    Ok(t)
}
