use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{GradedPoly, Scalar};

/// Crystallographic Coxeter datum: generalized Cartan matrix plus a
/// realization on `V*` given by an integer pairing matrix.
///
/// `V*` has the simple roots `x_1..x_r` as its first `r` basis vectors. When
/// the Cartan matrix is singular, extra basis vectors are appended so that
/// the coroots stay linearly independent (the usual Kac-Moody realization).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterDatum {
    label: String,
    cartan: Vec<Vec<i64>>,
    finite: bool,
    /// `pairing[i][j] = <alpha_i^vee, basis_j>` for `j < dim`.
    pairing: Vec<Vec<i64>>,
}

impl CoxeterDatum {
    pub fn from_cartan(label: impl Into<String>, cartan: Vec<Vec<i64>>) -> Result<Self> {
        let r = cartan.len();
        if r == 0 {
            return Err(Error::InvalidDatum("empty Cartan matrix".into()));
        }
        if r > 16 {
            return Err(Error::InvalidDatum("rank above 16 is not supported".into()));
        }
        for (i, row) in cartan.iter().enumerate() {
            if row.len() != r {
                return Err(Error::InvalidDatum("Cartan matrix must be square".into()));
            }
            if row[i] != 2 {
                return Err(Error::InvalidDatum(format!("diagonal entry {} is not 2", i + 1)));
            }
            for (j, &a) in row.iter().enumerate() {
                if i != j && a > 0 {
                    return Err(Error::InvalidDatum(format!("entry ({},{}) is positive", i + 1, j + 1)));
                }
                if i != j && (a == 0) != (cartan[j][i] == 0) {
                    return Err(Error::InvalidDatum(format!(
                        "entries ({},{}) and ({},{}) must vanish together",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let finite = all_principal_minors_positive(&cartan);
        let pairing = realization_pairing(&cartan);
        Ok(CoxeterDatum { label: label.into(), cartan, finite, pairing })
    }

    /// Parses a type label: `A3`, `B2`, `C3`, `D4`, `G2`, `E6`..`E8`, `F4`,
    /// affine `A1~`/`Ã1`, and products joined by `x`, e.g. `A1xA1`.
    pub fn from_label(label: &str) -> Result<Self> {
        let label = label.trim();
        let parts: Vec<&str> = label.split(['x', '×']).map(str::trim).collect();
        let mut blocks = Vec::new();
        for p in &parts {
            blocks.push(cartan_of_type(p)?);
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut cartan = vec![vec![0i64; n]; n];
        let mut off = 0;
        for b in &blocks {
            for (i, row) in b.iter().enumerate() {
                for (j, &a) in row.iter().enumerate() {
                    cartan[off + i][off + j] = a;
                }
            }
            off += b.len();
        }
        Self::from_cartan(label, cartan)
    }

    /// Parses a Cartan matrix file: one row of integers per line, `#`
    /// comments, and an optional `label: NAME` line.
    pub fn from_cartan_text(text: &str) -> Result<Self> {
        let mut label = String::from("custom");
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("label:") {
                label = rest.trim().to_string();
                continue;
            }
            let row: std::result::Result<Vec<i64>, _> =
                line.split([' ', ',', '\t']).filter(|t| !t.is_empty()).map(str::parse).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("Cartan row '{line}': {e}")))?);
        }
        Self::from_cartan(label, rows)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// Dimension of the realization `V*` (number of polynomial variables).
    pub fn dim(&self) -> usize {
        self.pairing[0].len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }

    pub fn pairing(&self) -> &[Vec<i64>] {
        &self.pairing
    }

    /// Order of `s_i s_j`, `None` for infinity.
    pub fn m(&self, i: usize, j: usize) -> Option<usize> {
        if i == j {
            return Some(1);
        }
        match self.cartan[i][j] * self.cartan[j][i] {
            0 => Some(2),
            1 => Some(3),
            2 => Some(4),
            3 => Some(6),
            _ => None,
        }
    }

    /// Matrix of `s_i` on `V*` in the column convention:
    /// column `j` holds the coordinates of `s_i(basis_j)`.
    pub fn reflection_matrix(&self, i: usize) -> Vec<i64> {
        let d = self.dim();
        let mut m = vec![0i64; d * d];
        for j in 0..d {
            m[j * d + j] = 1;
            m[i * d + j] -= self.pairing[i][j];
        }
        m
    }

    /// `s_i` applied to a polynomial.
    pub fn act_simple(&self, i: usize, f: &GradedPoly) -> GradedPoly {
        let d = self.dim();
        let images: Vec<GradedPoly> = (0..d)
            .map(|j| {
                let mut g = GradedPoly::var(d, j);
                let a = self.pairing[i][j];
                if a != 0 {
                    g.add_term(crate::poly::Monomial::var(d, i), Scalar::from_int(-a));
                }
                g
            })
            .collect();
        f.substitute(&images)
    }

    /// Returns `(f+, d_s f)` with `f = f+ + x_s * d_s f`, where
    /// `d_s f = (f - s f) / (2 x_s)`.
    pub fn demazure_split(&self, i: usize, f: &GradedPoly) -> Result<(GradedPoly, GradedPoly)> {
        let d = self.demazure(i, f)?;
        let plus = f - &d.mul_var(i);
        Ok((plus, d))
    }

    pub fn demazure(&self, i: usize, f: &GradedPoly) -> Result<GradedPoly> {
        if f.coefficients().any(|c| c.characteristic() == Some(2)) {
            return Err(Error::TwoNotInvertible);
        }
        let diff = f - &self.act_simple(i, f);
        let q = diff
            .div_var(i)
            .ok_or_else(|| Error::TheoryViolation("f - s(f) is not divisible by x_s".into()))?;
        Ok(q.scale(&Scalar::half()))
    }

    /// Stable text used in cache keys.
    pub fn fingerprint(&self) -> String {
        let rows: Vec<String> = self
            .pairing
            .iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        format!("{}[{}]", self.label, rows.join(";"))
    }
}

impl fmt::Display for CoxeterDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn cartan_of_type(t: &str) -> Result<Vec<Vec<i64>>> {
    let bad = || Error::InvalidDatum(format!("unknown Cartan type '{t}'"));
    let (affine, core) = if let Some(rest) = t.strip_prefix('Ã') {
        (true, format!("A{rest}"))
    } else if let Some(rest) = t.strip_suffix('~') {
        (true, rest.to_string())
    } else {
        (false, t.to_string())
    };
    let mut chars = core.chars();
    let family = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
    let n: usize = chars.as_str().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    if affine {
        if family != 'A' {
            return Err(Error::InvalidDatum(format!("affine type '{t}' is not supported; use a Cartan file")));
        }
        let k = n + 1;
        let mut a = vec![vec![0i64; k]; k];
        for i in 0..k {
            a[i][i] = 2;
        }
        if n == 1 {
            a[0][1] = -2;
            a[1][0] = -2;
        } else {
            for i in 0..k {
                let j = (i + 1) % k;
                a[i][j] = -1;
                a[j][i] = -1;
            }
        }
        return Ok(a);
    }
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
    }
    let chain = |a: &mut Vec<Vec<i64>>, upto: usize| {
        for i in 0..upto.saturating_sub(1) {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    };
    match family {
        'A' => chain(&mut a, n),
        'B' | 'C' if n >= 2 => {
            chain(&mut a, n);
            // The last node is the short root in type B and the long root in type C.
            if family == 'B' {
                a[n - 1][n - 2] = -2;
            } else {
                a[n - 2][n - 1] = -2;
            }
        }
        'D' if n >= 3 => {
            chain(&mut a, n - 1);
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
        'G' if n == 2 => {
            a[0][1] = -1;
            a[1][0] = -3;
        }
        'F' if n == 4 => {
            chain(&mut a, 4);
            a[2][1] = -2;
        }
        'E' if (6..=8).contains(&n) => {
            // Bourbaki numbering: 1-3-4-5-..., with 2 attached to 4.
            let edges: Vec<(usize, usize)> =
                [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)].into_iter().filter(|&(i, j)| i <= n && j <= n).collect();
            for (i, j) in edges {
                a[i - 1][j - 1] = -1;
                a[j - 1][i - 1] = -1;
            }
        }
        _ => return Err(bad()),
    }
    Ok(a)
}

fn all_principal_minors_positive(a: &[Vec<i64>]) -> bool {
    let r = a.len();
    (1u32..(1 << r)).all(|mask| {
        let idx: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
        let sub: linalg::Matrix =
            idx.iter().map(|&i| idx.iter().map(|&j| Scalar::from_int(a[i][j])).collect()).collect();
        linalg::determinant(&sub) > Scalar::zero()
    })
}

/// Extends the Cartan matrix by unit columns until its rows are independent.
fn realization_pairing(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = a.len();
    let mut pairing: Vec<Vec<i64>> = a.to_vec();
    let as_matrix = |p: &Vec<Vec<i64>>| -> linalg::Matrix {
        p.iter().map(|row| row.iter().map(|&v| Scalar::from_int(v)).collect()).collect()
    };
    let mut current = linalg::rank(&as_matrix(&pairing));
    let mut k = 0;
    while current < r {
        let mut trial = pairing.clone();
        for (i, row) in trial.iter_mut().enumerate() {
            row.push(i64::from(i == k));
        }
        let rk = linalg::rank(&as_matrix(&trial));
        if rk > current {
            pairing = trial;
            current = rk;
        }
        k += 1;
    }
    pairing
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_types() {
        let a2 = CoxeterDatum::from_label("A2").unwrap();
        assert!(a2.is_finite());
        assert_eq!(a2.m(0, 1), Some(3));
        let b2 = CoxeterDatum::from_label("B2").unwrap();
        assert_eq!(b2.m(0, 1), Some(4));
        let g2 = CoxeterDatum::from_label("G2").unwrap();
        assert_eq!(g2.m(0, 1), Some(6));
        let aa = CoxeterDatum::from_label("A1xA1").unwrap();
        assert_eq!(aa.m(0, 1), Some(2));
        let aff = CoxeterDatum::from_label("A1~").unwrap();
        assert!(!aff.is_finite());
        assert_eq!(aff.m(0, 1), None);
        assert_eq!(aff.dim(), 3);
        assert_eq!(CoxeterDatum::from_label("Ã1").unwrap().cartan(), aff.cartan());
        assert!(CoxeterDatum::from_label("Ã2").unwrap().dim() == 4);
        assert!(CoxeterDatum::from_label("D4").unwrap().is_finite());
        assert!(CoxeterDatum::from_label("E8").unwrap().is_finite());
        assert!(CoxeterDatum::from_label("Q3").is_err());
    }

    #[test]
    fn cartan_validation() {
        assert!(CoxeterDatum::from_cartan("bad", vec![vec![2, 1], vec![1, 2]]).is_err());
        assert!(CoxeterDatum::from_cartan("bad", vec![vec![2, 0], vec![-1, 2]]).is_err());
        let d = CoxeterDatum::from_cartan_text("label: mine\n2 -1\n-1 2 # A2\n").unwrap();
        assert_eq!(d.label(), "mine");
        assert!(d.is_finite());
    }

    #[test]
    fn simple_action_and_demazure() {
        let a2 = CoxeterDatum::from_label("A2").unwrap();
        let xs = GradedPoly::var(2, 0);
        let xt = GradedPoly::var(2, 1);
        assert_eq!(a2.act_simple(0, &xs), -&xs);
        assert_eq!(a2.act_simple(0, &xt), &xt + &xs);
        let (plus, d) = a2.demazure_split(0, &xt).unwrap();
        assert_eq!(plus.to_string(), "1/2*x_1 + x_2");
        assert_eq!(d, GradedPoly::constant(2, Scalar::from_ratio(-1, 2)));
        let (plus, d) = a2.demazure_split(0, &xs).unwrap();
        assert!(plus.is_zero());
        assert_eq!(d, GradedPoly::one(2));
    }
}
