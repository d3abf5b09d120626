use std::fmt;

use crate::poly::{GradedPoly, Scalar};

/// Element of a Bott-Samelson bimodule `B_w`, written in the left basis
/// `beta^e = 1 (x) x_{w_1}^{e_1} (x) ... (x) x_{w_n}^{e_n}`, where bit `k` of the
/// mask `e` is the exponent in slot `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSElement {
    len: usize,
    coeffs: Vec<GradedPoly>,
}

impl BSElement {
    pub fn zero(nvars: usize, len: usize) -> Self {
        BSElement { len, coeffs: vec![GradedPoly::zero(nvars); 1 << len] }
    }

    pub fn basis(nvars: usize, len: usize, mask: usize) -> Self {
        let mut z = Self::zero(nvars, len);
        z.coeffs[mask] = GradedPoly::one(nvars);
        z
    }

    /// `1 (x) 1 (x) ... (x) 1`.
    pub fn one(nvars: usize, len: usize) -> Self {
        Self::basis(nvars, len, 0)
    }

    pub fn from_coeffs(len: usize, coeffs: Vec<GradedPoly>) -> Self {
        assert_eq!(coeffs.len(), 1 << len);
        BSElement { len, coeffs }
    }

    /// Length of the underlying word.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn nvars(&self) -> usize {
        self.coeffs[0].nvars()
    }

    pub fn coeff(&self, mask: usize) -> &GradedPoly {
        &self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[GradedPoly] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, mask: usize) -> &mut GradedPoly {
        &mut self.coeffs[mask]
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, &GradedPoly)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(GradedPoly::is_zero)
    }

    pub fn add_assign(&mut self, other: &BSElement) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                a.add_assign_ref(b);
            }
        }
    }

    pub fn sub_assign(&mut self, other: &BSElement) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                a.sub_assign_ref(b);
            }
        }
    }

    /// `self += c * other` with `c` acting on the left.
    pub fn add_scaled(&mut self, c: &GradedPoly, other: &BSElement) {
        debug_assert_eq!(self.len, other.len);
        if c.is_zero() {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                a.add_scaled(c, b);
            }
        }
    }

    pub fn scale_left(&self, c: &GradedPoly) -> BSElement {
        BSElement { len: self.len, coeffs: self.coeffs.iter().map(|b| c * b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> BSElement {
        BSElement { len: self.len, coeffs: self.coeffs.iter().map(|b| b.scale(c)).collect() }
    }

    /// Degree of `beta^e` in `B_w`.
    pub fn basis_degree(len: usize, mask: usize) -> i32 {
        2 * mask.count_ones() as i32 - len as i32
    }

    /// Checks that every term `c * beta^e` has total degree `deg`.
    pub fn is_homogeneous_of(&self, deg: i32) -> bool {
        self.nonzero().all(|(e, c)| {
            c.is_homogeneous() && c.degree().unwrap() + Self::basis_degree(self.len, e) == deg
        })
    }

    pub fn reduce_mod(&self, p: u64) -> crate::Result<BSElement> {
        let coeffs = self.coeffs.iter().map(|c| c.reduce_mod(p)).collect::<crate::Result<_>>()?;
        Ok(BSElement { len: self.len, coeffs })
    }
}

impl fmt::Display for BSElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .nonzero()
            .map(|(e, c)| {
                let bits: String = (0..self.len).map(|k| if e >> k & 1 == 1 { '1' } else { '0' }).collect();
                format!("({c})*b[{bits}]")
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}
