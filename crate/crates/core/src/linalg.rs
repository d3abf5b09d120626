//! Exact dense and sparse linear algebra over [`Scalar`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{is_prime, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut out = vec![vec![Scalar::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    let prod = &a[i][t] * &b[t][j];
                    out[i][j] += &prod;
                }
            }
        }
    }
    out
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for j in 0..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let d = &f * &m[r][j];
                        m[i][j] -= &d;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right kernel `{v : m v = 0}` in canonical (RREF) form.
pub fn kernel(m: &Matrix, cols: usize) -> Matrix {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Scalar::zero(); cols];
        v[f] = Scalar::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -&a[r][f];
        }
        basis.push(v);
    }
    // Canonicalize the subspace: RREF of the basis rows.
    rref(&mut basis);
    basis.retain(|row| row.iter().any(|c| !c.is_zero()));
    basis
}

pub fn determinant(m: &Matrix) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Scalar::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().unwrap();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let d = &f * &a[c][j];
                a[i][j] -= &d;
            }
        }
    }
    det
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
        return Err(Error::NonUnit("singular matrix".into()));
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Residue of a scalar in F_p, or `None` when `p` divides a denominator or
/// the scalar lives in a different prime field.
pub fn residue(s: &Scalar, p: u64) -> Option<u64> {
    match s {
        Scalar::Rational(r) => {
            let pm = BigInt::from(p);
            let den = r.denom().mod_floor(&pm).to_u64()?;
            if den == 0 {
                return None;
            }
            let num = r.numer().mod_floor(&pm).to_u64()?;
            Some(num * inv_mod(den, p) % p)
        }
        Scalar::Modular(f) if f.modulus() == p => Some(f.value()),
        Scalar::Modular(_) => None,
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Smallest-height fraction congruent to `a` modulo `m`, if one exists with
/// numerator and denominator below `sqrt(m / 2)`.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Sparse affine system over F_p (`p < 2^32`) in semi-echelon form: each
/// pivot row is normalized at its leading column and empty to the left of it.
pub struct ModSystem {
    p: u64,
    pivots: BTreeMap<usize, (BTreeMap<usize, u64>, u64)>,
    inconsistent: bool,
}

impl ModSystem {
    pub fn new(p: u64) -> Self {
        assert!(p < 1 << 32);
        ModSystem { p, pivots: BTreeMap::new(), inconsistent: false }
    }

    pub fn add_equation(&mut self, row: impl IntoIterator<Item = (usize, u64)>, rhs: u64) {
        let p = self.p;
        let mut row: BTreeMap<usize, u64> = row.into_iter().filter(|(_, v)| v % p != 0).map(|(k, v)| (k, v % p)).collect();
        let mut rhs = rhs % p;
        let mut cursor = 0;
        while let Some(c) = row.range(cursor..).map(|(c, _)| *c).find(|c| self.pivots.contains_key(c)) {
            let f = row.remove(&c).unwrap();
            let (prow, prhs) = &self.pivots[&c];
            for (k, v) in prow.range(c + 1..) {
                let e = row.entry(*k).or_insert(0);
                *e = (*e + p - f * v % p) % p;
                if *e == 0 {
                    row.remove(k);
                }
            }
            rhs = (rhs + p - f * prhs % p) % p;
            cursor = c + 1;
        }
        let Some((&lead, &lead_val)) = row.iter().next() else {
            if rhs != 0 {
                self.inconsistent = true;
            }
            return;
        };
        let inv = inv_mod(lead_val, p);
        for v in row.values_mut() {
            *v = *v * inv % p;
        }
        self.pivots.insert(lead, (row, rhs * inv % p));
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Back-substituted solution, when the system has full rank.
    pub fn unique_solution(&self, unknowns: usize) -> Option<Vec<u64>> {
        if self.inconsistent || self.pivots.len() != unknowns {
            return None;
        }
        let p = self.p;
        let mut sol = vec![0u64; unknowns];
        for (c, (row, rhs)) in self.pivots.iter().rev() {
            let mut v = *rhs;
            for (k, a) in row.range(c + 1..) {
                v = (v + p - a * sol[*k] % p) % p;
            }
            sol[*c] = v;
        }
        Some(sol)
    }
}

/// Sparse row: column index to nonzero coefficient.
pub type SparseRow = BTreeMap<usize, Scalar>;

const MAX_PRIMES: usize = 16;

/// Solves a sparse linear system with a unique solution, either directly in
/// the prime field of its coefficients or over Q by elimination modulo
/// several primes and rational reconstruction. Only the equations needed to
/// reach full rank are used, so `accept` must check every candidate against
/// the full set of constraints.
pub fn solve_unique(
    rows: &[(SparseRow, Scalar)],
    unknowns: usize,
    mut accept: impl FnMut(&[Scalar]) -> bool,
) -> Result<Vec<Scalar>> {
    let field = rows.iter().flat_map(|(r, c)| r.values().chain([c])).find_map(Scalar::characteristic);
    let solve_mod = |p: u64| -> Option<Vec<u64>> {
        let mut sys = ModSystem::new(p);
        for (row, rhs) in rows {
            if sys.rank() == unknowns {
                break;
            }
            let r = row.iter().map(|(k, v)| residue(v, p).map(|x| (*k, x))).collect::<Option<Vec<_>>>()?;
            sys.add_equation(r, residue(rhs, p)?);
        }
        sys.unique_solution(unknowns)
    };
    if let Some(q) = field {
        let sol = solve_mod(q).ok_or_else(|| Error::TheoryViolation("system has no unique solution".into()))?;
        let sol: Vec<Scalar> = sol.into_iter().map(|v| Scalar::modular(v as i64, q)).collect::<Result<_>>()?;
        return if accept(&sol) { Ok(sol) } else { Err(Error::TheoryViolation("system has no solution".into())) };
    }

    let mut modulus = BigInt::one();
    let mut residues = vec![BigInt::zero(); unknowns];
    let mut used = 0;
    let mut p: u64 = (1 << 31) - 1;
    let mut tried = 0;
    while used < MAX_PRIMES && tried < 2 * MAX_PRIMES {
        while !is_prime(p) {
            p -= 2;
        }
        let prime = p;
        p -= 2;
        tried += 1;
        let Some(sol) = solve_mod(prime) else { continue };
        used += 1;
        // Chinese remaindering: x = r + M * ((s - r) / M mod p).
        let pm = BigInt::from(prime);
        let m_inv = BigInt::from(inv_mod(modulus.mod_floor(&pm).to_u64().unwrap(), prime));
        for (r, s) in residues.iter_mut().zip(&sol) {
            let diff = (BigInt::from(*s) - &*r).mod_floor(&pm);
            *r += &modulus * ((diff * &m_inv).mod_floor(&pm));
        }
        modulus *= &pm;
        let candidate: Option<Vec<Scalar>> =
            residues.iter().map(|r| rational_reconstruct(r, &modulus).map(Scalar::Rational)).collect();
        if let Some(c) = candidate {
            if accept(&c) {
                return Ok(c);
            }
        }
    }
    Err(Error::TheoryViolation(if used == 0 {
        "system has no unique solution".into()
    } else {
        "no rational solution satisfies the system".into()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(determinant(&a), Scalar::one());
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn kernel_dimension() {
        let a = m(&[&[1, 1, 0], &[0, 0, 0]]);
        assert_eq!(kernel(&a, 3).len(), 2);
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn sparse_system_solves() {
        let rows: Vec<(SparseRow, Scalar)> = vec![
            ([(0, Scalar::from_int(3)), (1, Scalar::one())].into_iter().collect(), Scalar::from_int(3)),
            ([(0, Scalar::one()), (1, Scalar::from_int(-1))].into_iter().collect(), Scalar::one()),
        ];
        let sol = solve_unique(&rows, 2, |_| true).unwrap();
        assert_eq!(sol, vec![Scalar::from_ratio(1, 1), Scalar::from_int(0)]);
        let rows: Vec<(SparseRow, Scalar)> = vec![
            ([(0, Scalar::from_int(7))].into_iter().collect(), Scalar::from_int(-5)),
        ];
        assert_eq!(solve_unique(&rows, 1, |_| true).unwrap(), vec![Scalar::from_ratio(-5, 7)]);
        let rows: Vec<(SparseRow, Scalar)> = vec![([(0, Scalar::one()), (1, Scalar::one())].into_iter().collect(), Scalar::one())];
        assert!(solve_unique(&rows, 2, |_| true).is_err());
    }

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let p = 2147483647u64;
        let x = BigRational::new(BigInt::from(-12345), BigInt::from(6789));
        let r = residue(&Scalar::Rational(x.clone()), p).unwrap();
        assert_eq!(rational_reconstruct(&BigInt::from(r), &BigInt::from(p)).unwrap(), x);
        assert_eq!(residue(&Scalar::from_ratio(1, 3), 3), None);
    }
}
