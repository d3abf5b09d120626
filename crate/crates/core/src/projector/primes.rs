use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProjectorEngine;
use crate::coxeter::{CoxeterGroup, Element};
use crate::error::{Error, Result};
use crate::leaves::bits_string;
use crate::poly::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPrimeEntry {
    pub x: String,
    pub word: String,
    pub z: String,
    pub multiplicity: u64,
    pub det: String,
    pub reversed_det: String,
    pub primes: Vec<u64>,
    /// `i`/`j` bits of the selected leaves.
    pub leaves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPrimeReport {
    pub datum: String,
    pub region_top: Option<String>,
    pub region_size: usize,
    pub entries: Vec<BadPrimeEntry>,
    #[serde(rename = "D")]
    pub d: Vec<u64>,
    pub flags: Vec<String>,
}

/// `|s|` with all factors of two removed, as (numerator, denominator).
pub fn odd_part(s: &Scalar) -> Option<(BigInt, BigInt)> {
    let r = s.as_rational()?;
    let strip = |n: &BigInt| {
        let mut n = n.abs();
        if n.is_zero() {
            return n;
        }
        while n.is_even() {
            n /= 2;
        }
        n
    };
    Some((strip(r.numer()), strip(r.denom())))
}

/// Odd prime divisors by trial division.
pub fn odd_prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    while n.is_even() {
        n /= 2;
    }
    let mut d = BigInt::from(3u32);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.to_u64().expect("prime divisor fits in u64"));
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 2;
    }
    if !n.is_one() {
        out.push(n.to_u64().expect("prime divisor fits in u64"));
    }
    out
}

fn det_primes(s: &Scalar) -> Vec<u64> {
    let (num, den) = odd_part(s).unwrap_or_default();
    let mut out: BTreeSet<u64> = odd_prime_divisors(&num).into_iter().collect();
    out.extend(odd_prime_divisors(&den));
    out.into_iter().collect()
}

impl ProjectorEngine {
    /// Determinants of all intersection forms met while building the
    /// favorite projectors of the region, and their odd prime divisors.
    pub fn bad_primes(&self, region: &[Element], top: Option<Element>) -> Result<BadPrimeReport> {
        let g = &**self.group();
        let mut sorted = region.to_vec();
        sorted.sort();
        let per_element = sorted
            .par_iter()
            .map(|&x| {
                let proj = self.projector_of(x).map_err(|e| match e {
                    Error::TheoryViolation(m) => Error::TheoryViolation(format!("at {}: {m}", g.format(x))),
                    e => e,
                })?;
                let mut entries = Vec::new();
                let mut flags = Vec::new();
                if self.leaves().words().canonical(x).palindrome_fallback {
                    flags.push(format!("canonical word of {} is not a palindrome", g.format(x)));
                }
                for b in &proj.blocks {
                    if b.lambda.iter().flatten().any(|c| !c.in_dyadic_integers()) {
                        flags.push(format!("lambda at ({}, {}) has odd denominators", g.format(x), g.format(b.z)));
                    }
                    if det_primes(&b.det) != det_primes(&b.reversed_det) {
                        return Err(Error::TheoryViolation(format!(
                            "determinant primes at ({}, {}) depend on the selection order: {} vs {}",
                            g.format(x),
                            g.format(b.z),
                            b.det,
                            b.reversed_det
                        )));
                    }
                    entries.push(BadPrimeEntry {
                        x: g.format(x),
                        word: CoxeterGroup::format_word(&proj.word),
                        z: g.format(b.z),
                        multiplicity: b.multiplicity,
                        det: b.det.to_string(),
                        reversed_det: b.reversed_det.to_string(),
                        primes: det_primes(&b.det),
                        leaves: b.selected.iter().map(|(i, j)| format!("i={} j={}", bits_string(i), bits_string(j))).collect(),
                    });
                }
                Ok((entries, flags))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::new();
        let mut flags = vec!["characteristic 2 excluded".to_string()];
        for (e, f) in per_element {
            entries.extend(e);
            flags.extend(f);
        }
        let d: BTreeSet<u64> = entries.iter().flat_map(|e| e.primes.iter().copied()).collect();
        Ok(BadPrimeReport {
            datum: g.datum().label().to_string(),
            region_top: top.map(|t| g.format(t)),
            region_size: region.len(),
            entries,
            d: d.into_iter().collect(),
            flags,
        })
    }
}
