use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::group::{CoxeterGroup, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::Scalar;

/// The Bruhat interval `{w : w <= top}` sorted by length then ShortLex.
/// For a finite complete group the default top is the longest element.
pub fn w_circle(g: &CoxeterGroup, top: Option<Element>) -> Result<Vec<Element>> {
    let top = match top {
        Some(t) => t,
        None if g.is_complete() => Element((g.size() - 1) as u32),
        None => return Err(Error::MissingTop),
    };
    let region: Vec<Element> = g.elements().filter(|&w| g.bruhat_leq(w, top)).collect();
    check_closed(g, &region)?;
    Ok(region)
}

/// All elements of length at most `max_len`.
pub fn region_up_to_length(g: &CoxeterGroup, max_len: usize) -> Result<Vec<Element>> {
    if g.bound().is_some_and(|b| b < max_len) {
        return Err(Error::OutsideRegion(g.bound().unwrap()));
    }
    Ok(g.elements().filter(|&w| g.length(w) <= max_len).collect())
}

fn check_closed(g: &CoxeterGroup, region: &[Element]) -> Result<()> {
    let set: HashSet<Element> = region.iter().copied().collect();
    for &w in region {
        for s in 0..g.rank() {
            if g.is_right_descent(w, s) && !set.contains(&g.right_mul(w, s)?) {
                return Err(Error::TheoryViolation(format!("region not closed below {}", g.format(w))));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizationReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

fn to_matrix(d: usize, m: &[i64]) -> Matrix {
    (0..d).map(|i| (0..d).map(|j| Scalar::from_int(m[i * d + j])).collect()).collect()
}

/// Matrix of `x` acting on `V` (contragredient of the action on `V*`).
fn matrix_on_v(g: &CoxeterGroup, x: Element) -> Matrix {
    let d = g.datum().dim();
    linalg::transpose(&to_matrix(d, g.matrix(g.inverse(x))))
}

fn mul_i64(d: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; d * d];
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                out[i * d + j] += a[i * d + k] * b[k * d + j];
            }
        }
    }
    out
}

/// Checks that the realization is reflection faithful on `region`:
/// `dim ker(x - y) = dim V - 1` exactly when `x^-1 y` is a reflection, and no
/// two distinct `x, z` meet a third `y` in the same hyperplane.
pub fn validate_realization(g: &CoxeterGroup, region: &[Element]) -> RealizationReport {
    let d = g.datum().dim();
    // Reflections as matrices: conjugates u s u^-1 over the enumerated group.
    let mut reflections: HashSet<Vec<i64>> = HashSet::new();
    for u in g.elements() {
        let mu = g.matrix(u);
        let mui = g.matrix(g.inverse(u));
        for s in 0..g.rank() {
            let ms = g.datum().reflection_matrix(s);
            reflections.insert(mul_i64(d, &mul_i64(d, mu, &ms), mui));
        }
    }
    let on_v: HashMap<Element, Matrix> = region.iter().map(|&x| (x, matrix_on_v(g, x))).collect();
    let mut failures = Vec::new();
    let mut pairs = 0;
    // hyperplanes[y] maps a canonical kernel basis to the x that produced it.
    let mut hyperplanes: HashMap<Element, HashMap<Vec<String>, Element>> = HashMap::new();
    for (a, &x) in region.iter().enumerate() {
        for &y in &region[a + 1..] {
            pairs += 1;
            let diff: Matrix = on_v[&x]
                .iter()
                .zip(&on_v[&y])
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(p, q)| p - q).collect())
                .collect();
            let ker = linalg::kernel(&diff, d);
            let codim_one = ker.len() + 1 == d;
            let z = mul_i64(d, g.matrix(g.inverse(x)), g.matrix(y));
            let is_reflection = reflections.contains(&z);
            if codim_one != is_reflection {
                failures.push(format!(
                    "x = {}, y = {}: kernel dimension {} but x^-1 y {} a reflection",
                    g.format(x),
                    g.format(y),
                    ker.len(),
                    if is_reflection { "is" } else { "is not" }
                ));
            }
            if codim_one {
                let key: Vec<String> = ker.iter().flatten().map(Scalar::to_string).collect();
                for (p, q) in [(x, y), (y, x)] {
                    if let Some(prev) = hyperplanes.entry(q).or_default().insert(key.clone(), p) {
                        failures.push(format!(
                            "{} and {} meet {} in the same hyperplane",
                            g.format(prev),
                            g.format(p),
                            g.format(q)
                        ));
                    }
                }
            }
        }
    }
    RealizationReport { passed: failures.is_empty(), pairs_checked: pairs, failures }
}
