//! Cyclic quotient singularities and their continued fractions.
//!
//! A two-dimensional cyclic quotient singularity of type `1/r(1, a)` (the
//! quotient of the plane by `(x, y) -> (zeta x, zeta^a y)` for a primitive
//! r-th root of unity, with `0 < a < r` and `gcd(r, a) = 1`) is resolved by
//! a chain of rational curves whose self-intersections `-c1, ..., -ck` are
//! read off the expansion
//!
//! ```text
//! r/a = c1 - 1/(c2 - 1/(... - 1/ck)),   ci >= 2.
//! ```
//!
//! This module computes that expansion and its inverse, decides when the
//! singularity admits a smoothing with no local obstruction (the class-T
//! condition `r = d p^2 q`-free form `1/(p^2 q)(1, d p q - 1)` with
//! `gcd(d, p) = 1`), produces the index-one cover data, evaluates log
//! canonical thresholds of plane cusps `y^p = x^q`, and transfers
//! singularity lists through a double cover branched over a curve.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::Rat;

/// Errors from the quotient-singularity routines.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HjError {
    #[error("quotient type 1/{r}(1,{a}) requires 0 < a < r and gcd(r, a) = 1")]
    InvalidQuotientParams { r: u64, a: u64 },
    #[error("continued-fraction chains need every entry at least 2, got {entry}")]
    ChainEntryTooSmall { entry: u64 },
    #[error("continued-fraction chain is empty")]
    EmptyChain,
    #[error("class-T data (p, q, d) = ({p}, {q}, {d}) requires p >= 2, q >= 1, 1 <= d < p, gcd(d, p) = 1")]
    InvalidClassTData { p: u64, q: u64, d: u64 },
    #[error("cusp exponents ({p}, {q}) must both be at least 2")]
    InvalidCuspExponents { p: u64, q: u64 },
    #[error("double cover of 1/{r}(1,{a}) not supported: index {index} exceeds two")]
    CoverIndexTooLarge { r: u64, a: u64, index: u64 },
    #[error("double cover of 1/{r}(1,{a}) not supported: not du Val and not class T")]
    CoverUndefined { r: u64, a: u64 },
    #[error("curve singularity {0} is not of type A, cannot transfer through the cover")]
    CurveSingularityUnsupported(String),
}

fn validate_quotient(r: u64, a: u64) -> Result<(), HjError> {
    if a == 0 || a >= r || r.gcd(&a) != 1 {
        Err(HjError::InvalidQuotientParams { r, a })
    } else {
        Ok(())
    }
}

/// Expands `r/a` into its minus-sign continued fraction `[c1, ..., ck]`,
/// the self-intersection chain of the minimal resolution of `1/r(1, a)`.
pub fn hj_expand(r: u64, a: u64) -> Result<Vec<u64>, HjError> {
    validate_quotient(r, a)?;
    let (mut r, mut a) = (r, a);
    let mut chain = Vec::new();
    while a > 0 {
        let c = r.div_ceil(a);
        chain.push(c);
        let next = c * a - r;
        r = a;
        a = next;
    }
    debug_assert!(r == 1, "coprime input must terminate at 1, got {r}");
    debug_assert!(chain.iter().all(|&c| c >= 2), "all entries are >= 2 by construction");
    Ok(chain)
}

/// Evaluates a chain `[c1, ..., ck]` back to the fraction `r/a`.
pub fn hj_contract(chain: &[u64]) -> Result<(u64, u64), HjError> {
    if chain.is_empty() {
        return Err(HjError::EmptyChain);
    }
    if let Some(&entry) = chain.iter().find(|&&c| c < 2) {
        return Err(HjError::ChainEntryTooSmall { entry });
    }
    // Fold from the right: x := c - 1/x. Every partial value exceeds 1, so
    // the reciprocal below never divides by zero.
    let mut x = Rat::int(chain[chain.len() - 1] as i64);
    for &c in chain[..chain.len() - 1].iter().rev() {
        x = Rat::int(c as i64) - x.recip();
    }
    let r = x.numer().to_u64().expect("numerator fits in u64");
    let a = x.denom().to_u64().expect("denominator fits in u64");
    Ok((r, a))
}

/// How a cyclic quotient singularity sits relative to deformation theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ClassTResult {
    /// The Gorenstein case `a = r - 1`, a rational double point of type A.
    DuVal { n: u64 },
    /// `1/(p^2 q)(1, d p q - 1)` with `gcd(d, p) = 1`: admits a
    /// Q-Gorenstein smoothing.
    T { p: u64, q: u64, d: u64 },
    /// Neither du Val nor class T.
    NotT,
}

/// Decides whether `1/r(1, a)` is du Val, class T, or neither.
pub fn classify_class_t(r: u64, a: u64) -> Result<ClassTResult, HjError> {
    validate_quotient(r, a)?;
    if a == r - 1 {
        return Ok(ClassTResult::DuVal { n: a });
    }
    let mut p = 2;
    while p * p <= r {
        if r % (p * p) == 0 {
            let q = r / (p * p);
            if (a + 1) % (p * q) == 0 {
                let d = (a + 1) / (p * q);
                if d >= 1 && d < p && d.gcd(&p) == 1 {
                    return Ok(ClassTResult::T { p, q, d });
                }
            }
        }
        p += 1;
    }
    Ok(ClassTResult::NotT)
}

/// Gorenstein index of `1/r(1, a)`: the smallest m with m K Cartier,
/// which for a cyclic quotient is `r / gcd(r, a + 1)`.
pub fn gorenstein_index(r: u64, a: u64) -> Result<u64, HjError> {
    validate_quotient(r, a)?;
    Ok(r / r.gcd(&(a + 1)))
}

/// The index-one cover data of a class-T singularity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalCover {
    /// The du Val singularity upstairs.
    pub cover: SingularityType,
    /// Weights of the residual cyclic action on the cover coordinates.
    pub weights: [u64; 3],
}

/// Index-one cover of the class-T singularity `1/(p^2 q)(1, d p q - 1)`:
/// the du Val point `A_{pq-1}` with the order-p action of the stated
/// weights on its three defining coordinates.
pub fn canonical_cover(p: u64, q: u64, d: u64) -> Result<CanonicalCover, HjError> {
    if p < 2 || q < 1 || d < 1 || d >= p || d.gcd(&p) != 1 {
        return Err(HjError::InvalidClassTData { p, q, d });
    }
    Ok(CanonicalCover {
        cover: SingularityType::A { n: p * q - 1 },
        weights: [1, p - 1, d % p],
    })
}

/// Log canonical threshold of the plane cusp `y^p = x^q` at the origin:
/// `1/p + 1/q` (both exponents at least 2).
pub fn lct_cusp(p: u64, q: u64) -> Result<Rat, HjError> {
    if p < 2 || q < 2 {
        return Err(HjError::InvalidCuspExponents { p, q });
    }
    Ok(Rat::new(1, p as i64) + Rat::new(1, q as i64))
}

/// A surface singularity germ, or a curve singularity germ of type A.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SingularityType {
    /// Du Val point of type `A_n` (as a curve germ: the singularity
    /// `y^2 = x^{n+1}`).
    #[serde(rename = "A")]
    A { n: u64 },
    /// Cyclic quotient `1/r(1, a)` that is not du Val.
    Quotient { r: u64, a: u64 },
    /// Simple elliptic point; `degree` is minus the self-intersection of
    /// the exceptional elliptic curve when known.
    SimpleElliptic { degree: Option<u64> },
}

impl std::fmt::Display for SingularityType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SingularityType::A { n } => write!(f, "A{n}"),
            SingularityType::Quotient { r, a } => write!(f, "1/{r}(1,{a})"),
            SingularityType::SimpleElliptic { degree: Some(d) } => write!(f, "elliptic({d})"),
            SingularityType::SimpleElliptic { degree: None } => write!(f, "elliptic"),
        }
    }
}

/// Sorts a singularity list into the canonical reporting order: quotient
/// points first (larger order first), then type A points (larger index
/// first), then simple elliptic points.
pub fn canonical_order(list: &mut [SingularityType]) {
    fn key(s: &SingularityType) -> (u8, i64, i64) {
        match s {
            SingularityType::Quotient { r, a } => (0, -(*r as i64), -(*a as i64)),
            SingularityType::A { n } => (1, -(*n as i64), 0),
            SingularityType::SimpleElliptic { degree } => {
                (2, -degree.map_or(-1, |d| d as i64), 0)
            }
        }
    }
    list.sort_by_key(key);
}

/// Transfers singularities through a double cover branched over a curve.
///
/// Input: the singularities of the surface (assumed disjoint from the
/// branch curve except as forced below) and the type-A singularities of
/// the branch curve at smooth surface points. Rules:
///
/// - a du Val `A_n` of the surface lies off the branch curve and has two
///   preimages, contributing two copies of `A_n`;
/// - a quotient point of index one (du Val written as `1/r(1, r-1)`)
///   likewise contributes two copies of `A_{r-1}`;
/// - a class-T quotient point of index two sits on the branch locus and
///   lifts to its index-one cover, a single `A_{pq-1}`;
/// - class-T points of higher index and unclassifiable quotients are
///   rejected;
/// - a simple elliptic point lifts to a single simple elliptic point of
///   unrecorded degree;
/// - a curve singularity `A_n` at a smooth surface point becomes one
///   surface singularity `A_n` upstairs.
pub fn double_cover_singularities(
    surface: &[SingularityType],
    curve: &[SingularityType],
) -> Result<Vec<SingularityType>, HjError> {
    let mut out = Vec::new();
    for s in surface {
        match s {
            SingularityType::A { n } => {
                out.push(SingularityType::A { n: *n });
                out.push(SingularityType::A { n: *n });
            }
            SingularityType::Quotient { r, a } => match classify_class_t(*r, *a)? {
                ClassTResult::DuVal { n } => {
                    out.push(SingularityType::A { n });
                    out.push(SingularityType::A { n });
                }
                ClassTResult::T { p, q, d } => {
                    if p != 2 {
                        return Err(HjError::CoverIndexTooLarge { r: *r, a: *a, index: p });
                    }
                    out.push(canonical_cover(p, q, d)?.cover);
                }
                ClassTResult::NotT => {
                    return Err(HjError::CoverUndefined { r: *r, a: *a });
                }
            },
            SingularityType::SimpleElliptic { .. } => {
                out.push(SingularityType::SimpleElliptic { degree: None });
            }
        }
    }
    for c in curve {
        match c {
            SingularityType::A { n } => out.push(SingularityType::A { n: *n }),
            other => {
                return Err(HjError::CurveSingularityUnsupported(other.to_string()));
            }
        }
    }
    canonical_order(&mut out);
    Ok(out)
}
