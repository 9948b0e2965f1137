//! Picard lattices of rational surfaces under iterated blow-ups.
//!
//! A [`SurfaceModel`] is a basis of the Picard lattice of a smooth rational
//! surface together with its intersection matrix, the canonical class, and
//! a dictionary of named divisor classes. Blowing up a point appends an
//! orthogonal exceptional class `E` with `E . E = -1`, replaces the
//! canonical class `K` by `K + E`, and replaces every named class `C` by
//! its strict transform `C - m E`, where `m` is the multiplicity of the
//! named curve at the blown-up point as declared by the caller. The new
//! exceptional curve is itself tracked under its label, so later blow-ups
//! on top of it turn it into a strict transform with the correct
//! self-intersection.
//!
//! All bookkeeping is integral; rational vectors enter only downstream,
//! when contractions introduce fractional pullbacks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix;
use crate::rat::Rat;

/// Errors from lattice construction and lookups.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PicardError {
    #[error("label {0:?} is already in use")]
    DuplicateLabel(String),
    #[error("no tracked class named {0:?}")]
    UnknownClass(String),
    #[error("multiplicity of {name:?} must be nonnegative, got {mult}")]
    NegativeMultiplicity { name: String, mult: i64 },
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// The minimal rational surfaces used as blow-up bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseSurface {
    /// The plane; basis `H` (a line), `K = -3H`.
    ProjectivePlane,
    /// A smooth quadric; basis `e`, `f` (the two rulings), `K = -2e - 2f`.
    Quadric,
    /// The Hirzebruch surface with a section `e` of self-intersection
    /// `-n` and fiber `f`; `K = -2e - (n + 2) f`.
    Hirzebruch { n: u32 },
}

/// An integral divisor class in the coordinates of the current basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn to_rat(&self) -> Vec<Rat> {
        self.0.iter().map(|&c| Rat::int(c)).collect()
    }

    pub fn plus(&self, other: &DivisorClass) -> DivisorClass {
        assert!(self.len() == other.len(), "class lengths must agree");
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &DivisorClass) -> DivisorClass {
        assert!(self.len() == other.len(), "class lengths must agree");
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn times(&self, scalar: i64) -> DivisorClass {
        DivisorClass(self.0.iter().map(|&c| c * scalar).collect())
    }
}

/// One blow-up: the label of the new exceptional curve and the
/// multiplicities of the tracked curves at the blown-up point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowUpRecord {
    pub label: String,
    #[serde(default)]
    pub centers: BTreeMap<String, i64>,
}

/// Construction script for a surface: a base, classes to track on the
/// base, and a sequence of blow-ups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceScript {
    pub base: BaseSurface,
    #[serde(default)]
    pub track: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub blow_ups: Vec<BlowUpRecord>,
}

/// The Picard lattice of a smooth rational surface with named classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub base: BaseSurface,
    pub basis: Vec<String>,
    pub gram: Vec<Vec<i64>>,
    pub canonical: DivisorClass,
    pub tracked: BTreeMap<String, DivisorClass>,
    pub history: Vec<BlowUpRecord>,
}

impl SurfaceModel {
    pub fn projective_plane() -> Self {
        SurfaceModel {
            base: BaseSurface::ProjectivePlane,
            basis: vec!["H".to_string()],
            gram: vec![vec![1]],
            canonical: DivisorClass(vec![-3]),
            tracked: BTreeMap::new(),
            history: Vec::new(),
        }
    }

    pub fn quadric() -> Self {
        SurfaceModel {
            base: BaseSurface::Quadric,
            basis: vec!["e".to_string(), "f".to_string()],
            gram: vec![vec![0, 1], vec![1, 0]],
            canonical: DivisorClass(vec![-2, -2]),
            tracked: BTreeMap::new(),
            history: Vec::new(),
        }
    }

    pub fn hirzebruch(n: u32) -> Self {
        SurfaceModel {
            base: BaseSurface::Hirzebruch { n },
            basis: vec!["e".to_string(), "f".to_string()],
            gram: vec![vec![-(n as i64), 1], vec![1, 0]],
            canonical: DivisorClass(vec![-2, -(n as i64) - 2]),
            tracked: BTreeMap::new(),
            history: Vec::new(),
        }
    }

    pub fn base(base: BaseSurface) -> Self {
        match base {
            BaseSurface::ProjectivePlane => Self::projective_plane(),
            BaseSurface::Quadric => Self::quadric(),
            BaseSurface::Hirzebruch { n } => Self::hirzebruch(n),
        }
    }

    /// Builds a surface from a script: base, tracked classes, blow-ups.
    pub fn from_script(script: &SurfaceScript) -> Result<Self, PicardError> {
        let mut s = Self::base(script.base);
        for (name, coeffs) in &script.track {
            s.track(name, DivisorClass(coeffs.clone()))?;
        }
        for record in &script.blow_ups {
            s.blow_up(&record.label, &record.centers)?;
        }
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    fn check_len(&self, class: &DivisorClass) -> Result<(), PicardError> {
        if class.len() != self.rank() {
            Err(PicardError::LengthMismatch { got: class.len(), expected: self.rank() })
        } else {
            Ok(())
        }
    }

    /// Starts tracking `class` under `name`.
    pub fn track(&mut self, name: &str, class: DivisorClass) -> Result<(), PicardError> {
        self.check_len(&class)?;
        if self.tracked.contains_key(name) {
            return Err(PicardError::DuplicateLabel(name.to_string()));
        }
        self.tracked.insert(name.to_string(), class);
        Ok(())
    }

    /// Replaces the class tracked under `name`.
    pub fn set_tracked(&mut self, name: &str, class: DivisorClass) -> Result<(), PicardError> {
        self.check_len(&class)?;
        if !self.tracked.contains_key(name) {
            return Err(PicardError::UnknownClass(name.to_string()));
        }
        self.tracked.insert(name.to_string(), class);
        Ok(())
    }

    pub fn tracked_class(&self, name: &str) -> Result<&DivisorClass, PicardError> {
        self.tracked.get(name).ok_or_else(|| PicardError::UnknownClass(name.to_string()))
    }

    /// Blows up a point. `centers` assigns to each tracked curve its
    /// multiplicity at the point (curves not mentioned have multiplicity
    /// zero). The exceptional curve is tracked under `label`.
    pub fn blow_up(&mut self, label: &str, centers: &BTreeMap<String, i64>) -> Result<(), PicardError> {
        if self.tracked.contains_key(label) || self.basis.iter().any(|b| b == label) {
            return Err(PicardError::DuplicateLabel(label.to_string()));
        }
        for (name, &mult) in centers {
            if !self.tracked.contains_key(name) {
                return Err(PicardError::UnknownClass(name.clone()));
            }
            if mult < 0 {
                return Err(PicardError::NegativeMultiplicity { name: name.clone(), mult });
            }
        }
        let old_k_squared = self.k_squared();
        let n = self.rank();
        for row in &mut self.gram {
            row.push(0);
        }
        let mut new_row = vec![0; n + 1];
        new_row[n] = -1;
        self.gram.push(new_row);
        self.basis.push(label.to_string());
        self.canonical.0.push(1);
        for (name, class) in self.tracked.iter_mut() {
            let mult = centers.get(name).copied().unwrap_or(0);
            class.0.push(-mult);
        }
        let mut exceptional = vec![0; n + 1];
        exceptional[n] = 1;
        self.tracked.insert(label.to_string(), DivisorClass(exceptional));
        self.history.push(BlowUpRecord {
            label: label.to_string(),
            centers: centers.clone(),
        });
        debug_assert!(self.k_squared() == old_k_squared - 1, "each blow-up drops K^2 by one");
        debug_assert!(self.det_gram().abs() == 1, "the lattice stays unimodular");
        Ok(())
    }

    /// Intersection number of two integral classes.
    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> i64 {
        assert!(a.len() == self.rank() && b.len() == self.rank(), "class lengths must match the rank");
        let mut total: i128 = 0;
        for (i, &ai) in a.0.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.0.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                total += ai as i128 * self.gram[i][j] as i128 * bj as i128;
            }
        }
        i64::try_from(total).expect("intersection number fits in i64")
    }

    /// Whether two classes are linearly equivalent. On the simply
    /// connected rational surfaces modelled here, linear and numerical
    /// equivalence both coincide with equality of coordinates in the
    /// chosen basis, so this is exact coefficient equality.
    pub fn is_linearly_equivalent(
        &self,
        a: &DivisorClass,
        b: &DivisorClass,
    ) -> Result<bool, PicardError> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(a == b)
    }

    /// Intersection number of two rational classes.
    pub fn intersect_rat(&self, a: &[Rat], b: &[Rat]) -> Rat {
        assert!(a.len() == self.rank() && b.len() == self.rank(), "class lengths must match the rank");
        let mut total = Rat::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                total += ai * &Rat::int(self.gram[i][j]) * bj;
            }
        }
        total
    }

    pub fn k_squared(&self) -> i64 {
        self.intersect(&self.canonical, &self.canonical)
    }

    /// Determinant of the intersection matrix (always plus or minus one
    /// here, since blow-ups preserve unimodularity).
    pub fn det_gram(&self) -> i64 {
        let rat_gram: Vec<Vec<Rat>> = self
            .gram
            .iter()
            .map(|row| row.iter().map(|&x| Rat::int(x)).collect())
            .collect();
        matrix::determinant(&rat_gram)
            .to_i64()
            .expect("integer matrix has integer determinant")
    }

    /// Arithmetic genus of a curve in class `c` by adjunction:
    /// `g = (c.c + K.c)/2 + 1`.
    pub fn adjunction_genus(&self, c: &DivisorClass) -> Rat {
        let cc = self.intersect(c, c);
        let kc = self.intersect(&self.canonical, c);
        Rat::new(cc + kc, 2) + Rat::one()
    }

    /// The classes tracked under `names`, as rational column vectors.
    pub fn tracked_columns(&self, names: &[&str]) -> Result<Vec<Vec<Rat>>, PicardError> {
        names.iter().map(|n| Ok(self.tracked_class(n)?.to_rat())).collect()
    }

    /// Writes `target` in the basis `names` of tracked classes, when the
    /// expression exists and is unique.
    pub fn express_in_tracked(&self, names: &[&str], target: &[Rat]) -> Result<Option<Vec<Rat>>, PicardError> {
        let columns = self.tracked_columns(names)?;
        Ok(matrix::express(&columns, target))
    }

    /// Human-readable form of a class, like `5H - E1 - 2E2`.
    pub fn format_class(&self, c: &DivisorClass) -> String {
        assert!(c.len() == self.rank(), "class length must match the rank");
        let mut out = String::new();
        for (coeff, label) in c.0.iter().zip(&self.basis) {
            if *coeff == 0 {
                continue;
            }
            if out.is_empty() {
                if *coeff < 0 {
                    out.push('-');
                }
            } else if *coeff < 0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = coeff.unsigned_abs();
            if mag != 1 {
                out.push_str(&mag.to_string());
            }
            out.push_str(label);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}
