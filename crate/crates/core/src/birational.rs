//! Contractions of negative curves and numerical pullback.
//!
//! A contraction plan groups tracked rational curves on a smooth surface
//! into connected components, each of which is blown down to a point:
//!
//! - a single curve of self-intersection `-1` contracts to a smooth point;
//! - a chain of curves with self-intersections `-c1, ..., -ck`, all
//!   `ci >= 2` and consecutive curves meeting once, contracts to the
//!   cyclic quotient point `1/r(1, a)` with `r/a = [c1, ..., ck]` in the
//!   minus-sign continued fraction (the all-2 case is the du Val point
//!   `A_k`).
//!
//! The canonical class of the singular surface below pulls back to
//! `K + sum d_i E_i`, where the `d_i` solve the linear system making the
//! pullback orthogonal to every contracted curve. The same orthogonality
//! defines the numerical pullback of any divisor class from below, which
//! in turn gives exact intersection numbers downstairs and a Nakai-type
//! ampleness test against a declared set of tester curves.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hjsing::{self, SingularityType};
use crate::matrix;
use crate::picard::{DivisorClass, PicardError, SurfaceModel};
use crate::rat::Rat;

/// Errors from contraction plans and downstairs computations.
#[derive(Debug, Error, PartialEq)]
pub enum BirationalError {
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error("curve {0:?} appears more than once in the contraction plan")]
    DuplicateCurve(String),
    #[error("curves {a:?} and {b:?} meet {value} times; chains allow only 0 or 1")]
    BadPairing { a: String, b: String, value: i64 },
    #[error("curves {a:?} and {b:?} lie in different plan components but meet")]
    ComponentsMeet { a: String, b: String },
    #[error("curve {0:?} has genus {1}, only rational curves contract here")]
    NotRational(String, Rat),
    #[error("component {component:?} is not a chain: curve {curve:?} meets {degree} other curves of the component")]
    NotAChain { component: String, curve: String, degree: usize },
    #[error("component {0:?} is not connected")]
    Disconnected(String),
    #[error("curve {name:?} has self-intersection {self_int}: {reason}")]
    BadSelfIntersection { name: String, self_int: i64, reason: &'static str },
    #[error("class expression names the contracted curve {0:?}, which does not descend")]
    ContractedTerm(String),
    #[error("contraction plan has an empty entry")]
    EmptyPlanEntry,
    #[error("cannot parse class expression {input:?}: {reason}")]
    BadClassExpr { input: String, reason: String },
}

/// A rational combination `k * K + sum of named tracked curves`.
///
/// Inside [`ContractedSurface::pullback`] the combination is read on the
/// contracted surface: `K` means the canonical class downstairs and each
/// name means the image of that tracked curve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassExpr {
    #[serde(default)]
    pub k: Rat,
    #[serde(default)]
    pub terms: BTreeMap<String, Rat>,
}

impl ClassExpr {
    /// The multiple `c * K` of the canonical class.
    pub fn canonical(c: i64) -> Self {
        ClassExpr { k: Rat::int(c), terms: BTreeMap::new() }
    }

    /// The class of a single named curve.
    pub fn of(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.to_string(), Rat::one());
        ClassExpr { k: Rat::zero(), terms }
    }

    /// Adds `coeff` times the named curve.
    pub fn with(mut self, name: &str, coeff: i64) -> Self {
        let entry = self.terms.entry(name.to_string()).or_insert_with(Rat::zero);
        *entry += Rat::int(coeff);
        if entry.is_zero() {
            self.terms.remove(name);
        }
        self
    }

    /// Evaluates the expression in the resolution lattice (here `K` is the
    /// canonical class of the smooth surface itself).
    pub fn evaluate(&self, surface: &SurfaceModel) -> Result<Vec<Rat>, BirationalError> {
        let mut v: Vec<Rat> = surface
            .canonical()
            .to_rat()
            .into_iter()
            .map(|c| &self.k * &c)
            .collect();
        for (name, coeff) in &self.terms {
            let class = surface.tracked_class(name)?;
            for (slot, c) in v.iter_mut().zip(class.coeffs()) {
                *slot += coeff * &Rat::int(*c);
            }
        }
        Ok(v)
    }

    /// Parses expressions like `-2K + 3D - F5` or `1/2K`. Terms are a sign,
    /// an optional rational coefficient, an optional `*`, and a name; the
    /// name `K` denotes the canonical class.
    pub fn parse(input: &str) -> Result<Self, BirationalError> {
        let bad = |reason: &str| BirationalError::BadClassExpr {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty expression"));
        }
        let chars: Vec<char> = compact.chars().collect();
        let mut pos = 0usize;
        let mut expr = ClassExpr::default();
        while pos < chars.len() {
            let mut sign = Rat::one();
            while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
                if chars[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let digits_from = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let mut coeff = if pos > digits_from {
                let numer: String = chars[digits_from..pos].iter().collect();
                if pos < chars.len() && chars[pos] == '/' && chars.get(pos + 1).is_some_and(|c| c.is_ascii_digit()) {
                    pos += 1;
                    let den_from = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let denom: String = chars[den_from..pos].iter().collect();
                    format!("{numer}/{denom}").parse::<Rat>().map_err(|e| bad(&e))?
                } else {
                    numer.parse::<Rat>().map_err(|e| bad(&e))?
                }
            } else {
                Rat::one()
            };
            coeff *= sign;
            if pos < chars.len() && chars[pos] == '*' {
                pos += 1;
            }
            let name_from = pos;
            while pos < chars.len() && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_') {
                pos += 1;
            }
            if pos == name_from {
                return Err(bad("expected a curve name (or K) after the coefficient"));
            }
            let name: String = chars[name_from..pos].iter().collect();
            if name == "K" {
                expr.k += coeff;
            } else {
                let entry = expr.terms.entry(name).or_insert_with(Rat::zero);
                *entry += coeff;
            }
        }
        expr.terms.retain(|_, c| !c.is_zero());
        Ok(expr)
    }
}

/// Parses a contraction plan like `e,G1,G2;f`: semicolons separate
/// components, commas separate the curves of a component.
pub fn parse_plan(input: &str) -> Result<Vec<Vec<String>>, BirationalError> {
    let mut plan = Vec::new();
    for component in input.split(';') {
        let curves: Vec<String> = component
            .split(',')
            .map(|c| c.trim().to_string())
            .collect();
        if curves.iter().any(String::is_empty) {
            return Err(BirationalError::EmptyPlanEntry);
        }
        plan.push(curves);
    }
    Ok(plan)
}

/// What one connected component of a plan contracts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContractionTarget {
    SmoothPoint,
    DuVal { n: u64 },
    Quotient { r: u64, a: u64 },
}

impl ContractionTarget {
    /// The singularity produced, if any.
    pub fn singularity(&self) -> Option<SingularityType> {
        match *self {
            ContractionTarget::SmoothPoint => None,
            ContractionTarget::DuVal { n } => Some(SingularityType::A { n }),
            ContractionTarget::Quotient { r, a } => Some(SingularityType::Quotient { r, a }),
        }
    }

    /// The order and residue `(r, a)` of the cyclic point, with du Val
    /// `A_n` written as `1/(n+1)(1, n)`.
    pub fn quotient_data(&self) -> Option<(u64, u64)> {
        match *self {
            ContractionTarget::SmoothPoint => None,
            ContractionTarget::DuVal { n } => Some((n + 1, n)),
            ContractionTarget::Quotient { r, a } => Some((r, a)),
        }
    }
}

/// One contracted component with its exact numerical data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractedComponent {
    /// Curves in chain order, oriented from the endpoint listed first.
    pub curves: Vec<String>,
    pub self_intersections: Vec<i64>,
    pub target: ContractionTarget,
    /// Coefficients `d_i` in `pullback(K) = K + sum d_i E_i`.
    pub discrepancies: Vec<Rat>,
    /// This component's contribution `sum d_i (K . E_i)` to the canonical
    /// degree downstairs.
    pub k_squared_delta: Rat,
}

/// A smooth surface together with a contraction of some of its curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractedSurface {
    pub surface: SurfaceModel,
    pub components: Vec<ContractedComponent>,
    /// Canonical degree of the contracted surface.
    pub k_squared_down: Rat,
    /// Picard rank of the contracted surface.
    pub rank_down: usize,
}

/// How a class pairs against the declared tester curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Ampleness {
    /// Positive square and strictly positive against every tester.
    Ample,
    /// Nonnegative against every tester, but not ample: either some tester
    /// pairs to zero or the square is not positive.
    NefNotAmple { zero_against: Vec<String> },
    /// Strictly negative against some tester.
    NotNef { negative_against: Vec<String> },
}

/// Every verdict is relative to the supplied testers: a positive verdict
/// certifies positivity against that finite set only.
pub const AMPLENESS_SCOPE: &str = "relative-to-tester-set";

/// Result of the ampleness test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplenessReport {
    #[serde(flatten)]
    pub verdict: Ampleness,
    /// Self-intersection of the tested class downstairs.
    pub square: Rat,
    pub scope: &'static str,
}

/// Contracts the plan's components on `surface`.
///
/// Every plan curve must be tracked, rational, and negative; components
/// must be pairwise disjoint chains as described in the module docs.
pub fn contract(
    surface: &SurfaceModel,
    plan: &[Vec<String>],
) -> Result<ContractedSurface, BirationalError> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for name in plan.iter().flatten() {
        if !seen.insert(name) {
            return Err(BirationalError::DuplicateCurve(name.clone()));
        }
    }
    let mut classes: BTreeMap<&str, &DivisorClass> = BTreeMap::new();
    for name in plan.iter().flatten() {
        let class = surface.tracked_class(name)?;
        let genus = surface.adjunction_genus(class);
        if !genus.is_zero() {
            return Err(BirationalError::NotRational(name.clone(), genus));
        }
        classes.insert(name, class);
    }

    let placed: Vec<(&String, usize)> = plan
        .iter()
        .enumerate()
        .flat_map(|(ci, comp)| comp.iter().map(move |n| (n, ci)))
        .collect();
    for i in 0..placed.len() {
        for j in i + 1..placed.len() {
            let (a, ca) = placed[i];
            let (b, cb) = placed[j];
            let v = surface.intersect(classes[a.as_str()], classes[b.as_str()]);
            if ca != cb {
                if v != 0 {
                    return Err(BirationalError::ComponentsMeet { a: a.clone(), b: b.clone() });
                }
            } else if v != 0 && v != 1 {
                return Err(BirationalError::BadPairing { a: a.clone(), b: b.clone(), value: v });
            }
        }
    }

    let mut components = Vec::new();
    let mut k_squared_down = Rat::int(surface.k_squared());
    for comp in plan {
        if comp.is_empty() {
            return Err(BirationalError::EmptyPlanEntry);
        }
        let ordered = order_chain(surface, comp, &classes)?;
        let selfs: Vec<i64> = ordered
            .iter()
            .map(|n| surface.intersect(classes[n.as_str()], classes[n.as_str()]))
            .collect();

        let target = if ordered.len() == 1 {
            match selfs[0] {
                -1 => ContractionTarget::SmoothPoint,
                s if s <= -2 => chain_target(&[(-s) as u64])?,
                s => {
                    return Err(BirationalError::BadSelfIntersection {
                        name: ordered[0].clone(),
                        self_int: s,
                        reason: "only curves of negative self-intersection contract",
                    })
                }
            }
        } else {
            if let Some(i) = selfs.iter().position(|&s| s > -2) {
                return Err(BirationalError::BadSelfIntersection {
                    name: ordered[i].clone(),
                    self_int: selfs[i],
                    reason: "chains must consist of curves of self-intersection at most -2",
                });
            }
            chain_target(&selfs.iter().map(|&s| (-s) as u64).collect::<Vec<_>>())?
        };

        // The component must be contractible at all: its intersection
        // matrix is negative definite for every target admitted above.
        let gram: Vec<Vec<Rat>> = ordered
            .iter()
            .map(|a| {
                ordered
                    .iter()
                    .map(|b| Rat::int(surface.intersect(classes[a.as_str()], classes[b.as_str()])))
                    .collect()
            })
            .collect();
        assert!(
            matrix::signature(&gram) == (0, ordered.len(), 0),
            "contractible components have negative definite intersection matrices"
        );

        // Solve (K + sum d_i E_i) . E_j = 0 for the d_i.
        let rhs: Vec<Rat> = ordered
            .iter()
            .map(|n| Rat::int(-surface.intersect(surface.canonical(), classes[n.as_str()])))
            .collect();
        let discrepancies = matrix::solve_square(&gram, &rhs)
            .expect("negative definite systems are invertible");
        if let ContractionTarget::DuVal { .. } = target {
            debug_assert!(
                discrepancies.iter().all(Rat::is_zero),
                "du Val points are crepant"
            );
        }

        let mut delta = Rat::zero();
        for (d, n) in discrepancies.iter().zip(&ordered) {
            delta += d * &Rat::int(surface.intersect(surface.canonical(), classes[n.as_str()]));
        }
        k_squared_down += &delta;

        components.push(ContractedComponent {
            curves: ordered,
            self_intersections: selfs,
            target,
            discrepancies,
            k_squared_delta: delta,
        });
    }

    let contracted_count: usize = components.iter().map(|c| c.curves.len()).sum();
    let cs = ContractedSurface {
        surface: surface.clone(),
        components,
        k_squared_down,
        rank_down: surface.rank() - contracted_count,
    };
    // Cross-check the discrepancy formula against the pullback square.
    let pb = cs.pullback_canonical();
    debug_assert!(
        cs.surface.intersect_rat(&pb, &pb) == cs.k_squared_down,
        "K^2 downstairs agrees with the pullback self-intersection"
    );
    Ok(cs)
}

fn chain_target(cs: &[u64]) -> Result<ContractionTarget, BirationalError> {
    let (r, a) = hjsing::hj_contract(cs).expect("entries at least 2 were checked");
    Ok(if a == r - 1 {
        ContractionTarget::DuVal { n: a }
    } else {
        ContractionTarget::Quotient { r, a }
    })
}

fn order_chain(
    surface: &SurfaceModel,
    comp: &[String],
    classes: &BTreeMap<&str, &DivisorClass>,
) -> Result<Vec<String>, BirationalError> {
    if comp.len() == 1 {
        return Ok(comp.to_vec());
    }
    let id = comp.join("+");
    let n = comp.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if surface.intersect(classes[comp[i].as_str()], classes[comp[j].as_str()]) == 1 {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for (i, neighbors) in adjacency.iter().enumerate() {
        if neighbors.len() > 2 {
            return Err(BirationalError::NotAChain {
                component: id,
                curve: comp[i].clone(),
                degree: neighbors.len(),
            });
        }
    }
    if adjacency.iter().any(Vec::is_empty) {
        return Err(BirationalError::Disconnected(id));
    }
    let endpoints: Vec<usize> = (0..n).filter(|&i| adjacency[i].len() == 1).collect();
    if endpoints.len() != 2 {
        // Zero endpoints means a cycle; more than two means the component
        // splits into several pieces.
        return if endpoints.is_empty() {
            Err(BirationalError::NotAChain {
                component: id,
                curve: comp[0].clone(),
                degree: adjacency[0].len(),
            })
        } else {
            Err(BirationalError::Disconnected(id))
        };
    }
    let start = endpoints.into_iter().min().expect("two endpoints exist");
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut here = start;
    while order.len() < n {
        let next = adjacency[here].iter().copied().find(|&x| x != prev);
        match next {
            Some(nx) => {
                order.push(nx);
                prev = here;
                here = nx;
            }
            None => return Err(BirationalError::Disconnected(id)),
        }
    }
    // A walk that visits n distinct curves along edges is the whole chain;
    // repeats would mean a cycle, which the endpoint count excludes.
    let mut unique: BTreeSet<usize> = order.iter().copied().collect();
    if unique.len() != n {
        return Err(BirationalError::Disconnected(id));
    }
    unique.clear();
    Ok(order.into_iter().map(|i| comp[i].clone()).collect())
}

impl ContractedSurface {
    /// Names of all contracted curves.
    pub fn contracted_names(&self) -> BTreeSet<&str> {
        self.components
            .iter()
            .flat_map(|c| c.curves.iter().map(String::as_str))
            .collect()
    }

    /// The singularities of the contracted surface, canonically ordered.
    pub fn singularities(&self) -> Vec<SingularityType> {
        let mut list: Vec<SingularityType> = self
            .components
            .iter()
            .filter_map(|c| c.target.singularity())
            .collect();
        hjsing::canonical_order(&mut list);
        list
    }

    /// `pullback(K_down) = K + sum d_i E_i` as a rational vector.
    pub fn pullback_canonical(&self) -> Vec<Rat> {
        let mut v = self.surface.canonical().to_rat();
        for comp in &self.components {
            for (d, name) in comp.discrepancies.iter().zip(&comp.curves) {
                let class = self
                    .surface
                    .tracked_class(name)
                    .expect("plan curves are tracked");
                for (slot, c) in v.iter_mut().zip(class.coeffs()) {
                    *slot += d * &Rat::int(*c);
                }
            }
        }
        v
    }

    /// Numerical pullback of a class from the contracted surface: the
    /// expression's value plus the unique exceptional correction that is
    /// orthogonal to every contracted curve.
    pub fn pullback(&self, expr: &ClassExpr) -> Result<Vec<Rat>, BirationalError> {
        let contracted = self.contracted_names();
        for name in expr.terms.keys() {
            if contracted.contains(name.as_str()) {
                return Err(BirationalError::ContractedTerm(name.clone()));
            }
        }
        // K part: the orthogonal extension of k * K is k * pullback(K).
        let mut v: Vec<Rat> = self
            .pullback_canonical()
            .into_iter()
            .map(|c| &expr.k * &c)
            .collect();
        for (name, coeff) in &expr.terms {
            let class = self.surface.tracked_class(name)?;
            for (slot, c) in v.iter_mut().zip(class.coeffs()) {
                *slot += coeff * &Rat::int(*c);
            }
        }
        // Correct component by component.
        for comp in &self.components {
            let classes: Vec<&DivisorClass> = comp
                .curves
                .iter()
                .map(|n| self.surface.tracked_class(n).expect("plan curves are tracked"))
                .collect();
            let gram: Vec<Vec<Rat>> = classes
                .iter()
                .map(|a| classes.iter().map(|b| Rat::int(self.surface.intersect(a, b))).collect())
                .collect();
            let rhs: Vec<Rat> = classes
                .iter()
                .map(|c| -self.surface.intersect_rat(&v, &c.to_rat()))
                .collect();
            if rhs.iter().all(Rat::is_zero) {
                continue;
            }
            let gamma = matrix::solve_square(&gram, &rhs)
                .expect("negative definite systems are invertible");
            for (g, class) in gamma.iter().zip(&classes) {
                for (slot, c) in v.iter_mut().zip(class.coeffs()) {
                    *slot += g * &Rat::int(*c);
                }
            }
        }
        debug_assert!(
            self.components.iter().flat_map(|c| &c.curves).all(|n| {
                let class = self.surface.tracked_class(n).expect("tracked");
                self.surface.intersect_rat(&v, &class.to_rat()).is_zero()
            }),
            "pullbacks are orthogonal to all contracted curves"
        );
        Ok(v)
    }

    /// Exact intersection number of two classes on the contracted surface.
    pub fn intersect_down(&self, a: &ClassExpr, b: &ClassExpr) -> Result<Rat, BirationalError> {
        let pa = self.pullback(a)?;
        let pb = self.pullback(b)?;
        Ok(self.surface.intersect_rat(&pa, &pb))
    }

    /// Tests positivity of `expr` downstairs against the tester curves.
    /// Contracted testers are skipped (they are not curves downstairs).
    pub fn is_ample(
        &self,
        expr: &ClassExpr,
        testers: &[String],
    ) -> Result<AmplenessReport, BirationalError> {
        let contracted = self.contracted_names();
        let p = self.pullback(expr)?;
        let square = self.surface.intersect_rat(&p, &p);
        let mut zero_against = Vec::new();
        let mut negative_against = Vec::new();
        for name in testers {
            if contracted.contains(name.as_str()) {
                continue;
            }
            let class = self.surface.tracked_class(name)?;
            let pairing = self.surface.intersect_rat(&p, &class.to_rat());
            if pairing.is_negative() {
                negative_against.push(name.clone());
            } else if pairing.is_zero() {
                zero_against.push(name.clone());
            }
        }
        let verdict = if !negative_against.is_empty() {
            Ampleness::NotNef { negative_against }
        } else if !zero_against.is_empty() || !square.is_positive() {
            Ampleness::NefNotAmple { zero_against }
        } else {
            Ampleness::Ample
        };
        Ok(AmplenessReport { verdict, square, scope: AMPLENESS_SCOPE })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centers(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
        pairs.iter().map(|(n, m)| (n.to_string(), *m)).collect()
    }

    fn plan(components: &[&[&str]]) -> Vec<Vec<String>> {
        components
            .iter()
            .map(|c| c.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn contracting_a_minus_one_curve_reaches_the_plane() {
        let mut s = SurfaceModel::projective_plane();
        s.blow_up("E1", &BTreeMap::new()).unwrap();
        let cs = contract(&s, &plan(&[&["E1"]])).unwrap();
        assert_eq!(cs.components[0].target, ContractionTarget::SmoothPoint);
        assert_eq!(cs.components[0].discrepancies, vec![Rat::int(-1)]);
        assert_eq!(cs.k_squared_down, Rat::int(9));
        assert_eq!(cs.rank_down, 1);
        assert!(cs.singularities().is_empty());
    }

    #[test]
    fn contracting_a_minus_four_line_gives_the_quarter_point() {
        // A line through five blown-up points has self-intersection -4.
        let mut s = SurfaceModel::projective_plane();
        s.track("l", DivisorClass(vec![1])).unwrap();
        s.track("D", DivisorClass(vec![5])).unwrap();
        for label in ["E1", "E2", "E3", "E4", "E5"] {
            s.blow_up(label, &centers(&[("l", 1), ("D", 1)])).unwrap();
        }
        let cs = contract(&s, &plan(&[&["l"]])).unwrap();
        assert_eq!(cs.components[0].self_intersections, vec![-4]);
        assert_eq!(cs.components[0].target, ContractionTarget::Quotient { r: 4, a: 1 });
        assert_eq!(cs.components[0].discrepancies, vec![Rat::new(1, 2)]);
        assert_eq!(cs.k_squared_down, Rat::int(5));
        assert_eq!(cs.singularities(), vec![SingularityType::Quotient { r: 4, a: 1 }]);

        // The image of the quintic is exactly twice the anticanonical
        // class downstairs: pullback(-2K) equals the strict transform.
        let pb = cs.pullback(&ClassExpr::canonical(-2)).unwrap();
        let d = cs.surface.tracked_class("D").unwrap().to_rat();
        assert_eq!(pb, d);

        // -K is ample against every remaining curve; K is not nef.
        let testers: Vec<String> = cs.surface.tracked.keys().cloned().collect();
        let anti = cs.is_ample(&ClassExpr::canonical(-1), &testers).unwrap();
        assert_eq!(anti.verdict, Ampleness::Ample);
        // (-K)^2 downstairs is the canonical degree.
        assert_eq!(anti.square, cs.k_squared_down);
        let k = cs.is_ample(&ClassExpr::canonical(1), &testers).unwrap();
        match k.verdict {
            Ampleness::NotNef { ref negative_against } => {
                assert!(negative_against.contains(&"E1".to_string()));
            }
            other => panic!("expected not-nef, got {other:?}"),
        }
    }

    /// Two curves of self-intersections -3, -3 meeting once.
    fn three_three_chain() -> SurfaceModel {
        let mut s = SurfaceModel::hirzebruch(2);
        s.track("sec", DivisorClass(vec![1, 0])).unwrap();
        s.track("fib", DivisorClass(vec![0, 1])).unwrap();
        s.blow_up("G1", &centers(&[("sec", 1)])).unwrap();
        for label in ["H1", "H2", "H3"] {
            s.blow_up(label, &centers(&[("fib", 1)])).unwrap();
        }
        s
    }

    #[test]
    fn chains_contract_to_cyclic_points_with_exact_discrepancies() {
        let s = three_three_chain();
        assert_eq!(s.intersect(s.tracked_class("sec").unwrap(), s.tracked_class("sec").unwrap()), -3);
        assert_eq!(s.intersect(s.tracked_class("fib").unwrap(), s.tracked_class("fib").unwrap()), -3);
        let cs = contract(&s, &plan(&[&["sec", "fib"]])).unwrap();
        assert_eq!(cs.components[0].curves, vec!["sec".to_string(), "fib".to_string()]);
        assert_eq!(cs.components[0].target, ContractionTarget::Quotient { r: 8, a: 3 });
        assert_eq!(
            cs.components[0].discrepancies,
            vec![Rat::new(1, 2), Rat::new(1, 2)]
        );
        // K^2: resolution has 8 - 4 = 4, each -3 curve meets K once, so
        // the two halves contribute 1 in total.
        assert_eq!(cs.k_squared_down, Rat::int(5));
    }

    #[test]
    fn chain_orientation_follows_the_first_listed_endpoint() {
        // Build a [2,4] chain: E1 becomes -2 after E2 sits on it, and E2
        // picks up three more points to reach -4.
        let mut s = SurfaceModel::projective_plane();
        s.blow_up("E1", &BTreeMap::new()).unwrap();
        s.blow_up("E2", &centers(&[("E1", 1)])).unwrap();
        for label in ["P1", "P2", "P3"] {
            s.blow_up(label, &centers(&[("E2", 1)])).unwrap();
        }
        let forward = contract(&s, &plan(&[&["E1", "E2"]])).unwrap();
        assert_eq!(forward.components[0].self_intersections, vec![-2, -4]);
        assert_eq!(forward.components[0].target, ContractionTarget::Quotient { r: 7, a: 4 });
        assert_eq!(
            forward.components[0].discrepancies,
            vec![Rat::new(2, 7), Rat::new(4, 7)]
        );

        // Listing the other endpoint first conjugates the residue.
        let backward = contract(&s, &plan(&[&["E2", "E1"]])).unwrap();
        assert_eq!(backward.components[0].target, ContractionTarget::Quotient { r: 7, a: 2 });
        assert_eq!(forward.k_squared_down, backward.k_squared_down);
    }

    #[test]
    fn du_val_chains_are_crepant() {
        // Three concurrent blow-ups in a tower: E1, E2 become -2 curves.
        let mut s = SurfaceModel::projective_plane();
        s.blow_up("E1", &BTreeMap::new()).unwrap();
        s.blow_up("E2", &centers(&[("E1", 1)])).unwrap();
        s.blow_up("E3", &centers(&[("E2", 1)])).unwrap();
        let cs = contract(&s, &plan(&[&["E1", "E2"]])).unwrap();
        assert_eq!(cs.components[0].target, ContractionTarget::DuVal { n: 2 });
        assert_eq!(cs.components[0].discrepancies, vec![Rat::zero(), Rat::zero()]);
        assert_eq!(cs.k_squared_down, Rat::int(6));
        assert_eq!(cs.singularities(), vec![SingularityType::A { n: 2 }]);
    }

    #[test]
    fn plan_validation_errors() {
        let s = three_three_chain();
        assert_eq!(
            contract(&s, &plan(&[&["sec", "sec"]])),
            Err(BirationalError::DuplicateCurve("sec".to_string()))
        );
        // sec and fib meet, so they cannot lie in different components.
        assert_eq!(
            contract(&s, &plan(&[&["sec"], &["fib"]])),
            Err(BirationalError::ComponentsMeet { a: "sec".to_string(), b: "fib".to_string() })
        );
        // G1 is a -1 curve inside a longer chain.
        let err = contract(&s, &plan(&[&["sec", "G1"]])).unwrap_err();
        assert!(matches!(err, BirationalError::BadSelfIntersection { ref name, self_int: -1, .. } if name == "G1"));
        // A positive curve cannot contract.
        let mut p = SurfaceModel::projective_plane();
        p.track("line", DivisorClass(vec![1])).unwrap();
        p.blow_up("E1", &BTreeMap::new()).unwrap();
        let err = contract(&p, &plan(&[&["line"]])).unwrap_err();
        assert!(matches!(err, BirationalError::BadSelfIntersection { self_int: 1, .. }));
        // A positive-genus curve cannot contract to a quotient point.
        let mut c = SurfaceModel::projective_plane();
        c.track("cubic", DivisorClass(vec![3])).unwrap();
        for i in 0..10 {
            c.blow_up(&format!("Q{i}"), &centers(&[("cubic", 1)])).unwrap();
        }
        let err = contract(&c, &plan(&[&["cubic"]])).unwrap_err();
        assert!(matches!(err, BirationalError::NotRational(ref name, ref g) if name == "cubic" && *g == Rat::one()));
        // Unknown curves are rejected.
        assert_eq!(
            contract(&s, &plan(&[&["ghost"]])),
            Err(BirationalError::Picard(PicardError::UnknownClass("ghost".to_string())))
        );
    }

    #[test]
    fn non_chain_shapes_are_rejected() {
        // Three exceptional curves all meeting a fourth form a star once
        // we contract the feet: instead, build three towers over E0.
        let mut s = SurfaceModel::projective_plane();
        s.blow_up("E0", &BTreeMap::new()).unwrap();
        s.blow_up("A", &centers(&[("E0", 1)])).unwrap();
        s.blow_up("B", &centers(&[("E0", 1)])).unwrap();
        s.blow_up("C", &centers(&[("E0", 1)])).unwrap();
        // E0 now has self-intersection -4 and meets A, B, C once each.
        let err = contract(&s, &plan(&[&["E0", "A", "B", "C"]])).unwrap_err();
        assert!(matches!(err, BirationalError::NotAChain { ref curve, degree: 3, .. } if curve == "E0"));
        // Two disjoint -2 curves are not a connected component.
        let mut t = SurfaceModel::projective_plane();
        t.blow_up("E1", &BTreeMap::new()).unwrap();
        t.blow_up("E2", &centers(&[("E1", 1)])).unwrap();
        t.blow_up("F1", &BTreeMap::new()).unwrap();
        t.blow_up("F2", &centers(&[("F1", 1)])).unwrap();
        let err = contract(&t, &plan(&[&["E1", "F1"]])).unwrap_err();
        assert!(matches!(err, BirationalError::Disconnected(_)));
    }

    #[test]
    fn pullback_rejects_contracted_terms_and_preserves_intersections() {
        let s = three_three_chain();
        let cs = contract(&s, &plan(&[&["sec", "fib"]])).unwrap();
        assert_eq!(
            cs.pullback(&ClassExpr::of("sec")),
            Err(BirationalError::ContractedTerm("sec".to_string()))
        );
        // G1 meets the chain; its pullback gains fractional corrections,
        // and its self-intersection drops below -1 downstairs.
        let g1 = cs.pullback(&ClassExpr::of("G1")).unwrap();
        let sec = cs.surface.tracked_class("sec").unwrap().to_rat();
        assert!(cs.surface.intersect_rat(&g1, &sec).is_zero());
        let self_down = cs.intersect_down(&ClassExpr::of("G1"), &ClassExpr::of("G1")).unwrap();
        assert_eq!(self_down, Rat::new(-5, 8));
    }

    #[test]
    fn class_expressions_parse() {
        let e = ClassExpr::parse("-2K + 3D - F5").unwrap();
        assert_eq!(e.k, Rat::int(-2));
        assert_eq!(e.terms["D"], Rat::int(3));
        assert_eq!(e.terms["F5"], Rat::int(-1));
        let e = ClassExpr::parse("1/2K").unwrap();
        assert_eq!(e.k, Rat::new(1, 2));
        let e = ClassExpr::parse("3e+7f").unwrap();
        assert_eq!(e.terms["e"], Rat::int(3));
        assert_eq!(e.terms["f"], Rat::int(7));
        let e = ClassExpr::parse("2*G1 - 1/3*G2").unwrap();
        assert_eq!(e.terms["G1"], Rat::int(2));
        assert_eq!(e.terms["G2"], Rat::new(-1, 3));
        // K cancels out entirely.
        let e = ClassExpr::parse("K - K + D").unwrap();
        assert!(e.k.is_zero());
        assert!(ClassExpr::parse("").is_err());
        assert!(ClassExpr::parse("2 +").is_err());
        assert!(ClassExpr::parse("3").is_err());
    }

    #[test]
    fn plans_parse() {
        assert_eq!(
            parse_plan("e,G1,G2;f").unwrap(),
            plan(&[&["e", "G1", "G2"], &["f"]])
        );
        assert_eq!(parse_plan("l").unwrap(), plan(&[&["l"]]));
        assert!(parse_plan("a,,b").is_err());
        assert!(parse_plan(";").is_err());
    }
}
