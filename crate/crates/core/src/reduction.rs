//! Step-by-step stable reduction of degenerating degree-five pairs.
//!
//! Each scenario here models a one-parameter family of stable pairs whose
//! branch curve degenerates to a curve with a singular point of log
//! canonical threshold below one half, so the limit pair is no longer
//! stable and the central fiber must be replaced. The replacement is
//! recorded as a sequence of exact lattice computations:
//!
//! 1. **Setup.** After a base change (when one is needed to keep the
//!    fibers reduced) and a blow-up of the total space along the bad
//!    locus, the central fiber breaks into two components glued along a
//!    double curve. Each component is recorded either as a
//!    [`LatticeComponent`] (a blown-up rational surface with a
//!    contraction plan, a named double curve, and optionally a named
//!    marked curve) or as a [`DocumentedComponent`] (numerical data for a
//!    surface that is not rational, with a citation left to the pair
//!    constructors). The glueing is checked numerically: the squares of
//!    the double curve on the two sides must sum to zero, their genera
//!    must agree, and the squares of the pair classes `K + B + C/2` must
//!    sum to zero.
//! 2. **Flips.** A curve on one component that is negative for the pair
//!    class is contracted there, and the point it lands on is blown up on
//!    the other component. On the lattice side this pushes the curve into
//!    the contraction plan, subtracts its class from the marked curve,
//!    and performs the neighbour blow-up; the pair-class square of the
//!    fiber is conserved.
//! 3. **Contraction of a component.** When a component's marked curve is
//!    exhausted and `V = K + B` contracts it (either `V = 0` on the nose,
//!    or `-V` has positive square and positive degree on every remaining
//!    tracked curve), the component is removed from the fiber.
//! 4. **Contraction of chains.** The surviving component contracts the
//!    double curve together with the exceptional chains onto cyclic
//!    quotient points, landing on one of the pairs from
//!    [`crate::pairs::build_pair`]. The final report is compared with the
//!    directly built one field by field.
//!
//! Every step returns [`CheckRecord`]s. A check that fails does not
//! produce a record with `pass: false`: it aborts the scenario with
//! [`ReductionError::CheckFailed`], so any trace this module returns has
//! all of its checks passing.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::birational::{contract, BirationalError, ClassExpr, ContractedSurface};
use crate::hjsing::{lct_cusp, HjError, SingularityType};
use crate::pairs::{
    bielliptic_report, build_pair, check_stable_type12, report_for, PairReport, PairsError,
    StratumSpec,
};
use crate::picard::{DivisorClass, PicardError, SurfaceModel};
use crate::rat::Rat;

/// Errors from reduction steps and scenario scripts.
#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("the central fiber has no component named {0:?}")]
    UnknownComponent(String),
    #[error("component {0:?} carries no lattice model")]
    NotLattice(String),
    #[error("cannot flip {curve:?} on {component:?}: {reason}")]
    FlipRejected { component: String, curve: String, reason: String },
    #[error("cannot contract component {component:?}: {reason}")]
    ContractionRejected { component: String, reason: String },
    #[error("check {name:?} failed with value {value}")]
    CheckFailed { name: String, value: String },
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Birational(#[from] BirationalError),
    #[error(transparent)]
    Singularity(#[from] HjError),
    #[error(transparent)]
    Pairs(#[from] PairsError),
}

/// One verified numerical fact inside a step. Records returned by this
/// module always have `pass: true`; a failing check aborts the scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: String,
    pub pass: bool,
}

fn check(name: &str, value: impl ToString, pass: bool) -> Result<CheckRecord, ReductionError> {
    let value = value.to_string();
    if !pass {
        return Err(ReductionError::CheckFailed { name: name.to_string(), value });
    }
    Ok(CheckRecord { name: name.to_string(), value, pass })
}

fn fmt_rats(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_singularities(list: &[SingularityType]) -> String {
    if list.is_empty() {
        return "none".to_string();
    }
    let parts: Vec<String> = list.iter().map(|s| s.to_string()).collect();
    parts.join(", ")
}

/// A fiber component with a full lattice model: a blown-up rational
/// surface, the plan of curves already contracted on it, the double curve
/// along which it meets the rest of the fiber, and the marked curve (the
/// part of the branch divisor living on this component), if any.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeComponent {
    pub name: String,
    pub surface: SurfaceModel,
    pub plan: Vec<Vec<String>>,
    pub double_curve: Option<String>,
    pub marked: Option<String>,
}

impl LatticeComponent {
    /// The surface downstairs of this component's contraction plan.
    pub fn contracted(&self) -> Result<ContractedSurface, ReductionError> {
        Ok(contract(&self.surface, &self.plan)?)
    }
}

/// A fiber component recorded by its numerical invariants only, for
/// surfaces that are not blown-up rational surfaces.
#[derive(Debug, Clone, Serialize)]
pub struct DocumentedComponent {
    pub name: String,
    pub description: String,
    pub k_squared: Rat,
    pub double_curve_square: Rat,
    pub double_curve_genus: Rat,
}

/// One component of the central fiber.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Component {
    Lattice(LatticeComponent),
    Documented(DocumentedComponent),
}

impl Component {
    pub fn name(&self) -> &str {
        match self {
            Component::Lattice(c) => &c.name,
            Component::Documented(c) => &c.name,
        }
    }
}

/// The central fiber of a degenerating family, after base change by a
/// cover of the stated order.
#[derive(Debug, Clone, Serialize)]
pub struct CentralFiber {
    pub components: Vec<Component>,
    pub base_change_order: u64,
}

impl CentralFiber {
    fn index_of(&self, name: &str) -> Result<usize, ReductionError> {
        self.components
            .iter()
            .position(|c| c.name() == name)
            .ok_or_else(|| ReductionError::UnknownComponent(name.to_string()))
    }

    fn lattice(&self, name: &str) -> Result<&LatticeComponent, ReductionError> {
        match &self.components[self.index_of(name)?] {
            Component::Lattice(c) => Ok(c),
            Component::Documented(_) => Err(ReductionError::NotLattice(name.to_string())),
        }
    }

    fn lattice_mut(&mut self, name: &str) -> Result<&mut LatticeComponent, ReductionError> {
        let idx = self.index_of(name)?;
        match &mut self.components[idx] {
            Component::Lattice(c) => Ok(c),
            Component::Documented(_) => Err(ReductionError::NotLattice(name.to_string())),
        }
    }
}

/// The square of the pair class `K + B + C/2` descended along the
/// component's contraction plan (with `B` the double curve and `C` the
/// marked curve, each skipped when absent).
pub fn pair_class_square(comp: &LatticeComponent) -> Result<Rat, ReductionError> {
    let cs = comp.contracted()?;
    let mut v = cs.pullback_canonical();
    if let Some(b) = &comp.double_curve {
        let pb = cs.pullback(&ClassExpr::of(b))?;
        for (slot, x) in v.iter_mut().zip(&pb) {
            *slot += x;
        }
    }
    if let Some(m) = &comp.marked {
        let pb = cs.pullback(&ClassExpr::of(m))?;
        let half = Rat::new(1, 2);
        for (slot, x) in v.iter_mut().zip(&pb) {
            *slot += &half * x;
        }
    }
    Ok(cs.surface.intersect_rat(&v, &v))
}

/// The self-intersection of the double curve downstairs of the plan, or
/// the documented value for a component without a lattice model.
fn double_curve_square(comp: &Component) -> Result<Option<Rat>, ReductionError> {
    match comp {
        Component::Lattice(c) => match &c.double_curve {
            Some(b) => {
                let cs = c.contracted()?;
                Ok(Some(cs.intersect_down(&ClassExpr::of(b), &ClassExpr::of(b))?))
            }
            None => Ok(None),
        },
        Component::Documented(c) => Ok(Some(c.double_curve_square.clone())),
    }
}

/// Sum of the double-curve squares over the whole fiber. Zero certifies
/// that the two sides glue along the same curve inside the family.
pub fn double_curve_square_sum(fiber: &CentralFiber) -> Result<Rat, ReductionError> {
    let mut total = Rat::zero();
    for comp in &fiber.components {
        if let Some(sq) = double_curve_square(comp)? {
            total += &sq * &Rat::one();
        }
    }
    Ok(total)
}

/// Sum of the pair-class squares over the lattice components. For a fiber
/// whose components all carry lattice models this is the square of the
/// pair class of the whole fiber, and it is conserved by flips.
pub fn pair_square_sum(fiber: &CentralFiber) -> Result<Rat, ReductionError> {
    let mut total = Rat::zero();
    for comp in &fiber.components {
        if let Component::Lattice(c) = comp {
            total += pair_class_square(c)?;
        }
    }
    Ok(total)
}

/// Contracts the `(-1)`-curve `curve` on `component` and blows up the
/// point it lands on inside `neighbor` (labelled `exceptional`, with the
/// stated multiplicities of the neighbour's tracked curves).
///
/// The curve must be rational of square `-1`, disjoint from everything
/// already contracted on its component, meet the double curve once, and
/// appear in the marked divisor (negative product). Its class is removed
/// from the marked divisor; when nothing of the marked divisor is left
/// the component's marked curve becomes `None`.
pub fn flip(
    fiber: &mut CentralFiber,
    component: &str,
    curve: &str,
    neighbor: &str,
    exceptional: &str,
    neighbor_centers: &BTreeMap<String, i64>,
) -> Result<Vec<CheckRecord>, ReductionError> {
    let reject = |reason: String| ReductionError::FlipRejected {
        component: component.to_string(),
        curve: curve.to_string(),
        reason,
    };

    let comp = fiber.lattice(component)?;
    let s = &comp.surface;
    let c = s.tracked_class(curve)?.clone();
    for name in comp.plan.iter().flatten() {
        if name == curve {
            return Err(reject("the curve is already contracted".to_string()));
        }
        let e = s.tracked_class(name)?;
        let product = s.intersect(&c, e);
        if product != 0 {
            return Err(reject(format!("the curve meets the contracted curve {name:?}")));
        }
    }

    let square = s.intersect(&c, &c);
    if square != -1 {
        return Err(reject(format!("the curve has square {square}, not -1")));
    }
    let genus = s.adjunction_genus(&c);
    if genus != Rat::zero() {
        return Err(reject(format!("the curve has genus {genus}, not 0")));
    }
    let b_name = comp
        .double_curve
        .clone()
        .ok_or_else(|| reject("the component has no double curve".to_string()))?;
    let b = s.tracked_class(&b_name)?;
    let bc = s.intersect(&b.clone(), &c);
    if bc != 1 {
        return Err(reject(format!("the curve meets the double curve {bc} times, not once")));
    }
    let m_name = comp
        .marked
        .clone()
        .ok_or_else(|| reject("the component has no marked divisor left".to_string()))?;
    let m = s.tracked_class(&m_name)?.clone();
    let mc = s.intersect(&m, &c);
    if mc >= 0 {
        return Err(reject(format!(
            "the curve is not inside the marked divisor (product {mc})"
        )));
    }
    let kc = s.intersect(s.canonical(), &c);
    let threshold = Rat::int(kc + bc) + Rat::new(mc, 2);
    if !threshold.is_negative() {
        return Err(reject(format!("the pair class has degree {threshold} >= 0 on the curve")));
    }

    let checks = vec![
        check("flip-curve-has-square-minus-one", square, true)?,
        check("flip-curve-is-rational", &genus, true)?,
        check("flip-curve-meets-double-curve-once", bc, true)?,
        check("flip-curve-inside-marked-divisor", mc, true)?,
        check("flip-threshold-negative", &threshold, true)?,
    ];

    // All conditions hold; now mutate the neighbour, then this component.
    fiber.lattice_mut(neighbor)?.surface.blow_up(exceptional, neighbor_centers)?;
    let comp = fiber.lattice_mut(component)?;
    comp.plan.push(vec![curve.to_string()]);
    if m_name == curve {
        // The marked divisor was exactly this curve; its tracked class
        // still names the contracted curve, so only the marking goes.
        comp.marked = None;
    } else {
        let remaining = m.minus(&c);
        let exhausted = remaining.is_zero();
        comp.surface.set_tracked(&m_name, remaining)?;
        if exhausted {
            comp.marked = None;
        }
    }
    Ok(checks)
}

/// Removes a whole component from the fiber, certifying with `V = K + B`
/// that the component contracts onto its double curve: either `V = 0` as
/// a class downstairs, or `-V` has positive square and positive degree on
/// every tracked curve that survives the component's plan.
pub fn contract_component(
    fiber: &mut CentralFiber,
    name: &str,
) -> Result<Vec<CheckRecord>, ReductionError> {
    let reject = |reason: String| ReductionError::ContractionRejected {
        component: name.to_string(),
        reason,
    };

    let comp = fiber.lattice(name)?;
    if let Some(m) = &comp.marked {
        if !comp.surface.tracked_class(m)?.is_zero() {
            return Err(reject(format!("the marked divisor {m:?} is not exhausted")));
        }
    }
    let b_name = comp
        .double_curve
        .clone()
        .ok_or_else(|| reject("the component has no double curve to contract onto".to_string()))?;
    let cs = comp.contracted()?;
    let mut v = cs.pullback_canonical();
    let pb_b = cs.pullback(&ClassExpr::of(&b_name))?;
    for (slot, x) in v.iter_mut().zip(&pb_b) {
        *slot += x;
    }

    let mut checks = Vec::new();
    if v.iter().all(Rat::is_zero) {
        checks.push(check("adjoint-certificate-trivial", "true", true)?);
    } else {
        let neg: Vec<Rat> = v.iter().map(|x| -x).collect();
        let square = cs.surface.intersect_rat(&neg, &neg);
        if !square.is_positive() {
            return Err(reject(format!("the adjoint certificate has square {square} <= 0")));
        }
        let contracted = cs.contracted_names();
        for tester in cs.surface.tracked.keys() {
            if contracted.contains(tester.as_str()) {
                continue;
            }
            if cs.surface.tracked_class(tester)?.is_zero() {
                continue;
            }
            let pb = cs.pullback(&ClassExpr::of(tester))?;
            let degree = cs.surface.intersect_rat(&neg, &pb);
            if !degree.is_positive() {
                return Err(reject(format!(
                    "the adjoint certificate has degree {degree} <= 0 on {tester:?}"
                )));
            }
        }
        let on_b = cs.surface.intersect_rat(&neg, &pb_b);
        checks.push(check("adjoint-certificate-square", &square, true)?);
        checks.push(check("adjoint-certificate-positive-on-double-curve", &on_b, true)?);
    }

    let idx = fiber.index_of(name)?;
    fiber.components.remove(idx);
    Ok(checks)
}

/// Replaces the contraction plan of a component, typically to fold the
/// double curve and the remaining exceptional chains into quotient
/// points. The new plan is validated by running the contraction; when the
/// double curve is part of it, the component stops having one.
pub fn contract_chains(
    fiber: &mut CentralFiber,
    name: &str,
    plan: Vec<Vec<String>>,
) -> Result<Vec<CheckRecord>, ReductionError> {
    let comp = fiber.lattice_mut(name)?;
    let cs = contract(&comp.surface, &plan)?;
    let checks = vec![
        check("descended-singularities", fmt_singularities(&cs.singularities()), true)?,
        check("canonical-degree", &cs.k_squared_down, true)?,
    ];
    if let Some(b) = &comp.double_curve {
        if plan.iter().flatten().any(|n| n == b) {
            comp.double_curve = None;
        }
    }
    comp.plan = plan;
    Ok(checks)
}

/// One recorded step of a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub action: String,
    pub description: String,
    pub checks: Vec<CheckRecord>,
    pub components: Vec<ComponentSummary>,
}

/// The state of one fiber component after a step.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub name: String,
    pub kind: String,
    pub k_squared: Rat,
    pub singularities: Vec<SingularityType>,
    pub double_curve_square: Option<Rat>,
    pub marked: Option<String>,
}

fn summarize(fiber: &CentralFiber) -> Result<Vec<ComponentSummary>, ReductionError> {
    fiber
        .components
        .iter()
        .map(|comp| match comp {
            Component::Lattice(c) => {
                let cs = c.contracted()?;
                Ok(ComponentSummary {
                    name: c.name.clone(),
                    kind: "lattice".to_string(),
                    k_squared: cs.k_squared_down.clone(),
                    singularities: cs.singularities(),
                    double_curve_square: double_curve_square(comp)?,
                    marked: c.marked.clone(),
                })
            }
            Component::Documented(c) => Ok(ComponentSummary {
                name: c.name.clone(),
                kind: "documented".to_string(),
                k_squared: c.k_squared.clone(),
                singularities: Vec::new(),
                double_curve_square: Some(c.double_curve_square.clone()),
                marked: None,
            }),
        })
        .collect()
}

/// A completed scenario: the ordered steps with their verified checks,
/// and the final pair report, equal to the directly built one.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub scenario: String,
    pub base_change_order: u64,
    pub steps: Vec<StepRecord>,
    pub final_report: PairReport,
}

/// The names accepted by [`run_scenario`], in atlas order.
pub fn scenario_names() -> Vec<&'static str> {
    vec!["bielliptic", "quintic-11111", "trigonal-0-1111", "trigonal-2-4"]
}

/// Runs one of the scripted reduction scenarios end to end.
pub fn run_scenario(name: &str) -> Result<ScenarioOutcome, ReductionError> {
    match name {
        "bielliptic" => scenario_bielliptic(),
        "quintic-11111" => scenario_quintic(),
        "trigonal-0-1111" => scenario_trigonal_m0(),
        "trigonal-2-4" => scenario_trigonal_m2(),
        other => Err(ReductionError::UnknownScenario(other.to_string())),
    }
}

fn push_step(
    steps: &mut Vec<StepRecord>,
    fiber: &CentralFiber,
    action: &str,
    description: &str,
    checks: Vec<CheckRecord>,
) -> Result<(), ReductionError> {
    steps.push(StepRecord {
        index: steps.len(),
        action: action.to_string(),
        description: description.to_string(),
        checks,
        components: summarize(fiber)?,
    });
    Ok(())
}

fn centers(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
    pairs.iter().map(|(n, m)| (n.to_string(), *m)).collect()
}

/// Checks shared by every two-component setup: double-curve squares sum
/// to zero, the genera on the two sides agree, and (for an all-lattice
/// fiber) the pair-class squares sum to zero.
fn glueing_checks(
    fiber: &CentralFiber,
    genera: (&Rat, &Rat),
) -> Result<Vec<CheckRecord>, ReductionError> {
    let square_sum = double_curve_square_sum(fiber)?;
    let mut checks = vec![check(
        "double-curve-squares-sum-to-zero",
        &square_sum,
        square_sum.is_zero(),
    )?];
    checks.push(check("double-curve-genera-match", genera.0, genera.0 == genera.1)?);
    if fiber.components.iter().all(|c| matches!(c, Component::Lattice(_))) {
        let pair_sum = pair_square_sum(fiber)?;
        checks.push(check("pair-class-squares-sum-to-zero", &pair_sum, pair_sum.is_zero())?);
    }
    Ok(checks)
}

fn pair_conservation_check(fiber: &CentralFiber) -> Result<CheckRecord, ReductionError> {
    let pair_sum = pair_square_sum(fiber)?;
    check("pair-class-squares-sum-to-zero", &pair_sum, pair_sum.is_zero())
}

fn genus_of(comp: &LatticeComponent, name: &str) -> Result<Rat, ReductionError> {
    Ok(comp.surface.adjunction_genus(comp.surface.tracked_class(name)?))
}

/// Finishes a scenario whose fiber has shrunk to one lattice component:
/// builds the pair report and compares it with the directly built one.
fn finish_lattice_scenario(
    scenario: &str,
    fiber: &CentralFiber,
    steps: &mut Vec<StepRecord>,
    spec: &StratumSpec,
) -> Result<ScenarioOutcome, ReductionError> {
    assert!(fiber.components.len() == 1, "exactly one component must remain");
    let comp = fiber.lattice(fiber.components[0].name())?;
    let marked = comp.marked.clone().expect("the surviving component carries the branch curve");
    let cs = comp.contracted()?;
    let testers: Vec<String> = cs.surface.tracked.keys().cloned().collect();
    let stability = check_stable_type12(&cs, &marked, &testers)?;
    let report = report_for(spec, &cs, &marked, &testers, Vec::new())?;
    let direct = build_pair(spec)?.report;
    let checks = vec![
        check(
            "final-pair-is-stable-type-one-two",
            stability.is_stable_type_one_two,
            stability.is_stable_type_one_two,
        )?,
        check("final-report-matches-direct-construction", report == direct, report == direct)?,
    ];
    push_step(
        steps,
        fiber,
        "final-report",
        "The surviving component carries the stable pair of the target stratum.",
        checks,
    )?;
    Ok(ScenarioOutcome {
        scenario: scenario.to_string(),
        base_change_order: fiber.base_change_order,
        steps: std::mem::take(steps),
        final_report: report,
    })
}

// ---------------------------------------------------------------------
// Scenario: plane quintics acquiring an ordinary five-fold point.
// ---------------------------------------------------------------------

/// First component for the quintic scenario: the plane blown up at five
/// points `p1..p5`, carrying the four lines through `p5` and one other
/// point, the conic through all five, and their union as marked curve.
fn quintic_first_component() -> Result<LatticeComponent, ReductionError> {
    let mut s = SurfaceModel::projective_plane();
    for i in 1..=4u32 {
        s.track(&format!("F{i}"), DivisorClass(vec![1]))?;
    }
    s.track("F5", DivisorClass(vec![2]))?;
    s.track("C1", DivisorClass(vec![6]))?;
    for i in 1..=4u32 {
        s.blow_up(&format!("E{i}"), &centers(&[(&format!("F{i}"), 1), ("F5", 1), ("C1", 2)]))?;
    }
    s.blow_up(
        "E5",
        &centers(&[("F1", 1), ("F2", 1), ("F3", 1), ("F4", 1), ("F5", 1), ("C1", 5)]),
    )?;
    Ok(LatticeComponent {
        name: "S1".to_string(),
        surface: s,
        plan: Vec::new(),
        double_curve: Some("E5".to_string()),
        marked: Some("C1".to_string()),
    })
}

fn quintic_second_component() -> Result<LatticeComponent, ReductionError> {
    let mut s = SurfaceModel::projective_plane();
    s.track("B2", DivisorClass(vec![1]))?;
    s.track("C2", DivisorClass(vec![5]))?;
    Ok(LatticeComponent {
        name: "S2".to_string(),
        surface: s,
        plan: Vec::new(),
        double_curve: Some("B2".to_string()),
        marked: Some("C2".to_string()),
    })
}

fn quintic_fiber() -> Result<CentralFiber, ReductionError> {
    Ok(CentralFiber {
        components: vec![
            Component::Lattice(quintic_first_component()?),
            Component::Lattice(quintic_second_component()?),
        ],
        base_change_order: 5,
    })
}

fn scenario_quintic() -> Result<ScenarioOutcome, ReductionError> {
    let fiber = &mut quintic_fiber()?;
    let mut steps = Vec::new();

    let lct = lct_cusp(5, 5)?;
    let mut checks = vec![check(
        "log-canonical-threshold-below-one-half",
        &lct,
        lct < Rat::new(1, 2),
    )?];
    {
        let s1 = fiber.lattice("S1")?;
        let c1 = s1.surface.tracked_class("C1")?.clone();
        let mut sum = DivisorClass(vec![0; s1.surface.rank()]);
        for i in 1..=5 {
            sum = sum.plus(s1.surface.tracked_class(&format!("F{i}"))?);
        }
        checks.push(check("marked-curve-class-equals-sum-of-components", c1 == sum, c1 == sum)?);
        let s2 = fiber.lattice("S2")?;
        checks.extend(glueing_checks(
            fiber,
            (&genus_of(s1, "E5")?, &genus_of(s2, "B2")?),
        )?);
    }
    push_step(
        &mut steps,
        fiber,
        "setup",
        "A quintic limit with an ordinary five-fold point: after a degree-five \
         base change and a blow-up of the total space at the bad point, the \
         fiber is S1 (the plane blown up at five points, marked with the union \
         C1 of the four lines through p5 and the conic through all five, double \
         curve E5) glued to S2 (a plane with a quintic C2 and a line B2).",
        checks,
    )?;

    for i in 1..=5 {
        let curve = format!("F{i}");
        let exceptional = format!("G{i}");
        let mut checks = flip(
            fiber,
            "S1",
            &curve,
            "S2",
            &exceptional,
            &centers(&[("B2", 1), ("C2", 1)]),
        )?;
        checks.push(pair_conservation_check(fiber)?);
        if i == 5 {
            let exhausted = fiber.lattice("S1")?.marked.is_none();
            checks.push(check("marked-curve-exhausted", exhausted, exhausted)?);
        }
        push_step(
            &mut steps,
            fiber,
            "flip",
            &format!(
                "Flip {curve}: contract it on S1 and blow up the point of B2 \
                 where it lands on S2 (exceptional {exceptional})."
            ),
            checks,
        )?;
    }

    let image_square = {
        let s1 = fiber.lattice("S1")?;
        let cs = s1.contracted()?;
        cs.intersect_down(&ClassExpr::of("E5"), &ClassExpr::of("E5"))?
    };
    let mut checks =
        vec![check("double-curve-image-square", &image_square, image_square == Rat::int(4))?];
    checks.extend(contract_component(fiber, "S1")?);
    push_step(
        &mut steps,
        fiber,
        "contract-component",
        "With the marked curve exhausted, K + E5 is anti-ample on the blown-down \
         S1, which contracts onto its double curve (now a conic).",
        checks,
    )?;

    let mut checks = contract_chains(fiber, "S2", vec![vec!["B2".to_string()]])?;
    let k_down = fiber.lattice("S2")?.contracted()?.k_squared_down;
    checks.push(check("canonical-degree-five", &k_down, k_down == Rat::int(5))?);
    push_step(
        &mut steps,
        fiber,
        "contract-chains",
        "Contract the double curve B2, now a (-4)-curve, to a 1/4(1,1) point.",
        checks,
    )?;

    finish_lattice_scenario(
        "quintic-11111",
        fiber,
        &mut steps,
        &StratumSpec::PlaneQuintic { contacts: vec![1, 1, 1, 1, 1] },
    )
}

// ---------------------------------------------------------------------
// Scenario: the branch sextic degenerating to three times a conic.
// ---------------------------------------------------------------------

fn trigonal_m0_first_component() -> Result<LatticeComponent, ReductionError> {
    let mut s = SurfaceModel::projective_plane();
    s.track("B1", DivisorClass(vec![2]))?;
    s.track("C1", DivisorClass(vec![0]))?;
    for i in 1..=4u32 {
        s.blow_up(&format!("E{i}"), &centers(&[("B1", 1)]))?;
    }
    s.set_tracked("C1", DivisorClass(vec![0, 1, 1, 1, 1]))?;
    Ok(LatticeComponent {
        name: "S1".to_string(),
        surface: s,
        plan: Vec::new(),
        double_curve: Some("B1".to_string()),
        marked: Some("C1".to_string()),
    })
}

fn trigonal_m0_second_component() -> Result<LatticeComponent, ReductionError> {
    let mut s = SurfaceModel::quadric();
    s.track("B2", DivisorClass(vec![1, 0]))?;
    s.track("C2", DivisorClass(vec![3, 4]))?;
    Ok(LatticeComponent {
        name: "S2".to_string(),
        surface: s,
        plan: Vec::new(),
        double_curve: Some("B2".to_string()),
        marked: Some("C2".to_string()),
    })
}

fn trigonal_m0_fiber() -> Result<CentralFiber, ReductionError> {
    Ok(CentralFiber {
        components: vec![
            Component::Lattice(trigonal_m0_first_component()?),
            Component::Lattice(trigonal_m0_second_component()?),
        ],
        base_change_order: 1,
    })
}

fn scenario_trigonal_m0() -> Result<ScenarioOutcome, ReductionError> {
    let fiber = &mut trigonal_m0_fiber()?;
    let mut steps = Vec::new();

    let mut checks = Vec::new();
    {
        let s1 = fiber.lattice("S1")?;
        let c1 = s1.surface.tracked_class("C1")?.clone();
        let mut sum = DivisorClass(vec![0; s1.surface.rank()]);
        for i in 1..=4 {
            sum = sum.plus(s1.surface.tracked_class(&format!("E{i}"))?);
        }
        checks.push(check("marked-curve-class-equals-sum-of-components", c1 == sum, c1 == sum)?);
        let s2 = fiber.lattice("S2")?;
        let meets = s2.surface.intersect(
            s2.surface.tracked_class("C2")?,
            s2.surface.tracked_class("B2")?,
        );
        checks.push(check("curve-meets-double-curve-transversely", meets, meets == 4)?);
        checks.extend(glueing_checks(
            fiber,
            (&genus_of(s1, "B1")?, &genus_of(s2, "B2")?),
        )?);
    }
    push_step(
        &mut steps,
        fiber,
        "setup",
        "The branch sextic degenerates to three times a conic; blowing up the \
         total space along the reduced conic inserts S2, a smooth quadric \
         carrying a curve C2 of type (3,4) and a ruling line B2. S1 is the \
         plane blown up at the four points of the conic B1 where the residual \
         curve met it; the marked class there is E1 + E2 + E3 + E4.",
        checks,
    )?;

    for i in 1..=4 {
        let curve = format!("E{i}");
        let exceptional = format!("G{i}");
        let mut checks = flip(
            fiber,
            "S1",
            &curve,
            "S2",
            &exceptional,
            &centers(&[("B2", 1), ("C2", 1)]),
        )?;
        checks.push(pair_conservation_check(fiber)?);
        if i == 4 {
            let exhausted = fiber.lattice("S1")?.marked.is_none();
            checks.push(check("marked-curve-exhausted", exhausted, exhausted)?);
        }
        push_step(
            &mut steps,
            fiber,
            "flip",
            &format!(
                "Flip {curve}: contract it on S1 and blow up the point of B2 \
                 where it lands on S2 (exceptional {exceptional})."
            ),
            checks,
        )?;
    }

    let image_square = {
        let s1 = fiber.lattice("S1")?;
        let cs = s1.contracted()?;
        cs.intersect_down(&ClassExpr::of("B1"), &ClassExpr::of("B1"))?
    };
    let mut checks =
        vec![check("double-curve-image-square", &image_square, image_square == Rat::int(4))?];
    checks.extend(contract_component(fiber, "S1")?);
    push_step(
        &mut steps,
        fiber,
        "contract-component",
        "With the marked curve exhausted, K + B1 is anti-ample on the \
         blown-down S1, which contracts onto the conic.",
        checks,
    )?;

    let mut checks = contract_chains(fiber, "S2", vec![vec!["B2".to_string()]])?;
    let k_down = fiber.lattice("S2")?.contracted()?.k_squared_down;
    checks.push(check("canonical-degree-five", &k_down, k_down == Rat::int(5))?);
    push_step(
        &mut steps,
        fiber,
        "contract-chains",
        "Contract the ruling line B2, now a (-4)-curve, to a 1/4(1,1) point.",
        checks,
    )?;

    finish_lattice_scenario(
        "trigonal-0-1111",
        fiber,
        &mut steps,
        &StratumSpec::TrigonalM0 { contacts: vec![1, 1, 1, 1] },
    )
}

// ---------------------------------------------------------------------
// Scenario: a sextic model with four nodes and a y^3 = x^7 cusp.
// ---------------------------------------------------------------------

/// First component: the plane sextic with four nodes and one higher cusp,
/// resolved by four node blow-ups and the five-step cusp tower F1..F5.
/// Contracting [F1, F2] and [F3, F4] leaves a 1/7(1,4) point and an A2
/// point on the last exceptional curve F5, and the strict transform C1 of
/// the sextic becomes a rational (-1)-curve.
fn trigonal_m2_first_component() -> Result<LatticeComponent, ReductionError> {
    let mut s = SurfaceModel::projective_plane();
    s.track("C1", DivisorClass(vec![6]))?;
    for i in 1..=4u32 {
        s.blow_up(&format!("N{i}"), &centers(&[("C1", 2)]))?;
    }
    s.blow_up("F1", &centers(&[("C1", 3)]))?;
    s.blow_up("F2", &centers(&[("C1", 3), ("F1", 1)]))?;
    s.blow_up("F3", &centers(&[("C1", 1), ("F2", 1)]))?;
    s.blow_up("F4", &centers(&[("C1", 1), ("F2", 1), ("F3", 1)]))?;
    s.blow_up("F5", &centers(&[("C1", 1), ("F2", 1), ("F4", 1)]))?;
    Ok(LatticeComponent {
        name: "S1".to_string(),
        surface: s,
        plan: vec![
            vec!["F1".to_string(), "F2".to_string()],
            vec!["F3".to_string(), "F4".to_string()],
        ],
        double_curve: Some("F5".to_string()),
        marked: Some("C1".to_string()),
    })
}

/// Second component: the second Hirzebruch surface with the trigonal
/// curve `D` in class `3e + 7f`, blown up three times over the point
/// where the negative section, the fiber through it, and `D` meet.
fn trigonal_m2_second_component() -> Result<LatticeComponent, ReductionError> {
    let mut s = SurfaceModel::hirzebruch(2);
    s.track("sec", DivisorClass(vec![1, 0]))?;
    s.track("fib", DivisorClass(vec![0, 1]))?;
    s.track("D", DivisorClass(vec![3, 7]))?;
    s.blow_up("G1", &centers(&[("sec", 1), ("fib", 1), ("D", 1)]))?;
    s.blow_up("G2", &centers(&[("fib", 1), ("D", 1), ("G1", 1)]))?;
    s.blow_up("G3", &centers(&[("fib", 1), ("D", 1), ("G2", 1)]))?;
    Ok(LatticeComponent {
        name: "S2".to_string(),
        surface: s,
        plan: vec![
            vec!["sec".to_string(), "G1".to_string(), "G2".to_string()],
            vec!["fib".to_string()],
        ],
        double_curve: Some("G3".to_string()),
        marked: Some("D".to_string()),
    })
}

fn trigonal_m2_fiber() -> Result<CentralFiber, ReductionError> {
    Ok(CentralFiber {
        components: vec![
            Component::Lattice(trigonal_m2_first_component()?),
            Component::Lattice(trigonal_m2_second_component()?),
        ],
        base_change_order: 1,
    })
}

/// The multiplicities along the cusp tower of the relative canonical
/// class and of the total transform of the sextic, expressed in the
/// strict transforms F1..F5.
fn cusp_tower_multiplicities(
    s: &SurfaceModel,
) -> Result<(Vec<Rat>, Vec<Rat>), ReductionError> {
    let tower = ["F1", "F2", "F3", "F4", "F5"];
    // K = (pullback of the plane K) + (node part) + (tower part); strip
    // the first two to isolate the tower part.
    let mut canonical_part = s.canonical().to_rat();
    canonical_part[0] += Rat::int(3);
    for i in 1..=4 {
        canonical_part[i] -= Rat::int(1);
    }
    let canonical = s
        .express_in_tracked(&tower, &canonical_part)?
        .expect("the tower part lies in the span of the tower");
    // Total transform of the sextic minus its strict transform.
    let mut curve_part = s.tracked_class("C1")?.to_rat();
    for (i, x) in curve_part.iter_mut().enumerate() {
        let total = match i {
            0 => 6,
            1..=4 => -2,
            _ => 0,
        };
        *x = Rat::int(total) - &*x;
    }
    let curve = s
        .express_in_tracked(&tower, &curve_part)?
        .expect("the curve part lies in the span of the tower");
    Ok((canonical, curve))
}

fn scenario_trigonal_m2() -> Result<ScenarioOutcome, ReductionError> {
    let fiber = &mut trigonal_m2_fiber()?;
    let mut steps = Vec::new();

    let mut checks = Vec::new();
    {
        let s1 = fiber.lattice("S1")?;
        let s = &s1.surface;
        let (canonical_mults, curve_mults) = cusp_tower_multiplicities(s)?;
        let expected_canonical: Vec<Rat> = [1, 2, 3, 6, 9].iter().map(|&x| Rat::int(x)).collect();
        let expected_curve: Vec<Rat> = [3, 6, 7, 14, 21].iter().map(|&x| Rat::int(x)).collect();
        checks.push(check(
            "embedded-resolution-canonical-multiplicities",
            fmt_rats(&canonical_mults),
            canonical_mults == expected_canonical,
        )?);
        checks.push(check(
            "embedded-resolution-curve-multiplicities",
            fmt_rats(&curve_mults),
            curve_mults == expected_curve,
        )?);
        let ratio = canonical_mults
            .iter()
            .zip(&curve_mults)
            .map(|(a, m)| (a + &Rat::one()) / m.clone())
            .min()
            .expect("the tower is nonempty");
        let lct = lct_cusp(3, 7)?;
        checks.push(check(
            "log-canonical-threshold-below-one-half",
            &lct,
            lct < Rat::new(1, 2) && ratio == lct,
        )?);
        // -2K on the first component splits as the strict sextic plus the
        // tower with these coefficients.
        let anti = s.canonical().to_rat().iter().map(|x| x * &Rat::int(-2)).collect::<Vec<_>>();
        let decomposition = s
            .express_in_tracked(&["C1", "F1", "F2", "F3", "F4", "F5"], &anti)?
            .expect("-2K lies in the span");
        let expected: Vec<Rat> = [1, 1, 2, 1, 2, 3].iter().map(|&x| Rat::int(x)).collect();
        checks.push(check(
            "anticanonical-decomposition-on-first-component",
            fmt_rats(&decomposition),
            decomposition == expected,
        )?);

        let cs1 = s1.contracted()?;
        checks.push(check(
            "first-component-singularities",
            fmt_singularities(&cs1.singularities()),
            cs1.singularities()
                == vec![SingularityType::Quotient { r: 7, a: 4 }, SingularityType::A { n: 2 }],
        )?);
        let c1_square = cs1.intersect_down(&ClassExpr::of("C1"), &ClassExpr::of("C1"))?;
        checks.push(check(
            "marked-curve-has-square-minus-one",
            &c1_square,
            c1_square == Rat::int(-1),
        )?);

        let s2 = fiber.lattice("S2")?;
        let cs2 = s2.contracted()?;
        checks.push(check(
            "second-component-singularities",
            fmt_singularities(&cs2.singularities()),
            cs2.singularities()
                == vec![
                    SingularityType::Quotient { r: 7, a: 3 },
                    SingularityType::Quotient { r: 3, a: 1 },
                ],
        )?);
        checks.push(check(
            "second-component-canonical-degree",
            &cs2.k_squared_down,
            cs2.k_squared_down == Rat::new(121, 21),
        )?);
        let meets = cs2.intersect_down(&ClassExpr::of("D"), &ClassExpr::of("G3"))?;
        checks.push(check("curve-meets-double-curve-once", &meets, meets == Rat::one())?);
        let genus = genus_of(s2, "D")?;
        checks.push(check("curve-genus-six", &genus, genus == Rat::int(6))?);

        checks.extend(glueing_checks(
            fiber,
            (&genus_of(s1, "F5")?, &genus_of(s2, "G3")?),
        )?);
    }
    push_step(
        &mut steps,
        fiber,
        "setup",
        "The sextic model degenerates to a curve with four nodes and a \
         y^3 = x^7 cusp. S1 resolves it: four node blow-ups N1..N4, the \
         five-step cusp tower F1..F5, and the chains [F1,F2], [F3,F4] \
         contracted to a 1/7(1,4) and an A2 point on the double curve F5. \
         S2 is the second Hirzebruch surface with the trigonal curve D of \
         class 3e + 7f, blown up three times where the negative section, \
         a fiber, and D meet; its chains contract to 1/7(1,3) and 1/3(1,1) \
         points on the double curve G3.",
        checks,
    )?;

    let mut checks = flip(fiber, "S1", "C1", "S2", "G4", &centers(&[("G3", 1), ("D", 1)]))?;
    checks.push(pair_conservation_check(fiber)?);
    {
        let exhausted = fiber.lattice("S1")?.marked.is_none();
        checks.push(check("marked-curve-exhausted", exhausted, exhausted)?);
        // Downstairs of the flip, the marked class -2(K + F5) acquires
        // fractional multiplicities along the tower.
        let s1 = fiber.lattice("S1")?;
        let cs1 = s1.contracted()?;
        let pb_k = cs1.pullback_canonical();
        let pb_b = cs1.pullback(&ClassExpr::of("F5"))?;
        let limit: Vec<Rat> = pb_k
            .iter()
            .zip(&pb_b)
            .map(|(k, b)| (k + b) * &Rat::int(-2))
            .collect();
        let coefficients = s1
            .surface
            .express_in_tracked(&["C1", "F1", "F2", "F3", "F4", "F5"], &limit)?
            .expect("the limit class lies in the span");
        let expected: Vec<Rat> = vec![
            Rat::one(),
            Rat::new(1, 7),
            Rat::new(2, 7),
            Rat::new(1, 3),
            Rat::new(2, 3),
            Rat::one(),
        ];
        checks.push(check(
            "fractional-pullback-coefficients-across-flip",
            fmt_rats(&coefficients),
            coefficients == expected,
        )?);
    }
    push_step(
        &mut steps,
        fiber,
        "flip",
        "Flip the strict sextic C1, now a (-1)-curve through the two quotient \
         points' curve F5: contract it on S1 and blow up the point of G3 where \
         it lands on S2 (exceptional G4).",
        checks,
    )?;

    let mut checks = Vec::new();
    {
        let s1 = fiber.lattice("S1")?;
        let cs1 = s1.contracted()?;
        let contracted = cs1.contracted_names().len();
        let relative_rank = s1.surface.rank() - contracted;
        checks.push(check("relative-picard-number", relative_rank, relative_rank == 5)?);
    }
    checks.extend(contract_component(fiber, "S1")?);
    push_step(
        &mut steps,
        fiber,
        "contract-component",
        "K + F5 is anti-ample on the blown-down S1 (certificate square 5/21), \
         so the whole component contracts onto its double curve. The relative \
         Picard number of this contraction is five, so the ambient family is \
         far from Q-factorial here.",
        checks,
    )?;

    let mut checks = contract_chains(
        fiber,
        "S2",
        vec![vec![
            "sec".to_string(),
            "G1".to_string(),
            "G2".to_string(),
            "G3".to_string(),
            "fib".to_string(),
        ]],
    )?;
    let k_down = fiber.lattice("S2")?.contracted()?.k_squared_down;
    checks.push(check("canonical-degree-five", &k_down, k_down == Rat::int(5))?);
    push_step(
        &mut steps,
        fiber,
        "contract-chains",
        "The former double curve G3 joins the negative section, the interior \
         exceptional curves, and the fiber into a single [3,2,2,2,3] chain, \
         contracted to a 1/20(1,9) point.",
        checks,
    )?;

    finish_lattice_scenario(
        "trigonal-2-4",
        fiber,
        &mut steps,
        &StratumSpec::TrigonalM2 { a1: 4, rest: vec![] },
    )
}

// ---------------------------------------------------------------------
// Scenario: the branch sextic degenerating to twice a cubic.
// ---------------------------------------------------------------------

fn bielliptic_fiber() -> Result<CentralFiber, ReductionError> {
    let mut s = SurfaceModel::projective_plane();
    s.track("B1", DivisorClass(vec![3]))?;
    for i in 1..=4u32 {
        s.blow_up(&format!("E{i}"), &centers(&[("B1", 1)]))?;
    }
    let first = LatticeComponent {
        name: "S1".to_string(),
        surface: s,
        plan: Vec::new(),
        double_curve: Some("B1".to_string()),
        marked: None,
    };
    let second = DocumentedComponent {
        name: "S2".to_string(),
        description: "minimal resolution of the cone over an elliptic curve of degree five; \
                      the double curve is the negative section"
            .to_string(),
        k_squared: Rat::int(0),
        double_curve_square: Rat::int(-5),
        double_curve_genus: Rat::one(),
    };
    Ok(CentralFiber {
        components: vec![Component::Lattice(first), Component::Documented(second)],
        base_change_order: 1,
    })
}

fn scenario_bielliptic() -> Result<ScenarioOutcome, ReductionError> {
    let fiber = &mut bielliptic_fiber()?;
    let mut steps = Vec::new();

    let mut checks = Vec::new();
    {
        let s1 = fiber.lattice("S1")?;
        let genus = genus_of(s1, "B1")?;
        checks.push(check("double-curve-genus-one", &genus, genus == Rat::one())?);
        let adjoint = s1.surface.canonical().plus(s1.surface.tracked_class("B1")?);
        checks.push(check(
            "adjoint-class-trivial-on-first-component",
            adjoint.is_zero(),
            adjoint.is_zero(),
        )?);
        let documented_genus = match &fiber.components[1] {
            Component::Documented(c) => c.double_curve_genus.clone(),
            Component::Lattice(_) => unreachable!("the second component is documented"),
        };
        checks.extend(glueing_checks(fiber, (&genus, &documented_genus))?);
    }
    push_step(
        &mut steps,
        fiber,
        "setup",
        "The branch sextic degenerates to twice a cubic; blowing up the total \
         space along the reduced cubic inserts S2, the minimal resolution of \
         the cone over the degree-five elliptic curve. S1 is the plane blown \
         up at four points of the cubic B1, so K + B1 = 0 there.",
        checks,
    )?;

    let checks = contract_component(fiber, "S1")?;
    push_step(
        &mut steps,
        fiber,
        "contract-component",
        "K + B1 vanishes identically on S1, which contracts onto the elliptic \
         double curve; the cone side survives.",
        checks,
    )?;

    let report = bielliptic_report();
    let direct = build_pair(&StratumSpec::Bielliptic)?.report;
    let matches = report == direct;
    let checks =
        vec![check("final-report-matches-direct-construction", matches, matches)?];
    push_step(
        &mut steps,
        fiber,
        "final-report",
        "The surviving component is the cone over the degree-five elliptic \
         curve, carrying the bielliptic stable pair.",
        checks,
    )?;

    Ok(ScenarioOutcome {
        scenario: "bielliptic".to_string(),
        base_change_order: fiber.base_change_order,
        steps,
        final_report: report,
    })
}
