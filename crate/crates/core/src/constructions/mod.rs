//! Explicit 2+0 constructions on canonical line pairs of a Hall plane.
//!
//! Each case fixes the canonical pair, the marked point `A1` and a
//! specialization of the unknowns, then gives closed forms for the six points.
//! The forms are evaluated over the basefield, checked against the admissibility
//! constraints, and the resulting sextuple is handed to the plane engine. The
//! intermediate quantities that have closed forms (the slope and intercept of
//! `A1B2`, the cross point `C3`, and the points `B2`, `C2` of the parallel-pair
//! case) are compared with the engine's joins and meets.

mod expr;

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use expr::{Env, Expr, Var, ZeroDenominator};

use crate::configs::{pappus_check, PappusOutcome, Sextuple};
use crate::coordsys::{HallElement, HallSystem};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::plane::{Line, LineClass, LineId, PlaneTables, Point, PointId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionTag {
    /// `y = x(μ,ψ)` and `y = x(0,1)`, with `g = t = z = 0`.
    NbfNbfIntersecting,
    /// `y = x(0,1) + κ` and `y = x(0,1)`, with `g = h = t = 0`.
    NbfNbfParallelI,
    /// As above with `g = t = 0, h = 1`.
    NbfNbfParallelIi,
    /// `x = 0` and `y = x(0,1)`, `γ = 0`, with `e = t = w = 0`.
    BfNbfGammaZero,
    /// `x = 0` and `y = x(0,1)`, `γ ≠ 0`; `j, t, v, w, z` have closed forms.
    BfNbfGammaNonzero,
}

impl ConstructionTag {
    pub const ALL: [ConstructionTag; 5] = [
        ConstructionTag::NbfNbfIntersecting,
        ConstructionTag::NbfNbfParallelI,
        ConstructionTag::NbfNbfParallelIi,
        ConstructionTag::BfNbfGammaZero,
        ConstructionTag::BfNbfGammaNonzero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionTag::NbfNbfIntersecting => "nbf-nbf-intersecting",
            ConstructionTag::NbfNbfParallelI => "nbf-nbf-parallel-i",
            ConstructionTag::NbfNbfParallelIi => "nbf-nbf-parallel-ii",
            ConstructionTag::BfNbfGammaZero => "bf-nbf-gamma-zero",
            ConstructionTag::BfNbfGammaNonzero => "bf-nbf-gamma-nonzero",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Unknowns ranged over by a sweep; the rest are fixed by the specialization
    /// or by closed forms.
    pub fn free_unknowns(self) -> &'static [Var] {
        use Var::*;
        match self {
            ConstructionTag::NbfNbfIntersecting => &[E, J, H, V, W],
            ConstructionTag::NbfNbfParallelI | ConstructionTag::NbfNbfParallelIi => &[E, J, V, W, Z],
            ConstructionTag::BfNbfGammaZero => &[J, G, H, V, Z],
            ConstructionTag::BfNbfGammaNonzero => &[E, G, H],
        }
    }

    fn specialization(self) -> &'static [(Var, Fe)] {
        use Var::*;
        match self {
            ConstructionTag::NbfNbfIntersecting => &[(G, 0), (T, 0), (Z, 0)],
            ConstructionTag::NbfNbfParallelI => &[(G, 0), (H, 0), (T, 0)],
            ConstructionTag::NbfNbfParallelIi => &[(G, 0), (H, 1), (T, 0)],
            ConstructionTag::BfNbfGammaZero => &[(E, 0), (T, 0), (W, 0)],
            ConstructionTag::BfNbfGammaNonzero => &[],
        }
    }

    fn has_cross_points(self) -> bool {
        self != ConstructionTag::BfNbfGammaNonzero
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Parameters {
    pub mu: Fe,
    pub psi: Fe,
    pub kappa: (Fe, Fe),
    pub gamma: Fe,
    pub delta: Fe,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Unknowns {
    pub e: Fe,
    pub j: Fe,
    pub g: Fe,
    pub h: Fe,
    pub t: Fe,
    pub v: Fe,
    pub w: Fe,
    pub z: Fe,
}

impl Unknowns {
    fn from_env(env: &Env) -> Self {
        Self {
            e: env.get(Var::E),
            j: env.get(Var::J),
            g: env.get(Var::G),
            h: env.get(Var::H),
            t: env.get(Var::T),
            v: env.get(Var::V),
            w: env.get(Var::W),
            z: env.get(Var::Z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionCase {
    pub tag: ConstructionTag,
    pub params: Parameters,
    pub unknowns: Unknowns,
}

impl ConstructionCase {
    /// Applies the case's specialization to `unknowns`.
    pub fn new(tag: ConstructionTag, params: Parameters, unknowns: Unknowns) -> Self {
        let mut env = Env::default();
        load_unknowns(&mut env, &unknowns);
        for &(v, x) in tag.specialization() {
            env.set(v, x);
        }
        Self { tag, params, unknowns: Unknowns::from_env(&env) }
    }

    fn env(&self, h: &HallSystem) -> Env {
        let mut env = Env::default();
        env.set(Var::R, h.r());
        env.set(Var::S, h.s());
        env.set(Var::Mu, self.params.mu);
        env.set(Var::Psi, self.params.psi);
        env.set(Var::Kappa1, self.params.kappa.0);
        env.set(Var::Kappa2, self.params.kappa.1);
        env.set(Var::Gamma, self.params.gamma);
        env.set(Var::Delta, self.params.delta);
        load_unknowns(&mut env, &self.unknowns);
        env
    }
}

fn load_unknowns(env: &mut Env, u: &Unknowns) {
    for (v, x) in [
        (Var::E, u.e),
        (Var::J, u.j),
        (Var::G, u.g),
        (Var::H, u.h),
        (Var::T, u.t),
        (Var::V, u.v),
        (Var::W, u.w),
        (Var::Z, u.z),
    ] {
        env.set(v, x);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintSource {
    /// Stated with the construction.
    Stated,
    /// Found necessary by the engine; reported for review.
    Engine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// `ψ ≠ 0`, distinct lines, and the `γ` split between the two BF/NBF cases.
    Parameters,
    /// Denominators in the closed forms of the points and specialized unknowns.
    PointDenominator,
    VNotOne,
    /// `v` is not a root of `sψv² + (−s + μ(μ−r) − sψ)v + s − μ(μ−r)`.
    VQuadratic,
    /// Six distinct points, none at the meet of the two lines.
    Nondegenerate,
    /// The six cross joins have slopes outside the basefield.
    CrossLinesType2,
    /// Denominators of the printed slope, intercept and cross-point forms.
    PrintedDenominator,
    /// Each pair of cross joins meets in an affine point.
    CrossPointsAffine,
    /// The lines `A3B3` and `A3C3` both have slopes outside the basefield, the
    /// branch on which the Pappus line is obtained by equating slopes.
    PappusLineType2,
}

impl Constraint {
    pub const ALL: [Constraint; 9] = [
        Constraint::Parameters,
        Constraint::PointDenominator,
        Constraint::VNotOne,
        Constraint::VQuadratic,
        Constraint::Nondegenerate,
        Constraint::CrossLinesType2,
        Constraint::PrintedDenominator,
        Constraint::CrossPointsAffine,
        Constraint::PappusLineType2,
    ];

    pub fn source(self) -> ConstraintSource {
        match self {
            Constraint::PappusLineType2 => ConstraintSource::Engine,
            _ => ConstraintSource::Stated,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Parameters => "parameters",
            Constraint::PointDenominator => "point-denominator",
            Constraint::VNotOne => "v-not-one",
            Constraint::VQuadratic => "v-quadratic",
            Constraint::Nondegenerate => "nondegenerate",
            Constraint::CrossLinesType2 => "cross-lines-type2",
            Constraint::PrintedDenominator => "printed-denominator",
            Constraint::CrossPointsAffine => "cross-points-affine",
            Constraint::PappusLineType2 => "pappus-line-type2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub source: ConstraintSource,
    pub passed: bool,
    /// The violating value, when the check failed.
    pub detail: Option<String>,
}

/// Checks in evaluation order. Evaluation stops at the first violation, so
/// later constraints may be absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violation(&self) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn pass(&mut self, c: Constraint) {
        self.checks.push(ConstraintCheck { constraint: c, source: c.source(), passed: true, detail: None });
    }

    fn fail(&mut self, c: Constraint, detail: String) {
        self.checks.push(ConstraintCheck { constraint: c, source: c.source(), passed: false, detail: Some(detail) });
    }

    fn check(&mut self, c: Constraint, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if ok {
            self.pass(c);
        } else {
            self.fail(c, detail());
        }
        ok
    }
}

/// An admissible construction and the engine's verdict on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub case: ConstructionCase,
    pub sextuple: Sextuple,
    pub report: ConstraintReport,
    pub outcome: PappusOutcome,
    pub pappus_line_class: Option<LineClass>,
}

struct Formulas {
    /// `x1 x2 y1 y2` of `A1 B1 C1 A2 B2 C2`.
    points: Vec<[Expr; 4]>,
    /// Closed forms for specialized unknowns, evaluated in order.
    unknowns: Vec<(Var, Expr)>,
    /// Printed intermediate quantities, by name.
    printed: Vec<(&'static str, Expr)>,
    v_quadratic: Option<Expr>,
}

const NBF_NBF_INTERSECTING: [[&str; 4]; 6] = [
    ["0", "1", "-f(mu)/psi", "r - mu"],
    ["gamma", "delta", "gamma mu - f(mu) delta/psi", "delta (r - mu) + gamma psi"],
    ["e", "j", "e mu - f(mu) j/psi", "j (r - mu) + e psi"],
    ["0", "h", "s h", "r h"],
    ["0", "v", "s v", "r v"],
    ["w", "0", "0", "w"],
];

const NBF_NBF_INTERSECTING_PRINTED: [(&str, &str); 8] = [
    ("m1", "mu/(1 - v)"),
    ("m2", "(s (-1 + v)^2 - mu (r (-1 + v) + mu)) psi /( (-1 + v) ( mu (-r + mu) + s (-1 + v psi)))"),
    ("k1", "v (s + (r - mu) mu - s psi)/ ((-1 + v) psi)"),
    ("k2", "v mu / (1 - v)"),
    (
        "x1",
        "-( gamma (v - h) h ( mu (-r + mu ) + s (-1 + v psi )))/(-s (-v delta + h)^2 + (v delta mu - h mu - v gamma psi ) (r (-v delta + h) + v delta mu - h mu - v gamma psi ))",
    ),
    (
        "x2",
        "(s ( delta h^2 + v^2 delta ( delta - h + delta h) - v h ( delta + delta ^2 - h + delta h)) - v^2 delta ^2 mu ^2 + v delta h mu ^2 + v^2 delta h mu ^2 + v delta ^2 h mu ^2 - v^2 delta ^2 h mu ^2 - v h^2 mu ^2 - delta h^2 mu ^2 + v delta h^2 mu ^2 + 2 v^2 gamma delta mu psi - v^2 gamma h mu psi - 2 v gamma delta h mu psi + 2 v^2 gamma delta h mu psi - v gamma h^2 mu psi - v^2 gamma ^2 psi ^2 + v gamma ^2 h psi ^2 - v^2 gamma ^2 h psi ^2 + r (- delta h + v ( delta - h + delta h)) (v delta mu - h mu - v gamma psi ) )/(s (-v delta + h)^2 + (v delta mu - h mu - v gamma psi ) (r v delta - r h - v delta mu + h mu + v gamma psi ) )",
    ),
    (
        "y1",
        "(-(v - h) (r - mu ) mu (r delta - delta mu + gamma psi ) (v delta mu - h mu - v gamma psi ) - s^2 (v delta - h) (- delta h + v ( delta - h psi + delta h psi )) + s (h^2 mu (2 delta mu - gamma psi ) + v^2 ( delta ^2 mu ^2 (2 + h psi ) + gamma psi ^2 ( gamma + h mu + gamma h psi ) - delta mu psi (h mu + 2 gamma (1 + h psi ))) + r (-2 delta h^2 mu + v h (2 delta ^2 mu - gamma delta psi - h mu psi + delta mu (2 + h psi )) + v^2 (- gamma h psi ^2 - delta ^2 mu (2 + h psi ) + delta psi ( gamma + h mu + gamma h psi ))) + v h (-2 delta ^2 mu ^2 - delta mu (-2 gamma psi + mu (2 + h psi )) + psi (h mu ^2 - gamma ^2 psi + gamma ( mu + h mu psi )))) )/( psi (-s (-v delta + h)^2 + (v delta mu - h mu - v gamma psi ) (r (-v delta + h) + v delta mu - h mu - v gamma psi )) )",
    ),
    (
        "y2",
        "(-r^2 (- delta h + v ( delta - h + delta h)) (v delta mu - h mu - v gamma psi ) - (v - h) ( mu ( delta mu - gamma psi ) (v delta mu - h mu - v gamma psi ) + s (-v delta ^2 mu + delta h mu - gamma h psi + v gamma h psi )) + r (s (- delta h^2 - v^2 delta ( delta - h + delta h) + v h ( delta + delta ^2 - h + delta h)) + h^2 mu (2 delta mu - gamma psi ) + v^2 ( delta mu - gamma psi ) ( delta (2 + h) mu - gamma psi - h ( mu + gamma psi )) + v h (-2 delta ^2 mu ^2 - delta mu ((2 + h) mu - 3 gamma psi ) + gamma psi ( mu - gamma psi ) + h mu ( mu + gamma psi ))) )/(-s (-v delta + h)^2 + (v delta mu - h mu - v gamma psi ) (r (-v delta + h) + v delta mu - h mu - v gamma psi ) )",
    ),
];

const V_QUADRATIC: &str = "s psi v^2 + (-s + mu (-r + mu) - s psi) v + s - mu (-r + mu)";

const NBF_NBF_PARALLEL_I: [[&str; 4]; 6] = [
    ["0", "1", "kappa1 + s", "kappa2 + r"],
    ["gamma", "delta", "kappa1 + s delta", "kappa2 + gamma + r delta"],
    ["e", "j", "kappa1 + s j", "kappa2 + e + r j"],
    ["0", "0", "0", "0"],
    ["0", "v", "s v", "r v"],
    ["w", "z", "s z", "w + r z"],
];

const NBF_NBF_PARALLEL_II: [[&str; 4]; 6] = [
    ["0", "1", "kappa1 + s", "kappa2 + r"],
    ["gamma", "delta", "kappa1 + s delta", "kappa2 + gamma + r delta"],
    ["e", "j", "kappa1 + s j", "kappa2 + e + r j"],
    ["0", "1", "s", "r"],
    ["0", "v", "s v", "r v"],
    ["w", "z", "s z", "w + r z"],
];

const BF_NBF_GAMMA_ZERO: [[&str; 4]; 6] = [
    ["0", "0", "0", "1"],
    ["0", "0", "0", "delta"],
    ["0", "0", "0", "j"],
    ["g", "h", "s h", "g + r h"],
    ["0", "v", "s v", "r v"],
    ["0", "z", "s z", "r z"],
];

const GAMMA_E: &str = "( gamma ^2 + r gamma delta - s delta ^2)";
const GAMMA_G: &str =
    "(s ( gamma + (-1 + delta ) e)^2 - gamma e ( gamma e + r ( gamma + (-1 + delta ) e)))";

fn bf_nbf_gamma_nonzero_points() -> [[String; 4]; 6] {
    let over_e = |n: &str| format!("({n})/{GAMMA_E}");
    let over_g = |n: &str| format!("({n})/{GAMMA_G}");
    let s = |x: &str| x.to_string();
    [
        [s("0"), s("0"), s("0"), s("1")],
        [s("0"), s("0"), s("gamma"), s("delta")],
        [s("0"), s("0"), s("e"), s("( gamma - e + delta e)/ gamma")],
        [s("g"), s("h"), s("s h"), s("g + r h")],
        [
            over_e("gamma ^2 + r gamma g - s delta g - s gamma h"),
            over_e("gamma delta - gamma g - s delta h"),
            over_e("s( gamma ( delta - g) - s delta h)"),
            over_e("gamma ^2 - s delta (g + r h) + gamma (r delta - s h)"),
        ],
        [
            over_g("gamma (s (-1 + delta ) e g + gamma (-e^2 + s g - r e g + s e h))"),
            over_g("gamma ( gamma e (-1 + g) + s gamma h - (-1 + delta ) e (e - s h))"),
            over_g("s gamma ( gamma e (-1 + g) + s gamma h - (-1 + delta ) e (e - s h))"),
            over_g("gamma ((-e^2 - e g r + g s + e h s) gamma + e g s (-1 + delta )) + r gamma (e (-1 + g) gamma + h s gamma - e (e - h s) (-1 + delta ))"),
        ],
    ]
}

fn bf_nbf_gamma_nonzero_unknowns() -> Vec<(Var, String)> {
    vec![
        (Var::J, "( gamma - e + delta e)/ gamma".to_string()),
        (Var::T, format!("( gamma ^2 + r gamma g - s delta g - s gamma h)/{GAMMA_E}")),
        (Var::V, format!("( gamma delta - gamma g - s delta h)/{GAMMA_E}")),
        (Var::W, format!("( gamma (s (-1 + delta ) e g + gamma (-e^2 + s g - r e g + s e h)))/{GAMMA_G}")),
        (Var::Z, format!("( gamma ( gamma e (-1 + g) + s gamma h - (-1 + delta ) e (e - s h)))/{GAMMA_G}")),
    ]
}

fn parse(src: &str) -> Expr {
    Expr::parse(src).unwrap_or_else(|e| panic!("formula table: {e}"))
}

fn parse_points<S: AsRef<str>>(rows: &[[S; 4]; 6]) -> Vec<[Expr; 4]> {
    rows.iter().map(|r| [0, 1, 2, 3].map(|i| parse(r[i].as_ref()))).collect()
}

fn formulas(tag: ConstructionTag) -> &'static Formulas {
    static TABLES: OnceLock<Vec<Formulas>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        ConstructionTag::ALL
            .iter()
            .map(|&t| {
                let mut f = Formulas { points: Vec::new(), unknowns: Vec::new(), printed: Vec::new(), v_quadratic: None };
                match t {
                    ConstructionTag::NbfNbfIntersecting => {
                        f.points = parse_points(&NBF_NBF_INTERSECTING);
                        f.printed = NBF_NBF_INTERSECTING_PRINTED.iter().map(|&(n, s)| (n, parse(s))).collect();
                        f.v_quadratic = Some(parse(V_QUADRATIC));
                    }
                    ConstructionTag::NbfNbfParallelI => f.points = parse_points(&NBF_NBF_PARALLEL_I),
                    ConstructionTag::NbfNbfParallelIi => f.points = parse_points(&NBF_NBF_PARALLEL_II),
                    ConstructionTag::BfNbfGammaZero => f.points = parse_points(&BF_NBF_GAMMA_ZERO),
                    ConstructionTag::BfNbfGammaNonzero => {
                        f.points = parse_points(&bf_nbf_gamma_nonzero_points());
                        f.unknowns = bf_nbf_gamma_nonzero_unknowns().iter().map(|(v, s)| (*v, parse(s))).collect();
                    }
                }
                f
            })
            .collect()
    });
    &tables[ConstructionTag::ALL.iter().position(|&t| t == tag).unwrap()]
}

/// The canonical pair of a case, as `(ℓ1, ℓ2)`.
pub fn canonical_lines(plane: &PlaneTables, case: &ConstructionCase) -> Result<(LineId, LineId)> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let el = |a, b| h.index(HallElement::new(a, b));
    let p = case.params;
    let l2 = plane.line_id(Line::Slanted { m: el(0, 1), k: 0 });
    let l1 = match case.tag {
        ConstructionTag::NbfNbfIntersecting => Line::Slanted { m: el(p.mu, p.psi), k: 0 },
        ConstructionTag::NbfNbfParallelI | ConstructionTag::NbfNbfParallelIi => {
            Line::Slanted { m: el(0, 1), k: el(p.kappa.0, p.kappa.1) }
        }
        ConstructionTag::BfNbfGammaZero | ConstructionTag::BfNbfGammaNonzero => Line::Vertical(0),
    };
    Ok((plane.line_id(l1), l2))
}

fn parameters_ok(case: &ConstructionCase) -> std::result::Result<(), String> {
    let p = case.params;
    match case.tag {
        ConstructionTag::NbfNbfIntersecting if p.psi == 0 => Err("psi = 0".into()),
        ConstructionTag::NbfNbfIntersecting if (p.mu, p.psi) == (0, 1) => Err("lines coincide".into()),
        ConstructionTag::NbfNbfParallelI | ConstructionTag::NbfNbfParallelIi if p.kappa == (0, 0) => {
            Err("kappa = 0".into())
        }
        ConstructionTag::BfNbfGammaZero if p.gamma != 0 => Err(format!("gamma = {} in the gamma = 0 case", p.gamma)),
        ConstructionTag::BfNbfGammaNonzero if p.gamma == 0 => Err("gamma = 0 in the gamma != 0 case".into()),
        _ => Ok(()),
    }
}

enum Step {
    /// The sextuple is kept when only an engine-found constraint failed.
    Excluded(ConstraintReport, Option<Sextuple>),
    Admissible(Box<Construction>),
}

/// Evaluates the closed forms, checks every constraint, compares the printed
/// quantities with the engine and runs the Pappus check.
///
/// Returns `ConstraintViolated` if a constraint fails and `FormulaMismatch` if a
/// closed form disagrees with the engine.
pub fn evaluate_case(plane: &PlaneTables, case: &ConstructionCase) -> Result<Construction> {
    match evaluate(plane, case)? {
        Step::Admissible(c) => Ok(*c),
        Step::Excluded(report, _) => {
            let v = report.violation().expect("excluded without a violation");
            Err(Error::ConstraintViolated(format!(
                "{}: {}",
                v.constraint.name(),
                v.detail.as_deref().unwrap_or("")
            )))
        }
    }
}

/// Constraint checks for `case`. Fails only if a closed form disagrees with
/// the engine.
pub fn check_constraints(plane: &PlaneTables, case: &ConstructionCase) -> Result<ConstraintReport> {
    match evaluate(plane, case) {
        Ok(Step::Admissible(c)) => Ok(c.report),
        Ok(Step::Excluded(r, _)) => Ok(r),
        Err(e) => Err(e),
    }
}

fn evaluate(plane: &PlaneTables, case: &ConstructionCase) -> Result<Step> {
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let field = h.basefield();
    let forms = formulas(case.tag);
    let mut report = ConstraintReport::default();
    macro_rules! bail {
        () => {
            return Ok(Step::Excluded(report, None))
        };
    }

    if !report.check(Constraint::Parameters, parameters_ok(case).is_ok(), || parameters_ok(case).unwrap_err()) {
        bail!();
    }
    let (l1, l2) = canonical_lines(plane, case)?;

    let mut env = case.env(h);
    for &(v, x) in case.tag.specialization() {
        if env.get(v) != x {
            report.fail(Constraint::Parameters, format!("{v:?} must be specialized to {x}"));
            bail!();
        }
    }
    let mut pts = [0u16; 6];
    let evaluated: std::result::Result<(), ZeroDenominator> = (|| {
        for (var, e) in &forms.unknowns {
            let x = e.eval(field, &env)?;
            env.set(*var, x);
        }
        for (i, f) in forms.points.iter().enumerate() {
            let c = f.each_ref().map(|e| e.eval(field, &env));
            let [x1, x2, y1, y2] = [c[0].clone()?, c[1].clone()?, c[2].clone()?, c[3].clone()?];
            let x = h.index(HallElement::new(x1, x2));
            let y = h.index(HallElement::new(y1, y2));
            pts[i] = plane.point_id(Point::Affine { x, y }).0;
        }
        Ok(())
    })();
    if let Err(z) = evaluated {
        report.fail(Constraint::PointDenominator, z.to_string());
        bail!();
    }
    report.pass(Constraint::PointDenominator);
    let case = ConstructionCase { unknowns: Unknowns::from_env(&env), ..*case };

    for (i, &p) in pts.iter().enumerate() {
        let line = if i < 3 { l1 } else { l2 };
        if !plane.incident_raw(p, line.0) {
            return Err(Error::FormulaMismatch(format!(
                "point {} = {:?} is not on its line",
                ["A1", "B1", "C1", "A2", "B2", "C2"][i],
                plane.point(PointId(p))
            )));
        }
    }

    if let Some(q) = &forms.v_quadratic {
        let v = env.get(Var::V);
        if !report.check(Constraint::VNotOne, v != 1, || "v = 1".into()) {
            bail!();
        }
        let value = q.eval(field, &env).expect("polynomial");
        if !report.check(Constraint::VQuadratic, value != 0, || format!("v = {v} is a root")) {
            bail!();
        }
    }

    let meet = plane.meet_raw(l1.0, l2.0);
    let distinct = (0..6).all(|i| pts[i + 1..].iter().all(|&p| p != pts[i]));
    let degenerate = !distinct || pts.contains(&meet);
    if !report.check(Constraint::Nondegenerate, !degenerate, || format!("points {pts:?}, meet {meet}")) {
        bail!();
    }

    let [a1, b1, c1, a2, b2, c2] = pts;
    let joins = [(a1, b2), (a2, b1), (a1, c2), (a2, c1), (b1, c2), (b2, c1)].map(|(p, q)| plane.join_raw(p, q));
    let bad = joins.iter().position(|&l| plane.class(LineId(l)) != LineClass::Nbf);
    if !report.check(Constraint::CrossLinesType2, bad.is_none(), || {
        format!("cross join {} has a basefield slope", ["A1B2", "A2B1", "A1C2", "A2C1", "B1C2", "B2C1"][bad.unwrap()])
    }) {
        bail!();
    }

    let mut printed = BTreeMap::new();
    if !forms.printed.is_empty() {
        for (name, e) in &forms.printed {
            match e.eval(field, &env) {
                Ok(x) => {
                    printed.insert(*name, x);
                }
                Err(z) => {
                    report.fail(Constraint::PrintedDenominator, format!("{name}: {z}"));
                    bail!();
                }
            }
        }
        report.pass(Constraint::PrintedDenominator);
    }

    let c3 = plane.meet_raw(joins[0], joins[1]);
    let b3 = plane.meet_raw(joins[2], joins[3]);
    let a3 = plane.meet_raw(joins[4], joins[5]);
    let affine = |p: u16| (p as usize) < plane.order() * plane.order();
    if case.tag.has_cross_points() {
        let all_affine = [a3, b3, c3].into_iter().all(affine);
        if !report.check(Constraint::CrossPointsAffine, all_affine, || "a cross point is at infinity".into()) {
            bail!();
        }
        let type2 = |p, q| plane.class(LineId(plane.join_raw(p, q))) == LineClass::Nbf;
        if !report.check(Constraint::PappusLineType2, type2(a3, b3) && type2(a3, c3), || {
            "A3B3 or A3C3 has a basefield slope or is vertical".into()
        }) {
            return Ok(Step::Excluded(report, Some(Sextuple::from_raw(l1, l2, pts))));
        }
    }

    compare_printed(plane, h, &printed, a1, b2, c3)?;
    if case.tag == ConstructionTag::BfNbfGammaNonzero {
        compare_parallel_construction(plane, &env, l2, pts)?;
    }

    let sextuple = Sextuple::from_raw(l1, l2, pts);
    let outcome = pappus_check(plane, &sextuple)?;
    if case.tag == ConstructionTag::BfNbfGammaNonzero {
        let inf = plane.infinity_line();
        if outcome.pappus_line != Some(inf) || ![a3, b3, c3].iter().all(|&p| !affine(p)) {
            return Err(Error::FormulaMismatch(format!(
                "cross joins are not parallel in pairs (cross points {a3}, {b3}, {c3})"
            )));
        }
    }
    let pappus_line_class = outcome.pappus_line.map(|l| plane.class(l));
    Ok(Step::Admissible(Box::new(Construction { case, sextuple, report, outcome, pappus_line_class })))
}

fn compare_printed(
    plane: &PlaneTables,
    h: &HallSystem,
    printed: &BTreeMap<&str, Fe>,
    a1: u16,
    b2: u16,
    c3: u16,
) -> Result<()> {
    if printed.is_empty() {
        return Ok(());
    }
    let get = |n: &str| printed[n];
    let Line::Slanted { m, k } = plane.line(LineId(plane.join_raw(a1, b2))) else {
        return Err(Error::FormulaMismatch("A1B2 is not slanted".into()));
    };
    let (m, k) = (h.element(m), h.element(k));
    if (m.a1, m.a2, k.a1, k.a2) != (get("m1"), get("m2"), get("k1"), get("k2")) {
        return Err(Error::FormulaMismatch(format!(
            "A1B2: engine slope {m}, intercept {k}; closed forms ({}, {}), ({}, {})",
            get("m1"),
            get("m2"),
            get("k1"),
            get("k2")
        )));
    }
    let Point::Affine { x, y } = plane.point(PointId(c3)) else {
        return Err(Error::FormulaMismatch("C3 is at infinity".into()));
    };
    let (x, y) = (h.element(x), h.element(y));
    if (x.a1, x.a2, y.a1, y.a2) != (get("x1"), get("x2"), get("y1"), get("y2")) {
        return Err(Error::FormulaMismatch(format!(
            "C3: engine ({x}, {y}); closed forms ({}, {}), ({}, {})",
            get("x1"),
            get("x2"),
            get("y1"),
            get("y2")
        )));
    }
    Ok(())
}

/// `B2` and `C2` are the points of `ℓ2` on the parallels through `A1` to
/// `A2B1` and `A2C1`; the closed forms for `t, v, w, z` are their `x`
/// coordinates.
fn compare_parallel_construction(plane: &PlaneTables, env: &Env, l2: LineId, pts: [u16; 6]) -> Result<()> {
    let [a1, b1, c1, a2, b2, c2] = pts;
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let inf = plane.infinity_line().0;
    let through_parallel = |p: u16, q: u16| {
        let dir = plane.meet_raw(plane.join_raw(p, q), inf);
        plane.meet_raw(plane.join_raw(a1, dir), l2.0)
    };
    for (name, point, expected, xs) in [
        ("B2", b2, through_parallel(a2, b1), (Var::T, Var::V)),
        ("C2", c2, through_parallel(a2, c1), (Var::W, Var::Z)),
    ] {
        if point != expected {
            return Err(Error::FormulaMismatch(format!(
                "{name}: closed form {:?}, engine {:?}",
                plane.point(PointId(point)),
                plane.point(PointId(expected))
            )));
        }
        let Point::Affine { x, .. } = plane.point(PointId(point)) else { unreachable!("affine point") };
        let x = h.element(x);
        if (x.a1, x.a2) != (env.get(xs.0), env.get(xs.1)) {
            return Err(Error::FormulaMismatch(format!(
                "{name}: x = {x} but the unknowns give ({}, {})",
                env.get(xs.0),
                env.get(xs.1)
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterTally {
    pub params: Parameters,
    pub assignments: u64,
    pub admissible: u64,
    pub pappus: u64,
    /// Pappus assignments passing every stated constraint, whatever the
    /// engine-found ones say.
    pub stated_pappus: u64,
    /// `A1` and `B1` coincide or one of them is the meet of the lines, so no
    /// assignment can be nondegenerate.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExclusionTally {
    pub constraint: Constraint,
    pub source: ConstraintSource,
    pub count: u64,
    /// For engine-found constraints, how many excluded sextuples are Pappus
    /// anyway.
    pub pappus: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub tag: ConstructionTag,
    pub q: usize,
    pub r: Fe,
    pub s: Fe,
    /// Every `stride`-th unknown assignment was evaluated; 1 is exhaustive.
    pub stride: u64,
    pub assignments: u64,
    pub admissible: u64,
    pub pappus: u64,
    /// Admissible assignments the engine found not to be Pappus.
    pub non_pappus: Vec<ConstructionCase>,
    /// Exclusions by the first violated constraint.
    pub exclusions: Vec<ExclusionTally>,
    /// Engine-found exclusions, listed for review.
    pub flagged: Vec<ExclusionTally>,
    pub mismatches: u64,
    pub first_mismatch: Option<String>,
    /// Pappus line classes over admissible Pappus assignments.
    pub pappus_line_classes: BTreeMap<String, u64>,
    pub parameter_choices: Vec<ParameterTally>,
    /// Nondegenerate parameter choices with no admissible assignment.
    pub uncovered: Vec<Parameters>,
    /// Nondegenerate parameter choices where no assignment passing the stated
    /// constraints gives a Pappus configuration.
    pub no_pappus_construction: Vec<Parameters>,
    pub elapsed_ms: u64,
}

impl SweepSummary {
    pub fn all_pappus(&self) -> bool {
        self.admissible > 0 && self.pappus == self.admissible && self.mismatches == 0
    }
}

/// All parameter choices of a case, in sweep order.
pub fn parameter_choices(tag: ConstructionTag, q: usize) -> Vec<Parameters> {
    let q = q as Fe;
    let mut out = Vec::new();
    let base = Parameters::default();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let p = match tag {
                        ConstructionTag::NbfNbfIntersecting => Parameters { mu: a, psi: b, gamma: c, delta: d, ..base },
                        ConstructionTag::NbfNbfParallelI | ConstructionTag::NbfNbfParallelIi => {
                            Parameters { kappa: (a, b), gamma: c, delta: d, ..base }
                        }
                        _ if a > 0 || b > 0 => continue,
                        _ => Parameters { gamma: c, delta: d, ..base },
                    };
                    let case = ConstructionCase::new(tag, p, Unknowns::default());
                    if parameters_ok(&case).is_ok() {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn unknowns_at(tag: ConstructionTag, q: usize, mut idx: u64) -> Unknowns {
    let mut env = Env::default();
    for &v in tag.free_unknowns().iter().rev() {
        env.set(v, (idx % q as u64) as Fe);
        idx /= q as u64;
    }
    Unknowns::from_env(&env)
}

fn parameter_degenerate(plane: &PlaneTables, tag: ConstructionTag, params: Parameters) -> bool {
    let forms = formulas(tag);
    let h = plane.hall_system().expect("hall plane");
    let case = ConstructionCase::new(tag, params, Unknowns::default());
    let Ok((l1, l2)) = canonical_lines(plane, &case) else { return true };
    let env = case.env(h);
    let point = |row: &[Expr; 4]| -> Option<u16> {
        let c: Vec<Fe> = row.iter().map(|e| e.eval(h.basefield(), &env).ok()).collect::<Option<_>>()?;
        let x = h.index(HallElement::new(c[0], c[1]));
        let y = h.index(HallElement::new(c[2], c[3]));
        Some(plane.point_id(Point::Affine { x, y }).0)
    };
    let meet = plane.meet_raw(l1.0, l2.0);
    match (point(&forms.points[0]), point(&forms.points[1])) {
        (Some(a), Some(b)) => a == b || a == meet || b == meet,
        _ => true,
    }
}

/// Evaluates every parameter choice against every `stride`-th unknown
/// assignment and tallies admissibility, Pappus verdicts and engine agreement.
pub fn sweep_case(plane: &PlaneTables, tag: ConstructionTag, stride: u64) -> Result<SweepSummary> {
    let start = Instant::now();
    let h = plane.hall_system().ok_or(Error::NotHall)?;
    let q = h.q();
    let stride = stride.max(1);
    let params = parameter_choices(tag, q);
    let total = (q as u64).pow(tag.free_unknowns().len() as u32);

    struct Partial {
        tally: ParameterTally,
        exclusions: BTreeMap<Constraint, (u64, u64)>,
        non_pappus: Vec<ConstructionCase>,
        mismatches: u64,
        first_mismatch: Option<String>,
        classes: BTreeMap<String, u64>,
    }

    let partials: Vec<Partial> = params
        .par_iter()
        .enumerate()
        .map(|(pi, &p)| {
            let mut part = Partial {
                tally: ParameterTally {
                    params: p,
                    assignments: 0,
                    admissible: 0,
                    pappus: 0,
                    stated_pappus: 0,
                    degenerate: parameter_degenerate(plane, tag, p),
                },
                exclusions: BTreeMap::new(),
                non_pappus: Vec::new(),
                mismatches: 0,
                first_mismatch: None,
                classes: BTreeMap::new(),
            };
            let offset = pi as u64 % stride;
            let mut idx = offset;
            while idx < total {
                let case = ConstructionCase::new(tag, p, unknowns_at(tag, q, idx));
                idx += stride;
                part.tally.assignments += 1;
                match evaluate(plane, &case) {
                    Ok(Step::Excluded(report, sextuple)) => {
                        let c = report.violation().expect("violation").constraint;
                        let e = part.exclusions.entry(c).or_default();
                        e.0 += 1;
                        if let Some(sx) = sextuple {
                            if pappus_check(plane, &sx).is_ok_and(|o| o.is_pappus) {
                                e.1 += 1;
                                part.tally.stated_pappus += 1;
                            }
                        }
                    }
                    Ok(Step::Admissible(c)) => {
                        part.tally.admissible += 1;
                        if c.outcome.is_pappus {
                            part.tally.pappus += 1;
                            part.tally.stated_pappus += 1;
                            let class = c.pappus_line_class.map_or("none".to_string(), |k| format!("{k:?}"));
                            *part.classes.entry(class).or_default() += 1;
                        } else if part.non_pappus.len() < 16 {
                            part.non_pappus.push(c.case);
                        }
                    }
                    Err(e) => {
                        part.mismatches += 1;
                        part.first_mismatch.get_or_insert_with(|| format!("{case:?}: {e}"));
                    }
                }
            }
            part
        })
        .collect();

    let mut exclusions: BTreeMap<Constraint, (u64, u64)> = BTreeMap::new();
    let mut summary = SweepSummary {
        tag,
        q,
        r: h.r(),
        s: h.s(),
        stride,
        assignments: 0,
        admissible: 0,
        pappus: 0,
        non_pappus: Vec::new(),
        exclusions: Vec::new(),
        flagged: Vec::new(),
        mismatches: 0,
        first_mismatch: None,
        pappus_line_classes: BTreeMap::new(),
        parameter_choices: Vec::new(),
        uncovered: Vec::new(),
        no_pappus_construction: Vec::new(),
        elapsed_ms: 0,
    };
    for part in partials {
        summary.assignments += part.tally.assignments;
        summary.admissible += part.tally.admissible;
        summary.pappus += part.tally.pappus;
        summary.mismatches += part.mismatches;
        if summary.first_mismatch.is_none() {
            summary.first_mismatch = part.first_mismatch;
        }
        for (c, (n, k)) in part.exclusions {
            let e = exclusions.entry(c).or_default();
            e.0 += n;
            e.1 += k;
        }
        for (k, n) in part.classes {
            *summary.pappus_line_classes.entry(k).or_default() += n;
        }
        let room = 16usize.saturating_sub(summary.non_pappus.len());
        summary.non_pappus.extend(part.non_pappus.into_iter().take(room));
        if !part.tally.degenerate && part.tally.admissible == 0 {
            summary.uncovered.push(part.tally.params);
        }
        if !part.tally.degenerate && part.tally.stated_pappus == 0 {
            summary.no_pappus_construction.push(part.tally.params);
        }
        summary.parameter_choices.push(part.tally);
    }
    for (constraint, (count, pappus)) in exclusions {
        let source = constraint.source();
        let pappus = (source == ConstraintSource::Engine).then_some(pappus);
        let t = ExclusionTally { constraint, source, count, pappus };
        if t.source == ConstraintSource::Engine {
            summary.flagged.push(t.clone());
        }
        summary.exclusions.push(t);
    }
    summary.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimePowerField;

    fn plane(p: u32) -> PlaneTables {
        PlaneTables::hall(HallSystem::new(PrimePowerField::new(p, 1).unwrap())).unwrap()
    }

    fn unknowns(e: Fe, j: Fe, h: Fe, v: Fe, w: Fe) -> Unknowns {
        Unknowns { e, j, h, v, w, ..Unknowns::default() }
    }

    #[test]
    fn formula_tables_parse() {
        for tag in ConstructionTag::ALL {
            assert_eq!(formulas(tag).points.len(), 6);
        }
        assert_eq!(formulas(ConstructionTag::NbfNbfIntersecting).printed.len(), 8);
        assert_eq!(formulas(ConstructionTag::BfNbfGammaNonzero).unknowns.len(), 5);
    }

    #[test]
    fn specialization_is_applied() {
        let c = ConstructionCase::new(
            ConstructionTag::NbfNbfParallelIi,
            Parameters::default(),
            Unknowns { g: 3, h: 3, t: 3, ..Unknowns::default() },
        );
        assert_eq!((c.unknowns.g, c.unknowns.h, c.unknowns.t), (0, 1, 0));
    }

    #[test]
    fn v_equal_one_is_rejected() {
        let pl = plane(5);
        let p = Parameters { mu: 2, psi: 3, gamma: 1, delta: 2, ..Parameters::default() };
        let case = ConstructionCase::new(ConstructionTag::NbfNbfIntersecting, p, unknowns(3, 4, 2, 1, 2));
        assert!(matches!(evaluate_case(&pl, &case), Err(Error::ConstraintViolated(m)) if m.starts_with("v-not-one")));
        let report = check_constraints(&pl, &case).unwrap();
        assert_eq!(report.violation().unwrap().constraint, Constraint::VNotOne);
    }

    /// Admissible constructions for a few intersecting NBF/NBF parameter choices.
    fn admissible_intersecting(pl: &PlaneTables) -> Vec<Construction> {
        let mut out = Vec::new();
        for p in parameter_choices(ConstructionTag::NbfNbfIntersecting, 5).into_iter().step_by(37) {
            for idx in 0..5u64.pow(5) {
                let u = unknowns_at(ConstructionTag::NbfNbfIntersecting, 5, idx);
                let case = ConstructionCase::new(ConstructionTag::NbfNbfIntersecting, p, u);
                match evaluate_case(pl, &case) {
                    Ok(c) => out.push(c),
                    Err(Error::ConstraintViolated(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        out
    }

    #[test]
    fn slope_of_a1b2_matches_closed_form() {
        let pl = plane(5);
        let h = pl.hall_system().unwrap();
        let f = h.basefield();
        let found = admissible_intersecting(&pl);
        assert!(!found.is_empty());
        for c in &found {
            let (mu, v) = (c.case.params.mu, c.case.unknowns.v);
            let Line::Slanted { m, .. } = pl.line(pl.join(c.sextuple.a1, c.sextuple.b2).unwrap()) else {
                panic!("A1B2 vertical for {:?}", c.case);
            };
            assert_eq!(h.element(m).a1, f.div(mu, f.sub(1, v)).unwrap(), "{:?}", c.case);
        }
    }

    #[test]
    fn admissible_case_agrees_with_engine() {
        let pl = plane(5);
        let found = admissible_intersecting(&pl);
        assert!(!found.is_empty());
        for c in &found {
            assert!(c.report.passed());
            assert!(c.outcome.is_pappus);
            assert_eq!(pappus_check(&pl, &c.sextuple).unwrap(), c.outcome);
        }
    }

    #[test]
    fn gamma_nonzero_case_has_pappus_line_at_infinity() {
        let pl = plane(5);
        let p = Parameters { gamma: 2, delta: 3, ..Parameters::default() };
        let mut found = 0;
        for g in 0..5 {
            for hh in 0..5 {
                let case =
                    ConstructionCase::new(ConstructionTag::BfNbfGammaNonzero, p, Unknowns { e: 1, g, h: hh, ..Unknowns::default() });
                if let Ok(c) = evaluate_case(&pl, &case) {
                    assert_eq!(c.outcome.pappus_line, Some(pl.infinity_line()));
                    found += 1;
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn small_sweeps_are_all_pappus() {
        let pl = plane(5);
        for tag in [ConstructionTag::BfNbfGammaZero, ConstructionTag::BfNbfGammaNonzero] {
            let s = sweep_case(&pl, tag, 1).unwrap();
            assert!(s.all_pappus(), "{tag:?}: {s:?}");
            assert!(s.uncovered.is_empty());
        }
    }

    #[test]
    fn parameter_choice_counts() {
        assert_eq!(parameter_choices(ConstructionTag::NbfNbfIntersecting, 5).len(), 19 * 25);
        assert_eq!(parameter_choices(ConstructionTag::NbfNbfParallelI, 5).len(), 24 * 25);
        assert_eq!(parameter_choices(ConstructionTag::BfNbfGammaZero, 5).len(), 5);
        assert_eq!(parameter_choices(ConstructionTag::BfNbfGammaNonzero, 5).len(), 20);
    }
}
