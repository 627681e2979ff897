//! The `k+m` questions. Work is split into units over the points given on the
//! first line; units run in parallel in fixed-size chunks and are merged in
//! order, so verdicts, counts and witnesses do not depend on the thread count.
//!
//! The questions quantify over point sets. On the first line the three points
//! are labelled in ascending id order; the second line's points take every
//! labelling, which covers every way of pairing the two triples.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{candidates, holds, pappus_check_mode, LinePair, Mode, PointScope, Sextuple};
use crate::collineations::PairCase;
use crate::error::{Error, Result};
use crate::plane::{LineId, PlaneTables, PointId};

const CHUNK: usize = 32;

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Question {
    #[serde(rename = "3p3")]
    ThreePlusThree,
    #[serde(rename = "3p2")]
    ThreePlusTwo,
    #[serde(rename = "3p1")]
    ThreePlusOne,
    #[serde(rename = "3p0")]
    ThreePlusZero,
    #[serde(rename = "2p0")]
    TwoPlusZero,
    #[serde(rename = "count")]
    Count,
}

impl Question {
    pub const ALL: [Question; 6] = [
        Question::ThreePlusThree,
        Question::ThreePlusTwo,
        Question::ThreePlusOne,
        Question::ThreePlusZero,
        Question::TwoPlusZero,
        Question::Count,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Question::ThreePlusThree => "3p3",
            Question::ThreePlusTwo => "3p2",
            Question::ThreePlusOne => "3p1",
            Question::ThreePlusZero => "3p0",
            Question::TwoPlusZero => "2p0",
            Question::Count => "count",
        }
    }

    pub fn parse(s: &str) -> Option<Question> {
        Question::ALL.into_iter().find(|q| q.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    pub mode: Mode,
    pub scope: PointScope,
    /// Stop after at least this many instances; the verdict is then marked incomplete.
    pub budget: Option<u64>,
    /// Stop at the first failing instance instead of tallying all of them.
    pub stop_at_first_failure: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { mode: Mode::Nondegenerate, scope: PointScope::Affine, budget: None, stop_at_first_failure: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A sextuple claimed to be Pappus.
    Completion(Sextuple),
    /// A sextuple claimed not to be Pappus.
    Counterexample(Sextuple),
    /// Given points that no choice of the remaining points completes.
    FailingSelection { question: Question, l1: LineId, l2: LineId, on_l1: Vec<PointId>, on_l2: Vec<PointId> },
}

#[derive(Clone, Debug, Serialize)]
pub struct QuestionVerdict {
    pub question: Question,
    pub l1: LineId,
    pub l2: LineId,
    pub case: Option<PairCase>,
    pub mode: Mode,
    pub scope: PointScope,
    /// No failing instance among those checked; for `3p0`, a configuration was found.
    pub affirmed: bool,
    /// Every instance was checked, or a failure settled the verdict.
    pub complete: bool,
    pub instances: u64,
    pub failures: u64,
    /// Number of Pappus sextuples, for `count`.
    pub pappus_count: Option<u64>,
    pub witness: Option<Witness>,
    pub elapsed_ms: u64,
}

#[derive(Default)]
struct Tally {
    instances: u64,
    failures: u64,
    pappus: u64,
    first_failure: Option<Witness>,
    first_success: Option<Witness>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.instances += other.instances;
        self.failures += other.failures;
        self.pappus += other.pappus;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        if self.first_success.is_none() {
            self.first_success = other.first_success;
        }
    }

    fn success(&mut self, w: impl FnOnce() -> Witness) {
        self.instances += 1;
        if self.first_success.is_none() {
            self.first_success = Some(w());
        }
    }

    fn failure(&mut self, w: impl FnOnce() -> Witness) {
        self.instances += 1;
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(w());
        }
    }
}

fn drive<U: Sync>(units: &[U], opts: &SearchOptions, run: impl Fn(&U, &mut Tally) + Sync) -> (Tally, bool) {
    let mut total = Tally::default();
    for chunk in units.chunks(CHUNK) {
        let parts: Vec<Tally> = chunk
            .par_iter()
            .map(|u| {
                let mut t = Tally::default();
                run(u, &mut t);
                t
            })
            .collect();
        for t in parts {
            total.merge(t);
            if opts.stop_at_first_failure && total.failures > 0 {
                return (total, true);
            }
            if opts.budget.is_some_and(|b| total.instances >= b) {
                return (total, false);
            }
        }
    }
    (total, true)
}

fn triples(c: &[u16]) -> Vec<[u16; 3]> {
    let n = c.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push([c[i], c[j], c[k]]);
            }
        }
    }
    out
}

fn distinct(p: &[u16]) -> bool {
    (0..p.len()).all(|i| !p[i + 1..].contains(&p[i]))
}

struct Ctx<'a> {
    plane: &'a PlaneTables,
    pair: LinePair,
    mode: Mode,
    scope: PointScope,
    c1: Vec<u16>,
    c2: Vec<u16>,
}

impl<'a> Ctx<'a> {
    fn new(plane: &'a PlaneTables, pair: &LinePair, opts: &SearchOptions) -> Self {
        let (mode, scope) = (opts.mode, opts.scope);
        Ctx {
            plane,
            pair: *pair,
            mode,
            scope: scope.effective(plane, pair),
            c1: candidates(plane, pair, true, mode, scope),
            c2: candidates(plane, pair, false, mode, scope),
        }
    }

    fn sextuple(&self, p: [u16; 6]) -> Sextuple {
        Sextuple::from_raw(self.pair.l1, self.pair.l2, p)
    }

    #[inline]
    fn check(&self, t: [u16; 3], u: [u16; 3]) -> Option<bool> {
        holds(self.plane, self.mode, [t[0], t[1], t[2], u[0], u[1], u[2]])
    }

    /// First labelling of `{x, y, z}` on the second line completing `t`.
    fn complete_labels(&self, t: [u16; 3], xyz: [u16; 3]) -> Option<[u16; 6]> {
        PERMS.iter().find_map(|p| {
            let u = [xyz[p[0]], xyz[p[1]], xyz[p[2]]];
            (self.check(t, u) == Some(true)).then_some([t[0], t[1], t[2], u[0], u[1], u[2]])
        })
    }

    /// First Pappus sextuple on `t` over all ordered triples of the second line.
    fn complete_triple(&self, t: [u16; 3]) -> Option<[u16; 6]> {
        let c = &self.c2;
        for &x in c {
            for &y in c.iter().filter(|&&y| y != x) {
                for &z in c.iter().filter(|&&z| z != x && z != y) {
                    if self.check(t, [x, y, z]) == Some(true) {
                        return Some([t[0], t[1], t[2], x, y, z]);
                    }
                }
            }
        }
        None
    }

    fn selection(&self, question: Question, on_l1: &[u16], on_l2: &[u16]) -> Witness {
        Witness::FailingSelection {
            question,
            l1: self.pair.l1,
            l2: self.pair.l2,
            on_l1: on_l1.iter().map(|&p| PointId(p)).collect(),
            on_l2: on_l2.iter().map(|&p| PointId(p)).collect(),
        }
    }
}

fn finish(
    question: Question,
    ctx: &Ctx,
    tally: Tally,
    complete: bool,
    start: Instant,
) -> QuestionVerdict {
    let affirmed = tally.failures == 0;
    let witness = if affirmed { tally.first_success } else { tally.first_failure };
    QuestionVerdict {
        question,
        l1: ctx.pair.l1,
        l2: ctx.pair.l2,
        case: ctx.pair.case,
        mode: ctx.mode,
        scope: ctx.scope,
        affirmed,
        complete,
        instances: tally.instances,
        failures: tally.failures,
        pappus_count: (question == Question::Count).then_some(tally.pappus),
        witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn every_sextuple(question: Question, plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    let start = Instant::now();
    let ctx = Ctx::new(plane, pair, opts);
    let stop = opts.stop_at_first_failure;
    let (tally, complete) = drive(&triples(&ctx.c1), opts, |&t, tally| {
        let c = &ctx.c2;
        for &x in c {
            for &y in c.iter().filter(|&&y| y != x) {
                for &z in c.iter().filter(|&&z| z != x && z != y) {
                    let p = [t[0], t[1], t[2], x, y, z];
                    match ctx.check(t, [x, y, z]) {
                        None => {}
                        Some(true) => {
                            tally.pappus += 1;
                            tally.success(|| Witness::Completion(ctx.sextuple(p)));
                        }
                        Some(false) => {
                            tally.failure(|| Witness::Counterexample(ctx.sextuple(p)));
                            if stop {
                                return;
                            }
                        }
                    }
                }
            }
        }
    });
    finish(question, &ctx, tally, complete, start)
}

/// Is every sextuple on the pair a Pappus configuration?
pub fn question_3p3(plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    every_sextuple(Question::ThreePlusThree, plane, pair, opts)
}

/// Number of Pappus sextuples on the pair: first-line triples unordered,
/// second-line triples ordered. Never stops early.
pub fn count_pappus(plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    let opts = SearchOptions { stop_at_first_failure: false, ..*opts };
    every_sextuple(Question::Count, plane, pair, &opts)
}

/// Three points on the first line and two on the second: is there always a
/// third point on the second line completing a Pappus configuration?
pub fn question_3p2(plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    let start = Instant::now();
    let ctx = Ctx::new(plane, pair, opts);
    let stop = opts.stop_at_first_failure;
    let (tally, complete) = drive(&triples(&ctx.c1), opts, |&t, tally| {
        let c = &ctx.c2;
        for (i, &u) in c.iter().enumerate() {
            for &v in &c[i + 1..] {
                if !distinct(&[t[0], t[1], t[2], u, v]) {
                    continue;
                }
                let found = c
                    .iter()
                    .filter(|&&z| z != u && z != v)
                    .find_map(|&z| ctx.complete_labels(t, [u, v, z]));
                match found {
                    Some(p) => tally.success(|| Witness::Completion(ctx.sextuple(p))),
                    None => {
                        tally.failure(|| ctx.selection(Question::ThreePlusTwo, &t, &[u, v]));
                        if stop {
                            return;
                        }
                    }
                }
            }
        }
    });
    finish(Question::ThreePlusTwo, &ctx, tally, complete, start)
}

/// Three points on the first line and one on the second: are there always two
/// more points on the second line completing a Pappus configuration?
pub fn question_3p1(plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    let start = Instant::now();
    let ctx = Ctx::new(plane, pair, opts);
    let stop = opts.stop_at_first_failure;
    let (tally, complete) = drive(&triples(&ctx.c1), opts, |&t, tally| {
        let c = &ctx.c2;
        for &p in c {
            if !distinct(&[t[0], t[1], t[2], p]) {
                continue;
            }
            let rest: Vec<u16> = c.iter().copied().filter(|&y| y != p).collect();
            let found = rest.iter().enumerate().find_map(|(i, &y)| {
                rest[i + 1..].iter().find_map(|&z| ctx.complete_labels(t, [p, y, z]))
            });
            match found {
                Some(s) => tally.success(|| Witness::Completion(ctx.sextuple(s))),
                None => {
                    tally.failure(|| ctx.selection(Question::ThreePlusOne, &t, &[p]));
                    if stop {
                        return;
                    }
                }
            }
        }
    });
    finish(Question::ThreePlusOne, &ctx, tally, complete, start)
}

/// Two points on the first line: is there always a third point there and
/// three points on the second line completing a Pappus configuration?
pub fn question_2p0(plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    let start = Instant::now();
    let ctx = Ctx::new(plane, pair, opts);
    let c1 = &ctx.c1;
    let pairs: Vec<[u16; 2]> =
        (0..c1.len()).flat_map(|i| (i + 1..c1.len()).map(move |j| [c1[i], c1[j]])).collect();
    let (tally, complete) = drive(&pairs, opts, |&[a, b], tally| {
        let found = c1.iter().filter(|&&c| c != a && c != b).find_map(|&c| {
            let mut t = [a, b, c];
            t.sort_unstable();
            ctx.complete_triple(t)
        });
        match found {
            Some(s) => tally.success(|| Witness::Completion(ctx.sextuple(s))),
            None => tally.failure(|| ctx.selection(Question::TwoPlusZero, &[a, b], &[])),
        }
    });
    finish(Question::TwoPlusZero, &ctx, tally, complete, start)
}

/// Is there at least one Pappus configuration on the pair?
pub fn question_3p0(plane: &PlaneTables, pair: &LinePair, opts: &SearchOptions) -> QuestionVerdict {
    let start = Instant::now();
    let ctx = Ctx::new(plane, pair, opts);
    let units = triples(&ctx.c1);
    let mut instances = 0u64;
    let mut found = None;
    let mut complete = true;
    for chunk in units.chunks(CHUNK) {
        let hit = chunk.par_iter().find_map_first(|&t| ctx.complete_triple(t));
        instances += chunk.len() as u64;
        if let Some(p) = hit {
            found = Some(p);
            break;
        }
        if opts.budget.is_some_and(|b| instances >= b) {
            complete = false;
            break;
        }
    }
    QuestionVerdict {
        question: Question::ThreePlusZero,
        l1: pair.l1,
        l2: pair.l2,
        case: pair.case,
        mode: opts.mode,
        scope: ctx.scope,
        affirmed: found.is_some(),
        complete: complete || found.is_some(),
        instances,
        failures: u64::from(found.is_none()),
        pappus_count: None,
        witness: found.map(|p| Witness::Completion(ctx.sextuple(p))),
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn run_question(plane: &PlaneTables, pair: &LinePair, q: Question, opts: &SearchOptions) -> QuestionVerdict {
    match q {
        Question::ThreePlusThree => question_3p3(plane, pair, opts),
        Question::ThreePlusTwo => question_3p2(plane, pair, opts),
        Question::ThreePlusOne => question_3p1(plane, pair, opts),
        Question::ThreePlusZero => question_3p0(plane, pair, opts),
        Question::TwoPlusZero => question_2p0(plane, pair, opts),
        Question::Count => count_pappus(plane, pair, opts),
    }
}

/// First non-Pappus nondegenerate sextuple over `pairs`, in order.
pub fn find_non_pappus_witness(plane: &PlaneTables, pairs: &[LinePair]) -> Result<Sextuple> {
    let opts = SearchOptions { scope: PointScope::Projective, ..SearchOptions::default() };
    for pair in pairs {
        if let Some(Witness::Counterexample(s)) = question_3p3(plane, pair, &opts).witness {
            return Ok(s);
        }
    }
    Err(Error::NotFound)
}

/// Re-evaluates a witness through the full Pappus check alone. Returns
/// whether it supports its claim.
pub fn replay_witness(plane: &PlaneTables, w: &Witness, mode: Mode, scope: PointScope) -> Result<bool> {
    match w {
        Witness::Completion(s) => pappus_check_mode(plane, s, mode),
        Witness::Counterexample(s) => pappus_check_mode(plane, s, mode).map(|v| !v),
        Witness::FailingSelection { l1, l2, on_l1, on_l2, .. } => {
            let pair = LinePair { l1: *l1, l2: *l2, case: None };
            let c1 = candidates(plane, &pair, true, mode, scope);
            let c2 = candidates(plane, &pair, false, mode, scope);
            let given1: Vec<u16> = on_l1.iter().map(|p| p.0).collect();
            let given2: Vec<u16> = on_l2.iter().map(|p| p.0).collect();
            if !given1.iter().all(|p| c1.contains(p)) || !given2.iter().all(|p| c2.contains(p)) {
                return Ok(false);
            }
            for t in extensions(&given1, &c1) {
                for u in extensions(&given2, &c2) {
                    for perm in PERMS {
                        let s = Sextuple::from_raw(*l1, *l2, [t[0], t[1], t[2], u[perm[0]], u[perm[1]], u[perm[2]]]);
                        match pappus_check_mode(plane, &s, mode) {
                            Ok(true) => return Ok(false),
                            Ok(false) | Err(Error::DegenerateSextuple(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Every way to extend `given` to three distinct points from `pool`.
fn extensions(given: &[u16], pool: &[u16]) -> Vec<[u16; 3]> {
    let rest: Vec<u16> = pool.iter().copied().filter(|p| !given.contains(p)).collect();
    match given.len() {
        3 => vec![[given[0], given[1], given[2]]],
        2 => rest.iter().map(|&z| [given[0], given[1], z]).collect(),
        1 => (0..rest.len())
            .flat_map(|i| rest[i + 1..].iter().map(move |&z| (i, z)))
            .map(|(i, z)| [given[0], rest[i], z])
            .collect(),
        _ => triples(&rest),
    }
}

/// Checks `3p3 => 3p2 => 3p1 => 3p0` and `count` against `3p3` among complete
/// verdicts for the same pair, mode and scope.
pub fn check_monotonicity(verdicts: &[QuestionVerdict]) -> std::result::Result<(), String> {
    let find = |v: &QuestionVerdict, q: Question| {
        verdicts
            .iter()
            .find(|w| {
                w.question == q && w.l1 == v.l1 && w.l2 == v.l2 && w.mode == v.mode && w.scope == v.scope && w.complete
            })
    };
    let chain = [Question::ThreePlusThree, Question::ThreePlusTwo, Question::ThreePlusOne, Question::ThreePlusZero];
    for v in verdicts.iter().filter(|v| v.complete && v.affirmed) {
        let stronger = match v.question {
            Question::Count => Some(Question::ThreePlusThree),
            q => chain.iter().position(|&c| c == q).and_then(|i| chain.get(i + 1).copied()),
        };
        if let Some(w) = stronger.and_then(|q| find(v, q)) {
            if !w.affirmed {
                return Err(format!(
                    "{} affirmed but {} not on ({}, {})",
                    v.question.name(),
                    w.question.name(),
                    v.l1.0,
                    v.l2.0
                ));
            }
        }
    }
    for v in verdicts.iter().filter(|v| v.complete && v.question == Question::ThreePlusThree) {
        if let Some(c) = find(v, Question::Count) {
            if c.affirmed != v.affirmed {
                return Err(format!("count and 3p3 disagree on ({}, {})", v.l1.0, v.l2.0));
            }
        }
    }
    Ok(())
}
