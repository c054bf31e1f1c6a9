//! Randomized generation of model-legal morphisms and the diagram suites.
//!
//! Every check compares two lazy composites entry by entry on the
//! within-bound region of the domain and codomain. Reports are merged in
//! job order, so a fixed seed list gives byte-identical output.

mod gen;
mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Arrow, Bounds, ModelKind, Row};
use crate::multiset::Point;
use crate::semiring::{Semiring, SemiringId};

pub use gen::{gen_base, gen_morphism, gen_scalar, gen_vector, rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Suite {
    Semiring,
    SigmaMonoid,
    Category,
    Exponential,
    SBimonad,
    SdlAxioms,
    OracleSdl,
    FaaDiBruno,
    DegIso,
    Functional,
    NegativeNucs,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Semiring,
        Suite::SigmaMonoid,
        Suite::Category,
        Suite::Exponential,
        Suite::SBimonad,
        Suite::SdlAxioms,
        Suite::OracleSdl,
        Suite::FaaDiBruno,
        Suite::DegIso,
        Suite::Functional,
        Suite::NegativeNucs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Semiring => "SEMIRING",
            Suite::SigmaMonoid => "SIGMA_MONOID",
            Suite::Category => "CATEGORY",
            Suite::Exponential => "EXPONENTIAL",
            Suite::SBimonad => "S_BIMONAD",
            Suite::SdlAxioms => "SDL_AXIOMS",
            Suite::OracleSdl => "ORACLE_SDL",
            Suite::FaaDiBruno => "FAA_DI_BRUNO",
            Suite::DegIso => "DEG_ISO",
            Suite::Functional => "FUNCTIONAL",
            Suite::NegativeNucs => "NEGATIVE_NUCS",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

/// The grid a suite runs over. Suites with narrower scopes intersect it
/// with their own limits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub models: Vec<ModelKind>,
    pub web_sizes: Vec<usize>,
    pub bang_degrees: Vec<usize>,
    pub s_degrees: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Re-run every diagram with one more padding step and check that
    /// nothing inside the region moves; also check declared gradings.
    pub audit: bool,
    pub timings: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            models: vec![
                ModelKind::Rel,
                ModelKind::Wrel(SemiringId::NatInf),
                ModelKind::Wrel(SemiringId::RatPos),
                ModelKind::Wcs,
                ModelKind::Coh,
                ModelKind::Nucs,
            ],
            web_sizes: vec![1, 2, 3],
            bang_degrees: vec![2, 3],
            s_degrees: vec![2, 3, 4],
            seeds: (0..25).collect(),
            audit: false,
            timings: false,
        }
    }
}

impl Params {
    fn bounds(&self) -> Vec<Bounds> {
        let mut out = Vec::new();
        for &d in &self.bang_degrees {
            for &s in &self.s_degrees {
                out.push(Bounds::new(d, s));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// The first differing entry of a failed diagram, with both composite
/// paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub source: String,
    pub target: String,
    pub lhs: String,
    pub rhs: String,
    pub lhs_path: String,
    pub rhs_path: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Config {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub web_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bang_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Config {
    fn new(model: &str, size: Option<usize>, b: Option<&Bounds>, seed: Option<u64>) -> Config {
        Config {
            model: model.to_string(),
            web_size: size,
            bang_degree: b.map(|b| b.bang),
            s_degree: b.map(|b| b.s),
            pad: b.map(|b| b.pad),
            seed,
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.model)?;
        if let Some(k) = self.web_size {
            write!(f, " web={k}")?;
        }
        if let (Some(d), Some(s)) = (self.bang_degree, self.s_degree) {
            write!(f, " d={d} D={s}")?;
        }
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub check: String,
    pub status: Status,
    pub config: Config,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Only filled when timings are requested, to keep reports reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs every check of `suite` over the grid.
pub fn run_suite(suite: Suite, params: &Params) -> Vec<CheckReport> {
    let jobs = suites::jobs(suite, params);
    let out: Vec<Vec<CheckReport>> = jobs.into_par_iter().map(|job| job()).collect();
    out.into_iter().flatten().collect()
}

/// Counts of passing and failing reports.
pub fn tally(reports: &[CheckReport]) -> (usize, usize) {
    let pass = reports.iter().filter(|r| r.passed()).count();
    (pass, reports.len() - pass)
}

type Job = Box<dyn FnOnce() -> Vec<CheckReport> + Send>;

/// What a single check produced before it is stamped with its context.
enum Outcome {
    Pass(Option<String>),
    Fail(Option<Box<Counterexample>>, String),
}

/// The context shared by the checks of one job.
#[derive(Clone)]
struct Ctx {
    suite: Suite,
    config: Config,
    audit: bool,
    timings: bool,
}

impl Ctx {
    fn new(suite: Suite, p: &Params, config: Config) -> Ctx {
        Ctx { suite, config, audit: p.audit, timings: p.timings }
    }

    fn stamp(&self, check: &str, started: Instant, outcome: Outcome) -> CheckReport {
        let (status, counterexample, note) = match outcome {
            Outcome::Pass(note) => (Status::Pass, None, note),
            Outcome::Fail(cx, note) => (Status::Fail, cx.map(|c| *c), Some(note)),
        };
        CheckReport {
            suite: self.suite,
            check: check.to_string(),
            status,
            config: self.config.clone(),
            counterexample,
            note,
            elapsed_ms: self.timings.then(|| started.elapsed().as_millis() as u64),
        }
    }

    /// A check computed by hand: `Ok(note)` passes, `Err(reason)` fails.
    fn holds<F>(&self, check: &str, f: F) -> CheckReport
    where
        F: FnOnce() -> std::result::Result<Option<String>, String>,
    {
        let t = Instant::now();
        let outcome = match f() {
            Ok(note) => Outcome::Pass(note),
            Err(why) => Outcome::Fail(None, why),
        };
        self.stamp(check, t, outcome)
    }

    /// A list of diagrams `lhs = rhs`, each compared on the region of `b`.
    fn law<S, F>(&self, check: &str, b: &Bounds, build: F) -> CheckReport
    where
        S: Semiring,
        F: Fn(&Bounds) -> Result<Vec<(Arrow<S>, Arrow<S>)>>,
    {
        let t = Instant::now();
        let outcome = self.law_outcome(b, &build);
        self.stamp(check, t, outcome)
    }

    fn law_outcome<S, F>(&self, b: &Bounds, build: &F) -> Outcome
    where
        S: Semiring,
        F: Fn(&Bounds) -> Result<Vec<(Arrow<S>, Arrow<S>)>>,
    {
        let diagrams = match build(b) {
            Ok(d) => d,
            Err(e) => return Outcome::Fail(None, format!("could not build the diagram: {e}")),
        };
        for (i, (l, r)) in diagrams.iter().enumerate() {
            if l.dom() != r.dom() || l.cod() != r.cod() {
                return Outcome::Fail(
                    None,
                    format!("diagram {i}: {} -> {} against {} -> {}", l.dom(), l.cod(), r.dom(), r.cod()),
                );
            }
            if let Some(cx) = compare(l, r, b) {
                return Outcome::Fail(Some(cx), format!("diagram {i} differs"));
            }
        }
        if self.audit {
            let wider = b.with_pad(b.pad + 1);
            let again = match build(&wider) {
                Ok(d) => d,
                Err(e) => return Outcome::Fail(None, format!("could not rebuild with more padding: {e}")),
            };
            for (i, ((l, r), (l2, r2))) in diagrams.iter().zip(&again).enumerate() {
                for (f, g) in [(l, l2), (r, r2)] {
                    if let Some(cx) = compare(f, g, b) {
                        return Outcome::Fail(Some(cx), format!("diagram {i} depends on the padding"));
                    }
                    if let Some(why) = grading_violation(f, b) {
                        return Outcome::Fail(None, format!("diagram {i}: {why}"));
                    }
                }
            }
        }
        Outcome::Pass(None)
    }
}

fn region_row<S: Semiring>(f: &Arrow<S>, p: &Point, b: &Bounds) -> Row<S> {
    f.row(p).into_iter().filter(|(q, _)| b.in_region(q)).collect()
}

/// The first entry where `l` and `r` differ on the region of `b`.
fn compare<S: Semiring>(l: &Arrow<S>, r: &Arrow<S>, b: &Bounds) -> Option<Box<Counterexample>> {
    let pts = l.dom().region(b);
    pts.par_iter().find_map_first(|p| {
        let (rl, rr) = (region_row(l, p, b), region_row(r, p, b));
        if rl == rr {
            return None;
        }
        let q = rl
            .iter()
            .chain(rr.iter())
            .map(|(q, _)| q)
            .find(|q| rl.get(*q) != rr.get(*q))
            .expect("rows differ somewhere");
        let show = |row: &Row<S>| row.get(q).map_or_else(|| "0".to_string(), |c| c.encode());
        Some(Box::new(Counterexample {
            source: p.to_string(),
            target: q.to_string(),
            lhs: show(&rl),
            rhs: show(&rr),
            lhs_path: l.name().to_string(),
            rhs_path: r.name().to_string(),
        }))
    })
}

fn grading_violation<S: Semiring>(f: &Arrow<S>, b: &Bounds) -> Option<String> {
    let g = f.grading();
    f.dom().region(b).iter().find_map(|p| {
        f.row(p)
            .keys()
            .find(|q| !g.admits(p, q))
            .map(|q| format!("entry ({p}, {q}) of {} breaks its declared grading", f.name()))
    })
}

/// Largest denominator among the region entries of `f`.
fn max_denominator<S: Semiring>(f: &Arrow<S>, b: &Bounds) -> num_bigint::BigUint {
    let mut best = num_bigint::BigUint::from(1u32);
    for p in f.dom().region(b).iter() {
        for c in region_row(f, p, b).values() {
            if let Some(d) = c.to_ratpos().denominator() {
                best = best.max(d);
            }
        }
    }
    best
}
