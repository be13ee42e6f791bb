//! Named verification suites over a pair, with pass/fail/skip witnesses.

use std::fmt;
use std::str::FromStr;

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::fock::{eigenvalue_type1, eigenvalue_type2, scaling_check, FockModel};
use crate::moment::{is_well_adapted, solve_spherical_point, verify_lemma_top};
use crate::pairs::{validate_pair, PairSpec, Point};
use crate::spectrum::{orbit_distance, orbit_signature, phi_embed, psi_orbit, vector_distance, SphericalParam};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Invariance,
    LemmaTop,
    Type2,
    WellAdapted,
    Scaling,
    Separation,
}

pub const ALL_SUITES: [Suite; 6] =
    [Suite::Invariance, Suite::LemmaTop, Suite::Type2, Suite::WellAdapted, Suite::Scaling, Suite::Separation];

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "invariance" => Suite::Invariance,
            "lemma-top" => Suite::LemmaTop,
            "type2" => Suite::Type2,
            "well-adapted" => Suite::WellAdapted,
            "scaling" => Suite::Scaling,
            "separation" => Suite::Separation,
            other => return Err(format!("unknown suite {other:?}")),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Invariance => "invariance",
            Suite::LemmaTop => "lemma-top",
            Suite::Type2 => "type2",
            Suite::WellAdapted => "well-adapted",
            Suite::Scaling => "scaling",
            Suite::Separation => "separation",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub suite: Suite,
    pub status: Status,
    pub name: String,
    pub detail: Option<String>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        write!(f, "[{tag}] {}: {}", self.suite, self.name)?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

struct Sink {
    suite: Suite,
    out: Vec<Outcome>,
}

impl Sink {
    fn record(&mut self, status: Status, name: impl Into<String>, detail: Option<String>) {
        self.out.push(Outcome { suite: self.suite, status, name: name.into(), detail });
    }
    fn check(&mut self, name: impl Into<String>, failure: Option<String>) {
        let status = if failure.is_some() { Status::Fail } else { Status::Pass };
        self.record(status, name, failure);
    }
}

pub(crate) fn lattice_grid(r: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|p| (lo..=hi).map(move |k| [p.clone(), vec![k]].concat())).collect();
    }
    out
}

fn grid_bound(pair: &PairSpec) -> u32 {
    // keeps the grid to a few dozen points on higher-rank pairs
    if pair.rank() <= 1 {
        4
    } else {
        2
    }
}

fn invariance(pair: &PairSpec, sink: &mut Sink) {
    for c in validate_pair(pair).checks {
        sink.check(c.name, c.witness);
    }
}

fn scaling(pair: &PairSpec, sink: &mut Sink) {
    let lambdas = [BigRational::new(1.into(), 2.into()), BigRational::from_integer(3.into())];
    let grid = lattice_grid(pair.rank(), 0, grid_bound(pair) + 1);
    for (i, inv) in pair.invariants.iter().enumerate() {
        let mut failure = None;
        'outer: for m in &grid {
            if let Err(e) = eigenvalue_type1(pair, i, &BigRational::one(), m) {
                failure = Some(e.to_string());
                break;
            }
            for lam in &lambdas {
                match scaling_check(pair, i, lam, m) {
                    Ok(true) => {}
                    Ok(false) => {
                        failure = Some(format!("lambda = {lam}, m = {m:?}"));
                        break 'outer;
                    }
                    Err(e) => {
                        failure = Some(e.to_string());
                        break 'outer;
                    }
                }
            }
        }
        sink.check(format!("eigenvector exactness and scaling of {}", inv.name), failure);
    }
}

fn random_b(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect()
}

fn type2(pair: &PairSpec, sink: &mut Sink, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<Complex64>> = (0..20).map(|_| random_b(&mut rng, pair.n)).collect();
    for (i, inv) in pair.invariants.iter().enumerate() {
        let mut failure = None;
        for b in &samples {
            let got = match eigenvalue_type2(pair, i, b) {
                Ok(x) => x,
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            };
            let expected = if inv.z > 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 1.0).powu(inv.s) * inv.poly.evaluate(b, &vec![0.0; pair.d])
            };
            if (got - expected).norm() > 1e-10 * expected.norm().max(1.0) {
                failure = Some(format!("b = {b:?}: {got} vs {expected}"));
                break;
            }
        }
        sink.check(format!("p(ib, 0) rule for {}", inv.name), failure);
    }
    let mut failure = None;
    for b in &samples {
        let norm: f64 = b.iter().map(|x| x.norm_sqr()).sum();
        let got = eigenvalue_type2(pair, 1, b).map(|x| x.re).unwrap_or(f64::NAN);
        let central = eigenvalue_type2(pair, 0, b).map(|x| x.norm()).unwrap_or(f64::NAN);
        if (got + norm).abs() > 1e-10 * norm.max(1.0) || central != 0.0 {
            failure = Some(format!("|b|^2 = {norm}, D1 = {got}, D0 = {central}"));
            break;
        }
    }
    sink.check("type II values of |z|^2 and |v|^2 are 0 and -|b|^2", failure);
}

fn lemma_top(pair: &PairSpec, sink: &mut Sink, seed: u64) {
    let grid = lattice_grid(pair.rank(), 0, grid_bound(pair));
    for (i, inv) in pair.invariants.iter().enumerate() {
        if inv.z != 0 || inv.s == 0 {
            continue;
        }
        for m in &grid {
            let name = format!("top term of {} at m = {m:?}", inv.name);
            match verify_lemma_top(pair, i, m, seed) {
                Ok(rep) if rep.passed => sink.record(Status::Pass, name, None),
                Ok(rep) => sink.record(
                    Status::Fail,
                    name,
                    Some(format!("top {} vs spherical {}", rep.top_value, rep.spherical_value)),
                ),
                Err(Error::WellAdaptedViolation { residual, .. }) => {
                    sink.record(Status::Skip, name, Some(format!("spherical point not well-adapted (defect {residual:e})")))
                }
                Err(e) => sink.record(Status::Fail, name, Some(e.to_string())),
            }
        }
    }
}

fn well_adapted(pair: &PairSpec, sink: &mut Sink, seed: u64) {
    for m in lattice_grid(pair.rank(), 1, grid_bound(pair)) {
        let name = format!("well-adapted spherical point at m = {m:?}");
        match solve_spherical_point(pair, &m, seed).and_then(|sp| is_well_adapted(pair, &m, &sp.v)) {
            Ok((true, _)) => sink.record(Status::Pass, name, None),
            Ok((false, rel)) => sink.record(Status::Fail, name, Some(format!("defect {rel:e}"))),
            Err(e) => sink.record(Status::Fail, name, Some(e.to_string())),
        }
    }
}

fn separation(pair: &PairSpec, sink: &mut Sink, seed: u64) {
    let model = FockModel::new(pair);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<SphericalParam> = Vec::new();
    let hi = grid_bound(pair) + 2;
    while params.len() < 40 {
        let lambda = rng.gen_range(1..=16) as f64 / 4.0;
        let m: Vec<u32> = (0..pair.rank()).map(|_| rng.gen_range(0..=hi)).collect();
        let p = SphericalParam::TypeI { lambda, m };
        if !params.contains(&p) {
            params.push(p);
        }
    }
    for _ in 0..20 {
        params.push(SphericalParam::TypeII { b: random_b(&mut rng, pair.n) });
    }

    let mut phis = Vec::new();
    let mut sigs = Vec::new();
    for p in &params {
        let phi = phi_embed(&model, p);
        let sp = psi_orbit(pair, p, seed);
        match (phi, sp) {
            (Ok(phi), Ok(sp)) => {
                phis.push(phi.values);
                sigs.push(orbit_signature(pair, &sp.point(pair)));
            }
            (Err(e), _) | (_, Err(e)) => {
                sink.check("embeddings defined on sample", Some(format!("{p:?}: {e}")));
                return;
            }
        }
    }
    let mut phi_collision = None;
    let mut psi_collision = None;
    for a in 0..params.len() {
        for b in a + 1..params.len() {
            if phi_collision.is_none() && vector_distance(&phis[a], &phis[b]) < 1e-6 {
                phi_collision = Some(format!("{:?} and {:?}", params[a], params[b]));
            }
            if psi_collision.is_none() && orbit_distance(pair, &sigs[a], &sigs[b]) < 1e-6 {
                psi_collision = Some(format!("{:?} and {:?}", params[a], params[b]));
            }
        }
    }
    sink.check(format!("eigenvalue vectors separate {} parameters", params.len()), phi_collision);
    sink.check(format!("orbit signatures separate {} parameters", params.len()), psi_collision);

    let mut drift = None;
    for (p, sig) in params.iter().zip(&sigs) {
        let Ok(sp) = psi_orbit(pair, p, seed) else { continue };
        let pt = sp.point(pair);
        let radius = pt.v_norm_sqr() + pt.t.iter().map(|x| x * x).sum::<f64>();
        for z in &pair.k_basis {
            let (v, t) = z.flow(0.37, &pt.v, &pt.t);
            let moved = orbit_signature(pair, &Point::new(v, t));
            for ((inv, a), b) in pair.invariants.iter().zip(&sig.values).zip(&moved.values) {
                let scale = radius.powf(inv.total_degree() as f64 / 2.0).max(1.0);
                let rel = (a - b).abs() / scale;
                if rel > 1e-10 && drift.is_none() {
                    drift = Some(format!("{} moves {} at {p:?} by {rel:e} (relative)", z.name, inv.name));
                }
            }
        }
    }
    sink.check("signatures are constant along K-orbits", drift);
}

/// Runs the selected suites and returns every outcome in a fixed order.
pub fn run_suites(pair: &PairSpec, suites: &[Suite], seed: u64) -> Vec<Outcome> {
    let mut all = Vec::new();
    for &suite in suites {
        let mut sink = Sink { suite, out: Vec::new() };
        match suite {
            Suite::Invariance => invariance(pair, &mut sink),
            Suite::LemmaTop => lemma_top(pair, &mut sink, seed),
            Suite::Type2 => type2(pair, &mut sink, seed),
            Suite::WellAdapted => well_adapted(pair, &mut sink, seed),
            Suite::Scaling => scaling(pair, &mut sink),
            Suite::Separation => separation(pair, &mut sink, seed),
        }
        all.extend(sink.out);
    }
    all
}

pub fn all_passed(outcomes: &[Outcome]) -> bool {
    outcomes.iter().all(|o| o.status != Status::Fail)
}
