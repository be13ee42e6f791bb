//! The eigenvalue embedding Φ, the orbit embedding Ψ, orbit signatures and
//! convergence experiments comparing the two.

use std::collections::HashMap;
use std::io::Write;

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{calibration_constants, FockModel};
use crate::moment::{solve_real_weight, spherical_point_type1, SphericalPoint};
use crate::pairs::{PairSpec, Point};
use crate::polyalg::Scalar;

/// A bounded spherical function, by its Mackey parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum SphericalParam {
    TypeI { lambda: f64, m: Vec<u32> },
    TypeII { b: Vec<Complex64> },
}

impl SphericalParam {
    pub fn type1(lambda: f64, m: Vec<u32>) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveLambda(lambda.to_string()));
        }
        Ok(SphericalParam::TypeI { lambda, m })
    }
}

/// `Φ(ψ) = (D̂_0(ψ), .., D̂_r(ψ))` with each entry rotated by `i^{-z_p}` so it is real.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueVector {
    pub values: Vec<f64>,
    pub source: SphericalParam,
}

/// Invariant values `(p_0, .., p_r)` at an orbit representative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSignature {
    pub values: Vec<f64>,
}

const IMAG_TOL: f64 = 1e-9;

fn real_part(name: &str, c: Complex64) -> Result<f64> {
    if c.im.abs() > IMAG_TOL * c.re.abs().max(1.0) {
        return Err(Error::ComplexEigenvalue { invariant: name.to_string(), imag: c.im });
    }
    Ok(c.re)
}

fn phase(z: u32) -> Complex64 {
    // i^{-z}
    match z % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

pub fn phi_embed(model: &FockModel<'_>, s: &SphericalParam) -> Result<EigenvalueVector> {
    let pair = model.pair();
    let mut values = Vec::with_capacity(pair.invariants.len());
    match s {
        SphericalParam::TypeI { lambda, m } => {
            if !(*lambda > 0.0) {
                return Err(Error::NonPositiveLambda(lambda.to_string()));
            }
            if m.len() != pair.rank() {
                return Err(Error::Arity { what: "m", expected: pair.rank(), got: m.len() });
            }
            let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
            for (i, inv) in pair.invariants.iter().enumerate() {
                let ep = model.eigen_poly(i)?;
                values.push(real_part(&inv.name, phase(inv.z) * ep.eigenvalue(*lambda, &mf))?);
            }
        }
        SphericalParam::TypeII { b } => {
            if b.len() != pair.n {
                return Err(Error::Arity { what: "b", expected: pair.n, got: b.len() });
            }
            for inv in &pair.invariants {
                values.push(real_part(&inv.name, phase(inv.z) * inv.poly.formal_i_eval(b))?);
            }
        }
    }
    Ok(EigenvalueVector { values, source: s.clone() })
}

/// The spherical point representing `Ψ(s)`.
pub fn psi_orbit(pair: &PairSpec, s: &SphericalParam, seed: u64) -> Result<SphericalPoint> {
    match s {
        SphericalParam::TypeI { lambda, m } => spherical_point_type1(pair, *lambda, m, seed),
        SphericalParam::TypeII { b } => Ok(SphericalPoint::type2(b.clone())),
    }
}

pub fn orbit_signature(pair: &PairSpec, pt: &Point) -> OrbitSignature {
    OrbitSignature { values: pair.evaluate_invariants(pt) }
}

/// Euclidean distance after `x ↦ sign(x)|x|^{1/deg p_i}` on each component.
pub fn orbit_distance(pair: &PairSpec, a: &OrbitSignature, b: &OrbitSignature) -> f64 {
    let f = |x: f64, deg: u32| x.signum() * x.abs().powf(1.0 / deg.max(1) as f64);
    pair.invariants
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(inv, (&x, &y))| (f(x, inv.total_degree()) - f(y, inv.total_degree())).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn vector_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "I->I")]
    TypeIToTypeI,
    #[serde(rename = "I->II")]
    TypeIToTypeII,
    #[serde(rename = "II->II")]
    TypeIIToTypeII,
}

impl Regime {
    pub fn default_tolerance(self) -> f64 {
        match self {
            Regime::TypeIToTypeI => 1e-3,
            Regime::TypeIToTypeII => 1e-2,
            Regime::TypeIIToTypeII => 1e-6,
        }
    }
}

/// Schedules for the three convergence regimes.
#[derive(Clone, Debug)]
pub enum SequenceKind {
    /// `λ(n) = λ(1 ± 1/n)` with fixed `m`; `oscillate` adds `e_1` to `m` for odd `n`.
    TypeIToTypeI { lambda: f64, m: Vec<u32>, from_above: bool, oscillate: bool },
    /// `λ(n) = 1/n`, `m(n) = round(c·n^γ) + offset`, so `λ(n)m(n) → c` when `γ = 1`.
    TypeIToTypeII { direction: Vec<f64>, offset: Vec<u32>, growth: f64 },
    /// `b(n) = b + δ/n^rate`.
    TypeIIToTypeII { b: Vec<Complex64>, delta: Vec<Complex64>, rate: f64 },
}

/// A sampled sequence of parameters with its declared limit.
#[derive(Clone, Debug)]
pub struct Sequence {
    pub regime: Regime,
    pub ns: Vec<u64>,
    pub params: Vec<SphericalParam>,
    pub limit: SphericalParam,
    /// The limit orbit representative.
    pub limit_point: SphericalPoint,
}

/// Sample indices `{1, 2, 5}·10^k ≤ n_max`, plus the last half at tenths of
/// `n_max` and `n_max - 1`.
pub fn sample_grid(n_max: u64) -> Vec<u64> {
    let mut ns = Vec::new();
    let mut p = 1u64;
    while p <= n_max {
        for k in [1, 2, 5] {
            if k * p <= n_max {
                ns.push(k * p);
            }
        }
        p = p.saturating_mul(10);
    }
    for j in 5..=10 {
        ns.push((n_max * j / 10).max(1));
    }
    if n_max > 1 {
        ns.push(n_max - 1);
    }
    ns.sort_unstable();
    ns.dedup();
    ns
}

pub fn make_sequence(pair: &PairSpec, kind: &SequenceKind, n_max: u64, seed: u64) -> Result<Sequence> {
    if n_max == 0 {
        return Err(Error::InvalidRegime("n_max must be positive".into()));
    }
    let ns = sample_grid(n_max);
    let r = pair.rank();
    match kind {
        SequenceKind::TypeIToTypeI { lambda, m, from_above, oscillate } => {
            if !(*lambda > 0.0) {
                return Err(Error::InvalidRegime(format!("limit lambda must be positive, got {lambda}")));
            }
            if m.len() != r {
                return Err(Error::Arity { what: "m", expected: r, got: m.len() });
            }
            let sign = if *from_above { 1.0 } else { -1.0 };
            let params = ns
                .iter()
                .map(|&n| {
                    let lam = lambda * (1.0 + sign / n as f64);
                    let mut mn = m.clone();
                    if *oscillate && n % 2 == 1 {
                        mn[0] += 1;
                    }
                    SphericalParam::TypeI { lambda: lam, m: mn }
                })
                .collect::<Vec<_>>();
            // from below, λ(1) = 0 is not a type I parameter
            let (ns, params): (Vec<u64>, Vec<SphericalParam>) = ns
                .into_iter()
                .zip(params)
                .filter(|(_, p)| matches!(p, SphericalParam::TypeI { lambda, .. } if *lambda > 0.0))
                .unzip();
            let limit = SphericalParam::TypeI { lambda: *lambda, m: m.clone() };
            let limit_point = psi_orbit(pair, &limit, seed)?;
            Ok(Sequence { regime: Regime::TypeIToTypeI, ns, params, limit, limit_point })
        }
        SequenceKind::TypeIToTypeII { direction, offset, growth } => {
            if direction.len() != r || offset.len() != r {
                return Err(Error::Arity { what: "direction/offset", expected: r, got: direction.len().min(offset.len()) });
            }
            if direction.iter().any(|&c| !(c >= 0.0)) {
                return Err(Error::InvalidRegime("direction entries must be non-negative".into()));
            }
            if *growth > 1.0 {
                return Err(Error::InvalidRegime(format!(
                    "m(n) ~ n^{growth} makes lambda(n) m(n) unbounded with lambda(n) = 1/n"
                )));
            }
            if !(*growth >= 0.0) {
                return Err(Error::InvalidRegime(format!("growth exponent must be in [0, 1], got {growth}")));
            }
            let params = ns
                .iter()
                .map(|&n| {
                    let scale = (n as f64).powf(*growth);
                    let m = direction.iter().zip(offset).map(|(&c, &o)| (c * scale).round() as u32 + o).collect();
                    SphericalParam::TypeI { lambda: 1.0 / n as f64, m }
                })
                .collect();
            let c: Vec<f64> = if *growth == 1.0 { direction.clone() } else { vec![0.0; r] };
            let b = solve_real_weight(pair, &c, 1, seed)?.remove(0).v;
            let limit = SphericalParam::TypeII { b: b.clone() };
            Ok(Sequence { regime: Regime::TypeIToTypeII, ns, params, limit, limit_point: SphericalPoint::type2(b) })
        }
        SequenceKind::TypeIIToTypeII { b, delta, rate } => {
            if b.len() != pair.n || delta.len() != pair.n {
                return Err(Error::Arity { what: "b/delta", expected: pair.n, got: b.len().min(delta.len()) });
            }
            if !(*rate > 0.0) {
                return Err(Error::InvalidRegime(format!("rate exponent must be positive, got {rate}")));
            }
            let params = ns
                .iter()
                .map(|&n| {
                    let f = (n as f64).powf(-rate);
                    SphericalParam::TypeII { b: b.iter().zip(delta).map(|(x, d)| x + d * f).collect() }
                })
                .collect();
            let limit = SphericalParam::TypeII { b: b.clone() };
            Ok(Sequence {
                regime: Regime::TypeIIToTypeII,
                ns,
                params,
                limit,
                limit_point: SphericalPoint::type2(b.clone()),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub lambda: f64,
    pub m: Option<Vec<u32>>,
    pub d_phi: f64,
    pub d_psi: f64,
    /// `max |Φ_i|` over mixed invariants (`s, z > 0`).
    pub mixed_max: f64,
    /// `max λ^{s/2+z} |(p̃ - top p̃)(m)|` over all invariants.
    pub lower_order_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CoConvergent,
    NotConvergent,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRatios {
    pub phi_over_psi: Option<(f64, f64)>,
    pub psi_over_phi: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub pair: String,
    pub regime: Regime,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub final_n: u64,
    pub final_d_phi: f64,
    pub final_d_psi: f64,
    pub final_mixed_max: f64,
    pub final_lower_order_max: f64,
    pub stabilization_index: Option<u64>,
    pub tail_ratios: TailRatios,
    pub calibration_constants: Vec<Option<String>>,
    #[serde(skip)]
    pub rows: Vec<ConvergenceRow>,
}

fn min_max(it: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    it.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

fn regime_check(pair: &PairSpec, seq: &Sequence) -> Result<Option<u64>> {
    match seq.regime {
        Regime::TypeIToTypeI => {
            let SphericalParam::TypeI { m: m_lim, .. } = &seq.limit else {
                return Err(Error::RegimeViolation("I->I sequence needs a type I limit".into()));
            };
            let mut stab = None;
            for (n, p) in seq.ns.iter().zip(&seq.params).rev() {
                match p {
                    SphericalParam::TypeI { m, .. } if m == m_lim => stab = Some(*n),
                    _ => break,
                }
            }
            let half = seq.ns.get(seq.ns.len() / 2).copied().unwrap_or(0);
            match stab {
                Some(n) if n <= half => Ok(Some(n)),
                _ => Err(Error::RegimeViolation(
                    "m(n) is not eventually constant; a type I limit requires a stable m".into(),
                )),
            }
        }
        Regime::TypeIToTypeII => {
            let scaled: Vec<f64> = seq
                .params
                .iter()
                .map(|p| match p {
                    SphericalParam::TypeI { lambda, m } => lambda * pair.hw_degree_of(m) as f64,
                    SphericalParam::TypeII { .. } => 0.0,
                })
                .collect();
            let mid = scaled.get(scaled.len() / 2).copied().unwrap_or(0.0);
            let last = scaled.last().copied().unwrap_or(0.0);
            if last > 10.0 * mid + 1.0 {
                return Err(Error::RegimeViolation(format!(
                    "lambda(n) deg m(n) grows from {mid} to {last}; the sequence has no type II limit"
                )));
            }
            Ok(None)
        }
        Regime::TypeIIToTypeII => Ok(None),
    }
}

/// Runs `d_Φ(n)` and `d_Ψ(n)` along a sampled sequence.
pub fn convergence_experiment(model: &FockModel<'_>, seq: &Sequence, tol: f64, seed: u64) -> Result<ConvergenceReport> {
    let pair = model.pair();
    let stabilization_index = regime_check(pair, seq)?;
    let phi_lim = phi_embed(model, &seq.limit)?;
    let sig_lim = orbit_signature(pair, &seq.limit_point.point(pair));
    let eps = model.eigen_polys()?;

    let mut solved: HashMap<Vec<u32>, SphericalPoint> = HashMap::new();
    let mut rows = Vec::with_capacity(seq.params.len());
    for (&n, param) in seq.ns.iter().zip(&seq.params) {
        let phi = phi_embed(model, param)?;
        let point = match param {
            SphericalParam::TypeI { lambda, m } => {
                if !solved.contains_key(m) {
                    solved.insert(m.clone(), psi_orbit(pair, &SphericalParam::TypeI { lambda: 1.0, m: m.clone() }, seed)?);
                }
                let vm = &solved[m];
                let s = lambda.sqrt();
                Point::new(vm.v.iter().map(|x| x * s).collect(), pair.a_f64().iter().map(|a| a * lambda).collect())
            }
            SphericalParam::TypeII { b } => Point::new(b.clone(), vec![0.0; pair.d]),
        };
        let sig = orbit_signature(pair, &point);
        let (lambda, m, mixed_max, lower_order_max) = match param {
            SphericalParam::TypeI { lambda, m } => {
                let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
                let mixed = pair
                    .invariants
                    .iter()
                    .zip(&phi.values)
                    .filter(|(inv, _)| inv.s > 0 && inv.z > 0)
                    .map(|(_, v)| v.abs())
                    .fold(0.0, f64::max);
                let lower = eps
                    .iter()
                    .map(|ep| {
                        let full = ep.eval(&mf);
                        let top = ep.top_term().eval(&mf);
                        (full - top).norm() * lambda.powi((ep.s / 2 + ep.z) as i32)
                    })
                    .fold(0.0, f64::max);
                (*lambda, Some(m.clone()), mixed, lower)
            }
            SphericalParam::TypeII { .. } => {
                let mixed = pair
                    .invariants
                    .iter()
                    .zip(&phi.values)
                    .filter(|(inv, _)| inv.s > 0 && inv.z > 0)
                    .map(|(_, v)| v.abs())
                    .fold(0.0, f64::max);
                (0.0, None, mixed, 0.0)
            }
        };
        rows.push(ConvergenceRow {
            n,
            lambda,
            m,
            d_phi: vector_distance(&phi.values, &phi_lim.values),
            d_psi: orbit_distance(pair, &sig, &sig_lim),
            mixed_max,
            lower_order_max,
        });
    }

    let last = rows.last().ok_or_else(|| Error::InvalidRegime("empty sequence".into()))?;
    let phi_ok = last.d_phi < tol;
    let psi_ok = last.d_psi < tol;
    let verdict = match (phi_ok, psi_ok) {
        (true, true) => Verdict::CoConvergent,
        (true, false) if last.d_psi > 10.0 * tol => Verdict::Mismatch,
        (false, true) if last.d_phi > 10.0 * tol => Verdict::Mismatch,
        _ => Verdict::NotConvergent,
    };
    let tail = &rows[rows.len() / 2..];
    let tail_ratios = TailRatios {
        phi_over_psi: min_max(tail.iter().filter(|r| r.d_psi > 0.0).map(|r| r.d_phi / r.d_psi)),
        psi_over_phi: min_max(tail.iter().filter(|r| r.d_phi > 0.0).map(|r| r.d_psi / r.d_phi)),
    };
    let calibration = calibration_constants(pair)?
        .into_iter()
        .map(|c| c.as_ref().map(Scalar::to_string))
        .collect();
    Ok(ConvergenceReport {
        pair: pair.name.clone(),
        regime: seq.regime,
        tolerance: tol,
        verdict,
        final_n: last.n,
        final_d_phi: last.d_phi,
        final_d_psi: last.d_psi,
        final_mixed_max: last.mixed_max,
        final_lower_order_max: last.lower_order_max,
        stabilization_index,
        tail_ratios,
        calibration_constants: calibration,
        rows,
    })
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

impl ConvergenceReport {
    /// CSV with columns `n, lambda, m1.., d_phi, d_psi, mixed_max, lower_order_max`.
    pub fn write_csv<W: Write>(&self, rank: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string(), "lambda".to_string()];
        header.extend((1..=rank).map(|i| format!("m{i}")));
        header.extend(["d_phi", "d_psi", "mixed_max", "lower_order_max"].map(String::from));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.n.to_string(), fmt_num(row.lambda)];
            match &row.m {
                Some(m) => rec.extend(m.iter().map(|k| k.to_string())),
                None => rec.extend(std::iter::repeat_n(String::new(), rank)),
            }
            rec.extend([row.d_phi, row.d_psi, row.mixed_max, row.lower_order_max].map(fmt_num));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment::DEFAULT_SEED;
    use crate::pairs::{builtin_heisenberg_un, builtin_u2su2};

    #[test]
    fn phi_at_trivial_params() {
        let p = builtin_u2su2();
        let model = FockModel::new(&p);
        let v = phi_embed(&model, &SphericalParam::TypeI { lambda: 1.0, m: vec![0, 0, 0] }).unwrap();
        assert_eq!(v.values, vec![1.0, 0.0, 0.0, 0.0]);
        let zero = phi_embed(&model, &SphericalParam::TypeII { b: vec![Complex64::new(0.0, 0.0); 4] }).unwrap();
        assert!(zero.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn phi_u1() {
        let p = builtin_heisenberg_un(1).unwrap();
        let model = FockModel::new(&p);
        let v = phi_embed(&model, &SphericalParam::TypeI { lambda: 0.5, m: vec![3] }).unwrap();
        assert!((v.values[0] - 0.25).abs() < 1e-15);
        assert!((v.values[1] + 3.0).abs() < 1e-15);
    }

    #[test]
    fn psi_norm_scales_with_lambda() {
        let p = builtin_u2su2();
        let sp = psi_orbit(&p, &SphericalParam::TypeI { lambda: 4.0, m: vec![1, 0, 1] }, DEFAULT_SEED).unwrap();
        let deg = p.hw_degree_of(&[1, 0, 1]) as f64;
        assert!((sp.point(&p).v_norm_sqr() - 4.0 * 2.0 * deg).abs() < 1e-8);
    }

    #[test]
    fn grid_contains_tail() {
        let g = sample_grid(1000);
        assert_eq!(*g.last().unwrap(), 1000);
        assert!(g.contains(&999) && g.contains(&500) && g.contains(&1));
    }

    #[test]
    fn unbounded_i_to_ii_rejected() {
        let p = builtin_heisenberg_un(1).unwrap();
        let kind = SequenceKind::TypeIToTypeII { direction: vec![1.0], offset: vec![0], growth: 1.5 };
        assert!(matches!(make_sequence(&p, &kind, 100, DEFAULT_SEED), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn oscillating_m_is_a_violation() {
        let p = builtin_heisenberg_un(1).unwrap();
        let model = FockModel::new(&p);
        let kind = SequenceKind::TypeIToTypeI { lambda: 1.0, m: vec![2], from_above: true, oscillate: true };
        let seq = make_sequence(&p, &kind, 100, DEFAULT_SEED).unwrap();
        assert!(matches!(convergence_experiment(&model, &seq, 1e-3, DEFAULT_SEED), Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn u1_i_to_ii_coconverges() {
        let p = builtin_heisenberg_un(1).unwrap();
        let model = FockModel::new(&p);
        let kind = SequenceKind::TypeIToTypeII { direction: vec![1.0], offset: vec![0], growth: 1.0 };
        let seq = make_sequence(&p, &kind, 10_000, DEFAULT_SEED).unwrap();
        let rep = convergence_experiment(&model, &seq, 1e-2, DEFAULT_SEED).unwrap();
        assert_eq!(rep.verdict, Verdict::CoConvergent, "{}", rep.summary_json());
    }
}
