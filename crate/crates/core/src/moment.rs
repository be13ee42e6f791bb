//! Moment maps, spherical points and the well-adapted condition.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::eigen_poly_of;
use crate::pairs::{from_real, herm, Invariant, PairSpec, Point};
use crate::polyalg::LieElement;

pub const DEFAULT_SEED: u64 = 20240607;
pub const SOLVER_TOL: f64 = 1e-9;
const STARTS: usize = 32;
const MAX_ITERS: usize = 400;
const TARGET_RESIDUAL: f64 = 1e-13;

/// A spherical point: `(√λ v_m, λA)` for type I, `(b, 0)` for type II.
#[derive(Clone, Debug, Serialize)]
pub struct SphericalPoint {
    /// The `V` component of the point.
    #[serde(serialize_with = "ser_complex")]
    pub v: Vec<Complex64>,
    pub lambda: f64,
    pub m: Option<Vec<u32>>,
    pub residual: f64,
}

fn ser_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&[x.re, x.im])?;
    }
    seq.end()
}

impl SphericalPoint {
    pub fn type2(b: Vec<Complex64>) -> Self {
        SphericalPoint { v: b, lambda: 0.0, m: None, residual: 0.0 }
    }

    /// The full point of `n = V ⊕ z`.
    pub fn point(&self, pair: &PairSpec) -> Point {
        Point::new(self.v.clone(), pair.a_f64().into_iter().map(|a| a * self.lambda).collect())
    }
}

/// `τ(v)(Z) = -½⟨v, Z·v⟩` on each element of the `k_A` basis.
pub fn moment_map(pair: &PairSpec, v: &[Complex64]) -> Vec<Complex64> {
    pair.ka_basis().map(|z| -0.5 * herm(v, &z.apply_v(v))).collect()
}

/// `(α_m)_k`: `-i α_m(Z)` on torus elements, `0` on their complement.
pub fn alpha_target(pair: &PairSpec, m: &[f64]) -> Vec<Complex64> {
    let alpha = pair.weight_of(m);
    let mut out = vec![Complex64::new(0.0, 0.0); pair.ka_indices.len()];
    for (j, &pos) in pair.torus_indices.iter().enumerate() {
        out[pos] = Complex64::new(0.0, -alpha[j]);
    }
    out
}

/// Real symmetric `M` with `Im τ(v)(Z) = ½ xᵀ M x`, `x = (Re v, Im v)`.
fn quadratic_form(z: &LieElement) -> DMatrix<f64> {
    let n = z.n();
    // H = -iZ is Hermitian for skew-Hermitian Z
    let h = z.vmat_f64().map(|c| c * Complex64::new(0.0, -1.0));
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let e = h[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => e.re,
            (0, 1) => -e.im,
            _ => e.im,
        }
    })
}

struct MomentSystem {
    forms: Vec<DMatrix<f64>>,
    target: Vec<f64>,
}

impl MomentSystem {
    fn new(pair: &PairSpec, m: &[f64]) -> Self {
        let forms = pair.ka_basis().map(quadratic_form).collect();
        let target = alpha_target(pair, m).iter().map(|c| c.im).collect();
        MomentSystem { forms, target }
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.forms.len(),
            self.forms.iter().zip(&self.target).map(|(mj, t)| 0.5 * x.dot(&(mj * x)) - t),
        )
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.forms.len(), x.len());
        for (j, mj) in self.forms.iter().enumerate() {
            jac.set_row(j, &(mj * x).transpose());
        }
        jac
    }

    /// Levenberg–Marquardt from `x0`; returns the final point and residual norm.
    fn solve_from(&self, x0: DVector<f64>) -> (DVector<f64>, f64) {
        let mut x = x0;
        let mut r = self.residual(&x);
        let mut cost = r.norm();
        let mut mu = 1e-3;
        for _ in 0..MAX_ITERS {
            if cost < TARGET_RESIDUAL {
                break;
            }
            let jac = self.jacobian(&x);
            let jt = jac.transpose();
            let g = &jt * &r;
            let mut a = &jt * &jac;
            for k in 0..a.nrows() {
                a[(k, k)] += mu;
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&-g)) else {
                mu *= 10.0;
                continue;
            };
            let trial = &x + &step;
            let rt = self.residual(&trial);
            let ct = rt.norm();
            if ct < cost {
                x = trial;
                r = rt;
                cost = ct;
                mu = (mu / 3.0).max(1e-15);
            } else {
                mu *= 4.0;
                if mu > 1e12 {
                    break;
                }
            }
        }
        (x, cost)
    }
}

fn start_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> DVector<f64> {
    let dir: DVector<f64> = DVector::from_iterator(dim, (0..dim).map(|_| -> f64 { StandardNormal.sample(&mut *rng) }));
    let norm = dir.norm();
    if norm == 0.0 || radius == 0.0 {
        return DVector::zeros(dim);
    }
    dir * (radius / norm)
}

/// Solutions of `τ(v) = (α_m)_k` from up to 32 seeded starts on the sphere
/// `|v|² = 2 deg h_m`, at most `count` of them.
pub fn solve_spherical_points(pair: &PairSpec, m: &[u32], count: usize, seed: u64) -> Result<Vec<SphericalPoint>> {
    let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
    let mut pts = solve_real_weight(pair, &mf, count, seed)?;
    for p in &mut pts {
        p.m = Some(m.to_vec());
    }
    Ok(pts)
}

/// Solves `τ(v) = (α_c)_k` for a real weight vector `c ≥ 0`; the points
/// carry `m = None`. Limits of rescaled type I points land here.
pub fn solve_real_weight(pair: &PairSpec, c: &[f64], count: usize, seed: u64) -> Result<Vec<SphericalPoint>> {
    if c.len() != pair.rank() {
        return Err(Error::Arity { what: "m", expected: pair.rank(), got: c.len() });
    }
    let sys = MomentSystem::new(pair, c);
    let degree: f64 = c.iter().enumerate().map(|(i, &x)| x * pair.hw_degree(i) as f64).sum();
    let radius = (2.0 * degree).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = Vec::new();
    let mut best = f64::INFINITY;
    for _ in 0..STARTS {
        let (x, res) = sys.solve_from(start_point(&mut rng, 2 * pair.n, radius));
        best = best.min(res);
        if res < SOLVER_TOL {
            found.push(SphericalPoint { v: from_real(x.as_slice()), lambda: 1.0, m: None, residual: res });
            if found.len() >= count {
                break;
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoConvergence { best_residual: best });
    }
    Ok(found)
}

/// A spherical point `v_m` of type `α_m` at `λ = 1`.
pub fn solve_spherical_point(pair: &PairSpec, m: &[u32], seed: u64) -> Result<SphericalPoint> {
    Ok(solve_spherical_points(pair, m, 1, seed)?.remove(0))
}

/// `(√λ v_m, λA)`.
pub fn spherical_point_type1(pair: &PairSpec, lambda: f64, m: &[u32], seed: u64) -> Result<SphericalPoint> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda.to_string()));
    }
    let sp = solve_spherical_point(pair, m, seed)?;
    let s = lambda.sqrt();
    Ok(SphericalPoint { v: sp.v.iter().map(|x| x * s).collect(), lambda, ..sp })
}

/// Checks `h_m(v) ≠ 0` and `2∂_i h_m(v) = v̄_i h_m(v)`; returns the verdict
/// and the largest relative defect.
pub fn is_well_adapted(pair: &PairSpec, m: &[u32], v: &[Complex64]) -> Result<(bool, f64)> {
    let h = crate::fock::highest_weight_monomial(pair, m)?;
    let t = vec![0.0; pair.d];
    let hv = h.evaluate(v, &t);
    if hv.norm() <= 1e-9 {
        return Ok((false, f64::INFINITY));
    }
    let vs = pair.vars();
    let defect = (0..pair.n)
        .map(|i| (2.0 * h.derivative(vs.v(i)).evaluate(v, &t) - v[i].conj() * hv).norm())
        .fold(0.0, f64::max);
    let rel = defect / hv.norm();
    Ok((rel < 1e-6, rel))
}

/// Outcome of comparing `top(p̃)(m)` with `(-1)^{s/2} p(v_m)`.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaTopReport {
    pub invariant: String,
    pub m: Vec<u32>,
    pub top_value: f64,
    pub spherical_value: f64,
    pub relative_error: f64,
    pub passed: bool,
}

pub fn verify_lemma_top(pair: &PairSpec, i: usize, m: &[u32], seed: u64) -> Result<LemmaTopReport> {
    verify_lemma_top_of(pair, i, pair.invariant(i)?, m, seed)
}

pub fn verify_lemma_top_of(pair: &PairSpec, index: usize, inv: &Invariant, m: &[u32], seed: u64) -> Result<LemmaTopReport> {
    if inv.z != 0 {
        return Err(Error::MixedInvariant { index, z_degree: inv.z });
    }
    let sp = solve_spherical_point(pair, m, seed)?;
    let (ok, rel) = is_well_adapted(pair, m, &sp.v)?;
    if !ok {
        return Err(Error::WellAdaptedViolation { m: m.to_vec(), residual: rel });
    }
    let ep = eigen_poly_of(pair, inv)?;
    let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
    let top_value = ep.top_term().eval(&mf).re;
    let sign = if (inv.s / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let spherical_value = sign * inv.poly.evaluate(&sp.v, &vec![0.0; pair.d]).re;
    let natural = sp.v.iter().map(|x| x.norm_sqr()).sum::<f64>().powf(inv.s as f64 / 2.0);
    let scale = top_value.abs().max(spherical_value.abs()).max(natural).max(1.0);
    let relative_error = (top_value - spherical_value).abs() / scale;
    Ok(LemmaTopReport {
        invariant: inv.name.clone(),
        m: m.to_vec(),
        top_value,
        spherical_value,
        relative_error,
        passed: relative_error < 1e-6,
    })
}

/// `max |τ(v)_j - target_j|` over off-torus components.
pub fn off_torus_defect(pair: &PairSpec, v: &[Complex64]) -> f64 {
    let tau = moment_map(pair, v);
    (0..tau.len()).filter(|j| !pair.torus_indices.contains(j)).map(|j| tau[j].norm()).fold(0.0, f64::max)
}

/// `‖τ(v) - (α_m)_k‖`.
pub fn moment_residual(pair: &PairSpec, m: &[f64], v: &[Complex64]) -> f64 {
    moment_map(pair, v).iter().zip(alpha_target(pair, m)).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{builtin_heisenberg_un, builtin_u2su2};

    #[test]
    fn zero_and_homogeneity() {
        let p = builtin_u2su2();
        assert!(moment_map(&p, &[Complex64::new(0.0, 0.0); 4]).iter().all(|c| c.norm() == 0.0));
        let v = vec![Complex64::new(0.3, 0.2), Complex64::new(-1.0, 0.5), Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.7)];
        let v2: Vec<_> = v.iter().map(|x| x * 2.0).collect();
        for (a, b) in moment_map(&p, &v2).iter().zip(moment_map(&p, &v)) {
            assert!((a - 4.0 * b).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_is_diagonal_point() {
        let p = builtin_u2su2();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let id = [one, zero, zero, one];
        assert!(off_torus_defect(&p, &id) < 1e-15);
        // u = I is the normalized point for m = (0,0,1); v_m = √2 u
        let vm: Vec<_> = id.iter().map(|x| x * 2f64.sqrt()).collect();
        assert!(moment_residual(&p, &[0.0, 0.0, 1.0], &vm) < 1e-14);
    }

    #[test]
    fn u1_solution_has_lemma_norm() {
        let p = builtin_heisenberg_un(1).unwrap();
        let sp = solve_spherical_point(&p, &[3], DEFAULT_SEED).unwrap();
        assert!((sp.v[0].norm_sqr() - 6.0).abs() < 1e-9);
        assert!(sp.residual < SOLVER_TOL);
    }

    #[test]
    fn well_adapted_examples() {
        let p = builtin_heisenberg_un(1).unwrap();
        assert!(is_well_adapted(&p, &[2], &[Complex64::new(2.0, 0.0)]).unwrap().0);
        assert!(is_well_adapted(&p, &[0], &[Complex64::new(0.0, 0.0)]).unwrap().0);
        assert!(!is_well_adapted(&p, &[0], &[Complex64::new(0.5, 0.0)]).unwrap().0);
        let q = builtin_u2su2();
        let sp = solve_spherical_point(&q, &[1, 1, 1], DEFAULT_SEED).unwrap();
        assert!(is_well_adapted(&q, &[1, 1, 1], &sp.v).unwrap().0);
    }

    #[test]
    fn mixed_lemma_top_rejected() {
        let p = builtin_u2su2();
        assert!(matches!(verify_lemma_top(&p, 3, &[1, 1, 1], DEFAULT_SEED), Err(Error::MixedInvariant { .. })));
    }
}
