//! The Fock model: invariant operators acting on highest-weight monomials,
//! their eigenvalues, and the eigenvalue polynomials `p̃(m)`.

use std::collections::HashMap;
use std::sync::Mutex;

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pairs::{Invariant, PairSpec};
use crate::polyalg::{MultiPoly, Scalar, VarSet, WeylOp};

/// Eigenvalue polynomial `p̃(m) = D̂_p(φ_{1,m})` in lattice variables `m_1..m_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPoly {
    pub invariant: String,
    pub s: u32,
    pub z: u32,
    pub poly: MultiPoly,
}

impl EigenPoly {
    pub fn eval_exact(&self, m: &[u32]) -> Scalar {
        let point: Vec<Scalar> = m.iter().map(|&k| Scalar::from_int(k as i64)).collect();
        self.poly.eval_exact(&point).expect("lattice point has rank entries")
    }

    /// Evaluation at real (not necessarily integral) `m`.
    pub fn eval(&self, m: &[f64]) -> Complex64 {
        let point: Vec<Complex64> = m.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.poly.eval_raw(&point)
    }

    pub fn top_term(&self) -> EigenPoly {
        EigenPoly { poly: self.poly.top_term(), ..self.clone() }
    }

    /// The eigenvalue at `(λ, m)` by the scaling law `λ^{s/2 + z} p̃(m)`.
    pub fn eigenvalue(&self, lambda: f64, m: &[f64]) -> Complex64 {
        self.eval(m) * lambda.powi((self.s / 2 + self.z) as i32)
    }
}

/// `h_m = h_1^{m_1} ··· h_r^{m_r}`.
pub fn highest_weight_monomial(pair: &PairSpec, m: &[u32]) -> Result<MultiPoly> {
    if m.len() != pair.rank() {
        return Err(Error::Arity { what: "m", expected: pair.rank(), got: m.len() });
    }
    Ok(pair.hw_generators.iter().zip(m).fold(MultiPoly::one(pair.vars()), |acc, (h, &k)| &acc * &h.pow(k)))
}

fn check_lambda(lambda: &BigRational) -> Result<()> {
    if lambda.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveLambda(lambda.to_string()))
    }
}

/// `quantize(p(v, A))` without the `λ` prefactor.
pub fn quantized_restriction(pair: &PairSpec, inv: &Invariant) -> Result<WeylOp> {
    if !inv.s.is_multiple_of(2) {
        return Err(Error::OddDegree(inv.s));
    }
    WeylOp::quantize(&pair.restrict_to_a(&inv.poly)?)
}

/// `ρ_λ(D_p) = (-2λ)^{s/2} p(v, ∂)` for a pure `V` invariant.
pub fn rho_op(pair: &PairSpec, i: usize, lambda: &BigRational) -> Result<WeylOp> {
    let inv = pair.invariant(i)?;
    rho_op_of(pair, i, inv, lambda)
}

fn rho_op_of(pair: &PairSpec, index: usize, inv: &Invariant, lambda: &BigRational) -> Result<WeylOp> {
    if inv.z != 0 {
        return Err(Error::MixedInvariant { index, z_degree: inv.z });
    }
    if lambda.is_zero() {
        return Err(Error::NonPositiveLambda(lambda.to_string()));
    }
    let pref = Scalar::real(-BigRational::from_integer(2.into()) * lambda).pow(inv.s / 2);
    Ok(quantized_restriction(pair, inv)?.scale(&pref))
}

/// Type I eigenvalue of the invariant `inv` at `(λ, m)`:
/// `(iλ)^{z} (-2λ)^{s/2}` times the scalar by which `p(v, ∂)|_{z=A}` acts on `h_m`.
pub fn eigenvalue_type1_of(pair: &PairSpec, inv: &Invariant, lambda: &BigRational, m: &[u32]) -> Result<Scalar> {
    check_lambda(lambda)?;
    let op = quantized_restriction(pair, inv)?;
    eigenvalue_with_op(pair, inv, &op, lambda, m)
}

fn eigenvalue_with_op(pair: &PairSpec, inv: &Invariant, op: &WeylOp, lambda: &BigRational, m: &[u32]) -> Result<Scalar> {
    let h = highest_weight_monomial(pair, m)?;
    let image = op.apply(&h)?;
    let mu = image
        .ratio_to(&h)
        .ok_or_else(|| Error::NotEigenvector { invariant: inv.name.clone(), m: m.to_vec() })?;
    let lam = Scalar::real(lambda.clone());
    let pref = (&lam * &Scalar::from_int(-2)).pow(inv.s / 2);
    let central = (&Scalar::i() * &lam).pow(inv.z);
    Ok(&(&central * &pref) * &mu)
}

pub fn eigenvalue_type1(pair: &PairSpec, i: usize, lambda: &BigRational, m: &[u32]) -> Result<Scalar> {
    eigenvalue_type1_of(pair, pair.invariant(i)?, lambda, m)
}

/// `p(ib, 0)`: `v ↦ i b`, `w ↦ i b̄`, `z ↦ 0`.
pub fn eigenvalue_type2(pair: &PairSpec, i: usize, b: &[Complex64]) -> Result<Complex64> {
    let inv = pair.invariant(i)?;
    if b.len() != pair.n {
        return Err(Error::Arity { what: "b", expected: pair.n, got: b.len() });
    }
    Ok(inv.poly.formal_i_eval(b))
}

pub fn eigenvalue_type2_exact(pair: &PairSpec, i: usize, b: &[Scalar]) -> Result<Scalar> {
    pair.invariant(i)?.poly.formal_i_eval_exact(b)
}

/// Exact check of `D̂_p(φ_{λ,m}) = λ^{s/2+z} D̂_p(φ_{1,m})`.
pub fn scaling_check(pair: &PairSpec, i: usize, lambda: &BigRational, m: &[u32]) -> Result<bool> {
    let inv = pair.invariant(i)?;
    let at_lambda = eigenvalue_type1(pair, i, lambda, m)?;
    let at_one = eigenvalue_type1(pair, i, &BigRational::one(), m)?;
    let factor = Scalar::real(lambda.clone()).pow(inv.s / 2 + inv.z);
    Ok(at_lambda == &factor * &at_one)
}

fn lagrange_basis(vs: VarSet, var: usize, node: u32, nodes: u32) -> MultiPoly {
    let x = MultiPoly::var(vs, var);
    let mut acc = MultiPoly::one(vs);
    for l in 0..=nodes {
        if l == node {
            continue;
        }
        let shifted = &x - &MultiPoly::constant(vs, Scalar::from_int(l as i64));
        acc = (&acc * &shifted).scale(&Scalar::from_ratio(1, node as i64 - l as i64));
    }
    acc
}

fn grid(r: usize, g: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|p| (0..=g).map(move |k| [p.clone(), vec![k]].concat())).collect();
    }
    out
}

/// Interpolates `p̃` on `{0..s/2}^r`, then verifies it exactly on ten
/// lattice points off the grid and checks the degree bound.
pub fn eigen_poly_of(pair: &PairSpec, inv: &Invariant) -> Result<EigenPoly> {
    let r = pair.rank();
    let g = inv.s.div_ceil(2);
    let lattice = VarSet::lattice(r);
    let one = BigRational::one();
    let op = quantized_restriction(pair, inv)?;

    let mut poly = MultiPoly::zero(lattice);
    for node in grid(r, g) {
        let val = eigenvalue_with_op(pair, inv, &op, &one, &node)?;
        if val.is_zero() {
            continue;
        }
        let basis =
            node.iter().enumerate().fold(MultiPoly::one(lattice), |acc, (i, &k)| &acc * &lagrange_basis(lattice, i, k, g));
        poly = &poly + &basis.scale(&val);
    }
    let ep = EigenPoly { invariant: inv.name.clone(), s: inv.s, z: inv.z, poly };

    let bound = inv.s / 2;
    if let Some(deg) = ep.poly.total_degree() {
        if deg > bound {
            return Err(Error::DegreeBound { invariant: inv.name.clone(), degree: deg, bound });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x6569_6765_6e70);
    for _ in 0..10 {
        let mut m: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=g + 4)).collect();
        if m.iter().all(|&k| k <= g) {
            m[0] = g + 1 + rng.gen_range(0..3);
        }
        let direct = eigenvalue_with_op(pair, inv, &op, &one, &m)?;
        if direct != ep.eval_exact(&m) {
            return Err(Error::InterpolationResidual { invariant: inv.name.clone(), point: m });
        }
    }
    Ok(ep)
}

pub fn eigen_poly(pair: &PairSpec, i: usize) -> Result<EigenPoly> {
    eigen_poly_of(pair, pair.invariant(i)?)
}

/// A pair together with a memo of its eigenvalue polynomials.
pub struct FockModel<'a> {
    pair: &'a PairSpec,
    cache: Mutex<HashMap<usize, EigenPoly>>,
}

impl<'a> FockModel<'a> {
    pub fn new(pair: &'a PairSpec) -> Self {
        FockModel { pair, cache: Mutex::new(HashMap::new()) }
    }

    pub fn pair(&self) -> &'a PairSpec {
        self.pair
    }

    pub fn eigen_poly(&self, i: usize) -> Result<EigenPoly> {
        if let Some(ep) = self.cache.lock().expect("cache poisoned").get(&i) {
            return Ok(ep.clone());
        }
        // computed outside the lock; a racing duplicate computes the same value
        let ep = eigen_poly(self.pair, i)?;
        self.cache.lock().expect("cache poisoned").insert(i, ep.clone());
        Ok(ep)
    }

    pub fn eigen_polys(&self) -> Result<Vec<EigenPoly>> {
        (0..self.pair.invariants.len()).map(|i| self.eigen_poly(i)).collect()
    }
}

/// Reference eigenvalue formulas for the builtin pairs, as functions of
/// `(λ, m)` up to one constant per invariant.
pub fn reference_eigenvalue(pair: &PairSpec, i: usize, lambda: &BigRational, m: &[u32]) -> Option<Scalar> {
    let lam = Scalar::real(lambda.clone());
    let mi = |k: usize| Scalar::from_int(m[k] as i64);
    if pair.name.starts_with("heisenberg") {
        return match i {
            0 => Some(lam.pow(2)),
            1 => Some(&lam * &Scalar::from_int(pair.hw_degree_of(m) as i64)),
            _ => None,
        };
    }
    if pair.name == "u2su2" && m.len() == 3 {
        return match i {
            0 => Some(lam.pow(2)),
            1 => Some(&lam * &Scalar::from_int(pair.hw_degree_of(m) as i64)),
            2 => {
                let s = &(&(&Scalar::one() + &mi(0)) + &mi(1)) + &mi(2);
                Some(&lam.pow(2) * &(&mi(2) * &s))
            }
            3 => Some(&lam.pow(2) * &(&mi(0) - &mi(1))),
            _ => None,
        };
    }
    None
}

/// Single constant `c` with `computed = c · reference` on every sample, if one
/// exists. Samples where both sides vanish carry no information.
pub fn calibration_constant<I>(samples: I) -> Option<Scalar>
where
    I: IntoIterator<Item = (Scalar, Scalar)>,
{
    let mut c: Option<Scalar> = None;
    for (computed, reference) in samples {
        if reference.is_zero() {
            if !computed.is_zero() {
                return None;
            }
            continue;
        }
        let ratio = computed.checked_div(&reference).ok()?;
        match &c {
            None => c = Some(ratio),
            Some(c0) if *c0 == ratio => {}
            Some(_) => return None,
        }
    }
    c
}

/// Calibration constants of every invariant of a builtin pair on `{0..2}^r`
/// at `λ ∈ {1/2, 1, 2}`.
pub fn calibration_constants(pair: &PairSpec) -> Result<Vec<Option<Scalar>>> {
    let lambdas = [BigRational::new(1.into(), 2.into()), BigRational::one(), BigRational::from_integer(2.into())];
    let points = grid(pair.rank(), 2);
    (0..pair.invariants.len())
        .map(|i| {
            let mut samples = Vec::new();
            for lam in &lambdas {
                for m in &points {
                    let Some(reference) = reference_eigenvalue(pair, i, lam, m) else {
                        return Ok(None);
                    };
                    samples.push((eigenvalue_type1(pair, i, lam, m)?, reference));
                }
            }
            Ok(calibration_constant(samples))
        })
        .collect()
}
