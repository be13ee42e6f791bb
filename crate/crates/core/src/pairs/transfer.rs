use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{Signed, Zero};

use super::{from_real, to_real, PairSpec, Point};
use crate::error::{Error, Result};
use crate::polyalg::{ratio_to_f64, MultiPoly, Scalar, VarSet};

const BLOCK_TOL: f64 = 1e-9;

/// An eigenspace `V_μ` of `|J_A|` with `J_A = μ J` on it.
#[derive(Clone, Debug)]
pub struct JBlock {
    pub mu: f64,
    /// Orthonormal basis of `V_μ` in real coordinates, one column per vector.
    pub basis: DMatrix<f64>,
}

/// The skew map `J_A` on `V` defined by `⟨[v, w], A⟩ = ⟨J_A v, w⟩`.
#[derive(Clone, Debug)]
pub struct JAStructure {
    pub exact: Vec<Vec<BigRational>>,
    pub matrix: DMatrix<f64>,
    pub blocks: Vec<JBlock>,
    /// `φ = Σ μ^{-1/2} P_μ` in real coordinates.
    pub phi: DMatrix<f64>,
    pub phi_inv: DMatrix<f64>,
    /// `c` when `J_Aᵀ J_A = c·I` exactly.
    pub gram_scalar: Option<BigRational>,
}

/// `p` transported to the Heisenberg model: `q(v) = p(v, A)` and
/// `p(v, tA)` on `V ⊕ R`.
#[derive(Clone, Debug)]
pub struct TransferredInvariant {
    pub q: MultiPoly,
    pub p_vta: MultiPoly,
    /// `p_A` with `p_A(φ(v), t) = p(v, tA)`, when it has rational coefficients.
    pub p_a_exact: Option<MultiPoly>,
}

pub(crate) fn exact_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// `S_A = Σ A_k S_k`, so that `⟨[x, y], A⟩ = xᵀ S_A y`.
pub(crate) fn bracket_against_a(pair: &PairSpec) -> Vec<Vec<BigRational>> {
    let m = 2 * pair.n;
    let mut s = vec![vec![BigRational::zero(); m]; m];
    for (ak, sk) in pair.a.iter().zip(&pair.bracket) {
        if ak.is_zero() {
            continue;
        }
        for i in 0..m {
            for j in 0..m {
                s[i][j] += ak * &sk[i][j];
            }
        }
    }
    s
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub fn build_ja(pair: &PairSpec) -> Result<JAStructure> {
    let m = 2 * pair.n;
    let s = bracket_against_a(pair);
    let exact: Vec<Vec<BigRational>> = (0..m).map(|i| (0..m).map(|j| s[j][i].clone()).collect()).collect();
    let matrix = DMatrix::from_fn(m, m, |i, j| ratio_to_f64(&exact[i][j]));
    let gram = matrix.transpose() * &matrix;
    let eig = SymmetricEigen::new(gram);

    if exact_det(&exact).is_zero() {
        let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b.max(0.0).sqrt()));
        return Err(Error::DegenerateForm { singular_value: smallest });
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut blocks: Vec<JBlock> = Vec::new();
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for &k in &order {
        let mu = eig.eigenvalues[k].max(0.0).sqrt();
        match groups.last_mut() {
            Some((mu0, idx)) if (mu - *mu0).abs() <= BLOCK_TOL * mu0.max(1.0) => idx.push(k),
            _ => groups.push((mu, vec![k])),
        }
    }
    let mut phi = DMatrix::zeros(m, m);
    let mut phi_inv = DMatrix::zeros(m, m);
    for (mu, idx) in groups {
        let basis = DMatrix::from_fn(m, idx.len(), |i, j| eig.eigenvectors[(i, idx[j])]);
        let proj = &basis * basis.transpose();
        phi += &proj / mu.sqrt();
        phi_inv += &proj * mu.sqrt();
        blocks.push(JBlock { mu, basis });
    }

    let jtj: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..m).fold(BigRational::zero(), |acc, k| acc + &exact[k][i] * &exact[k][j]))
                .collect()
        })
        .collect();
    let c = jtj[0][0].clone();
    let scalar = (0..m).all(|i| (0..m).all(|j| if i == j { jtj[i][j] == c } else { jtj[i][j].is_zero() }));

    Ok(JAStructure { exact, matrix, blocks, phi, phi_inv, gram_scalar: scalar.then_some(c) })
}

fn apply_real(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let x = DVector::from_vec(to_real(v));
    from_real((m * x).as_slice())
}

impl JAStructure {
    /// `φ(v) = Σ v_μ / √μ`.
    pub fn phi(&self, v: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.phi, v)
    }

    pub fn phi_inverse(&self, v: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.phi_inv, v)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.matrix, v)
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let x = DVector::from_vec(to_real(b));
        let sol = self.matrix.clone().lu().solve(&x).expect("J_A is non-degenerate");
        from_real(sol.as_slice())
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn p_transfer(&self, pair: &PairSpec, i: usize) -> Result<TransferredInvariant> {
        let inv = pair.invariant(i)?;
        let n = pair.n;
        let q = pair.restrict_to_a(&inv.poly)?;

        let line = VarSet::phase(n, 1);
        let t = MultiPoly::var(line, line.t(0));
        let mut to_line: Vec<MultiPoly> = (0..2 * n).map(|k| MultiPoly::var(line, k)).collect();
        to_line.extend(pair.a.iter().map(|ak| t.scale(&Scalar::real(ak.clone()))));
        let p_vta = inv.poly.substitute(&to_line, line)?;

        // φ^{-1} = c^{1/4} I, so p_A = (√c)^{s/2} p(v, tA) on s-homogeneous p
        let p_a_exact = self
            .gram_scalar
            .as_ref()
            .and_then(rational_sqrt)
            .filter(|_| inv.s % 2 == 0)
            .map(|root| p_vta.scale(&Scalar::real(root).pow(inv.s / 2)));
        Ok(TransferredInvariant { q, p_vta, p_a_exact })
    }

    /// `p_A(x, t) = p(φ^{-1}(x), tA)`, evaluated numerically.
    pub fn eval_p_a(&self, pair: &PairSpec, i: usize, x: &[Complex64], t: f64) -> Result<Complex64> {
        let inv = pair.invariant(i)?;
        let v = self.phi_inverse(x);
        let z: Vec<f64> = pair.a_f64().iter().map(|a| a * t).collect();
        Ok(inv.poly.evaluate(&v, &z))
    }
}

/// `Ad*(x)(0, λA) = (λ J_A x, λA)`.
pub fn coadjoint_action(pair: &PairSpec, ja: &JAStructure, x: &[Complex64], lambda: f64) -> Result<Point> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda.to_string()));
    }
    let v = ja.apply(x).into_iter().map(|c| c * lambda).collect();
    let t = pair.a_f64().into_iter().map(|a| a * lambda).collect();
    Ok(Point::new(v, t))
}
