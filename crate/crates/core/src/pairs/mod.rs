//! Concrete nilpotent Gelfand pairs: data model, builtin fixtures, the JSON
//! pair file, structural validation and the `J_A` transfer maps.

mod builtin;
mod file;
mod transfer;
mod validate;

use num::complex::Complex64;
use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::polyalg::{LieElement, MultiPoly, Scalar, VarSet};

pub use builtin::{builtin, builtin_heisenberg_un, builtin_u2su2, BUILTIN_NAMES};
pub use file::{load_pair, load_pair_unchecked, pair_from_json, pair_to_json, save_pair};
pub use transfer::{build_ja, coadjoint_action, JAStructure, TransferredInvariant};
pub use validate::{validate_pair, Check, ValidationReport};

/// A `K`-invariant polynomial on `V ⊕ z` with its bidegree `(s, z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariant {
    pub name: String,
    pub poly: MultiPoly,
    /// Degree in `V` (counting `v` and `w`).
    pub s: u32,
    /// Degree in `z`.
    pub z: u32,
}

impl Invariant {
    pub fn new(name: impl Into<String>, poly: MultiPoly, s: u32, z: u32) -> Self {
        Invariant { name: name.into(), poly, s, z }
    }

    pub fn total_degree(&self) -> u32 {
        self.s + self.z
    }
}

/// A point `(v, t)` of `n = V ⊕ z`, also used for `n*` via the inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub v: Vec<Complex64>,
    pub t: Vec<f64>,
}

impl Point {
    pub fn new(v: Vec<Complex64>, t: Vec<f64>) -> Self {
        Point { v, t }
    }

    pub fn v_norm_sqr(&self) -> f64 {
        self.v.iter().map(|x| x.norm_sqr()).sum()
    }
}

/// Full description of a nilpotent Gelfand pair `(K, N)` with `n = V ⊕ z`.
///
/// `V = C^n` is identified with `R^{2n}` through `(Re v_1.., Im v_1..)`, and
/// coordinates on `V` and `z` are orthonormal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpec {
    pub name: String,
    pub n: usize,
    pub d: usize,
    /// `bracket[k]` is the real `2n × 2n` matrix `S_k` with
    /// `[x, y]_k = xᵀ S_k y` in real coordinates.
    pub bracket: Vec<Vec<Vec<BigRational>>>,
    pub a: Vec<BigRational>,
    pub k_basis: Vec<LieElement>,
    /// Indices into `k_basis` of the elements stabilizing `A`.
    pub ka_indices: Vec<usize>,
    /// Indices into `ka_indices` of the torus elements.
    pub torus_indices: Vec<usize>,
    pub invariants: Vec<Invariant>,
    pub hw_generators: Vec<MultiPoly>,
    pub weights: Vec<Vec<i64>>,
    /// Gram matrix of the Hermitian form on `V` in the chosen coordinates.
    pub inner_v: Vec<Vec<Scalar>>,
    /// Gram matrix of the real form on `z`.
    pub inner_z: Vec<Vec<BigRational>>,
}

impl PairSpec {
    pub fn vars(&self) -> VarSet {
        VarSet::phase(self.n, self.d)
    }

    /// Number of highest-weight generators `r`.
    pub fn rank(&self) -> usize {
        self.hw_generators.len()
    }

    pub fn invariant(&self, i: usize) -> Result<&Invariant> {
        self.invariants.get(i).ok_or(Error::Index { what: "invariant", index: i, len: self.invariants.len() })
    }

    pub fn ka_basis(&self) -> impl Iterator<Item = &LieElement> {
        self.ka_indices.iter().map(move |&i| &self.k_basis[i])
    }

    pub fn torus(&self) -> impl Iterator<Item = &LieElement> {
        self.torus_indices.iter().map(move |&j| &self.k_basis[self.ka_indices[j]])
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(crate::polyalg::ratio_to_f64).collect()
    }

    /// Total degree of `h_i`.
    pub fn hw_degree(&self, i: usize) -> u32 {
        self.hw_generators[i].total_degree().unwrap_or(0)
    }

    /// `deg h_m = Σ m_i deg h_i`.
    pub fn hw_degree_of(&self, m: &[u32]) -> u32 {
        m.iter().enumerate().map(|(i, &k)| k * self.hw_degree(i)).sum()
    }

    /// Weight `α_m = Σ m_i α_i` on the torus basis.
    pub fn weight_of(&self, m: &[f64]) -> Vec<f64> {
        let t = self.torus_indices.len();
        (0..t).map(|j| m.iter().zip(&self.weights).map(|(&mi, w)| mi * w[j] as f64).sum()).collect()
    }

    /// `q(v) = p(v, A)`, kept over the pair's variable set.
    pub fn restrict_to_a(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let vs = self.vars();
        let mut images: Vec<MultiPoly> = (0..2 * self.n).map(|k| MultiPoly::var(vs, k)).collect();
        images.extend(self.a.iter().map(|ak| MultiPoly::constant(vs, Scalar::real(ak.clone()))));
        p.substitute(&images, vs)
    }

    /// Invariant values `(p_0(pt), .., p_r(pt))`, real parts.
    pub fn evaluate_invariants(&self, pt: &Point) -> Vec<f64> {
        self.invariants.iter().map(|inv| inv.poly.evaluate(&pt.v, &pt.t).re).collect()
    }

    /// Checks dimensions and index ranges; semantic checks live in
    /// [`validate_pair`].
    pub fn check_shape(&self) -> Result<()> {
        let (n, d) = (self.n, self.d);
        let schema = |msg: String| Err(Error::Schema(msg));
        if n == 0 {
            return schema("n must be positive".into());
        }
        if self.bracket.len() != d {
            return schema(format!("bracket has {} matrices, expected d = {d}", self.bracket.len()));
        }
        for (k, s) in self.bracket.iter().enumerate() {
            if s.len() != 2 * n || s.iter().any(|row| row.len() != 2 * n) {
                return schema(format!("bracket matrix {k} is not {0}x{0}", 2 * n));
            }
        }
        if self.a.len() != d {
            return schema(format!("A has {} entries, expected {d}", self.a.len()));
        }
        for z in &self.k_basis {
            if z.n() != n || z.vmat.iter().any(|r| r.len() != n) || z.d() != d || z.zmat.iter().any(|r| r.len() != d) {
                return schema(format!("k_basis element {} has wrong shape", z.name));
            }
        }
        if let Some(&bad) = self.ka_indices.iter().find(|&&i| i >= self.k_basis.len()) {
            return schema(format!("kA_basis index {bad} out of range"));
        }
        if let Some(&bad) = self.torus_indices.iter().find(|&&i| i >= self.ka_indices.len()) {
            return schema(format!("torus index {bad} out of range"));
        }
        let vs = self.vars();
        for inv in &self.invariants {
            if inv.poly.vars() != vs {
                return schema(format!("invariant {} has the wrong variable set", inv.name));
            }
        }
        if self.invariants.len() < 2 {
            return schema("at least the invariants |z|^2 and |v|^2 are required".into());
        }
        for h in &self.hw_generators {
            if h.vars() != vs {
                return schema("highest-weight generator has the wrong variable set".into());
            }
        }
        if self.invariants.len() != self.hw_generators.len() + 1 {
            return schema(format!(
                "{} invariants but {} highest-weight generators; expected r+1 and r",
                self.invariants.len(),
                self.hw_generators.len()
            ));
        }
        if self.weights.len() != self.hw_generators.len()
            || self.weights.iter().any(|w| w.len() != self.torus_indices.len())
        {
            return schema("weights must be one vector per generator, one entry per torus element".into());
        }
        if self.inner_v.len() != n || self.inner_v.iter().any(|r| r.len() != n) {
            return schema("inner_product.v must be n x n".into());
        }
        if self.inner_z.len() != d || self.inner_z.iter().any(|r| r.len() != d) {
            return schema("inner_product.z must be d x d".into());
        }
        Ok(())
    }
}

/// Hermitian product `⟨a, b⟩ = Σ a_i conj(b_i)` in orthonormal coordinates.
pub fn herm(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `(Re v, Im v)`.
pub fn to_real(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|x| x.re).chain(v.iter().map(|x| x.im)).collect()
}

pub fn from_real(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}
