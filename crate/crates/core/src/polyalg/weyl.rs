use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Zero};

use super::poly::{MultiPoly, VarSet};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Normal-ordered differential operator `Σ c · v^a ∂^b` on `C[v_1..v_n]`.
///
/// Each term multiplies after differentiating, so `v^a ∂^b` applied to `f`
/// is `v^a · ∂^b f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylOp {
    n: usize,
    terms: BTreeMap<(Vec<u32>, Vec<u32>), Scalar>,
}

fn falling(c: u32, k: u32) -> Scalar {
    // c (c-1) ... (c-k+1)
    let mut acc: i64 = 1;
    for j in 0..k {
        acc *= (c - j) as i64;
    }
    Scalar::from_int(acc)
}

fn binom(n: u32, k: u32) -> Scalar {
    let mut acc = num::BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    Scalar::real(num::BigRational::from_integer(acc))
}

impl WeylOp {
    pub fn zero(n: usize) -> Self {
        WeylOp { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut op = WeylOp::zero(n);
        op.add_term(vec![0; n], vec![0; n], &Scalar::one());
        op
    }

    pub fn term(mult: Vec<u32>, deriv: Vec<u32>, c: Scalar) -> Self {
        assert_eq!(mult.len(), deriv.len());
        let mut op = WeylOp::zero(mult.len());
        op.add_term(mult, deriv, &c);
        op
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<u32>, Vec<u32>), &Scalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, mult: Vec<u32>, deriv: Vec<u32>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (mult, deriv);
        let slot = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Replaces every antiholomorphic variable `w_i` by `∂_i`.
    pub fn quantize(p: &MultiPoly) -> Result<WeylOp> {
        if p.has_central() {
            return Err(Error::CentralVariable);
        }
        let vs = p.vars();
        let n = vs.holo;
        if vs.anti != n {
            return Err(Error::Arity { what: "antiholomorphic variables", expected: n, got: vs.anti });
        }
        let mut op = WeylOp::zero(n);
        for (e, c) in p.terms() {
            op.add_term(e[..n].to_vec(), e[n..2 * n].to_vec(), c);
        }
        Ok(op)
    }

    pub fn scale(&self, c: &Scalar) -> WeylOp {
        let mut out = WeylOp::zero(self.n);
        for ((a, b), x) in &self.terms {
            out.add_term(a.clone(), b.clone(), &(x * c));
        }
        out
    }

    /// Applies the operator to a holomorphic polynomial; the result lives over
    /// the same variable set as `p`.
    pub fn apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let vs: VarSet = p.vars();
        if vs.holo != self.n {
            return Err(Error::Arity { what: "holomorphic variables", expected: self.n, got: vs.holo });
        }
        if !p.is_holomorphic() {
            return Err(Error::NotHolomorphic);
        }
        let mut out = MultiPoly::zero(vs);
        for ((a, b), c) in &self.terms {
            for (e, x) in p.terms() {
                if e[..self.n].iter().zip(b).any(|(ci, bi)| ci < bi) {
                    continue;
                }
                let mut coeff = c * x;
                let mut exp = e.clone();
                for i in 0..self.n {
                    coeff *= &falling(e[i], b[i]);
                    exp[i] = e[i] - b[i] + a[i];
                }
                out.add_term(exp, &coeff);
            }
        }
        Ok(out)
    }

    /// Operator product `self ∘ other`, normal-ordered by the Leibniz rule.
    pub fn compose(&self, other: &WeylOp) -> WeylOp {
        assert_eq!(self.n, other.n, "composing operators on different variable counts");
        let n = self.n;
        let mut out = WeylOp::zero(n);
        for ((a, b), c1) in &self.terms {
            for ((cc, d), c2) in &other.terms {
                // ∂^b x^cc = Σ_k C(b,k) (∂^k x^cc) ∂^(b-k)
                let ranges: Vec<u32> = (0..n).map(|i| b[i].min(cc[i])).collect();
                let mut k = vec![0u32; n];
                loop {
                    let mut coeff = c1 * c2;
                    for i in 0..n {
                        coeff *= &binom(b[i], k[i]);
                        coeff *= &falling(cc[i], k[i]);
                    }
                    let mult: Vec<u32> = (0..n).map(|i| a[i] + cc[i] - k[i]).collect();
                    let deriv: Vec<u32> = (0..n).map(|i| b[i] - k[i] + d[i]).collect();
                    out.add_term(mult, deriv, &coeff);
                    // odometer over 0..=ranges
                    let mut i = 0;
                    while i < n {
                        if k[i] < ranges[i] {
                            k[i] += 1;
                            break;
                        }
                        k[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn constant_term(&self) -> Scalar {
        let z = vec![0; self.n];
        self.terms.get(&(z.clone(), z)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// (max multiplication degree, max derivative degree).
    pub fn orders(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(m, d), (a, b)| (m.max(a.iter().sum()), d.max(b.iter().sum())))
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            for (i, &k) in a.iter().enumerate() {
                match k {
                    0 => {}
                    1 => parts.push(format!("v{}", i + 1)),
                    _ => parts.push(format!("v{}^{}", i + 1, k)),
                }
            }
            for (i, &k) in b.iter().enumerate() {
                match k {
                    0 => {}
                    1 => parts.push(format!("d{}", i + 1)),
                    _ => parts.push(format!("d{}^{}", i + 1, k)),
                }
            }
            if parts.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", parts.join("*"))?;
            } else {
                write!(f, "{c}*{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}
