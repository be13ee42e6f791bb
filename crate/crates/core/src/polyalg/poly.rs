use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;
use num::traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Declared variables of a polynomial ring.
///
/// Exponent vectors are laid out as `[v_1..v_holo, w_1..w_anti, t_1..t_central]`.
/// `w_i` stands for the conjugate of `v_i`; the two are independent symbols until
/// a polynomial is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    pub holo: usize,
    pub anti: usize,
    pub central: usize,
    pub style: VarStyle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarStyle {
    /// `v`, `w`, `t` names: coordinates on V ⊕ z.
    Phase,
    /// `m` names: coordinates on the weight lattice.
    Lattice,
}

impl VarSet {
    /// `n` holomorphic, `n` antiholomorphic and `d` central variables.
    pub fn phase(n: usize, d: usize) -> Self {
        VarSet { holo: n, anti: n, central: d, style: VarStyle::Phase }
    }

    pub fn lattice(r: usize) -> Self {
        VarSet { holo: r, anti: 0, central: 0, style: VarStyle::Lattice }
    }

    pub fn len(&self) -> usize {
        self.holo + self.anti + self.central
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn v(&self, i: usize) -> usize {
        assert!(i < self.holo);
        i
    }

    pub fn w(&self, i: usize) -> usize {
        assert!(i < self.anti);
        self.holo + i
    }

    pub fn t(&self, k: usize) -> usize {
        assert!(k < self.central);
        self.holo + self.anti + k
    }

    pub fn name(&self, idx: usize) -> String {
        match self.style {
            VarStyle::Lattice => format!("m{}", idx + 1),
            VarStyle::Phase if idx < self.holo => format!("v{}", idx + 1),
            VarStyle::Phase if idx < self.holo + self.anti => format!("w{}", idx - self.holo + 1),
            VarStyle::Phase => format!("t{}", idx - self.holo - self.anti + 1),
        }
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} holo, {} anti, {} central)", self.holo, self.anti, self.central)
    }
}

pub type Exponent = Vec<u32>;

/// Exact multivariate polynomial with Gaussian-rational coefficients.
///
/// Terms are kept in a sorted map with no zero coefficients, so structural
/// equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<Exponent, Scalar>,
}

impl MultiPoly {
    pub fn zero(vars: VarSet) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: VarSet, c: Scalar) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn one(vars: VarSet) -> Self {
        Self::constant(vars, Scalar::one())
    }

    pub fn monomial(vars: VarSet, exp: Exponent, c: Scalar) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length does not match variable set");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        MultiPoly { vars, terms }
    }

    pub fn var(vars: VarSet, idx: usize) -> Self {
        let mut exp = vec![0; vars.len()];
        exp[idx] = 1;
        Self::monomial(vars, exp, Scalar::one())
    }

    /// Builds from `(exponent, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(vars: VarSet, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Scalar)>,
    {
        let mut p = MultiPoly::zero(vars);
        for (exp, c) in terms {
            if exp.len() != vars.len() {
                return Err(Error::Arity { what: "exponent", expected: vars.len(), got: exp.len() });
            }
            p.add_term(exp, &c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> VarSet {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> Scalar {
        self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VarSetMismatch { left: self.vars, right: other.vars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars);
        }
        MultiPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Replaces every variable by a polynomial over `target`.
    pub fn substitute(&self, images: &[MultiPoly], target: VarSet) -> Result<MultiPoly> {
        if images.len() != self.vars.len() {
            return Err(Error::SubstitutionArity { expected: self.vars.len(), got: images.len() });
        }
        if let Some(bad) = images.iter().find(|p| p.vars != target) {
            return Err(Error::VarSetMismatch { left: target, right: bad.vars });
        }
        // powers[i][k] = images[i]^k, built lazily up to the max exponent used
        let mut max_exp = vec![0u32; self.vars.len()];
        for e in self.terms.keys() {
            for (m, &k) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
        }
        let powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(img, &top)| {
                let mut v = vec![MultiPoly::one(target)];
                for k in 1..=top as usize {
                    let next = &v[k - 1] * img;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Exact evaluation at an assignment of every variable.
    pub fn eval_exact(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.vars.len() {
            return Err(Error::Arity { what: "assignment", expected: self.vars.len(), got: point.len() });
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Floating evaluation at an arbitrary assignment of every variable.
    pub fn eval_raw(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars.len(), "assignment length");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(c.to_complex(), |acc, (&k, x)| if k == 0 { acc } else { acc * x.powu(k) })
            })
            .sum()
    }

    /// Evaluates with `w_i := conj(v_i)` and real central coordinates `t`.
    pub fn evaluate(&self, v: &[Complex64], t: &[f64]) -> Complex64 {
        assert_eq!(v.len(), self.vars.holo, "holomorphic assignment length");
        assert_eq!(t.len(), self.vars.central, "central assignment length");
        let mut point = Vec::with_capacity(self.vars.len());
        point.extend_from_slice(v);
        point.extend(v.iter().take(self.vars.anti).map(|x| x.conj()));
        point.extend(t.iter().map(|&x| Complex64::new(x, 0.0)));
        self.eval_raw(&point)
    }

    /// `v_i ↦ i·b_i`, `w_i ↦ i·conj(b_i)`, central variables ↦ 0.
    pub fn formal_i_eval(&self, b: &[Complex64]) -> Complex64 {
        assert_eq!(b.len(), self.vars.holo, "holomorphic assignment length");
        let i = Complex64::i();
        let mut point = Vec::with_capacity(self.vars.len());
        point.extend(b.iter().map(|x| i * x));
        point.extend(b.iter().take(self.vars.anti).map(|x| i * x.conj()));
        point.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), self.vars.central));
        self.eval_raw(&point)
    }

    /// Exact counterpart of [`MultiPoly::formal_i_eval`].
    pub fn formal_i_eval_exact(&self, b: &[Scalar]) -> Result<Scalar> {
        if b.len() != self.vars.holo {
            return Err(Error::Arity { what: "holomorphic assignment", expected: self.vars.holo, got: b.len() });
        }
        let i = Scalar::i();
        let mut point: Vec<Scalar> = b.iter().map(|x| &i * x).collect();
        point.extend(b.iter().take(self.vars.anti).map(|x| &i * &x.conj()));
        point.extend(std::iter::repeat_n(Scalar::zero(), self.vars.central));
        self.eval_exact(&point)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// (degree in v ∪ w, degree in t) of a single exponent.
    pub fn bidegree_of(&self, exp: &[u32]) -> (u32, u32) {
        let split = self.vars.holo + self.vars.anti;
        (exp[..split].iter().sum(), exp[split..].iter().sum())
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.terms.keys().map(|e| self.bidegree_of(e))
    }

    /// (degree in v, degree in w) of a single exponent.
    pub fn holo_anti_degree_of(&self, exp: &[u32]) -> (u32, u32) {
        let h = self.vars.holo;
        (exp[..h].iter().sum(), exp[h..h + self.vars.anti].iter().sum())
    }

    pub fn is_holomorphic(&self) -> bool {
        let h = self.vars.holo;
        self.terms.keys().all(|e| e[h..].iter().all(|&k| k == 0))
    }

    pub fn has_central(&self) -> bool {
        let split = self.vars.holo + self.vars.anti;
        self.terms.keys().any(|e| e[split..].iter().any(|&k| k > 0))
    }

    pub fn homogeneous_component(&self, degree: u32) -> MultiPoly {
        MultiPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous part of maximal total degree; zero for the zero polynomial.
    pub fn top_term(&self) -> MultiPoly {
        match self.total_degree() {
            Some(d) => self.homogeneous_component(d),
            None => self.clone(),
        }
    }

    pub fn derivative(&self, idx: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[idx] -= 1;
            out.add_term(e2, &(c * &Scalar::from_int(k as i64)));
        }
        out
    }

    /// Re-declares the polynomial over a larger variable set with the same
    /// leading blocks (e.g. adds central variables).
    pub fn embed(&self, target: VarSet) -> Result<MultiPoly> {
        let s = self.vars;
        if target.holo != s.holo || target.anti < s.anti || target.central < s.central {
            return Err(Error::VarSetMismatch { left: s, right: target });
        }
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            e2[..s.holo].copy_from_slice(&e[..s.holo]);
            e2[target.holo..target.holo + s.anti].copy_from_slice(&e[s.holo..s.holo + s.anti]);
            let t0 = target.holo + target.anti;
            e2[t0..t0 + s.central].copy_from_slice(&e[s.holo + s.anti..]);
            out.add_term(e2, c);
        }
        Ok(out)
    }

    /// If `self == c · other` for a scalar `c`, returns `c`.
    ///
    /// Zero is proportional to everything with ratio 0; a nonzero polynomial is
    /// never proportional to zero.
    pub fn ratio_to(&self, other: &MultiPoly) -> Option<Scalar> {
        if self.vars != other.vars {
            return None;
        }
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        let (e0, c0) = other.terms.iter().next()?;
        let c = self.terms.get(e0)?.checked_div(c0).ok()?;
        if self == &other.scale(&c) {
            Some(c)
        } else {
            None
        }
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("polynomial addition over different variable sets")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("polynomial subtraction over different variable sets")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("polynomial product over different variable sets")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse(e.iter().sum::<u32>()));
        for (k, (e, c)) in terms.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { self.vars.name(i) } else { format!("{}^{}", self.vars.name(i), p) })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{c}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}
