use std::fmt;

use num::rational::BigRational;
use num::traits::{One, Zero};
use serde::Serialize;

use super::transfer::{bracket_against_a, exact_det};
use super::PairSpec;
use crate::polyalg::{infinitesimal_action, MultiPoly, Scalar};

/// One named validation check with an optional witness on failure.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub pair: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, witness: Option<String>) {
        self.checks.push(Check { name: name.into(), passed: witness.is_none(), witness });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "[PASS] {}", c.name)?,
                Some(w) => writeln!(f, "[FAIL] {}: {}", c.name, w)?,
            }
        }
        Ok(())
    }
}

fn is_identity_q(m: &[Vec<BigRational>]) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() }))
}

fn is_identity_s(m: &[Vec<Scalar>]) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() }))
}

fn norm_sqr_v(p: &PairSpec) -> MultiPoly {
    let vs = p.vars();
    (0..p.n).fold(MultiPoly::zero(vs), |acc, i| &acc + &(&MultiPoly::var(vs, vs.v(i)) * &MultiPoly::var(vs, vs.w(i))))
}

fn norm_sqr_t(p: &PairSpec) -> MultiPoly {
    let vs = p.vars();
    (0..p.d).fold(MultiPoly::zero(vs), |acc, k| &acc + &MultiPoly::var(vs, vs.t(k)).pow(2))
}

/// Runs every structural check on a shape-valid pair.
///
/// Each check is recorded even after an earlier failure, so the report lists
/// all problems at once.
pub fn validate_pair(p: &PairSpec) -> ValidationReport {
    let mut rep = ValidationReport { pair: p.name.clone(), checks: Vec::new() };
    if let Err(e) = p.check_shape() {
        rep.push("shape", Some(e.to_string()));
        return rep;
    }

    let orthonormal = is_identity_q(&p.inner_z) && is_identity_s(&p.inner_v);
    rep.push("orthonormal coordinates", (!orthonormal).then(|| "inner-product Gram matrices must be the identity".into()));

    let norm_a = p.a.iter().fold(BigRational::zero(), |acc, x| acc + x * x);
    rep.push("unit base point", (!norm_a.is_one()).then(|| format!("|A|^2 = {norm_a}")));

    let mut skew = None;
    for (k, s) in p.bracket.iter().enumerate() {
        for i in 0..s.len() {
            for j in 0..s.len() {
                if s[i][j] != -s[j][i].clone() && skew.is_none() {
                    skew = Some(format!("bracket component {k} entry ({i},{j})"));
                }
            }
        }
    }
    rep.push("skew bracket", skew);

    let det = exact_det(&bracket_against_a(p));
    rep.push("non-degenerate form", det.is_zero().then(|| "det J_A = 0".into()));

    let mut homog = None;
    for inv in &p.invariants {
        if inv.s % 2 != 0 {
            homog.get_or_insert(format!("{} has odd V-degree {}", inv.name, inv.s));
        }
        if inv.poly.is_zero() {
            homog.get_or_insert(format!("{} is zero", inv.name));
        }
        if let Some(bd) = inv.poly.bidegrees().find(|&bd| bd != (inv.s, inv.z)) {
            homog.get_or_insert(format!("{} has a term of bidegree {:?}, declared ({}, {})", inv.name, bd, inv.s, inv.z));
        }
    }
    rep.push("invariant bidegrees", homog);

    let mut enumeration = None;
    if p.invariants[0].poly != norm_sqr_t(p) {
        enumeration = Some("p0 must be |z|^2".to_string());
    } else if p.invariants[1].poly != norm_sqr_v(p) {
        enumeration = Some("p1 must be |v|^2".to_string());
    }
    rep.push("invariant enumeration", enumeration);

    for inv in &p.invariants {
        let mut bad = None;
        for z in &p.k_basis {
            match infinitesimal_action(z, &inv.poly) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    bad = Some(format!("{} . {} = {}", z.name, inv.name, r));
                    break;
                }
                Err(e) => {
                    bad = Some(e.to_string());
                    break;
                }
            }
        }
        rep.push(format!("invariance of {}", inv.name), bad);
    }

    let mut stab = None;
    for z in p.ka_basis() {
        let moved: Vec<BigRational> =
            (0..p.d).map(|k| (0..p.d).fold(BigRational::zero(), |acc, l| acc + &z.zmat[k][l] * &p.a[l])).collect();
        if moved.iter().any(|x| !x.is_zero()) {
            stab = Some(format!("{} moves A", z.name));
            break;
        }
    }
    rep.push("kA stabilizes A", stab);

    let holo = p.hw_generators.iter().position(|h| !h.is_holomorphic() || h.has_central() || h.is_zero());
    rep.push("holomorphic generators", holo.map(|i| format!("h{} is not a nonzero holomorphic polynomial", i + 1)));

    for (i, h) in p.hw_generators.iter().enumerate() {
        let mut bad = None;
        for (j, z) in p.torus().enumerate() {
            let expected = h.scale(&(&Scalar::i() * &Scalar::from_int(p.weights[i][j])));
            match infinitesimal_action(z, h) {
                Ok(r) if r == expected => {}
                Ok(r) => {
                    let resid = &r - &expected;
                    bad = Some(format!("{} . h{} - i*{}*h{} = {}", z.name, i + 1, p.weights[i][j], i + 1, resid));
                    break;
                }
                Err(e) => {
                    bad = Some(e.to_string());
                    break;
                }
            }
        }
        rep.push(format!("torus weight of h{}", i + 1), bad);
    }
    rep
}
