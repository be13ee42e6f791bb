use nalgebra::DMatrix;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::Zero;

use super::poly::MultiPoly;
use super::scalar::{ratio_to_f64, Scalar};
use crate::error::{Error, Result};

/// Element of a Lie algebra acting on `V ⊕ z`: complex-linear on `V`
/// (`v ↦ vmat · v`) and real-linear on `z` (`t ↦ zmat · t`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    pub name: String,
    pub vmat: Vec<Vec<Scalar>>,
    pub zmat: Vec<Vec<BigRational>>,
}

impl LieElement {
    pub fn new(name: impl Into<String>, vmat: Vec<Vec<Scalar>>, zmat: Vec<Vec<BigRational>>) -> Self {
        LieElement { name: name.into(), vmat, zmat }
    }

    pub fn zero(name: impl Into<String>, n: usize, d: usize) -> Self {
        LieElement {
            name: name.into(),
            vmat: vec![vec![Scalar::zero(); n]; n],
            zmat: vec![vec![BigRational::zero(); d]; d],
        }
    }

    pub fn n(&self) -> usize {
        self.vmat.len()
    }

    pub fn d(&self) -> usize {
        self.zmat.len()
    }

    pub fn vmat_f64(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.vmat[i][j].to_complex())
    }

    pub fn zmat_f64(&self) -> DMatrix<f64> {
        let d = self.d();
        DMatrix::from_fn(d, d, |i, j| ratio_to_f64(&self.zmat[i][j]))
    }

    /// `exp(s·Z)` applied to `(v, t)`.
    pub fn flow(&self, s: f64, v: &[Complex64], t: &[f64]) -> (Vec<Complex64>, Vec<f64>) {
        let gv = (self.vmat_f64() * Complex64::new(s, 0.0)).exp();
        let gz = (self.zmat_f64() * s).exp();
        let v2 = &gv * nalgebra::DVector::from_column_slice(v);
        let t2 = &gz * nalgebra::DVector::from_column_slice(t);
        (v2.iter().copied().collect(), t2.iter().copied().collect())
    }

    pub fn apply_v(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n()).map(|i| (0..self.n()).map(|j| self.vmat[i][j].to_complex() * v[j]).sum()).collect()
    }
}

/// The derivation `Z·p = -d/ds p(exp(sZ)x)|_{s=0}` on polynomials over
/// `V ⊕ z`, with `w` transformed by the conjugate matrix.
pub fn infinitesimal_action(z: &LieElement, p: &MultiPoly) -> Result<MultiPoly> {
    let vs = p.vars();
    let n = vs.holo;
    if z.n() != n || vs.anti != n {
        return Err(Error::Arity { what: "Lie element V-dimension", expected: n, got: z.n() });
    }
    if z.d() != vs.central {
        return Err(Error::Arity { what: "Lie element z-dimension", expected: vs.central, got: z.d() });
    }
    let mut out = MultiPoly::zero(vs);
    for i in 0..n {
        // (Zv)_i and conj(Zv)_i as linear forms
        let mut zv = MultiPoly::zero(vs);
        let mut zw = MultiPoly::zero(vs);
        for j in 0..n {
            let c = &z.vmat[i][j];
            if c.is_zero() {
                continue;
            }
            zv = &zv + &MultiPoly::var(vs, vs.v(j)).scale(c);
            zw = &zw + &MultiPoly::var(vs, vs.w(j)).scale(&c.conj());
        }
        if !zv.is_zero() {
            out = &out - &(&zv * &p.derivative(vs.v(i)));
            out = &out - &(&zw * &p.derivative(vs.w(i)));
        }
    }
    for k in 0..vs.central {
        let mut zt = MultiPoly::zero(vs);
        for l in 0..vs.central {
            let c = &z.zmat[k][l];
            if !c.is_zero() {
                zt = &zt + &MultiPoly::var(vs, vs.t(l)).scale(&Scalar::real(c.clone()));
            }
        }
        if !zt.is_zero() {
            out = &out - &(&zt * &p.derivative(vs.t(k)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::VarSet;
    use num::traits::One;

    #[test]
    fn identity_is_minus_euler() {
        let vs = VarSet::phase(1, 0);
        let mut z = LieElement::zero("id", 1, 0);
        z.vmat[0][0] = Scalar::one();
        let v3 = MultiPoly::var(vs, 0).pow(3);
        assert_eq!(infinitesimal_action(&z, &v3).unwrap(), v3.scale(&Scalar::from_int(-3)));
    }

    #[test]
    fn unitary_generator_kills_norm() {
        let vs = VarSet::phase(2, 0);
        let norm = &(&MultiPoly::var(vs, 0) * &MultiPoly::var(vs, 2)) + &(&MultiPoly::var(vs, 1) * &MultiPoly::var(vs, 3));
        let mut z = LieElement::zero("X", 2, 0);
        z.vmat[0][1] = Scalar::gaussian(0, 1);
        z.vmat[1][0] = Scalar::gaussian(0, 1);
        assert!(infinitesimal_action(&z, &norm).unwrap().is_zero());
        let mut rot = LieElement::zero("R", 2, 0);
        rot.vmat[0][1] = Scalar::from_int(1);
        rot.vmat[1][0] = Scalar::from_int(-1);
        assert!(infinitesimal_action(&rot, &norm).unwrap().is_zero());
    }

    #[test]
    fn torus_weight() {
        let vs = VarSet::phase(2, 0);
        let mut z = LieElement::zero("T1", 2, 0);
        z.vmat[0][0] = Scalar::gaussian(0, -1);
        let v1 = MultiPoly::var(vs, 0);
        assert_eq!(infinitesimal_action(&z, &v1).unwrap(), v1.scale(&Scalar::i()));
        let v2 = MultiPoly::var(vs, 1);
        assert!(infinitesimal_action(&z, &v2).unwrap().is_zero());
    }

    #[test]
    fn flow_matches_derivation() {
        let vs = VarSet::phase(2, 0);
        let mut z = LieElement::zero("Z", 2, 0);
        z.vmat[0][1] = Scalar::from_int(2);
        z.vmat[1][0] = Scalar::gaussian(0, 1);
        let p = &MultiPoly::var(vs, 0).pow(2) * &MultiPoly::var(vs, 3);
        let zp = infinitesimal_action(&z, &p).unwrap();
        let v = [Complex64::new(0.3, -0.2), Complex64::new(-0.7, 0.5)];
        let eps = 1e-5;
        let (vp, _) = z.flow(eps, &v, &[]);
        let (vm, _) = z.flow(-eps, &v, &[]);
        let fd = -(p.evaluate(&vp, &[]) - p.evaluate(&vm, &[])) / (2.0 * eps);
        assert!((fd - zp.evaluate(&v, &[])).norm() < 1e-8);
    }
}
