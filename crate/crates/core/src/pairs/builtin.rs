use num::rational::BigRational;
use num::traits::{One, Zero};

use super::{Invariant, PairSpec};
use crate::error::{Error, Result};
use crate::polyalg::{LieElement, MultiPoly, Scalar, VarSet};

pub const BUILTIN_NAMES: &[&str] = &["heisenberg1", "heisenberg2", "heisenberg3", "heisenberg4", "u2su2"];

/// Resolves a builtin by name: `heisenberg<n>` (1 ≤ n ≤ 4), `u1` as an alias
/// for `heisenberg1`, or `u2su2`.
pub fn builtin(name: &str) -> Result<PairSpec> {
    match name {
        "u2su2" => Ok(builtin_u2su2()),
        "u1" => builtin_heisenberg_un(1),
        _ => match name.strip_prefix("heisenberg").and_then(|s| s.parse::<usize>().ok()) {
            Some(n) if (1..=4).contains(&n) => builtin_heisenberg_un(n),
            _ => Err(Error::UnknownPair(name.to_string())),
        },
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn identity_scalar(n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

fn identity_rational(n: usize) -> Vec<Vec<BigRational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
}

fn norm_sqr_v(vs: VarSet) -> MultiPoly {
    (0..vs.holo).fold(MultiPoly::zero(vs), |acc, i| &acc + &(&MultiPoly::var(vs, vs.v(i)) * &MultiPoly::var(vs, vs.w(i))))
}

fn norm_sqr_t(vs: VarSet) -> MultiPoly {
    (0..vs.central).fold(MultiPoly::zero(vs), |acc, k| &acc + &MultiPoly::var(vs, vs.t(k)).pow(2))
}

/// The Heisenberg group `H_n = C^n ⊕ R` with `K = U(n)`.
///
/// The bracket is `[v, v'] = -Im⟨v, v'⟩`.
pub fn builtin_heisenberg_un(n: usize) -> Result<PairSpec> {
    if !(1..=4).contains(&n) {
        return Err(Error::Schema(format!("heisenberg pair needs 1 <= n <= 4, got {n}")));
    }
    let vs = VarSet::phase(n, 1);
    let mut s = vec![vec![q(0); 2 * n]; 2 * n];
    for i in 0..n {
        s[i][n + i] = q(1);
        s[n + i][i] = q(-1);
    }
    let mut k_basis = Vec::new();
    for j in 0..n {
        let mut z = LieElement::zero(format!("T{}", j + 1), n, 1);
        z.vmat[j][j] = Scalar::gaussian(0, -1);
        k_basis.push(z);
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut re = LieElement::zero(format!("R{}{}", j + 1, k + 1), n, 1);
            re.vmat[j][k] = Scalar::from_int(1);
            re.vmat[k][j] = Scalar::from_int(-1);
            k_basis.push(re);
            let mut im = LieElement::zero(format!("I{}{}", j + 1, k + 1), n, 1);
            im.vmat[j][k] = Scalar::i();
            im.vmat[k][j] = Scalar::i();
            k_basis.push(im);
        }
    }
    let mut weight = vec![0i64; n];
    weight[0] = 1;
    Ok(PairSpec {
        name: format!("heisenberg{n}"),
        n,
        d: 1,
        bracket: vec![s],
        a: vec![q(1)],
        ka_indices: (0..k_basis.len()).collect(),
        torus_indices: (0..n).collect(),
        k_basis,
        invariants: vec![
            Invariant::new("p0", norm_sqr_t(vs), 0, 2),
            Invariant::new("p1", norm_sqr_v(vs), 2, 0),
        ],
        hw_generators: vec![MultiPoly::var(vs, vs.v(0))],
        weights: vec![weight],
        inner_v: identity_scalar(n),
        inner_z: identity_rational(1),
    })
}

type Mat2 = [[Scalar; 2]; 2];

fn m2(a: [[(i64, i64); 2]; 2]) -> Mat2 {
    a.map(|row| row.map(|(re, im)| Scalar::gaussian(re, im)))
}

fn m2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j])))
}

fn m2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] - &b[i][j]))
}

fn m2_adj(a: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

fn m2_trace(a: &Mat2) -> Scalar {
    &a[0][0] + &a[1][1]
}

/// `⟨X, e⟩ = -½ Re Tr(X e)` on `su_2`.
fn su2_pairing(x: &Mat2, e: &Mat2) -> BigRational {
    -m2_trace(&m2_mul(x, e)).re / q(2)
}

fn su2_basis() -> [Mat2; 3] {
    [
        m2([[(0, 1), (0, 0)], [(0, 0), (0, -1)]]),
        m2([[(0, 0), (1, 0)], [(-1, 0), (0, 0)]]),
        m2([[(0, 0), (0, 1)], [(0, 1), (0, 0)]]),
    ]
}

/// Real basis vector `x` of `V = M_2(C)` in row-major `(Re.., Im..)` coordinates.
fn v_basis(x: usize) -> Mat2 {
    let mut m: Mat2 = m2([[(0, 0); 2]; 2]);
    let entry = x % 4;
    m[entry / 2][entry % 2] = if x < 4 { Scalar::one() } else { Scalar::i() };
    m
}

fn u2su2_bracket(u: &Mat2, v: &Mat2) -> Mat2 {
    let c = m2_sub(&m2_mul(u, &m2_adj(v)), &m2_mul(v, &m2_adj(u)));
    let half_tr = &m2_trace(&c) / &Scalar::from_int(2);
    let mut out = c;
    out[0][0] -= &half_tr;
    out[1][1] -= &half_tr;
    out
}

/// `(γ, δ) ∈ u_2 ⊕ su_2` acting by `v ↦ γv - vδ` on `V` and `z ↦ [γ, z]` on `z`.
fn u2su2_element(name: &str, gamma: &Mat2, delta: &Mat2) -> LieElement {
    // row-major vec(γv - vδ) = (γ ⊗ I - I ⊗ δᵀ) vec(v)
    let mut vmat = vec![vec![Scalar::zero(); 4]; 4];
    for (a, row) in vmat.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let (ai, aj, bi, bj) = (a / 2, a % 2, b / 2, b % 2);
            let mut x = Scalar::zero();
            if aj == bj {
                x += &gamma[ai][bi];
            }
            if ai == bi {
                x -= &delta[bj][aj];
            }
            *slot = x;
        }
    }
    let basis = su2_basis();
    let zmat = (0..3)
        .map(|k| {
            (0..3)
                .map(|l| {
                    let ad = m2_sub(&m2_mul(gamma, &basis[l]), &m2_mul(&basis[l], gamma));
                    su2_pairing(&ad, &basis[k])
                })
                .collect()
        })
        .collect();
    LieElement::new(name, vmat, zmat)
}

/// `K = U(2) × SU(2)` acting on `N = M_2(C) ⊕ su_2` by `(k_1 u k_2^*, k_1 z k_1^*)`,
/// with base point `A = diag(i, -i)`.
pub fn builtin_u2su2() -> PairSpec {
    let vs = VarSet::phase(4, 3);
    let basis = su2_basis();

    let bracket: Vec<Vec<Vec<BigRational>>> = (0..3)
        .map(|k| {
            (0..8)
                .map(|x| (0..8).map(|y| su2_pairing(&u2su2_bracket(&v_basis(x), &v_basis(y)), &basis[k])).collect())
                .collect()
        })
        .collect();

    let zero = m2([[(0, 0); 2]; 2]);
    let k_basis = vec![
        u2su2_element("T1", &m2([[(0, -1), (0, 0)], [(0, 0), (0, 0)]]), &zero),
        u2su2_element("T2", &m2([[(0, 0), (0, 0)], [(0, 0), (0, -1)]]), &zero),
        u2su2_element("U3", &basis[1], &zero),
        u2su2_element("U4", &basis[2], &zero),
        u2su2_element("S1", &zero, &basis[0]),
        u2su2_element("S2", &zero, &basis[1]),
        u2su2_element("S3", &zero, &basis[2]),
    ];

    let v = |i: usize| MultiPoly::var(vs, vs.v(i));
    let w = |i: usize| MultiPoly::var(vs, vs.w(i));
    let det_v = &(&v(0) * &v(3)) - &(&v(1) * &v(2));
    let det_w = &(&w(0) * &w(3)) - &(&w(1) * &w(2));

    // z = Σ t_k e_k as a matrix of linear forms
    let zpoly: Vec<Vec<MultiPoly>> = (0..2)
        .map(|a| {
            (0..2)
                .map(|b| {
                    (0..3).fold(MultiPoly::zero(vs), |acc, k| {
                        &acc + &MultiPoly::var(vs, vs.t(k)).scale(&basis[k][a][b])
                    })
                })
                .collect()
        })
        .collect();
    let mut tr = MultiPoly::zero(vs);
    for a in 0..2 {
        for b in 0..2 {
            for j in 0..2 {
                tr = &tr + &(&(&w(2 * a + j) * &zpoly[a][b]) * &v(2 * b + j));
            }
        }
    }
    let p3 = tr.scale(&Scalar::i());

    PairSpec {
        name: "u2su2".into(),
        n: 4,
        d: 3,
        bracket,
        a: vec![q(1), q(0), q(0)],
        k_basis,
        ka_indices: vec![0, 1, 4, 5, 6],
        torus_indices: vec![0, 1, 2],
        invariants: vec![
            Invariant::new("p0", norm_sqr_t(vs), 0, 2),
            Invariant::new("p1", norm_sqr_v(vs), 2, 0),
            Invariant::new("p2", &det_v * &det_w, 4, 0),
            Invariant::new("p3", p3, 2, 1),
        ],
        hw_generators: vec![v(0), v(2), det_v],
        weights: vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]],
        inner_v: identity_scalar(4),
        inner_z: identity_rational(3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::complex::Complex64;

    #[test]
    fn names_resolve() {
        for name in BUILTIN_NAMES {
            assert_eq!(builtin(name).unwrap().name, *name);
        }
        assert!(matches!(builtin("heisenberg5"), Err(Error::UnknownPair(_))));
        assert!(builtin_heisenberg_un(0).is_err());
    }

    #[test]
    fn u2su2_shapes() {
        let p = builtin_u2su2();
        p.check_shape().unwrap();
        assert_eq!(p.k_basis.len(), 7);
        assert_eq!(p.rank(), 3);
        assert_eq!(p.hw_degree_of(&[1, 1, 2]), 6);
    }

    #[test]
    fn u2su2_su2_basis_is_orthonormal() {
        let b = su2_basis();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(su2_pairing(&b[i], &b[j]), q((i == j) as i64));
            }
        }
    }

    #[test]
    fn p3_at_base_point_is_row_norm_difference() {
        let p = builtin_u2su2();
        let v: Vec<Complex64> = vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.7, -0.4),
            Complex64::new(0.0, 0.9),
        ];
        let r1 = v[0].norm_sqr() + v[1].norm_sqr();
        let r2 = v[2].norm_sqr() + v[3].norm_sqr();
        let val = p.invariants[3].poly.evaluate(&v, &[1.0, 0.0, 0.0]);
        assert!((val - Complex64::new(r2 - r1, 0.0)).norm() < 1e-14);
    }
}
