//! Closed-form R-matrices used as frozen oracles: the rank-one tower and
//! Fock blocks, the symmetric-power family carried by the rank-two Lie
//! algebra action, the one-node super family, and the three-dimensional
//! super permutation forms.

use std::sync::Arc;

use crate::symcore::{kron, rat, Mat, MultiPoly, RationalFunction, Registry, Var, VarKind};

/// Catalog over the variables (hbar, u, t) for the one-loop (Jordan) quiver
/// pairs: auxiliary two-dimensional slot against a tower, Fock, or another
/// two-dimensional slot.
pub struct JordanPairCatalog {
    pub reg: Arc<Registry>,
    pub hbar: Var,
    pub u: Var,
    pub t: Var,
}

impl JordanPairCatalog {
    pub fn new() -> Self {
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let u = b.var("u", VarKind::Spectral);
        let t = b.var("t", VarKind::Equivariant);
        JordanPairCatalog {
            reg: b.build(),
            hbar,
            u,
            t,
        }
    }

    fn p(&self, v: Var) -> MultiPoly {
        MultiPoly::var(&self.reg, v)
    }

    fn h_times(&self, k: i64) -> MultiPoly {
        self.p(self.hbar).scale(&rat(k, 1))
    }

    /// Weight-`n` block of the R-matrix pairing the two-dimensional slot
    /// with a tower of framing weight `t`, basis ((0,n),(1,n-1)):
    /// [[u-(n-1)h, n h (t-(n-1)h)], [1, u+n h-t]] over (u+h).
    pub fn r_h1_v(&self, n: usize) -> Mat {
        assert!(n >= 1);
        let n_i = n as i64;
        let u = self.p(self.u);
        let t = self.p(self.t);
        let den = RationalFunction::from_poly(u.add(&self.p(self.hbar)));
        let e11 = u.sub(&self.h_times(n_i - 1));
        let e12 = self
            .h_times(n_i)
            .mul(&t.sub(&self.h_times(n_i - 1)));
        let e21 = MultiPoly::one(&self.reg);
        let e22 = u.add(&self.h_times(n_i)).sub(&t);
        let m = Mat::from_rows(
            &self.reg,
            vec![
                vec![e11.into(), e12.into()],
                vec![e21.into(), e22.into()],
            ],
        );
        m.map(|e| e.div(&den).expect("nonzero denominator"))
    }

    /// Weight-`n` block of the R-matrix pairing the two-dimensional slot
    /// with the Fock slot: [[u-(n-1)h, n h], [-1, 1]] over (u+h).
    pub fn r_h1_f(&self, n: usize) -> Mat {
        assert!(n >= 1);
        let n_i = n as i64;
        let u = self.p(self.u);
        let den = RationalFunction::from_poly(u.add(&self.p(self.hbar)));
        let m = Mat::from_rows(
            &self.reg,
            vec![
                vec![u.sub(&self.h_times(n_i - 1)).into(), self.h_times(n_i).into()],
                vec![
                    RationalFunction::from_int(&self.reg, -1),
                    RationalFunction::one(&self.reg),
                ],
            ],
        );
        m.map(|e| e.div(&den).expect("nonzero denominator"))
    }

    /// Exact inverse of `r_h1_f(n)`, which happens to be polynomial:
    /// [[1, -n h], [1, u-(n-1)h]].
    pub fn r_h1_f_inverse(&self, n: usize) -> Mat {
        assert!(n >= 1);
        let n_i = n as i64;
        let u = self.p(self.u);
        Mat::from_rows(
            &self.reg,
            vec![
                vec![
                    RationalFunction::one(&self.reg),
                    self.h_times(n_i).neg().into(),
                ],
                vec![
                    RationalFunction::one(&self.reg),
                    u.sub(&self.h_times(n_i - 1)).into(),
                ],
            ],
        )
    }

    /// Generators of the rank-two Lie algebra on the degree-`n` symmetric
    /// power; see `gl2_generators_at`.
    pub fn gl2_generators(&self, n: usize) -> [Mat; 4] {
        gl2_generators_at(&self.reg, n)
    }

    /// R-matrix of the two-dimensional slot against the degree-`n` symmetric
    /// power; see `r_h1_hn_at`.
    pub fn r_h1_hn(&self, n: usize) -> Mat {
        r_h1_hn_at(&self.reg, &self.p(self.u), &self.p(self.hbar), n)
    }

    /// R-matrix of two two-dimensional slots: (u id + h P)/(u + h).
    pub fn r_h1_h1(&self) -> Mat {
        self.r_h1_hn(1)
    }
}

/// Generators (e11, e12, e21, e22) of the rank-two Lie algebra acting on
/// the degree-`n` symmetric power, basis the monomials of degree 0..n:
/// e11 = 1 - x d/dx, e12 = d/dx, e21 = x (n - x d/dx),
/// e22 = 1 - n + x d/dx.
pub fn gl2_generators_at(reg: &Arc<Registry>, n: usize) -> [Mat; 4] {
    let dim = n + 1;
    let diag = |f: &dyn Fn(i64) -> i64| {
        Mat::from_fn(reg, dim, dim, |i, j| {
            if i == j {
                RationalFunction::constant(reg, rat(f(i as i64), 1))
            } else {
                RationalFunction::zero(reg)
            }
        })
    };
    let e11 = diag(&|k| 1 - k);
    let e22 = diag(&|k| 1 - n as i64 + k);
    let e12 = Mat::from_fn(reg, dim, dim, |i, j| {
        if i + 1 == j {
            RationalFunction::constant(reg, rat(j as i64, 1))
        } else {
            RationalFunction::zero(reg)
        }
    });
    let e21 = Mat::from_fn(reg, dim, dim, |i, j| {
        if i == j + 1 {
            RationalFunction::constant(reg, rat(n as i64 - j as i64, 1))
        } else {
            RationalFunction::zero(reg)
        }
    });
    [e11, e12, e21, e22]
}

/// R-matrix of the two-dimensional slot against the degree-`n` symmetric
/// power on the monomial basis: (u id + h Omega)/(u + h) with Omega the
/// mixed Casimir sum E_ij (x) e_ji.
pub fn r_h1_hn_at(reg: &Arc<Registry>, u: &MultiPoly, hbar: &MultiPoly, n: usize) -> Mat {
    let [e11, e12, e21, e22] = gl2_generators_at(reg, n);
    let unit = |i: usize, j: usize| {
        Mat::from_fn(reg, 2, 2, |a, b| {
            if (a, b) == (i, j) {
                RationalFunction::one(reg)
            } else {
                RationalFunction::zero(reg)
            }
        })
    };
    let omega = kron(&unit(0, 0), &e11)
        .add(&kron(&unit(0, 1), &e21))
        .add(&kron(&unit(1, 0), &e12))
        .add(&kron(&unit(1, 1), &e22));
    let dim = 2 * (n + 1);
    let up = RationalFunction::from_poly(u.clone());
    let hp = RationalFunction::from_poly(hbar.clone());
    let den = up.add(&hp);
    Mat::identity(reg, dim)
        .scale(&up)
        .add(&omega.scale(&hp))
        .map(|e| e.div(&den).expect("nonzero denominator"))
}

impl Default for JordanPairCatalog {
    fn default() -> Self {
        Self::new()
    }
}

/// Super permutation on V (x) V for a space with the given parities:
/// P(v_k (x) v_l) = (-1)^{|k||l|} v_l (x) v_k.
pub fn p_super(reg: &Arc<Registry>, parities: &[bool]) -> Mat {
    let d = parities.len();
    Mat::from_fn(reg, d * d, d * d, |row, col| {
        let (a, b) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        if a == l && b == k {
            if parities[k] && parities[l] {
                RationalFunction::from_int(reg, -1)
            } else {
                RationalFunction::one(reg)
            }
        } else {
            RationalFunction::zero(reg)
        }
    })
}

/// The rational super permutation form (u id + s h P)/(u + s h) with
/// s = +1 or -1.
pub fn r_super_p(
    reg: &Arc<Registry>,
    u: &MultiPoly,
    hbar: &MultiPoly,
    parities: &[bool],
    sign: i64,
) -> Mat {
    let d = parities.len();
    let p = p_super(reg, parities);
    let sh = hbar.scale(&rat(sign, 1));
    let den = RationalFunction::from_poly(u.add(&sh));
    Mat::identity(reg, d * d)
        .scale(&RationalFunction::from_poly(u.clone()))
        .add(&p.scale(&RationalFunction::from_poly(sh)))
        .map(|e| e.div(&den).expect("nonzero denominator"))
}

/// Signed R-matrix of the one-node quiver without loops, on the four
/// dimensional two-slot basis ((0,0),(0,1),(1,0),(1,1)) with parities
/// (0,1,1,0), at spectral value `u` and framing weights `ta`, `tb`:
/// block diagonal [u+ta], [[u,tb],[ta,u+ta-tb]], [u-tb], over (u+ta).
pub fn gl11_r(reg: &Arc<Registry>, u: &MultiPoly, ta: &MultiPoly, tb: &MultiPoly) -> Mat {
    let zero = RationalFunction::zero(reg);
    let den = RationalFunction::from_poly(u.add(ta));
    let rows: Vec<Vec<RationalFunction>> = vec![
        vec![u.add(ta).into(), zero.clone(), zero.clone(), zero.clone()],
        vec![zero.clone(), u.clone().into(), tb.clone().into(), zero.clone()],
        vec![
            zero.clone(),
            ta.clone().into(),
            u.add(ta).sub(tb).into(),
            zero.clone(),
        ],
        vec![zero.clone(), zero.clone(), zero.clone(), u.sub(tb).into()],
    ];
    Mat::from_rows(reg, rows).map(|e| e.div(&den).expect("nonzero denominator"))
}

/// Parity vector of one factor of the one-node super family.
pub fn gl11_factor_parities() -> Vec<bool> {
    vec![false, true]
}

/// The three flavors of the three-dimensional super permutation family,
/// distinguished by which basis vectors are odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gl21Flavor {
    EvenOdd,
    OddEven,
    OddOdd,
}

/// R-matrix and per-factor parities for the chosen flavor:
/// EvenOdd gives (u id + h P)/(u + h) on parities (0,0,1), while OddEven and
/// OddOdd give (u id - h P)/(u - h) on parities (0,1,1) and (0,1,0).
pub fn gl21_r(
    reg: &Arc<Registry>,
    u: &MultiPoly,
    hbar: &MultiPoly,
    flavor: Gl21Flavor,
) -> (Mat, Vec<bool>) {
    let (parities, sign) = match flavor {
        Gl21Flavor::EvenOdd => (vec![false, false, true], 1),
        Gl21Flavor::OddEven => (vec![false, true, true], -1),
        Gl21Flavor::OddOdd => (vec![false, true, false], -1),
    };
    let m = r_super_p(reg, u, hbar, &parities, sign);
    (m, parities)
}
