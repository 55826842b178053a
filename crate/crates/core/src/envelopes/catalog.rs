//! Hand-pinned small matrices for the trivial quiver (one node, no loop):
//! the grade-one envelope pair and the Clifford-algebra Lax matrix. These
//! serve as frozen cross-checks for the generic machinery.

use std::sync::Arc;

use crate::symcore::{Mat, MultiPoly, RationalFunction, Registry, Var, VarKind};

pub struct TrivialQuiverCatalog {
    pub reg: Arc<Registry>,
    pub hbar: Var,
    pub u: Var,
    pub t1: Var,
    pub t2: Var,
}

impl TrivialQuiverCatalog {
    pub fn new() -> Self {
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let u = b.var("u", VarKind::Spectral);
        let t1 = b.var("t1", VarKind::Equivariant);
        let t2 = b.var("t2", VarKind::Equivariant);
        TrivialQuiverCatalog {
            reg: b.build(),
            hbar,
            u,
            t1,
            t2,
        }
    }

    fn p(&self, v: Var) -> MultiPoly {
        MultiPoly::var(&self.reg, v)
    }

    /// Grade-one envelope for the dominant chamber, basis ((0,1),(1,0)).
    pub fn stab_plus(&self) -> Mat {
        let (u, t2) = (self.p(self.u), self.p(self.t2));
        Mat::from_rows(
            &self.reg,
            vec![
                vec![u.neg().into(), t2.clone().into()],
                vec![
                    RationalFunction::zero(&self.reg),
                    t2.sub(&u).into(),
                ],
            ],
        )
    }

    /// Grade-one envelope for the opposite chamber, same basis.
    pub fn stab_minus(&self) -> Mat {
        let (u, t1) = (self.p(self.u), self.p(self.t1));
        Mat::from_rows(
            &self.reg,
            vec![
                vec![u.add(&t1).into(), RationalFunction::zero(&self.reg)],
                vec![t1.into(), u.into()],
            ],
        )
    }

    /// Parities of the four-dimensional two-slot basis
    /// ((0,0),(0,1),(1,0),(1,1)).
    pub fn parities(&self) -> Vec<usize> {
        vec![0, 1, 1, 0]
    }

    /// The full normalized R-matrix in the signed convention, block diagonal
    /// over total grade: [u+t1], [[u,t2],[t1,u+t1-t2]], [u-t2], all divided
    /// by u+t1.
    pub fn r_signed(&self) -> Mat {
        let (u, t1, t2) = (self.p(self.u), self.p(self.t1), self.p(self.t2));
        let den = RationalFunction::from_poly(u.add(&t1));
        let zero = RationalFunction::zero(&self.reg);
        let entries: Vec<Vec<RationalFunction>> = vec![
            vec![u.add(&t1).into(), zero.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), u.clone().into(), t2.clone().into(), zero.clone()],
            vec![
                zero.clone(),
                t1.clone().into(),
                u.add(&t1).sub(&t2).into(),
                zero.clone(),
            ],
            vec![zero.clone(), zero.clone(), zero.clone(), u.sub(&t2).into()],
        ];
        let mut m = Mat::from_rows(&self.reg, entries);
        m = m.map(|e| e.div(&den).expect("denominator is nonzero"));
        m
    }

    /// Lax matrix of the Clifford-algebra representation on the auxiliary
    /// space tensor the two-dimensional Fock space, basis (i, a) with i the
    /// auxiliary index and a the occupation, both parities (0, 1):
    /// blocks [[u + hbar psi psi*, psi*], [-hbar psi, 1]] over (u + hbar).
    pub fn clifford_lax(&self) -> Mat {
        let (u, hb) = (self.p(self.u), self.p(self.hbar));
        let den = RationalFunction::from_poly(u.add(&hb));
        let zero = RationalFunction::zero(&self.reg);
        let one = MultiPoly::one(&self.reg);
        // Row/column index 2 i + a.
        let rows: Vec<Vec<RationalFunction>> = vec![
            vec![u.add(&hb).into(), zero.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), u.clone().into(), one.clone().into(), zero.clone()],
            vec![zero.clone(), hb.neg().into(), one.clone().into(), zero.clone()],
            vec![zero.clone(), zero.clone(), zero.clone(), one.into()],
        ];
        let mut m = Mat::from_rows(&self.reg, rows);
        m = m.map(|e| e.div(&den).expect("denominator is nonzero"));
        m
    }

    pub fn lax_parities(&self) -> Vec<usize> {
        vec![0, 1, 1, 0]
    }
}

impl Default for TrivialQuiverCatalog {
    fn default() -> Self {
        Self::new()
    }
}
