//! R-matrices from pairs of stable envelopes, and the standard battery of
//! structural checks on them: Gauss (triangular) factorization, the classical
//! limit, Yang-Baxter and unitarity, fusion of symmetric powers, and
//! extraction of operator modes from an auxiliary trace.
//!
//! Conventions. An R-matrix here is a square matrix over the rational
//! function field together with the basis labels of the underlying fixed
//! points, the parity of each basis vector, and the distinguished spectral
//! variable. `r_from_stabs` produces `R = S_minus^{-1} S_plus`; the optional
//! twist multiplies on the left by the diagonal sign `(-1)^{|v'||v''|}`
//! computed from slot occupations, which converts the naive matrix into the
//! super (graded) R-matrix.

pub mod catalog;

use std::sync::Arc;

use thiserror::Error;

use crate::envelopes::StabMatrix;
use crate::symcore::{
    expand_at_infinity, kron, rat, Mat, MultiPoly, RationalFunction, Registry, SymError, Var,
};

#[derive(Error, Debug)]
pub enum RMatError {
    #[error("stable envelopes are incompatible: {0}")]
    Mismatch(String),
    #[error("leading principal minor of order {order} vanishes at block {label}")]
    SingularMinor { order: usize, label: String },
    #[error("matrix is not id + O(1/{var}) at infinity: entry ({row},{col}) = {entry}")]
    NotClassical {
        var: String,
        row: usize,
        col: usize,
        entry: String,
    },
    #[error("entry ({row},{col}) is not u^{expected}(1 + O(1/u)) at infinity")]
    BadAsymptotics {
        row: usize,
        col: usize,
        expected: i64,
    },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// An R-matrix block together with its bookkeeping: which fixed-point basis
/// the rows and columns run over, the parity of each basis vector, the
/// spectral variable, and whether the super twist has been applied.
#[derive(Clone, Debug)]
pub struct RMatrix {
    pub mat: Mat,
    pub basis: Vec<Vec<usize>>,
    pub parities: Vec<bool>,
    pub u: Var,
    pub twisted: bool,
}

impl RMatrix {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Gauss factorization with principal-minor errors reported by basis
    /// label rather than raw index.
    pub fn gauss(&self) -> Result<GaussFactors, RMatError> {
        gauss_decompose(&self.mat).map_err(|e| match e {
            RMatError::SingularMinor { order, .. } => RMatError::SingularMinor {
                order,
                label: self
                    .basis
                    .get(order)
                    .map(|b| crate::envelopes::label(b))
                    .unwrap_or_else(|| "?".into()),
            },
            other => other,
        })
    }
}

fn parity_of(basis: &[usize], slot_parities: &[usize]) -> bool {
    basis
        .iter()
        .zip(slot_parities)
        .map(|(n, p)| n * p)
        .sum::<usize>()
        % 2
        == 1
}

/// R-matrix of a chamber pair: `R = S_minus^{-1} S_plus`, mapping the basis
/// of `plus` to itself. `slot_parities` gives the parity of each slot's node
/// (0 even, 1 odd) and determines the parity of every basis vector. With
/// `twist` set the result is multiplied on the left by the diagonal sign
/// `(-1)^{|v'||v''|}` splitting each occupation vector across the two slots,
/// which is what makes the matrix a morphism of super modules.
pub fn r_from_stabs(
    plus: &StabMatrix,
    minus: &StabMatrix,
    u: Var,
    slot_parities: &[usize],
    twist: bool,
) -> Result<RMatrix, RMatError> {
    if plus.basis != minus.basis {
        return Err(RMatError::Mismatch(
            "envelope bases differ between chambers".into(),
        ));
    }
    if plus.normalized != minus.normalized {
        return Err(RMatError::Mismatch(
            "one envelope is normalized and the other is not".into(),
        ));
    }
    let inv = minus
        .mat
        .inverse()
        .map_err(|e| RMatError::Mismatch(format!("opposite envelope is singular: {e}")))?;
    let mut mat = inv.mul(&plus.mat);
    if twist {
        if slot_parities.len() != 2 || plus.basis.iter().any(|b| b.len() != 2) {
            return Err(RMatError::Unsupported(
                "super twist is defined for two-slot bases".into(),
            ));
        }
        for (i, b) in plus.basis.iter().enumerate() {
            let sign = (b[0] * slot_parities[0]) * (b[1] * slot_parities[1]) % 2;
            if sign == 1 {
                for j in 0..mat.ncols() {
                    let v = mat.get(i, j).neg();
                    mat.set(i, j, v);
                }
            }
        }
    }
    let parities = plus
        .basis
        .iter()
        .map(|b| parity_of(b, slot_parities))
        .collect();
    Ok(RMatrix {
        mat,
        basis: plus.basis.clone(),
        parities,
        u,
        twisted: twist,
    })
}

/// Unique factorization `M = F G E` with `F` lower unitriangular, `G`
/// diagonal, `E` upper unitriangular. Fails when a leading principal minor
/// vanishes identically.
#[derive(Clone, Debug)]
pub struct GaussFactors {
    pub f: Mat,
    pub g: Mat,
    pub e: Mat,
}

impl GaussFactors {
    pub fn product(&self) -> Mat {
        self.f.mul(&self.g).mul(&self.e)
    }
}

pub fn gauss_decompose(m: &Mat) -> Result<GaussFactors, RMatError> {
    assert_eq!(m.nrows(), m.ncols(), "gauss factorization of a non-square matrix");
    let n = m.nrows();
    let reg = m.registry().clone();
    let mut work = m.clone();
    let mut f = Mat::identity(&reg, n);
    let mut e = Mat::identity(&reg, n);
    let mut g = Mat::zeros(&reg, n, n);
    for k in 0..n {
        let pivot = work.get(k, k).clone();
        if pivot.is_zero() {
            return Err(RMatError::SingularMinor {
                order: k,
                label: k.to_string(),
            });
        }
        g.set(k, k, pivot.clone());
        for i in k + 1..n {
            let fik = work.get(i, k).div(&pivot)?;
            f.set(i, k, fik);
        }
        for j in k + 1..n {
            let ekj = work.get(k, j).div(&pivot)?;
            e.set(k, j, ekj);
        }
        for i in k + 1..n {
            let left = work.get(i, k).clone();
            if left.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let right = work.get(k, j);
                if right.is_zero() {
                    continue;
                }
                let delta = left.mul(right).div(&pivot)?;
                let v = work.get(i, j).sub(&delta);
                work.set(i, j, v);
            }
        }
    }
    Ok(GaussFactors { f, g, e })
}

/// First-order term of an R-matrix at large spectral parameter. The input
/// must expand as `id + r/u + O(1/u^2)`; the returned matrix is `r`.
#[derive(Clone, Debug)]
pub struct ClassicalR {
    pub mat: Mat,
}

impl ClassicalR {
    pub fn diagonal_part(&self) -> Mat {
        let reg = self.mat.registry().clone();
        Mat::from_fn(&reg, self.mat.nrows(), self.mat.ncols(), |i, j| {
            if i == j {
                self.mat.get(i, j).clone()
            } else {
                RationalFunction::zero(&reg)
            }
        })
    }

    pub fn off_diagonal_part(&self) -> Mat {
        self.mat.sub(&self.diagonal_part())
    }
}

pub fn classical_r(r: &Mat, u: Var) -> Result<ClassicalR, RMatError> {
    assert_eq!(r.nrows(), r.ncols(), "classical limit of a non-square matrix");
    let n = r.nrows();
    let reg = r.registry().clone();
    let name = reg.name(u).to_owned();
    let mut mat = Mat::zeros(&reg, n, n);
    for i in 0..n {
        for j in 0..n {
            let entry = r.get(i, j);
            let series = expand_at_infinity(entry, u, 1).map_err(|_| RMatError::NotClassical {
                var: name.clone(),
                row: i,
                col: j,
                entry: entry.to_string(),
            })?;
            let constant = series.coeff(0)?;
            let expected_constant = i == j;
            let ok = if expected_constant {
                constant.is_one()
            } else {
                constant.is_zero()
            };
            if !ok {
                return Err(RMatError::NotClassical {
                    var: name.clone(),
                    row: i,
                    col: j,
                    entry: entry.to_string(),
                });
            }
            mat.set(i, j, series.coeff(-1)?);
        }
    }
    Ok(ClassicalR { mat })
}

/// Checks the large-`u` shape of an R-matrix through its Gauss factors: the
/// unitriangular parts must tend to the identity, and the `i`-th diagonal
/// entry must behave as `u^{weights[i]} (1 + O(1/u))`. An unshifted family
/// has all weights zero and tends to the identity outright; a shifted one
/// picks up the exponents recorded in `weights`.
pub fn asymptotic_identity_check(r: &Mat, u: Var, weights: &[i64]) -> Result<(), RMatError> {
    assert_eq!(r.nrows(), r.ncols());
    assert_eq!(r.nrows(), weights.len(), "weight vector length mismatch");
    let gf = gauss_decompose(r)?;
    let deg = |f: &RationalFunction| {
        i64::from(f.num().degree_in(u)) - i64::from(f.den().degree_in(u))
    };
    for part in [&gf.f, &gf.e] {
        for i in 0..part.nrows() {
            for j in 0..part.ncols() {
                if i == j {
                    continue;
                }
                let entry = part.get(i, j);
                if !entry.is_zero() && deg(entry) >= 0 {
                    return Err(RMatError::BadAsymptotics {
                        row: i,
                        col: j,
                        expected: -1,
                    });
                }
            }
        }
    }
    let lead = |p: &MultiPoly| p.as_univariate(u).pop().unwrap();
    for i in 0..r.nrows() {
        let entry = gf.g.get(i, i);
        if deg(entry) != weights[i] || lead(entry.num()) != lead(entry.den()) {
            return Err(RMatError::BadAsymptotics {
                row: i,
                col: i,
                expected: weights[i],
            });
        }
    }
    Ok(())
}

/// Outcome of an identity check: either a pass or the first offending
/// position together with the difference of the two sides there.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub pass: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub diff: RationalFunction,
}

pub(crate) fn compare(lhs: &Mat, rhs: &Mat) -> CheckReport {
    for i in 0..lhs.nrows() {
        for j in 0..lhs.ncols() {
            let diff = lhs.get(i, j).sub(rhs.get(i, j));
            if !diff.is_zero() {
                return CheckReport {
                    pass: false,
                    witness: Some(Witness { row: i, col: j, diff }),
                };
            }
        }
    }
    CheckReport { pass: true, witness: None }
}

/// Embeds an operator on factors 1 and 3 of a triple tensor product. In the
/// super case moving the operator past the middle factor costs the Koszul
/// sign `(-1)^{|b|(|a| + |a'|)}` on the entry `(a,c),(a',c')` sitting at
/// middle index `b`.
pub(crate) fn embed_13(
    r13: &Mat,
    dims: [usize; 3],
    p1: &[bool],
    p2: &[bool],
    superized: bool,
) -> Mat {
    let [d1, d2, d3] = dims;
    let reg = r13.registry().clone();
    let n = d1 * d2 * d3;
    let mut out = Mat::zeros(&reg, n, n);
    for a in 0..d1 {
        for a2 in 0..d1 {
            for c in 0..d3 {
                for c2 in 0..d3 {
                    let v = r13.get(a * d3 + c, a2 * d3 + c2);
                    if v.is_zero() {
                        continue;
                    }
                    for b in 0..d2 {
                        let sign = superized && p2[b] && (p1[a] ^ p1[a2]);
                        let val = if sign { v.neg() } else { v.clone() };
                        out.set((a * d2 + b) * d3 + c, (a2 * d2 + b) * d3 + c2, val);
                    }
                }
            }
        }
    }
    out
}

/// Yang-Baxter check `R12 R13 R23 = R23 R13 R12` on a triple tensor product.
/// Each input operator carries its own parameter bindings; nothing here
/// assumes difference form. `parities` lists the parity vector of each tensor
/// factor and only matters when `superized` is set, where the 1-3 embedding
/// picks up Koszul signs.
pub fn ybe_check(
    r12: &Mat,
    r13: &Mat,
    r23: &Mat,
    dims: [usize; 3],
    parities: [&[bool]; 3],
    superized: bool,
) -> CheckReport {
    let [d1, d2, d3] = dims;
    assert_eq!(r12.nrows(), d1 * d2, "r12 dimension mismatch");
    assert_eq!(r13.nrows(), d1 * d3, "r13 dimension mismatch");
    assert_eq!(r23.nrows(), d2 * d3, "r23 dimension mismatch");
    let reg = r12.registry().clone();
    let e12 = kron(r12, &Mat::identity(&reg, d3));
    let e23 = kron(&Mat::identity(&reg, d1), r23);
    let e13 = embed_13(r13, dims, parities[0], parities[1], superized);
    let lhs = e12.mul(&e13).mul(&e23);
    let rhs = e23.mul(&e13).mul(&e12);
    compare(&lhs, &rhs)
}

/// Unitarity check `R(u) R_op(-u) = id`. The caller supplies the opposite
/// R-matrix `r_op` on the same basis (for a pair of identical slots this is
/// the swap conjugate, see `swap_conjugate`); the check substitutes `-u`
/// into it and multiplies.
pub fn unitarity_check(r: &Mat, r_op: &Mat, u: Var) -> Result<CheckReport, RMatError> {
    let reg = r.registry().clone();
    let minus_u = RationalFunction::from_poly(MultiPoly::var(&reg, u).neg());
    let flipped = r_op.try_map(|e| e.substitute_one(u, &minus_u))?;
    let prod = r.mul(&flipped);
    Ok(compare(&prod, &Mat::identity(&reg, r.nrows())))
}

/// Conjugates an operator on `V1 (x) V2` by the flip of the two factors,
/// giving the same operator read on `V2 (x) V1`.
pub fn swap_conjugate(r: &Mat, d1: usize, d2: usize) -> Mat {
    assert_eq!(r.nrows(), d1 * d2);
    assert_eq!(r.ncols(), d1 * d2);
    let reg = r.registry().clone();
    Mat::from_fn(&reg, d2 * d1, d2 * d1, |i, j| {
        let (b, a) = (i / d1, i % d1);
        let (b2, a2) = (j / d1, j % d1);
        r.get(a * d2 + b, a2 * d2 + b2).clone()
    })
}

fn tensor_digits(mut index: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = index % 2;
        index /= 2;
    }
    out
}

fn digits_index(digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, d| 2 * acc + d)
}

/// Transposition of tensor positions `a` and `b` (0-based) on `(C^2)^{(x) k}`.
fn transposition(reg: &Arc<Registry>, k: usize, a: usize, b: usize) -> Mat {
    let n = 1 << k;
    Mat::from_fn(reg, n, n, |i, j| {
        let mut d = tensor_digits(j, k);
        d.swap(a, b);
        if digits_index(&d) == i {
            RationalFunction::one(reg)
        } else {
            RationalFunction::zero(reg)
        }
    })
}

/// Projector onto symmetric tensors in `(C^2)^{(x) k}`: the average of all
/// position permutations.
pub fn symmetrizer(reg: &Arc<Registry>, k: usize) -> Mat {
    use itertools::Itertools;
    let n = 1 << k;
    let mut acc = Mat::zeros(reg, n, n);
    let mut count = 0usize;
    for perm in (0..k).permutations(k) {
        count += 1;
        let m = Mat::from_fn(reg, n, n, |i, j| {
            let d = tensor_digits(j, k);
            let permuted: Vec<usize> = (0..k).map(|pos| d[perm[pos]]).collect();
            if digits_index(&permuted) == i {
                RationalFunction::one(reg)
            } else {
                RationalFunction::zero(reg)
            }
        });
        acc = acc.add(&m);
    }
    acc.scale(&RationalFunction::constant(reg, rat(1, count as i64)))
}

fn binom(n: usize, k: usize) -> i64 {
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Inclusion of the degree-`n` symmetric power into `(C^2)^{(x) n}` on the
/// monomial basis: vector `k` maps to the average of all words with `k`
/// ones. This normalization is the one under which the symmetric-power
/// generators act as 1 - x d/dx, d/dx, x(n - x d/dx), 1 - n + x d/dx.
pub fn sym_embed(reg: &Arc<Registry>, n: usize) -> Mat {
    let rows = 1 << n;
    Mat::from_fn(reg, rows, n + 1, |i, k| {
        let weight: usize = tensor_digits(i, n).iter().sum();
        if weight == k {
            RationalFunction::constant(reg, rat(1, binom(n, k)))
        } else {
            RationalFunction::zero(reg)
        }
    })
}

/// Left inverse of `sym_embed`: sums each weight space.
pub fn sym_project(reg: &Arc<Registry>, n: usize) -> Mat {
    let cols = 1 << n;
    Mat::from_fn(reg, n + 1, cols, |k, j| {
        let weight: usize = tensor_digits(j, n).iter().sum();
        if weight == k {
            RationalFunction::one(reg)
        } else {
            RationalFunction::zero(reg)
        }
    })
}

/// Fusion of elementary R-matrices over two groups of tensor slots of sizes
/// `m` and `n`: the ordered product over pairs `(a, b)`, `a` in the first
/// group and `b` in the second, of
///   `((u + (b - a + m - n) h) id + h P_{a b}) / (u + (b - a + m - n + 1) h)`.
/// Factors are applied left to right over `a` ascending, then `b` ascending;
/// `reversed` multiplies them in the opposite sequence. On the image of the
/// symmetrizers the two orders agree and the product restricts to the
/// R-matrix of the fused symmetric powers.
pub fn fusion_product(
    reg: &Arc<Registry>,
    u: Var,
    hbar: Var,
    m: usize,
    n: usize,
    reversed: bool,
) -> Result<Mat, RMatError> {
    let k = m + n;
    let dim = 1 << k;
    let up = MultiPoly::var(reg, u);
    let hp = MultiPoly::var(reg, hbar);
    let mut factors = Vec::new();
    for a in 1..=m {
        for b in 1..=n {
            let shift = b as i64 - a as i64 + m as i64 - n as i64;
            let scalar = up.add(&hp.scale(&rat(shift, 1)));
            let den = RationalFunction::from_poly(up.add(&hp.scale(&rat(shift + 1, 1))));
            if den.is_zero() {
                return Err(RMatError::Unsupported(format!(
                    "fusion denominator vanishes at pair ({a},{b})"
                )));
            }
            let p = transposition(reg, k, a - 1, m + b - 1);
            let mat = Mat::identity(reg, dim)
                .scale(&RationalFunction::from_poly(scalar))
                .add(&p.scale(&RationalFunction::from_poly(hp.clone())));
            factors.push(mat.map(|e| e.div(&den).expect("nonzero denominator")));
        }
    }
    if reversed {
        factors.reverse();
    }
    let mut acc = Mat::identity(reg, dim);
    for f in &factors {
        acc = acc.mul(f);
    }
    Ok(acc)
}

/// Mode extraction by auxiliary supertrace: the coefficient of `1/u` in
/// `Str_aux((m (x) id) R(u))`, where `Str` weighs the auxiliary diagonal by
/// `(-1)^{parity}`. For the R-matrices in the catalog this recovers the
/// generating-series modes acting on the second factor.
pub fn extract_e(
    m_aux: &Mat,
    r: &Mat,
    aux_parities: &[bool],
    state_dim: usize,
    u: Var,
) -> Result<Mat, RMatError> {
    let d_aux = aux_parities.len();
    assert_eq!(m_aux.nrows(), d_aux, "auxiliary operator dimension mismatch");
    assert_eq!(r.nrows(), d_aux * state_dim, "R-matrix dimension mismatch");
    let reg = r.registry().clone();
    let mut out = Mat::zeros(&reg, state_dim, state_dim);
    for s in 0..state_dim {
        for s2 in 0..state_dim {
            let mut acc = RationalFunction::zero(&reg);
            for a in 0..d_aux {
                for a2 in 0..d_aux {
                    let mv = m_aux.get(a, a2);
                    if mv.is_zero() {
                        continue;
                    }
                    let term = mv.mul(r.get(a2 * state_dim + s, a * state_dim + s2));
                    acc = if aux_parities[a] {
                        acc.sub(&term)
                    } else {
                        acc.add(&term)
                    };
                }
            }
            if acc.is_zero() {
                continue;
            }
            let series = expand_at_infinity(&acc, u, 1)?;
            out.set(s, s2, series.coeff(-1)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::catalog::{
        gl11_factor_parities, gl11_r, gl21_r, p_super, r_h1_hn_at, r_super_p, Gl21Flavor,
        JordanPairCatalog,
    };
    use super::*;
    use crate::envelopes::catalog::TrivialQuiverCatalog;
    use crate::envelopes::{stab_matrix, Chamber, FamilySpec, SlotCtx, StabMatrix};
    use crate::symcore::{block_diag, VarKind};

    fn poly(reg: &Arc<Registry>, v: Var) -> MultiPoly {
        MultiPoly::var(reg, v)
    }

    fn diag(reg: &Arc<Registry>, entries: Vec<RationalFunction>) -> Mat {
        let n = entries.len();
        Mat::from_fn(reg, n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                RationalFunction::zero(reg)
            }
        })
    }

    fn submatrix(m: &Mat, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat {
        let reg = m.registry().clone();
        let r0 = rows.start;
        let c0 = cols.start;
        Mat::from_fn(&reg, rows.len(), cols.len(), |i, j| {
            m.get(r0 + i, c0 + j).clone()
        })
    }

    fn unit(reg: &Arc<Registry>, d: usize, i: usize, j: usize) -> Mat {
        Mat::from_fn(reg, d, d, |a, b| {
            if (a, b) == (i, j) {
                RationalFunction::one(reg)
            } else {
                RationalFunction::zero(reg)
            }
        })
    }

    fn comm(a: &Mat, b: &Mat) -> Mat {
        a.mul(b).sub(&b.mul(a))
    }

    #[test]
    fn pipeline_r_matches_one_node_middle_block() {
        let cat = TrivialQuiverCatalog::new();
        let one = RationalFunction::one(&cat.reg);
        let eps_plus = diag(&cat.reg, vec![one.neg(), one.clone()]);
        let eps_minus = diag(&cat.reg, vec![one.clone(), one.neg()]);
        let basis = vec![vec![0, 1], vec![1, 0]];
        let plus = StabMatrix {
            mat: cat.stab_plus().mul(&eps_plus),
            basis: basis.clone(),
            chamber: Chamber::standard(2),
            normalized: true,
        };
        let minus = StabMatrix {
            mat: cat.stab_minus().mul(&eps_minus),
            basis,
            chamber: Chamber::opposite(2),
            normalized: true,
        };
        let r = r_from_stabs(&plus, &minus, cat.u, &[1, 1], false).unwrap();
        let expected = submatrix(&cat.r_signed(), 1..3, 1..3);
        assert_eq!(r.mat, expected);
        assert_eq!(r.parities, vec![true, true]);
        assert!(!r.twisted);
    }

    #[test]
    fn pipeline_r_with_twist_matches_signed_catalog() {
        let cat = TrivialQuiverCatalog::new();
        let reg = &cat.reg;
        let (u, t1, t2) = (poly(reg, cat.u), poly(reg, cat.t1), poly(reg, cat.t2));
        let one = RationalFunction::one(reg);
        let eps_plus = diag(reg, vec![one.neg(), one.clone()]);
        let eps_minus = diag(reg, vec![one.clone(), one.neg()]);
        // The rank-two corner is one-dimensional, so only the ratio of the
        // two envelope values matters; it must give the untwisted corner
        // (t2 - u)/(u + t1), which the twist then flips.
        let corner_plus = Mat::from_rows(reg, vec![vec![t2.sub(&u).into()]]);
        let corner_minus = Mat::from_rows(reg, vec![vec![u.add(&t1).into()]]);
        let plus = StabMatrix {
            mat: block_diag(&[
                Mat::identity(reg, 1),
                cat.stab_plus().mul(&eps_plus),
                corner_plus,
            ]),
            basis: vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
            chamber: Chamber::standard(2),
            normalized: true,
        };
        let minus = StabMatrix {
            mat: block_diag(&[
                Mat::identity(reg, 1),
                cat.stab_minus().mul(&eps_minus),
                corner_minus,
            ]),
            basis: plus.basis.clone(),
            chamber: Chamber::opposite(2),
            normalized: true,
        };
        let r = r_from_stabs(&plus, &minus, cat.u, &[1, 1], true).unwrap();
        assert_eq!(r.mat, cat.r_signed());
        let expected_parities: Vec<bool> =
            cat.parities().iter().map(|p| *p == 1).collect();
        assert_eq!(r.parities, expected_parities);
        assert!(r.twisted);
    }

    #[test]
    fn pipeline_r_of_spin_pair_is_the_permutation_form() {
        let (ctx, u) = SlotCtx::pair(FamilySpec::Spin(1), FamilySpec::Spin(1), 2);
        let mut blocks = Vec::new();
        for n in 0..=2 {
            let sp = stab_matrix(&ctx, &Chamber::standard(2), n, true).unwrap();
            let sm = stab_matrix(&ctx, &Chamber::opposite(2), n, true).unwrap();
            let r = r_from_stabs(&sp, &sm, u, &[0, 0], false).unwrap();
            blocks.push(r.mat);
        }
        let total = block_diag(&blocks);
        let expected = r_super_p(
            &ctx.reg,
            &poly(&ctx.reg, u),
            &poly(&ctx.reg, ctx.hbar),
            &[false, false],
            1,
        );
        assert_eq!(total, expected);
    }

    #[test]
    fn gauss_factors_of_the_one_node_middle_block() {
        let cat = TrivialQuiverCatalog::new();
        let reg = &cat.reg;
        let (u, t1, t2) = (poly(reg, cat.u), poly(reg, cat.t1), poly(reg, cat.t2));
        let m = submatrix(&cat.r_signed(), 1..3, 1..3);
        let gf = gauss_decompose(&m).unwrap();
        let frac = |a: &MultiPoly, b: &MultiPoly| {
            RationalFunction::new(a.clone(), b.clone()).unwrap()
        };
        assert_eq!(gf.f.get(1, 0), &frac(&t1, &u));
        assert_eq!(gf.e.get(0, 1), &frac(&t2, &u));
        assert_eq!(gf.g.get(0, 0), &frac(&u, &u.add(&t1)));
        assert_eq!(gf.g.get(1, 1), &frac(&u.sub(&t2), &u));
        assert!(gf.g.get(0, 1).is_zero() && gf.g.get(1, 0).is_zero());
        assert_eq!(gf.product(), m);
    }

    #[test]
    fn gauss_of_identity_is_trivial() {
        let cat = JordanPairCatalog::new();
        let id = Mat::identity(&cat.reg, 3);
        let gf = gauss_decompose(&id).unwrap();
        assert_eq!(gf.f, id);
        assert_eq!(gf.g, id);
        assert_eq!(gf.e, id);
    }

    #[test]
    fn gauss_reconstructs_catalog_r_matrices() {
        let jordan = JordanPairCatalog::new();
        for n in 1..=3 {
            for m in [jordan.r_h1_v(n), jordan.r_h1_f(n)] {
                assert_eq!(gauss_decompose(&m).unwrap().product(), m);
            }
        }
        for n in 1..=2 {
            let m = jordan.r_h1_hn(n);
            assert_eq!(gauss_decompose(&m).unwrap().product(), m);
        }
        let cat = TrivialQuiverCatalog::new();
        let m = cat.r_signed();
        assert_eq!(gauss_decompose(&m).unwrap().product(), m);
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let u = b.var("u", VarKind::Spectral);
        let reg = b.build();
        for flavor in [Gl21Flavor::EvenOdd, Gl21Flavor::OddEven, Gl21Flavor::OddOdd] {
            let (m, _) = gl21_r(&reg, &poly(&reg, u), &poly(&reg, hbar), flavor);
            assert_eq!(gauss_decompose(&m).unwrap().product(), m);
        }
    }

    #[test]
    fn gauss_reports_the_vanishing_minor() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        // A flip with zero in the corner: principal minor of order 0 vanishes.
        let flip = Mat::from_rows(
            reg,
            vec![
                vec![RationalFunction::zero(reg), RationalFunction::one(reg)],
                vec![RationalFunction::one(reg), RationalFunction::zero(reg)],
            ],
        );
        match gauss_decompose(&flip) {
            Err(RMatError::SingularMinor { order, .. }) => assert_eq!(order, 0),
            other => panic!("expected a singular minor error, got {other:?}"),
        }
        let wrapped = RMatrix {
            mat: flip,
            basis: vec![vec![0, 1], vec![1, 0]],
            parities: vec![false, false],
            u: cat.u,
            twisted: false,
        };
        match wrapped.gauss() {
            Err(RMatError::SingularMinor { order, label }) => {
                assert_eq!(order, 0);
                assert_eq!(label, "(0,1)");
            }
            other => panic!("expected a labeled singular minor error, got {other:?}"),
        }
    }

    #[test]
    fn classical_limit_of_the_equal_weight_one_node_r() {
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let u = b.var("u", VarKind::Spectral);
        let reg = b.build();
        let (up, hp) = (poly(&reg, u), poly(&reg, hbar));
        let r = gl11_r(&reg, &up, &hp, &hp);
        let cr = classical_r(&r, u).unwrap();
        let hrf = RationalFunction::from_poly(hp);
        let expected = p_super(&reg, &[false, true])
            .sub(&Mat::identity(&reg, 4))
            .scale(&hrf);
        assert_eq!(cr.mat, expected);
        assert_eq!(cr.diagonal_part().add(&cr.off_diagonal_part()), cr.mat);
    }

    #[test]
    fn classical_limit_diagonal_matches_cartan_modes() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let cr = classical_r(&cat.r_h1_h1(), cat.u).unwrap();
        let h = RationalFunction::var(reg, cat.hbar);
        let e11 = unit(reg, 2, 0, 0);
        let e22 = unit(reg, 2, 1, 1);
        let g10 = e11.scale(&h);
        let g20 = e22.sub(&e11).scale(&h);
        let e0 = unit(reg, 2, 0, 1).scale(&h);
        let f0 = unit(reg, 2, 1, 0).scale(&h);
        let two = RationalFunction::from_int(reg, 2);
        let rhs = kron(&e0, &f0)
            .add(&kron(&f0, &e0))
            .sub(&kron(&g20, &g10))
            .sub(&kron(&g10, &g20))
            .sub(&kron(&g10, &g10).scale(&two));
        assert_eq!(cr.mat.scale(&h), rhs);
    }

    #[test]
    fn classical_limit_vacuum_block_is_diagonal() {
        let cat = TrivialQuiverCatalog::new();
        let cr = classical_r(&cat.r_signed(), cat.u).unwrap();
        // Rows and columns with empty first slot form the vacuum block.
        assert!(cr.mat.get(0, 1).is_zero());
        assert!(cr.mat.get(1, 0).is_zero());
        assert!(!cr.mat.get(1, 1).is_zero());
    }

    #[test]
    fn classical_limit_requires_unit_leading_term() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let one = RationalFunction::one(reg);
        let shear = Mat::from_rows(
            reg,
            vec![
                vec![one.clone(), one.clone()],
                vec![RationalFunction::zero(reg), one.clone()],
            ],
        );
        assert!(matches!(
            classical_r(&shear, cat.u),
            Err(RMatError::NotClassical { .. })
        ));
        let growing = diag(
            reg,
            vec![RationalFunction::var(reg, cat.u), one.clone()],
        );
        assert!(matches!(
            classical_r(&growing, cat.u),
            Err(RMatError::NotClassical { .. })
        ));
    }

    #[test]
    fn classical_commutator_identities_for_the_one_node_family() {
        let mut b = Registry::builder();
        let u = b.var("u", VarKind::Spectral);
        let t1 = b.var("t1", VarKind::Equivariant);
        let t2 = b.var("t2", VarKind::Equivariant);
        let t3 = b.var("t3", VarKind::Equivariant);
        let reg = b.build();
        let up = poly(&reg, u);
        let t = |v: Var| poly(&reg, v);
        let cl = |ta: Var, tb: Var| {
            classical_r(&gl11_r(&reg, &up, &t(ta), &t(tb)), u)
                .unwrap()
                .mat
        };
        let r12 = cl(t1, t2);
        let r13 = cl(t1, t3);
        let r23 = cl(t2, t3);
        let par = gl11_factor_parities();
        let id2 = Mat::identity(&reg, 2);
        let e12 = kron(&r12, &id2);
        let e23 = kron(&id2, &r23);
        let e13 = embed_13(&r13, [2, 2, 2], &par, &par, true);
        assert!(comm(&e12, &e13.add(&e23)).is_zero());
        assert!(comm(&e23, &e12.add(&e13)).is_zero());
    }

    #[test]
    fn classical_commutator_identities_for_the_symmetric_square() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let r = classical_r(&cat.r_h1_h1(), cat.u).unwrap().mat;
        let id2 = Mat::identity(reg, 2);
        let par = [false, false];
        let e12 = kron(&r, &id2);
        let e23 = kron(&id2, &r);
        let e13 = embed_13(&r, [2, 2, 2], &par, &par, false);
        assert!(comm(&e12, &e13.add(&e23)).is_zero());
        assert!(comm(&e23, &e12.add(&e13)).is_zero());
    }

    fn ybe_registry() -> (Arc<Registry>, Var, Var, Var, Var, Var, Var) {
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let u = b.var("u", VarKind::Spectral);
        let v = b.var("v", VarKind::Spectral);
        let t1 = b.var("t1", VarKind::Equivariant);
        let t2 = b.var("t2", VarKind::Equivariant);
        let t3 = b.var("t3", VarKind::Equivariant);
        (b.build(), hbar, u, v, t1, t2, t3)
    }

    #[test]
    fn ybe_holds_for_the_one_node_family() {
        let (reg, _h, u, v, t1, t2, t3) = ybe_registry();
        let p = poly(&reg, u);
        let q = poly(&reg, v);
        let t = |x: Var| poly(&reg, x);
        let r12 = gl11_r(&reg, &p, &t(t1), &t(t2));
        let r13 = gl11_r(&reg, &p.add(&q), &t(t1), &t(t3));
        let r23 = gl11_r(&reg, &q, &t(t2), &t(t3));
        let par = gl11_factor_parities();
        let report = ybe_check(&r12, &r13, &r23, [2, 2, 2], [&par, &par, &par], true);
        assert!(report.pass, "witness: {:?}", report.witness);
    }

    #[test]
    fn ybe_holds_for_identity_operators() {
        let (reg, ..) = ybe_registry();
        let id4 = Mat::identity(&reg, 4);
        let par = [false, false];
        let report = ybe_check(&id4, &id4, &id4, [2, 2, 2], [&par, &par, &par], true);
        assert!(report.pass);
    }

    #[test]
    fn ybe_holds_for_three_dimensional_super_flavors() {
        let (reg, hbar, u, v, ..) = ybe_registry();
        let p = poly(&reg, u);
        let q = poly(&reg, v);
        let h = poly(&reg, hbar);
        for flavor in [Gl21Flavor::EvenOdd, Gl21Flavor::OddEven, Gl21Flavor::OddOdd] {
            let (r12, par) = gl21_r(&reg, &p, &h, flavor);
            let (r13, _) = gl21_r(&reg, &p.add(&q), &h, flavor);
            let (r23, _) = gl21_r(&reg, &q, &h, flavor);
            let report = ybe_check(&r12, &r13, &r23, [3, 3, 3], [&par, &par, &par], true);
            assert!(report.pass, "flavor {flavor:?} witness: {:?}", report.witness);
        }
    }

    #[test]
    fn ybe_holds_for_mixed_symmetric_powers() {
        let (reg, hbar, u, v, ..) = ybe_registry();
        let p = poly(&reg, u);
        let q = poly(&reg, v);
        let h = poly(&reg, hbar);
        let r12 = r_super_p(&reg, &p, &h, &[false, false], 1);
        let r13 = r_h1_hn_at(&reg, &p.add(&q), &h, 2);
        let r23 = r_h1_hn_at(&reg, &q, &h, 2);
        let even2 = [false, false];
        let even3 = [false, false, false];
        let report = ybe_check(&r12, &r13, &r23, [2, 2, 3], [&even2, &even2, &even3], false);
        assert!(report.pass, "witness: {:?}", report.witness);
    }

    #[test]
    fn ybe_survives_rational_specializations() {
        use std::collections::HashMap;
        let (reg, hbar, u, v, t1, t2, t3) = ybe_registry();
        // Three arbitrary but fixed rational parameter points.
        let points: [[(i64, i64); 6]; 3] = [
            [(5, 7), (-3, 2), (2, 1), (-1, 3), (4, 5), (7, 11)],
            [(1, 2), (9, 4), (-5, 3), (8, 7), (-2, 9), (3, 1)],
            [(-7, 5), (6, 1), (11, 6), (-4, 7), (5, 2), (-9, 8)],
        ];
        let p = poly(&reg, u);
        let q = poly(&reg, v);
        let h = poly(&reg, hbar);
        let t = |x: Var| poly(&reg, x);
        for pt in points {
            let mut map = HashMap::new();
            for (var, (n, d)) in [u, v, hbar, t1, t2, t3].into_iter().zip(pt) {
                map.insert(var, RationalFunction::constant(&reg, rat(n, d)));
            }
            let spec = |m: &Mat| m.try_map(|e| e.substitute(&map)).unwrap();
            let par11 = gl11_factor_parities();
            let r12 = spec(&gl11_r(&reg, &p, &t(t1), &t(t2)));
            let r13 = spec(&gl11_r(&reg, &p.add(&q), &t(t1), &t(t3)));
            let r23 = spec(&gl11_r(&reg, &q, &t(t2), &t(t3)));
            assert!(
                ybe_check(&r12, &r13, &r23, [2, 2, 2], [&par11, &par11, &par11], true).pass
            );
            for flavor in [Gl21Flavor::EvenOdd, Gl21Flavor::OddEven, Gl21Flavor::OddOdd] {
                let (a, par) = gl21_r(&reg, &p, &h, flavor);
                let (b, _) = gl21_r(&reg, &p.add(&q), &h, flavor);
                let (c, _) = gl21_r(&reg, &q, &h, flavor);
                assert!(
                    ybe_check(
                        &spec(&a),
                        &spec(&b),
                        &spec(&c),
                        [3, 3, 3],
                        [&par, &par, &par],
                        true
                    )
                    .pass
                );
            }
            let even2 = [false, false];
            let even3 = [false, false, false];
            let r12 = spec(&r_super_p(&reg, &p, &h, &even2, 1));
            let r13 = spec(&r_h1_hn_at(&reg, &p.add(&q), &h, 2));
            let r23 = spec(&r_h1_hn_at(&reg, &q, &h, 2));
            assert!(
                ybe_check(&r12, &r13, &r23, [2, 2, 3], [&even2, &even2, &even3], false).pass
            );
        }
    }

    #[test]
    fn unitarity_of_the_symmetric_square_family() {
        let cat = JordanPairCatalog::new();
        let r = cat.r_h1_h1();
        let op = swap_conjugate(&r, 2, 2);
        assert_eq!(op, r);
        let report = unitarity_check(&r, &op, cat.u).unwrap();
        assert!(report.pass, "witness: {:?}", report.witness);
    }

    #[test]
    fn unitarity_of_identity() {
        let cat = JordanPairCatalog::new();
        let id = Mat::identity(&cat.reg, 4);
        assert!(unitarity_check(&id, &id, cat.u).unwrap().pass);
    }

    #[test]
    fn unitarity_of_fock_blocks_against_the_polynomial_inverse() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let minus_u = RationalFunction::from_poly(poly(reg, cat.u).neg());
        for n in 1..=4 {
            let r = cat.r_h1_f(n);
            let inv = cat.r_h1_f_inverse(n);
            assert!(r.mul(&inv).is_identity());
            let op = inv.try_map(|e| e.substitute_one(cat.u, &minus_u)).unwrap();
            let report = unitarity_check(&r, &op, cat.u).unwrap();
            assert!(report.pass, "n = {n}, witness: {:?}", report.witness);
        }
    }

    #[test]
    fn fusion_of_a_single_pair_is_the_elementary_r() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let f = fusion_product(reg, cat.u, cat.hbar, 1, 1, false).unwrap();
        let expected = r_super_p(
            reg,
            &poly(reg, cat.u),
            &poly(reg, cat.hbar),
            &[false, false],
            1,
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn fusion_onto_the_symmetric_square_matches_the_catalog() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let f = fusion_product(reg, cat.u, cat.hbar, 1, 2, false).unwrap();
        let id2 = Mat::identity(reg, 2);
        let proj = kron(&id2, &symmetrizer(reg, 2));
        // The product preserves the symmetric subspace...
        assert_eq!(f.mul(&proj), proj.mul(&f).mul(&proj));
        // ...and restricts there to the catalog R-matrix.
        let pi = kron(&id2, &sym_project(reg, 2));
        let io = kron(&id2, &sym_embed(reg, 2));
        let restricted = pi.mul(&f).mul(&io);
        assert_eq!(restricted, cat.r_h1_hn(2));
    }

    #[test]
    fn fusion_orders_agree_on_symmetric_tensors() {
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let f1 = fusion_product(reg, cat.u, cat.hbar, 2, 2, false).unwrap();
        let f2 = fusion_product(reg, cat.u, cat.hbar, 2, 2, true).unwrap();
        let proj = kron(&symmetrizer(reg, 2), &symmetrizer(reg, 2));
        assert_eq!(proj.mul(&f1).mul(&proj), proj.mul(&f2).mul(&proj));
    }

    #[test]
    fn symmetric_power_blocks_match_the_tower_family() {
        // The weight-m block of the symmetric-power R-matrix, read in the
        // divided-power basis (rescale monomial k by k! h^k), is the tower
        // block at framing weight t = N h.
        let cat = JordanPairCatalog::new();
        let reg = &cat.reg;
        let h = RationalFunction::var(reg, cat.hbar);
        for big_n in 2..=3usize {
            let big = cat.r_h1_hn(big_n);
            let t_value = h.scale(&rat(big_n as i64, 1));
            for m in 1..=big_n {
                let idx = [m, (big_n + 1) + m - 1];
                let ratio = h.scale(&rat(m as i64, 1));
                let mut block = Mat::from_fn(reg, 2, 2, |a, b| {
                    big.get(idx[a], idx[b]).clone()
                });
                block.set(0, 1, block.get(0, 1).mul(&ratio));
                block.set(1, 0, block.get(1, 0).div(&ratio).unwrap());
                let expected = cat
                    .r_h1_v(m)
                    .try_map(|e| e.substitute_one(cat.t, &t_value))
                    .unwrap();
                assert_eq!(block, expected, "block {m} of the degree {big_n} family");
            }
        }
    }

    #[test]
    fn extracted_modes_of_the_one_node_r() {
        let cat = TrivialQuiverCatalog::new();
        let reg = &cat.reg;
        let r = cat.r_signed();
        let aux_par = [false, true];
        let t = |v: Var| RationalFunction::var(reg, v);
        // Vacuum projector: minus the framing weight times the occupation.
        let vacuum = unit(reg, 2, 0, 0);
        let out = extract_e(&vacuum, &r, &aux_par, 2, cat.u).unwrap();
        let expected = diag(reg, vec![RationalFunction::zero(reg), t(cat.t1).neg()]);
        assert_eq!(out, expected);
        // Off-diagonal auxiliary matrix element: a single raising mode.
        let step = unit(reg, 2, 1, 0);
        let out = extract_e(&step, &r, &aux_par, 2, cat.u).unwrap();
        let mut expected = Mat::zeros(reg, 2, 2);
        expected.set(1, 0, t(cat.t2).neg());
        assert_eq!(out, expected);
        // Zero in, zero out.
        let out = extract_e(&Mat::zeros(reg, 2, 2), &r, &aux_par, 2, cat.u).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn catalog_families_tend_to_the_identity() {
        let jordan = JordanPairCatalog::new();
        for n in 1..=3 {
            asymptotic_identity_check(&jordan.r_h1_v(n), jordan.u, &[0, 0]).unwrap();
            // The Fock block is shifted: its Gauss diagonal decays by one
            // power of u on the second basis vector.
            asymptotic_identity_check(&jordan.r_h1_f(n), jordan.u, &[0, -1]).unwrap();
        }
        for n in 1..=3 {
            let m = jordan.r_h1_hn(n);
            asymptotic_identity_check(&m, jordan.u, &vec![0; 2 * (n + 1)]).unwrap();
        }
        let cat = TrivialQuiverCatalog::new();
        asymptotic_identity_check(&cat.r_signed(), cat.u, &[0; 4]).unwrap();
        let growing = diag(
            &jordan.reg,
            vec![
                RationalFunction::var(&jordan.reg, jordan.u),
                RationalFunction::one(&jordan.reg),
            ],
        );
        assert!(matches!(
            asymptotic_identity_check(&growing, jordan.u, &[0, 0]),
            Err(RMatError::BadAsymptotics { .. })
        ));
    }

    #[test]
    fn braid_cycle_over_three_tower_slots_closes() {
        let (ctx, zs) = SlotCtx::chain(
            &[FamilySpec::Tower, FamilySpec::Tower, FamilySpec::Tower],
            2,
        );
        let cycle: Vec<Chamber> = vec![
            Chamber(vec![0, 1, 2]),
            Chamber(vec![0, 2, 1]),
            Chamber(vec![2, 0, 1]),
            Chamber(vec![2, 1, 0]),
            Chamber(vec![1, 2, 0]),
            Chamber(vec![1, 0, 2]),
        ];
        for n in 1..=2 {
            let stabs: Vec<StabMatrix> = cycle
                .iter()
                .map(|c| stab_matrix(&ctx, c, n, true).unwrap())
                .collect();
            let dim = stabs[0].mat.nrows();
            let mut acc = Mat::identity(&ctx.reg, dim);
            for k in 0..stabs.len() {
                let next = &stabs[(k + 1) % stabs.len()];
                let r = r_from_stabs(&stabs[k], next, zs[0], &[0, 0, 0], false).unwrap();
                acc = r.mat.mul(&acc);
            }
            assert!(acc.is_identity(), "cycle at weight {n} is not closed");
        }
    }

    #[test]
    fn incompatible_envelopes_are_rejected() {
        let cat = TrivialQuiverCatalog::new();
        let base = StabMatrix {
            mat: cat.stab_plus(),
            basis: vec![vec![0, 1], vec![1, 0]],
            chamber: Chamber::standard(2),
            normalized: false,
        };
        let mut other_basis = base.clone();
        other_basis.basis = vec![vec![0, 2], vec![2, 0]];
        assert!(matches!(
            r_from_stabs(&base, &other_basis, cat.u, &[1, 1], false),
            Err(RMatError::Mismatch(_))
        ));
        let mut other_norm = base.clone();
        other_norm.mat = cat.stab_minus();
        other_norm.normalized = true;
        assert!(matches!(
            r_from_stabs(&base, &other_norm, cat.u, &[1, 1], false),
            Err(RMatError::Mismatch(_))
        ));
        let three = StabMatrix {
            mat: Mat::identity(&cat.reg, 1),
            basis: vec![vec![0, 0, 0]],
            chamber: Chamber::standard(3),
            normalized: false,
        };
        assert!(matches!(
            r_from_stabs(&three, &three, cat.u, &[1, 1, 1], true),
            Err(RMatError::Unsupported(_))
        ));
    }
}
