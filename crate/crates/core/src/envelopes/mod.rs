//! Stable-envelope matrices for chains of rank-one framing slots on the
//! one-loop quiver, via the combinatorial weight function: its shuffle sum,
//! matrix elements by Chern-root substitution, normalizers, transposes with
//! exact integral ratios, and the specialization between the truncated and
//! generic slot families.
//!
//! Slot families:
//! - `Tower { t }`: in- and out-framing of dimension one, out-weight `t` a
//!   free symbol; one fixed point in every grade.
//! - `Spin { cap }`: the same shape with `t = cap * hbar`; grades above
//!   `cap` vanish.
//! - `Fock`: in-framing only; the out-framing factors of the weight
//!   function are dropped for this slot.
//!
//! Basis order everywhere: compositions listed lexicographically ascending.

pub mod catalog;

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;

use crate::symcore::shuffles::block_assignments;
use crate::symcore::{rat, Mat, MultiPoly, RationalFunction, Registry, SymError, Var, VarKind};

#[derive(Debug, thiserror::Error)]
pub enum EnvelopeError {
    #[error("transpose resonance: slot {slot} has t = {multiple}*hbar colliding with occupation {occupation}")]
    Resonance {
        slot: usize,
        multiple: usize,
        occupation: usize,
    },
    #[error("weight function for {0} did not reduce to a polynomial")]
    NotPolynomial(String),
    #[error("{0} is not defined for Fock slots")]
    UnsupportedSlot(&'static str),
    #[error("stab matrix has a vanishing diagonal entry at {0}")]
    SingularDiagonal(String),
    #[error("need {needed} Chern-root variables, context has {available}")]
    NotEnoughRoots { needed: usize, available: usize },
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// What kind of framing a slot carries.
#[derive(Clone, Debug)]
pub enum SlotFamily {
    /// One in- and one out-framing line, out-weight a free parameter.
    Tower { t: MultiPoly },
    /// Truncated family: out-weight cap * hbar, grades limited to cap.
    Spin { cap: usize },
    /// In-framing only; no out-weight factors.
    Fock,
}

#[derive(Clone, Debug)]
pub struct Slot {
    pub family: SlotFamily,
    /// Value of the slot's spectral parameter (a variable or a constant).
    pub z: MultiPoly,
}

impl Slot {
    /// The out-framing weight parameter, if the family has one.
    pub fn t(&self, reg: &Arc<Registry>, hbar: Var) -> Option<MultiPoly> {
        match &self.family {
            SlotFamily::Tower { t } => Some(t.clone()),
            SlotFamily::Spin { cap } => {
                Some(MultiPoly::var(reg, hbar).scale(&rat(*cap as i64, 1)))
            }
            SlotFamily::Fock => None,
        }
    }

    pub fn d_out(&self) -> usize {
        match self.family {
            SlotFamily::Fock => 0,
            _ => 1,
        }
    }

    pub fn cap(&self) -> Option<usize> {
        match self.family {
            SlotFamily::Spin { cap } => Some(cap),
            _ => None,
        }
    }
}

/// A chamber: slot indices listed by decreasing spectral parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber(pub Vec<usize>);

impl Chamber {
    pub fn standard(r: usize) -> Self {
        Chamber((0..r).collect())
    }

    pub fn opposite(r: usize) -> Self {
        Chamber((0..r).rev().collect())
    }

    pub fn reversed(&self) -> Self {
        Chamber(self.0.iter().rev().copied().collect())
    }
}

/// Everything a weight-function computation needs: the symbol registry, the
/// loop weight, the slots, and a pool of Chern-root variables.
pub struct SlotCtx {
    pub reg: Arc<Registry>,
    pub hbar: Var,
    pub slots: Vec<Slot>,
    pub xs: Vec<Var>,
}

/// Slot description used by the convenience constructors, before symbols
/// exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Fresh parameter t (named t, or t1..tr when several).
    Tower,
    Spin(usize),
    Fock,
}

impl SlotCtx {
    /// Two-slot context with spectral values (u, 0), the layout of the
    /// printed rank-two matrices.
    pub fn pair(f1: FamilySpec, f2: FamilySpec, n_max: usize) -> (SlotCtx, Var) {
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let u = b.var("u", VarKind::Spectral);
        let specs = [f1, f2];
        let towers = specs
            .iter()
            .filter(|f| matches!(f, FamilySpec::Tower))
            .count();
        let mut tvars = Vec::new();
        let mut k = 0;
        for f in &specs {
            if matches!(f, FamilySpec::Tower) {
                k += 1;
                let name = if towers == 1 {
                    "t".to_owned()
                } else {
                    format!("t{k}")
                };
                tvars.push(Some(b.var(&name, VarKind::Equivariant)));
            } else {
                tvars.push(None);
            }
        }
        let xs: Vec<Var> = (1..=n_max)
            .map(|i| b.var(&format!("x{i}"), VarKind::ChernRoot))
            .collect();
        let reg = b.build();
        let zvals = [
            MultiPoly::var(&reg, u),
            MultiPoly::zero(&reg),
        ];
        let slots = specs
            .iter()
            .zip(zvals)
            .zip(tvars)
            .map(|((f, z), tv)| Slot {
                family: match f {
                    FamilySpec::Tower => SlotFamily::Tower {
                        t: MultiPoly::var(&reg, tv.unwrap()),
                    },
                    FamilySpec::Spin(cap) => SlotFamily::Spin { cap: *cap },
                    FamilySpec::Fock => SlotFamily::Fock,
                },
                z,
            })
            .collect();
        (
            SlotCtx {
                reg,
                hbar,
                slots,
                xs,
            },
            u,
        )
    }

    /// General context with spectral variables z1..zr.
    pub fn chain(specs: &[FamilySpec], n_max: usize) -> (SlotCtx, Vec<Var>) {
        let mut b = Registry::builder();
        let hbar = b.var("hbar", VarKind::Equivariant);
        let zs: Vec<Var> = (1..=specs.len())
            .map(|i| b.var(&format!("z{i}"), VarKind::Spectral))
            .collect();
        let mut tvars = Vec::new();
        let mut k = 0;
        for f in specs {
            if matches!(f, FamilySpec::Tower) {
                k += 1;
                tvars.push(Some(b.var(&format!("t{k}"), VarKind::Equivariant)));
            } else {
                tvars.push(None);
            }
        }
        let xs: Vec<Var> = (1..=n_max)
            .map(|i| b.var(&format!("x{i}"), VarKind::ChernRoot))
            .collect();
        let reg = b.build();
        let slots = specs
            .iter()
            .zip(&zs)
            .zip(tvars)
            .map(|((f, z), tv)| Slot {
                family: match f {
                    FamilySpec::Tower => SlotFamily::Tower {
                        t: MultiPoly::var(&reg, tv.unwrap()),
                    },
                    FamilySpec::Spin(cap) => SlotFamily::Spin { cap: *cap },
                    FamilySpec::Fock => SlotFamily::Fock,
                },
                z: MultiPoly::var(&reg, *z),
            })
            .collect();
        (
            SlotCtx {
                reg,
                hbar,
                slots,
                xs,
            },
            zs,
        )
    }

    fn hbar_poly(&self) -> MultiPoly {
        MultiPoly::var(&self.reg, self.hbar)
    }

    /// Chern-root values of the fixed point labelled by a composition:
    /// slot i contributes z_i, z_i + hbar, ..., z_i + (n_i - 1) hbar.
    pub fn fixed_point_roots(&self, nvec: &[usize]) -> Vec<MultiPoly> {
        let hb = self.hbar_poly();
        let mut roots = Vec::new();
        for (slot, &ni) in self.slots.iter().zip(nvec) {
            for k in 0..ni {
                roots.push(slot.z.add(&hb.scale(&rat(k as i64, 1))));
            }
        }
        roots
    }

    /// Substitution map sending the Chern-root variables to the fixed
    /// point's root values, consecutive blocks per slot.
    pub fn substitution(&self, nvec: &[usize]) -> HashMap<Var, RationalFunction> {
        self.fixed_point_roots(nvec)
            .into_iter()
            .enumerate()
            .map(|(i, r)| (self.xs[i], RationalFunction::from_poly(r)))
            .collect()
    }
}

/// All compositions of n over the slots, lexicographically ascending,
/// omitting labels that exceed a truncated slot's cap.
pub fn fixed_points(n: usize, slots: &[Slot]) -> Vec<Vec<usize>> {
    fn rec(n: usize, slots: &[Slot], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots.len() == 1 {
            if slots[0].cap().map_or(true, |c| n <= c) {
                let mut full = prefix.clone();
                full.push(n);
                out.push(full);
            }
            return;
        }
        let top = slots[0].cap().map_or(n, |c| c.min(n));
        for k in 0..=top {
            prefix.push(k);
            rec(n - k, &slots[1..], prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if !slots.is_empty() {
        rec(n, slots, &mut Vec::new(), &mut out);
    }
    out
}

pub fn label(nvec: &[usize]) -> String {
    let parts: Vec<String> = nvec.iter().map(|n| n.to_string()).collect();
    format!("({})", parts.join(","))
}

/// The chamber's weight function for one composition: a sum over all
/// distributions of the Chern roots into slot blocks of factors joining
/// each ordered pair of slots. Always a polynomial; the apparent poles of
/// the pairwise ratios cancel in the sum.
pub fn weight_function(
    ctx: &SlotCtx,
    chamber: &Chamber,
    nvec: &[usize],
) -> Result<RationalFunction, EnvelopeError> {
    let reg = &ctx.reg;
    let n: usize = nvec.iter().sum();
    if n > ctx.xs.len() {
        return Err(EnvelopeError::NotEnoughRoots {
            needed: n,
            available: ctx.xs.len(),
        });
    }
    let hb = ctx.hbar_poly();
    let xp: Vec<MultiPoly> = ctx.xs[..n]
        .iter()
        .map(|&x| MultiPoly::var(reg, x))
        .collect();
    let ts: Vec<Option<MultiPoly>> = ctx
        .slots
        .iter()
        .map(|s| s.t(reg, ctx.hbar))
        .collect();

    // Chamber position of each slot; smaller means higher spectral value.
    let mut rank = vec![0usize; ctx.slots.len()];
    for (pos, &slot) in chamber.0.iter().enumerate() {
        rank[slot] = pos;
    }

    // Every term is summed over the common denominator prod_{a<b}(x_a - x_b),
    // which the final exact divisions clear; the sum is a polynomial and this
    // avoids expensive intermediate reductions.
    let mut big = MultiPoly::zero(reg);
    for blocks in block_assignments(nvec) {
        let mut slot_of = vec![0usize; n];
        for (s, blk) in blocks.iter().enumerate() {
            for &p in blk {
                slot_of[p] = s;
            }
        }
        let mut num = MultiPoly::one(reg);
        let mut sign = 1i64;
        for a_pos in 0..chamber.0.len() {
            for b_pos in a_pos + 1..chamber.0.len() {
                let upper = chamber.0[a_pos];
                let lower = chamber.0[b_pos];
                // Roots of the lower slot against the upper spectral value.
                for &alpha in &blocks[lower] {
                    num = num.mul(&xp[alpha].sub(&ctx.slots[upper].z));
                }
                // Out-weight factors of the lower slot against upper roots.
                if let Some(t) = &ts[lower] {
                    let zt = ctx.slots[lower].z.add(t);
                    for &beta in &blocks[upper] {
                        num = num.mul(&zt.sub(&xp[beta]));
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if slot_of[a] == slot_of[b] {
                    // Not a denominator pair: joins the complement factor.
                    num = num.mul(&xp[a].sub(&xp[b]));
                    continue;
                }
                // Interaction numerator (x_alpha - x_beta - hbar) with alpha
                // in the chamber-lower slot, and the denominator orientation
                // sign relative to (x_a - x_b).
                let (alpha, beta) = if rank[slot_of[a]] > rank[slot_of[b]] {
                    (a, b)
                } else {
                    (b, a)
                };
                num = num.mul(&xp[alpha].sub(&xp[beta]).sub(&hb));
                if alpha > beta {
                    sign = -sign;
                }
            }
        }
        if sign < 0 {
            num = num.neg();
        }
        big = big.add(&num);
    }
    for a in 0..n {
        for b in a + 1..n {
            if big.is_zero() {
                break;
            }
            big = big
                .try_div_exact(&xp[a].sub(&xp[b]))
                .ok_or_else(|| EnvelopeError::NotPolynomial(label(nvec)))?;
        }
    }
    Ok(RationalFunction::from_poly(big))
}

/// The normalizer sign of a fixed point: parity of the rank of the part of
/// the polarization moved positively by the chamber, which for these slot
/// chains counts lower-slot roots against upper-slot out-framings.
pub fn normalizer_sign(chamber: &Chamber, slots: &[Slot], nvec: &[usize]) -> i64 {
    let mut rank = 0usize;
    for a_pos in 0..chamber.0.len() {
        for b_pos in a_pos + 1..chamber.0.len() {
            let upper = chamber.0[a_pos];
            let lower = chamber.0[b_pos];
            rank += nvec[lower] * slots[upper].d_out();
        }
    }
    if rank % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A stable-envelope matrix: rows are restriction fixed points, columns the
/// source fixed points, in the shared lexicographic basis.
#[derive(Clone, Debug)]
pub struct StabMatrix {
    pub mat: Mat,
    pub basis: Vec<Vec<usize>>,
    pub chamber: Chamber,
    pub normalized: bool,
}

impl StabMatrix {
    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(|b| label(b)).collect()
    }
}

fn spin_scale(ctx: &SlotCtx, nvec: &[usize]) -> RationalFunction {
    let reg = &ctx.reg;
    let hb = ctx.hbar_poly();
    let mut s = MultiPoly::one(reg);
    for (slot, &ni) in ctx.slots.iter().zip(nvec) {
        if matches!(slot.family, SlotFamily::Spin { .. }) {
            let mut fact = BigRational::from_integer(1.into());
            for k in 1..=ni {
                fact *= BigRational::from_integer((k as i64).into());
            }
            s = s.mul(&hb.pow(ni as u32).scale(&fact));
        }
    }
    RationalFunction::from_poly(s)
}

/// Envelope matrix for total grade n: entry (row n', column n) is the
/// column's weight function evaluated at the row's roots, rescaled to the
/// truncated slots' integral basis, and multiplied by the normalizer sign
/// of the column when requested.
pub fn stab_matrix(
    ctx: &SlotCtx,
    chamber: &Chamber,
    n: usize,
    normalize: bool,
) -> Result<StabMatrix, EnvelopeError> {
    let reg = &ctx.reg;
    let basis = fixed_points(n, &ctx.slots);
    let mut columns = Vec::new();
    for nvec in &basis {
        let w = weight_function(ctx, chamber, nvec)?;
        let mut scale = spin_scale(ctx, nvec);
        if normalize {
            scale = scale.scale(&rat(normalizer_sign(chamber, &ctx.slots, nvec), 1));
        }
        columns.push(w.mul(&scale));
    }
    let mut mat = Mat::zeros(reg, basis.len(), basis.len());
    for (i, nrow) in basis.iter().enumerate() {
        let sub = ctx.substitution(nrow);
        let row_scale = spin_scale(ctx, nrow).inv()?;
        for (j, col) in columns.iter().enumerate() {
            let val = col.substitute(&sub)?.mul(&row_scale);
            mat.set(i, j, val);
        }
    }
    Ok(StabMatrix {
        mat,
        basis,
        chamber: chamber.clone(),
        normalized: normalize,
    })
}

/// Per-slot integral normalization entering the transpose ratio.
fn transpose_norm(
    ctx: &SlotCtx,
    slot_idx: usize,
    n: usize,
) -> Result<RationalFunction, EnvelopeError> {
    let reg = &ctx.reg;
    let hb = ctx.hbar_poly();
    let slot = &ctx.slots[slot_idx];
    match &slot.family {
        SlotFamily::Tower { t } => {
            let mut fact = BigRational::from_integer(1.into());
            for k in 1..=n {
                fact *= BigRational::from_integer((k as i64).into());
            }
            let mut p = MultiPoly::constant(reg, fact);
            for k in 0..n {
                let f = t.sub(&hb.scale(&rat(k as i64, 1)));
                if f.is_zero() {
                    return Err(EnvelopeError::Resonance {
                        slot: slot_idx,
                        multiple: k,
                        occupation: n,
                    });
                }
                p = p.mul(&f);
            }
            Ok(RationalFunction::from_poly(p))
        }
        SlotFamily::Spin { cap } => {
            // prod (cap - k) divided by the basis rescaling n! hbar^n.
            let mut fact = BigRational::from_integer(1.into());
            for k in 1..=n {
                fact *= BigRational::from_integer((k as i64).into());
            }
            let mut num = BigRational::from_integer(1.into());
            for k in 0..n {
                num *= BigRational::from_integer(((*cap - k) as i64).into());
            }
            let den = RationalFunction::from_poly(hb.pow(n as u32).scale(&fact));
            Ok(RationalFunction::constant(reg, num).div(&den)?)
        }
        SlotFamily::Fock => Err(EnvelopeError::UnsupportedSlot("transpose")),
    }
}

/// Transpose of an envelope matrix with respect to the fixed-point
/// integrals: entry (n, n') is the original (n', n) entry scaled by the
/// ratio of per-slot norms.
pub fn stab_transpose(ctx: &SlotCtx, s: &StabMatrix) -> Result<StabMatrix, EnvelopeError> {
    let norms: Vec<RationalFunction> = s
        .basis
        .iter()
        .map(|nvec| {
            let mut p = RationalFunction::one(&ctx.reg);
            for (idx, &ni) in nvec.iter().enumerate() {
                p = p.mul(&transpose_norm(ctx, idx, ni)?);
            }
            Ok(p)
        })
        .collect::<Result<_, EnvelopeError>>()?;
    let mut mat = Mat::zeros(&ctx.reg, s.basis.len(), s.basis.len());
    for i in 0..s.basis.len() {
        for j in 0..s.basis.len() {
            let ratio = norms[i].div(&norms[j])?;
            mat.set(i, j, s.mat.get(j, i).mul(&ratio));
        }
    }
    Ok(StabMatrix {
        mat,
        basis: s.basis.clone(),
        chamber: s.chamber.reversed(),
        normalized: s.normalized,
    })
}

/// Exact inverse of an envelope matrix. Fails with the offending label when
/// a diagonal entry vanishes.
pub fn stab_inverse(s: &StabMatrix) -> Result<StabMatrix, EnvelopeError> {
    for (i, b) in s.basis.iter().enumerate() {
        if s.mat.get(i, i).is_zero() {
            return Err(EnvelopeError::SingularDiagonal(label(b)));
        }
    }
    let inv = s.mat.inverse().map_err(EnvelopeError::Sym)?;
    Ok(StabMatrix {
        mat: inv,
        basis: s.basis.clone(),
        chamber: s.chamber.clone(),
        normalized: s.normalized,
    })
}

/// The specialization of the truncated slot family into the generic family
/// at t = cap * hbar: a rectangular diagonal-style operator from the capped
/// basis into the uncapped one, with entries n! hbar^n in the converted
/// slot.
pub fn specialization_map(
    ctx_spin: &SlotCtx,
    ctx_tower: &SlotCtx,
    slot: usize,
    n: usize,
) -> Result<Mat, EnvelopeError> {
    let rows = fixed_points(n, &ctx_tower.slots);
    let cols = fixed_points(n, &ctx_spin.slots);
    let reg = &ctx_tower.reg;
    let hb = MultiPoly::var(reg, ctx_tower.hbar);
    let mut mat = Mat::zeros(reg, rows.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        if let Some(i) = rows.iter().position(|r| r == c) {
            let ni = c[slot];
            let mut fact = BigRational::from_integer(1.into());
            for k in 1..=ni {
                fact *= BigRational::from_integer((k as i64).into());
            }
            let entry = RationalFunction::from_poly(hb.pow(ni as u32).scale(&fact));
            mat.set(i, j, entry);
        }
    }
    Ok(mat)
}

/// Squared norm of a fixed-point basis vector in the localized intersection
/// pairing: the truncated slots' basis rescaling squared over the tangent
/// Euler class. Envelopes of opposite chambers are orthogonal under the
/// diagonal pairing with these entries.
pub fn fixed_point_pairing(
    ctx: &SlotCtx,
    nvec: &[usize],
) -> Result<RationalFunction, EnvelopeError> {
    let e = tangent_euler(ctx, nvec)?;
    let s = spin_scale(ctx, nvec);
    Ok(s.mul(&s).div(&e)?)
}

/// Euler class of the tangent space at a fixed point: weights of the loop,
/// in-framing, and out-framing contributions, with the gauge directions
/// cancelled as an exact multiset.
pub fn tangent_euler(ctx: &SlotCtx, nvec: &[usize]) -> Result<RationalFunction, EnvelopeError> {
    let reg = &ctx.reg;
    let hb = ctx.hbar_poly();
    let roots = ctx.fixed_point_roots(nvec);
    let ts: Vec<Option<MultiPoly>> = ctx.slots.iter().map(|s| s.t(reg, ctx.hbar)).collect();
    let mut num: Vec<MultiPoly> = Vec::new();
    // Loop part: Hom(V, V) twisted by the loop weight -hbar.
    for a in &roots {
        for b in &roots {
            num.push(a.sub(b).sub(&hb));
        }
    }
    // Framing parts.
    for (i, slot) in ctx.slots.iter().enumerate() {
        for r in &roots {
            num.push(r.sub(&slot.z));
            if let Some(t) = &ts[i] {
                num.push(slot.z.add(t).sub(r));
            }
        }
    }
    // Gauge directions Hom(V, V) cancel weight by weight.
    for a in &roots {
        for b in &roots {
            let w = a.sub(b);
            match num.iter().position(|x| *x == w) {
                Some(k) => {
                    num.swap_remove(k);
                }
                None => {
                    return Err(EnvelopeError::NotPolynomial(format!(
                        "tangent weight cancellation failed at {}",
                        label(nvec)
                    )))
                }
            }
        }
    }
    let mut e = MultiPoly::one(reg);
    for w in num {
        e = e.mul(&w);
    }
    Ok(RationalFunction::from_poly(e))
}
