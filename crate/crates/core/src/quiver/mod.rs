//! Quivers with potentials: the combinatorial data underlying every other
//! module. A quiver carries named nodes, weighted arrows, a potential given
//! as rational combinations of cyclic arrow words, an optional splitting of
//! the arrows into the two halves of a doubling plus distinguished loops,
//! and an optional total order on fermionic nodes.
//!
//! Conventions fixed here and relied on downstream:
//! - Arrow weights are additive linear forms in equivariant symbols.
//! - Potential cycles are stored in walk order: the head of each arrow is
//!   the tail of the next, cyclically. Equality of cyclic words is tested
//!   on a canonical rotation (lexicographically minimal id sequence).
//! - A node is fermionic iff `1 + #loops` is odd.

pub mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::symcore::{Mat, MultiPoly, RationalFunction, Registry, SymError, Var};

#[derive(Debug, thiserror::Error)]
pub enum QuiverError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("potential term {term}: arrow {arrow:?} at position {position} ends at node {found:?} but the next arrow starts at {expected:?}")]
    OpenCycle {
        term: usize,
        position: usize,
        arrow: String,
        found: String,
        expected: String,
    },
    #[error("invalid splitting: {0}")]
    BadSplitting(String),
    #[error("operation needs a splitting but the quiver has none")]
    MissingSplitting,
    #[error("unknown symbol {name:?} in {context}")]
    UnknownSymbol { name: String, context: String },
    #[error("{context}, column {col}: {msg}")]
    Form {
        context: String,
        col: usize,
        msg: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sym(#[from] SymError),
}

#[derive(Clone, Debug)]
pub struct Arrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub weight: MultiPoly,
}

/// One term of a potential: an exact coefficient times a cyclic word of
/// arrows, stored in walk order and canonically rotated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialTerm {
    pub coeff: BigRational,
    pub cycle: Vec<usize>,
}

/// Splitting of the arrow set into a doubling pair A <-> A* plus one
/// distinguished loop per bosonic node.
#[derive(Clone, Debug, Default)]
pub struct Splitting {
    /// Pairs (a, a*) of arrow indices with opposite endpoints.
    pub pairs: Vec<(usize, usize)>,
    /// Distinguished loops, one per bosonic node.
    pub loops: Vec<usize>,
}

impl Splitting {
    pub fn a_half(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn a_star_half(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.1)
    }
}

/// Dimension vector indexed by node position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimensionVector(pub Vec<usize>);

impl DimensionVector {
    pub fn zero(n: usize) -> Self {
        DimensionVector(vec![0; n])
    }

    pub fn delta(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimensionVector(v)
    }

    pub fn add(&self, other: &Self) -> Self {
        DimensionVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Framing data: in- and out-framing weight lists per node. Dimensions are
/// the list lengths; the shift mu_i = d_out,i - d_in,i.
#[derive(Clone, Debug)]
pub struct Framing {
    pub in_weights: Vec<Vec<MultiPoly>>,
    pub out_weights: Vec<Vec<MultiPoly>>,
}

impl Framing {
    pub fn empty(n: usize) -> Self {
        Framing {
            in_weights: vec![Vec::new(); n],
            out_weights: vec![Vec::new(); n],
        }
    }

    pub fn d_in(&self, i: usize) -> usize {
        self.in_weights[i].len()
    }

    pub fn d_out(&self, i: usize) -> usize {
        self.out_weights[i].len()
    }

    pub fn shift(&self, i: usize) -> i64 {
        self.d_out(i) as i64 - self.d_in(i) as i64
    }
}

/// Minuscule auxiliary framing at one node: an in-framing of dimension one,
/// an out-framing of dimension one with weight `out_weight`, and the framed
/// extension of the potential recorded as cyclic words over arrow ids plus
/// the reserved framing ids "A"/"B". Admissible iff the out-weight is a
/// nonzero form.
#[derive(Clone, Debug)]
pub struct AuxiliaryDatum {
    pub node: usize,
    pub out_weight: MultiPoly,
    pub framed_potential: Vec<(BigRational, Vec<String>)>,
}

impl AuxiliaryDatum {
    pub fn is_admissible(&self) -> bool {
        !self.out_weight.is_zero()
    }
}

/// A Cartan element written on the basis (v_i, d_i): polynomial
/// coefficients on the v half, rational coefficients on the d half.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanElement {
    pub v_coeffs: Vec<MultiPoly>,
    pub d_coeffs: Vec<BigRational>,
}

#[derive(Debug)]
pub struct QuiverWithPotential {
    reg: Arc<Registry>,
    nodes: Vec<String>,
    arrows: Vec<Arrow>,
    potential: Vec<PotentialTerm>,
    splitting: Option<Splitting>,
    /// All node indices in the total order used for fermionic sign pairs.
    node_order: Vec<usize>,
}

/// Rotates a cycle so its id sequence is lexicographically minimal.
fn canonical_rotation(arrows: &[Arrow], cycle: &[usize]) -> Vec<usize> {
    if cycle.is_empty() {
        return Vec::new();
    }
    let key = |rot: usize| -> Vec<&str> {
        (0..cycle.len())
            .map(|k| arrows[cycle[(rot + k) % cycle.len()]].id.as_str())
            .collect()
    };
    let best = (0..cycle.len()).min_by_key(|&r| key(r)).unwrap();
    (0..cycle.len())
        .map(|k| cycle[(best + k) % cycle.len()])
        .collect()
}

impl QuiverWithPotential {
    pub fn new(
        reg: Arc<Registry>,
        nodes: Vec<String>,
        arrows: Vec<Arrow>,
        potential: Vec<(BigRational, Vec<usize>)>,
        splitting: Option<Splitting>,
        node_order: Option<Vec<usize>>,
    ) -> Result<Self, QuiverError> {
        let mut seen = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if seen.insert(n.clone(), i).is_some() {
                return Err(QuiverError::DuplicateId(n.clone()));
            }
        }
        let mut seen = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if seen.insert(a.id.clone(), i).is_some() {
                return Err(QuiverError::DuplicateId(a.id.clone()));
            }
            assert!(a.tail < nodes.len() && a.head < nodes.len());
        }
        let mut canon = Vec::new();
        for (ti, (coeff, cycle)) in potential.into_iter().enumerate() {
            for (k, &a) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                if arrows[a].head != arrows[next].tail {
                    return Err(QuiverError::OpenCycle {
                        term: ti,
                        position: k,
                        arrow: arrows[a].id.clone(),
                        found: nodes[arrows[a].head].clone(),
                        expected: nodes[arrows[next].tail].clone(),
                    });
                }
            }
            canon.push(PotentialTerm {
                coeff,
                cycle: canonical_rotation(&arrows, &cycle),
            });
        }
        let node_order = node_order.unwrap_or_else(|| (0..nodes.len()).collect());
        let q = QuiverWithPotential {
            reg,
            nodes,
            arrows,
            potential: canon,
            splitting: None,
            node_order,
        };
        let q = match splitting {
            Some(s) => q.with_splitting(s)?,
            None => q,
        };
        Ok(q)
    }

    fn with_splitting(mut self, s: Splitting) -> Result<Self, QuiverError> {
        let mut used = vec![false; self.arrows.len()];
        let mut mark = |i: usize| -> Result<(), QuiverError> {
            if used[i] {
                return Err(QuiverError::BadSplitting(format!(
                    "arrow {:?} classified twice",
                    self.arrows[i].id
                )));
            }
            used[i] = true;
            Ok(())
        };
        for &(a, b) in &s.pairs {
            mark(a)?;
            mark(b)?;
            if self.arrows[a].tail != self.arrows[b].head
                || self.arrows[a].head != self.arrows[b].tail
            {
                return Err(QuiverError::BadSplitting(format!(
                    "pair ({:?}, {:?}) does not have opposite endpoints",
                    self.arrows[a].id, self.arrows[b].id
                )));
            }
        }
        let mut loop_count = vec![0usize; self.nodes.len()];
        for &l in &s.loops {
            mark(l)?;
            if self.arrows[l].tail != self.arrows[l].head {
                return Err(QuiverError::BadSplitting(format!(
                    "distinguished arrow {:?} is not a loop",
                    self.arrows[l].id
                )));
            }
            loop_count[self.arrows[l].tail] += 1;
        }
        if let Some(i) = (0..self.arrows.len()).find(|&i| !used[i]) {
            return Err(QuiverError::BadSplitting(format!(
                "arrow {:?} left unclassified",
                self.arrows[i].id
            )));
        }
        for i in 0..self.nodes.len() {
            let want = if self.node_parity(i) { 0 } else { 1 };
            if loop_count[i] != want {
                return Err(QuiverError::BadSplitting(format!(
                    "node {:?} needs {} distinguished loop(s), found {}",
                    self.nodes[i], want, loop_count[i]
                )));
            }
        }
        self.splitting = Some(s);
        Ok(self)
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_index(&self, name: &str) -> Result<usize, QuiverError> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| QuiverError::UnknownNode(name.to_owned()))
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize, QuiverError> {
        self.arrows
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| QuiverError::UnknownArrow(id.to_owned()))
    }

    pub fn potential(&self) -> &[PotentialTerm] {
        &self.potential
    }

    pub fn splitting(&self) -> Option<&Splitting> {
        self.splitting.as_ref()
    }

    pub fn loops_at(&self, i: usize) -> usize {
        self.arrows
            .iter()
            .filter(|a| a.tail == i && a.head == i)
            .count()
    }

    /// Node parity: fermionic (true) iff 1 + #loops is odd.
    pub fn node_parity(&self, i: usize) -> bool {
        (1 + self.loops_at(i)) % 2 == 1
    }

    /// Parity of a dimension vector: sum of fermionic coordinates mod 2.
    pub fn parity(&self, v: &DimensionVector) -> bool {
        let mut p = 0usize;
        for i in 0..self.nodes.len() {
            if self.node_parity(i) {
                p += v.0[i];
            }
        }
        p % 2 == 1
    }

    pub fn arrow_count(&self, tail: usize, head: usize) -> usize {
        self.arrows
            .iter()
            .filter(|a| a.tail == tail && a.head == head)
            .count()
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                if self.arrow_count(i, j) != self.arrow_count(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// The sign pairing of the twisted product: counts A-half arrows from
    /// the support of v1 to the support of v2 plus ordered fermionic pairs.
    pub fn sign_pairing(
        &self,
        v1: &DimensionVector,
        v2: &DimensionVector,
    ) -> Result<bool, QuiverError> {
        let s = self.splitting.as_ref().ok_or(QuiverError::MissingSplitting)?;
        let mut total = 0usize;
        for a in s.a_half() {
            total += v1.0[self.arrows[a].tail] * v2.0[self.arrows[a].head];
        }
        let fermionic: Vec<usize> = self
            .node_order
            .iter()
            .copied()
            .filter(|&i| self.node_parity(i))
            .collect();
        for (pos, &k) in fermionic.iter().enumerate() {
            for &l in &fermionic[pos + 1..] {
                total += v1.0[k] * v2.0[l];
            }
        }
        Ok(total % 2 == 1)
    }

    /// The scalar bond factor between two nodes: a product over arrows
    /// joining them of linear factors in the spectral symbol z and the
    /// formal shift symbol sigma attached to the second node.
    pub fn bond_factor(
        &self,
        i: usize,
        j: usize,
        z: Var,
        sigma: Var,
    ) -> Result<RationalFunction, SymError> {
        let reg = &self.reg;
        let zp = MultiPoly::var(reg, z);
        let sp = MultiPoly::var(reg, sigma);
        let mut acc = RationalFunction::one(reg);
        for a in &self.arrows {
            if a.tail == i && a.head == j {
                let f = RationalFunction::from_poly(zp.sub(&a.weight).sub(&sp));
                acc = acc.mul(&f);
            }
            if a.tail == j && a.head == i {
                let f = RationalFunction::new(MultiPoly::one(reg), zp.add(&a.weight).sub(&sp))?;
                acc = acc.mul(&f);
            }
        }
        Ok(acc)
    }

    /// Eigenvalue of the Cartan current on a torus fixed point: u^mu times
    /// the Chern polynomial of the virtual bundle obtained from the fixed
    /// point's Chern roots, shifted along arrows at the node, plus the
    /// framing difference.
    pub fn cartan_eigenvalue(
        &self,
        framing: &Framing,
        roots: &[Vec<MultiPoly>],
        i: usize,
        u: Var,
    ) -> Result<RationalFunction, SymError> {
        let reg = &self.reg;
        let up = MultiPoly::var(reg, u);
        let mut plus: Vec<MultiPoly> = Vec::new();
        let mut minus: Vec<MultiPoly> = Vec::new();
        for a in &self.arrows {
            if a.tail == i {
                for x in &roots[a.head] {
                    plus.push(x.add(&a.weight));
                }
            }
            if a.head == i {
                for x in &roots[a.tail] {
                    minus.push(x.sub(&a.weight));
                }
            }
        }
        plus.extend(framing.out_weights[i].iter().cloned());
        minus.extend(framing.in_weights[i].iter().cloned());
        let mut acc = RationalFunction::one(reg);
        for w in &plus {
            acc = acc.mul(&RationalFunction::from_poly(up.sub(w)));
        }
        for w in &minus {
            acc = acc.mul(&RationalFunction::new(MultiPoly::one(reg), up.sub(w))?);
        }
        // u^mu * prod (u-w+)/u / prod (u-w-)/u collapses to a single power.
        let k = framing.shift(i) + minus.len() as i64 - plus.len() as i64;
        let upow = if k >= 0 {
            RationalFunction::from_poly(up.pow(k as u32))
        } else {
            RationalFunction::new(MultiPoly::one(reg), up.pow((-k) as u32))?
        };
        Ok(acc.mul(&upow))
    }

    /// Matrix of the invariant bilinear form on the Cartan in the basis
    /// (v_1..v_n, d_1..d_n): zero on v x v, identity between v and d, and
    /// the summed arrow-weight matrix Q on d x d.
    pub fn bilinear_form(&self) -> Mat {
        let n = self.nodes.len();
        let reg = &self.reg;
        let q = self.q_matrix();
        Mat::from_fn(reg, 2 * n, 2 * n, |r, c| {
            if r < n && c < n {
                RationalFunction::zero(reg)
            } else if r < n {
                RationalFunction::from_int(reg, i64::from(c - n == r))
            } else if c < n {
                RationalFunction::from_int(reg, i64::from(r - n == c))
            } else {
                RationalFunction::from_poly(q[r - n][c - n].clone())
            }
        })
    }

    /// Q_ij: the sum of weights of all arrows between i and j (both
    /// orientations).
    pub fn q_matrix(&self) -> Vec<Vec<MultiPoly>> {
        let n = self.nodes.len();
        let mut q = vec![vec![MultiPoly::zero(&self.reg); n]; n];
        for a in &self.arrows {
            q[a.tail][a.head] = q[a.tail][a.head].add(&a.weight);
            if a.tail != a.head {
                q[a.head][a.tail] = q[a.head][a.tail].add(&a.weight);
            } else {
                // A loop contributes both orientations to the diagonal.
                q[a.tail][a.tail] = q[a.tail][a.tail].add(&a.weight);
            }
        }
        q
    }

    /// Coroot of a dimension vector: h_eta = sum eta_i d_i - sum_j (sum_i
    /// Q_ij eta_i) v_j.
    pub fn coroot(&self, eta: &DimensionVector) -> CartanElement {
        let n = self.nodes.len();
        let q = self.q_matrix();
        let mut v_coeffs = vec![MultiPoly::zero(&self.reg); n];
        for j in 0..n {
            for i in 0..n {
                let c = BigRational::from_integer(eta.0[i].into());
                v_coeffs[j] = v_coeffs[j].sub(&q[i][j].scale(&c));
            }
        }
        let d_coeffs = eta
            .0
            .iter()
            .map(|&e| BigRational::from_integer(e.into()))
            .collect();
        CartanElement { v_coeffs, d_coeffs }
    }

    /// Builds the tripled quiver: for every arrow a of the input an
    /// opposite partner a* with weight -hbar - wt(a), plus one loop per
    /// node with weight +hbar, and the canonical cubic potential pairing
    /// each loop against the moment-map terms at its node.
    pub fn tripled(&self, hbar: &MultiPoly) -> Result<QuiverWithPotential, QuiverError> {
        if self.splitting.is_some() {
            return Err(QuiverError::Config(
                "tripling expects an unsplit quiver".into(),
            ));
        }
        if !self.potential.is_empty() {
            return Err(QuiverError::Config(
                "tripling expects a quiver without potential".into(),
            ));
        }
        let m = self.arrows.len();
        let mut arrows = self.arrows.clone();
        for a in &self.arrows {
            arrows.push(Arrow {
                id: format!("{}*", a.id),
                tail: a.head,
                head: a.tail,
                weight: hbar.neg().sub(&a.weight),
            });
        }
        for (i, name) in self.nodes.iter().enumerate() {
            arrows.push(Arrow {
                id: format!("omega_{name}"),
                tail: i,
                head: i,
                weight: hbar.clone(),
            });
        }
        // tr(eps_i mu_i) expanded: +[a*, a, omega_head(a)] - [a, a*,
        // omega_tail(a)] per original arrow, cycles in walk order.
        let mut potential = Vec::new();
        for (k, a) in self.arrows.iter().enumerate() {
            let dual = m + k;
            let omega_head = 2 * m + a.head;
            let omega_tail = 2 * m + a.tail;
            potential.push((BigRational::one(), vec![dual, k, omega_head]));
            potential.push((-BigRational::one(), vec![k, dual, omega_tail]));
        }
        let splitting = Splitting {
            pairs: (0..m).map(|k| (k, m + k)).collect(),
            loops: (0..self.nodes.len()).map(|i| 2 * m + i).collect(),
        };
        QuiverWithPotential::new(
            self.reg.clone(),
            self.nodes.clone(),
            arrows,
            potential,
            Some(splitting),
            Some(self.node_order.clone()),
        )
    }

    /// Structural equality of potentials as elements of the cyclic quotient:
    /// compares canonical rotations with coefficients, order-insensitively.
    pub fn potential_equals(&self, other: &[(BigRational, Vec<usize>)]) -> bool {
        let mut mine: Vec<(Vec<usize>, BigRational)> = self
            .potential
            .iter()
            .map(|t| (t.cycle.clone(), t.coeff.clone()))
            .collect();
        let mut theirs: Vec<(Vec<usize>, BigRational)> = other
            .iter()
            .map(|(c, cy)| (canonical_rotation(&self.arrows, cy), c.clone()))
            .collect();
        mine.sort();
        theirs.sort();
        mine == theirs
    }
}

impl fmt::Display for QuiverWithPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}", self.nodes.join(", "))?;
        for a in &self.arrows {
            writeln!(
                f,
                "  {}: {} -> {}  [{}]",
                a.id, self.nodes[a.tail], self.nodes[a.head], a.weight
            )?;
        }
        if !self.potential.is_empty() {
            write!(f, "W =")?;
            for (k, t) in self.potential.iter().enumerate() {
                let c = t.coeff.clone();
                let word: Vec<&str> = t
                    .cycle
                    .iter()
                    .rev()
                    .map(|&i| self.arrows[i].id.as_str())
                    .collect();
                if k == 0 {
                    if c == -BigRational::one() {
                        write!(f, " -")?;
                    } else if c != BigRational::one() {
                        write!(f, " {c}")?;
                    }
                } else if c == BigRational::one() {
                    write!(f, " +")?;
                } else if c == -BigRational::one() {
                    write!(f, " -")?;
                } else if c.is_negative() {
                    write!(f, " - {}", -c.clone())?;
                } else {
                    write!(f, " + {c}")?;
                }
                write!(f, " {}", word.join(" "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
