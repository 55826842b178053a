use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::registry::{Registry, Var};

/// Exponent vector, one entry per registry variable. Ordered graded-lex:
/// higher total degree wins, ties broken by the earlier variable with the
/// larger exponent. This is the order behind every canonical form in the
/// crate, so it must never change.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mono(Box<[u32]>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(vec![0; nvars].into_boxed_slice())
    }

    pub fn of_var(nvars: usize, v: Var, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[v.index()] = exp;
        Mono(e.into_boxed_slice())
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_sub(*b).expect("monomial division underflow"))
                .collect(),
        )
    }

    fn with_exp(&self, v: Var, exp: u32) -> Mono {
        let mut e = self.0.to_vec();
        e[v.index()] = exp;
        Mono(e.into_boxed_slice())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {
                // Lex on exponents: the first variable with a differing
                // exponent decides, larger exponent meaning larger monomial.
                for (a, b) in self.0.iter().zip(other.0.iter()) {
                    match a.cmp(b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            ord => ord,
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients. Zero
/// coefficients are never stored; the term map is keyed by the graded-lex
/// order, so iteration order is canonical.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    reg: Arc<Registry>,
    terms: BTreeMap<Mono, BigRational>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.reg.id() == other.reg.id() && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(reg: &Arc<Registry>) -> Self {
        MultiPoly {
            reg: Arc::clone(reg),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(reg: &Arc<Registry>, c: BigRational) -> Self {
        let mut p = Self::zero(reg);
        if !c.is_zero() {
            p.terms.insert(Mono::one(reg.len()), c);
        }
        p
    }

    pub fn from_int(reg: &Arc<Registry>, c: i64) -> Self {
        Self::constant(reg, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn one(reg: &Arc<Registry>) -> Self {
        Self::from_int(reg, 1)
    }

    pub fn var(reg: &Arc<Registry>, v: Var) -> Self {
        let mut p = Self::zero(reg);
        p.terms
            .insert(Mono::of_var(reg.len(), v, 1), BigRational::one());
        p
    }

    /// Constant term plus a rational combination of variables.
    pub fn linear(
        reg: &Arc<Registry>,
        constant: BigRational,
        parts: &[(BigRational, Var)],
    ) -> Self {
        let mut p = Self::constant(reg, constant);
        for (c, v) in parts {
            p.add_term(Mono::of_var(reg.len(), *v, 1), c.clone());
        }
        p
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    fn assert_same_registry(&self, other: &MultiPoly) {
        assert!(
            self.reg.id() == other.reg.id(),
            "mixed registries: values from different variable registries cannot be combined"
        );
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    /// `Some(c)` iff the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Greatest monomial and its coefficient in the graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn occurs(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn occurring_vars(&self) -> Vec<Var> {
        self.reg
            .vars()
            .filter(|v| self.occurs(*v))
            .collect()
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_same_registry(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_same_registry(other);
        let mut out = Self::zero(&self.reg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = &*coeff * c;
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::one(&self.reg);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Coefficients as a univariate polynomial in `v`; index = power of `v`.
    /// Each coefficient is free of `v`. The zero polynomial yields `[]`.
    pub fn as_univariate(&self, v: Var) -> Vec<MultiPoly> {
        if self.is_zero() {
            return Vec::new();
        }
        let deg = self.degree_in(v) as usize;
        let mut coeffs = vec![Self::zero(&self.reg); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exp(v) as usize;
            coeffs[k].add_term(m.with_exp(v, 0), c.clone());
        }
        coeffs
    }

    pub fn from_univariate(reg: &Arc<Registry>, v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = Self::zero(reg);
        for (k, c) in coeffs.iter().enumerate() {
            let vk = Self::var(reg, v).pow(k as u32);
            out = out.add(&c.mul(&vk));
        }
        out
    }

    /// Exact division; `None` when `self` is not a polynomial multiple of
    /// `divisor`.
    pub fn try_div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        self.assert_same_registry(divisor);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.reg);
        let (dm, dc) = {
            let (m, c) = divisor.leading().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            if !dm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&dm);
            let qc = rc / &dc;
            let mut t = Self::zero(&self.reg);
            t.terms.insert(qm.clone(), qc.clone());
            rem = rem.sub(&t.mul(divisor));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn div_exact(&self, divisor: &MultiPoly) -> MultiPoly {
        self.try_div_exact(divisor)
            .expect("exact polynomial division failed; caller guaranteed divisibility")
    }

    /// Writes the polynomial as `scale * P` with `P` having coprime integer
    /// coefficients and positive leading coefficient. The zero polynomial
    /// returns scale 1.
    pub fn integer_normal_form(&self) -> (BigRational, MultiPoly) {
        if self.is_zero() {
            return (BigRational::one(), self.clone());
        }
        let mut denom_lcm = BigInt::one();
        for c in self.terms.values() {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let mut numer_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&denom_lcm / c.denom());
            numer_gcd = numer_gcd.gcd(&scaled);
        }
        // numer_gcd > 0 since the polynomial is nonzero.
        let mut scale = BigRational::new(numer_gcd.clone(), denom_lcm.clone());
        let inv = BigRational::new(denom_lcm, numer_gcd);
        let mut prim = self.scale(&inv);
        if prim
            .leading()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            prim = prim.neg();
            scale = -scale;
        }
        (scale, prim)
    }

    /// Up-to-unit gcd, returned integer-primitive with positive leading
    /// coefficient. gcd(0, p) is the normal form of p.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        self.assert_same_registry(other);
        if self.is_zero() {
            return other.integer_normal_form().1;
        }
        if other.is_zero() {
            return self.integer_normal_form().1;
        }
        let a = self.integer_normal_form().1;
        let b = other.integer_normal_form().1;
        // An integer-primitive linear polynomial is irreducible: the gcd is
        // either that factor or trivial, settled by one exact division.
        if a.total_degree() == 1 {
            return if b.try_div_exact(&a).is_some() {
                a
            } else {
                MultiPoly::one(self.registry())
            };
        }
        if b.total_degree() == 1 {
            return if a.try_div_exact(&b).is_some() {
                b
            } else {
                MultiPoly::one(self.registry())
            };
        }
        gcd_primitive(&a, &b)
    }
}

/// Gcd of two integer-primitive polynomials, by content/primitive-part
/// recursion over the variable set and a primitive pseudo-remainder sequence
/// in the top variable.
fn gcd_primitive(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_one() || b.is_one() {
        return MultiPoly::one(a.registry());
    }
    // Top variable: the highest-index variable occurring in either.
    let top = a
        .occurring_vars()
        .into_iter()
        .chain(b.occurring_vars())
        .max();
    let top = match top {
        // Both are (nonzero) integer-primitive constants, i.e. +/-1... but
        // primitivity forces 1 here; keep the honest computation anyway.
        None => {
            let ca = a.as_constant().unwrap();
            let cb = b.as_constant().unwrap();
            let g = ca.numer().gcd(cb.numer());
            return MultiPoly::constant(a.registry(), BigRational::from_integer(g));
        }
        Some(v) => v,
    };

    let in_a = a.occurs(top);
    let in_b = b.occurs(top);
    if in_a && !in_b {
        let cont = content_in(a, top);
        return gcd_primitive(&cont, b);
    }
    if in_b && !in_a {
        let cont = content_in(b, top);
        return gcd_primitive(a, &cont);
    }

    let cont_a = content_in(a, top);
    let cont_b = content_in(b, top);
    let cont_g = gcd_primitive(&cont_a, &cont_b);
    let mut f = a.div_exact(&cont_a);
    let mut g = b.div_exact(&cont_b);
    if f.degree_in(top) < g.degree_in(top) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = pseudo_rem(&f, &g, top);
        if r.is_zero() {
            break;
        }
        f = g;
        g = primitive_part(&r, top);
    }
    let pp = primitive_part(&g, top);
    cont_g.mul(&pp).integer_normal_form().1
}

/// Gcd of the univariate-in-`v` coefficients; free of `v`.
fn content_in(p: &MultiPoly, v: Var) -> MultiPoly {
    let coeffs = p.as_univariate(v);
    let mut acc = MultiPoly::zero(p.registry());
    for c in &coeffs {
        if c.is_zero() {
            continue;
        }
        acc = acc.gcd(c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_part(p: &MultiPoly, v: Var) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let cont = content_in(p, v);
    p.div_exact(&cont).integer_normal_form().1
}

/// Pseudo-remainder of `f` by `g` in the variable `v`: repeatedly kills the
/// leading `v`-term of `f` after scaling by the leading coefficient of `g`.
/// The result differs from the true remainder by a factor free of `v`, which
/// the primitive PRS strips anyway.
fn pseudo_rem(f: &MultiPoly, g: &MultiPoly, v: Var) -> MultiPoly {
    let dg = g.degree_in(v);
    let g_coeffs = g.as_univariate(v);
    let g_lead = &g_coeffs[dg as usize];
    let mut r = f.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v);
        if dr < dg {
            break;
        }
        let r_coeffs = r.as_univariate(v);
        let r_lead = &r_coeffs[dr as usize];
        let shift = MultiPoly::var(r.registry(), v).pow(dr - dg);
        r = r.mul(g_lead).sub(&g.mul(&r_lead.mul(&shift)));
    }
    r
}

impl fmt::Display for MultiPoly {
    /// Canonical string: terms in descending graded-lex order, explicit `*`
    /// between factors, `^` for powers, coefficients as reduced fractions.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(out, "-")?;
                }
                first = false;
            } else if neg {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for v in self.reg.vars() {
                let e = m.exp(v);
                if e == 1 {
                    factors.push(self.reg.name(v).to_owned());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.reg.name(v), e));
                }
            }
            write!(out, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
