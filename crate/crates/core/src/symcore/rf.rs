use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::poly::MultiPoly;
use super::registry::{Registry, Var};
use super::SymError;

/// Reduced fraction of multivariate polynomials. Canonical form: numerator
/// and denominator coprime, denominator integer-primitive with positive
/// leading coefficient, zero stored as 0/1. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, SymError> {
        if den.is_zero() {
            return Err(SymError::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return RationalFunction {
                den: MultiPoly::one(num.registry()),
                num,
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        Self::normalized_coprime(num, den)
    }

    /// Canonicalize a fraction already known to be in lowest terms: only the
    /// denominator's sign and integer content are adjusted.
    fn normalized_coprime(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return RationalFunction {
                den: MultiPoly::one(num.registry()),
                num,
            };
        }
        let (scale, den) = den.integer_normal_form();
        let num = num.scale(&scale.recip());
        RationalFunction { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFunction {
            den: MultiPoly::one(p.registry()),
            num: p,
        }
    }

    pub fn zero(reg: &Arc<Registry>) -> Self {
        Self::from_poly(MultiPoly::zero(reg))
    }

    pub fn one(reg: &Arc<Registry>) -> Self {
        Self::from_poly(MultiPoly::one(reg))
    }

    pub fn constant(reg: &Arc<Registry>, c: BigRational) -> Self {
        Self::from_poly(MultiPoly::constant(reg, c))
    }

    pub fn from_int(reg: &Arc<Registry>, c: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(reg, c))
    }

    pub fn var(reg: &Arc<Registry>, v: Var) -> Self {
        Self::from_poly(MultiPoly::var(reg, v))
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.num.registry()
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// `Some(c)` iff the value is the constant `c`.
    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let g = self.den.gcd(&other.den);
        let (da, db) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (self.den.div_exact(&g), other.den.div_exact(&g))
        };
        // self = na/(g*da), other = nb/(g*db); sum = (na*db + nb*da)/(g*da*db).
        // Cancel against the known factors of the denominator one at a time;
        // each partial gcd is far cheaper than one big reduction.
        let mut num = self.num.mul(&db).add(&other.num.mul(&da));
        if num.is_zero() {
            return Self::zero(self.registry());
        }
        let mut parts = [g, da, db];
        for part in &mut parts {
            if part.is_one() {
                continue;
            }
            loop {
                let h = num.gcd(part);
                if h.is_one() {
                    break;
                }
                num = num.div_exact(&h);
                *part = part.div_exact(&h);
            }
        }
        let [g, da, db] = parts;
        Self::normalized_coprime(num, g.mul(&da).mul(&db))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.registry());
        }
        // Cross-cancel before multiplying to keep intermediates small.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let na = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.div_exact(&g1)
        };
        let db = if g1.is_one() {
            other.den.clone()
        } else {
            other.den.div_exact(&g1)
        };
        let nb = if g2.is_one() {
            other.num.clone()
        } else {
            other.num.div_exact(&g2)
        };
        let da = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.div_exact(&g2)
        };
        // Both inputs were reduced and the cross pairs are now coprime, so
        // the product of the remainders is already in lowest terms.
        Self::normalized_coprime(na.mul(&nb), da.mul(&db))
    }

    pub fn inv(&self) -> Result<Self, SymError> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Self::normalized_coprime(
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SymError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self, SymError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(self.registry());
        let mut base = self.clone();
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.registry());
        }
        Self::normalized_coprime(self.num.scale(c), self.den.clone())
    }

    /// Simultaneous substitution of rational functions for variables.
    /// Variables absent from the map are left alone.
    pub fn substitute(&self, map: &HashMap<Var, RationalFunction>) -> Result<Self, SymError> {
        let num = subst_poly(&self.num, map)?;
        let den = subst_poly(&self.den, map)?;
        if den.is_zero() {
            return Err(SymError::SingularSubstitution);
        }
        num.div(&den)
    }

    pub fn substitute_one(&self, v: Var, value: &RationalFunction) -> Result<Self, SymError> {
        let mut map = HashMap::new();
        map.insert(v, value.clone());
        self.substitute(&map)
    }

    /// Numeric evaluation; every variable that occurs must be bound.
    pub fn eval(&self, values: &HashMap<Var, BigRational>) -> Result<BigRational, SymError> {
        let n = eval_poly(&self.num, values)?;
        let d = eval_poly(&self.den, values)?;
        if d.is_zero() {
            return Err(SymError::SingularSubstitution);
        }
        Ok(n / d)
    }
}

fn subst_poly(
    p: &MultiPoly,
    map: &HashMap<Var, RationalFunction>,
) -> Result<RationalFunction, SymError> {
    let reg = p.registry();
    if !p.occurring_vars().iter().any(|v| map.contains_key(v)) {
        return Ok(RationalFunction::from_poly(p.clone()));
    }
    // Cache powers of each substituted image.
    let mut powers: HashMap<Var, Vec<RationalFunction>> = HashMap::new();
    for v in p.occurring_vars() {
        if let Some(img) = map.get(&v) {
            let d = p.degree_in(v) as usize;
            let mut pw = Vec::with_capacity(d + 1);
            pw.push(RationalFunction::one(reg));
            for k in 1..=d {
                let next = pw[k - 1].mul(img);
                pw.push(next);
            }
            powers.insert(v, pw);
        }
    }
    let mut acc = RationalFunction::zero(reg);
    for (m, c) in p.terms() {
        let mut term =
            RationalFunction::from_poly(MultiPoly::constant(reg, c.clone()));
        let mut untouched = MultiPoly::one(reg);
        for v in reg.vars() {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            match powers.get(&v) {
                Some(pw) => term = term.mul(&pw[e as usize]),
                None => untouched = untouched.mul(&MultiPoly::var(reg, v).pow(e)),
            }
        }
        term = term.mul(&RationalFunction::from_poly(untouched));
        acc = acc.add(&term);
    }
    Ok(acc)
}

fn eval_poly(
    p: &MultiPoly,
    values: &HashMap<Var, BigRational>,
) -> Result<BigRational, SymError> {
    let reg = p.registry();
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut term = c.clone();
        for v in reg.vars() {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let val = values
                .get(&v)
                .ok_or_else(|| SymError::UnboundVariable(reg.name(v).to_owned()))?;
            for _ in 0..e {
                term *= val;
            }
        }
        acc += term;
    }
    Ok(acc)
}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(out, "{}", self.num)
        } else {
            write!(out, "({})/({})", self.num, self.den)
        }
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Convenience for building small rationals in tests and fixtures.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
