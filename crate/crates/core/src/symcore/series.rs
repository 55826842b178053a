use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use super::poly::MultiPoly;
use super::registry::{Registry, Var};
use super::rf::RationalFunction;
use super::SymError;

/// Marker for series known to all orders (finite Laurent polynomials).
const EXACT_LO: i64 = i64::MIN / 4;

/// Truncated Laurent expansion at infinity in one distinguished variable.
/// Coefficients are rational functions in the remaining variables. `lo` is
/// the lowest exponent whose coefficient is known; everything above the top
/// stored exponent is exactly zero. Series produced from honest rational
/// functions can be re-expanded deeper at will, so `lo` only reflects how far
/// this particular object was computed.
#[derive(Clone, Debug)]
pub struct Series {
    reg: Arc<Registry>,
    var: Var,
    lo: i64,
    coeffs: BTreeMap<i64, RationalFunction>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.reg.id() == other.reg.id()
            && self.var == other.var
            && self.lo == other.lo
            && self.coeffs == other.coeffs
    }
}

impl Series {
    pub fn zero(reg: &Arc<Registry>, var: Var, lo: i64) -> Self {
        Series {
            reg: Arc::clone(reg),
            var,
            lo,
            coeffs: BTreeMap::new(),
        }
    }

    /// A finite Laurent polynomial, exact to all orders. Coefficients must
    /// not involve the series variable.
    pub fn exact(reg: &Arc<Registry>, var: Var, terms: &[(i64, RationalFunction)]) -> Self {
        let mut s = Self::zero(reg, var, EXACT_LO);
        for (e, c) in terms {
            s.insert(*e, c.clone());
        }
        s
    }

    pub fn exact_constant(reg: &Arc<Registry>, var: Var, c: RationalFunction) -> Self {
        Self::exact(reg, var, &[(0, c)])
    }

    /// Expansion of a rational function at `var = infinity`, keeping
    /// exponents down to `lo`. Handles poles at infinity (top exponent is
    /// numerator degree minus denominator degree).
    pub fn from_rf(f: &RationalFunction, var: Var, lo: i64) -> Self {
        let reg = f.registry().clone();
        if f.is_zero() {
            return Self::zero(&reg, var, lo);
        }
        let num_c = f.num().as_univariate(var);
        let den_c = f.den().as_univariate(var);
        let dn = (num_c.len() - 1) as i64;
        let dd = (den_c.len() - 1) as i64;
        let lead = RationalFunction::from_poly(den_c[dd as usize].clone());
        let n_at = |k: i64| -> MultiPoly {
            if k < 0 || k > dn {
                MultiPoly::zero(&reg)
            } else {
                num_c[k as usize].clone()
            }
        };
        let d_at = |k: i64| -> MultiPoly {
            if k < 0 || k > dd {
                MultiPoly::zero(&reg)
            } else {
                den_c[k as usize].clone()
            }
        };
        let top = dn - dd;
        let mut out = Self::zero(&reg, var, lo);
        let mut computed: BTreeMap<i64, RationalFunction> = BTreeMap::new();
        let mut e = top;
        while e >= lo {
            let mut acc = RationalFunction::from_poly(n_at(e + dd));
            for (e2, q) in computed.iter() {
                let d = d_at(dd - (e2 - e));
                if !d.is_zero() {
                    acc = acc.sub(&q.mul(&RationalFunction::from_poly(d)));
                }
            }
            let q = acc.div(&lead).expect("leading denominator coefficient is nonzero");
            computed.insert(e, q.clone());
            out.insert(e, q);
            e -= 1;
        }
        out
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == EXACT_LO
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.reg
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, e: i64, c: RationalFunction) {
        if e < self.lo || c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().add(&c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn coeff(&self, e: i64) -> Result<RationalFunction, SymError> {
        if e < self.lo {
            return Err(SymError::TruncationExceeded {
                var: self.reg.name(self.var).to_owned(),
                lo: self.lo,
                wanted: e,
            });
        }
        Ok(self
            .coeffs
            .get(&e)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(&self.reg)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &RationalFunction)> {
        self.coeffs.iter()
    }

    fn assert_compatible(&self, other: &Series) {
        assert!(
            self.reg.id() == other.reg.id() && self.var == other.var,
            "series in different variables cannot be combined"
        );
    }

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn add(&self, other: &Series) -> Series {
        self.assert_compatible(other);
        let lo = self.lo.max(other.lo);
        let mut out = Self::zero(&self.reg, self.var, lo);
        for (e, c) in &self.coeffs {
            out.insert(*e, c.clone());
        }
        for (e, c) in &other.coeffs {
            out.insert(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.assert_compatible(other);
        let lo = if self.is_exact() && other.is_exact() {
            EXACT_LO
        } else {
            // The unknown tail of one factor meets the known top of the
            // other; below that the product is unreliable.
            let h1 = self.top().unwrap_or(self.lo) as i128;
            let h2 = other.top().unwrap_or(other.lo) as i128;
            let cand = (self.lo as i128 + h2).max(other.lo as i128 + h1);
            cand.max(EXACT_LO as i128) as i64
        };
        let mut out = Self::zero(&self.reg, self.var, lo);
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let e = e1 + e2;
                if e >= lo {
                    out.insert(e, c1.mul(c2));
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &RationalFunction) -> Series {
        let mut out = Self::zero(&self.reg, self.var, self.lo);
        for (e, k) in &self.coeffs {
            out.insert(*e, k.mul(c));
        }
        out
    }

    /// Multiply by `var^k`.
    pub fn shift(&self, k: i64) -> Series {
        let lo = if self.is_exact() {
            EXACT_LO
        } else {
            self.lo + k
        };
        let mut out = Self::zero(&self.reg, self.var, lo);
        for (e, c) in &self.coeffs {
            out.insert(e + k, c.clone());
        }
        out
    }

    pub fn truncate(&self, new_lo: i64) -> Series {
        let mut out = self.clone();
        out.lo = out.lo.max(new_lo);
        out.coeffs.retain(|e, _| *e >= out.lo);
        out
    }

    /// Multiplicative inverse, computed down to exponent `lo_out`.
    pub fn inverse_to(&self, lo_out: i64) -> Result<Series, SymError> {
        let e0 = self.top().ok_or(SymError::ZeroSeries)?;
        let c0 = self.coeffs.get(&e0).unwrap().clone();
        // Relative depth needed so the shifted result reaches lo_out.
        let m = (-(lo_out as i128) - e0 as i128).max(0) as i64;
        if !self.is_exact() && (self.lo as i128 - e0 as i128) > -(m as i128) && m > 0 {
            return Err(SymError::TruncationExceeded {
                var: self.reg.name(self.var).to_owned(),
                lo: self.lo,
                wanted: e0 - m,
            });
        }
        let c0_inv = c0.inv()?;
        // t = self / (c0 var^e0) - 1, supported in strictly negative exponents
        let mut t = self.scale(&c0_inv).shift(-e0).truncate(-m);
        t.lo = -m;
        t.insert(0, RationalFunction::from_int(&self.reg, -1));
        let one = Self::exact_constant(&self.reg, self.var, RationalFunction::one(&self.reg));
        let mut sum = one.clone();
        sum.lo = -m;
        let minus_t = t.neg();
        let mut pw = minus_t.clone();
        let mut k = 1;
        while !pw.is_zero_to_precision() && k <= m {
            sum = sum.add(&pw);
            pw = pw.mul(&minus_t).truncate(-m);
            k += 1;
        }
        let mut out = sum.scale(&c0_inv).shift(-e0);
        out.lo = lo_out;
        out.coeffs.retain(|e, _| *e >= lo_out);
        Ok(out)
    }

    /// exp of a series supported in strictly negative exponents.
    pub fn exp(&self) -> Result<Series, SymError> {
        if let Some(t) = self.top() {
            if t >= 0 {
                return Err(SymError::NotSmallAtInfinity(t));
            }
        }
        if self.is_exact() {
            // exp of even a single negative power has an infinite tail, so
            // the caller must truncate to a working precision first.
            return Err(SymError::TruncationExceeded {
                var: self.reg.name(self.var).to_owned(),
                lo: EXACT_LO,
                wanted: 0,
            });
        }
        let lo = self.lo;
        let m = -lo;
        let mut sum = Self::zero(&self.reg, self.var, lo);
        sum.insert(0, RationalFunction::one(&self.reg));
        let mut pw = self.clone();
        let mut kfact = BigRational::from_integer(1.into());
        let mut k: i64 = 1;
        while !pw.is_zero_to_precision() && k <= m {
            kfact = kfact * BigRational::from_integer(k.into());
            sum = sum.add(&pw.scale(&RationalFunction::constant(
                &self.reg,
                kfact.recip(),
            )));
            pw = pw.mul(self).truncate(lo);
            k += 1;
        }
        Ok(sum)
    }

    /// log(1 + t) for a series `t` supported in strictly negative exponents.
    pub fn log1p(&self) -> Result<Series, SymError> {
        if let Some(t) = self.top() {
            if t >= 0 {
                return Err(SymError::NotSmallAtInfinity(t));
            }
        }
        if self.is_exact() {
            return Err(SymError::TruncationExceeded {
                var: self.reg.name(self.var).to_owned(),
                lo: EXACT_LO,
                wanted: 0,
            });
        }
        let lo = self.lo;
        let m = -lo;
        let mut sum = Self::zero(&self.reg, self.var, lo);
        let mut pw = self.clone();
        let mut k: i64 = 1;
        while !pw.is_zero_to_precision() && k <= m {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let c = BigRational::new((sign).into(), k.into());
            sum = sum.add(&pw.scale(&RationalFunction::constant(&self.reg, c)));
            pw = pw.mul(self).truncate(lo);
            k += 1;
        }
        Ok(sum)
    }
}

/// Laurent expansion at infinity of `f` in `var`, keeping terms down to
/// `var^(-order)`. Errors when `f` grows at infinity, i.e. the numerator
/// degree in `var` exceeds the denominator degree.
pub fn expand_at_infinity(
    f: &RationalFunction,
    var: Var,
    order: u32,
) -> Result<Series, SymError> {
    let dn = f.num().degree_in(var);
    let dd = f.den().degree_in(var);
    if dn > dd {
        return Err(SymError::PoleAtInfinity {
            var: f.registry().name(var).to_owned(),
            num_deg: dn,
            den_deg: dd,
        });
    }
    Ok(Series::from_rf(f, var, -(order as i64)))
}

impl fmt::Display for Series {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.reg.name(self.var);
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if first {
                first = false;
            } else {
                write!(out, " + ")?;
            }
            let coef = match c.as_constant() {
                Some(q) => q.to_string(),
                None => format!("({})", c),
            };
            match e {
                0 => write!(out, "{}", coef)?,
                1 => write!(out, "{}*{}", coef, name)?,
                _ => write!(out, "{}*{}^{}", coef, name, e)?,
            }
        }
        if first {
            write!(out, "0")?;
        }
        if !self.is_exact() {
            write!(out, " + O({}^{})", name, self.lo - 1)?;
        }
        Ok(())
    }
}
