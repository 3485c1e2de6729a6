//! Reduced fractions of multivariate polynomials: the elements of a rational
//! function field presented over an exact base.

use crate::error::{Error, Result};
use crate::fields::poly::{gcd, Coef, CoefCtx, MPoly};

/// A rational function in canonical form: `gcd(num, den) = 1` and the
/// denominator has lex-leading coefficient 1. Zero is `0/1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        if num.is_zero() {
            return Ok(RatFunc {
                den: MPoly::one(num.ctx().clone(), num.nvars()),
                num,
            });
        }
        let g = gcd(&num, &den);
        let mut num = num.exact_div(&g).expect("gcd divides");
        let mut den = den.exact_div(&g).expect("gcd divides");
        let lc = den.leading().expect("nonzero").1.clone();
        if !lc.is_one() {
            let i = lc.inv().expect("nonzero leading coefficient");
            num = num.mul_coef(&i);
            den = den.mul_coef(&i);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: MPoly) -> RatFunc {
        let one = MPoly::one(p.ctx().clone(), p.nvars());
        RatFunc { num: p, den: one }
    }

    pub fn zero(ctx: CoefCtx, nvars: usize) -> RatFunc {
        RatFunc::from_poly(MPoly::zero(ctx, nvars))
    }

    pub fn one(ctx: CoefCtx, nvars: usize) -> RatFunc {
        RatFunc::from_poly(MPoly::one(ctx, nvars))
    }

    pub fn var(ctx: CoefCtx, nvars: usize, idx: usize) -> RatFunc {
        RatFunc::from_poly(MPoly::var(ctx, nvars, idx))
    }

    pub fn constant(ctx: CoefCtx, nvars: usize, c: Coef) -> RatFunc {
        RatFunc::from_poly(MPoly::constant(ctx, nvars, c))
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn ctx(&self) -> &CoefCtx {
        self.num.ctx()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Coef> {
        if self.num.is_constant() && self.den.is_constant() {
            let n = self.num.constant_value()?;
            let d = self.den.constant_value()?;
            n.div(&d).ok()
        } else {
            None
        }
    }

    /// Decomposes a Laurent monomial `c * x^e` into its coefficient and
    /// (signed) exponent vector, if the fraction has that shape.
    pub fn as_monomial(&self) -> Option<(Coef, Vec<i64>)> {
        let (cn, en) = self.num.single_term()?;
        let (cd, ed) = self.den.single_term()?;
        let exps = en
            .iter()
            .zip(&ed)
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect();
        Some((cn.div(&cd).ok()?, exps))
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        if other.is_zero() {
            return Err(Error::invalid("division by zero"));
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::one(self.ctx().clone(), self.nvars()).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = RatFunc::one(self.ctx().clone(), self.nvars());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    pub fn derivative(&self, var: usize) -> RatFunc {
        let num = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        let den = self.den.mul(&self.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn pth_root(&self, p: u64) -> Result<RatFunc> {
        RatFunc::new(self.num.pth_root(p)?, self.den.pth_root(p)?)
    }

    pub fn permute_vars(&self, perm: &[usize]) -> RatFunc {
        RatFunc::new(self.num.permute_vars(perm), self.den.permute_vars(perm))
            .expect("nonzero denominator")
    }

    pub fn display(&self, names: &[&str]) -> String {
        if self.is_polynomial() {
            // fold the constant denominator into the numerator for display
            let d = self.den.constant_value().expect("constant denominator");
            if d.is_one() {
                return self.num.display(names);
            }
            let i = d.inv().expect("nonzero");
            return self.num.mul_coef(&i).display(names);
        }
        let n = self.num.display(names);
        let d = self.den.display(names);
        let n = if self.num.num_terms() > 1 {
            format!("({n})")
        } else {
            n
        };
        // the denominator needs parentheses unless it is a single atom
        let d = if d.contains(['*', '+', '/']) || d[1..].contains('-') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::fq::FqCtx;

    #[test]
    fn reduction_to_canonical_form() {
        let f2 = FqCtx::prime(2).unwrap();
        let ctx = CoefCtx::Fq(f2);
        // x / (x^2 + x) = 1 / (x + 1) over F2
        let x = MPoly::var(ctx.clone(), 1, 0);
        let den = x.mul(&x).add(&x);
        let r = RatFunc::new(x.clone(), den).unwrap();
        assert_eq!(r.num(), &MPoly::one(ctx.clone(), 1));
        assert_eq!(r.den(), &x.add(&MPoly::one(ctx, 1)));
        assert_eq!(r.display(&["x"]), "1/(x+1)");
    }

    #[test]
    fn field_operations() {
        let ctx = CoefCtx::Rat;
        let x = RatFunc::var(ctx.clone(), 2, 0);
        let y = RatFunc::var(ctx.clone(), 2, 1);
        let s = x.add(&y);
        let q = s.div(&x).unwrap();
        assert_eq!(q.mul(&x), s);
        let back = q.inv().unwrap().inv().unwrap();
        assert_eq!(back, q);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn monomial_shape_detection() {
        let ctx = CoefCtx::Rat;
        let x = RatFunc::var(ctx.clone(), 2, 0);
        let y = RatFunc::var(ctx.clone(), 2, 1);
        let m = x.pow(3).unwrap().div(&y).unwrap();
        let (c, e) = m.as_monomial().unwrap();
        assert!(c.is_one());
        assert_eq!(e, vec![3, -1]);
        assert!(x.add(&y).as_monomial().is_none());
    }

    #[test]
    fn quotient_rule() {
        let ctx = CoefCtx::Rat;
        let x = RatFunc::var(ctx.clone(), 1, 0);
        let one = RatFunc::one(ctx, 1);
        // d/dx (1/x) = -1/x^2
        let f = one.div(&x).unwrap();
        let d = f.derivative(0);
        assert_eq!(d, one.div(&x.mul(&x)).unwrap().neg());
    }
}
