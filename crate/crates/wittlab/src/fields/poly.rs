//! Sparse multivariate polynomials over an exact coefficient field
//! (a finite field or the rationals), with exact division and gcd.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::fields::fq::{FqCtx, FqElem};

/// Coefficient field of a polynomial ring: a finite field or `Q`.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefCtx {
    Fq(Arc<FqCtx>),
    Rat,
}

impl CoefCtx {
    pub fn zero(&self) -> Coef {
        match self {
            CoefCtx::Fq(ctx) => Coef::Fq(ctx.zero()),
            CoefCtx::Rat => Coef::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Coef {
        match self {
            CoefCtx::Fq(ctx) => Coef::Fq(ctx.one()),
            CoefCtx::Rat => Coef::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, n: i64) -> Coef {
        match self {
            CoefCtx::Fq(ctx) => Coef::Fq(ctx.from_i64(n)),
            CoefCtx::Rat => Coef::Rat(BigRational::from_integer(n.into())),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoefCtx::Fq(ctx) => ctx.p(),
            CoefCtx::Rat => 0,
        }
    }
}

/// A coefficient: an element of the ring's coefficient field.
#[derive(Clone, Debug, PartialEq)]
pub enum Coef {
    Fq(FqElem),
    Rat(BigRational),
}

impl Coef {
    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Fq(a) => a.is_zero(),
            Coef::Rat(a) => a.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coef::Fq(a) => a.is_one(),
            Coef::Rat(a) => a.is_one(),
        }
    }

    pub fn add(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Fq(a), Coef::Fq(b)) => Coef::Fq(a.add(b)),
            (Coef::Rat(a), Coef::Rat(b)) => Coef::Rat(a + b),
            _ => unreachable!("mixed coefficient kinds"),
        }
    }

    pub fn sub(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Fq(a), Coef::Fq(b)) => Coef::Fq(a.sub(b)),
            (Coef::Rat(a), Coef::Rat(b)) => Coef::Rat(a - b),
            _ => unreachable!("mixed coefficient kinds"),
        }
    }

    pub fn neg(&self) -> Coef {
        match self {
            Coef::Fq(a) => Coef::Fq(a.neg()),
            Coef::Rat(a) => Coef::Rat(-a),
        }
    }

    pub fn mul(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Fq(a), Coef::Fq(b)) => Coef::Fq(a.mul(b)),
            (Coef::Rat(a), Coef::Rat(b)) => Coef::Rat(a * b),
            _ => unreachable!("mixed coefficient kinds"),
        }
    }

    pub fn inv(&self) -> Result<Coef> {
        match self {
            Coef::Fq(a) => Ok(Coef::Fq(a.inv()?)),
            Coef::Rat(a) => {
                if a.is_zero() {
                    Err(Error::invalid("division by zero"))
                } else {
                    Ok(Coef::Rat(a.recip()))
                }
            }
        }
    }

    pub fn div(&self, other: &Coef) -> Result<Coef> {
        Ok(self.mul(&other.inv()?))
    }

    /// The unique field element whose `p`-th power is `self` (finite
    /// coefficients only; the prime field and its extensions are perfect).
    pub fn pth_root(&self) -> Result<Coef> {
        match self {
            Coef::Fq(a) => Ok(Coef::Fq(a.pth_root())),
            Coef::Rat(_) => Err(Error::unsupported("p-th roots need positive characteristic")),
        }
    }
}

/// A sparse multivariate polynomial. Terms map an exponent vector
/// (one entry per ring variable) to a nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    ctx: CoefCtx,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Coef>,
}

impl MPoly {
    pub fn zero(ctx: CoefCtx, nvars: usize) -> MPoly {
        MPoly {
            ctx,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: CoefCtx, nvars: usize, c: Coef) -> MPoly {
        let mut p = MPoly::zero(ctx, nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(ctx: CoefCtx, nvars: usize) -> MPoly {
        let c = ctx.one();
        MPoly::constant(ctx, nvars, c)
    }

    pub fn var(ctx: CoefCtx, nvars: usize, idx: usize) -> MPoly {
        assert!(idx < nvars);
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        let c = ctx.one();
        let mut p = MPoly::zero(ctx, nvars);
        p.terms.insert(exps, c);
        p
    }

    pub fn monomial(ctx: CoefCtx, exps: Vec<u32>, c: Coef) -> MPoly {
        let nvars = exps.len();
        let mut p = MPoly::zero(ctx, nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn ctx(&self) -> &CoefCtx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Coef)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Coef> {
        if self.is_zero() {
            return Some(self.ctx.zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    /// The single `(coefficient, exponents)` term, if the polynomial has
    /// exactly one.
    pub fn single_term(&self) -> Option<(Coef, Vec<u32>)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), e.clone()))
        } else {
            None
        }
    }

    fn insert_add(&mut self, exps: Vec<u32>, c: Coef) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.ctx.clone(), self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                out.insert_add(exps, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_coef(&self, c: &Coef) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.ctx.clone(), self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.ctx.clone(), self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading term under lexicographic exponent order.
    pub fn leading(&self) -> Option<(&Vec<u32>, &Coef)> {
        self.terms.iter().next_back()
    }

    /// Divides through by the lex-leading coefficient, giving the canonical
    /// representative of the associate class.
    pub fn monic(&self) -> MPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                if lc.is_one() {
                    self.clone()
                } else {
                    let i = lc.inv().expect("leading coefficient is nonzero");
                    self.mul_coef(&i)
                }
            }
        }
    }

    /// Exact division; returns `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        if d.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.ctx.clone(), self.nvars);
        let (dle, dlc) = {
            let (e, c) = d.leading().unwrap();
            (e.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rle, rlc) = {
                let (e, c) = rem.leading().unwrap();
                (e.clone(), c.clone())
            };
            let mut exps = Vec::with_capacity(self.nvars);
            for (&a, &b) in rle.iter().zip(&dle) {
                if a < b {
                    return None;
                }
                exps.push(a - b);
            }
            let c = rlc.div(&dlc).ok()?;
            let t = MPoly::monomial(self.ctx.clone(), exps, c);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    pub fn deg_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Dense coefficient list with respect to one variable; entry `k` is the
    /// coefficient of `var^k`, itself a polynomial with `var`-degree zero.
    pub fn as_univariate(&self, var: usize) -> Vec<MPoly> {
        let deg = match self.deg_in(var) {
            None => return Vec::new(),
            Some(d) => d as usize,
        };
        let mut out = vec![MPoly::zero(self.ctx.clone(), self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut stripped = e.clone();
            stripped[var] = 0;
            out[k].insert_add(stripped, c.clone());
        }
        out
    }

    pub fn from_univariate(ctx: CoefCtx, nvars: usize, var: usize, coeffs: &[MPoly]) -> MPoly {
        let mut out = MPoly::zero(ctx, nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                let mut exps = e.clone();
                exps[var] += k as u32;
                out.insert_add(exps, v.clone());
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero(self.ctx.clone(), self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let k = self.ctx.from_i64(e[var] as i64);
            let mut exps = e.clone();
            exps[var] -= 1;
            out.insert_add(exps, c.mul(&k));
        }
        out
    }

    /// The polynomial `r` with `r^p = self`, when every exponent is divisible
    /// by `p` (valid over perfect coefficient fields of characteristic `p`).
    pub fn pth_root(&self, p: u64) -> Result<MPoly> {
        if self.ctx.characteristic() != p {
            return Err(Error::unsupported("p-th root requires characteristic p"));
        }
        let mut out = MPoly::zero(self.ctx.clone(), self.nvars);
        for (e, c) in &self.terms {
            let mut exps = Vec::with_capacity(self.nvars);
            for &x in e {
                if x as u64 % p != 0 {
                    return Err(Error::invalid(format!(
                        "exponent {x} is not divisible by {p}"
                    )));
                }
                exps.push((x as u64 / p) as u32);
            }
            out.insert_add(exps, c.pth_root()?);
        }
        Ok(out)
    }

    /// Renames variables: the exponent of variable `i` moves to `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> MPoly {
        assert_eq!(perm.len(), self.nvars);
        let mut out = MPoly::zero(self.ctx.clone(), self.nvars);
        for (e, c) in &self.terms {
            let mut exps = vec![0; self.nvars];
            for (i, &x) in e.iter().enumerate() {
                exps[perm[i]] = x;
            }
            out.insert_add(exps, c.clone());
        }
        out
    }

    /// Evaluates at a point with finite-field coordinates.
    pub fn eval_fq(&self, point: &[FqElem]) -> FqElem {
        let ctx = match &self.ctx {
            CoefCtx::Fq(c) => c,
            CoefCtx::Rat => panic!("eval_fq on rational coefficients"),
        };
        let mut acc = ctx.zero();
        for (e, c) in &self.terms {
            let mut t = match c {
                Coef::Fq(v) => v.clone(),
                Coef::Rat(_) => unreachable!(),
            };
            for (i, &x) in e.iter().enumerate() {
                t = t.mul(&point[i].pow(x as u64));
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Content with respect to one variable: the gcd of the `var`-coefficients.
    pub fn content_in(&self, var: usize) -> MPoly {
        let coeffs = self.as_univariate(var);
        let mut g = MPoly::zero(self.ctx.clone(), self.nvars);
        for c in &coeffs {
            g = gcd(&g, c);
        }
        g
    }

    pub fn display(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            let coef_str = match c {
                Coef::Fq(v) => format!("{v}"),
                Coef::Rat(v) => format!("{v}"),
            };
            let coef_is_one = c.is_one();
            let has_vars = e.iter().any(|&x| x > 0);
            if !coef_is_one || !has_vars {
                if coef_str.contains('+') || (coef_str.contains('/') && has_vars) {
                    factors.push(format!("({coef_str})"));
                } else {
                    factors.push(coef_str);
                }
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], x)),
                }
            }
            parts.push(factors.join("*"));
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                let _ = write!(out, "-{rest}");
            } else {
                let _ = write!(out, "+{p}");
            }
        }
        out
    }
}

/// Pseudo-remainder of dense univariate polynomials with `MPoly` coefficients.
fn pseudo_rem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let db = b.len() - 1;
    let lc_b = b[db].clone();
    let mut r: Vec<MPoly> = a.to_vec();
    loop {
        while r.last().is_some_and(MPoly::is_zero) {
            r.pop();
        }
        if r.len() <= db {
            return r;
        }
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next = vec![MPoly::zero(lr.ctx().clone(), lr.nvars()); dr];
        #[allow(clippy::needless_range_loop)]
        for i in 0..dr {
            let mut t = r[i].mul(&lc_b);
            if i >= shift && i - shift <= db {
                t = t.sub(&lr.mul(&b[i - shift]));
            }
            next[i] = t;
        }
        r = next;
    }
}

/// Gcd by primitive pseudo-remainder sequences, recursing on the variables.
/// The result is normalized to have lex-leading coefficient 1.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(a.ctx().clone(), a.nvars());
    }
    // main variable: highest index where either polynomial has positive degree
    let var = (0..a.nvars())
        .rev()
        .find(|&v| a.deg_in(v).unwrap_or(0) > 0 || b.deg_in(v).unwrap_or(0) > 0)
        .expect("non-constant polynomial has a variable");
    let da = a.deg_in(var).unwrap_or(0);
    let db = b.deg_in(var).unwrap_or(0);
    if da == 0 {
        return gcd(a, &b.content_in(var));
    }
    if db == 0 {
        return gcd(&a.content_in(var), b);
    }
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let cg = gcd(&ca, &cb);

    let mut r0 = pa.as_univariate(var);
    let mut r1 = pb.as_univariate(var);
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    loop {
        let mut r2 = pseudo_rem(&r0, &r1);
        while r2.last().is_some_and(MPoly::is_zero) {
            r2.pop();
        }
        if r2.is_empty() {
            break;
        }
        // primitive part
        let as_poly = MPoly::from_univariate(a.ctx().clone(), a.nvars(), var, &r2);
        let cont = as_poly.content_in(var);
        let prim = as_poly.exact_div(&cont).expect("content divides");
        r0 = r1;
        r1 = prim.as_univariate(var);
    }
    let g = MPoly::from_univariate(a.ctx().clone(), a.nvars(), var, &r1);
    let g = g.exact_div(&g.content_in(var)).expect("content divides");
    g.mul(&cg).monic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat_ctx() -> CoefCtx {
        CoefCtx::Rat
    }

    fn p(ctx: &CoefCtx, terms: &[(i64, &[u32])]) -> MPoly {
        let nvars = terms[0].1.len();
        let mut out = MPoly::zero(ctx.clone(), nvars);
        for (c, e) in terms {
            out = out.add(&MPoly::monomial(ctx.clone(), e.to_vec(), ctx.from_i64(*c)));
        }
        out
    }

    #[test]
    fn exact_division_roundtrip() {
        let ctx = rat_ctx();
        let a = p(&ctx, &[(1, &[1, 0]), (1, &[0, 1])]); // x + y
        let b = p(&ctx, &[(1, &[1, 0]), (-1, &[0, 1])]); // x - y
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        let c = p(&ctx, &[(1, &[1, 1])]);
        assert!(a.exact_div(&c).is_none());
    }

    #[test]
    fn gcd_univariate_over_q() {
        let ctx = rat_ctx();
        // (x+1)^2 (x-1) and (x+1)(x-1): gcd = (x+1)(x-1) up to normalization
        let xp1 = p(&ctx, &[(1, &[1]), (1, &[0])]);
        let xm1 = p(&ctx, &[(1, &[1]), (-1, &[0])]);
        let a = xp1.mul(&xp1).mul(&xm1);
        let b = xp1.mul(&xm1);
        let g = gcd(&a, &b);
        assert_eq!(g, xp1.mul(&xm1).monic());
    }

    #[test]
    fn gcd_multivariate_over_fq() {
        let f3 = FqCtx::prime(3).unwrap();
        let ctx = CoefCtx::Fq(f3);
        // common factor (x + y)
        let f = p(&ctx, &[(1, &[1, 0]), (1, &[0, 1])]);
        let a = f.mul(&p(&ctx, &[(1, &[2, 0]), (2, &[0, 0])]));
        let b = f.mul(&p(&ctx, &[(1, &[0, 1]), (1, &[0, 0])]));
        let g = gcd(&a, &b);
        assert_eq!(g, f.monic());
        assert!(a.exact_div(&g).is_some());
        assert!(b.exact_div(&g).is_some());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let ctx = rat_ctx();
        let a = p(&ctx, &[(1, &[1, 0]), (1, &[0, 0])]);
        let b = p(&ctx, &[(1, &[0, 1]), (2, &[0, 0])]);
        let g = gcd(&a, &b);
        assert!(g.is_constant());
        assert!(g.constant_value().unwrap().is_one());
    }

    #[test]
    fn pth_root_of_polynomial() {
        let f3 = FqCtx::prime(3).unwrap();
        let ctx = CoefCtx::Fq(f3);
        // x^6 + 2x^3 over F3 has cube root x^2 + 2x
        let a = p(&ctx, &[(1, &[6]), (2, &[3])]);
        let r = a.pth_root(3).unwrap();
        assert_eq!(r, p(&ctx, &[(1, &[2]), (2, &[1])]));
        assert_eq!(r.pow(3), a);
        // odd exponent fails
        let b = p(&ctx, &[(1, &[1])]);
        assert!(b.pth_root(3).is_err());
    }

    #[test]
    fn derivative_and_display() {
        let ctx = rat_ctx();
        let a = p(&ctx, &[(1, &[2, 0]), (3, &[1, 1]), (-2, &[0, 0])]);
        let d = a.derivative(0);
        assert_eq!(d, p(&ctx, &[(2, &[1, 0]), (3, &[0, 1])]));
        assert_eq!(a.display(&["x", "y"]), "x^2+3*x*y-2");
    }
}
