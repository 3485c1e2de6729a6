//! Finite field arithmetic: prime fields `F_p` and explicit extensions
//! `F_p[y]/(m)` with a caller-supplied irreducible modulus.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Hard cap on field size for the enumeration-based routines
/// (square roots, discrete logs, least nonsquare).
const ENUMERATION_CAP: u64 = 1 << 20;

/// Shared context for a finite field.
///
/// Elements are residue polynomials modulo `modulus`, a monic irreducible
/// polynomial over `F_p` stored constant-coefficient first. Prime fields use
/// the degree-one modulus `y`, so their residues are constants.
pub struct FqCtx {
    p: u64,
    modulus: Vec<u64>,
    var: String,
    q: u64,
    dlog_table: OnceLock<(Vec<u64>, HashMap<Vec<u64>, u64>)>,
}

impl PartialEq for FqCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus && self.var == other.var
    }
}
impl Eq for FqCtx {}

impl fmt::Debug for FqCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqCtx(q={}, p={})", self.q, self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Trims trailing zero coefficients.
fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_deg(v: &[u64]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

fn poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

/// Remainder of `a` modulo monic `m` over `F_p`.
fn poly_rem(p: u64, a: &[u64], m: &[u64]) -> Vec<u64> {
    let md = m.len() - 1;
    let mut r = a.to_vec();
    while let Some(rd) = poly_deg(&r) {
        if rd < md {
            break;
        }
        let lead = r[rd];
        let shift = rd - md;
        for (k, &mc) in m.iter().enumerate() {
            let idx = k + shift;
            r[idx] = (r[idx] + p * p - (lead * mc) % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

/// Extended Euclid over `F_p[y]`: returns `(g, s)` with `s*a = g (mod m)`,
/// `g` monic.
fn poly_ext_gcd(p: u64, a: &[u64], m: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut r0 = m.to_vec();
    let mut r1 = poly_trim(a.to_vec());
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // divide r0 by r1
        let d1 = r1.len() - 1;
        let inv_lead = mod_inv(p, r1[d1]);
        let mut rem = r0.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(d1)];
        while let Some(rd) = poly_deg(&rem) {
            if rd < d1 {
                break;
            }
            let c = (rem[rd] * inv_lead) % p;
            let shift = rd - d1;
            quot[shift] = c;
            for (k, &rc) in r1.iter().enumerate() {
                let idx = k + shift;
                rem[idx] = (rem[idx] + p * p - (c * rc) % p) % p;
            }
            rem = poly_trim(rem);
        }
        let quot = poly_trim(quot);
        // s2 = s0 - quot*s1
        let qs = poly_mul(p, &quot, &s1);
        let n = s0.len().max(qs.len());
        let mut s2 = vec![0u64; n];
        for (i, v) in s2.iter_mut().enumerate() {
            let x = s0.get(i).copied().unwrap_or(0);
            let y = qs.get(i).copied().unwrap_or(0);
            *v = (x + p - y % p) % p;
        }
        let s2 = poly_trim(s2);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
    }
    // make g monic
    let lead = *r0.last().expect("gcd of nonzero inputs");
    let il = mod_inv(p, lead);
    let g = r0.iter().map(|&c| (c * il) % p).collect();
    let s = s0.iter().map(|&c| (c * il) % p).collect();
    (g, s)
}

fn mod_inv(p: u64, a: u64) -> u64 {
    // Fermat; p prime and a nonzero mod p.
    mod_pow(p, a % p, p - 2)
}

fn mod_pow(p: u64, mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl FqCtx {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<FqCtx>> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(Arc::new(FqCtx {
            p,
            modulus: vec![0, 1],
            var: "y".into(),
            q: p,
            dlog_table: OnceLock::new(),
        }))
    }

    /// The extension `F_p[var]/(modulus)`; the modulus is normalized to be
    /// monic and checked for irreducibility by trial division.
    pub fn extension(p: u64, modulus: Vec<u64>, var: &str) -> Result<Arc<FqCtx>> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if p > (1 << 20) {
            return Err(Error::invalid("characteristic too large for an extension field"));
        }
        let mut m = poly_trim(modulus.into_iter().map(|c| c % p).collect());
        let deg = match poly_deg(&m) {
            Some(d) if d >= 2 => d,
            _ => return Err(Error::invalid("extension modulus must have degree >= 2")),
        };
        let il = mod_inv(p, m[deg]);
        for c in &mut m {
            *c = *c * il % p;
        }
        let q = p
            .checked_pow(deg as u32)
            .filter(|&q| q <= ENUMERATION_CAP)
            .ok_or_else(|| Error::invalid("extension field too large"))?;
        // irreducibility: no monic divisor of degree 1..=deg/2
        let mut budget: u64 = 0;
        for d in 1..=deg / 2 {
            budget = budget.saturating_add(p.pow(d as u32));
        }
        if budget > 200_000 {
            return Err(Error::invalid("modulus too large to verify irreducibility"));
        }
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut cand = vec![0u64; d + 1];
                cand[d] = 1;
                let mut k = idx;
                for c in cand.iter_mut().take(d) {
                    *c = k % p;
                    k /= p;
                }
                if poly_rem(p, &m, &cand).is_empty() {
                    return Err(Error::invalid(format!(
                        "modulus is reducible (has a divisor of degree {d})"
                    )));
                }
            }
        }
        Ok(Arc::new(FqCtx {
            p,
            modulus: m,
            var: var.to_string(),
            q,
            dlog_table: OnceLock::new(),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree of the field over its prime subfield.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree() == 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn zero(self: &Arc<Self>) -> FqElem {
        FqElem {
            ctx: Arc::clone(self),
            c: vec![0; self.degree()],
        }
    }

    pub fn one(self: &Arc<Self>) -> FqElem {
        self.from_u64(1)
    }

    pub fn from_u64(self: &Arc<Self>, n: u64) -> FqElem {
        let mut c = vec![0; self.degree()];
        c[0] = n % self.p;
        FqElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> FqElem {
        let p = self.p as i64;
        self.from_u64(n.rem_euclid(p) as u64)
    }

    /// Residue class of the extension variable (for prime fields this is 0).
    pub fn gen(self: &Arc<Self>) -> FqElem {
        let mut c = vec![0; self.degree()];
        if self.degree() >= 2 {
            c[1] = 1;
        }
        FqElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    /// Builds an element from residue-polynomial coefficients, constant first.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u64]) -> FqElem {
        let r = poly_rem(self.p, &poly_trim(coeffs.iter().map(|&c| c % self.p).collect()), &self.modulus);
        let mut c = vec![0; self.degree()];
        c[..r.len()].copy_from_slice(&r);
        FqElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    /// All field elements in the canonical counting order: the element of
    /// index `i` has residue coefficients given by the base-`p` digits of `i`.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FqElem> {
        let ctx = Arc::clone(self);
        (0..self.q).map(move |i| ctx.element_by_index(i))
    }

    pub fn element_by_index(self: &Arc<Self>, i: u64) -> FqElem {
        let mut c = vec![0; self.degree()];
        let mut k = i;
        for digit in c.iter_mut() {
            *digit = k % self.p;
            k /= self.p;
        }
        FqElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    /// The first nonsquare in counting order; error for even `q` (where every
    /// element is a square).
    pub fn least_nonsquare(self: &Arc<Self>) -> Result<FqElem> {
        if self.p == 2 {
            return Err(Error::unsupported(
                "every element of a characteristic-2 finite field is a square",
            ));
        }
        self.elements()
            .find(|e| !e.is_zero() && !e.is_square())
            .ok_or_else(|| Error::invalid("no nonsquare found"))
    }

    fn dlog_data(self: &Arc<Self>) -> &(Vec<u64>, HashMap<Vec<u64>, u64>) {
        self.dlog_table.get_or_init(|| {
            let gen = self
                .elements()
                .find(|e| !e.is_zero() && e.multiplicative_order() == self.q - 1)
                .expect("finite field has a primitive element");
            let mut table = HashMap::new();
            let mut acc = self.one();
            for k in 0..self.q - 1 {
                table.insert(acc.c.clone(), k);
                acc = acc.mul(&gen);
            }
            (gen.c.clone(), table)
        })
    }

    /// A fixed multiplicative generator (the first primitive element in
    /// counting order).
    pub fn generator(self: &Arc<Self>) -> FqElem {
        let c = self.dlog_data().0.clone();
        FqElem {
            ctx: Arc::clone(self),
            c,
        }
    }

    /// Discrete log with respect to [`FqCtx::generator`].
    pub fn dlog(self: &Arc<Self>, a: &FqElem) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::invalid("discrete log of zero"));
        }
        Ok(*self.dlog_data().1.get(&a.c).expect("element of this field"))
    }
}

/// An element of a finite field, in canonical reduced form.
#[derive(Clone, PartialEq, Eq)]
pub struct FqElem {
    ctx: Arc<FqCtx>,
    /// Residue coefficients, constant first, length = field degree.
    c: Vec<u64>,
}

impl FqElem {
    pub fn ctx(&self) -> &Arc<FqCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    fn lift(&self) -> Vec<u64> {
        poly_trim(self.c.clone())
    }

    fn from_raw(ctx: &Arc<FqCtx>, raw: Vec<u64>) -> FqElem {
        let r = poly_rem(ctx.p, &raw, &ctx.modulus);
        let mut c = vec![0; ctx.degree()];
        c[..r.len()].copy_from_slice(&r);
        FqElem {
            ctx: Arc::clone(ctx),
            c,
        }
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        debug_assert_eq!(self.ctx, other.ctx);
        let p = self.ctx.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FqElem {
            ctx: Arc::clone(&self.ctx),
            c,
        }
    }

    pub fn sub(&self, other: &FqElem) -> FqElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FqElem {
        let p = self.ctx.p;
        let c = self.c.iter().map(|&a| (p - a) % p).collect();
        FqElem {
            ctx: Arc::clone(&self.ctx),
            c,
        }
    }

    pub fn mul(&self, other: &FqElem) -> FqElem {
        debug_assert_eq!(self.ctx, other.ctx);
        FqElem::from_raw(&self.ctx, poly_mul(self.ctx.p, &self.lift(), &other.lift()))
    }

    pub fn inv(&self) -> Result<FqElem> {
        if self.is_zero() {
            return Err(Error::invalid("division by zero"));
        }
        let (_, s) = poly_ext_gcd(self.ctx.p, &self.lift(), &self.ctx.modulus);
        Ok(FqElem::from_raw(&self.ctx, s))
    }

    pub fn div(&self, other: &FqElem) -> Result<FqElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut acc = self.ctx.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn multiplicative_order(&self) -> u64 {
        assert!(!self.is_zero());
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_one() {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }

    /// Square test: Euler's criterion for odd `q`; in characteristic 2 the
    /// Frobenius is onto, so every element is a square.
    pub fn is_square(&self) -> bool {
        assert!(!self.is_zero(), "square test on zero");
        if self.ctx.p == 2 {
            return true;
        }
        self.pow((self.ctx.q - 1) / 2).is_one()
    }

    /// First square root in counting order, if one exists.
    pub fn sqrt(&self) -> Option<FqElem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        self.ctx.elements().find(|b| &b.mul(b) == self)
    }

    /// The unique `r` with `r^p = a`, namely `a^(p^(k-1))` for `q = p^k`.
    pub fn pth_root(&self) -> FqElem {
        let k = self.ctx.degree() as u32;
        if k == 1 {
            return self.clone();
        }
        self.pow(self.ctx.p.pow(k - 1))
    }

    /// Index of the element in the canonical counting order.
    pub fn index(&self) -> u64 {
        let mut acc = 0u64;
        for &d in self.c.iter().rev() {
            acc = acc * self.ctx.p + d;
        }
        acc
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.is_prime_field() || self.c[1..].iter().all(|&x| x == 0) {
            return write!(f, "{}", self.c[0]);
        }
        let var = &self.ctx.var;
        let mut parts = Vec::new();
        for (i, &coef) in self.c.iter().enumerate().rev() {
            if coef == 0 {
                continue;
            }
            let part = match i {
                0 => format!("{coef}"),
                1 if coef == 1 => var.clone(),
                1 => format!("{coef}*{var}"),
                _ if coef == 1 => format!("{var}^{i}"),
                _ => format!("{coef}*{var}^{i}"),
            };
            parts.push(part);
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonprime_characteristic() {
        assert!(FqCtx::prime(9).is_err());
        assert!(FqCtx::prime(1).is_err());
        assert!(FqCtx::extension(4, vec![1, 1, 1], "y").is_err());
    }

    #[test]
    fn rejects_reducible_modulus() {
        // y^2 + 1 = (y+1)^2 over F2
        assert!(FqCtx::extension(2, vec![1, 0, 1], "y").is_err());
        // y^2 - 1 over F5
        assert!(FqCtx::extension(5, vec![4, 0, 1], "y").is_err());
    }

    #[test]
    fn accepts_irreducible_modulus() {
        // y^2 + 1 over F3: no root among 0,1,2
        let f9 = FqCtx::extension(3, vec![1, 0, 1], "y").unwrap();
        assert_eq!(f9.q(), 9);
        for e in [0u64, 1, 2] {
            let r = f9.from_u64(e);
            let val = r.mul(&r).add(&f9.one());
            assert!(!val.is_zero(), "y^2+1 must have no root at {e}");
        }
    }

    #[test]
    fn field_axioms_smoke() {
        let f9 = FqCtx::extension(3, vec![1, 0, 1], "y").unwrap();
        for a in f9.elements() {
            if a.is_zero() {
                continue;
            }
            let inv = a.inv().unwrap();
            assert!(a.mul(&inv).is_one());
        }
    }

    #[test]
    fn squares_of_f5_enumerate_correctly() {
        let f5 = FqCtx::prime(5).unwrap();
        // squares of F5 are {0,1,4}: brute-force enumeration
        let squares: Vec<u64> = f5.elements().map(|e| e.mul(&e).index()).collect();
        for a in f5.elements() {
            if a.is_zero() {
                continue;
            }
            let expected = squares.contains(&a.index());
            assert_eq!(a.is_square(), expected, "element {}", a.index());
        }
        assert!(f5.from_u64(4).is_square());
        assert!(!f5.from_u64(2).is_square());
        assert_eq!(f5.least_nonsquare().unwrap().index(), 2);
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f9 = FqCtx::extension(3, vec![1, 0, 1], "y").unwrap();
        for a in f9.elements() {
            let r = a.pth_root();
            assert_eq!(r.pow(3), a);
        }
        // F9: the root is a^3
        let a = f9.gen().add(&f9.one());
        assert_eq!(a.pth_root(), a.pow(3));
    }

    #[test]
    fn dlog_consistency() {
        let f7 = FqCtx::prime(7).unwrap();
        let g = f7.generator();
        for a in f7.elements() {
            if a.is_zero() {
                continue;
            }
            let k = f7.dlog(&a).unwrap();
            assert_eq!(g.pow(k), a);
            // mod-2 dlog detects nonsquares
            assert_eq!(k % 2 == 0, a.is_square());
        }
    }
}
