//! Field descriptors and exact element arithmetic.
//!
//! A descriptor names the algebraic home of a computation: a base field
//! (prime or extension finite field, the rationals, or a symbolic
//! algebraically closed field) optionally extended by one rational-function
//! layer or one ordered iterated-Laurent tower. Elements are kept in
//! canonical form so equality is structural.

mod dsl;
pub mod fq;
pub mod laurent;
pub mod poly;
pub mod ratfunc;

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
pub use fq::{FqCtx, FqElem};
pub use poly::{Coef, CoefCtx, MPoly};
pub use ratfunc::RatFunc;

/// The base layer of a field descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseKind {
    PrimeFinite(u64),
    FiniteExt { p: u64, modulus: Vec<u64>, var: String },
    Rationals,
    /// A symbolic algebraically closed field of the given characteristic
    /// (0 or a prime). Only unit bookkeeping is performed: every nonzero
    /// element is a square by fiat.
    SymbolicAc(u64),
}

/// A validated field descriptor.
#[derive(Clone, Debug)]
pub struct FieldDescriptor {
    kind: BaseKind,
    function_vars: Vec<String>,
    tower_uniformizers: Vec<String>,
    fq: Option<Arc<FqCtx>>,
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.function_vars == other.function_vars
            && self.tower_uniformizers == other.tower_uniformizers
    }
}

/// Which extension layer the descriptor carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Base,
    Function,
    Tower,
}

fn check_names(names: &[String], what: &str) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || !n.chars().next().unwrap().is_ascii_alphabetic() {
            return Err(Error::invalid(format!("bad {what} name {n:?}")));
        }
        if names[..i].contains(n) {
            return Err(Error::invalid(format!("duplicate {what} name {n:?}")));
        }
    }
    Ok(())
}

impl FieldDescriptor {
    pub fn new(kind: BaseKind) -> Result<FieldDescriptor> {
        let fq = match &kind {
            BaseKind::PrimeFinite(p) => Some(FqCtx::prime(*p)?),
            BaseKind::FiniteExt { p, modulus, var } => {
                Some(FqCtx::extension(*p, modulus.clone(), var)?)
            }
            BaseKind::Rationals => None,
            BaseKind::SymbolicAc(0) => None,
            BaseKind::SymbolicAc(p) => Some(FqCtx::prime(*p)?),
        };
        Ok(FieldDescriptor {
            kind,
            function_vars: Vec::new(),
            tower_uniformizers: Vec::new(),
            fq,
        })
    }

    pub fn rationals() -> FieldDescriptor {
        FieldDescriptor::new(BaseKind::Rationals).expect("rationals always construct")
    }

    pub fn prime_finite(p: u64) -> Result<FieldDescriptor> {
        FieldDescriptor::new(BaseKind::PrimeFinite(p))
    }

    pub fn symbolic_ac(char_p: u64) -> Result<FieldDescriptor> {
        FieldDescriptor::new(BaseKind::SymbolicAc(char_p))
    }

    /// Adds a rational-function layer `base(v1, ..., vd)`.
    pub fn with_function_vars<S: Into<String>>(mut self, vars: Vec<S>) -> Result<FieldDescriptor> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        if !self.tower_uniformizers.is_empty() {
            return Err(Error::invalid(
                "a descriptor carries at most one of a function layer and a tower",
            ));
        }
        if vars.is_empty() {
            return Err(Error::invalid("empty variable list"));
        }
        check_names(&vars, "variable")?;
        if let BaseKind::FiniteExt { var, .. } = &self.kind {
            if vars.contains(var) {
                return Err(Error::invalid("variable clashes with the extension variable"));
            }
        }
        self.function_vars = vars;
        Ok(self)
    }

    /// Adds an iterated Laurent tower `base((t1))...((td))`, innermost first.
    pub fn with_tower<S: Into<String>>(mut self, unifs: Vec<S>) -> Result<FieldDescriptor> {
        let unifs: Vec<String> = unifs.into_iter().map(Into::into).collect();
        if !self.function_vars.is_empty() {
            return Err(Error::invalid(
                "a descriptor carries at most one of a function layer and a tower",
            ));
        }
        if unifs.is_empty() {
            return Err(Error::invalid("empty uniformizer list"));
        }
        check_names(&unifs, "uniformizer")?;
        if let BaseKind::FiniteExt { var, .. } = &self.kind {
            if unifs.contains(var) {
                return Err(Error::invalid("uniformizer clashes with the extension variable"));
            }
        }
        self.tower_uniformizers = unifs;
        Ok(self)
    }

    /// Parses a descriptor from the textual grammar, e.g. `F3`,
    /// `F9=F3[y^2+1]`, `Q(x1,x2)`, `AC0((t1))((t2))`.
    pub fn parse(input: &str) -> Result<FieldDescriptor> {
        dsl::parse_descriptor(input)
    }

    pub fn kind(&self) -> &BaseKind {
        &self.kind
    }

    pub fn layer(&self) -> Layer {
        if !self.function_vars.is_empty() {
            Layer::Function
        } else if !self.tower_uniformizers.is_empty() {
            Layer::Tower
        } else {
            Layer::Base
        }
    }

    pub fn function_vars(&self) -> &[String] {
        &self.function_vars
    }

    pub fn tower_uniformizers(&self) -> &[String] {
        &self.tower_uniformizers
    }

    pub fn tower_depth(&self) -> usize {
        self.tower_uniformizers.len()
    }

    pub fn characteristic(&self) -> u64 {
        match &self.kind {
            BaseKind::PrimeFinite(p) | BaseKind::FiniteExt { p, .. } => *p,
            BaseKind::Rationals => 0,
            BaseKind::SymbolicAc(c) => *c,
        }
    }

    pub fn is_finite_base(&self) -> bool {
        matches!(
            self.kind,
            BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. }
        )
    }

    pub fn is_ac_base(&self) -> bool {
        matches!(self.kind, BaseKind::SymbolicAc(_))
    }

    pub fn is_rational_base(&self) -> bool {
        matches!(self.kind, BaseKind::Rationals)
    }

    /// The finite-field context, for finite base kinds (and the prime
    /// subfield for symbolic AC of positive characteristic).
    pub fn fq_ctx(&self) -> Option<&Arc<FqCtx>> {
        self.fq.as_ref()
    }

    pub fn base_q(&self) -> Option<u64> {
        if self.is_finite_base() {
            self.fq.as_ref().map(|c| c.q())
        } else {
            None
        }
    }

    /// Coefficient field used for explicitly presented polynomial data.
    pub fn coef_ctx(&self) -> CoefCtx {
        match &self.kind {
            BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. } => {
                CoefCtx::Fq(Arc::clone(self.fq.as_ref().expect("finite ctx")))
            }
            BaseKind::Rationals | BaseKind::SymbolicAc(0) => CoefCtx::Rat,
            BaseKind::SymbolicAc(_) => {
                CoefCtx::Fq(Arc::clone(self.fq.as_ref().expect("prime subfield ctx")))
            }
        }
    }

    /// The descriptor with all layers removed.
    pub fn base_descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            kind: self.kind.clone(),
            function_vars: Vec::new(),
            tower_uniformizers: Vec::new(),
            fq: self.fq.clone(),
        }
    }

    /// Removes the outermost (last) tower uniformizer.
    pub fn drop_outer_uniformizer(&self) -> FieldDescriptor {
        let mut d = self.clone();
        d.tower_uniformizers.pop();
        d
    }

    pub fn base_name(&self) -> String {
        match &self.kind {
            BaseKind::PrimeFinite(p) => format!("F{p}"),
            BaseKind::FiniteExt { p, modulus, var } => {
                let names: Vec<String> = modulus
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| match (i, c) {
                        (0, c) => format!("{c}"),
                        (1, 1) => var.clone(),
                        (1, c) => format!("{c}*{var}"),
                        (i, 1) => format!("{var}^{i}"),
                        (i, c) => format!("{c}*{var}^{i}"),
                    })
                    .collect();
                format!("F{p}[{}]", names.join("+"))
            }
            BaseKind::Rationals => "Q".into(),
            BaseKind::SymbolicAc(c) => format!("AC{c}"),
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base_name())?;
        if !self.function_vars.is_empty() {
            write!(f, "({})", self.function_vars.join(","))?;
        }
        for t in &self.tower_uniformizers {
            write!(f, "(({t}))")?;
        }
        Ok(())
    }
}

/// Parses and validates a field descriptor.
pub fn make_field(spec: &str) -> Result<FieldDescriptor> {
    FieldDescriptor::parse(spec)
}

/// A unit of a symbolic algebraically closed field: a nonzero tag in the
/// prime subfield (a rational in characteristic 0, a residue otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct AcUnit {
    char_p: u64,
    tag: BigRational,
}

impl AcUnit {
    pub fn new(char_p: u64, tag: BigRational) -> Result<AcUnit> {
        let tag = reduce_tag(char_p, tag)?;
        if tag.is_zero() {
            return Err(Error::invalid("zero is not a unit"));
        }
        Ok(AcUnit { char_p, tag })
    }

    pub fn characteristic(&self) -> u64 {
        self.char_p
    }

    pub fn tag(&self) -> &BigRational {
        &self.tag
    }

    pub fn mul(&self, other: &AcUnit) -> AcUnit {
        AcUnit::new(self.char_p, &self.tag * &other.tag).expect("product of units is a unit")
    }

    pub fn inv(&self) -> AcUnit {
        AcUnit::new(self.char_p, self.tag.recip()).expect("inverse of a unit")
    }

    pub fn neg(&self) -> AcUnit {
        AcUnit::new(self.char_p, -&self.tag).expect("negative of a unit is a unit")
    }
}

/// Reduces a rational tag into canonical form for the given characteristic.
fn reduce_tag(char_p: u64, tag: BigRational) -> Result<BigRational> {
    if char_p == 0 {
        return Ok(tag);
    }
    let p = BigInt::from(char_p);
    let den = tag.denom().mod_floor(&p);
    if den.is_zero() {
        return Err(Error::invalid(format!(
            "denominator divisible by the characteristic {char_p}"
        )));
    }
    let num = tag.numer().mod_floor(&p);
    // num * den^{-1} mod p via Fermat
    let den_u = den
        .to_u64_digits()
        .1
        .first()
        .copied()
        .unwrap_or(0);
    let num_u = num.to_u64_digits().1.first().copied().unwrap_or(0);
    let inv = mod_pow_u64(char_p, den_u, char_p - 2);
    let v = num_u * inv % char_p;
    Ok(BigRational::from_integer(v.into()))
}

fn mod_pow_u64(p: u64, mut b: u64, mut e: u64) -> u64 {
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

use num::Integer as _;

impl fmt::Display for AcUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)
    }
}

/// A base-field scalar, e.g. the unit part of a tower monomial.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Fq(FqElem),
    Rat(BigRational),
    Ac(AcUnit),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fq(a) => a.is_zero(),
            Scalar::Rat(a) => a.is_zero(),
            Scalar::Ac(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fq(a) => a.is_one(),
            Scalar::Rat(a) => a.is_one(),
            Scalar::Ac(u) => u.tag().is_one(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Fq(a), Scalar::Fq(b)) => Scalar::Fq(a.mul(b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Ac(a), Scalar::Ac(b)) => Scalar::Ac(a.mul(b)),
            _ => unreachable!("mixed scalar kinds"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Fq(a) => Ok(Scalar::Fq(a.inv()?)),
            Scalar::Rat(a) => {
                if a.is_zero() {
                    Err(Error::invalid("division by zero"))
                } else {
                    Ok(Scalar::Rat(a.recip()))
                }
            }
            Scalar::Ac(a) => Ok(Scalar::Ac(a.inv())),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Fq(a) => Scalar::Fq(a.neg()),
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Ac(a) => Scalar::Ac(a.neg()),
        }
    }

    /// Square test; symbolic AC units are squares by the field axiom.
    pub fn is_square(&self) -> Result<bool> {
        match self {
            Scalar::Fq(a) => Ok(a.is_square()),
            Scalar::Rat(a) => Ok(rational_is_square(a)),
            Scalar::Ac(_) => Ok(true),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fq(a) => write!(f, "{a}"),
            Scalar::Rat(a) => write!(f, "{a}"),
            Scalar::Ac(a) => write!(f, "{a}"),
        }
    }
}

/// Exact square test for a rational number.
pub fn rational_is_square(a: &BigRational) -> bool {
    if a.is_zero() {
        return false;
    }
    if a.is_negative() {
        return false;
    }
    bigint_is_square(a.numer()) && bigint_is_square(a.denom())
}

fn bigint_is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

/// A monomial `c * t1^e1 * ... * td^ed` over an iterated Laurent tower, with
/// a nonzero base scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerMonomial {
    pub scalar: Scalar,
    pub exps: Vec<i64>,
}

impl TowerMonomial {
    pub fn new(scalar: Scalar, exps: Vec<i64>) -> Result<TowerMonomial> {
        if scalar.is_zero() {
            return Err(Error::invalid("tower monomial with zero scalar"));
        }
        Ok(TowerMonomial { scalar, exps })
    }

    pub fn mul(&self, other: &TowerMonomial) -> TowerMonomial {
        TowerMonomial {
            scalar: self.scalar.mul(&other.scalar),
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

/// An exact field element, variant-tagged by the layer and base kind of the
/// ambient descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldElement {
    Fq(FqElem),
    Rat(BigRational),
    Ac(AcUnit),
    Fun(RatFunc),
    Tower(TowerMonomial),
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Fq(a) => a.is_zero(),
            FieldElement::Rat(a) => a.is_zero(),
            FieldElement::Fun(a) => a.is_zero(),
            FieldElement::Ac(_) | FieldElement::Tower(_) => false,
        }
    }

    pub fn as_tower(&self) -> Option<&TowerMonomial> {
        match self {
            FieldElement::Tower(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        match self {
            FieldElement::Fun(r) => Some(r),
            _ => None,
        }
    }
}

impl FieldDescriptor {
    fn scalar_one(&self) -> Scalar {
        match &self.kind {
            BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. } => {
                Scalar::Fq(self.fq.as_ref().expect("finite ctx").one())
            }
            BaseKind::Rationals => Scalar::Rat(BigRational::one()),
            BaseKind::SymbolicAc(c) => {
                Scalar::Ac(AcUnit::new(*c, BigRational::one()).expect("one is a unit"))
            }
        }
    }

    pub fn scalar_from_i64(&self, n: i64) -> Result<Scalar> {
        match &self.kind {
            BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. } => {
                Ok(Scalar::Fq(self.fq.as_ref().expect("finite ctx").from_i64(n)))
            }
            BaseKind::Rationals => Ok(Scalar::Rat(BigRational::from_integer(n.into()))),
            BaseKind::SymbolicAc(c) => Ok(Scalar::Ac(AcUnit::new(
                *c,
                BigRational::from_integer(n.into()),
            )?)),
        }
    }

    pub fn scalar_element(&self, s: Scalar) -> FieldElement {
        match self.layer() {
            Layer::Base => match s {
                Scalar::Fq(a) => FieldElement::Fq(a),
                Scalar::Rat(a) => FieldElement::Rat(a),
                Scalar::Ac(a) => FieldElement::Ac(a),
            },
            Layer::Tower => FieldElement::Tower(TowerMonomial {
                exps: vec![0; self.tower_depth()],
                scalar: s,
            }),
            Layer::Function => {
                let ctx = self.coef_ctx();
                let nv = self.function_vars.len();
                let c = match s {
                    Scalar::Fq(a) => Coef::Fq(a),
                    Scalar::Rat(a) => Coef::Rat(a),
                    Scalar::Ac(a) => match ctx {
                        CoefCtx::Rat => Coef::Rat(a.tag().clone()),
                        CoefCtx::Fq(ref f) => {
                            let v = a.tag().numer().to_u64_digits().1.first().copied().unwrap_or(0);
                            Coef::Fq(f.from_u64(v))
                        }
                    },
                };
                FieldElement::Fun(RatFunc::constant(ctx, nv, c))
            }
        }
    }

    pub fn one(&self) -> FieldElement {
        self.scalar_element(self.scalar_one())
    }

    pub fn from_i64(&self, n: i64) -> Result<FieldElement> {
        let s = self.scalar_from_i64(n)?;
        if s.is_zero() && self.layer() == Layer::Tower {
            return Err(Error::invalid("zero is not a tower monomial"));
        }
        Ok(self.scalar_element(s))
    }

    /// The `i`-th tower uniformizer as an element.
    pub fn uniformizer(&self, i: usize) -> Result<FieldElement> {
        if i >= self.tower_depth() {
            return Err(Error::invalid("uniformizer index out of range"));
        }
        let mut exps = vec![0; self.tower_depth()];
        exps[i] = 1;
        Ok(FieldElement::Tower(TowerMonomial {
            scalar: self.scalar_one(),
            exps,
        }))
    }

    /// Checks that the element has the shape demanded by this descriptor.
    pub fn check_element(&self, e: &FieldElement) -> Result<()> {
        let ok = match (self.layer(), e) {
            (Layer::Base, FieldElement::Fq(a)) => {
                self.is_finite_base() && Some(a.ctx()) == self.fq.as_ref()
            }
            (Layer::Base, FieldElement::Rat(_)) => self.is_rational_base(),
            (Layer::Base, FieldElement::Ac(u)) => {
                self.is_ac_base() && u.characteristic() == self.characteristic()
            }
            (Layer::Function, FieldElement::Fun(r)) => {
                r.nvars() == self.function_vars.len() && *r.ctx() == self.coef_ctx()
            }
            (Layer::Tower, FieldElement::Tower(m)) => {
                m.exps.len() == self.tower_depth()
                    && match (&m.scalar, &self.kind) {
                        (Scalar::Fq(a), BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. }) => {
                            Some(a.ctx()) == self.fq.as_ref()
                        }
                        (Scalar::Rat(_), BaseKind::Rationals) => true,
                        (Scalar::Ac(u), BaseKind::SymbolicAc(c)) => u.characteristic() == *c,
                        _ => false,
                    }
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "element does not belong to {self}"
            )))
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        match (a, b) {
            (FieldElement::Fq(x), FieldElement::Fq(y)) => Ok(FieldElement::Fq(x.mul(y))),
            (FieldElement::Rat(x), FieldElement::Rat(y)) => Ok(FieldElement::Rat(x * y)),
            (FieldElement::Ac(x), FieldElement::Ac(y)) => Ok(FieldElement::Ac(x.mul(y))),
            (FieldElement::Fun(x), FieldElement::Fun(y)) => Ok(FieldElement::Fun(x.mul(y))),
            (FieldElement::Tower(x), FieldElement::Tower(y)) => {
                Ok(FieldElement::Tower(x.mul(y)))
            }
            _ => Err(Error::invalid("elements of different shapes")),
        }
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        match a {
            FieldElement::Fq(x) => Ok(FieldElement::Fq(x.inv()?)),
            FieldElement::Rat(x) => {
                if x.is_zero() {
                    Err(Error::invalid("division by zero"))
                } else {
                    Ok(FieldElement::Rat(x.recip()))
                }
            }
            FieldElement::Ac(x) => Ok(FieldElement::Ac(x.inv())),
            FieldElement::Fun(x) => Ok(FieldElement::Fun(x.inv()?)),
            FieldElement::Tower(m) => Ok(FieldElement::Tower(TowerMonomial {
                scalar: m.scalar.inv()?,
                exps: m.exps.iter().map(|&e| -e).collect(),
            })),
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.mul(a, &self.inv(b)?)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        match a {
            FieldElement::Fq(x) => FieldElement::Fq(x.neg()),
            FieldElement::Rat(x) => FieldElement::Rat(-x),
            FieldElement::Ac(x) => FieldElement::Ac(x.neg()),
            FieldElement::Fun(x) => FieldElement::Fun(x.neg()),
            FieldElement::Tower(m) => FieldElement::Tower(TowerMonomial {
                scalar: m.scalar.neg(),
                exps: m.exps.clone(),
            }),
        }
    }

    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        if e < 0 {
            return self.pow(&self.inv(a)?, -e);
        }
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// Parses an element expression over this descriptor.
    pub fn parse_element(&self, input: &str) -> Result<FieldElement> {
        dsl::parse_element(self, input)
    }

    /// Parses a comma-separated coefficient list.
    pub fn parse_form(&self, input: &str) -> Result<Vec<FieldElement>> {
        input
            .split(',')
            .map(|part| {
                let part = part.trim();
                if part.is_empty() {
                    Err(Error::parse("empty coefficient"))
                } else {
                    self.parse_element(part)
                }
            })
            .collect()
    }

    pub fn display_element(&self, e: &FieldElement) -> String {
        match e {
            FieldElement::Fq(a) => format!("{a}"),
            FieldElement::Rat(a) => format!("{a}"),
            FieldElement::Ac(a) => format!("{a}"),
            FieldElement::Fun(r) => {
                let names: Vec<&str> = self.function_vars.iter().map(String::as_str).collect();
                r.display(&names)
            }
            FieldElement::Tower(m) => {
                let mut parts = Vec::new();
                let scalar = format!("{}", m.scalar);
                let has_vars = m.exps.iter().any(|&e| e != 0);
                if !has_vars || scalar != "1" {
                    if scalar.contains('+') || (scalar.contains('/') && has_vars) {
                        parts.push(format!("({scalar})"));
                    } else {
                        parts.push(scalar);
                    }
                }
                for (i, &e) in m.exps.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => parts.push(self.tower_uniformizers[i].clone()),
                        _ => parts.push(format!("{}^{}", self.tower_uniformizers[i], e)),
                    }
                }
                parts.join("*")
            }
        }
    }

    /// Square test. Tower monomials dispatch on exponent parity and the
    /// scalar part; rational-function layers are not supported.
    pub fn is_square(&self, a: &FieldElement) -> Result<bool> {
        self.check_element(a)?;
        if a.is_zero() {
            return Err(Error::invalid("square test on zero"));
        }
        match a {
            FieldElement::Fq(x) => Ok(x.is_square()),
            FieldElement::Rat(x) => Ok(rational_is_square(x)),
            FieldElement::Ac(_) => Ok(true),
            FieldElement::Tower(m) => {
                if m.exps.iter().any(|&e| e.rem_euclid(2) != 0) {
                    Ok(false)
                } else {
                    m.scalar.is_square()
                }
            }
            FieldElement::Fun(_) => Err(Error::unsupported(
                "square testing over a rational function layer",
            )),
        }
    }

    /// One representative per square class: the base representatives (`1`
    /// alone over a symbolic AC base, `1` and the least nonsquare over a
    /// finite base of odd order) times every subset product of the tower
    /// uniformizers, subsets enumerated in binary counting order.
    pub fn square_class_reps(&self) -> Result<Vec<FieldElement>> {
        if self.layer() == Layer::Function {
            return Err(Error::unsupported(
                "square classes of a rational function field",
            ));
        }
        let base_scalars: Vec<Scalar> = match &self.kind {
            BaseKind::Rationals => {
                return Err(Error::unsupported(
                    "the rationals have infinitely many square classes",
                ))
            }
            BaseKind::SymbolicAc(_) => vec![self.scalar_one()],
            BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. } => {
                let ctx = self.fq.as_ref().expect("finite ctx");
                if ctx.p() == 2 {
                    return Err(Error::unsupported(
                        "square classes require odd order (characteristic-2 units are all squares)",
                    ));
                }
                vec![Scalar::Fq(ctx.one()), Scalar::Fq(ctx.least_nonsquare()?)]
            }
        };
        let depth = self.tower_depth();
        let mut out = Vec::with_capacity(base_scalars.len() << depth);
        for subset in 0u64..(1u64 << depth) {
            for s in &base_scalars {
                let exps: Vec<i64> = (0..depth)
                    .map(|i| ((subset >> i) & 1) as i64)
                    .collect();
                let el = if depth == 0 {
                    self.scalar_element(s.clone())
                } else {
                    FieldElement::Tower(TowerMonomial {
                        scalar: s.clone(),
                        exps,
                    })
                };
                out.push(el);
            }
        }
        Ok(out)
    }

    /// Inverse Frobenius: the unique `r` with `r^p = a`, in positive
    /// characteristic.
    pub fn pth_root(&self, a: &FieldElement) -> Result<FieldElement> {
        let p = self.characteristic();
        if p == 0 {
            return Err(Error::unsupported(
                "p-th roots require positive characteristic",
            ));
        }
        self.check_element(a)?;
        match a {
            FieldElement::Fq(x) => Ok(FieldElement::Fq(x.pth_root())),
            FieldElement::Fun(r) => Ok(FieldElement::Fun(r.pth_root(p)?)),
            FieldElement::Tower(m) => {
                let exps: Vec<i64> = m
                    .exps
                    .iter()
                    .map(|&e| {
                        if e.rem_euclid(p as i64) != 0 {
                            Err(Error::invalid(format!(
                                "exponent {e} is not divisible by {p}"
                            )))
                        } else {
                            Ok(e / p as i64)
                        }
                    })
                    .collect::<Result<_>>()?;
                let scalar = match &m.scalar {
                    Scalar::Fq(x) => Scalar::Fq(x.pth_root()),
                    // tags live in the prime field, where x^p = x
                    Scalar::Ac(u) => Scalar::Ac(u.clone()),
                    Scalar::Rat(_) => unreachable!("rational base has characteristic 0"),
                };
                Ok(FieldElement::Tower(TowerMonomial { scalar, exps }))
            }
            FieldElement::Rat(_) => unreachable!("rational base has characteristic 0"),
            FieldElement::Ac(u) => Ok(FieldElement::Ac(u.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_accepts_and_rejects() {
        assert_eq!(
            *make_field("F3").unwrap().kind(),
            BaseKind::PrimeFinite(3)
        );
        let f9 = make_field("F9=F3[y^2+1]").unwrap();
        assert_eq!(f9.base_q(), Some(9));
        assert!(make_field("F2[y^2+1]").is_err());
        assert!(make_field("F4").is_err());
        let t = make_field("AC0((t1))((t2))").unwrap();
        assert_eq!(t.characteristic(), 0);
        assert_eq!(t.tower_uniformizers(), &["t1", "t2"]);
        assert!(make_field("F3(x)((t))").is_err());
        assert!(make_field("F3(x,x)").is_err());
    }

    #[test]
    fn square_tests_match_enumeration() {
        let f5 = make_field("F5").unwrap();
        assert!(f5.is_square(&f5.from_i64(4).unwrap()).unwrap());
        assert!(!f5.is_square(&f5.from_i64(2).unwrap()).unwrap());
        assert!(f5.is_square(&f5.from_i64(0).unwrap()).is_err());
        let ac = make_field("AC0").unwrap();
        assert!(ac.is_square(&ac.from_i64(-7).unwrap()).unwrap());
    }

    #[test]
    fn square_class_representatives() {
        let f3t = make_field("F3((t))").unwrap();
        let reps: Vec<String> = f3t
            .square_class_reps()
            .unwrap()
            .iter()
            .map(|r| f3t.display_element(r))
            .collect();
        assert_eq!(reps, vec!["1", "2", "t", "2*t"]);

        let ac = make_field("AC0((t1))((t2))").unwrap();
        let reps: Vec<String> = ac
            .square_class_reps()
            .unwrap()
            .iter()
            .map(|r| ac.display_element(r))
            .collect();
        assert_eq!(reps, vec!["1", "t1", "t2", "t1*t2"]);

        let f5 = make_field("F5").unwrap();
        let reps: Vec<String> = f5
            .square_class_reps()
            .unwrap()
            .iter()
            .map(|r| f5.display_element(r))
            .collect();
        assert_eq!(reps, vec!["1", "2"]);

        assert!(make_field("Q").unwrap().square_class_reps().is_err());
    }

    #[test]
    fn rep_quotients_are_nonsquares() {
        let f3t = make_field("F3((t))").unwrap();
        let reps = f3t.square_class_reps().unwrap();
        for (i, a) in reps.iter().enumerate() {
            for (j, b) in reps.iter().enumerate() {
                let q = f3t.div(a, b).unwrap();
                assert_eq!(f3t.is_square(&q).unwrap(), i == j);
            }
        }
    }

    #[test]
    fn tower_monomial_squares() {
        let f3t = make_field("F3((t))").unwrap();
        let t = f3t.uniformizer(0).unwrap();
        let t2 = f3t.mul(&t, &t).unwrap();
        assert!(f3t.is_square(&t2).unwrap());
        assert!(!f3t.is_square(&t).unwrap());
        // t^2 * 2 is not a square over F3 (2 is the nonsquare)
        let m = f3t.mul(&t2, &f3t.from_i64(2).unwrap()).unwrap();
        assert!(!f3t.is_square(&m).unwrap());
    }

    #[test]
    fn pth_root_examples() {
        let f9 = make_field("F9=F3[y^2+1]").unwrap();
        let y = FieldElement::Fq(f9.fq_ctx().unwrap().gen());
        let r = f9.pth_root(&y).unwrap();
        assert_eq!(f9.pow(&r, 3).unwrap(), y);
        // characteristic zero is rejected
        let q = make_field("Q").unwrap();
        assert!(q.pth_root(&q.from_i64(4).unwrap()).is_err());
    }

    #[test]
    fn element_parsing_round_trips() {
        let f3t = make_field("F3((t))").unwrap();
        for s in ["2*t", "t^-1", "2*t^3", "1"] {
            let e = f3t.parse_element(s).unwrap();
            let shown = f3t.display_element(&e);
            let back = f3t.parse_element(&shown).unwrap();
            assert_eq!(e, back, "{s} -> {shown}");
        }
        let q2 = make_field("Q(x1,x2)").unwrap();
        let e = q2.parse_element("(x1+x2)/(x1*x2)").unwrap();
        let shown = q2.display_element(&e);
        assert_eq!(q2.parse_element(&shown).unwrap(), e);
    }
}
