//! Diagonal quadratic forms and their decision procedures: isotropy,
//! representation, universality, and Witt decomposition.
//!
//! Dispatch is per base kind: dimension counting over symbolic algebraically
//! closed fields, Chevalley bounds plus square tests over finite fields,
//! Hasse–Minkowski over the rationals, and residue recursion over iterated
//! Laurent towers (residue characteristic != 2), with witnesses produced by
//! lifting residue-form zeros.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fields::laurent::{scalar_add, LaurentPoly};
use crate::fields::{
    BaseKind, FieldDescriptor, FieldElement, FqElem, Layer, Scalar, TowerMonomial,
};

/// A diagonal form: ordered nonzero coefficients over an ambient field.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalForm {
    ambient: FieldDescriptor,
    coeffs: Vec<FieldElement>,
    degree: u64,
}

impl DiagonalForm {
    /// A diagonal quadratic form; the quadratic theory used here requires
    /// characteristic != 2.
    pub fn quadratic(ambient: FieldDescriptor, coeffs: Vec<FieldElement>) -> Result<DiagonalForm> {
        if ambient.characteristic() == 2 {
            return Err(Error::unsupported(
                "quadratic forms in characteristic 2 (use the degree-p machinery)",
            ));
        }
        DiagonalForm::of_degree(ambient, coeffs, 2)
    }

    /// A diagonal form of prime degree (the characteristic-p forms).
    pub fn of_degree(
        ambient: FieldDescriptor,
        coeffs: Vec<FieldElement>,
        degree: u64,
    ) -> Result<DiagonalForm> {
        if degree < 2 {
            return Err(Error::invalid("form degree must be at least 2"));
        }
        for c in &coeffs {
            ambient.check_element(c)?;
            if c.is_zero() {
                return Err(Error::invalid("diagonal coefficients must be nonzero"));
            }
        }
        Ok(DiagonalForm {
            ambient,
            coeffs,
            degree,
        })
    }

    pub fn ambient(&self) -> &FieldDescriptor {
        &self.ambient
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// The orthogonal sum `q ⊥ <a>`.
    pub fn append(&self, a: FieldElement) -> Result<DiagonalForm> {
        let mut coeffs = self.coeffs.clone();
        coeffs.push(a);
        DiagonalForm::of_degree(self.ambient.clone(), coeffs, self.degree)
    }

    /// The scaled form `c * q`.
    pub fn scale(&self, c: &FieldElement) -> Result<DiagonalForm> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|x| self.ambient.mul(x, c))
            .collect::<Result<_>>()?;
        DiagonalForm::of_degree(self.ambient.clone(), coeffs, self.degree)
    }

    pub fn display_coeffs(&self) -> Vec<String> {
        self.coeffs
            .iter()
            .map(|c| self.ambient.display_element(c))
            .collect()
    }

    /// Exact evaluation of the form at a coordinate vector; true iff zero.
    pub fn vanishes_at(&self, coords: &[WitnessCoord]) -> Result<bool> {
        if coords.len() != self.dim() {
            return Err(Error::invalid("witness arity mismatch"));
        }
        match self.ambient.layer() {
            Layer::Tower => {
                let mut acc = LaurentPoly::zero();
                for (c, w) in self.coeffs.iter().zip(coords) {
                    let WitnessCoord::Value(w) = w else { continue };
                    let term = self
                        .ambient
                        .mul(c, &self.ambient.pow(w, self.degree as i64)?)?;
                    match term {
                        FieldElement::Tower(m) => acc.add_monomial(&m),
                        _ => return Err(Error::invalid("witness has the wrong shape")),
                    }
                }
                Ok(acc.is_zero())
            }
            Layer::Function => {
                let mut acc: Option<FieldElement> = None;
                for (c, w) in self.coeffs.iter().zip(coords) {
                    let WitnessCoord::Value(w) = w else { continue };
                    if w.is_zero() {
                        continue;
                    }
                    let term = self
                        .ambient
                        .mul(c, &self.ambient.pow(w, self.degree as i64)?)?;
                    acc = Some(match acc {
                        None => term,
                        Some(prev) => match (prev, term) {
                            (FieldElement::Fun(a), FieldElement::Fun(b)) => {
                                FieldElement::Fun(a.add(&b))
                            }
                            _ => return Err(Error::invalid("witness has the wrong shape")),
                        },
                    });
                }
                Ok(acc.is_none_or(|v| v.is_zero()))
            }
            Layer::Base => {
                let mut acc: Option<Scalar> = None;
                for (c, w) in self.coeffs.iter().zip(coords) {
                    let WitnessCoord::Value(w) = w else { continue };
                    if w.is_zero() {
                        continue;
                    }
                    let term = self
                        .ambient
                        .mul(c, &self.ambient.pow(w, self.degree as i64)?)?;
                    let s = element_scalar(&term)?;
                    acc = match acc {
                        None => Some(s),
                        Some(prev) => scalar_add(&prev, &s),
                    };
                }
                Ok(acc.is_none())
            }
        }
    }
}

fn element_scalar(e: &FieldElement) -> Result<Scalar> {
    match e {
        FieldElement::Fq(a) => Ok(Scalar::Fq(a.clone())),
        FieldElement::Rat(a) => Ok(Scalar::Rat(a.clone())),
        FieldElement::Ac(a) => Ok(Scalar::Ac(a.clone())),
        _ => Err(Error::invalid("expected a base-field element")),
    }
}

/// One coordinate of an isotropy witness (tower monomials cannot encode
/// zero, so zero coordinates are explicit).
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessCoord {
    Zero,
    Value(FieldElement),
}

impl WitnessCoord {
    pub fn is_zero(&self) -> bool {
        matches!(self, WitnessCoord::Zero)
    }
}

/// A finite or infinite place of the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Infinity => write!(f, "infinity"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// A non-isotropy certificate: a residue recursion trace over towers, or a
/// local obstruction (place plus symbol data) over the rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Dimension 0 or 1, or another immediate reason.
    Trivial(String),
    /// A binary form over a finite field whose negated coefficient product
    /// is a nonsquare.
    FiniteBinary { neg_product: String },
    /// Local obstruction over the rationals.
    Local { place: Place, detail: String },
    /// Residue split: both parts anisotropic over the smaller tower.
    Residue {
        uniformizer: String,
        even_form: Vec<String>,
        odd_form: Vec<String>,
        even: Box<Certificate>,
        odd: Box<Certificate>,
    },
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Certificate::Trivial(s) => serde_json::json!({ "kind": "trivial", "reason": s }),
            Certificate::FiniteBinary { neg_product } => serde_json::json!({
                "kind": "finite-binary",
                "nonsquare": neg_product,
            }),
            Certificate::Local { place, detail } => serde_json::json!({
                "kind": "local",
                "place": place.to_string(),
                "detail": detail,
            }),
            Certificate::Residue {
                uniformizer,
                even_form,
                odd_form,
                even,
                odd,
            } => serde_json::json!({
                "kind": "residue",
                "uniformizer": uniformizer,
                "even_form": even_form,
                "odd_form": odd_form,
                "even": even.to_json(),
                "odd": odd.to_json(),
            }),
        }
    }
}

/// The outcome of an isotropy decision.
#[derive(Clone, Debug)]
pub struct IsotropyVerdict {
    pub isotropic: bool,
    pub witness: Option<Vec<WitnessCoord>>,
    pub certificate: Option<Certificate>,
}

/// Tunable bounds for the rational witness search.
#[derive(Clone, Debug)]
pub struct QuadConfig {
    /// Hard cap on witness coordinate height over the rationals.
    pub witness_height: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            witness_height: 10_000,
        }
    }
}

/// Exact isotropy decision. See the module docs for the dispatch.
pub fn is_isotropic(q: &DiagonalForm) -> Result<IsotropyVerdict> {
    is_isotropic_with(q, &QuadConfig::default())
}

pub fn is_isotropic_with(q: &DiagonalForm, cfg: &QuadConfig) -> Result<IsotropyVerdict> {
    validate_quadratic(q)?;
    let verdict = match q.ambient().layer() {
        Layer::Tower => {
            let coeffs: Vec<TowerMonomial> = q
                .coeffs()
                .iter()
                .map(|c| c.as_tower().cloned().expect("tower coefficients"))
                .collect();
            tower_isotropy(q.ambient(), &coeffs, cfg)?
        }
        Layer::Base => {
            let scalars: Vec<Scalar> = q
                .coeffs()
                .iter()
                .map(|c| element_scalar(c))
                .collect::<Result<_>>()?;
            base_isotropy(q.ambient(), &scalars, cfg)?
        }
        Layer::Function => {
            return Err(Error::unsupported(
                "isotropy over rational function fields has no decision procedure here",
            ))
        }
    };
    if let Some(w) = &verdict.witness {
        debug_assert!(q.vanishes_at(w)?, "witness must evaluate to zero");
        debug_assert!(w.iter().any(|c| !c.is_zero()), "witness must be nontrivial");
    }
    Ok(verdict)
}

fn validate_quadratic(q: &DiagonalForm) -> Result<()> {
    if q.degree() != 2 {
        return Err(Error::unsupported(
            "isotropy decisions apply to quadratic forms only",
        ));
    }
    if q.ambient().characteristic() == 2 {
        return Err(Error::unsupported("quadratic theory in characteristic 2"));
    }
    Ok(())
}

/// Splits a diagonal form over a tower along its outermost uniformizer into
/// the even- and odd-valuation residue parts (coefficients reduced modulo
/// squares of the uniformizer). The form is anisotropic iff both parts are.
pub fn springer_split(q: &DiagonalForm, t: &str) -> Result<(DiagonalForm, DiagonalForm)> {
    if q.ambient().layer() != Layer::Tower {
        return Err(Error::invalid("springer split needs a tower ambient"));
    }
    let unifs = q.ambient().tower_uniformizers();
    let outer = unifs.last().expect("nonempty tower");
    if t != outer {
        return Err(Error::invalid(format!(
            "{t:?} is not the outermost uniformizer (expected {outer:?})"
        )));
    }
    let coeffs: Vec<TowerMonomial> = q
        .coeffs()
        .iter()
        .map(|c| c.as_tower().cloned().expect("tower coefficients"))
        .collect();
    let (even, odd) = split_parts(&coeffs);
    let inner = q.ambient().drop_outer_uniformizer();
    let build = |items: Vec<(usize, i64, TowerMonomial)>| -> Result<DiagonalForm> {
        let coeffs = items
            .into_iter()
            .map(|(_, _, m)| {
                if inner.tower_depth() == 0 {
                    inner.base_descriptor().scalar_element(m.scalar)
                } else {
                    FieldElement::Tower(m)
                }
            })
            .collect();
        DiagonalForm::of_degree(inner.clone(), coeffs, q.degree())
    };
    Ok((build(even)?, build(odd)?))
}

/// Items are `(original index, removed square power k, inner monomial)`;
/// the coefficient was `inner * t^(2k + parity)`.
fn split_parts(
    coeffs: &[TowerMonomial],
) -> (
    Vec<(usize, i64, TowerMonomial)>,
    Vec<(usize, i64, TowerMonomial)>,
) {
    let depth = coeffs
        .first()
        .map(|m| m.exps.len())
        .unwrap_or(0);
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for (i, m) in coeffs.iter().enumerate() {
        let e = m.exps[depth - 1];
        let k = e.div_euclid(2);
        let r = e.rem_euclid(2);
        let inner = TowerMonomial {
            scalar: m.scalar.clone(),
            exps: m.exps[..depth - 1].to_vec(),
        };
        if r == 0 {
            even.push((i, k, inner));
        } else {
            odd.push((i, k, inner));
        }
    }
    (even, odd)
}

fn tower_isotropy(
    ambient: &FieldDescriptor,
    coeffs: &[TowerMonomial],
    cfg: &QuadConfig,
) -> Result<IsotropyVerdict> {
    if ambient.tower_depth() == 0 {
        let scalars: Vec<Scalar> = coeffs.iter().map(|m| m.scalar.clone()).collect();
        return base_isotropy(&ambient.base_descriptor(), &scalars, cfg);
    }
    if coeffs.len() <= 1 {
        return Ok(IsotropyVerdict {
            isotropic: false,
            witness: None,
            certificate: Some(Certificate::Trivial(format!(
                "dimension {} forms are anisotropic",
                coeffs.len()
            ))),
        });
    }
    let (even, odd) = split_parts(coeffs);
    let inner = ambient.drop_outer_uniformizer();
    let t_name = ambient.tower_uniformizers().last().unwrap().clone();

    let analyze = |items: &[(usize, i64, TowerMonomial)]| -> Result<IsotropyVerdict> {
        let inner_coeffs: Vec<TowerMonomial> =
            items.iter().map(|(_, _, m)| m.clone()).collect();
        tower_isotropy(&inner, &inner_coeffs, cfg)
    };
    let even_verdict = analyze(&even)?;
    let odd_verdict = analyze(&odd)?;

    let lift = |items: &[(usize, i64, TowerMonomial)],
                verdict: &IsotropyVerdict|
     -> Option<Vec<WitnessCoord>> {
        let w = verdict.witness.as_ref()?;
        let mut full = vec![WitnessCoord::Zero; coeffs.len()];
        for ((orig, k, _), coord) in items.iter().zip(w) {
            if let WitnessCoord::Value(v) = coord {
                let inner_mono = match v {
                    FieldElement::Tower(m) => m.clone(),
                    other => TowerMonomial {
                        scalar: element_scalar(other).ok()?,
                        exps: Vec::new(),
                    },
                };
                if inner_mono.scalar.is_zero() {
                    continue;
                }
                let mut exps = inner_mono.exps.clone();
                exps.push(-k);
                full[*orig] = WitnessCoord::Value(FieldElement::Tower(TowerMonomial {
                    scalar: inner_mono.scalar,
                    exps,
                }));
            }
        }
        Some(full)
    };

    if even_verdict.isotropic || odd_verdict.isotropic {
        let witness = if even_verdict.isotropic {
            lift(&even, &even_verdict)
        } else {
            lift(&odd, &odd_verdict)
        };
        return Ok(IsotropyVerdict {
            isotropic: true,
            witness,
            certificate: None,
        });
    }
    let display = |items: &[(usize, i64, TowerMonomial)]| -> Vec<String> {
        items
            .iter()
            .map(|(_, _, m)| {
                if inner.tower_depth() == 0 {
                    format!("{}", m.scalar)
                } else {
                    inner.display_element(&FieldElement::Tower(m.clone()))
                }
            })
            .collect()
    };
    Ok(IsotropyVerdict {
        isotropic: false,
        witness: None,
        certificate: Some(Certificate::Residue {
            uniformizer: t_name,
            even_form: display(&even),
            odd_form: display(&odd),
            even: Box::new(even_verdict.certificate.expect("anisotropic part has certificate")),
            odd: Box::new(odd_verdict.certificate.expect("anisotropic part has certificate")),
        }),
    })
}

fn base_isotropy(
    base: &FieldDescriptor,
    scalars: &[Scalar],
    cfg: &QuadConfig,
) -> Result<IsotropyVerdict> {
    let n = scalars.len();
    if n <= 1 {
        return Ok(IsotropyVerdict {
            isotropic: false,
            witness: None,
            certificate: Some(Certificate::Trivial(format!(
                "dimension {n} forms are anisotropic"
            ))),
        });
    }
    match base.kind() {
        BaseKind::SymbolicAc(_) => Ok(ac_isotropy(base, scalars)),
        BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. } => Ok(fq_isotropy(base, scalars)),
        BaseKind::Rationals => {
            let rats: Vec<BigRational> = scalars
                .iter()
                .map(|s| match s {
                    Scalar::Rat(r) => r.clone(),
                    _ => unreachable!("rational base"),
                })
                .collect();
            rational_isotropy(&rats, cfg)
        }
    }
}

/// Over a symbolic algebraically closed field every form in >= 2 variables
/// is isotropic; a witness is emitted when the needed square root happens to
/// lie in the prime subfield of tags.
fn ac_isotropy(base: &FieldDescriptor, scalars: &[Scalar]) -> IsotropyVerdict {
    let (a, b) = (&scalars[0], &scalars[1]);
    // solve a*x^2 + b*y^2 = 0 with y = 1: x^2 = -b/a
    let target = b.mul(&a.inv().expect("nonzero coefficient")).neg();
    let witness = match &target {
        Scalar::Ac(u) => {
            let root = if u.characteristic() == 0 {
                rational_sqrt(u.tag())
            } else {
                let p = u.characteristic();
                let v = u
                    .tag()
                    .numer()
                    .to_u64_digits()
                    .1
                    .first()
                    .copied()
                    .unwrap_or(0);
                (0..p)
                    .find(|r| r * r % p == v)
                    .map(|r| BigRational::from_integer(r.into()))
            };
            root.and_then(|r| crate::fields::AcUnit::new(u.characteristic(), r).ok())
        }
        _ => unreachable!("symbolic base"),
    };
    let witness = witness.map(|root| {
        let mut w = vec![WitnessCoord::Zero; scalars.len()];
        w[0] = WitnessCoord::Value(base.scalar_element(Scalar::Ac(root)));
        w[1] = WitnessCoord::Value(base.one());
        w
    });
    IsotropyVerdict {
        isotropic: true,
        witness,
        certificate: None,
    }
}

fn fq_isotropy(base: &FieldDescriptor, scalars: &[Scalar]) -> IsotropyVerdict {
    let ctx = base.fq_ctx().expect("finite base").clone();
    let elems: Vec<FqElem> = scalars
        .iter()
        .map(|s| match s {
            Scalar::Fq(a) => a.clone(),
            _ => unreachable!("finite base"),
        })
        .collect();
    let n = elems.len();
    if n == 2 {
        let prod = elems[0].mul(&elems[1]).neg();
        if !prod.is_square() {
            return IsotropyVerdict {
                isotropic: false,
                witness: None,
                certificate: Some(Certificate::FiniteBinary {
                    neg_product: format!("{prod}"),
                }),
            };
        }
        // x^2 = -c2/c1, y = 1
        let target = elems[1].div(&elems[0]).expect("nonzero").neg();
        let root = target.sqrt().expect("square has a root");
        return IsotropyVerdict {
            isotropic: true,
            witness: Some(vec![
                WitnessCoord::Value(FieldElement::Fq(root)),
                WitnessCoord::Value(FieldElement::Fq(ctx.one())),
            ]),
            certificate: None,
        };
    }
    // n >= 3: every ternary form over a finite field is isotropic; search the
    // first three coordinates with a square-root table.
    let mut sqrt_table: Vec<Option<FqElem>> = vec![None; ctx.q() as usize];
    for b in ctx.elements() {
        let idx = b.mul(&b).index() as usize;
        if sqrt_table[idx].is_none() {
            sqrt_table[idx] = Some(b);
        }
    }
    for x in ctx.elements() {
        for y in ctx.elements() {
            let partial = elems[0]
                .mul(&x.mul(&x))
                .add(&elems[1].mul(&y.mul(&y)));
            let target = partial.neg().div(&elems[2]).expect("nonzero");
            if let Some(z) = &sqrt_table[target.index() as usize] {
                if x.is_zero() && y.is_zero() && z.is_zero() {
                    continue;
                }
                let mut w = vec![WitnessCoord::Zero; n];
                w[0] = WitnessCoord::Value(FieldElement::Fq(x.clone()));
                w[1] = WitnessCoord::Value(FieldElement::Fq(y.clone()));
                w[2] = WitnessCoord::Value(FieldElement::Fq(z.clone()));
                return IsotropyVerdict {
                    isotropic: true,
                    witness: Some(w),
                    certificate: None,
                };
            }
        }
    }
    unreachable!("ternary forms over finite fields are isotropic")
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Rationals: Hasse–Minkowski
// ---------------------------------------------------------------------------

/// Squarefree data for one coefficient: `c = squarefree * scale^2`.
struct Reduced {
    squarefree: BigInt,
    scale: BigRational,
    primes: Vec<u64>,
}

fn factor_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= m {
        if m % f == 0 {
            let mut e = 0;
            while m % f == 0 {
                m /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn squarefree_reduce(c: &BigRational) -> Result<Reduced> {
    let m = c.numer() * c.denom();
    let negative = m.is_negative();
    let m_abs = m.abs();
    let m_u64 = m_abs
        .to_u64_digits()
        .1
        .first()
        .copied()
        .filter(|_| m_abs.bits() <= 63)
        .ok_or_else(|| Error::invalid("coefficient too large to factor exactly"))?;
    let factors = factor_u64(m_u64);
    let mut squarefree = BigInt::one();
    let mut scale_num = BigInt::one();
    let mut primes = Vec::new();
    for (p, e) in &factors {
        if e % 2 == 1 {
            squarefree *= BigInt::from(*p);
            primes.push(*p);
        }
        for _ in 0..e / 2 {
            scale_num *= BigInt::from(*p);
        }
    }
    if negative {
        squarefree = -squarefree;
    }
    Ok(Reduced {
        squarefree,
        scale: BigRational::new(scale_num, c.denom().clone()),
        primes,
    })
}

fn val_p(r: &BigRational, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut n = r.numer().abs();
    while (&n % &p).is_zero() && !n.is_zero() {
        n /= &p;
        v += 1;
    }
    let mut d = r.denom().clone();
    while (&d % &p).is_zero() {
        d /= &p;
        v -= 1;
    }
    v
}

/// The unit part of `r` at `p`, reduced modulo `p^k`.
fn unit_mod(r: &BigRational, p: u64, k: u32) -> u64 {
    let pb = BigInt::from(p);
    let mut n = r.numer().clone();
    while (&n % &pb).is_zero() && !n.is_zero() {
        n /= &pb;
    }
    let mut d = r.denom().clone();
    while (&d % &pb).is_zero() {
        d /= &pb;
    }
    let modulus = BigInt::from(p.pow(k));
    let n = ((&n % &modulus) + &modulus) % &modulus;
    let d = ((&d % &modulus) + &modulus) % &modulus;
    let n = n.to_u64_digits().1.first().copied().unwrap_or(0);
    let d = d.to_u64_digits().1.first().copied().unwrap_or(0);
    let m = p.pow(k);
    // invert d mod p^k (d is a unit)
    let mut inv = 1u64;
    let mut base = d % m;
    let mut e = (m / p) * (p - 1) - 1; // phi(p^k) - 1
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    n * inv % m
}

fn legendre(u: u64, p: u64) -> i32 {
    // u nonzero mod p, p odd
    let mut acc = 1u64;
    let mut b = u % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

fn is_prime_u64(n: u64) -> bool {
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

/// The Hilbert symbol `(a, b)` at a place of the rationals: `+1` iff
/// `z^2 = a x^2 + b y^2` has a nontrivial solution in the completion.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("hilbert symbol needs nonzero arguments"));
    }
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        }),
        Place::Prime(2) => {
            let alpha = val_p(a, 2);
            let beta = val_p(b, 2);
            let u = unit_mod(a, 2, 3);
            let v = unit_mod(b, 2, 3);
            let eps = |x: u64| ((x - 1) / 2) % 2; // (x-1)/2 mod 2 for odd x mod 8
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u) * eps(v)
                + (alpha.rem_euclid(2) as u64) * omega(v)
                + (beta.rem_euclid(2) as u64) * omega(u);
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Prime(p) => {
            if !is_prime_u64(p) {
                return Err(Error::invalid(format!("{p} is not a prime place")));
            }
            let alpha = val_p(a, p);
            let beta = val_p(b, p);
            let u = unit_mod(a, p, 1);
            let v = unit_mod(b, p, 1);
            let mut s = 1i32;
            if alpha.rem_euclid(2) == 1 && beta.rem_euclid(2) == 1 && (p - 1) / 2 % 2 == 1 {
                s = -s;
            }
            if beta.rem_euclid(2) == 1 {
                s *= legendre(u, p);
            }
            if alpha.rem_euclid(2) == 1 {
                s *= legendre(v, p);
            }
            Ok(s)
        }
    }
}

/// Whether a nonzero integer is a square in `Q_p` (`unit_mod` reduces
/// negative units to their correct residues).
fn is_padic_square(d: &BigInt, p: u64) -> bool {
    let r = BigRational::from_integer(d.clone());
    if val_p(&r, p).rem_euclid(2) == 1 {
        return false;
    }
    if p == 2 {
        unit_mod(&r, 2, 3) == 1
    } else {
        legendre(unit_mod(&r, p, 1), p) == 1
    }
}

fn rational_isotropy(coeffs: &[BigRational], cfg: &QuadConfig) -> Result<IsotropyVerdict> {
    let n = coeffs.len();
    let reduced: Vec<Reduced> = coeffs
        .iter()
        .map(squarefree_reduce)
        .collect::<Result<_>>()?;
    let a: Vec<BigInt> = reduced.iter().map(|r| r.squarefree.clone()).collect();

    let all_positive = a.iter().all(|x| x.is_positive());
    let all_negative = a.iter().all(|x| x.is_negative());
    let definite = all_positive || all_negative;

    let isotropic;
    let mut certificate = None;

    if n == 2 {
        let prod = -(&a[0] * &a[1]);
        isotropic = !prod.is_negative() && {
            let r = prod.sqrt();
            &(&r * &r) == &prod
        };
        if !isotropic {
            certificate = Some(if prod.is_negative() {
                Certificate::Local {
                    place: Place::Infinity,
                    detail: "the form is definite over the reals".into(),
                }
            } else {
                // squarefree positive nonsquare: some prime has odd valuation
                let p = factor_u64(prod.to_u64_digits().1.first().copied().unwrap_or(0))
                    .into_iter()
                    .find(|(_, e)| e % 2 == 1)
                    .map(|(p, _)| p)
                    .unwrap_or(2);
                Certificate::Local {
                    place: Place::Prime(p),
                    detail: format!("-c1*c2 = {prod} has odd {p}-adic valuation"),
                }
            });
        }
    } else if n >= 5 {
        isotropic = !definite;
        if !isotropic {
            certificate = Some(Certificate::Local {
                place: Place::Infinity,
                detail: "the form is definite over the reals".into(),
            });
        }
    } else {
        // n = 3 or 4
        if definite {
            return Ok(IsotropyVerdict {
                isotropic: false,
                witness: None,
                certificate: Some(Certificate::Local {
                    place: Place::Infinity,
                    detail: "the form is definite over the reals".into(),
                }),
            });
        }
        let mut places: Vec<u64> = vec![2];
        for r in &reduced {
            for &p in &r.primes {
                if !places.contains(&p) {
                    places.push(p);
                }
            }
        }
        places.sort_unstable();
        let mut obstruction = None;
        for &p in &places {
            let place = Place::Prime(p);
            let rat = |x: &BigInt| BigRational::from_integer(x.clone());
            let mut eps = 1i32;
            for i in 0..n {
                for j in i + 1..n {
                    eps *= hilbert_symbol(&rat(&a[i]), &rat(&a[j]), place)?;
                }
            }
            let d: BigInt = a.iter().product();
            let locally_isotropic = if n == 3 {
                let lhs = hilbert_symbol(
                    &BigRational::from_integer((-1).into()),
                    &rat(&(-&d)),
                    place,
                )?;
                lhs == eps
            } else {
                let minus_one = hilbert_symbol(
                    &BigRational::from_integer((-1).into()),
                    &BigRational::from_integer((-1).into()),
                    place,
                )?;
                !is_padic_square(&d, p) || eps == minus_one
            };
            if !locally_isotropic {
                obstruction = Some(Certificate::Local {
                    place,
                    detail: format!(
                        "local invariants obstruct isotropy (dim {n}, disc {d}, eps {eps})"
                    ),
                });
                break;
            }
        }
        isotropic = obstruction.is_none();
        certificate = obstruction;
    }

    let witness = if isotropic {
        rational_witness(&reduced, cfg).map(|w| {
            w.into_iter()
                .map(|x| {
                    if x.is_zero() {
                        WitnessCoord::Zero
                    } else {
                        WitnessCoord::Value(FieldElement::Rat(x))
                    }
                })
                .collect::<Vec<_>>()
        })
    } else {
        None
    };
    Ok(IsotropyVerdict {
        isotropic,
        witness,
        certificate,
    })
}

/// Bounded search for a rational zero, on the squarefree-reduced integer
/// form; a solution maps back through the per-coefficient scales.
fn rational_witness(reduced: &[Reduced], cfg: &QuadConfig) -> Option<Vec<BigRational>> {
    let a: Vec<i128> = reduced
        .iter()
        .map(|r| {
            let digits = r.squarefree.to_u64_digits();
            let v = digits.1.first().copied().unwrap_or(0) as i128;
            if r.squarefree.is_negative() {
                -v
            } else {
                v
            }
        })
        .collect();
    let n = a.len();
    let ints: Vec<i128> = if n == 2 {
        // exact: x^2 = -a2/a1 is a rational square
        let target = BigRational::new(-&reduced[1].squarefree, reduced[0].squarefree.clone());
        let s = rational_sqrt(&target)?;
        let (p, q) = (s.numer().clone(), s.denom().clone());
        vec![
            p.to_u64_digits().1.first().copied().unwrap_or(0) as i128,
            q.to_u64_digits().1.first().copied().unwrap_or(0) as i128,
        ]
    } else {
        mitm_zero_search(&a, cfg.witness_height)?
    };
    // map back: original coefficient c_i = a_i * scale_i^2, so x_i/scale_i
    // turns a zero of the reduced form into a zero of the original form.
    let mut out: Vec<BigRational> = Vec::with_capacity(n);
    for (x, r) in ints.iter().zip(reduced) {
        if r.scale.is_zero() {
            return None;
        }
        out.push(BigRational::from_integer((*x).into()) / &r.scale);
    }
    Some(out)
}

/// Meet-in-the-middle zero search on `sum a_i x_i^2 = 0`; sign-free because
/// only squares enter. Shells grow geometrically up to the height bound,
/// with the hashed side capped to keep memory flat.
fn mitm_zero_search(a: &[i128], height: u64) -> Option<Vec<i128>> {
    use std::collections::HashMap;
    let n = a.len();
    let split = n / 2; // first `split` coords enumerated, rest hashed
    let shell_max = if n == 3 { height } else { height.min(2048) };
    let mut shell: u64 = 8;
    loop {
        let hash_cap = match n - split {
            1 => shell,
            2 => shell.min(512),
            _ => shell.min(64),
        };
        let mut table: HashMap<i128, Vec<i128>> = HashMap::new();
        let mut idx = vec![0u64; n - split];
        'outer: loop {
            let mut v: i128 = 0;
            for (k, &x) in idx.iter().enumerate() {
                v += a[split + k] * (x as i128) * (x as i128);
            }
            table.entry(v).or_insert_with(|| {
                idx.iter().map(|&x| x as i128).collect()
            });
            // increment odometer
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] <= hash_cap {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        let mut idx = vec![0u64; split];
        'outer2: loop {
            let mut v: i128 = 0;
            for (k, &x) in idx.iter().enumerate() {
                v += a[k] * (x as i128) * (x as i128);
            }
            if let Some(rest) = table.get(&(-v)) {
                let all_zero = idx.iter().all(|&x| x == 0) && rest.iter().all(|&x| x == 0);
                if !all_zero {
                    let mut sol: Vec<i128> = idx.iter().map(|&x| x as i128).collect();
                    sol.extend_from_slice(rest);
                    return Some(sol);
                }
            }
            for k in 0..idx.len() {
                idx[k] += 1;
                if idx[k] <= shell {
                    continue 'outer2;
                }
                idx[k] = 0;
            }
            break;
        }
        if shell >= shell_max {
            return None;
        }
        shell = (shell * 8).min(shell_max);
    }
}

// ---------------------------------------------------------------------------
// Representation, universality, Witt decomposition
// ---------------------------------------------------------------------------

/// Whether the form takes the nonzero value `a`: isotropic regular forms are
/// universal; otherwise decided as isotropy of `q ⊥ <-a>`.
pub fn represents(q: &DiagonalForm, a: &FieldElement) -> Result<bool> {
    represents_with(q, a, &QuadConfig::default())
}

pub fn represents_with(q: &DiagonalForm, a: &FieldElement, cfg: &QuadConfig) -> Result<bool> {
    q.ambient().check_element(a)?;
    if a.is_zero() {
        return Err(Error::invalid("representation test needs a nonzero value"));
    }
    if is_isotropic_with(q, cfg)?.isotropic {
        return Ok(true);
    }
    let extended = q.append(q.ambient().neg(a))?;
    Ok(is_isotropic_with(&extended, cfg)?.isotropic)
}

/// Universality outcome, with the first missed square class if any.
#[derive(Clone, Debug)]
pub struct Universality {
    pub universal: bool,
    pub missed_class: Option<FieldElement>,
}

/// Whether `q` represents every nonzero element, tested on one
/// representative per square class of the ambient field.
pub fn universality(q: &DiagonalForm) -> Result<Universality> {
    let reps = q.ambient().square_class_reps()?;
    for rep in reps {
        if !represents(q, &rep)? {
            return Ok(Universality {
                universal: false,
                missed_class: Some(rep),
            });
        }
    }
    Ok(Universality {
        universal: true,
        missed_class: None,
    })
}

pub fn is_universal(q: &DiagonalForm) -> Result<bool> {
    Ok(universality(q)?.universal)
}

/// Witt decomposition `q ≅ index * H ⊥ kernel` with the kernel anisotropic.
#[derive(Clone, Debug)]
pub struct WittDecomposition {
    pub witt_index: usize,
    pub kernel: DiagonalForm,
}

impl WittDecomposition {
    pub fn is_hyperbolic(&self) -> bool {
        self.kernel.dim() == 0
    }
}

/// Computes the Witt index and anisotropic kernel. Supported over finite
/// (odd) and symbolic AC bases, with residue recursion over towers.
pub fn witt_decompose(q: &DiagonalForm) -> Result<WittDecomposition> {
    validate_quadratic(q)?;
    if q.ambient().is_rational_base() {
        return Err(Error::unsupported(
            "witt decomposition over the rationals is not provided",
        ));
    }
    if q.ambient().layer() == Layer::Function {
        return Err(Error::unsupported(
            "witt decomposition over rational function fields",
        ));
    }
    let (index, kernel_coeffs) = witt_recurse(q.ambient(), q.coeffs())?;
    let kernel = DiagonalForm::of_degree(q.ambient().clone(), kernel_coeffs, 2)?;
    Ok(WittDecomposition {
        witt_index: index,
        kernel,
    })
}

fn witt_recurse(
    ambient: &FieldDescriptor,
    coeffs: &[FieldElement],
) -> Result<(usize, Vec<FieldElement>)> {
    if ambient.layer() == Layer::Tower {
        let monos: Vec<TowerMonomial> = coeffs
            .iter()
            .map(|c| c.as_tower().cloned().expect("tower coefficients"))
            .collect();
        let (even, odd) = split_parts(&monos);
        let inner = ambient.drop_outer_uniformizer();
        let to_inner = |items: &[(usize, i64, TowerMonomial)]| -> Vec<FieldElement> {
            items
                .iter()
                .map(|(_, _, m)| {
                    if inner.tower_depth() == 0 {
                        inner.base_descriptor().scalar_element(m.scalar.clone())
                    } else {
                        FieldElement::Tower(m.clone())
                    }
                })
                .collect()
        };
        let (ie, ke) = witt_recurse(&inner, &to_inner(&even))?;
        let (io, ko) = witt_recurse(&inner, &to_inner(&odd))?;
        // lift kernels back: even-part coefficients are uniformizer-free,
        // odd-part coefficients carry one power of the uniformizer
        let lift = |inner_coeffs: Vec<FieldElement>, parity: i64| -> Vec<FieldElement> {
            inner_coeffs
                .into_iter()
                .map(|c| {
                    let m = match c {
                        FieldElement::Tower(m) => m,
                        other => TowerMonomial {
                            scalar: element_scalar(&other).expect("base scalar"),
                            exps: Vec::new(),
                        },
                    };
                    let mut exps = m.exps;
                    exps.push(parity);
                    FieldElement::Tower(TowerMonomial {
                        scalar: m.scalar,
                        exps,
                    })
                })
                .collect()
        };
        let mut kernel = lift(ke, 0);
        kernel.extend(lift(ko, 1));
        return Ok((ie + io, kernel));
    }
    // base case
    let n = coeffs.len();
    match ambient.kind() {
        BaseKind::SymbolicAc(_) => {
            let index = n / 2;
            let kernel = if n % 2 == 1 {
                vec![ambient.one()]
            } else {
                Vec::new()
            };
            Ok((index, kernel))
        }
        BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. } => {
            if n == 0 {
                return Ok((0, Vec::new()));
            }
            let ctx = ambient.fq_ctx().expect("finite base");
            let mut disc = ctx.one();
            for c in coeffs {
                match c {
                    FieldElement::Fq(a) => disc = disc.mul(a),
                    _ => unreachable!("finite base scalars"),
                }
            }
            let minus_one = ctx.one().neg();
            if n % 2 == 0 {
                let m = n / 2;
                let test = disc.mul(&minus_one.pow(m as u64));
                if test.is_square() {
                    Ok((m, Vec::new()))
                } else {
                    let m = (n - 2) / 2;
                    let delta = disc.mul(&minus_one.pow(m as u64));
                    Ok((
                        m,
                        vec![
                            FieldElement::Fq(ctx.one()),
                            FieldElement::Fq(delta),
                        ],
                    ))
                }
            } else {
                let m = (n - 1) / 2;
                let delta = disc.mul(&minus_one.pow(m as u64));
                Ok((m, vec![FieldElement::Fq(delta)]))
            }
        }
        BaseKind::Rationals => Err(Error::unsupported(
            "witt decomposition over the rationals is not provided",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;

    fn form(field: &str, coeffs: &str) -> DiagonalForm {
        let f = make_field(field).unwrap();
        let cs = f.parse_form(coeffs).unwrap();
        DiagonalForm::quadratic(f, cs).unwrap()
    }

    /// Brute-force zero search over all vectors of F_q^n (test oracle).
    fn brute_force_fq_isotropic(q: &DiagonalForm) -> bool {
        let ctx = q.ambient().fq_ctx().unwrap().clone();
        let n = q.dim();
        let total = (ctx.q() as u128).pow(n as u32);
        for code in 1..total {
            let mut c = code;
            let coords: Vec<WitnessCoord> = (0..n)
                .map(|_| {
                    let e = ctx.element_by_index((c % ctx.q() as u128) as u64);
                    c /= ctx.q() as u128;
                    if e.is_zero() {
                        WitnessCoord::Zero
                    } else {
                        WitnessCoord::Value(FieldElement::Fq(e))
                    }
                })
                .collect();
            if q.vanishes_at(&coords).unwrap() {
                return true;
            }
        }
        false
    }

    #[test]
    fn finite_base_isotropy_matches_brute_force() {
        // <1,1> over F3 is anisotropic: checked against all 9 pairs
        let q = form("F3", "1,1");
        assert!(!brute_force_fq_isotropic(&q));
        assert!(!is_isotropic(&q).unwrap().isotropic);

        let q = form("F3", "1,1,1");
        assert!(brute_force_fq_isotropic(&q));
        let v = is_isotropic(&q).unwrap();
        assert!(v.isotropic);
        assert!(q.vanishes_at(v.witness.as_ref().unwrap()).unwrap());

        // randomized agreement for small q and dim
        for qname in ["F3", "F5", "F7", "F9=F3[y^2+1]"] {
            let f = make_field(qname).unwrap();
            let ctx = f.fq_ctx().unwrap().clone();
            let mut seed = 12345u64;
            for _ in 0..30 {
                let dim = 2 + (seed % 2) as usize;
                let mut coeffs = Vec::new();
                for _ in 0..dim {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                    let idx = 1 + seed % (ctx.q() - 1);
                    coeffs.push(FieldElement::Fq(ctx.element_by_index(idx)));
                }
                let q = DiagonalForm::quadratic(f.clone(), coeffs).unwrap();
                assert_eq!(
                    is_isotropic(&q).unwrap().isotropic,
                    brute_force_fq_isotropic(&q),
                    "{qname} {:?}",
                    q.display_coeffs()
                );
            }
        }
    }

    #[test]
    fn rational_forms() {
        // positive definite
        let q = form("Q", "1,1,1,1");
        let v = is_isotropic(&q).unwrap();
        assert!(!v.isotropic);
        assert!(matches!(
            v.certificate,
            Some(Certificate::Local {
                place: Place::Infinity,
                ..
            })
        ));
        // x^2 - 2y^2: anisotropic with 2-adic obstruction
        let q = form("Q", "1,-2");
        assert!(!is_isotropic(&q).unwrap().isotropic);
        // x^2 - 4y^2 isotropic with exact witness
        let q = form("Q", "1,-4");
        let v = is_isotropic(&q).unwrap();
        assert!(v.isotropic);
        assert!(q.vanishes_at(v.witness.as_ref().unwrap()).unwrap());
        // 1,1,-3 over Q: x^2+y^2 = 3z^2 has no solution (3-adic / mod 4)
        let q = form("Q", "1,1,-3");
        assert!(!is_isotropic(&q).unwrap().isotropic);
        // 1,1,-2: 1+1 = 2
        let q = form("Q", "1,1,-2");
        let v = is_isotropic(&q).unwrap();
        assert!(v.isotropic);
        assert!(q.vanishes_at(v.witness.as_ref().unwrap()).unwrap());
        // five indefinite variables are always isotropic
        let q = form("Q", "1,2,3,4,-7");
        let v = is_isotropic(&q).unwrap();
        assert!(v.isotropic);
        if let Some(w) = &v.witness {
            assert!(q.vanishes_at(w).unwrap());
        }
    }

    #[test]
    fn hilbert_symbol_examples() {
        let r = |n: i64| BigRational::from_integer(n.into());
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), Place::Infinity).unwrap(), -1);
        // primitive-solution oracle mod 8: x^2+y^2+z^2 = 0 has none
        let mut found = false;
        for x in 0..8u64 {
            for y in 0..8u64 {
                for z in 0..8u64 {
                    if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                        continue;
                    }
                    if (x * x + y * y + z * z) % 8 == 0 {
                        found = true;
                    }
                }
            }
        }
        assert!(!found);
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), Place::Prime(2)).unwrap(), -1);
        // primitive-solution oracle mod 27 for (2,3) at 3
        let mut found = false;
        for x in 0..27u64 {
            for y in 0..27u64 {
                for z in 0..27u64 {
                    if x % 3 == 0 && y % 3 == 0 && z % 3 == 0 {
                        continue;
                    }
                    if (2 * x * x + 3 * y * y + 27 * 27) % 27 == (z * z) % 27 {
                        found = true;
                    }
                }
            }
        }
        assert!(!found);
        assert_eq!(hilbert_symbol(&r(2), &r(3), Place::Prime(3)).unwrap(), -1);
        assert!(hilbert_symbol(&r(0), &r(1), Place::Prime(2)).is_err());
        assert!(hilbert_symbol(&r(1), &r(1), Place::Prime(4)).is_err());
    }

    #[test]
    fn springer_split_examples() {
        let q = form("F3((t))", "1,t");
        let (even, odd) = springer_split(&q, "t").unwrap();
        assert_eq!(even.display_coeffs(), vec!["1"]);
        assert_eq!(odd.display_coeffs(), vec!["1"]);

        let q = form("F3((t))", "t^2,2*t^3");
        let (even, odd) = springer_split(&q, "t").unwrap();
        assert_eq!(even.display_coeffs(), vec!["1"]);
        assert_eq!(odd.display_coeffs(), vec!["2"]);

        let q = form("F3((t))", "1,2");
        let (even, odd) = springer_split(&q, "t").unwrap();
        assert_eq!(even.display_coeffs(), vec!["1", "2"]);
        assert_eq!(odd.dim(), 0);

        assert!(springer_split(&form("F3", "1,2"), "t").is_err());
    }

    #[test]
    fn tower_isotropy_and_witnesses() {
        // the 2-fold construction over AC0((t1))((t2)) is anisotropic
        let q = form("AC0((t1))((t2))", "1,t1,t2,t1*t2");
        let v = is_isotropic(&q).unwrap();
        assert!(!v.isotropic);
        assert!(matches!(v.certificate, Some(Certificate::Residue { .. })));

        // <1,t,-t,-1> contains a hyperbolic pair in each residue part
        let q = form("F3((t))", "1,t,-t,-1");
        let v = is_isotropic(&q).unwrap();
        assert!(v.isotropic);
        assert!(q.vanishes_at(v.witness.as_ref().unwrap()).unwrap());

        // witness lifting pulls down square powers of the uniformizer
        let q = form("F5((t))", "t^2,-t^4");
        let v = is_isotropic(&q).unwrap();
        assert!(v.isotropic);
        assert!(q.vanishes_at(v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn represents_examples() {
        let f = make_field("F3((t))").unwrap();
        let q = form("F3((t))", "1,t");
        let t = f.parse_element("t").unwrap();
        assert!(represents(&q, &t).unwrap());
        let two = f.parse_element("2").unwrap();
        assert!(!represents(&q, &two).unwrap());

        let q3 = form("F3", "1,1,1");
        let f3 = make_field("F3").unwrap();
        assert!(represents(&q3, &f3.parse_element("2").unwrap()).unwrap());
    }

    #[test]
    fn universality_examples() {
        let q = form("AC0((t1))((t2))", "1,t1,t2,t1*t2");
        assert!(is_universal(&q).unwrap());

        let q = form("F3((t))", "1,t");
        let u = universality(&q).unwrap();
        assert!(!u.universal);
        let f = make_field("F3((t))").unwrap();
        assert_eq!(
            f.display_element(&u.missed_class.unwrap()),
            "2"
        );

        let q = form("F3", "1,1,1");
        assert!(is_universal(&q).unwrap());

        assert!(is_universal(&form("Q", "1,1")).is_err());
    }

    #[test]
    fn witt_decomposition_examples() {
        let d = witt_decompose(&form("F5", "1,-1")).unwrap();
        assert_eq!(d.witt_index, 1);
        assert_eq!(d.kernel.dim(), 0);
        assert!(d.is_hyperbolic());

        // -1 is a square in F5
        let d = witt_decompose(&form("F5", "1,1")).unwrap();
        assert_eq!(d.witt_index, 1);
        assert!(d.is_hyperbolic());

        let d = witt_decompose(&form("F3", "1,1")).unwrap();
        assert_eq!(d.witt_index, 0);
        assert_eq!(d.kernel.display_coeffs(), vec!["1", "1"]);

        assert!(witt_decompose(&form("Q", "1,-1")).is_err());
    }

    #[test]
    fn witt_agrees_with_isotropy_over_towers() {
        let fields = ["F3((t))", "F5((t))", "F3((t1))((t2))", "AC0((t1))((t2))"];
        let mut seed = 99u64;
        for fname in fields {
            let f = make_field(fname).unwrap();
            let reps = f.square_class_reps().unwrap();
            for _ in 0..40 {
                let mut coeffs = Vec::new();
                let dim = 1 + (seed % 4) as usize;
                for _ in 0..dim {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(99);
                    coeffs.push(reps[(seed >> 13) as usize % reps.len()].clone());
                }
                let q = DiagonalForm::quadratic(f.clone(), coeffs).unwrap();
                let iso = is_isotropic(&q).unwrap().isotropic;
                let w = witt_decompose(&q).unwrap();
                assert_eq!(w.witt_index >= 1, iso, "{fname} {:?}", q.display_coeffs());
                // kernel must be anisotropic
                if w.kernel.dim() > 0 {
                    assert!(!is_isotropic(&w.kernel).unwrap().isotropic);
                }
                // dimensions match up
                assert_eq!(2 * w.witt_index + w.kernel.dim(), q.dim());
            }
        }
    }

    #[test]
    fn scaling_invariance() {
        let f = make_field("F5((t))").unwrap();
        let reps = f.square_class_reps().unwrap();
        let mut seed = 7u64;
        for _ in 0..50 {
            let dim = 2 + (seed % 3) as usize;
            let mut coeffs = Vec::new();
            for _ in 0..dim {
                seed = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                coeffs.push(reps[(seed >> 20) as usize % reps.len()].clone());
            }
            let q = DiagonalForm::quadratic(f.clone(), coeffs).unwrap();
            seed = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            let c = &reps[(seed >> 17) as usize % reps.len()];
            let scaled = q.scale(c).unwrap();
            assert_eq!(
                is_isotropic(&q).unwrap().isotropic,
                is_isotropic(&scaled).unwrap().isotropic
            );
        }
    }

    #[test]
    fn char_two_is_rejected() {
        let f = make_field("F2").unwrap();
        let coeffs = vec![f.one(), f.one()];
        assert!(DiagonalForm::quadratic(f, coeffs).is_err());
    }
}
