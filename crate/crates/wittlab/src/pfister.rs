//! Pfister forms, their degree-p analogues, hyperbolicity, and the
//! three-legged consistency check tying representation, hyperbolicity of the
//! extended form, and vanishing of the matching mod-2 symbol.

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElement, Layer};
use crate::milnor::{symbol_is_zero_mod2, MilnorSymbol};
use crate::quadform::{is_isotropic, represents, witt_decompose, DiagonalForm};

/// Generators of a Pfister form `<<a1, ..., an>>`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfisterSpec {
    ambient: FieldDescriptor,
    generators: Vec<FieldElement>,
}

impl PfisterSpec {
    pub fn new(ambient: FieldDescriptor, generators: Vec<FieldElement>) -> Result<PfisterSpec> {
        for g in &generators {
            ambient.check_element(g)?;
            if g.is_zero() {
                return Err(Error::invalid("pfister generators must be nonzero"));
            }
        }
        Ok(PfisterSpec {
            ambient,
            generators,
        })
    }

    pub fn ambient(&self) -> &FieldDescriptor {
        &self.ambient
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    /// The spec with one more generator appended.
    pub fn extended(&self, a: FieldElement) -> Result<PfisterSpec> {
        let mut gens = self.generators.clone();
        gens.push(a);
        PfisterSpec::new(self.ambient.clone(), gens)
    }
}

/// Candidates `B_r = (t1, ..., tr)` for the degree-`p` form with `p^r`
/// monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PFormSpec {
    ambient: FieldDescriptor,
    basis_candidates: Vec<FieldElement>,
    p: u64,
}

impl PFormSpec {
    pub fn new(
        ambient: FieldDescriptor,
        basis_candidates: Vec<FieldElement>,
        p: u64,
    ) -> Result<PFormSpec> {
        if basis_candidates.is_empty() {
            return Err(Error::invalid("need at least one basis candidate"));
        }
        if !is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let char_k = ambient.characteristic();
        if char_k != 0 && char_k != p {
            return Err(Error::invalid(format!(
                "degree-{p} forms need characteristic {p} or 0, found {char_k}"
            )));
        }
        for c in &basis_candidates {
            ambient.check_element(c)?;
            if c.is_zero() {
                return Err(Error::invalid("basis candidates must be nonzero"));
            }
        }
        Ok(PFormSpec {
            ambient,
            basis_candidates,
            p,
        })
    }

    pub fn ambient(&self) -> &FieldDescriptor {
        &self.ambient
    }

    pub fn candidates(&self) -> &[FieldElement] {
        &self.basis_candidates
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Expands `<<a1, ..., an>>` into its `2^n` diagonal coefficients, the
/// subset products of the generators enumerated by binary counting on the
/// generator indices (`<<a>> = <1, a>`, the "+" sign convention).
pub fn pfister(spec: &PfisterSpec) -> Result<DiagonalForm> {
    let n = spec.generators.len();
    if n >= 20 {
        return Err(Error::invalid("too many generators"));
    }
    let f = &spec.ambient;
    let mut coeffs = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let mut c = f.one();
        for (i, g) in spec.generators.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                c = f.mul(&c, g)?;
            }
        }
        coeffs.push(c);
    }
    DiagonalForm::quadratic(f.clone(), coeffs)
}

/// The degree-`p` form with coefficients `t1^(i1) ... tr^(ir)` over all
/// multi-indices `0 <= i_j < p`, enumerated by base-`p` counting. For
/// `p = 2` in characteristic != 2 this is the Pfister expansion.
pub fn char_p_form(spec: &PFormSpec) -> Result<DiagonalForm> {
    let r = spec.basis_candidates.len() as u32;
    let p = spec.p;
    let total = p
        .checked_pow(r)
        .filter(|&t| t <= 1 << 20)
        .ok_or_else(|| Error::invalid("form dimension overflows the cap"))?;
    let f = &spec.ambient;
    let mut coeffs = Vec::with_capacity(total as usize);
    for m in 0..total {
        let mut c = f.one();
        let mut k = m;
        for t in &spec.basis_candidates {
            let digit = (k % p) as i64;
            k /= p;
            if digit > 0 {
                c = f.mul(&c, &f.pow(t, digit)?)?;
            }
        }
        coeffs.push(c);
    }
    DiagonalForm::of_degree(f.clone(), coeffs, p)
}

/// A Pfister form is hyperbolic iff it is isotropic; over ambients with a
/// Witt decomposition the index is cross-checked in debug builds.
pub fn is_hyperbolic_pfister(spec: &PfisterSpec) -> Result<bool> {
    let q = pfister(spec)?;
    let iso = is_isotropic(&q)?.isotropic;
    if cfg!(debug_assertions) && !q.ambient().is_rational_base() {
        if let Ok(w) = witt_decompose(&q) {
            debug_assert_eq!(
                w.is_hyperbolic(),
                iso,
                "pfister forms are hyperbolic exactly when isotropic"
            );
        }
    }
    Ok(iso)
}

/// The three independently computed legs of the representation /
/// hyperbolicity / symbol equivalence for Pfister forms.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkageReport {
    /// `q` represents `-a`.
    pub represents_neg: bool,
    /// `<<a1, ..., an, a>>` is hyperbolic.
    pub hyperbolic: bool,
    /// The symbol on `(-a1, ..., -an, -a)` vanishes mod 2.
    pub symbol_zero: bool,
    pub agree: bool,
}

/// Runs all three legs over a tower with finite odd base, where each leg
/// has a terminating decision procedure (`l = 2`).
pub fn linkage_check(spec: &PfisterSpec, a: &FieldElement) -> Result<LinkageReport> {
    let f = &spec.ambient;
    if f.layer() != Layer::Tower || !f.is_finite_base() || f.characteristic() == 2 {
        return Err(Error::unsupported(
            "linkage checks need an iterated Laurent tower over a finite odd base",
        ));
    }
    f.check_element(a)?;
    if a.is_zero() {
        return Err(Error::invalid("linkage value must be nonzero"));
    }

    let q = pfister(spec)?;
    let represents_neg = represents(&q, &f.neg(a))?;

    let hyperbolic = is_hyperbolic_pfister(&spec.extended(a.clone())?)?;

    let mut entries: Vec<FieldElement> = spec.generators.iter().map(|g| f.neg(g)).collect();
    entries.push(f.neg(a));
    let symbol = MilnorSymbol::new(f.clone(), entries)?;
    let symbol_zero = symbol_is_zero_mod2(&symbol)?;

    let agree = represents_neg == hyperbolic && hyperbolic == symbol_zero;
    Ok(LinkageReport {
        represents_neg,
        hyperbolic,
        symbol_zero,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;

    fn spec(field: &str, gens: &str) -> PfisterSpec {
        let f = make_field(field).unwrap();
        let g = if gens.is_empty() {
            Vec::new()
        } else {
            f.parse_form(gens).unwrap()
        };
        PfisterSpec::new(f, g).unwrap()
    }

    #[test]
    fn pfister_expansion() {
        let q = pfister(&spec("Q", "5")).unwrap();
        assert_eq!(q.display_coeffs(), vec!["1", "5"]);

        let q = pfister(&spec("F3((t))", "t,2")).unwrap();
        assert_eq!(q.display_coeffs(), vec!["1", "t", "2", "2*t"]);

        let q = pfister(&spec("Q", "")).unwrap();
        assert_eq!(q.display_coeffs(), vec!["1"]);
    }

    #[test]
    fn tensor_consistency() {
        // <<a1,...,an>> = <<a1,...,a_{n-1}>> tensor <1, a_n> under the fixed
        // enumeration: the second block repeats the first scaled by a_n
        let f = make_field("F5((t1))((t2))").unwrap();
        let gens = f.parse_form("t1,2*t2,t1*t2").unwrap();
        let full = pfister(&PfisterSpec::new(f.clone(), gens.clone()).unwrap()).unwrap();
        let head = pfister(&PfisterSpec::new(f.clone(), gens[..2].to_vec()).unwrap()).unwrap();
        let half = head.dim();
        for i in 0..half {
            assert_eq!(full.coeffs()[i], head.coeffs()[i]);
            let scaled = f.mul(&head.coeffs()[i], &gens[2]).unwrap();
            assert_eq!(full.coeffs()[half + i], scaled);
        }
    }

    #[test]
    fn char_p_form_examples() {
        let f = make_field("F2(x)").unwrap();
        let t = f.parse_element("x").unwrap();
        let q = char_p_form(&PFormSpec::new(f, vec![t], 2).unwrap()).unwrap();
        assert_eq!(q.display_coeffs(), vec!["1", "x"]);
        assert_eq!(q.degree(), 2);

        let f = make_field("F3(x)").unwrap();
        let t = f.parse_element("x").unwrap();
        let q = char_p_form(&PFormSpec::new(f, vec![t], 3).unwrap()).unwrap();
        assert_eq!(q.display_coeffs(), vec!["1", "x", "x^2"]);
        assert_eq!(q.degree(), 3);

        // p = 2 with two candidates matches the pfister coefficient list
        let f = make_field("AC0((t1))((t2))").unwrap();
        let gens = f.parse_form("t1,t2").unwrap();
        let viap = char_p_form(&PFormSpec::new(f.clone(), gens.clone(), 2).unwrap()).unwrap();
        let viapf = pfister(&PfisterSpec::new(f, gens).unwrap()).unwrap();
        assert_eq!(viap.coeffs(), viapf.coeffs());

        // characteristic mismatch is rejected
        let f = make_field("F5(x)").unwrap();
        let t = f.parse_element("x").unwrap();
        assert!(PFormSpec::new(f, vec![t], 3).is_err());
    }

    #[test]
    fn hyperbolicity() {
        // <<t, -t>> contains <t, -t>
        let f = make_field("F3((t))").unwrap();
        let gens = f.parse_form("t,-t").unwrap();
        assert!(is_hyperbolic_pfister(&PfisterSpec::new(f, gens).unwrap()).unwrap());

        // the anisotropic 2-fold construction
        assert!(!is_hyperbolic_pfister(&spec("AC0((t1))((t2))", "t1,t2")).unwrap());

        // -1 is a square in F5
        assert!(is_hyperbolic_pfister(&spec("F5", "-1")).unwrap());
    }

    #[test]
    fn square_scaling_preserves_hyperbolicity() {
        let f = make_field("F3((t))").unwrap();
        let reps = f.square_class_reps().unwrap();
        let squares: Vec<FieldElement> = ["1", "4", "t^2", "4*t^2", "t^-2"]
            .iter()
            .map(|s| f.parse_element(s).unwrap())
            .collect();
        for a in &reps {
            for b in &reps {
                let gens = vec![a.clone(), b.clone()];
                let base = is_hyperbolic_pfister(&PfisterSpec::new(f.clone(), gens).unwrap())
                    .unwrap();
                for s in &squares {
                    let gens = vec![f.mul(a, s).unwrap(), b.clone()];
                    let scaled =
                        is_hyperbolic_pfister(&PfisterSpec::new(f.clone(), gens).unwrap())
                            .unwrap();
                    assert_eq!(base, scaled);
                }
            }
        }
    }

    #[test]
    fn linkage_examples() {
        let f = make_field("F3((t))").unwrap();
        let t = f.parse_element("t").unwrap();
        let sp = PfisterSpec::new(f.clone(), vec![t]).unwrap();

        // a = -t: all three legs hold
        let a = f.parse_element("-t").unwrap();
        let r = linkage_check(&sp, &a).unwrap();
        assert!(r.agree);
        assert!(r.represents_neg && r.hyperbolic && r.symbol_zero);

        // a = -2: all three legs fail
        let a = f.parse_element("-2").unwrap();
        let r = linkage_check(&sp, &a).unwrap();
        assert!(r.agree);
        assert!(!r.represents_neg && !r.hyperbolic && !r.symbol_zero);

        // a = -1: every form represents 1
        let a = f.parse_element("-1").unwrap();
        let r = linkage_check(&sp, &a).unwrap();
        assert!(r.agree);
        assert!(r.represents_neg && r.hyperbolic && r.symbol_zero);

        // unsupported ambient rejects rather than skipping a leg
        let q = make_field("Q").unwrap();
        let sp = PfisterSpec::new(q.clone(), vec![q.from_i64(3).unwrap()]).unwrap();
        assert!(linkage_check(&sp, &q.from_i64(5).unwrap()).is_err());
    }
}
