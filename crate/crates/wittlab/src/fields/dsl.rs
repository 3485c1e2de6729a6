//! Textual grammar for field descriptors and element expressions.
//!
//! ```text
//! base   := "F" INT [ "[" polynomial "]" ] | "Q" | "AC" INT
//! field  := base | base "(" IDENT ("," IDENT)* ")" | base ("((" IDENT "))")+
//! ```
//!
//! Element expressions use variables, `+`, `-`, `*`, `/`, `^` and integer
//! literals; `F9=F3[y^2+1]` is accepted as a checked synonym for the
//! bracketed form.

use num::BigRational;

use crate::error::{Error, Result};
use crate::fields::poly::{Coef, CoefCtx, MPoly};
use crate::fields::ratfunc::RatFunc;
use crate::fields::{
    AcUnit, BaseKind, FieldDescriptor, FieldElement, Layer, Scalar, TowerMonomial,
};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(digit) = d.to_digit(10) {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(digit as u64))
                            .ok_or_else(|| Error::parse("integer literal too large"))?;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Int(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(name));
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            other => return Err(Error::parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    ctx: CoefCtx,
    vars: Vec<&'a str>,
    ext_var: Option<&'a str>,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Star => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Token::Slash => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let mut sign = 1i64;
            if self.peek() == Some(&Token::Minus) {
                self.bump();
                sign = -1;
            }
            match self.bump() {
                Some(Token::Int(e)) => {
                    let e = i64::try_from(e)
                        .map_err(|_| Error::parse("exponent too large"))?;
                    return base.pow(sign * e);
                }
                _ => return Err(Error::parse("expected an integer exponent after ^")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.bump() {
            Some(Token::Int(n)) => {
                let n = i64::try_from(n).map_err(|_| Error::parse("literal too large"))?;
                Ok(RatFunc::constant(
                    self.ctx.clone(),
                    self.vars.len(),
                    self.ctx.from_i64(n),
                ))
            }
            Some(Token::Ident(name)) => {
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    return Ok(RatFunc::var(self.ctx.clone(), self.vars.len(), idx));
                }
                if self.ext_var == Some(name.as_str()) {
                    if let CoefCtx::Fq(fq) = &self.ctx {
                        return Ok(RatFunc::constant(
                            self.ctx.clone(),
                            self.vars.len(),
                            Coef::Fq(fq.gen()),
                        ));
                    }
                }
                Err(Error::parse(format!("unknown identifier {name:?}")))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                if self.bump() != Some(Token::RParen) {
                    return Err(Error::parse("missing closing parenthesis"));
                }
                Ok(inner)
            }
            other => Err(Error::parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses an element expression and coerces it into the descriptor's layer.
pub fn parse_element(field: &FieldDescriptor, input: &str) -> Result<FieldElement> {
    let vars: Vec<&str> = match field.layer() {
        Layer::Function => field.function_vars().iter().map(String::as_str).collect(),
        Layer::Tower => field
            .tower_uniformizers()
            .iter()
            .map(String::as_str)
            .collect(),
        Layer::Base => Vec::new(),
    };
    let ext_var = match field.kind() {
        BaseKind::FiniteExt { var, .. } => Some(var.as_str()),
        _ => None,
    };
    let mut parser = ExprParser {
        tokens: tokenize(input)?,
        pos: 0,
        ctx: field.coef_ctx(),
        vars,
        ext_var,
    };
    let rf = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::parse("trailing input after expression"));
    }
    coerce(field, rf)
}

fn coef_to_scalar(field: &FieldDescriptor, c: Coef) -> Result<Scalar> {
    match (field.kind(), c) {
        (BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. }, Coef::Fq(a)) => Ok(Scalar::Fq(a)),
        (BaseKind::Rationals, Coef::Rat(a)) => Ok(Scalar::Rat(a)),
        (BaseKind::SymbolicAc(0), Coef::Rat(a)) => Ok(Scalar::Ac(AcUnit::new(0, a)?)),
        (BaseKind::SymbolicAc(p), Coef::Fq(a)) => {
            let v = a.coeffs().first().copied().unwrap_or(0);
            Ok(Scalar::Ac(AcUnit::new(
                *p,
                BigRational::from_integer(v.into()),
            )?))
        }
        _ => Err(Error::invalid("coefficient kind does not match the base field")),
    }
}

fn coerce(field: &FieldDescriptor, rf: RatFunc) -> Result<FieldElement> {
    match field.layer() {
        Layer::Function => Ok(FieldElement::Fun(rf)),
        Layer::Base => {
            let c = rf
                .constant_value()
                .ok_or_else(|| Error::parse("expected a constant over this base field"))?;
            match (field.kind(), c) {
                (BaseKind::PrimeFinite(_) | BaseKind::FiniteExt { .. }, Coef::Fq(a)) => {
                    Ok(FieldElement::Fq(a))
                }
                (BaseKind::Rationals, Coef::Rat(a)) => Ok(FieldElement::Rat(a)),
                (BaseKind::SymbolicAc(_), c) => {
                    let s = coef_to_scalar(field, c)?;
                    Ok(field.scalar_element(s))
                }
                _ => Err(Error::invalid("coefficient kind does not match the base field")),
            }
        }
        Layer::Tower => {
            if rf.is_zero() {
                return Err(Error::invalid("zero is not a tower monomial"));
            }
            let (c, exps) = rf.as_monomial().ok_or_else(|| {
                Error::invalid("tower elements must be monomials in the uniformizers")
            })?;
            let scalar = coef_to_scalar(field, c)?;
            Ok(FieldElement::Tower(TowerMonomial::new(scalar, exps)?))
        }
    }
}

/// Character-level parser for the descriptor grammar.
pub fn parse_descriptor(input: &str) -> Result<FieldDescriptor> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = DescParser { s: &s, pos: 0 };
    let kind = p.base()?;
    // "Fq=<base>" synonym: check the claimed order
    let kind = if p.peek() == Some('=') {
        p.pos += 1;
        let claimed = match kind {
            BaseKind::PrimeFinite(q) => q,
            _ => return Err(Error::parse("only a plain order may precede '='")),
        };
        let real = p.base()?;
        let q = match &real {
            BaseKind::PrimeFinite(p) => *p,
            BaseKind::FiniteExt { p, modulus, .. } => {
                let deg = (modulus.len() - 1) as u32;
                p.checked_pow(deg)
                    .ok_or_else(|| Error::invalid("field too large"))?
            }
            _ => return Err(Error::parse("'=' expects a finite field on the right")),
        };
        if q != claimed {
            return Err(Error::invalid(format!(
                "claimed order {claimed} but the modulus defines order {q}"
            )));
        }
        real
    } else {
        kind
    };
    let mut desc = FieldDescriptor::new(kind)?;
    if p.lookahead("((") {
        let mut unifs = Vec::new();
        while p.lookahead("((") {
            p.pos += 2;
            unifs.push(p.ident()?);
            p.expect_str("))")?;
        }
        desc = desc.with_tower(unifs)?;
    } else if p.peek() == Some('(') {
        p.pos += 1;
        let mut vars = vec![p.ident()?];
        while p.peek() == Some(',') {
            p.pos += 1;
            vars.push(p.ident()?);
        }
        p.expect_str(")")?;
        desc = desc.with_function_vars(vars)?;
    }
    if p.pos != p.s.len() {
        return Err(Error::parse(format!(
            "trailing input {:?} in field descriptor",
            &p.s[p.pos..]
        )));
    }
    Ok(desc)
}

struct DescParser<'a> {
    s: &'a str,
    pos: usize,
}

impl DescParser<'_> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn lookahead(&self, pat: &str) -> bool {
        self.s[self.pos..].starts_with(pat)
    }

    fn expect_str(&mut self, pat: &str) -> Result<()> {
        if self.lookahead(pat) {
            self.pos += pat.len();
            Ok(())
        } else {
            Err(Error::parse(format!(
                "expected {pat:?} at {:?}",
                &self.s[self.pos..]
            )))
        }
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse("expected an integer"));
        }
        self.s[start..self.pos]
            .parse()
            .map_err(|_| Error::parse("integer too large"))
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return Err(Error::parse("expected an identifier"));
        }
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        Ok(self.s[start..self.pos].to_string())
    }

    fn base(&mut self) -> Result<BaseKind> {
        if self.lookahead("AC") {
            self.pos += 2;
            let c = self.int()?;
            return Ok(BaseKind::SymbolicAc(c));
        }
        if self.peek() == Some('Q') {
            self.pos += 1;
            return Ok(BaseKind::Rationals);
        }
        if self.peek() == Some('F') {
            self.pos += 1;
            let p = self.int()?;
            if self.peek() == Some('[') {
                self.pos += 1;
                let close = self.s[self.pos..]
                    .find(']')
                    .ok_or_else(|| Error::parse("missing ']' after modulus"))?;
                let body = &self.s[self.pos..self.pos + close];
                self.pos += close + 1;
                let (var, modulus) = parse_modulus(p, body)?;
                return Ok(BaseKind::FiniteExt { p, modulus, var });
            }
            return Ok(BaseKind::PrimeFinite(p));
        }
        Err(Error::parse("expected a base field (F<p>, Q, or AC<c>)"))
    }
}

/// Parses a univariate modulus polynomial over `F_p`, returning its variable
/// name and dense coefficient list (constant first).
fn parse_modulus(p: u64, body: &str) -> Result<(String, Vec<u64>)> {
    let tokens = tokenize(body)?;
    let mut var: Option<String> = None;
    for t in &tokens {
        if let Token::Ident(name) = t {
            match &var {
                None => var = Some(name.clone()),
                Some(v) if v == name => {}
                Some(_) => {
                    return Err(Error::parse("modulus must be univariate"));
                }
            }
        }
    }
    let var = var.ok_or_else(|| Error::parse("modulus has no variable"))?;
    let fq = crate::fields::fq::FqCtx::prime(p)?;
    let ctx = CoefCtx::Fq(fq);
    let vars_owned = var.clone();
    let mut parser = ExprParser {
        tokens,
        pos: 0,
        ctx,
        vars: vec![vars_owned.as_str()],
        ext_var: None,
    };
    let rf = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::parse("trailing input in modulus"));
    }
    if !rf.is_polynomial() {
        return Err(Error::parse("modulus must be a polynomial"));
    }
    let poly: &MPoly = rf.num();
    let deg = poly
        .deg_in(0)
        .ok_or_else(|| Error::parse("modulus must be nonzero"))? as usize;
    let mut coeffs = vec![0u64; deg + 1];
    for (e, c) in poly.terms() {
        let v = match c {
            Coef::Fq(a) => a.coeffs().first().copied().unwrap_or(0),
            Coef::Rat(_) => unreachable!("modulus coefficients are finite"),
        };
        coeffs[e[0] as usize] = v;
    }
    Ok((var, coeffs))
}

#[cfg(test)]
mod tests {
    use crate::fields::make_field;

    #[test]
    fn descriptor_grammar_errors() {
        for bad in [
            "", "G5", "F", "F0", "F6", "Fx", "Q((", "F3((t)", "F3(t))", "F3()", "AC", "ACx",
            "F8=F3[y^2+1]", "F3[y*z]", "F3 nonsense", "Q extra",
        ] {
            assert!(make_field(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn element_expressions() {
        let f = make_field("F5((t))").unwrap();
        assert!(f.parse_element("1+t").is_err());
        assert!(f.parse_element("0").is_err());
        assert!(f.parse_element("1/0").is_err());
        let e = f.parse_element("3*t^2/t").unwrap();
        assert_eq!(f.display_element(&e), "3*t");

        let q = make_field("Q").unwrap();
        let h = q.parse_element("3/4").unwrap();
        assert_eq!(q.display_element(&h), "3/4");
        let neg = q.parse_element("-2^2").unwrap();
        assert_eq!(q.display_element(&neg), "-4");
    }

    #[test]
    fn extension_variable_in_elements() {
        let f9 = make_field("F9=F3[y^2+1]").unwrap();
        let e = f9.parse_element("y^2").unwrap();
        // y^2 = -1 = 2 in F9
        assert_eq!(f9.display_element(&e), "2");
    }
}
