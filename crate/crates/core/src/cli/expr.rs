//! Recursive-descent parser for series and polynomial literals.
//!
//! ```text
//! series   := ('+'|'-')? term (('+'|'-') term)*
//! term     := rational ('*' power)* | power ('*' power)*
//! power    := var uint ('^' uint)?
//! rational := uint ('/' uint)?
//! ```
//!
//! `var` is `g` for generators of a Grassmann algebra and `x` for base
//! coordinates of a polynomial. Indices are 1-based.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::domains::BasePolynomial;
use crate::error::{Error, Result};
use crate::galgebra::GrassmannAlgebra;
use crate::gseries::{normalize_monomial, GradedSeries, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    /// 0-based variable index.
    pub var: usize,
    pub power: u32,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: Rational,
    pub factors: Vec<Factor>,
    pub offset: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: u8,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an unsigned integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn small_uint(&mut self) -> Result<u32> {
        let at = self.pos;
        let v = self.uint()?;
        u32::try_from(v).map_err(|_| Error::Parse { offset: at, message: "integer too large".into() })
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.uint()?;
        if self.eat(b'/') {
            let at = self.pos;
            let den = self.uint()?;
            if den.is_zero() {
                return Err(Error::Parse { offset: at, message: "zero denominator".into() });
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    fn power(&mut self) -> Result<Factor> {
        self.skip_ws();
        let offset = self.pos;
        if self.src.get(self.pos) != Some(&self.var) {
            return self.err(format!("expected '{}<index>'", self.var as char));
        }
        self.pos += 1;
        if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return self.err("expected a variable index");
        }
        let idx = self.small_uint()?;
        if idx == 0 {
            return Err(Error::Parse { offset, message: "variable indices are 1-based".into() });
        }
        let power = if self.eat(b'^') { self.small_uint()? } else { 1 };
        Ok(Factor { var: idx as usize - 1, power, offset })
    }

    fn term(&mut self, sign: bool) -> Result<Term> {
        let offset = self.pos;
        let mut factors = Vec::new();
        let mut coefficient = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.rational()?,
            Some(c) if c == self.var => {
                factors.push(self.power()?);
                Rational::one()
            }
            Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            None => return self.err("unexpected end of input"),
        };
        while self.eat(b'*') {
            factors.push(self.power()?);
        }
        if sign {
            coefficient = -coefficient;
        }
        Ok(Term { coefficient, factors, offset })
    }

    fn series(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        loop {
            terms.push(self.term(negative)?);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    negative = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negative = true;
                }
                Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            }
        }
        Ok(terms)
    }
}

/// Parses `text` into raw terms without interpreting the variables.
pub fn parse_terms(text: &str, var: char) -> Result<Vec<Term>> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, var: var as u8 };
    p.series()
}

#[derive(Clone, Debug)]
pub struct ParsedSeries {
    pub series: GradedSeries,
    /// Square-zero cancellations and truncation drops.
    pub notes: Vec<String>,
}

/// Parses a series literal over `algebra`. Words are normalized with the
/// sign rule, so `g2*g1` may come back as `-g1*g2`.
pub fn parse_series_expression(text: &str, algebra: &GrassmannAlgebra) -> Result<ParsedSeries> {
    let terms = parse_terms(text, 'g')?;
    let sig = algebra.signature();
    let mut notes = Vec::new();
    let mut out = Vec::new();
    for t in terms {
        let mut word = Vec::new();
        for f in &t.factors {
            if f.var >= sig.num_generators() {
                return Err(Error::Parse {
                    offset: f.offset,
                    message: format!("unknown generator g{} (algebra has {})", f.var + 1, sig.num_generators()),
                });
            }
            word.extend(std::iter::repeat_n(f.var, f.power as usize));
        }
        let (sign, mono) = normalize_monomial(sig, &word)?;
        if sign == 0 {
            notes.push(format!("square-zero: term at byte {} vanishes", t.offset));
            continue;
        }
        if mono.total_order() > algebra.truncation() {
            notes.push(format!(
                "truncation: term at byte {} has order {} > K = {} and was dropped",
                t.offset,
                mono.total_order(),
                algebra.truncation()
            ));
            continue;
        }
        let c = if sign < 0 { -t.coefficient } else { t.coefficient };
        out.push((mono, c));
    }
    Ok(ParsedSeries { series: algebra.from_terms(out)?, notes })
}

/// Parses a polynomial in `x1..xp`.
pub fn parse_polynomial(text: &str, vars: usize) -> Result<BasePolynomial> {
    let terms = parse_terms(text, 'x')?;
    let mut poly = BasePolynomial::zero(vars);
    for t in terms {
        let mut exps = vec![0u32; vars];
        for f in &t.factors {
            if f.var >= vars {
                return Err(Error::Parse {
                    offset: f.offset,
                    message: format!("unknown variable x{} (polynomial has {vars})", f.var + 1),
                });
            }
            exps[f.var] += f.power;
        }
        poly.add_term(exps, t.coefficient);
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galgebra::make_algebra;
    use crate::gseries::{int, rat, Monomial};

    #[test]
    fn literal_examples() {
        let a = make_algebra(1, &[2], 6).unwrap();
        let s = parse_series_expression("3 + 2*g1*g2", &a).unwrap().series;
        assert_eq!(s.body(), int(3));
        assert_eq!(s.soul().coefficient(&Monomial(vec![1, 1])), int(2));

        let p = parse_series_expression("g1*g1", &a).unwrap();
        assert!(p.series.is_zero());
        assert!(p.notes[0].contains("square-zero"));

        let p = parse_series_expression("g2*g1", &a).unwrap();
        assert_eq!(p.series.to_string(), "-g1*g2");

        let l = make_algebra(2, &[1, 1, 1], 6).unwrap();
        let s = parse_series_expression("3 + 2*g1*g2 - 1/2*g3^2", &l).unwrap().series;
        assert_eq!(s.coefficient(&Monomial(vec![0, 0, 2])), rat(-1, 2));
        assert_eq!(s.to_string(), "3 + 2*g1*g2 - 1/2*g3^2");
        let s = parse_series_expression(" -g3 ", &l).unwrap().series;
        assert_eq!(s.to_string(), "-g3");
    }

    #[test]
    fn errors_carry_offsets() {
        let a = make_algebra(1, &[2], 2).unwrap();
        match parse_series_expression("1 + g3", &a) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse_series_expression("1 + * g1", &a) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_series_expression("1/0", &a), Err(Error::Parse { .. })));
        assert!(matches!(parse_series_expression("", &a), Err(Error::Parse { .. })));
        assert!(matches!(parse_series_expression("g0", &a), Err(Error::Parse { .. })));
        assert!(matches!(parse_series_expression("2 g1", &a), Err(Error::Parse { offset: 2, .. })));
    }

    #[test]
    fn truncation_overflow_is_reported() {
        let l = make_algebra(2, &[1, 1, 1], 2).unwrap();
        let p = parse_series_expression("1 + g3^3", &l).unwrap();
        assert_eq!(p.series, l.one());
        assert!(p.notes[0].contains("truncation"));
    }

    #[test]
    fn polynomials() {
        let p = parse_polynomial("x1^2 - 3*x1*x2 + 1/2", 2).unwrap();
        assert_eq!(p.eval(&[int(2), int(1)]), rat(-3, 2));
        assert!(parse_polynomial("x3", 2).is_err());
    }
}
