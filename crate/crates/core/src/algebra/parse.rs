use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::AlgebraError;

/// One signed term `c * v1^e1 * v2^e2 ...` as read from text, with variables
/// already resolved to indices. Repeated variables are kept separate; callers
/// accumulate exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ParsedTerm {
    pub coeff: BigInt,
    pub factors: Vec<(usize, u32)>,
    pub text: String,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).ok()?;
        s.parse().ok()
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            std::str::from_utf8(&self.src[start..self.pos]).ok()
        } else {
            None
        }
    }
}

/// Parse a sum of monomial terms such as `3*X0^2*X1 - X2^3`.
///
/// `resolve` maps a variable name to its index, or `None` if the name is not
/// allowed; unresolved names are reported with the name.
pub(crate) fn parse_terms(
    text: &str,
    num_vars_hint: usize,
    resolve: impl Fn(&str) -> Option<usize>,
) -> Result<Vec<ParsedTerm>, AlgebraError> {
    let mut cur = Cursor { src: text.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let term_start = {
            cur.skip_ws();
            cur.pos
        };
        let mut negative = false;
        match cur.peek() {
            None if first => return Err(cur.err("empty polynomial")),
            None => break,
            Some(b'+') => {
                cur.pos += 1;
            }
            Some(b'-') => {
                negative = true;
                cur.pos += 1;
            }
            Some(_) if first => {}
            Some(c) => return Err(cur.err(format!("expected '+' or '-', found '{}'", c as char))),
        }
        first = false;

        let mut coeff = BigInt::one();
        let mut factors = Vec::new();
        let mut expect_factor = true;
        if let Some(c) = cur.integer() {
            coeff = c;
            expect_factor = false;
            if cur.peek() == Some(b'*') {
                cur.pos += 1;
                expect_factor = true;
            }
        }
        loop {
            match cur.ident() {
                Some(name) => {
                    let idx = resolve(name).ok_or_else(|| AlgebraError::UnknownVariable {
                        name: name.to_string(),
                        num_vars: num_vars_hint,
                    })?;
                    let mut exp = 1u32;
                    if cur.peek() == Some(b'^') {
                        cur.pos += 1;
                        let e = cur.integer().ok_or_else(|| cur.err("expected exponent after '^'"))?;
                        exp = u32::try_from(e).map_err(|_| cur.err("exponent out of range"))?;
                    }
                    factors.push((idx, exp));
                }
                None if expect_factor => return Err(cur.err("expected a variable")),
                None => break,
            }
            if cur.peek() == Some(b'*') {
                cur.pos += 1;
                expect_factor = true;
            } else {
                break;
            }
        }
        if negative {
            coeff = -coeff;
        }
        let text = std::str::from_utf8(&cur.src[term_start..cur.pos]).unwrap_or("").trim().to_string();
        if !coeff.is_zero() {
            terms.push(ParsedTerm { coeff, factors, text });
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xk(name: &str) -> Option<usize> {
        name.strip_prefix('X')?.parse().ok()
    }

    #[test]
    fn parses_signed_terms() {
        let t = parse_terms("3*X0^2*X1 - X2^3", 3, xk).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].coeff, BigInt::from(3));
        assert_eq!(t[0].factors, vec![(0, 2), (1, 1)]);
        assert_eq!(t[1].coeff, BigInt::from(-1));
        assert_eq!(t[1].factors, vec![(2, 3)]);
        assert_eq!(t[1].text, "- X2^3");
    }

    #[test]
    fn leading_minus_and_spaces() {
        let t = parse_terms("  -2 * X1 X0", 2, xk);
        // juxtaposition without '*' is not accepted
        assert!(t.is_err());
        let t = parse_terms("-2*X1*X0", 2, xk).unwrap();
        assert_eq!(t[0].coeff, BigInt::from(-2));
    }

    #[test]
    fn unknown_variable_is_named() {
        let e = parse_terms("X0 + Z", 2, xk).unwrap_err();
        assert!(matches!(e, AlgebraError::UnknownVariable { ref name, .. } if name == "Z"));
    }

    #[test]
    fn dangling_operator() {
        assert!(parse_terms("X0 +", 1, xk).is_err());
        assert!(parse_terms("X0^", 1, xk).is_err());
        assert!(parse_terms("", 1, xk).is_err());
    }
}
