use super::{Monomial, PolyError, Polynomial};

/// Parse the textual polynomial format: a sum of terms of the form
/// `coeff * a1^e1 * ... * an^en`, whitespace-insensitive. The coefficient
/// and any factor may be omitted (`a1^2 - 2*a2 + 1`). Round-trips with the
/// `Display` printer.
pub fn parse_polynomial(input: &str, dimension: usize) -> Result<Polynomial, PolyError> {
    let mut parser = Parser {
        src: input.as_bytes(),
        pos: 0,
        dim: dimension,
    };
    let p = parser.parse_sum()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> PolyError {
        PolyError::Parse(format!("{} at byte {}", msg, self.pos))
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

    fn parse_sum(&mut self) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero(self.dim);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1.0
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1.0
                }
                Some(_) if first => 1.0,
                Some(_) => return Err(self.error("expected '+' or '-'")),
                None if first => return Err(self.error("empty polynomial")),
                None => break,
            };
            if self.peek().is_none() {
                return Err(self.error("dangling sign"));
            }
            let (coeff, mono) = self.parse_term()?;
            out.add_term(mono, sign * coeff);
            first = false;
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<(f64, Monomial), PolyError> {
        let mut coeff = 1.0;
        let mut exps = vec![0u16; self.dim];
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    coeff *= self.parse_number()?;
                }
                Some(b'a') => {
                    let (var, exp) = self.parse_power()?;
                    exps[var] = exps[var]
                        .checked_add(exp)
                        .ok_or_else(|| self.error("exponent overflow"))?;
                }
                _ => return Err(self.error("expected coefficient or variable")),
            }
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        Ok((coeff, Monomial::new(exps)))
    }

    fn parse_power(&mut self) -> Result<(usize, u16), PolyError> {
        self.skip_ws();
        debug_assert_eq!(self.src[self.pos], b'a');
        self.pos += 1;
        let idx = self.parse_usize()?;
        if idx == 0 || idx > self.dim {
            return Err(self.error("variable index out of range"));
        }
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            self.parse_usize()? as u16
        } else {
            1
        };
        Ok((idx - 1, exp))
    }

    fn parse_usize(&mut self) -> Result<usize, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("invalid integer"))
    }

    fn parse_number(&mut self) -> Result<f64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos > start
                && self
                    .src
                    .get(self.pos + 1)
                    .map(|&d| d.is_ascii_digit() || d == b'+' || d == b'-')
                    .unwrap_or(false)
            {
                self.pos += 2;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                break;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("invalid number"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_simple() {
        let p = parse_polynomial("1 - 2*a1 + 0.5*a1^2*a2", 2).unwrap();
        assert_eq!(p.coefficient(&Monomial::constant(2)), 1.0);
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 0])), -2.0);
        assert_eq!(p.coefficient(&Monomial::new(vec![2, 1])), 0.5);
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_polynomial("a1^2+a2^2", 2).unwrap();
        let b = parse_polynomial("  a1 ^ 2  +  a2 ^ 2 ", 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scientific_coefficients() {
        let p = parse_polynomial("2.5e-3*a1 - 1e2", 1).unwrap();
        assert_eq!(p.coefficient(&Monomial::new(vec![1])), 2.5e-3);
        assert_eq!(p.coefficient(&Monomial::constant(1)), -100.0);
    }

    #[test]
    fn round_trip_with_printer() {
        let src = "0.125*a1^3 - 2*a1*a2 + a3 - 7.25";
        let p = parse_polynomial(src, 3).unwrap();
        let q = parse_polynomial(&p.to_string(), 3).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("", 2).is_err());
        assert!(parse_polynomial("a3", 2).is_err());
        assert!(parse_polynomial("1 +", 2).is_err());
        assert!(parse_polynomial("x1", 2).is_err());
        assert!(parse_polynomial("1 2", 2).is_err());
    }
}
