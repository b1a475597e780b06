//! Univariate polynomials in the affine coordinate `z` with exact rational
//! coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{q, Q};

/// Coefficient vector, lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut coeffs = vec![Q::zero(); k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn z_pow(k: usize) -> Self {
        Poly::monomial(Q::one(), k)
    }

    pub fn from_coeffs(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::from_coeffs(cs.iter().map(|&c| q(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `z = 0`; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Coefficients `0..len`, zero padded. Panics if the polynomial does not
    /// fit.
    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        assert!(self.coeffs.len() <= len, "polynomial of degree {:?} does not fit in {len} slots", self.degree());
        let mut v = self.coeffs.clone();
        v.resize(len, Q::zero());
        v
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Q::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Canonical representative modulo `z^e`.
    pub fn truncate(&self, e: usize) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().take(e).cloned().collect())
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            if !c.is_zero() {
                for (i, x) in d.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * x;
                }
                quot[k] = c;
            }
            rem.pop();
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.degree() {
            None => a,
            Some(d) => {
                let lead = a.coeffs[d].recip();
                a.scale(&lead)
            }
        }
    }

    /// Parses strings such as `z^2+3*z-1/2`, `-z`, `2/3 z^4`.
    pub fn parse(s: &str) -> Result<Poly> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse(format!("empty polynomial `{s}`")));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = cleaned.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&cleaned[start..i]);
                start = i;
            }
        }
        terms.push(&cleaned[start..]);
        let mut acc = Poly::zero();
        for t in terms {
            acc = acc + parse_term(t).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        }
        Ok(acc)
    }
}

fn parse_rational(s: &str) -> std::result::Result<Q, String> {
    let mut parts = s.splitn(2, '/');
    let num = parts.next().unwrap_or("");
    let n: num_bigint::BigInt = num.parse().map_err(|_| format!("bad coefficient `{s}`"))?;
    match parts.next() {
        None => Ok(Q::from_integer(n)),
        Some(den) => {
            let d: num_bigint::BigInt = den.parse().map_err(|_| format!("bad coefficient `{s}`"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Q::new(n, d))
        }
    }
}

fn parse_term(t: &str) -> std::result::Result<Poly, String> {
    let (sign, body) = match t.as_bytes().first() {
        Some(b'+') => (Q::one(), &t[1..]),
        Some(b'-') => (-Q::one(), &t[1..]),
        _ => (Q::one(), t),
    };
    if body.is_empty() {
        return Err(format!("dangling sign in `{t}`"));
    }
    let Some(zpos) = body.find('z') else {
        return Ok(Poly::constant(sign * parse_rational(body)?));
    };
    let coef_str = body[..zpos].trim_end_matches('*');
    let coef = if coef_str.is_empty() {
        Q::one()
    } else {
        parse_rational(coef_str)?
    };
    let rest = &body[zpos + 1..];
    let exp = if rest.is_empty() {
        1
    } else if let Some(e) = rest.strip_prefix('^') {
        e.parse::<usize>().map_err(|_| format!("bad exponent in `{t}`"))?
    } else {
        return Err(format!("unexpected `{rest}` in `{t}`"));
    };
    Ok(Poly::monomial(sign * coef, exp))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    write!(f, "z")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q_frac;

    #[test]
    fn parse_and_print() {
        let p = Poly::parse("z^2+3*z-1/2").unwrap();
        assert_eq!(p.coeffs(), &[q_frac(-1, 2), q(3), q(1)]);
        assert_eq!(p.to_string(), "z^2+3*z-1/2");
        assert_eq!(Poly::parse("-z").unwrap(), Poly::from_ints(&[0, -1]));
        assert_eq!(Poly::parse("2/3 z^4").unwrap(), Poly::monomial(q_frac(2, 3), 4));
        assert_eq!(Poly::parse("0").unwrap(), Poly::zero());
        assert!(Poly::parse("z^").is_err());
        assert!(Poly::parse("1/0").is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_ints(&[-1, 0, 1]); // z^2 - 1
        let b = Poly::from_ints(&[1, 1]); // z + 1
        let (quo, r) = a.div_rem(&b);
        assert_eq!(quo, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&Poly::from_ints(&[-1, 1])), Poly::from_ints(&[-1, 1]));
        assert_eq!(Poly::z_pow(2).gcd(&Poly::from_ints(&[1, 1])), Poly::one());
    }

    #[test]
    fn truncate_and_valuation() {
        let p = Poly::from_ints(&[0, 0, 3, 1]);
        assert_eq!(p.valuation(), Some(2));
        assert!(p.truncate(2).is_zero());
        assert_eq!(p.truncate(3), Poly::monomial(q(3), 2));
    }
}
