use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Reduced fraction with a positive denominator.
///
/// Used for rendering solutions and for parsing rational input; the numeric
/// kernels never compute with it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: BigInt,
    denom: BigInt,
}

impl Rational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = numer.gcd(&denom);
        let (mut p, mut q) = if g.is_zero() { (numer, denom) } else { (numer / &g, denom / &g) };
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Ok(Rational { numer: p, denom: q })
    }

    pub fn from_integer(x: BigInt) -> Self {
        Rational { numer: x, denom: BigInt::one() }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Decimal expansion with `digits` fractional digits, rounded half-to-even.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10).pow(digits as u32);
        let scaled = &self.numer.abs() * &scale;
        let (mut q, r) = scaled.div_rem(&self.denom);
        let twice = &r * 2;
        if twice > self.denom || (twice == self.denom && q.is_odd()) {
            q += 1;
        }
        let neg = self.numer.is_negative() && !q.is_zero();
        let mut s = q.to_string();
        if digits > 0 {
            if s.len() <= digits {
                s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
            }
            s.insert(s.len() - digits, '.');
        }
        if neg {
            s.insert(0, '-');
        }
        s
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts integers, `p/q` fractions and plain decimals such as `-0.25`.
    fn from_str(tok: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 0, msg: format!("invalid number '{tok}'") };
        if let Some((p, q)) = tok.split_once('/') {
            let p = BigInt::from_str(p).map_err(|_| bad())?;
            let q = BigInt::from_str(q).map_err(|_| bad())?;
            return Rational::new(p, q).map_err(|_| bad());
        }
        if let Some((int, frac)) = tok.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let digits = format!("{int_digits}{frac}");
            let mut p = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
            if neg {
                p = -p;
            }
            return Rational::new(p, BigInt::from(10).pow(frac.len() as u32));
        }
        BigInt::from_str(tok).map(Rational::from_integer).map_err(|_| bad())
    }
}

/// Scale a rational matrix by the LCM of its denominators.
///
/// Returns the integer matrix and the scale factor used.
pub fn integerize(rows: &[Vec<Rational>]) -> Result<(IntMatrix, BigInt)> {
    let scale = rows.iter().flatten().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let int_rows = rows.iter().map(|row| row.iter().map(|r| r.numer() * (&scale / r.denom())).collect()).collect();
    Ok((IntMatrix::from_rows(int_rows)?, scale))
}
