use std::ops::AddAssign;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact quotient; any remainder is an invariant violation.
pub fn exact_div(numer: &BigInt, denom: &BigInt) -> Result<BigInt> {
    if denom.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (q, r) = numer.div_rem(denom);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::NonExactDivision { numer: numer.to_string(), denom: denom.to_string() })
    }
}

/// Big-integer operation tallies. One unit per add, sub, mul or div of two entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub add: u64,
    pub sub: u64,
    pub mul: u64,
    pub div: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.add + self.sub + self.mul + self.div
    }

    pub(crate) fn mul(&mut self, a: &BigInt, b: &BigInt) -> BigInt {
        self.mul += 1;
        a * b
    }

    pub(crate) fn add(&mut self, a: BigInt, b: &BigInt) -> BigInt {
        self.add += 1;
        a + b
    }

    pub(crate) fn div(&mut self, a: &BigInt, d: &BigInt) -> Result<BigInt> {
        self.div += 1;
        exact_div(a, d)
    }

    /// `(a*b - c*d) / e`, the shape of every IPGE update. `e = None` skips the division.
    pub(crate) fn cross(
        &mut self,
        a: &BigInt,
        b: &BigInt,
        c: &BigInt,
        d: &BigInt,
        e: Option<&BigInt>,
    ) -> Result<BigInt> {
        self.mul += 2;
        self.sub += 1;
        let x = a * b - c * d;
        match e {
            Some(e) => self.div(&x, e),
            None => Ok(x),
        }
    }

    /// `(a*b + c*d) / e`, used when undoing an elimination step.
    pub(crate) fn cross_add(&mut self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt, e: &BigInt) -> Result<BigInt> {
        self.mul += 2;
        self.add += 1;
        self.div(&(a * b + c * d), e)
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        self.add += o.add;
        self.sub += o.sub;
        self.mul += o.mul;
        self.div += o.div;
    }
}
