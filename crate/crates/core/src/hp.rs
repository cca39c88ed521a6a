//! Complex arithmetic over arbitrary-precision binary floats.
//!
//! Used for the single high-precision retry of S-matrix certification and
//! for Verlinde sums whose binary64 value cannot be certified integral.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision of the high-precision retry.
pub const DEFAULT_BITS: usize = 128;

#[derive(Clone, Debug)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

/// Cosine and sine of 2 pi m / order for m in 0..order.
pub fn roots_of_unity(order: i64, bits: usize) -> Result<Vec<HpComplex>> {
    let mut cc = Consts::new().map_err(|e| Error::InvalidInput(format!("high-precision constants: {e:?}")))?;
    let two_pi = cc.pi(bits, RM).mul(&BigFloat::from_f64(2.0, bits), bits, RM);
    let den = BigFloat::from_i64(order, bits);
    Ok((0..order)
        .map(|m| {
            let theta = two_pi.mul(&BigFloat::from_i64(m, bits), bits, RM).div(&den, bits, RM);
            HpComplex {
                re: theta.cos(bits, RM, &mut cc),
                im: theta.sin(bits, RM, &mut cc),
            }
        })
        .collect())
}

pub fn hp_sqrt(x: f64, bits: usize) -> BigFloat {
    BigFloat::from_f64(x, bits).sqrt(bits, RM)
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // decimal rendering carries ~bits/3.3 digits, so the parse rounds once
    format!("{x}").parse().unwrap_or(f64::NAN)
}

impl HpComplex {
    pub fn zero(bits: usize) -> Self {
        HpComplex {
            re: BigFloat::from_f64(0.0, bits),
            im: BigFloat::from_f64(0.0, bits),
        }
    }

    pub fn one(bits: usize) -> Self {
        HpComplex {
            re: BigFloat::from_f64(1.0, bits),
            im: BigFloat::from_f64(0.0, bits),
        }
    }

    pub fn add(&self, o: &Self, bits: usize) -> Self {
        HpComplex {
            re: self.re.add(&o.re, bits, RM),
            im: self.im.add(&o.im, bits, RM),
        }
    }

    pub fn sub(&self, o: &Self, bits: usize) -> Self {
        HpComplex {
            re: self.re.sub(&o.re, bits, RM),
            im: self.im.sub(&o.im, bits, RM),
        }
    }

    pub fn mul(&self, o: &Self, bits: usize) -> Self {
        HpComplex {
            re: self.re.mul(&o.re, bits, RM).sub(&self.im.mul(&o.im, bits, RM), bits, RM),
            im: self.re.mul(&o.im, bits, RM).add(&self.im.mul(&o.re, bits, RM), bits, RM),
        }
    }

    pub fn scale(&self, s: &BigFloat, bits: usize) -> Self {
        HpComplex {
            re: self.re.mul(s, bits, RM),
            im: self.im.mul(s, bits, RM),
        }
    }

    pub fn div(&self, o: &Self, bits: usize) -> Self {
        let d = o.re.mul(&o.re, bits, RM).add(&o.im.mul(&o.im, bits, RM), bits, RM);
        let conj = HpComplex {
            re: o.re.clone(),
            im: o.im.neg(),
        };
        let n = self.mul(&conj, bits);
        HpComplex {
            re: n.re.div(&d, bits, RM),
            im: n.im.div(&d, bits, RM),
        }
    }

    pub fn powi(&self, n: i32, bits: usize) -> Self {
        let mut base = if n < 0 { HpComplex::one(bits).div(self, bits) } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = HpComplex::one(bits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, bits);
            }
            base = base.mul(&base, bits);
            e >>= 1;
        }
        acc
    }

    /// Multiplication by i^n, exact.
    pub fn rotate_quarter(&self, n: usize) -> Self {
        let (re, im) = match n % 4 {
            0 => (self.re.clone(), self.im.clone()),
            1 => (self.im.neg(), self.re.clone()),
            2 => (self.re.neg(), self.im.neg()),
            _ => (self.im.clone(), self.re.neg()),
        };
        HpComplex { re, im }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}
