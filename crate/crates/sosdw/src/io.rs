//! Output formats and JSON encodings shared by every subcommand.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Number, Value};
use sosdw_core::enumeration::{Cyclotomic, CyclotomicPoly};
use sosdw_core::C64;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "sosdw/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexRecord {
    fn from(z: C64) -> Self {
        ComplexRecord { re: z.re, im: z.im }
    }
}

/// An arbitrarily large integer as a bare JSON number.
pub fn big_int(v: &BigInt) -> Value {
    Value::Number(
        Number::from_str(&v.to_string()).expect("decimal integers are valid JSON numbers"),
    )
}

pub fn big_uint(v: &BigUint) -> Value {
    big_int(&BigInt::from(v.clone()))
}

/// A rational as the string `"a/b"`, or `"a"` when integral.
pub fn rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Coefficients, lowest degree first, each as the integer pair `[a, b]`
/// standing for `a + bζ`.
pub fn poly<R: Cyclotomic>(p: &CyclotomicPoly<R>) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|z| {
                let (a, b) = z.parts();
                json!([big_int(a), big_int(b)])
            })
            .collect(),
    )
}

pub fn complex_text(z: C64) -> String {
    format!("{:+.15e}{:+.15e}i", z.re, z.im)
}

/// Opens `out`, or stdout when absent.
pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

/// Runtime in milliseconds, or nothing when timing is suppressed.
pub fn runtime_ms(elapsed: std::time::Duration, timing: bool) -> Option<f64> {
    timing.then_some(elapsed.as_secs_f64() * 1e3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;
    use sosdw_core::enumeration::ZOmega;

    #[test]
    fn large_integers_stay_exact() {
        let v = BigInt::from_str_radix("123456789012345678901234567890", 10).unwrap();
        assert_eq!(
            serde_json::to_string(&big_int(&v)).unwrap(),
            "123456789012345678901234567890"
        );
    }

    #[test]
    fn polynomial_pairs() {
        let p = CyclotomicPoly::new(vec![ZOmega::from_int(2), ZOmega::generator()]);
        assert_eq!(serde_json::to_string(&poly(&p)).unwrap(), "[[2,0],[0,1]]");
    }

    #[test]
    fn rationals() {
        let r = BigRational::new(BigInt::from(6), BigInt::from(4));
        assert_eq!(rational(&r), "3/2");
        assert_eq!(rational(&BigRational::from_integer(BigInt::from(-3))), "-3");
    }
}
