//! Coefficient rings and scalar fields.
//!
//! Two backends implement [`Scalar`]: [`GaussRat`] (exact Gaussian rationals)
//! and [`C64`] (double-precision complex numbers compared up to a global
//! tolerance). Every container in the crate is generic over its coefficient
//! type, so the backend is fixed at the type level and cannot be mixed.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring with conjugation, able to embed the exact constants
/// appearing in structure equations.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn from_gauss(g: &GaussRat) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn try_inv(&self) -> Option<Self>;
    /// Preference for choosing this element as an elimination pivot; `None`
    /// means it is not invertible.
    fn pivot_weight(&self) -> Option<f64>;

    fn from_i64(v: i64) -> Self {
        Self::from_gauss(&GaussRat::from_i64(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_gauss(&GaussRat::ratio(num, den))
    }
    fn imag_unit() -> Self {
        Self::from_gauss(&GaussRat::i())
    }
    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }
}

/// A field of scalars.
pub trait Scalar: Coeff + fmt::Display {
    /// Whether arithmetic is exact.
    const EXACT: bool;
    fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero scalar")
    }
    fn to_c64(&self) -> Complex64;
    /// Real part, as a scalar with zero imaginary part.
    fn re(&self) -> Self;
    /// Imaginary part, as a scalar with zero imaginary part.
    fn im(&self) -> Self;
    /// `|z|^2` as a scalar.
    fn abs2(&self) -> Self {
        self.mul(&self.conj())
    }
    /// Sign of a real scalar: -1, 0 or 1 (the imaginary part is ignored).
    fn real_sign(&self) -> i32;
    fn backend_name() -> &'static str;
}

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Tolerance used by the float backend for equality and zero tests.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

pub fn set_tolerance(eps: f64) {
    assert!(eps > 0.0 && eps.is_finite(), "tolerance must be positive");
    TOLERANCE_BITS.store(eps.to_bits(), Ordering::Relaxed);
}

/// Exact Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_i64(v: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// `(a/b) + (c/d)i`.
    pub fn complex(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussRat::new(
            BigRational::new(BigInt::from(a), BigInt::from(b)),
            BigRational::new(BigInt::from(c), BigInt::from(d)),
        )
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // Huge numerators: shift both down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let a = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let b = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            a / b
        }
    }
}

impl Coeff for GaussRat {
    fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        GaussRat::from_i64(1)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::new(&self.re * &o.re, BigRational::zero());
        }
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn neg(&self) -> Self {
        GaussRat::new(-&self.re, -&self.im)
    }
    fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -&self.im)
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.clone()
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::new(&self.re / &d, -&self.im / &d))
    }
    fn pivot_weight(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            // Prefer small denominators so exact elimination stays compact.
            let bits = self.re.denom().bits() + self.im.denom().bits();
            Some(1.0 / (1.0 + bits as f64))
        }
    }
}

impl Scalar for GaussRat {
    const EXACT: bool = true;
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn re(&self) -> Self {
        GaussRat::new(self.re.clone(), BigRational::zero())
    }
    fn im(&self) -> Self {
        GaussRat::new(self.im.clone(), BigRational::zero())
    }
    fn abs2(&self) -> Self {
        GaussRat::new(&self.re * &self.re + &self.im * &self.im, BigRational::zero())
    }
    fn real_sign(&self) -> i32 {
        if self.re.is_zero() {
            0
        } else if self.re.is_positive() {
            1
        } else {
            -1
        }
    }
    fn backend_name() -> &'static str {
        "exact"
    }
}

fn fmt_rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for GaussRat {
    /// Canonical `a/b+c/d*i` rendering used by reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}*i", fmt_rat(&self.re), fmt_rat(&-&self.im))
        } else {
            write!(f, "{}+{}*i", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar {0:?}")]
pub struct ScalarParseError(pub String);

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        Some(BigRational::new(a, b))
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

impl FromStr for GaussRat {
    type Err = ScalarParseError;

    /// Accepts `a/b+c/d*i`, `a/b+c/di`, `a/b`, `a`, `c/d*i`, `i`, `-i` and
    /// sign variants, with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScalarParseError(s.to_string());
        let mut t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.starts_with('(') && t.ends_with(')') {
            t = t[1..t.len() - 1].to_string();
        }
        if t.is_empty() {
            return Err(err());
        }
        // Split at the last sign that is not the leading character.
        let bytes = t.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/' {
                split = Some(k);
                break;
            }
        }
        let imag_part = |u: &str| -> Option<BigRational> {
            let body = u.strip_suffix("*i").or_else(|| u.strip_suffix('i'))?;
            match body {
                "" | "+" => Some(BigRational::one()),
                "-" => Some(-BigRational::one()),
                b => parse_rat(b.strip_prefix('+').unwrap_or(b)),
            }
        };
        let is_imag = |u: &str| u.ends_with('i');
        match split {
            Some(k) => {
                let (a, b) = t.split_at(k);
                let re = parse_rat(a).ok_or_else(err)?;
                if !is_imag(b) {
                    return Err(err());
                }
                let im = imag_part(b).ok_or_else(err)?;
                Ok(GaussRat::new(re, im))
            }
            None if is_imag(&t) => Ok(GaussRat::new(
                BigRational::zero(),
                imag_part(&t).ok_or_else(err)?,
            )),
            None => Ok(GaussRat::new(
                parse_rat(t.strip_prefix('+').unwrap_or(&t)).ok_or_else(err)?,
                BigRational::zero(),
            )),
        }
    }
}

/// Double-precision complex scalar. Equality and zero tests use [`tolerance`].
#[derive(Clone, Copy, Debug, Default)]
pub struct C64(pub Complex64);

impl C64 {
    pub fn new(re: f64, im: f64) -> Self {
        C64(Complex64::new(re, im))
    }
}

impl PartialEq for C64 {
    fn eq(&self, other: &Self) -> bool {
        (self.0 - other.0).norm() <= tolerance()
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.norm() <= tolerance()
    }
    fn add(&self, o: &Self) -> Self {
        C64(self.0 + o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        C64(self.0 - o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        C64(self.0 * o.0)
    }
    fn neg(&self) -> Self {
        C64(-self.0)
    }
    fn conj(&self) -> Self {
        C64(self.0.conj())
    }
    fn from_gauss(g: &GaussRat) -> Self {
        C64(g.to_c64())
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(C64(self.0.inv()))
        }
    }
    fn pivot_weight(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(self.0.norm())
        }
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;
    fn to_c64(&self) -> Complex64 {
        self.0
    }
    fn re(&self) -> Self {
        C64::new(self.0.re, 0.0)
    }
    fn im(&self) -> Self {
        C64::new(self.0.im, 0.0)
    }
    fn real_sign(&self) -> i32 {
        if self.0.re.abs() <= tolerance() {
            0
        } else if self.0.re > 0.0 {
            1
        } else {
            -1
        }
    }
    fn backend_name() -> &'static str {
        "float"
    }
}

impl fmt::Display for C64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im < 0.0 {
            write!(f, "{:e}-{:e}*i", self.0.re, -self.0.im)
        } else {
            write!(f, "{:e}+{:e}*i", self.0.re, self.0.im)
        }
    }
}
