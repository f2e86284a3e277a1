//! Float math shims: host intrinsics under `std`, `libm` otherwise.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    #[inline]
    pub fn ceil(x: f64) -> f64 {
        x.ceil()
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        x.round()
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    #[inline]
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
}

pub use imp::*;

pub const PI: f64 = core::f64::consts::PI;

/// Natural log of the gamma function at integer or half-integer `2a ∈ N`.
///
/// Enough for unit-sphere areas in any dimension; exact recursion from
/// Γ(1) = 1 and Γ(1/2) = √π.
pub fn ln_gamma_half(two_a: u32) -> f64 {
    debug_assert!(two_a >= 1);
    let mut acc = if two_a % 2 == 0 { 0.0 } else { 0.5 * ln(PI) };
    let mut k = two_a;
    while k > 2 {
        k -= 2;
        acc += ln(k as f64 / 2.0);
    }
    acc
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn unit_sphere_area(n: u32) -> f64 {
    // 2 π^{n/2} / Γ(n/2)
    exp(ln(2.0) + (n as f64 / 2.0) * ln(PI) - ln_gamma_half(n))
}
