//! Complementary error function.

/// Complementary error function, `erfc(x) = 1 - erf(x)`.
///
/// Backed by the fdlibm rational approximations (via `libm`), which are
/// accurate to about one ulp across the real line. Non-finite inputs follow
/// the limits: `erfc(+inf) = 0`, `erfc(-inf) = 2`, NaN propagates.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
