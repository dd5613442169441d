//! Scalar math shims so the crate builds without `std`.
//!
//! With the `std` feature the intrinsic versions are used; otherwise the
//! calls are routed through `libm`.

#![allow(dead_code)]

macro_rules! shim {
    ($(fn $name:ident($($arg:ident),+) => $libm:ident;)*) => {
        $(
            #[cfg(feature = "std")]
            #[inline]
            pub(crate) fn $name($($arg: f64),+) -> f64 { f64::$name($($arg),+) }

            #[cfg(not(feature = "std"))]
            #[inline]
            pub(crate) fn $name($($arg: f64),+) -> f64 { libm::$libm($($arg),+) }
        )*
    };
}

shim! {
    fn sqrt(x) => sqrt;
    fn sin(x) => sin;
    fn cos(x) => cos;
    fn exp(x) => exp;
    fn ln(x) => log;
    fn abs(x) => fabs;
    fn floor(x) => floor;
    fn ceil(x) => ceil;
    fn sinh(x) => sinh;
    fn tanh(x) => tanh;
    fn cosh(x) => cosh;
    fn asinh(x) => asinh;
    fn hypot(x, y) => hypot;
    fn powf(x, y) => pow;
}

/// sin(x)/x with the removable singularity at zero filled in.
pub(crate) fn sinc(x: f64) -> f64 {
    if abs(x) < 1e-4 {
        // series; the x^4 term is below f64 resolution in this range
        1.0 - x * x / 6.0
    } else {
        sin(x) / x
    }
}

/// e^{i theta}
pub(crate) fn cis(theta: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(cos(theta), sin(theta))
}
