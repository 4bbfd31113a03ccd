//! Thin wrappers over `libm` so the kernel stays `no_std`.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Wraps an angle into (−π, π].
pub(crate) fn wrap_angle(x: f64) -> f64 {
    use core::f64::consts::PI;
    let mut y = libm::fmod(x + PI, 2.0 * PI);
    if y <= 0.0 {
        y += 2.0 * PI;
    }
    y - PI
}
