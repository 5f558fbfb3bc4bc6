//! `f64` math for `no_std` builds, backed by libm. When std is linked (tests,
//! the `parallel` feature) its inherent methods shadow these.

#[cfg_attr(any(test, feature = "parallel"), allow(dead_code))]
pub(crate) trait Real: Sized {
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    fn round(self) -> Self;
    fn fract(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn log10(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn powi(self, e: i32) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn tanh(self) -> Self;
    fn atan2(self, x: Self) -> Self;
}

impl Real for f64 {
    fn floor(self) -> f64 {
        libm::floor(self)
    }
    fn ceil(self) -> f64 {
        libm::ceil(self)
    }
    fn round(self) -> f64 {
        libm::round(self)
    }
    fn fract(self) -> f64 {
        self - libm::trunc(self)
    }
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    fn ln(self) -> f64 {
        libm::log(self)
    }
    fn log10(self) -> f64 {
        libm::log10(self)
    }
    fn powf(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    fn powi(self, e: i32) -> f64 {
        libm::pow(self, e as f64)
    }
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    fn sinh(self) -> f64 {
        libm::sinh(self)
    }
    fn tanh(self) -> f64 {
        libm::tanh(self)
    }
    fn atan2(self, x: f64) -> f64 {
        libm::atan2(self, x)
    }
}
