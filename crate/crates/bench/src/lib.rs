//! Fixtures shared by the kernel benchmarks.

use clpencil::appendix::ParamPoint;
use clpencil::suite::Family;
use clpencil::Rational;

/// A fixed numeric parameter point.
pub fn point() -> ParamPoint {
    let b = [3, -1, 2, 5, -2, 1, 4, -3, 2, 1].map(Rational::from_integer);
    ParamPoint::Numeric(b)
}

pub fn family() -> Family {
    Family::load().expect("appendix loads")
}
