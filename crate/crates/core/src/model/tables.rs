//! Tabulated JK_4 reference values.

use std::f64::consts::PI;

use num_complex::Complex64;

/// One tabulated value: an F-symbol `[a,b,c,d,e,f]` or an R-symbol `[a,b,c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub symbol: Symbol,
    pub value: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    F([u8; 6]),
    R([u8; 3]),
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn phase(frac_of_pi: f64) -> Complex64 {
    Complex64::from_polar(1.0, frac_of_pi * PI)
}

/// Reference F- and R-symbols for JK_4.
pub fn jk4_reference() -> Vec<TableEntry> {
    let r2 = 1.0 / 2f64.sqrt();
    let r3 = 1.0 / 3f64.sqrt();
    let s23 = (2.0f64 / 3.0).sqrt();
    let h3 = 3f64.sqrt() / 2.0;
    let f = |idx: [u8; 6], v: f64| TableEntry {
        symbol: Symbol::F(idx),
        value: re(v),
    };
    let r = |idx: [u8; 3], v: Complex64| TableEntry {
        symbol: Symbol::R(idx),
        value: v,
    };
    vec![
        f([1, 2, 2, 1, 1, 0], r2),
        f([1, 2, 2, 1, 1, 2], r2),
        f([1, 2, 2, 1, 3, 0], r2),
        f([1, 2, 2, 1, 3, 2], -r2),
        f([1, 2, 1, 0, 1, 1], 1.0),
        f([1, 2, 1, 2, 1, 1], -0.5),
        f([1, 2, 1, 2, 1, 3], h3),
        f([1, 1, 1, 1, 0, 2], s23),
        f([1, 1, 1, 1, 2, 2], -r3),
        f([1, 1, 1, 3, 2, 2], 1.0),
        f([3, 2, 1, 0, 1, 3], 1.0),
        f([3, 2, 1, 2, 1, 1], h3),
        f([3, 2, 1, 2, 1, 3], 0.5),
        f([1, 1, 3, 3, 0, 2], s23),
        f([1, 1, 3, 1, 2, 2], 1.0),
        f([1, 1, 3, 3, 2, 2], r3),
        f([1, 1, 1, 1, 0, 0], r3),
        f([1, 1, 1, 1, 2, 0], s23),
        f([1, 2, 2, 3, 1, 4], r2),
        f([3, 2, 2, 1, 1, 4], r2),
        f([1, 2, 2, 3, 3, 4], r2),
        f([3, 2, 2, 1, 3, 4], r2),
        f([4, 2, 1, 3, 2, 1], 1.0),
        f([4, 2, 1, 1, 2, 3], 1.0),
        r([1, 1, 0], phase(-0.25)),
        r([1, 1, 2], phase(5.0 / 12.0)),
        r([1, 2, 1], phase(-2.0 / 3.0)),
        r([2, 1, 1], phase(-2.0 / 3.0)),
        r([1, 2, 3], phase(5.0 / 6.0)),
        r([2, 1, 3], phase(5.0 / 6.0)),
        r([2, 2, 0], phase(2.0 / 3.0)),
        r([2, 2, 2], phase(-2.0 / 3.0)),
        r([2, 2, 4], phase(-1.0 / 3.0)),
    ]
}
