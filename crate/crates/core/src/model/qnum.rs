use super::theory::TheorySpec;

/// q-integer `[n]` in sine-ratio form.
///
/// SU(2) families: `sin(n pi/(k+2)) / sin(pi/(k+2))`.
/// JK families: `[n]_A = (-1)^(n+1) [n]_q`.
pub fn q_integer(n: u32, spec: &TheorySpec) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = spec.angle();
    let v = (n as f64 * x).sin() / x.sin();
    if spec.family().is_jk() && n % 2 == 0 {
        -v
    } else {
        v
    }
}

/// Quantum dimension `d_a = sin((a+1) pi/(k+2)) / sin(pi/(k+2))`, the same for every family.
pub fn quantum_dimension(a: u8, spec: &TheorySpec) -> f64 {
    let x = spec.angle();
    ((a as f64 + 1.0) * x).sin() / x.sin()
}

/// Cached q-factorials `[n]! = [1][2]...[n]`.
#[derive(Clone, Debug)]
pub(crate) struct QFactorials {
    values: Vec<f64>,
}

impl QFactorials {
    pub(crate) fn new(spec: &TheorySpec) -> Self {
        let top = 2 * spec.level() as usize + 4;
        let mut values = Vec::with_capacity(top + 1);
        values.push(1.0);
        for n in 1..=top {
            let prev = values[n - 1];
            values.push(prev * q_integer(n as u32, spec));
        }
        QFactorials { values }
    }

    pub(crate) fn get(&self, n: i64) -> f64 {
        assert!(n >= 0, "negative q-factorial argument {n}");
        self.values[n as usize]
    }
}
