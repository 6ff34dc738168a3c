use std::collections::HashMap;

use crate::encoding::GateMatrix;

/// Unit quaternion of a 2x2 unitary after removing its determinant phase. Defined
/// up to sign; `min(|q - p|, |q + p|) * sqrt 2` is the projective Frobenius distance.
pub(crate) fn quaternion(g: &GateMatrix) -> [f64; 4] {
    let (a, b, c, d) = (g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1));
    let s = (a * d - b * c).sqrt();
    let (a, b) = if s.norm() > 0.0 { (a / s, b / s) } else { (a, b) };
    let q = [a.re, a.im, b.re, b.im];
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.map(|x| x / n)
}

pub(crate) fn quat_distance(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let minus: f64 = p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
    let plus: f64 = p.iter().zip(q).map(|(a, b)| (a + b).powi(2)).sum();
    minus.min(plus).sqrt()
}

/// Grid-bucketed set of projective 2x2 unitaries.
pub(crate) struct ProjectiveIndex {
    cell: f64,
    buckets: HashMap<[i64; 4], Vec<usize>>,
    quats: Vec<[f64; 4]>,
}

impl ProjectiveIndex {
    /// Lookups are exact for radii up to `cell`.
    pub fn new(cell: f64) -> Self {
        ProjectiveIndex {
            cell,
            buckets: HashMap::new(),
            quats: Vec::new(),
        }
    }

    fn key(&self, q: &[f64; 4]) -> [i64; 4] {
        q.map(|x| (x / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, q: [f64; 4]) -> usize {
        let id = self.quats.len();
        self.buckets.entry(self.key(&q)).or_default().push(id);
        self.quats.push(q);
        id
    }

    /// Ids within quaternion distance `radius` of `q`, in increasing order.
    pub fn within(&self, q: &[f64; 4], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for sign in [1.0, -1.0] {
            let p = q.map(|x| sign * x);
            let k = self.key(&p);
            for off in 0..81usize {
                let mut cell = k;
                let mut o = off;
                for c in cell.iter_mut() {
                    *c += (o % 3) as i64 - 1;
                    o /= 3;
                }
                if let Some(ids) = self.buckets.get(&cell) {
                    out.extend(ids.iter().copied().filter(|&i| quat_distance(&self.quats[i], q) < radius));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

