use serde::{Deserialize, Serialize};

use super::data::AnyonModelData;
use super::symbols::f_admissible;
use super::theory::{Family, TheorySpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for ComplexValue {
    fn from(z: num_complex::Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexedValue {
    pub idx: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecDump {
    pub family: Family,
    pub level: u32,
}

/// Serializable snapshot of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelDump {
    pub spec: SpecDump,
    pub charges: Vec<u8>,
    pub fusion: Vec<[u8; 3]>,
    pub f_symbols: Vec<IndexedValue>,
    pub r_symbols: Vec<IndexedValue>,
    pub qdims: Vec<f64>,
    pub total_dim: f64,
    pub twists: Vec<ComplexValue>,
    pub s_matrix: Vec<Vec<ComplexValue>>,
    pub frob_schur: Vec<i8>,
}

impl ModelDump {
    pub fn from_model(m: &AnyonModelData) -> Self {
        let spec: &TheorySpec = m.spec();
        let cs: Vec<u8> = m.charges().map(|c| c.0).collect();
        let mut fusion = Vec::new();
        let mut r_symbols = Vec::new();
        for a in m.charges() {
            for b in m.charges() {
                for c in m.fusion_outcomes(a, b) {
                    fusion.push([a.0, b.0, c.0]);
                    let r = m.r_or_zero(a, b, c);
                    r_symbols.push(IndexedValue {
                        idx: vec![a.0, b.0, c.0],
                        re: r.re,
                        im: r.im,
                    });
                }
            }
        }
        let mut f_symbols = Vec::new();
        for &a in &cs {
            for &b in &cs {
                for &c in &cs {
                    for &d in &cs {
                        for &e in &cs {
                            for &f in &cs {
                                let idx = [a, b, c, d, e, f];
                                if f_admissible(idx, m.level()) {
                                    let v = m.f_symbol(idx);
                                    f_symbols.push(IndexedValue {
                                        idx: idx.to_vec(),
                                        re: v.re,
                                        im: v.im,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        let s = m.s_matrix();
        ModelDump {
            spec: SpecDump {
                family: spec.family(),
                level: spec.level(),
            },
            charges: cs,
            fusion,
            f_symbols,
            r_symbols,
            qdims: m.qdims().to_vec(),
            total_dim: m.total_dim(),
            twists: m.twists().iter().map(|&t| t.into()).collect(),
            s_matrix: (0..s.nrows()).map(|i| (0..s.ncols()).map(|j| s[(i, j)].into()).collect()).collect(),
            frob_schur: m.frobenius_schur_indicators().to_vec(),
        }
    }
}
