use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnyonState;
use crate::error::{Error, Result};
use crate::model::{AnyonModelData, Charge};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub internals: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

/// Wire form `{externals, total, terms: [{internals, re, im}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub externals: Vec<u8>,
    pub total: u8,
    pub terms: Vec<TermJson>,
}

impl AnyonState {
    /// Serializable form; needs a definite total charge.
    pub fn to_json(&self) -> Result<StateJson> {
        let st = self.to_left_nested();
        let total = if st.is_zero() {
            return Err(Error::DegenerateState);
        } else {
            st.total()
                .ok_or_else(|| Error::Precondition("state has no definite total charge".into()))?
        };
        let n = st.len();
        let terms = st
            .amplitudes()
            .map(|(p, v)| TermJson {
                internals: if n >= 2 { p[1..n - 1].iter().map(|c| c.0).collect() } else { Vec::new() },
                re: v.re,
                im: v.im,
            })
            .collect();
        Ok(StateJson {
            externals: st.externals().iter().map(|c| c.0).collect(),
            total: total.0,
            terms,
        })
    }

    pub fn from_json(model: Arc<AnyonModelData>, json: &StateJson) -> Result<Self> {
        let externals: Vec<Charge> = json.externals.iter().map(|&c| Charge(c)).collect();
        let n = externals.len();
        let terms = json
            .terms
            .iter()
            .map(|t| {
                let path: Vec<Charge> = match n {
                    0 => Vec::new(),
                    1 => vec![externals[0]],
                    _ => {
                        let mut p = vec![externals[0]];
                        p.extend(t.internals.iter().map(|&c| Charge(c)));
                        p.push(Charge(json.total));
                        p
                    }
                };
                if n == 1 && externals[0].0 != json.total {
                    return Err(Error::InvalidPath("single particle must carry the total charge".into()));
                }
                Ok((path, Complex64::new(t.re, t.im)))
            })
            .collect::<Result<Vec<_>>>()?;
        AnyonState::from_amplitudes(model, externals, terms)
    }
}
