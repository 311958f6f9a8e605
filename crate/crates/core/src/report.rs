//! Machine-readable reports: per-assertion records with measured ratios
//! and frozen constants, field ledgers, and norm-form serialization.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::field::{NumberField, ReducedBasis};
use crate::normform::{NormForm, ShiftVector};
use crate::poly::IPoly2;

/// One asserted inequality with its measured ratio and frozen constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub name: String,
    pub measured: f64,
    pub constant: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl AssertionRecord {
    pub fn new(name: &str, measured: f64, constant: f64) -> Self {
        AssertionRecord {
            name: name.to_string(),
            measured,
            constant,
            ratio: if constant != 0.0 { measured / constant } else { f64::INFINITY },
            pass: measured <= constant,
        }
    }

    /// A boolean check reported in the same shape.
    pub fn flag(name: &str, pass: bool) -> Self {
        AssertionRecord {
            name: name.to_string(),
            measured: if pass { 0.0 } else { 1.0 },
            constant: 0.0,
            ratio: 0.0,
            pass,
        }
    }
}

/// Envelope for one command run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub config_hash: String,
    pub assertions: Vec<AssertionRecord>,
    pub runtime_ms: u64,
    pub outputs: serde_json::Value,
}

impl ReportEnvelope {
    pub fn new(command: &str, config_hash: &str) -> Self {
        ReportEnvelope {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            assertions: Vec::new(),
            runtime_ms: 0,
            outputs: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, rec: AssertionRecord) {
        self.assertions.push(rec);
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    /// JSON with the runtime zeroed: byte-identical for identical seeds.
    pub fn canonical_json(&self) -> Result<String> {
        let mut c = self.clone();
        c.runtime_ms = 0;
        Ok(serde_json::to_string_pretty(&c)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The field ledger record emitted for every field:
/// {field_id, n, D_K, delta: […], E_K3}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldReport {
    pub field_id: String,
    pub n: usize,
    #[serde(rename = "D_K")]
    pub d_k: String,
    pub delta: Vec<f64>,
    #[serde(rename = "E_K3")]
    pub e_k3: f64,
    pub sizes: Vec<f64>,
    pub product_ratio: f64,
    pub disc_square_factor_warning: bool,
}

impl FieldReport {
    pub fn new(k: &NumberField, rb: &ReducedBasis) -> Self {
        FieldReport {
            field_id: k.field_id.clone(),
            n: k.n,
            d_k: k.d_k.to_string(),
            delta: rb.deltas.clone(),
            e_k3: rb.e_k3,
            sizes: rb.sizes.clone(),
            product_ratio: rb.product_ratio,
            disc_square_factor_warning: k.disc_square_factor,
        }
    }
}

/// Norm-form record: {field_id, z: […], coeffs: [[i, j, c]]} with
/// coefficients as decimal strings (lossless for big integers).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormRecord {
    pub field_id: String,
    pub n: usize,
    pub z: Vec<i64>,
    pub coeffs: Vec<(usize, usize, String)>,
}

impl FormRecord {
    pub fn from_form(form: &NormForm) -> Self {
        let mut coeffs = Vec::new();
        for (i, row) in form.coeff.coeff.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                use num_traits::Zero;
                if !c.is_zero() {
                    coeffs.push((i, j, c.to_string()));
                }
            }
        }
        FormRecord {
            field_id: form.field_id.clone(),
            n: form.n,
            z: form.shift.z.clone(),
            coeffs,
        }
    }

    pub fn to_form(&self) -> Result<NormForm> {
        let mut rows = vec![vec![BigInt::from(0); self.n + 1]; self.n + 1];
        for (i, j, c) in &self.coeffs {
            if *i > self.n || *j > self.n {
                return Err(CoreError::Config(format!(
                    "form coefficient index ({i},{j}) out of range for degree {}",
                    self.n
                )));
            }
            rows[*i][*j] = c
                .parse()
                .map_err(|_| CoreError::Config(format!("bad coefficient: {c}")))?;
        }
        Ok(NormForm {
            coeff: IPoly2::new(rows),
            n: self.n,
            field_id: self.field_id.clone(),
            shift: ShiftVector::new(self.z.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, ReduceParams};
    use crate::normform::build_form;
    use crate::poly::IPoly;

    #[test]
    fn envelope_canonical_json_zeroes_runtime() {
        let mut e = ReportEnvelope::new("test", "abc");
        e.push(AssertionRecord::new("r", 1.0, 2.0));
        e.runtime_ms = 917;
        let c = e.canonical_json().unwrap();
        assert!(c.contains("\"runtime_ms\": 0"));
        assert!(e.all_pass());
        e.push(AssertionRecord::new("fail", 3.0, 2.0));
        assert!(!e.all_pass());
    }

    #[test]
    fn form_record_round_trip() {
        let k = build_field(&IPoly::from_i64(&[-2, 0, 0, 0, 0, 1]), None).unwrap();
        let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
        let form = build_form(&k, &rb, &ShiftVector::new(vec![1, -1, 0]));
        let rec = FormRecord::from_form(&form);
        let back = rec.to_form().unwrap();
        assert_eq!(back, form);
        // survives JSON
        let text = serde_json::to_string(&rec).unwrap();
        let rec2: FormRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(rec2.to_form().unwrap(), form);
    }
}
