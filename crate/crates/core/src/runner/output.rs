//! Run artifacts: the time-series CSV, the structured summary, and flat
//! binary field snapshots.
//!
//! `timeseries.csv` has the fixed column order
//! `t, chi, E_beta, D_low, E_trunc, D_trunc, q_L2, q_H4_surrogate, h_mean,
//! h_max, min_dNqt, hopf_ratio, enthalpy`, every float printed with 17
//! significant digits, so identical runs produce identical bytes.
//!
//! Snapshot files carry a 32-byte header:
//! bytes 0–3 magic `SFD1`, 4–7 dtype code (u32 LE, 1 = f64 LE), 8–11 n_r
//! (u32 LE), 12–15 n_theta (u32 LE), 16–23 time (f64 LE), 24–31 reserved
//! zeros; then n_r·n_theta f64 LE values in ring-major order.

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"SFD1";
pub const DTYPE_F64_LE: u32 = 1;

pub const CSV_HEADER: &str =
    "t,chi,E_beta,D_low,E_trunc,D_trunc,q_L2,q_H4_surrogate,h_mean,h_max,min_dNqt,hopf_ratio,enthalpy";

fn fmt(v: f64) -> String {
    // 17 significant digits: enough to reproduce the f64 bit pattern
    format!("{v:.16e}")
}

pub fn timeseries_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 256 + 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let cols = [
            r.t,
            r.chi,
            r.e_beta,
            r.d_low,
            r.e_trunc,
            r.d_trunc,
            r.q_l2,
            r.q_h4,
            r.h_mean,
            r.h_max,
            r.min_dnqt,
            r.hopf_ratio,
            r.enthalpy,
        ];
        let row: Vec<String> = cols.iter().map(|v| fmt(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Serialize one scalar snapshot (n_r may be 1 for boundary rings).
pub fn encode_snapshot(t: f64, n_r: usize, n_theta: usize, data: &[f64]) -> Vec<u8> {
    assert_eq!(data.len(), n_r * n_theta);
    let mut buf = Vec::with_capacity(32 + data.len() * 8);
    buf.extend_from_slice(&SNAPSHOT_MAGIC);
    buf.extend_from_slice(&DTYPE_F64_LE.to_le_bytes());
    buf.extend_from_slice(&(n_r as u32).to_le_bytes());
    buf.extend_from_slice(&(n_theta as u32).to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    buf.extend_from_slice(&[0u8; 8]);
    for v in data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

/// Inverse of [`encode_snapshot`]; returns (t, n_r, n_theta, values).
pub fn decode_snapshot(bytes: &[u8]) -> Result<(f64, usize, usize, Vec<f64>)> {
    if bytes.len() < 32 || bytes[0..4] != SNAPSHOT_MAGIC {
        return Err(Error::Numerical("not a snapshot file".into()));
    }
    let dtype = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if dtype != DTYPE_F64_LE {
        return Err(Error::Numerical(format!("unsupported dtype code {dtype}")));
    }
    let n_r = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let n_theta = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let t = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let expected = 32 + n_r * n_theta * 8;
    if bytes.len() != expected {
        return Err(Error::Numerical(format!(
            "snapshot truncated: {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let mut data = Vec::with_capacity(n_r * n_theta);
    for chunk in bytes[32..].chunks_exact(8) {
        data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    Ok((t, n_r, n_theta, data))
}

pub fn write_snapshot_file(path: &Path, t: f64, n_r: usize, n_theta: usize, data: &[f64]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_snapshot(t, n_r, n_theta, data))?;
    Ok(())
}

pub fn read_snapshot_file(path: &Path) -> Result<(f64, usize, usize, Vec<f64>)> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode_snapshot(&buf)
}

/// Ordered key = value summary with a pass/fail table at the end.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    entries: Vec<(String, String)>,
    checks: Vec<(String, bool)>,
}

impl Summary {
    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_float(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), fmt(value)));
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        self.checks.push((name.to_string(), pass));
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|(_, p)| *p)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn check_result(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(k, _)| k == name).map(|(_, p)| *p)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        for (k, p) in &self.checks {
            out.push_str("check.");
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(if *p { "pass" } else { "fail" });
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip_bit_exact() {
        let data: Vec<f64> = (0..48).map(|i| (i as f64).sin() * 1e-7 + i as f64).collect();
        let bytes = encode_snapshot(0.125, 4, 12, &data);
        assert_eq!(bytes.len(), 32 + 48 * 8);
        let (t, n_r, n_theta, back) = decode_snapshot(&bytes).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!((n_r, n_theta), (4, 12));
        for (a, b) in data.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn corrupt_snapshot_rejected() {
        let data = vec![1.0; 6];
        let mut bytes = encode_snapshot(0.0, 2, 3, &data);
        bytes[0] = b'X';
        assert!(decode_snapshot(&bytes).is_err());
        let mut truncated = encode_snapshot(0.0, 2, 3, &data);
        truncated.pop();
        assert!(decode_snapshot(&truncated).is_err());
    }

    #[test]
    fn csv_float_format_has_17_significant_digits() {
        let s = fmt(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
    }
}
