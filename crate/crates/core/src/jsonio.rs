//! JSON interchange formats.
//!
//! Matrices travel as `{"dim": n, "re": [[..]], "im": [[..]]}` with row-major
//! real and imaginary grids. Wightman functionals travel as
//! `{"b": n, "d_max": d, "W": {"1": [..], "2": [[..]], ..}, "star": [..]}`
//! where the degree-n block is an n-deep nested array over the degree-1
//! basis; scalar entries may be plain numbers or `[re, im]` pairs.

use crate::borchers::{AlgebraBasis, WightmanFunctional};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Serialize a square complex matrix.
pub fn matrix_to_json(m: &CMat) -> Result<String> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidJson(format!(
            "matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let re = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
        .collect();
    serde_json::to_string(&MatrixJson { dim: n, re, im })
        .map_err(|e| Error::InvalidJson(e.to_string()))
}

/// Parse a square complex matrix.
pub fn matrix_from_json(text: &str) -> Result<CMat> {
    let parsed: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidJson(e.to_string()))?;
    let n = parsed.dim;
    let grid_ok = |g: &Vec<Vec<f64>>| g.len() == n && g.iter().all(|row| row.len() == n);
    if !grid_ok(&parsed.re) || !grid_ok(&parsed.im) {
        return Err(Error::InvalidJson(format!(
            "re/im grids do not match dim = {n}"
        )));
    }
    Ok(CMat::from_fn(n, n, |i, j| {
        c64(parsed.re[i][j], parsed.im[i][j])
    }))
}

fn scalar_from_value(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(x) => Ok(c64(
            x.as_f64()
                .ok_or_else(|| Error::InvalidJson("non-finite number".into()))?,
            0.0,
        )),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| Error::InvalidJson("bad [re, im] pair".into()))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| Error::InvalidJson("bad [re, im] pair".into()))?;
            Ok(c64(re, im))
        }
        other => Err(Error::InvalidJson(format!(
            "expected number or [re, im], got {other}"
        ))),
    }
}

/// Flatten an n-deep nested array of shape b^n into big-endian word order.
fn flatten_block(v: &Value, depth: usize, b: usize, out: &mut Vec<Complex64>) -> Result<()> {
    if depth == 0 {
        out.push(scalar_from_value(v)?);
        return Ok(());
    }
    let arr = v.as_array().ok_or_else(|| {
        Error::InvalidJson(format!("expected array of length {b} at depth {depth}"))
    })?;
    if arr.len() != b {
        return Err(Error::InvalidJson(format!(
            "expected array of length {b}, got {}",
            arr.len()
        )));
    }
    for item in arr {
        flatten_block(item, depth - 1, b, out)?;
    }
    Ok(())
}

/// Parse a Wightman functional. Missing degree blocks default to zero, and
/// the degree-0 block is pinned to W(1) = 1 by normalization.
pub fn wightman_from_json(text: &str) -> Result<WightmanFunctional> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::InvalidJson(e.to_string()))?;
    let b = root["b"]
        .as_u64()
        .ok_or_else(|| Error::InvalidJson("missing field b".into()))? as usize;
    let d_max = root["d_max"]
        .as_u64()
        .ok_or_else(|| Error::InvalidJson("missing field d_max".into()))? as usize;
    let star: Vec<usize> = match &root["star"] {
        Value::Null => (0..b).collect(),
        Value::Array(a) => a
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::InvalidJson("bad star entry".into()))
            })
            .collect::<Result<_>>()?,
        other => return Err(Error::InvalidJson(format!("bad star field: {other}"))),
    };
    let basis = AlgebraBasis::new(b, d_max, star)?;

    let mut blocks: Vec<Vec<Complex64>> = (0..=d_max)
        .map(|n| vec![c64(0.0, 0.0); b.pow(n as u32)])
        .collect();
    blocks[0][0] = c64(1.0, 0.0);
    if let Value::Object(map) = &root["W"] {
        for (key, val) in map {
            let n: usize = key
                .parse()
                .map_err(|_| Error::InvalidJson(format!("bad degree key {key}")))?;
            if n == 0 || n > d_max {
                return Err(Error::InvalidJson(format!(
                    "degree key {n} outside 1..={d_max}"
                )));
            }
            let mut flat = Vec::with_capacity(b.pow(n as u32));
            flatten_block(val, n, b, &mut flat)?;
            blocks[n] = flat;
        }
    }
    WightmanFunctional::new(basis, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_entry;

    #[test]
    fn matrix_roundtrip() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c64(1.0, 2.0), c64(0.0, -1.0), c64(3.5, 0.0), c64(0.0, 0.0)],
        );
        let text = matrix_to_json(&m).unwrap();
        let back = matrix_from_json(&text).unwrap();
        assert!(max_abs_entry(&(back - m)) == 0.0);
    }

    #[test]
    fn matrix_rejects_ragged_grid() {
        let bad = r#"{"dim": 2, "re": [[1.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
        assert!(matrix_from_json(bad).is_err());
    }

    #[test]
    fn field_operator_matrix_roundtrips() {
        use crate::fock::{build_fock, MomentumLattice, TestFunction};
        let lat = MomentumLattice::from_modes(4.0, vec![[0, 0, 1]]).unwrap();
        let fock = build_fock(lat, 1, 100).unwrap();
        let f = TestFunction::from_profile(vec![c64(0.4, -0.2)], [c64(1.0, 0.0); 4], false);
        let op = fock.field_a(2, &f).unwrap();
        let text = matrix_to_json(&op.matrix).unwrap();
        let back = matrix_from_json(&text).unwrap();
        assert_eq!(max_abs_entry(&(back - &op.matrix)), 0.0);
    }

    #[test]
    fn ingested_wightman_feeds_gns() {
        let text = r#"{
            "b": 2, "d_max": 2,
            "W": {"2": [[1.0, 0.0], [0.0, -1.0]]},
            "star": [0, 1]
        }"#;
        let w = wightman_from_json(text).unwrap();
        let gns = crate::borchers::gns_construct(&w, &crate::krein::Tolerances::default()).unwrap();
        assert_eq!(gns.quotient_dim(), 3);
    }

    #[test]
    fn wightman_parses_nested_blocks() {
        let text = r#"{
            "b": 2, "d_max": 2,
            "W": {"2": [[1.0, 0.0], [0.0, [-1.0, 0.0]]]},
            "star": [0, 1]
        }"#;
        let w = wightman_from_json(text).unwrap();
        assert_eq!(w.block(2)[0], c64(1.0, 0.0));
        assert_eq!(w.block(2)[3], c64(-1.0, 0.0));
        assert_eq!(w.block(0)[0], c64(1.0, 0.0));
    }
}
