//! Text formats: 17-significant-digit numbers, CSV tables, JSON reports,
//! sampled-map files and minimal SVG plots.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

mod csv;
mod svg;

pub use csv::{
    cloud_from_csv, cloud_to_csv, cover_table_csv, nodes_to_csv, sampled_map_from_csv,
    sampled_map_from_json, sampled_map_to_csv, sampled_map_to_json,
};
pub use svg::{heatmap_svg, loglog_svg, Series};

/// A float with 17 significant digits, enough to round-trip any `f64`. The
/// exponent always carries a sign, as in `1.0000000000000000e+0`.
pub fn f17(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn reformat(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("finite by construction");
            *n = serde_json::from_str::<Number>(&f17(x)).expect("valid literal");
        }
        Value::Array(items) => items.iter_mut().for_each(reformat),
        Value::Object(map) => map.values_mut().for_each(reformat),
        _ => {}
    }
}

/// Pretty JSON with every float printed by [`f17`]; non-finite floats
/// become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    reformat(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = f17(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(f17(1.0), "1.0000000000000000e+0");
        assert_eq!(f17(-0.25), "-2.5000000000000000e-1");
        assert_eq!(f17(f64::NAN), "NaN");
    }

    #[derive(Serialize)]
    struct R {
        a: f64,
        n: usize,
        b: Vec<f64>,
    }

    #[test]
    fn json_floats_and_integers() {
        let s = to_json_string(&R {
            a: 0.1,
            n: 3,
            b: vec![2.0, f64::NAN],
        })
        .unwrap();
        assert!(s.contains("\"a\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        assert!(
            s.contains("2.0000000000000000e+0") && s.contains("null"),
            "{s}"
        );
    }
}
