//! Browser bindings. Every export takes and returns JSON text so the page can
//! stay plain JavaScript.

use padic_vc_lab::fsg::{exact_min_cover, greedy_cover};
use padic_vc_lab::groups::GroupDescriptor;
use padic_vc_lab::rational::parse_rational;
use padic_vc_lab::sets::{CylinderSet, WindowSet};
use padic_vc_lab::vc::{net_size, NetRequest};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_DEMO_ORDER: usize = 20_000;

fn eps(s: &str) -> Result<padic_vc_lab::Rational, String> {
    parse_rational(s.trim()).ok_or_else(|| format!("not a rational: {s:?}"))
}

/// `N(k, ε)` for each `k` in `1..=max_k`.
pub fn net_size_curve_json(max_k: u64, epsilon: &str) -> Result<String, String> {
    let e = eps(epsilon)?;
    let mut rows = Vec::new();
    for k in 1..=max_k.clamp(1, 12) {
        let req = NetRequest::new(k, e.clone()).map_err(|e| e.to_string())?;
        rows.push(json!({ "k": k, "n": net_size(&req) }));
    }
    Ok(json!({ "epsilon": e.to_string(), "rows": rows }).to_string())
}

pub fn cover_json(group: &str, set: &str) -> Result<String, String> {
    let g: GroupDescriptor = serde_json::from_str(group).map_err(|e| e.to_string())?;
    let d: CylinderSet = serde_json::from_str(set).map_err(|e| e.to_string())?;
    let q = g.quotient().map_err(|e| e.to_string())?;
    if q.len() > MAX_DEMO_ORDER {
        return Err(format!("quotient of order {} is too large for the demo", q.len()));
    }
    let cert = greedy_cover(&q, &d, q.len()).map_err(|e| e.to_string())?;
    let exact = exact_min_cover(&q, &d, 200_000).ok().flatten();
    Ok(json!({
        "order": q.len(),
        "measure": cert.measure.to_string(),
        "covered": cert.covered,
        "k": cert.k(),
        "lower_bound": cert.lower_bound,
        "exact_k": exact,
        "translates": cert.translates,
    })
    .to_string())
}

pub fn window_json(set: &str) -> Result<String, String> {
    let w: WindowSet = serde_json::from_str(set).map_err(|e| e.to_string())?;
    Ok(json!({
        "closed": w.is_closed(),
        "bounded": w.is_bounded(),
        "compact": w.is_definably_compact(),
        "measure": w.measure().map(|m| m.to_string()),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn net_size_curve(max_k: u32, epsilon: &str) -> Result<String, JsValue> {
    net_size_curve_json(max_k as u64, epsilon).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cover(group: &str, set: &str) -> Result<String, JsValue> {
    cover_json(group, set).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn window(set: &str) -> Result<String, JsValue> {
    window_json(set).map_err(|e| JsValue::from_str(&e))
}
