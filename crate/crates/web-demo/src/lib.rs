//! WebAssembly bindings for the demo page in `www/`. Every function returns
//! a JSON string; errors become thrown JavaScript strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use heislab::blowup::{wedge_from_circles, RhoSchedule, WedgeEstimate};
use heislab::heis::{cc_distance, gauge_distance, GaugeChoice, HPoint};
use heislab::io::to_json_string;
use heislab::jets::{GalleryMap, Mapping};
use heislab::measure::{dyadic_scales, euclid_vs_heis_compare, MapCloud, PairedFits};

#[derive(Serialize)]
pub struct Distances {
    pub point: [f64; 3],
    pub koranyi: f64,
    pub carnot_caratheodory: f64,
    pub euclidean: f64,
    /// `d_cc / N`, which stays within fixed bounds for every point.
    pub ratio: f64,
}

pub fn distances_from_origin(x: f64, y: f64, t: f64) -> Result<Distances, String> {
    let p = HPoint::new(vec![x], vec![y], t).map_err(|e| e.to_string())?;
    let o = HPoint::h1(0.0, 0.0, 0.0);
    let koranyi = gauge_distance(&o, &p, GaugeChoice::Koranyi).map_err(|e| e.to_string())?;
    let euclidean = gauge_distance(&o, &p, GaugeChoice::Euclidean).map_err(|e| e.to_string())?;
    let cc = cc_distance(&p).map_err(|e| e.to_string())?.length;
    Ok(Distances {
        point: [x, y, t],
        koranyi,
        carnot_caratheodory: cc,
        euclidean,
        ratio: if koranyi > 0.0 {
            cc / koranyi
        } else {
            f64::NAN
        },
    })
}

#[derive(Serialize)]
pub struct WedgeTable {
    pub map: String,
    pub center: [f64; 2],
    pub analytic: Option<f64>,
    pub result: WedgeEstimate,
}

pub fn wedge_table(
    map: &str,
    z1: f64,
    z2: f64,
    radius: f64,
    steps: usize,
) -> Result<WedgeTable, String> {
    let f: GalleryMap = map.parse().map_err(|e: heislab::Error| e.to_string())?;
    if f.source_dim() != 2 {
        return Err(format!(
            "{map} has m = {}; pick a map of the plane",
            f.source_dim()
        ));
    }
    let schedule = RhoSchedule::new(0.5, steps).map_err(|e| e.to_string())?;
    let result = wedge_from_circles(&f, &[z1, z2], &schedule, radius).map_err(|e| e.to_string())?;
    Ok(WedgeTable {
        map: f.id(),
        center: [z1, z2],
        analytic: heislab::blowup::analytic_wedge(&f, &[z1, z2]),
        result,
    })
}

/// Box-counting fits of a gallery map sampled on `[0, 1]^m`, over scales
/// `2^-a .. 2^-b`. Each axis gets enough nodes for the finest scale.
pub fn box_count_fit(map: &str, a: i32, b: i32) -> Result<PairedFits, String> {
    let f: GalleryMap = map.parse().map_err(|e: heislab::Error| e.to_string())?;
    if !(1..=12).contains(&a) || !(a..=a + 8).contains(&b) || b > 10 {
        return Err("choose 1 <= a <= b <= 10".into());
    }
    let m = f.source_dim();
    // The t spacing must resolve the square root of the finest box side.
    let per_axis = (1usize << (b + 2)) + 1;
    let vertical = (1usize << (2 * b + 4)) + 1;
    let counts: Vec<usize> = (0..m)
        .map(|k| if k + 1 == m { vertical } else { per_axis })
        .collect();
    if counts.iter().product::<usize>() > 1 << 26 {
        return Err("too many samples for the browser; lower b".into());
    }
    let cloud =
        MapCloud::uniform(f, &vec![0.0; m], &vec![1.0; m], &counts).map_err(|e| e.to_string())?;
    euclid_vs_heis_compare(&cloud, &dyadic_scales(a, b)).map_err(|e| e.to_string())
}

fn json<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| to_json_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = distances)]
pub fn distances_js(x: f64, y: f64, t: f64) -> Result<String, JsValue> {
    json(distances_from_origin(x, y, t))
}

#[wasm_bindgen(js_name = wedgeTable)]
pub fn wedge_table_js(
    map: &str,
    z1: f64,
    z2: f64,
    radius: f64,
    steps: usize,
) -> Result<String, JsValue> {
    json(wedge_table(map, z1, z2, radius, steps))
}

#[wasm_bindgen(js_name = boxCountFit)]
pub fn box_count_fit_js(map: &str, a: i32, b: i32) -> Result<String, JsValue> {
    json(box_count_fit(map, a, b))
}

/// Gallery ids of maps of the plane and of segments, for the page's menus.
#[wasm_bindgen(js_name = galleryIds)]
pub fn gallery_ids() -> String {
    let ids: Vec<(&str, usize)> = GalleryMap::catalogue()
        .map(|(id, m)| (id, m.source_dim()))
        .collect();
    to_json_string(&ids).unwrap_or_default()
}
