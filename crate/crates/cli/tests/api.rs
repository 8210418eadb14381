use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

async fn call(method: &str, uri: &str, body: &str) -> (StatusCode, String) {
    let static_dir = std::env::temp_dir().join("sra-api-test-webui");
    std::fs::create_dir_all(&static_dir).unwrap();
    std::fs::write(static_dir.join("index.html"), "<!doctype html><title>sra</title>\n").unwrap();
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = sra_cli::server::router(static_dir).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[tokio::test]
async fn unity_scale_factor_at_sixty_degrees() {
    let (status, body) = call("GET", "/api/v1/scale-factor?angle=60", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body), serde_json::json!({"itd": 1.0, "ild": 1.0, "combined": 1.0}));
}

#[tokio::test]
async fn scale_factor_out_of_range_is_422() {
    let (status, body) = call("GET", "/api/v1/scale-factor?angle=200", "").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&body)["error"], "OutOfRange");
}

#[tokio::test]
async fn bad_query_is_400() {
    let (status, body) = call("GET", "/api/v1/scale-factor?angle=wide", "").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["error"], "BadRequest");
}

#[tokio::test]
async fn layout_reports_pair_angles() {
    let (status, body) = call("GET", "/api/v1/layout?radius=3&elevation=30", "").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    let angles = &v["pair_angles_deg"];
    assert!((angles["height_front"].as_f64().unwrap() - 60.0).abs() < 1e-3);
    assert!((angles["height_surround"].as_f64().unwrap() - 97.2).abs() < 0.05);
    assert_eq!(v["channels"].as_array().unwrap().len(), 9);
}

#[tokio::test]
async fn solve_surround_pair() {
    let body = r#"{"pattern": "wide-cardioid", "axes": [-44, 44], "target_sra": 120, "base_angle": 60, "scale_to_angle": 120}"#;
    let (status, text) = call("POST", "/api/v1/solve", body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v = json(&text);
    let d = v["spacing_m"].as_f64().unwrap();
    assert!((0.24 * 0.65..=0.24 * 1.35).contains(&d), "{d}");
    assert!((v["scaled"]["spacing_m"].as_f64().unwrap() / d - 3f64.sqrt()).abs() < 1e-4);
}

#[tokio::test]
async fn solve_with_unknown_field_is_400() {
    let (status, _) = call("POST", "/api/v1/solve", r#"{"axes": [-44, 44], "target_sra": 120, "spin": 3}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sra_of_blumlein_pair() {
    let body = r#"{
        "left": {"position_m": [0, 0, 0], "axis_deg": {"azimuth": 45}, "pattern": "figure-eight"},
        "right": {"position_m": [0, 0, 0], "axis_deg": {"azimuth": -45}, "pattern": "figure-eight"},
        "base_angle": 60
    }"#;
    let (status, text) = call("POST", "/api/v1/sra", body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v = json(&text);
    assert!((v["sra"].as_f64().unwrap() - 74.0).abs() < 2.0);
    assert_eq!(v["curve"].as_array().unwrap().len(), 181);
}

#[tokio::test]
async fn sra_unbounded_is_422() {
    let body = r#"{
        "left": {"position_m": [0, 0, 0], "axis_deg": {"azimuth": 10}},
        "right": {"position_m": [0, 0, 0], "axis_deg": {"azimuth": -10}},
        "base_angle": 60
    }"#;
    let (status, text) = call("POST", "/api/v1/sra", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(json(&text)["error"], "Unbounded");
}

#[tokio::test]
async fn dfc_curve_and_cutoff() {
    let body = r#"{"pattern": 0.6667, "spacing": 1.0, "axes": [-60, 60], "points": 64}"#;
    let (status, text) = call("POST", "/api/v1/dfc-curve", body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v = json(&text);
    assert_eq!(v["points"].as_array().unwrap().len(), 64);
    let cutoff = v["cutoff_hz"].as_f64().unwrap();
    assert!((120.0..=200.0).contains(&cutoff));
}

#[tokio::test]
async fn coincident_wide_cardioids_never_decorrelate() {
    let body = r#"{"spacing": 0.0, "axes": [-30, 30], "points": 8}"#;
    let (status, text) = call("POST", "/api/v1/dfc-curve", body).await;
    assert_eq!(status, StatusCode::OK);
    assert!(json(&text)["cutoff_hz"].is_null());
}

#[tokio::test]
async fn design_without_front_compensation_succeeds() {
    let body = r#"{"layout": {"radius": 3, "elevation": 30, "base_surround_angle": 120, "compensate_height_front": false}}"#;
    let (status, text) = call("POST", "/api/v1/design", body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    assert_eq!(json(&text)["mics"].as_array().unwrap().len(), 9);
}

#[tokio::test]
async fn design_with_surround_compensation_is_no_solution() {
    let body = r#"{"layout": {"radius": 3, "elevation": 30, "compensate_height_surround": true}}"#;
    let (status, text) = call("POST", "/api/v1/design", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let v = json(&text);
    assert_eq!(v["error"], "NoSolution");
    assert!(v["detail"].as_str().unwrap().contains("infinity"));
}

#[tokio::test]
async fn malformed_design_body_is_400() {
    let (status, _) = call("POST", "/api/v1/design", "{\"layout\": ").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn preset_is_the_default_config() {
    let (status, text) = call("GET", "/api/v1/presets/auro9", "").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&text);
    assert_eq!(v["vertical_spacing"], 0.3);
    assert_eq!(v["scaling_workflow"], "distance");
    // the preset is a valid design request as is
    let (status, _) = call("POST", "/api/v1/design", &text).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn request_order_does_not_matter() {
    let a = call("GET", "/api/v1/scale-factor?angle=97.2", "").await;
    let _ = call("GET", "/api/v1/layout?radius=4&elevation=35", "").await;
    let b = call("GET", "/api/v1/scale-factor?angle=97.2", "").await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn static_bundle_is_served_at_root() {
    let (status, text) = call("GET", "/", "").await;
    assert_eq!(status, StatusCode::OK);
    assert!(text.contains("<title>sra</title>"));
}
