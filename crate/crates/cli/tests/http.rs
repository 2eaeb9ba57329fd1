use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use covertop_cli::http::{app, router};
use covertop_core::interface::{complex_json, load_json, save_json, SessionStore};
use covertop_core::*;
use http_body_util::BodyExt;
use tower::ServiceExt;

async fn send(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_owned())))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

async fn new_session(app: &Router) -> String {
    let (status, body) = send(app, "POST", "/api/session", None).await;
    assert_eq!(status, StatusCode::CREATED);
    json(&body)["id"].as_str().unwrap().to_owned()
}

fn service() -> Router {
    router(Arc::new(SessionStore::new()), 0)
}

#[tokio::test]
async fn fresh_session_has_default_network() {
    let app = service();
    let id = new_session(&app).await;
    let (status, body) = send(&app, "GET", &format!("/api/session/{id}/network"), None).await;
    assert_eq!(status, StatusCode::OK);
    let cfg = load_json(&body).unwrap();
    assert_eq!((cfg.len(), cfg.k(), cfg.eps()), (30, 8, 10.0));
}

#[tokio::test]
async fn unknown_session_and_node() {
    let app = service();
    let (status, body) = send(&app, "GET", "/api/session/nope/network", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(json(&body)["error"].as_str().unwrap().contains("nope"));
    let id = new_session(&app).await;
    let (status, _) = send(&app, "PATCH", &format!("/api/session/{id}/nodes/999"), Some(r#"{"dx":1,"dy":1}"#)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = send(&app, "DELETE", &format!("/api/session/{id}/nodes/abc"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn move_invalidates_cached_complex() {
    let app = service();
    let id = new_session(&app).await;
    let complex_uri = format!("/api/session/{id}/complex?kind=rips");
    let (_, before) = send(&app, "GET", &complex_uri, None).await;
    let (_, again) = send(&app, "GET", &complex_uri, None).await;
    assert_eq!(before, again);

    let (status, moved) = send(&app, "PATCH", &format!("/api/session/{id}/nodes/0"), Some(r#"{"dx":-30,"dy":40}"#)).await;
    assert_eq!(status, StatusCode::OK);
    let moved_cfg = load_json(&moved).unwrap();
    let (_, after) = send(&app, "GET", &complex_uri, None).await;
    let expected = complex_json(&moved_cfg, &build_probabilistic_complex(&moved_cfg, ComplexKind::Rips));
    assert_eq!(after, expected);

    let (_, cech) = send(&app, "GET", &format!("/api/session/{id}/complex?kind=cech"), None).await;
    assert_eq!(cech, complex_json(&moved_cfg, &build_probabilistic_complex(&moved_cfg, ComplexKind::Cech)));
}

#[tokio::test]
async fn add_and_delete_nodes() {
    let app = service();
    let id = new_session(&app).await;
    let (status, body) = send(&app, "POST", &format!("/api/session/{id}/nodes"), Some(r#"{"x":250,"y":250}"#)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(json(&body)["id"], 30);
    let (status, _) = send(&app, "DELETE", &format!("/api/session/{id}/nodes/3"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (_, net) = send(&app, "GET", &format!("/api/session/{id}/network"), None).await;
    let cfg = load_json(&net).unwrap();
    assert_eq!(cfg.len(), 30);
    assert!(cfg.node(NodeId(3)).is_none() && cfg.node(NodeId(30)).is_some());
    let (_, complex) = send(&app, "GET", &format!("/api/session/{id}/complex"), None).await;
    let doc: serde_json::Value = json(&complex);
    let mentions_three = doc["edges"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| e["nodes"].as_array().unwrap().contains(&serde_json::json!(3)));
    assert!(!mentions_three);
}

#[tokio::test]
async fn body_errors_name_the_field() {
    let app = service();
    let id = new_session(&app).await;
    let (status, body) = send(&app, "PATCH", &format!("/api/session/{id}/nodes/0"), Some(r#"{"dx":1}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["field"], "dy");
    let (status, body) = send(&app, "PUT", &format!("/api/session/{id}/params"), Some(r#"{"k":"many"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["field"], "k");
    let (status, _) = send(&app, "PUT", &format!("/api/session/{id}/params"), Some("{not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (_, net) = send(&app, "GET", &format!("/api/session/{id}/network"), None).await;
    let mut doc = json(&net);
    doc.as_object_mut().unwrap().remove("rc");
    let (status, body) = send(&app, "PUT", &format!("/api/session/{id}/network"), Some(&doc.to_string())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["field"], "rc");

    let (status, _) = send(&app, "GET", &format!("/api/session/{id}/complex?kind=alpha"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = send(&app, "GET", &format!("/api/session/{id}/point?x=1"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["field"], "y");
}

#[tokio::test]
async fn eps_above_rc_is_unprocessable() {
    let app = service();
    let id = new_session(&app).await;
    let (status, _) = send(&app, "PUT", &format!("/api/session/{id}/params"), Some(r#"{"eps":80}"#)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, net) = send(&app, "GET", &format!("/api/session/{id}/network"), None).await;
    let mut doc = json(&net);
    doc["eps"] = serde_json::json!(500.0);
    let (status, _) = send(&app, "PUT", &format!("/api/session/{id}/network"), Some(&doc.to_string())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = send(&app, "POST", &format!("/api/session/{id}/network/random"), Some(r#"{"rc":5,"eps":6}"#)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn params_regenerate_locations() {
    let app = service();
    let id = new_session(&app).await;
    let uri = format!("/api/session/{id}/params");
    let (status, body) = send(&app, "PUT", &uri, Some(r#"{"k":3,"eps":5}"#)).await;
    assert_eq!(status, StatusCode::OK);
    let cfg = load_json(&body).unwrap();
    assert!(cfg.nodes().iter().all(|n| n.k() == 3));
    let (_, body) = send(&app, "PUT", &uri, Some(r#"{"rc":70}"#)).await;
    let wider = load_json(&body).unwrap();
    assert_eq!(wider.rc(), 70.0);
    assert_eq!(wider.nodes(), cfg.nodes());
}

#[tokio::test]
async fn random_network_matches_generator() {
    let app = service();
    let id = new_session(&app).await;
    let body = r#"{"n":12,"k":4,"rc":40,"eps":8,"seed":21}"#;
    let (status, net) = send(&app, "POST", &format!("/api/session/{id}/network/random"), Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    let expected = generate_random(12, 4, 40.0, 8.0, Domain::square(500.0), 21).unwrap();
    assert_eq!(net, save_json(&expected));
}

#[tokio::test]
async fn point_coverage_at_an_anchor() {
    let app = service();
    let id = new_session(&app).await;
    let one = generate_random(1, 8, 50.0, 10.0, Domain::square(500.0), 2).unwrap();
    let (status, _) = send(&app, "PUT", &format!("/api/session/{id}/network"), Some(&save_json(&one))).await;
    assert_eq!(status, StatusCode::OK);
    let a = one.nodes()[0].anchor;
    let (status, body) = send(&app, "GET", &format!("/api/session/{id}/point?x={}&y={}", a.x(), a.y()), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["value"], 1.0);
}

#[tokio::test]
async fn coverage_estimate() {
    let app = service();
    let id = new_session(&app).await;
    let uri = format!("/api/session/{id}/coverage?samples=20&resolution=12.5&seed=3");
    let (status, body) = send(&app, "GET", &uri, None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["samples"], 20);
    assert_eq!(v["seed"], 3);
    let (_, again) = send(&app, "GET", &uri, None).await;
    assert_eq!(body, again);
    let (status, body) = send(&app, "GET", &format!("/api/session/{id}/coverage?resolution=40"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["field"], "resolution");
}

#[tokio::test]
async fn csv_upload() {
    let app = service();
    let id = new_session(&app).await;
    let (status, body) = send(&app, "POST", &format!("/api/session/{id}/network/csv?k=2&eps=1"), Some("x,y\n0,0\n10,0\n")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["nodes"], 2);
    let (status, body) = send(&app, "POST", &format!("/api/session/{id}/network/csv"), Some("x,y\n0,0\na,b\n")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(json(&body)["error"].as_str().unwrap().contains("line 3"));
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = service();
    let a = new_session(&app).await;
    let b = new_session(&app).await;
    assert_ne!(a, b);
    send(&app, "DELETE", &format!("/api/session/{a}/nodes/0"), None).await;
    let (_, net_b) = send(&app, "GET", &format!("/api/session/{b}/network"), None).await;
    assert_eq!(load_json(&net_b).unwrap().len(), 30);
}

#[tokio::test]
async fn static_files_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>planner</html>").unwrap();
    let app = app(Arc::new(SessionStore::new()), 0, Some(dir.path()));
    let (status, body) = send(&app, "GET", "/index.html", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body.contains("planner"));
    let (status, _) = send(&app, "POST", "/api/session", None).await;
    assert_eq!(status, StatusCode::CREATED);
}
