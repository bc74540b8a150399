use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use picaria::api::{router, GameService, ServiceConfig};
use picaria::board::BoardSpec;
use picaria::solver::solve;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    let svc = GameService::new(ServiceConfig::default()).unwrap();
    let b = BoardSpec::new(3, 4).unwrap();
    svc.preload(b.clone(), solve(&b));
    router(Arc::new(svc))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or(Body::empty(), |b| Body::from(b.to_string())))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = axum::body::to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

/// Plays random legal moves for the human, the way the web client would:
/// fetch the move list, pick one, post it, read back the state.
async fn scripted_human(human: &str, seed: u64, plies: usize) -> Vec<String> {
    let app = app();
    let mut rng = StdRng::seed_from_u64(seed);
    let (_, state) = call(&app, "POST", "/sessions", Some(json!({"k":3,"s":4,"human":human}))).await;
    let id = state["id"].as_str().unwrap().to_string();
    let mut endings = Vec::new();
    let mut status = state["status"].as_str().unwrap().to_string();
    for _ in 0..plies {
        if status != "ongoing" {
            endings.push(status.clone());
            let (st, state) = call(&app, "POST", &format!("/sessions/{id}/reset"), None).await;
            assert_eq!(st, StatusCode::OK);
            assert_eq!(state["status"], "ongoing");
        }
        let (st, moves) = call(&app, "GET", &format!("/sessions/{id}/moves"), None).await;
        assert_eq!(st, StatusCode::OK);
        let list = moves["moves"].as_array().unwrap();
        let pick = list.choose(&mut rng).unwrap();
        let (st, state) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"move": pick["move"]}))).await;
        assert_eq!(st, StatusCode::OK, "{state}");
        status = state["status"].as_str().unwrap().to_string();
    }
    endings.push(status);
    endings
}

#[tokio::test]
async fn random_human_never_beats_the_engine() {
    for (human, seed) in [("x", 1), ("x", 2), ("o", 3), ("o", 4)] {
        let endings = scripted_human(human, seed, 200).await;
        let lost = format!("won-by-{human}");
        assert!(!endings.contains(&lost), "{human} won: {endings:?}");
    }
}

#[tokio::test]
async fn opening_badges_are_all_draws() {
    let app = app();
    let (_, state) = call(&app, "POST", "/sessions", Some(json!({"k":3,"s":4,"human":"x"}))).await;
    let id = state["id"].as_str().unwrap();
    let (_, moves) = call(&app, "GET", &format!("/sessions/{id}/moves"), None).await;
    let tags: Vec<&str> = moves["moves"].as_array().unwrap().iter().map(|m| m["value"]["tag"].as_str().unwrap()).collect();
    assert_eq!(tags, ["D"; 9]);
}

#[tokio::test]
async fn state_document_shape() {
    let app = app();
    let (_, state) = call(&app, "POST", "/sessions", Some(json!({"k":3,"s":4,"human":"x"}))).await;
    for key in ["id", "k", "s", "position", "to_move", "phase", "human", "status", "value", "history", "grid"] {
        assert!(state.get(key).is_some(), "missing {key}");
    }
    let id = state["id"].as_str().unwrap();
    let (_, state) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"move":{"type":"place","to":0}}))).await;
    let first = &state["history"][0];
    assert_eq!(first["player"], "x");
    assert_eq!(first["move"], json!({"type":"place","to":0,"grid":{"to":[0,0]}}));
    assert_eq!(state["grid"][0].as_str().unwrap().chars().next(), Some('x'));
}

#[tokio::test]
async fn other_boards_have_no_grid() {
    let svc = GameService::new(ServiceConfig::default()).unwrap();
    let app = router(Arc::new(svc));
    let (st, state) = call(&app, "POST", "/sessions", Some(json!({"k":3,"s":3,"human":"o"}))).await;
    assert_eq!(st, StatusCode::OK);
    assert!(state.get("grid").is_none());
    assert!(state["engine_move"]["grid"].is_null());
    let (st, _) = call(&app, "POST", "/sessions", Some(json!({"k":3,"s":15,"human":"o"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
}
