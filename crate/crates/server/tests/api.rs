use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use zahlenschlacht::game::{GameConfig, Player};
use zahlenschlacht::registry::registry;
use zahlenschlacht::session::{Mode, Session, SessionStore};
use zahlenschlacht::strategy::Strategy;
use zahlenschlacht::strategy_a::ConstructiveA;
use zahlenschlacht_server::router;

const SCHEMA: &str = include_str!("../../../schema/api.schema.json");

struct Api {
    app: Router,
    root: Value,
}

impl Api {
    fn new() -> Self {
        Self {
            app: router(Arc::new(SessionStore::new())),
            root: serde_json::from_str(SCHEMA).unwrap(),
        }
    }

    async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let builder = Request::builder().method(method).uri(uri);
        let request = match body {
            Some(b) => builder
                .header("content-type", "application/json")
                .body(Body::from(b.to_string())),
            None => builder.body(Body::empty()),
        }
        .unwrap();
        let response = self.app.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let bytes = response.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap())
    }

    fn check(&self, def: &str, value: &Value) {
        let schema = json!({ "$defs": self.root["$defs"], "$ref": format!("#/$defs/{def}") });
        let validator = jsonschema::validator_for(&schema).unwrap();
        let errors: Vec<String> = validator
            .iter_errors(value)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{def}: {errors:?}\n{value:#}");
    }

    async fn create(&self, body: Value) -> Value {
        let (status, view) = self.call(Method::POST, "/games", Some(body)).await;
        assert_eq!(status, StatusCode::CREATED, "{view}");
        self.check("session_view", &view);
        view
    }

    async fn submit(&self, id: &str, body: Value) -> (StatusCode, Value) {
        let (status, response) = self
            .call(Method::POST, &format!("/games/{id}/moves"), Some(body))
            .await;
        let def = if status == StatusCode::OK {
            "move_response"
        } else {
            "error"
        };
        self.check(def, &response);
        (status, response)
    }
}

#[tokio::test]
async fn variants_list_the_registry() {
    let api = Api::new();
    let (status, body) = api.call(Method::GET, "/variants", None).await;
    assert_eq!(status, StatusCode::OK);
    api.check("variants_response", &body);
    assert_eq!(body["count"], registry().count);
    let listed: Vec<GameConfig> = serde_json::from_value(body["vs_bot"].clone()).unwrap();
    assert_eq!(listed, registry().variants);
}

#[tokio::test]
async fn optimal_play_beats_the_bot_over_http() {
    let api = Api::new();
    let config = GameConfig::new(15, 7).unwrap();
    let view = api
        .create(json!({"n": 15, "d": 7, "mode": "vs_bot", "seed": 3}))
        .await;
    let id = view["id"].as_str().unwrap().to_string();
    let mut a = ConstructiveA::new(config).unwrap();
    let mut mirror = zahlenschlacht::game::BoardState::new(config);
    loop {
        let number = a.next_move(&mirror).unwrap();
        let (status, response) = api
            .submit(&id, json!({"number": number, "player": "A"}))
            .await;
        assert_eq!(status, StatusCode::OK);
        for event in response["events"].as_array().unwrap() {
            mirror
                .remove(event["number"].as_u64().unwrap() as u32)
                .unwrap();
        }
        if response["view"]["status"] == "finished" {
            assert_eq!(response["view"]["winner"], "A");
            let pair = response["view"]["final_pair"].as_array().unwrap();
            let sum: u64 = pair.iter().map(|x| x.as_u64().unwrap()).sum();
            assert_eq!(sum % 7, 0);
            break;
        }
    }
    let (status, log) = api
        .call(Method::GET, &format!("/games/{id}/events"), None)
        .await;
    assert_eq!(status, StatusCode::OK);
    api.check("events_response", &log);
    assert_eq!(log["events"].as_array().unwrap().len(), 13);
}

#[tokio::test]
async fn errors_carry_codes() {
    let api = Api::new();
    let view = api
        .create(json!({"n": 9, "d": 4, "mode": "hot_seat"}))
        .await;
    let id = view["id"].as_str().unwrap();

    let (status, body) = api.submit(id, json!({"number": 99})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "illegal_move");

    let (status, body) = api.submit(id, json!({"number": 1, "player": "B"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "not_your_turn");

    let (status, _) = api.submit(id, json!({"number": 1})).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = api.submit(id, json!({"number": 1})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "illegal_move");

    let (status, body) = api.submit(id, json!({"nummer": 2})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "illegal_move");

    for number in 2..=7 {
        api.submit(id, json!({"number": number})).await;
    }
    let (status, body) = api.submit(id, json!({"number": 8})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "session_finished");

    let (status, body) = api.call(Method::GET, "/games/feed", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    api.check("error", &body);
    assert_eq!(body["code"], "session_not_found");

    for (request, code) in [
        (
            json!({"n": 3, "d": 4, "mode": "hot_seat"}),
            "invalid_config",
        ),
        (
            json!({"n": 9, "d": 1, "mode": "hot_seat"}),
            "invalid_config",
        ),
        (json!({"n": 9, "d": 4, "mode": "team"}), "invalid_config"),
        (
            json!({"n": 9, "d": 30, "mode": "vs_bot"}),
            "unknown_variant",
        ),
        (
            json!({"n": 10, "d": 4, "mode": "vs_bot"}),
            "unknown_variant",
        ),
    ] {
        let (status, body) = api
            .call(Method::POST, "/games", Some(request.clone()))
            .await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{request}");
        api.check("error", &body);
        assert_eq!(body["code"], code, "{request}");
    }
}

/// A game played through the API and the same moves fed to a session
/// directly produce the same events and the same view.
#[tokio::test]
async fn api_matches_the_engine() {
    let api = Api::new();
    for (k, &config) in registry().variants.iter().enumerate().step_by(9) {
        let seed = k as u64;
        let view = api
            .create(json!({"n": config.n(), "d": config.d(), "mode": "vs_bot", "seed": seed}))
            .await;
        let id = view["id"].as_str().unwrap().to_string();
        let mut direct = Session::create(&id, config, Mode::VsBot, seed).unwrap();
        let mut step = 0;
        while direct.view().status == "in_progress" {
            let live = direct.view().live;
            let number = live[(step * 5 + 2) % live.len()];
            step += 1;
            let expected = direct.submit_move(number, Some(Player::A)).unwrap();
            let (status, response) = api
                .submit(&id, json!({"number": number, "player": "A"}))
                .await;
            assert_eq!(status, StatusCode::OK);
            let got: Vec<(u32, Player)> = response["events"]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| {
                    (
                        e["number"].as_u64().unwrap() as u32,
                        serde_json::from_value(e["actor"].clone()).unwrap(),
                    )
                })
                .collect();
            let want: Vec<(u32, Player)> = expected.iter().map(|e| (e.number, e.actor)).collect();
            assert_eq!(got, want, "{config}");
        }
        let (_, api_view) = api.call(Method::GET, &format!("/games/{id}"), None).await;
        assert_eq!(
            api_view,
            serde_json::to_value(direct.view()).unwrap(),
            "{config}"
        );
    }
}
