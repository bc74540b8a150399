//! HTTP/JSON game service: a human plays one side, the solved table plays
//! the other.
//!
//! | method | path                   | body                                     |
//! |--------|------------------------|------------------------------------------|
//! | POST   | `/sessions`            | `{"k":3,"s":4,"human":"x"}`              |
//! | GET    | `/sessions/{id}`       |                                          |
//! | GET    | `/sessions/{id}/moves` |                                          |
//! | POST   | `/sessions/{id}/moves` | `{"move":{"type":"slide","from":4,"to":3}}` |
//! | POST   | `/sessions/{id}/reset` |                                          |
//! | GET    | `/health`              |                                          |
//!
//! Every session answer is a [`StateDoc`]. `GET /sessions/{id}/moves` lists
//! the legal moves with the value each one would have for the mover. A
//! session ends when a line is made, when the side to move is blocked, or
//! when the same position (up to symmetry, same mover) occurs a third time.

use std::fs::{File, OpenOptions};
use std::future::Future;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use tokio::sync::OnceCell;
use uuid::Uuid;

use crate::board::{BoardSpec, Node};
use crate::counting::multinomial;
use crate::position::{Move, Phase, Player, Position};
use crate::solver::{best_moves, solve_cached, GameValue, SolveTable, ValueClass};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

/// Largest board (in raw sliding-phase boards) the service will solve on
/// demand.
pub const DEFAULT_MAX_BOARDS: u128 = 200_000;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no session {0}")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) | ApiError::IllegalMove(_) => StatusCode::BAD_REQUEST,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ongoing,
    WonByX,
    WonByO,
    DrawnByRepetition,
}

impl Status {
    fn won_by(p: Player) -> Status {
        match p {
            Player::X => Status::WonByX,
            Player::O => Status::WonByO,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveType {
    Place,
    Slide,
}

/// `(row, col)` of the nodes a move touches, on the square board only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridMove {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<(u8, u8)>,
    pub to: (u8, u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDoc {
    #[serde(rename = "type")]
    pub kind: MoveType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Node>,
    pub to: Node,
    #[serde(default, skip_deserializing, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridMove>,
}

impl MoveDoc {
    fn new(spec: &BoardSpec, mv: Move) -> Self {
        let grid = spec.grid_mapping().ok().map(|g| GridMove {
            from: mv.from().map(|n| g[n as usize]),
            to: g[mv.to() as usize],
        });
        let kind = match mv {
            Move::Place(_) => MoveType::Place,
            Move::Slide { .. } => MoveType::Slide,
        };
        MoveDoc { kind, from: mv.from(), to: mv.to(), grid }
    }

    fn to_move(&self) -> Result<Move, ApiError> {
        match (self.kind, self.from) {
            (MoveType::Place, None) => Ok(Move::Place(self.to)),
            (MoveType::Place, Some(_)) => {
                Err(ApiError::BadRequest("a placement has no \"from\" node".into()))
            }
            (MoveType::Slide, Some(from)) => Ok(Move::Slide { from, to: self.to }),
            (MoveType::Slide, None) => {
                Err(ApiError::BadRequest("a slide needs a \"from\" node".into()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValueDoc {
    pub class: ValueClass,
    pub depth: Option<u32>,
    pub tag: char,
}

impl From<GameValue> for ValueDoc {
    fn from(v: GameValue) -> Self {
        ValueDoc { class: v.class(), depth: v.depth(), tag: v.tag() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryDoc {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: MoveDoc,
    pub position: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateDoc {
    pub id: String,
    pub k: u8,
    pub s: u8,
    pub position: String,
    pub to_move: Player,
    pub phase: Phase,
    pub human: Player,
    pub status: Status,
    /// Value for the side to move.
    pub value: ValueDoc,
    pub history: Vec<HistoryDoc>,
    /// The engine's most recent reply, if any.
    pub engine_move: Option<MoveDoc>,
    /// Rows of the square board, top to bottom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MoveOption {
    #[serde(rename = "move")]
    pub mv: MoveDoc,
    /// Value of the move for the player making it.
    pub value: ValueDoc,
    pub after: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MovesDoc {
    pub id: String,
    pub position: String,
    pub to_move: Player,
    pub moves: Vec<MoveOption>,
}

fn default_k() -> u8 {
    3
}

fn default_s() -> u8 {
    4
}

fn default_human() -> Player {
    Player::X
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    #[serde(default = "default_k")]
    pub k: u8,
    #[serde(default = "default_s")]
    pub s: u8,
    #[serde(default = "default_human")]
    pub human: Player,
    /// Optional start position in wire notation; defaults to the empty board.
    #[serde(default)]
    pub position: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PlayMove {
    #[serde(rename = "move")]
    pub mv: MoveDoc,
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub cache_dir: Option<PathBuf>,
    pub idle_timeout: Duration,
    pub log_path: Option<PathBuf>,
    pub max_boards: u128,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            cache_dir: None,
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            log_path: None,
            max_boards: DEFAULT_MAX_BOARDS,
        }
    }
}

pub struct Engine {
    pub spec: BoardSpec,
    pub table: SolveTable,
}

struct Session {
    id: Uuid,
    engine: Arc<Engine>,
    start: Position,
    position: Position,
    history: Vec<(Player, Move, Position)>,
    seen: FxHashMap<u64, u32>,
    human: Player,
    status: Status,
    engine_move: Option<Move>,
    touched: Instant,
}

impl Session {
    fn new(id: Uuid, engine: Arc<Engine>, start: Position, human: Player) -> Self {
        let mut s = Session {
            id,
            engine,
            start,
            position: start,
            history: Vec::new(),
            seen: FxHashMap::default(),
            human,
            status: Status::Ongoing,
            engine_move: None,
            touched: Instant::now(),
        };
        s.restart();
        s
    }

    fn restart(&mut self) {
        self.position = self.start;
        self.history.clear();
        self.seen.clear();
        self.engine_move = None;
        let reps = self.record();
        self.status = self.judge(reps);
        self.engine_reply();
    }

    fn record(&mut self) -> u32 {
        let key = self.engine.spec.canonical(&self.position).pack();
        let n = self.seen.entry(key).or_insert(0);
        *n += 1;
        *n
    }

    fn judge(&self, reps: u32) -> Status {
        let spec = &self.engine.spec;
        if let Ok(Some(w)) = self.position.winner(spec) {
            return Status::won_by(w);
        }
        if self.position.legal_moves(spec).map_or(true, |m| m.is_empty()) {
            return Status::won_by(self.position.to_move().opponent());
        }
        if reps >= 3 {
            return Status::DrawnByRepetition;
        }
        Status::Ongoing
    }

    fn advance(&mut self, mv: Move) {
        let mover = self.position.to_move();
        self.position = self.position.apply_unchecked(mv);
        self.history.push((mover, mv, self.position));
        let reps = self.record();
        self.status = self.judge(reps);
    }

    fn engine_reply(&mut self) {
        if self.status != Status::Ongoing || self.position.to_move() == self.human {
            return;
        }
        let Engine { spec, table } = &*self.engine;
        let best = best_moves(spec, table, &self.position)
            .expect("every reachable position is in the table")
            .first()
            .map(|r| r.mv);
        if let Some(mv) = best {
            self.advance(mv);
            self.engine_move = Some(mv);
        }
    }

    fn doc(&self) -> StateDoc {
        let Engine { spec, table } = &*self.engine;
        let value = table
            .value(spec, &self.position)
            .expect("every reachable position is in the table");
        let grid = spec.grid_mapping().ok().map(|g| {
            let mut rows = vec![vec!['.'; 3]; 3];
            for (n, &(r, c)) in g.iter().enumerate() {
                rows[r as usize][c as usize] = self.position.cell(n as Node).symbol();
            }
            rows.into_iter().map(String::from_iter).collect()
        });
        StateDoc {
            id: self.id.to_string(),
            k: spec.k(),
            s: spec.s(),
            position: spec.format_position(&self.position),
            to_move: self.position.to_move(),
            phase: self.position.phase(spec),
            human: self.human,
            status: self.status,
            value: value.into(),
            history: self
                .history
                .iter()
                .map(|&(player, mv, after)| HistoryDoc {
                    player,
                    mv: MoveDoc::new(spec, mv),
                    position: spec.format_position(&after),
                })
                .collect(),
            engine_move: self.engine_move.map(|m| MoveDoc::new(spec, m)),
            grid,
        }
    }
}

type SessionMap = FxHashMap<Uuid, Arc<Mutex<Session>>>;
type EngineMap = FxHashMap<(u8, u8), Arc<OnceCell<Arc<Engine>>>>;

/// Shared state behind the router: solved tables and live sessions.
pub struct GameService {
    config: ServiceConfig,
    engines: Mutex<EngineMap>,
    sessions: RwLock<SessionMap>,
    log: Option<Mutex<File>>,
}

impl GameService {
    pub fn new(config: ServiceConfig) -> io::Result<Self> {
        let log = match &config.log_path {
            Some(path) => Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?)),
            None => None,
        };
        Ok(GameService {
            config,
            engines: Mutex::new(FxHashMap::default()),
            sessions: RwLock::new(FxHashMap::default()),
            log,
        })
    }

    /// Installs an already solved table, bypassing the size limit.
    pub fn preload(&self, spec: BoardSpec, table: SolveTable) {
        let cell = self.engine_cell(spec.k(), spec.s());
        let _ = cell.set(Arc::new(Engine { spec, table }));
    }

    fn engine_cell(&self, k: u8, s: u8) -> Arc<OnceCell<Arc<Engine>>> {
        self.engines.lock().unwrap().entry((k, s)).or_default().clone()
    }

    async fn engine(&self, k: u8, s: u8) -> Result<Arc<Engine>, ApiError> {
        let spec = BoardSpec::new(k, s).map_err(|e| ApiError::BadRequest(e.to_string()))?;
        let cell = self.engine_cell(k, s);
        if let Some(e) = cell.get() {
            return Ok(e.clone());
        }
        let boards = multinomial(spec.node_count() as u32, k as u32, k as u32);
        if boards > self.config.max_boards {
            return Err(ApiError::BadRequest(format!(
                "board (k={k}, s={s}) has {boards} sliding boards, above the service limit of {}",
                self.config.max_boards
            )));
        }
        let dir = self.config.cache_dir.clone();
        cell.get_or_try_init(|| async move {
            let (spec, table) = tokio::task::spawn_blocking(move || {
                solve_cached(&spec, dir.as_deref()).map(|(t, _)| (spec, t))
            })
            .await
            .map_err(|e| ApiError::Internal(e.to_string()))?
            .map_err(|e| ApiError::Internal(e.to_string()))?;
            Ok(Arc::new(Engine { spec, table }))
        })
        .await
        .cloned()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let not_found = || ApiError::NotFound(id.to_string());
        let uuid = Uuid::parse_str(id).map_err(|_| not_found())?;
        self.sessions.read().unwrap().get(&uuid).cloned().ok_or_else(not_found)
    }

    fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let handle = self.session(id)?;
        let mut session = handle.lock().unwrap();
        session.touched = Instant::now();
        f(&mut session)
    }

    fn log(&self, event: serde_json::Value) {
        if let Some(file) = &self.log {
            let millis = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
            let mut f = file.lock().unwrap();
            let _ = writeln!(f, "{}", json!({ "t": millis as u64, "event": event }));
        }
    }

    pub async fn create_session(&self, req: CreateSession) -> Result<StateDoc, ApiError> {
        let engine = self.engine(req.k, req.s).await?;
        let start = match &req.position {
            None => engine.spec.initial_position(),
            Some(text) => {
                let p = engine
                    .spec
                    .parse_position(text)
                    .map_err(|e| ApiError::BadRequest(e.to_string()))?;
                engine
                    .table
                    .value(&engine.spec, &p)
                    .map_err(|e| ApiError::BadRequest(e.to_string()))?;
                p
            }
        };
        let id = Uuid::new_v4();
        let session = Session::new(id, engine, start, req.human);
        let doc = session.doc();
        self.sessions.write().unwrap().insert(id, Arc::new(Mutex::new(session)));
        self.log(json!({ "kind": "create", "session": doc.id, "k": doc.k, "s": doc.s,
            "human": doc.human, "start": req.position, "position": doc.position }));
        Ok(doc)
    }

    pub fn state(&self, id: &str) -> Result<StateDoc, ApiError> {
        self.with_session(id, |s| Ok(s.doc()))
    }

    pub fn list_moves(&self, id: &str) -> Result<MovesDoc, ApiError> {
        self.with_session(id, |s| {
            let Engine { spec, table } = &*s.engine;
            let moves = if s.status == Status::Ongoing {
                best_moves(spec, table, &s.position)
                    .map_err(|e| ApiError::Internal(e.to_string()))?
                    .into_iter()
                    .map(|r| MoveOption {
                        mv: MoveDoc::new(spec, r.mv),
                        value: r.for_mover().into(),
                        after: spec.format_position(&s.position.apply_unchecked(r.mv)),
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Ok(MovesDoc {
                id: s.id.to_string(),
                position: spec.format_position(&s.position),
                to_move: s.position.to_move(),
                moves,
            })
        })
    }

    pub fn play_move(&self, id: &str, mv: &MoveDoc) -> Result<StateDoc, ApiError> {
        let mv = mv.to_move()?;
        let doc = self.with_session(id, |s| {
            if s.status != Status::Ongoing {
                return Err(ApiError::Conflict("the game is over".into()));
            }
            if s.position.to_move() != s.human {
                return Err(ApiError::Conflict("it is not the human's turn".into()));
            }
            s.position
                .apply_move(&s.engine.spec, mv)
                .map_err(|e| ApiError::IllegalMove(e.to_string()))?;
            s.engine_move = None;
            s.advance(mv);
            s.engine_reply();
            Ok(s.doc())
        })?;
        self.log(json!({ "kind": "move", "session": id, "move": mv.to_string(),
            "engine_move": doc.engine_move, "position": doc.position, "status": doc.status }));
        Ok(doc)
    }

    pub fn reset(&self, id: &str) -> Result<StateDoc, ApiError> {
        let doc = self.with_session(id, |s| {
            s.restart();
            Ok(s.doc())
        })?;
        self.log(json!({ "kind": "reset", "session": id, "position": doc.position }));
        Ok(doc)
    }

    /// Drops sessions idle for longer than the configured timeout and
    /// returns how many were removed.
    pub fn expire_idle(&self) -> usize {
        let limit = self.config.idle_timeout;
        let mut map = self.sessions.write().unwrap();
        let before = map.len();
        map.retain(|_, s| s.lock().is_ok_and(|s| s.touched.elapsed() <= limit));
        before - map.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }
}

type Shared = State<Arc<GameService>>;

async fn health(State(svc): Shared) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "sessions": svc.session_count() }))
}

async fn create(State(svc): Shared, Json(req): Json<CreateSession>) -> Result<Json<StateDoc>, ApiError> {
    svc.create_session(req).await.map(Json)
}

async fn get_state(State(svc): Shared, Path(id): Path<String>) -> Result<Json<StateDoc>, ApiError> {
    svc.state(&id).map(Json)
}

async fn get_moves(State(svc): Shared, Path(id): Path<String>) -> Result<Json<MovesDoc>, ApiError> {
    svc.list_moves(&id).map(Json)
}

async fn post_move(
    State(svc): Shared,
    Path(id): Path<String>,
    Json(req): Json<PlayMove>,
) -> Result<Json<StateDoc>, ApiError> {
    svc.play_move(&id, &req.mv).map(Json)
}

async fn post_reset(State(svc): Shared, Path(id): Path<String>) -> Result<Json<StateDoc>, ApiError> {
    svc.reset(&id).map(Json)
}

pub fn router(service: Arc<GameService>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(get_state))
        .route("/sessions/{id}/moves", get(get_moves).post(post_move))
        .route("/sessions/{id}/reset", post(post_reset))
        .with_state(service)
}

/// Serves the API on `listener` until `shutdown` resolves, expiring idle
/// sessions once a minute.
pub async fn serve(
    listener: tokio::net::TcpListener,
    service: Arc<GameService>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    let sweeper = {
        let service = service.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(Duration::from_secs(60));
            loop {
                tick.tick().await;
                service.expire_idle();
            }
        })
    };
    let result = axum::serve(listener, router(service)).with_graceful_shutdown(shutdown).await;
    sweeper.abort();
    result
}
