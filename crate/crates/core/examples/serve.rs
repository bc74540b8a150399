//! Runs the HTTP game service on 127.0.0.1:8080 until Ctrl-C.
//!
//! cargo run --example serve
//! curl -X POST localhost:8080/sessions -H 'content-type: application/json' \
//!      -d '{"k":3,"s":4,"human":"x"}'

use std::sync::Arc;

use picaria::api::{serve, GameService, ServiceConfig};
use picaria::solver::solve;
use picaria::BoardSpec;

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let service = GameService::new(ServiceConfig::default())?;
    let board = BoardSpec::new(3, 4).unwrap();
    service.preload(board.clone(), solve(&board));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:8080").await?;
    println!("listening on http://{}", listener.local_addr()?);
    serve(listener, Arc::new(service), async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
