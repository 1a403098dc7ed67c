//! Serve the bundled knowledge over HTTP on 127.0.0.1:8080 (or the port given
//! as the first argument) until ctrl-c.
//!
//! curl -s localhost:8080/api/health

use std::net::SocketAddr;
use std::sync::Arc;

use oncodss::service::{http, Knowledge};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let port: u16 = std::env::args().nth(1).map(|p| p.parse()).transpose()?.unwrap_or(8080);
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    println!("listening on http://{addr}");
    http::serve(Arc::new(Knowledge::bundled()?), addr, None).await?;
    Ok(())
}
