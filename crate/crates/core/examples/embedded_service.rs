//! Start the HTTP API on an ephemeral port inside this process and walk a
//! short session against it with plain HTTP/1.1 requests.
//!
//!     cargo run --example embedded_service

use std::io::{Read, Write};
use std::net::TcpStream;

use egorank::dataset::GraphSource;
use egorank::explorer::Explorer;
use egorank::histogram::{build_binnings, MdlBinner};
use egorank::ranking::{precompute_surprise, PrecomputeOptions};
use egorank::weights::FeatureWeights;

fn request(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> std::io::Result<String> {
    let mut stream = TcpStream::connect(addr)?;
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )?;
    let mut response = String::new();
    stream.read_to_string(&mut response)?;
    Ok(response.split("\r\n\r\n").nth(1).unwrap_or_default().to_string())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let (g, _) = GraphSource::new(
        format!("{data}/nodes.csv"),
        format!("{data}/edges.csv"),
        format!("{data}/schema.json"),
    )
    .load()?;
    let binnings = build_binnings(&g, &MdlBinner::default())?;
    let index = precompute_surprise(&g, &binnings, &FeatureWeights::uniform(3), PrecomputeOptions::default())?;
    let explorer = Explorer::new(g, index)?;

    let runtime = tokio::runtime::Runtime::new()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    runtime.spawn(async move { axum::serve(listener, egorank::service::router(explorer)).await });

    println!("GET /graph/summary\n{}\n", request(addr, "GET", "/graph/summary", "")?);
    println!("GET /search?q=red\n{}\n", request(addr, "GET", "/search?q=red&limit=3", "")?);
    for node in [3, 7, 9] {
        let body = format!(r#"{{"node": {node}}}"#);
        println!("POST visits {node}\n{}\n", request(addr, "POST", "/sessions/demo/visits", &body)?);
    }
    let rank = r#"{"focus": 1, "k": 3, "mode": "combined"}"#;
    println!("POST rank\n{}\n", request(addr, "POST", "/sessions/demo/rank", rank)?);
    let cold = r#"{"focus": 1, "mode": "interest"}"#;
    println!("POST rank on a fresh session\n{}", request(addr, "POST", "/sessions/fresh/rank", cold)?);
    Ok(())
}
