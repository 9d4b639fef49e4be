use std::time::Duration;

use daokpi_core::chain::transport::request_body;
use daokpi_core::chain::{FixtureTransport, Transport, TransportError};
use serde_json::Value;

const TIMEOUT: Duration = Duration::from_secs(60);

/// JSON-RPC over HTTPS.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
}

impl HttpTransport {
    pub fn new(url: &str) -> Self {
        let agent =
            ureq::Agent::config_builder().timeout_global(Some(TIMEOUT)).http_status_as_error(false).build().into();
        HttpTransport { agent, url: url.to_string() }
    }
}

impl Transport for HttpTransport {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError> {
        let body = request_body(method, params).to_string();
        let mut resp = self
            .agent
            .post(&self.url)
            .header("Content-Type", "application/json")
            .send(&body)
            .map_err(|e| TransportError::Unreachable(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| TransportError::Unreachable(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(TransportError::Http { status, body: text });
        }
        Ok(text)
    }
}

/// Picks a transport from an endpoint URL.
pub fn transport_for(rpc_url: &str, base_dir: &std::path::Path) -> Box<dyn Transport> {
    match rpc_url.strip_prefix("fixture:") {
        Some(dir) => Box::new(FixtureTransport::new(base_dir.join(dir))),
        None => Box::new(HttpTransport::new(rpc_url)),
    }
}
