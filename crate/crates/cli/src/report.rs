//! Artifact emission: CSV and JSON with 17 significant digits, the embedded
//! config and a SHA-256 content hash.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// `x` with 17 significant digits, `nan`/`inf`/`-inf` otherwise.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with every float printed by [`fmt17`]. Non-finite floats
/// become `null` on the way into a `Value`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Digits17);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("json is utf-8")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Csv { header: Vec<&'static str>, rows: Vec<Vec<f64>> },
    Json(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub text: String,
    pub hash: String,
}

/// CSV: `# config:` and `# sha256:` comment lines, then the header and rows.
/// JSON: `{"config", "result", "sha256"}`. The hash covers the config and the
/// data, so re-running the embedded config reproduces it.
pub fn render(config: &Value, body: &Body) -> Artifact {
    let config_json = to_json(config);
    match body {
        Body::Csv { header, rows } => {
            let mut data = header.join(",");
            data.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|x| fmt17(*x)).collect();
                data.push_str(&cells.join(","));
                data.push('\n');
            }
            let hash = sha256_hex(format!("{config_json}\n{data}").as_bytes());
            let text = format!("# config: {config_json}\n# sha256: {hash}\n{data}");
            Artifact { text, hash }
        }
        Body::Json(result) => {
            let mut doc = serde_json::Map::new();
            doc.insert("config".into(), config.clone());
            doc.insert("result".into(), result.clone());
            let hash = sha256_hex(to_json(&doc).as_bytes());
            doc.insert("sha256".into(), Value::String(hash.clone()));
            let mut text = to_json(&doc);
            text.push('\n');
            Artifact { text, hash }
        }
    }
}

/// The embedded config and hash of an emitted artifact.
pub fn parse_artifact(text: &str) -> Option<(Value, String)> {
    if let Some(rest) = text.strip_prefix("# config: ") {
        let mut lines = rest.lines();
        let config = serde_json::from_str(lines.next()?).ok()?;
        let hash = lines.next()?.strip_prefix("# sha256: ")?.to_string();
        return Some((config, hash));
    }
    let doc: Value = serde_json::from_str(text).ok()?;
    Some((doc.get("config")?.clone(), doc.get("sha256")?.as_str()?.to_string()))
}
