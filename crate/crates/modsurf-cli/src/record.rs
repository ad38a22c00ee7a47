//! Run records and the append-only results ledger.
//!
//! Every command produces a deterministic payload (reproducible from the
//! command, config, and seed) plus wall-clock metadata kept in separate
//! fields so reruns stay byte-comparable.

use serde::Serialize;
use serde_json::Value;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

/// One completed run: the reproducible part first, timing metadata last.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub config: Value,
    pub input_hash: String,
    pub payload: Value,
    pub wall_ms: f64,
    pub unix_time_s: u64,
}

impl RunRecord {
    pub fn new(command: &str, config: Value, payload: Value, wall_ms: f64) -> Self {
        let input_hash = content_hash(command, &config);
        let unix_time_s =
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        RunRecord { command: command.to_string(), config, input_hash, payload, wall_ms, unix_time_s }
    }

    /// The deterministic part: everything except timing metadata.
    pub fn deterministic_json(&self) -> Value {
        serde_json::json!({
            "command": self.command,
            "config": self.config,
            "input_hash": self.input_hash,
            "payload": self.payload,
        })
    }

    /// Appends the full record as one JSONL line.
    pub fn append_to_ledger(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let line = serde_json::to_string(self).expect("record serializes");
        let path = dir.join("ledger.jsonl");
        use std::io::Write;
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(file, "{line}")
    }
}

/// Git-style content hash of a run's inputs: SHA-1 over the command name and
/// the canonical config serialization.
pub fn content_hash(command: &str, config: &Value) -> String {
    let mut bytes = command.as_bytes().to_vec();
    bytes.push(0);
    bytes.extend_from_slice(serde_json::to_string(config).expect("config serializes").as_bytes());
    hex(&sha1(&bytes))
}

fn hex(digest: &[u8; 20]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Plain SHA-1 (FIPS 180-1), sufficient for content addressing.
pub fn sha1(message: &[u8]) -> [u8; 20] {
    let mut h: [u32; 5] = [0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0];
    let ml = (message.len() as u64) * 8;
    let mut data = message.to_vec();
    data.push(0x80);
    while data.len() % 64 != 56 {
        data.push(0);
    }
    data.extend_from_slice(&ml.to_be_bytes());

    let mut w = [0u32; 80];
    for chunk in data.chunks_exact(64) {
        for (i, word) in chunk.chunks_exact(4).enumerate() {
            w[i] = u32::from_be_bytes([word[0], word[1], word[2], word[3]]);
        }
        for i in 16..80 {
            w[i] = (w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16]).rotate_left(1);
        }
        let (mut a, mut b, mut c, mut d, mut e) = (h[0], h[1], h[2], h[3], h[4]);
        for (i, &wi) in w.iter().enumerate() {
            let (f, k) = match i {
                0..=19 => ((b & c) | ((!b) & d), 0x5A827999),
                20..=39 => (b ^ c ^ d, 0x6ED9EBA1),
                40..=59 => ((b & c) | (b & d) | (c & d), 0x8F1BBCDC),
                _ => (b ^ c ^ d, 0xCA62C1D6),
            };
            let temp = a
                .rotate_left(5)
                .wrapping_add(f)
                .wrapping_add(e)
                .wrapping_add(k)
                .wrapping_add(wi);
            e = d;
            d = c;
            c = b.rotate_left(30);
            b = a;
            a = temp;
        }
        h[0] = h[0].wrapping_add(a);
        h[1] = h[1].wrapping_add(b);
        h[2] = h[2].wrapping_add(c);
        h[3] = h[3].wrapping_add(d);
        h[4] = h[4].wrapping_add(e);
    }
    let mut out = [0u8; 20];
    for (i, word) in h.iter().enumerate() {
        out[i * 4..i * 4 + 4].copy_from_slice(&word.to_be_bytes());
    }
    out
}
