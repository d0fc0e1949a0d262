//! Ball files: the generator system plus the witness word of every element in BFS order.
//! Matrices are recomputed on reading, so files stay small and remain exact.

use std::path::Path;

use serde_json::{json, Value};

use super::ball::WordBall;
use super::generators::GeneratorSystem;
use crate::error::{Error, Result};

pub fn write_ball(ball: &WordBall, path: &Path) -> Result<()> {
    let words: Vec<Value> = (0..ball.len()).map(|i| json!(ball.word(i))).collect();
    let doc = json!({
        "radius": ball.radius(),
        "complete": ball.is_complete(),
        "layer_counts": ball.layer_counts(),
        "system": ball.system().to_json(),
        "words": words,
    });
    std::fs::write(path, serde_json::to_string(&doc)? + "\n")?;
    Ok(())
}

pub fn read_ball(path: &Path) -> Result<WordBall> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text)?;
    let bad = |what: &str| Error::Invalid(format!("{}: {what}", path.display()));
    let system = GeneratorSystem::from_json_str(&doc.get("system").ok_or_else(|| bad("missing system"))?.to_string())?;
    let radius = doc.get("radius").and_then(Value::as_u64).ok_or_else(|| bad("missing radius"))? as usize;
    let complete = doc.get("complete").and_then(Value::as_bool).unwrap_or(false);
    let words: Vec<Vec<usize>> = serde_json::from_value(doc.get("words").cloned().ok_or_else(|| bad("missing words"))?)?;
    let ball = WordBall::from_words(&system, radius, complete, &words)?;
    if let Some(counts) = doc.get("layer_counts") {
        let counts: Vec<usize> = serde_json::from_value(counts.clone())?;
        if counts != ball.layer_counts() {
            return Err(bad("layer counts do not match the stored words"));
        }
    }
    Ok(ball)
}
