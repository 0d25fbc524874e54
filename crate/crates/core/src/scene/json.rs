//! Canonical scene JSON: sorted object keys, shortest round-trip numbers,
//! compact layout, one trailing LF.

use serde_json::Value;
use thiserror::Error;

use super::{SceneDocument, SCENE_VERSION};

#[derive(Debug, Error)]
pub enum SceneParseError {
    #[error("malformed scene JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported scene version `{0}`")]
    UnsupportedVersion(String),
}

pub fn export_scene_json(scene: &SceneDocument) -> Vec<u8> {
    let value = serde_json::to_value(scene).expect("scene documents serialize to JSON");
    let mut out = String::with_capacity(1 << 16);
    write_canonical(&value, &mut out);
    out.push('\n');
    out.into_bytes()
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

pub fn parse_scene_json(bytes: &[u8]) -> Result<SceneDocument, SceneParseError> {
    let scene: SceneDocument = serde_json::from_slice(bytes)?;
    if scene.meta.version != SCENE_VERSION {
        return Err(SceneParseError::UnsupportedVersion(scene.meta.version));
    }
    Ok(scene)
}
