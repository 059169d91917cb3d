//! Structural privacy scan over serialized artifacts.

/// Walks a JSON value looking for anything shaped like template data: a
/// template-ish key or a `[x, y, angle, kind]` minutia tuple. Returns the
/// first hit.
pub fn find_biometric(v: &serde_json::Value) -> Option<String> {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                if ["minutiae", "template", "angle"].contains(&k.as_str()) {
                    return Some(k.clone());
                }
                if let Some(hit) = find_biometric(val) {
                    return Some(hit);
                }
            }
            None
        }
        Value::Array(items) => {
            let minutia_like = items.len() == 4
                && items[..3].iter().all(Value::is_number)
                && matches!(&items[3], Value::String(s) if s == "RidgeEnding" || s == "Bifurcation");
            if minutia_like {
                return Some(v.to_string());
            }
            items.iter().find_map(find_biometric)
        }
        _ => None,
    }
}
