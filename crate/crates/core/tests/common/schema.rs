//! Validator for the JSON Schema keywords used by the published schemas:
//! `type`, `const`, `enum`, `required`, `properties`, `additionalProperties`,
//! `items`, `prefixItems`, `minItems`, `maxItems`, `uniqueItems`, `minimum`,
//! `maximum`, `exclusiveMinimum`, `exclusiveMaximum`, `minLength`, `oneOf`
//! and local `$ref`. Unknown keywords are rejected so the schema cannot
//! silently outgrow the validator.

#![allow(dead_code)]

use serde_json::Value;

const KNOWN: [&str; 23] = [
    "$schema", "$id", "$defs", "title", "description", "type", "const", "enum", "required", "properties",
    "additionalProperties", "items", "prefixItems", "minItems", "maxItems", "uniqueItems", "minimum", "maximum",
    "exclusiveMinimum", "exclusiveMaximum", "minLength", "oneOf", "$ref",
];

pub fn validate(schema: &Value, instance: &Value) -> Result<(), Vec<String>> {
    let mut errors = Vec::new();
    check(schema, schema, instance, "$", &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.as_f64().is_some_and(|x| x.fract() == 0.0),
        _ => false,
    }
}

fn check(root: &Value, s: &Value, v: &Value, at: &str, e: &mut Vec<String>) {
    let Some(s) = s.as_object() else {
        e.push(format!("{at}: schema is not an object"));
        return;
    };
    for k in s.keys() {
        if !KNOWN.contains(&k.as_str()) {
            e.push(format!("{at}: unsupported keyword {k}"));
        }
    }
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let target = r
            .strip_prefix("#/")
            .map(|p| p.split('/').fold(Some(root), |node, key| node.and_then(|n| n.get(key))));
        match target.flatten() {
            Some(t) => check(root, t, v, at, e),
            None => e.push(format!("{at}: unresolved $ref {r}")),
        }
    }
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(t) => type_ok(t, v),
            Value::Array(ts) => ts.iter().filter_map(Value::as_str).any(|t| type_ok(t, v)),
            _ => false,
        };
        if !ok {
            e.push(format!("{at}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            e.push(format!("{at}: expected {c}, got {v}"));
        }
    }
    if let Some(Value::Array(opts)) = s.get("enum") {
        if !opts.contains(v) {
            e.push(format!("{at}: {v} not in enum"));
        }
    }
    if let Some(Value::Array(alts)) = s.get("oneOf") {
        let n = alts.iter().filter(|a| validate_with(root, a, v)).count();
        if n != 1 {
            e.push(format!("{at}: {n} oneOf alternatives match"));
        }
    }
    if let Some(x) = v.as_f64() {
        let bound = |k: &str| s.get(k).and_then(Value::as_f64);
        if bound("minimum").is_some_and(|m| x < m)
            || bound("maximum").is_some_and(|m| x > m)
            || bound("exclusiveMinimum").is_some_and(|m| x <= m)
            || bound("exclusiveMaximum").is_some_and(|m| x >= m)
        {
            e.push(format!("{at}: {x} out of range"));
        }
    }
    if let (Some(st), Some(min)) = (v.as_str(), s.get("minLength").and_then(Value::as_u64)) {
        if (st.chars().count() as u64) < min {
            e.push(format!("{at}: string shorter than {min}"));
        }
    }
    if let Some(items) = v.as_array() {
        let len = items.len() as u64;
        if s.get("minItems").and_then(Value::as_u64).is_some_and(|m| len < m)
            || s.get("maxItems").and_then(Value::as_u64).is_some_and(|m| len > m)
        {
            e.push(format!("{at}: array length {len} out of range"));
        }
        if s.get("uniqueItems") == Some(&Value::Bool(true)) {
            for (i, a) in items.iter().enumerate() {
                if items[i + 1..].contains(a) {
                    e.push(format!("{at}: duplicate item {a}"));
                }
            }
        }
        let prefix = s.get("prefixItems").and_then(Value::as_array).map_or(&[][..], |p| p.as_slice());
        for (i, item) in items.iter().enumerate() {
            let sub = format!("{at}[{i}]");
            if let Some(p) = prefix.get(i) {
                check(root, p, item, &sub, e);
            } else if let Some(it) = s.get("items") {
                check(root, it, item, &sub, e);
            }
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(Value::Array(req)) = s.get("required") {
            for r in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(r) {
                    e.push(format!("{at}: missing required property {r}"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, val) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(ps) => check(root, ps, val, &format!("{at}.{k}"), e),
                None => {
                    if s.get("additionalProperties") == Some(&Value::Bool(false)) {
                        e.push(format!("{at}: unexpected property {k}"));
                    }
                }
            }
        }
    }
}

fn validate_with(root: &Value, s: &Value, v: &Value) -> bool {
    let mut e = Vec::new();
    check(root, s, v, "$", &mut e);
    e.is_empty()
}
