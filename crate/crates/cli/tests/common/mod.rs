//! Shared helpers for the CLI test suites: binary invocation and a small
//! JSON-schema checker covering the subset used by the shipped schemas
//! (type, enum, required, properties, items, $ref into $defs).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn medimux() -> Command {
    Command::new(env!("CARGO_BIN_EXE_medimux"))
}

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn run_ok(cmd: &mut Command) -> Output {
    let output = cmd.output().expect("failed to spawn medimux");
    assert!(
        output.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

pub fn load_schema(name: &str) -> Value {
    let path = repo_root().join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}")))
        .expect("schema files are valid JSON")
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let path = reference
        .strip_prefix("#/")
        .unwrap_or_else(|| panic!("unsupported $ref {reference:?}"));
    let mut node = root;
    for part in path.split('/') {
        node = node.get(part).unwrap_or_else(|| panic!("dangling $ref {reference:?}"));
    }
    node
}

fn type_matches(name: &str, instance: &Value) -> bool {
    match name {
        "object" => instance.is_object(),
        "array" => instance.is_array(),
        "string" => instance.is_string(),
        "number" => instance.is_number(),
        "integer" => instance.is_i64() || instance.is_u64(),
        "boolean" => instance.is_boolean(),
        "null" => instance.is_null(),
        other => panic!("unsupported schema type {other:?}"),
    }
}

fn check(instance: &Value, schema: &Value, root: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(Value::String(reference)) = schema.get("$ref") {
        check(instance, resolve(root, reference), root, at, errors);
        return;
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(instance) {
            errors.push(format!("{at}: {instance} not in enum"));
        }
        return;
    }
    if let Some(ty) = schema.get("type") {
        let names: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
            _ => panic!("bad type clause"),
        };
        if !names.iter().any(|n| type_matches(n, instance)) {
            errors.push(format!("{at}: expected {names:?}, got {instance}"));
            return;
        }
        if instance.is_null() {
            return;
        }
    }
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        if let Some(object) = instance.as_object() {
            for key in required.iter().filter_map(Value::as_str) {
                if !object.contains_key(key) {
                    errors.push(format!("{at}: missing required field {key:?}"));
                }
            }
        }
    }
    if let (Some(properties), Some(object)) =
        (schema.get("properties").and_then(Value::as_object), instance.as_object())
    {
        for (key, subschema) in properties {
            if let Some(value) = object.get(key) {
                check(value, subschema, root, &format!("{at}.{key}"), errors);
            }
        }
    }
    if let (Some(items), Some(array)) = (schema.get("items"), instance.as_array()) {
        for (i, value) in array.iter().enumerate() {
            check(value, items, root, &format!("{at}[{i}]"), errors);
        }
    }
}

pub fn assert_valid(instance: &Value, schema_name: &str) {
    let schema = load_schema(schema_name);
    let mut errors = Vec::new();
    check(instance, &schema, &schema, "$", &mut errors);
    assert!(errors.is_empty(), "schema {schema_name} violations:\n{}", errors.join("\n"));
}
