//! Deterministic JSON reports: insertion-ordered keys, integers serialized
//! as decimal strings so downstream consumers never lose precision.

use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum Json {
    Str(String),
    Bool(bool),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn int<T: itoa::Integer>(v: T) -> Json {
        Json::Str(itoa::to_string(v))
    }

    pub fn str(v: impl Into<String>) -> Json {
        Json::Str(v.into())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    pad(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                pad(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    pad(out, indent + 1);
                    let _ = write!(out, "\"{k}\": ");
                    v.write(out, indent + 1);
                }
                out.push('\n');
                pad(out, indent);
                out.push('}');
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Minimal integer-to-string shim so every integer type funnels through one
/// decimal renderer.
pub mod itoa {
    pub trait Integer {
        fn to_dec(self) -> String;
    }
    macro_rules! impl_int {
        ($($t:ty),*) => {
            $(impl Integer for $t {
                fn to_dec(self) -> String {
                    format!("{self}")
                }
            })*
        };
    }
    impl_int!(u8, u16, u32, u64, u128, usize, i8, i16, i32, i64, i128, isize);

    pub fn to_string<T: Integer>(v: T) -> String {
        v.to_dec()
    }
}

/// Builder for the standard report envelope.
pub struct Report {
    command: String,
    inputs: Vec<(String, Json)>,
    results: Vec<(String, Json)>,
    pass: bool,
    witnesses: Vec<String>,
    timings_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            results: Vec::new(),
            pass: true,
            witnesses: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn input(&mut self, key: &str, value: Json) -> &mut Self {
        self.inputs.push((key.to_string(), value));
        self
    }

    pub fn result(&mut self, key: &str, value: Json) -> &mut Self {
        self.results.push((key.to_string(), value));
        self
    }

    pub fn fail(&mut self, witness: impl Into<String>) -> &mut Self {
        self.pass = false;
        self.witnesses.push(witness.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.pass
    }

    pub fn timing(&mut self, ms: u128) -> &mut Self {
        self.timings_ms = Some(ms);
        self
    }

    pub fn render(&self) -> String {
        let mut fields = vec![
            ("command".to_string(), Json::str(&self.command)),
            ("inputs".to_string(), Json::Obj(self.inputs.clone())),
            ("results".to_string(), Json::Obj(self.results.clone())),
            ("pass".to_string(), Json::Bool(self.pass)),
            (
                "witnesses".to_string(),
                Json::Arr(self.witnesses.iter().map(Json::str).collect()),
            ),
        ];
        if let Some(ms) = self.timings_ms {
            fields.push((
                "timings".to_string(),
                Json::Obj(vec![("total_ms".to_string(), Json::int(ms))]),
            ));
        }
        Json::Obj(fields).render()
    }
}
