//! Curve spec files: flat `key = value` text with bracketed integer lists.
//! Multiple pairs per line are allowed; `#` starts a comment. Unknown keys
//! are rejected, and every model invariant is validated at parse time.

use std::fmt;
use std::sync::Arc;

use anabelia_core::counting::CurveHandle;
use anabelia_core::curve::HyperellipticCurve;
use anabelia_core::field::FieldSpec;
use anabelia_core::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecFileError {
    Parse { line: usize, col: usize, message: String },
    Validation(String),
}

impl fmt::Display for SpecFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFileError::Parse { line, col, message } => {
                write!(f, "parse error at line {line}, column {col}: {message}")
            }
            SpecFileError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    Scalar(String),
    List(Vec<i64>),
}

#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub handle: CurveHandle,
    pub p: u64,
    pub d: usize,
    pub model: String,
    pub f_coeffs: Option<Vec<i64>>,
    pub tower_ell: u64,
    pub budget: u64,
    pub group_budget: u64,
    pub seed: u64,
}

impl CurveConfig {
    /// Canonical text form; re-parsing it reproduces the configuration.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p = {}\n", self.p));
        out.push_str(&format!("d = {}\n", self.d));
        out.push_str(&format!("model = {}\n", self.model));
        if let Some(cs) = &self.f_coeffs {
            let list: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("f_coeffs = [{}]\n", list.join(", ")));
        }
        out.push_str(&format!("tower_ell = {}\n", self.tower_ell));
        out.push_str(&format!("budget = {}\n", self.budget));
        out.push_str(&format!("group_budget = {}\n", self.group_budget));
        out.push_str(&format!("seed = {}\n", self.seed));
        out
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, Value, usize, usize)>, SpecFileError> {
    let mut pairs = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let bytes: Vec<char> = line.chars().collect();
        let mut i = 0usize;
        while i < bytes.len() {
            while i < bytes.len() && bytes[i].is_whitespace() {
                i += 1;
            }
            if i >= bytes.len() {
                break;
            }
            let key_start = i;
            while i < bytes.len() && bytes[i] != '=' && !bytes[i].is_whitespace() {
                i += 1;
            }
            let key: String = bytes[key_start..i].iter().collect();
            while i < bytes.len() && bytes[i].is_whitespace() {
                i += 1;
            }
            if i >= bytes.len() || bytes[i] != '=' {
                return Err(SpecFileError::Parse {
                    line: lineno + 1,
                    col: i + 1,
                    message: format!("expected '=' after key '{key}'"),
                });
            }
            i += 1;
            while i < bytes.len() && bytes[i].is_whitespace() {
                i += 1;
            }
            if i >= bytes.len() {
                return Err(SpecFileError::Parse {
                    line: lineno + 1,
                    col: i + 1,
                    message: format!("missing value for key '{key}'"),
                });
            }
            if bytes[i] == '[' {
                let list_start = i;
                while i < bytes.len() && bytes[i] != ']' {
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(SpecFileError::Parse {
                        line: lineno + 1,
                        col: list_start + 1,
                        message: "unterminated list".to_string(),
                    });
                }
                let inner: String = bytes[list_start + 1..i].iter().collect();
                i += 1;
                let mut items = Vec::new();
                for part in inner.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let v: i64 = part.parse().map_err(|_| SpecFileError::Parse {
                        line: lineno + 1,
                        col: list_start + 1,
                        message: format!("bad integer '{part}' in list"),
                    })?;
                    items.push(v);
                }
                pairs.push((key, Value::List(items), lineno + 1, key_start + 1));
            } else {
                let val_start = i;
                while i < bytes.len() && !bytes[i].is_whitespace() {
                    i += 1;
                }
                let val: String = bytes[val_start..i].iter().collect();
                pairs.push((key, Value::Scalar(val), lineno + 1, key_start + 1));
            }
        }
    }
    Ok(pairs)
}

pub fn parse_curve_spec(text: &str) -> Result<CurveConfig, SpecFileError> {
    let pairs = parse_pairs(text)?;
    let mut p: Option<u64> = None;
    let mut d: usize = 1;
    let mut model: Option<String> = None;
    let mut f_coeffs: Option<Vec<i64>> = None;
    let mut tower_ell: u64 = 2;
    let mut budget: u64 = 1_000_000;
    let mut group_budget: u64 = 100_000;
    let mut seed: u64 = 0;

    for (key, value, line, col) in pairs {
        let scalar = |v: &Value| -> Result<String, SpecFileError> {
            match v {
                Value::Scalar(s) => Ok(s.clone()),
                Value::List(_) => Err(SpecFileError::Parse {
                    line,
                    col,
                    message: format!("key '{key}' takes a scalar, not a list"),
                }),
            }
        };
        let int = |v: &Value| -> Result<u64, SpecFileError> {
            scalar(v)?.parse().map_err(|_| SpecFileError::Parse {
                line,
                col,
                message: format!("key '{key}' needs a nonnegative integer"),
            })
        };
        match key.as_str() {
            "p" => p = Some(int(&value)?),
            "d" => d = int(&value)? as usize,
            "model" => model = Some(scalar(&value)?),
            "f_coeffs" => match value {
                Value::List(items) => f_coeffs = Some(items),
                Value::Scalar(_) => {
                    return Err(SpecFileError::Parse {
                        line,
                        col,
                        message: "f_coeffs must be a bracketed integer list".to_string(),
                    })
                }
            },
            "tower_ell" => tower_ell = int(&value)?,
            "budget" => budget = int(&value)?,
            "group_budget" => group_budget = int(&value)?,
            "seed" => seed = int(&value)?,
            other => {
                return Err(SpecFileError::Parse {
                    line,
                    col,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }

    let p = p.ok_or_else(|| SpecFileError::Validation("missing key 'p'".to_string()))?;
    let model = model.ok_or_else(|| SpecFileError::Validation("missing key 'model'".to_string()))?;
    if d == 0 {
        return Err(SpecFileError::Validation("d must be >= 1".to_string()));
    }
    let spec: Arc<FieldSpec> = FieldSpec::extension(p, d)
        .map_err(|e| SpecFileError::Validation(format!("base field: {e}")))?;

    let handle = match model.as_str() {
        "rational" => {
            if f_coeffs.is_some() {
                return Err(SpecFileError::Validation(
                    "f_coeffs is only valid for the hyperelliptic model".to_string(),
                ));
            }
            CurveHandle::Rational(spec)
        }
        "hyperelliptic" => {
            let coeffs = f_coeffs.clone().ok_or_else(|| {
                SpecFileError::Validation("hyperelliptic model needs f_coeffs".to_string())
            })?;
            let f = Polynomial::from_ints(&spec, &coeffs);
            let curve = HyperellipticCurve::new(f)
                .map_err(|e| SpecFileError::Validation(format!("{e}")))?;
            CurveHandle::Hyperelliptic(curve)
        }
        other => {
            return Err(SpecFileError::Validation(format!(
                "model must be 'rational' or 'hyperelliptic', got '{other}'"
            )))
        }
    };
    Ok(CurveConfig {
        handle,
        p,
        d,
        model,
        f_coeffs,
        tower_ell,
        budget,
        group_budget,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_running_example() {
        let cfg = parse_curve_spec("p=3 d=1 model=hyperelliptic f_coeffs=[0,1,0,1]").unwrap();
        assert_eq!(cfg.p, 3);
        assert!(matches!(cfg.handle, CurveHandle::Hyperelliptic(_)));
        // round trip through the canonical text
        let again = parse_curve_spec(&cfg.canonical_text()).unwrap();
        assert_eq!(again.canonical_text(), cfg.canonical_text());
    }

    #[test]
    fn rejects_bad_models() {
        let e = parse_curve_spec("p=2 model=hyperelliptic f_coeffs=[0,1,0,1]").unwrap_err();
        assert!(matches!(e, SpecFileError::Validation(_)));
        let e = parse_curve_spec("p=4 model=rational").unwrap_err();
        assert!(matches!(e, SpecFileError::Validation(_)));
        let e = parse_curve_spec("p=3 model=rational mystery=1").unwrap_err();
        assert!(matches!(e, SpecFileError::Parse { .. }));
    }

    #[test]
    fn reports_line_and_column() {
        let e = parse_curve_spec("p = 3\nmodel rational\n").unwrap_err();
        match e {
            SpecFileError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other}"),
        }
    }
}
