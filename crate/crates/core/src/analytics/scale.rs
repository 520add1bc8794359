use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleBucket {
    /// Fewer than 1e9 parameters.
    Small,
    /// 1e9 to 1e10 parameters, both ends inclusive.
    Medium,
    /// More than 1e10 parameters.
    Large,
    Unknown,
}

impl ScaleBucket {
    pub const ALL: [ScaleBucket; 4] = [
        ScaleBucket::Small,
        ScaleBucket::Medium,
        ScaleBucket::Large,
        ScaleBucket::Unknown,
    ];

    pub fn of(raw: Option<f64>) -> Self {
        match raw {
            None => ScaleBucket::Unknown,
            Some(p) if p < 1e9 => ScaleBucket::Small,
            Some(p) if p <= 1e10 => ScaleBucket::Medium,
            Some(_) => ScaleBucket::Large,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScaleBucket::Small => "small",
            ScaleBucket::Medium => "medium",
            ScaleBucket::Large => "large",
            ScaleBucket::Unknown => "unknown",
        }
    }
}

/// Parameter count named in a model id.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamScale {
    /// Parameters; `None` when the id names no scale.
    pub raw: Option<f64>,
    pub bucket: ScaleBucket,
    /// Number of scale tokens found. More than one means the id was
    /// ambiguous and the last token was used.
    pub tokens: usize,
}

impl ParamScale {
    pub fn is_ambiguous(&self) -> bool {
        self.tokens > 1
    }
}

fn token_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"(?i)(\d+(?:\.\d+)?)([bm])").expect("valid pattern"))
}

/// Reads a parameter scale such as `14B`, `0.5b` or `350M` from a model id.
///
/// A token is a decimal number followed by `B` (billions) or `M`
/// (millions), case-insensitive, with no letter, digit or `.` directly
/// before it and no letter or digit directly after it. The last such token
/// wins. Never fails: ids without a token map to [`ScaleBucket::Unknown`].
pub fn extract_param_scale(model_id: &str) -> ParamScale {
    let bytes = model_id.as_bytes();
    let mut tokens = 0;
    let mut last = None;
    for caps in token_pattern().captures_iter(model_id) {
        let whole = caps.get(0).expect("group 0 always matches");
        let before_ok = whole.start() == 0 || {
            let b = bytes[whole.start() - 1];
            !b.is_ascii_alphanumeric() && b != b'.'
        };
        let after_ok = whole.end() == bytes.len() || !bytes[whole.end()].is_ascii_alphanumeric();
        if !(before_ok && after_ok) {
            continue;
        }
        let exponent = match &caps[2] {
            "b" | "B" => 9,
            _ => 6,
        };
        let value: f64 = format!("{}e{}", &caps[1], exponent)
            .parse()
            .expect("digits parse as f64");
        if value > 0.0 {
            tokens += 1;
            last = Some(value);
        }
    }
    ParamScale {
        raw: last,
        bucket: ScaleBucket::of(last),
        tokens,
    }
}
