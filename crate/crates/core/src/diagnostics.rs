use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sl2,
    Series,
}

/// Non-fatal findings reported next to the solver output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A root whose imaginary part exceeded the tolerance; excluded from the states.
    ComplexRoot { method: Method, level: usize, re: f64, im: f64 },
    /// Every root was excluded.
    NoRealRoots { method: Method, level: usize },
    /// The series did not terminate to tolerance at this root; excluded.
    NotTerminating { level: usize, z: f64, tail: f64 },
    /// Newton polishing did not improve the root; the unpolished value was kept.
    PolishStalled { level: usize, z: f64 },
}
