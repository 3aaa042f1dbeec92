use serde::Serialize;

/// Outcome of a law check. Failures carry the first witness in sample order.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "witness")]
pub enum Verdict<W> {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail(W),
}

impl<W> Verdict<W> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }

    pub fn from_failure(w: Option<W>) -> Self {
        w.map_or(Verdict::Pass, Verdict::Fail)
    }
}
