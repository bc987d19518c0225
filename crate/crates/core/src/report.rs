//! Solver reports and point files, both JSON. Floats are written with 17
//! significant digits; non-finite values become `null`.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::deflate::{DeflationOutcome, LoopStatus};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::newton::correct_digits;

/// A float serialized with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn pairs(x: &[C64]) -> Vec<[Sig17; 2]> {
    x.iter().map(|z| [Sig17(z.re), Sig17(z.im)]).collect()
}

/// Coranks joined the way they are usually tabulated, e.g. `2 → 1 → 0`.
pub fn corank_string(coranks: &[usize]) -> String {
    coranks
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" → ")
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StageRow {
    pub rank: usize,
    pub multipliers: usize,
    pub corank_before: usize,
    pub corank_after: usize,
    pub inverse_condition_before: Sig17,
    pub inverse_condition_after: Sig17,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SolverReport {
    pub system: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub neqs: usize,
    pub deflations: usize,
    pub final_nvars: usize,
    pub final_neqs: usize,
    pub corank_sequence: Vec<usize>,
    pub corank: String,
    pub stages: Vec<StageRow>,
    pub inverse_condition_before: Sig17,
    pub inverse_condition_after: Sig17,
    pub residual_before: Sig17,
    pub residual_after: Sig17,
    pub correct_digits_before: Option<Sig17>,
    pub correct_digits_after: Option<Sig17>,
    pub point: Vec<[Sig17; 2]>,
    pub seed: u64,
    pub status: LoopStatus,
    pub wall_time_seconds: Sig17,
}

impl SolverReport {
    /// Summarizes a finished loop. "Before" values describe the end of the
    /// first refinement, on the original system; "after" values the end of
    /// the last one.
    pub fn new(
        name: &str,
        outcome: &DeflationOutcome,
        seed: u64,
        reference: Option<&[C64]>,
        wall_time_seconds: f64,
    ) -> Result<Self> {
        let base = outcome.system.base();
        let first = outcome.first_refinement();
        let first_rec = first.final_record();
        let (before, after) = match reference {
            Some(r) => (
                Some(Sig17(correct_digits(&first.point, r)?)),
                Some(Sig17(correct_digits(outcome.base_point(), r)?)),
            ),
            None => (None, None),
        };
        let stages = outcome
            .stages
            .iter()
            .map(|s| StageRow {
                rank: s.rank,
                multipliers: s.rank + 1,
                corank_before: s.corank_before,
                corank_after: s.corank_after,
                inverse_condition_before: Sig17(s.inverse_condition_before),
                inverse_condition_after: Sig17(s.inverse_condition_after),
            })
            .collect();
        Ok(Self {
            system: name.to_string(),
            n: base.nvars(),
            neqs: base.neqs(),
            deflations: outcome.deflations(),
            final_nvars: outcome.system.nvars(),
            final_neqs: outcome.system.neqs(),
            corank_sequence: outcome.coranks.clone(),
            corank: corank_string(&outcome.coranks),
            stages,
            inverse_condition_before: Sig17(first_rec.inverse_condition),
            inverse_condition_after: Sig17(outcome.final_inverse_condition()),
            residual_before: Sig17(first_rec.residual),
            residual_after: Sig17(outcome.final_residual()),
            correct_digits_before: before,
            correct_digits_after: after,
            point: pairs(outcome.base_point()),
            seed,
            status: outcome.status,
            wall_time_seconds: Sig17(wall_time_seconds),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `[[re, im], ...]` with 17 significant digits.
pub fn format_point(x: &[C64]) -> String {
    serde_json::to_string(&pairs(x)).expect("point serializes")
}

/// JSON array of `[re, im]` pairs; a bare number stands for a real entry.
pub fn parse_point(text: &str) -> Result<Vec<C64>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::PointFormat(e.to_string()))?;
    point_from_value(&value)
}

/// JSON array of points, each an array of `[re, im]` pairs.
pub fn parse_points(text: &str) -> Result<Vec<Vec<C64>>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::PointFormat(e.to_string()))?;
    let items = value
        .as_array()
        .ok_or_else(|| Error::PointFormat("expected an array of points".into()))?;
    items.iter().map(point_from_value).collect()
}

fn point_from_value(value: &serde_json::Value) -> Result<Vec<C64>> {
    let bad = |what: &str| Error::PointFormat(what.to_string());
    let entries = value.as_array().ok_or_else(|| bad("expected an array of [re, im] pairs"))?;
    if entries.is_empty() {
        return Err(bad("point has no coordinates"));
    }
    entries
        .iter()
        .map(|e| {
            if let Some(re) = e.as_f64() {
                return Ok(C64::new(re, 0.0));
            }
            match e.as_array().map(Vec::as_slice) {
                Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                    (Some(re), Some(im)) => Ok(C64::new(re, im)),
                    _ => Err(bad("coordinates must be numbers")),
                },
                _ => Err(bad("each coordinate must be a [re, im] pair")),
            }
        })
        .collect()
}
