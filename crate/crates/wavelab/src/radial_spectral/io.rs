use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GridSpec, RadialField, RadialGrid};
use crate::error::{Result, WaveLabError};

/// First line of every CSV file the crate writes.
pub const CSV_SCHEMA_LINE: &str = "# schema-version: 1";

/// JSON envelope `{grid: {n, r_max}, values: [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldEnvelope {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl RadialField {
    /// Writes `r,value` rows after the schema line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_SCHEMA_LINE}")?;
        writeln!(out, "r,value")?;
        for (r, v) in self.grid().nodes().iter().zip(self.values()) {
            writeln!(out, "{r},{v}")?;
        }
        Ok(())
    }

    /// Reads values written by [`RadialField::write_csv`] onto `grid`.
    /// Radii must match the grid nodes to 1e-12 relative.
    pub fn read_csv<R: BufRead>(grid: Arc<RadialGrid>, input: R) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n());
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("r,") {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(r), Some(v)) = (parts.next(), parts.next()) else {
                return Err(WaveLabError::Config(format!("malformed CSV row: {line}")));
            };
            let r: f64 = r.trim().parse().map_err(|_| WaveLabError::Config(format!("bad radius: {r}")))?;
            let v: f64 = v.trim().parse().map_err(|_| WaveLabError::Config(format!("bad value: {v}")))?;
            let k = values.len();
            if k >= grid.n() {
                return Err(WaveLabError::Config("CSV has more rows than grid nodes".into()));
            }
            let node = grid.nodes()[k];
            if (r - node).abs() > 1e-12 * node.max(1.0) {
                return Err(WaveLabError::Config(format!("CSV radius {r} does not match grid node {node}")));
            }
            values.push(v);
        }
        RadialField::new(grid, values)
    }

    pub fn to_envelope(&self) -> FieldEnvelope {
        FieldEnvelope { grid: self.grid().spec(), values: self.values().to_vec() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_envelope())?)
    }

    /// Rebuilds a field (and a fresh grid) from its JSON envelope.
    pub fn from_json(text: &str) -> Result<Self> {
        let env: FieldEnvelope = serde_json::from_str(text)?;
        let grid = env.grid.build()?;
        RadialField::new(grid, env.values)
    }
}
