//! Measurement plans and their text format.
//!
//! ```text
//! n = 6
//! site0 = x        # boundary measurement axis (default x)
//! readout = y      # observable measured on site N+1 (default x)
//! site.3 = z 0.7 adaptive
//! site.5 = x 0.2 fixed
//! ```
//! Unlisted bulk sites use the unrotated basis.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kv;
use crate::qcore::spin::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SitePlan {
    pub axis: Axis,
    pub angle: f64,
    pub adaptive: bool,
}

impl SitePlan {
    pub const UNROTATED: SitePlan = SitePlan { axis: Axis::Z, angle: 0.0, adaptive: true };

    pub fn is_identity(&self) -> bool {
        self.angle == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub site0_axis: Axis,
    pub readout: Axis,
    /// Entry `j - 1` is bulk site `j`.
    pub sites: Vec<SitePlan>,
}

impl MeasurementPlan {
    pub fn unrotated(n_bulk: usize) -> Self {
        MeasurementPlan { site0_axis: Axis::X, readout: Axis::X, sites: vec![SitePlan::UNROTATED; n_bulk] }
    }

    /// One adaptive rotation about `axis` by `phi` at bulk site `k`.
    pub fn single_rotation(n_bulk: usize, k: usize, axis: Axis, phi: f64) -> Result<Self> {
        let mut plan = MeasurementPlan::unrotated(n_bulk);
        plan.set_site(k, SitePlan { axis, angle: phi, adaptive: true })?;
        Ok(plan)
    }

    pub fn with_readout(mut self, readout: Axis) -> Self {
        self.readout = readout;
        self
    }

    pub fn n_bulk(&self) -> usize {
        self.sites.len()
    }

    pub fn site(&self, j: usize) -> SitePlan {
        self.sites[j - 1]
    }

    pub fn set_site(&mut self, j: usize, site: SitePlan) -> Result<()> {
        if j == 0 || j > self.sites.len() {
            return Err(Error::InvalidParameter(format!("bulk site {j} outside 1..={}", self.sites.len())));
        }
        self.sites[j - 1] = site;
        Ok(())
    }

    /// Sites carrying a nonzero rotation.
    pub fn rotation_sites(&self) -> Vec<usize> {
        (1..=self.sites.len()).filter(|&j| !self.site(j).is_identity()).collect()
    }

    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let entries = kv::parse(source, text)?;
        let n_entry = entries
            .iter()
            .find(|e| e.key == "n")
            .ok_or_else(|| Error::parse(source, 0, "missing 'n' (bulk length)"))?;
        let n: usize = kv::parse_value(source, n_entry)?;
        let mut plan = MeasurementPlan::unrotated(n);
        for e in &entries {
            match e.key.as_str() {
                "n" => {}
                "site0" => plan.site0_axis = kv::parse_value(source, e)?,
                "readout" => plan.readout = kv::parse_value(source, e)?,
                key if key.starts_with("site.") => {
                    let j: usize = key[5..]
                        .parse()
                        .map_err(|_| Error::parse(source, e.line, format!("bad site index in '{key}'")))?;
                    let site = parse_site(source, e)?;
                    plan.set_site(j, site).map_err(|err| Error::parse(source, e.line, err.to_string()))?;
                }
                other => return Err(Error::parse(source, e.line, format!("unknown key '{other}'"))),
            }
        }
        Ok(plan)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        MeasurementPlan::parse(&path.display().to_string(), &text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n_bulk());
        let _ = writeln!(out, "site0 = {}", self.site0_axis);
        let _ = writeln!(out, "readout = {}", self.readout);
        for j in self.rotation_sites() {
            let s = self.site(j);
            let _ = writeln!(out, "site.{j} = {} {:.17e} {}", s.axis, s.angle, if s.adaptive { "adaptive" } else { "fixed" });
        }
        out
    }
}

fn parse_site(source: &str, e: &kv::Entry) -> Result<SitePlan> {
    let parts: Vec<&str> = e.value.split_whitespace().collect();
    let bad = |msg: &str| Error::parse(source, e.line, format!("{msg} in '{}'", e.value));
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad("expected '<axis> <angle> [adaptive|fixed]'"));
    }
    let axis: Axis = parts[0].parse().map_err(|_| bad("bad axis"))?;
    let angle: f64 = parts[1].parse().map_err(|_| bad("bad angle"))?;
    if !angle.is_finite() {
        return Err(bad("non-finite angle"));
    }
    let adaptive = match parts.get(2).copied() {
        None | Some("adaptive") => true,
        Some("fixed") => false,
        Some(_) => return Err(bad("expected 'adaptive' or 'fixed'")),
    };
    Ok(SitePlan { axis, angle, adaptive })
}
