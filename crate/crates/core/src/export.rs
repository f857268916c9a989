//! Frozen CSV schemas and their JSON twins.
//!
//! CSV files are UTF-8 with a header row, comma separators and LF line
//! endings. Floats use Rust's shortest round-trip formatting so output is
//! byte-stable across runs.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analytics::{
    integrate_characteristic_ode, l1_bound, limit_law, mean_vector, mean_w, mgf_w,
    second_moment_w, var_w, GammaLaw,
};
use crate::error::Result;
use crate::model::{ModelParams, UrnState};
use crate::simulate::Trajectory;

/// A record with a fixed CSV layout.
pub trait CsvRecord: Serialize {
    const HEADER: &'static str;
    fn write_fields(&self, out: &mut String);
}

pub fn to_csv<R: CsvRecord>(rows: &[R]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(R::HEADER);
    out.push('\n');
    for row in rows {
        row.write_fields(&mut out);
        out.push('\n');
    }
    out
}

pub fn to_json<R: Serialize>(rows: &[R]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// `trial,epoch_time,color,white,blue`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRow {
    pub trial: u64,
    pub epoch_time: f64,
    pub color: String,
    pub white: u64,
    pub blue: u64,
}

impl CsvRecord for EpochRow {
    const HEADER: &'static str = "trial,epoch_time,color,white,blue";
    fn write_fields(&self, out: &mut String) {
        let _ = write!(out, "{},{},{},{},{}", self.trial, self.epoch_time, self.color, self.white, self.blue);
    }
}

pub fn trajectory_rows(trial: u64, traj: &Trajectory) -> Vec<EpochRow> {
    traj.events
        .iter()
        .map(|e| EpochRow {
            trial,
            epoch_time: e.epoch_time,
            color: e.color.as_str().to_string(),
            white: e.state_after.white,
            blue: e.state_after.blue,
        })
        .collect()
}

/// `trial,t,white,blue,total`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotRow {
    pub trial: u64,
    pub t: f64,
    pub white: u64,
    pub blue: u64,
    pub total: u64,
}

impl SnapshotRow {
    pub fn new(trial: u64, state: &UrnState) -> Self {
        Self {
            trial,
            t: state.time,
            white: state.white,
            blue: state.blue,
            total: state.total_balls(),
        }
    }
}

impl CsvRecord for SnapshotRow {
    const HEADER: &'static str = "trial,t,white,blue,total";
    fn write_fields(&self, out: &mut String) {
        let _ = write!(out, "{},{},{},{},{}", self.trial, self.t, self.white, self.blue, self.total);
    }
}

/// `t,u,psi_closed_form,psi_ode_oracle,abs_diff`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub t: f64,
    pub u: f64,
    pub psi_closed_form: f64,
    pub psi_ode_oracle: f64,
    pub abs_diff: f64,
}

impl CsvRecord for GridRow {
    const HEADER: &'static str = "t,u,psi_closed_form,psi_ode_oracle,abs_diff";
    fn write_fields(&self, out: &mut String) {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            self.t, self.u, self.psi_closed_form, self.psi_ode_oracle, self.abs_diff
        );
    }
}

/// Closed form and ODE oracle side by side on the `times × us` grid.
pub fn mgf_grid(params: &ModelParams, times: &[f64], us: &[f64], steps: usize) -> Result<Vec<GridRow>> {
    let mut rows = Vec::with_capacity(times.len() * us.len());
    for &t in times {
        for &u in us {
            let closed = mgf_w(params, t, u)?;
            let oracle = integrate_characteristic_ode(params, t, u, steps)?;
            rows.push(GridRow {
                t,
                u,
                psi_closed_form: closed,
                psi_ode_oracle: oracle,
                abs_diff: (closed - oracle).abs(),
            });
        }
    }
    Ok(rows)
}

/// `a,delta,w0,t,mean,variance,second_moment,mean_blue,gamma_shape,gamma_scale,l1_bound`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub a: u64,
    pub delta: u64,
    pub w0: u64,
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub mean_blue: f64,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    /// Empty at `t = 0`, where the bound is undefined.
    pub l1_bound: Option<f64>,
}

impl MomentRow {
    pub fn new(params: &ModelParams, t: f64) -> Self {
        let law = limit_law(params);
        Self {
            a: params.a(),
            delta: params.delta(),
            w0: params.w0(),
            t,
            mean: mean_w(params, t),
            variance: var_w(params, t),
            second_moment: second_moment_w(params, t),
            mean_blue: mean_vector(params, t).1,
            gamma_shape: law.shape,
            gamma_scale: law.scale,
            l1_bound: (t > 0.0).then(|| l1_bound(params, t)),
        }
    }
}

impl CsvRecord for MomentRow {
    const HEADER: &'static str =
        "a,delta,w0,t,mean,variance,second_moment,mean_blue,gamma_shape,gamma_scale,l1_bound";
    fn write_fields(&self, out: &mut String) {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},",
            self.a,
            self.delta,
            self.w0,
            self.t,
            self.mean,
            self.variance,
            self.second_moment,
            self.mean_blue,
            self.gamma_shape,
            self.gamma_scale
        );
        if let Some(b) = self.l1_bound {
            let _ = write!(out, "{b}");
        }
    }
}

/// `x,empirical_cdf,gamma_cdf`: one row per sorted sample, plot-ready.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfRow {
    pub x: f64,
    pub empirical_cdf: f64,
    pub gamma_cdf: f64,
}

impl CsvRecord for CdfRow {
    const HEADER: &'static str = "x,empirical_cdf,gamma_cdf";
    fn write_fields(&self, out: &mut String) {
        let _ = write!(out, "{},{},{}", self.x, self.empirical_cdf, self.gamma_cdf);
    }
}

pub fn cdf_table(values: &[f64], law: &GammaLaw) -> Vec<CdfRow> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| CdfRow {
            x,
            empirical_cdf: (i + 1) as f64 / n,
            gamma_cdf: law.cdf(x),
        })
        .collect()
}
