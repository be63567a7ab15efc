//! Browser bindings for the region-of-attraction toolkit: build a certified
//! region for a built-in system, section it on a plane, query points, and
//! trace trajectories.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use doa_core::bench::{by_name, Benchmark};
use doa_core::brs::{check_safe_attraction, grid_section, simulate, Certificate, GridSpec};
use doa_core::initroa::{build_initial_roa, default_epsilon};
use doa_core::linalg::Matrix;

/// Available system names, as a JSON array.
#[wasm_bindgen]
pub fn systems() -> String {
    r#"["two_machine","cart_pole"]"#.to_string()
}

#[derive(Serialize)]
struct SystemInfo<'a> {
    name: &'a str,
    dim: usize,
    c: f64,
    axis_names: Vec<&'static str>,
    plot_ranges: Vec<[f64; 2]>,
    default_depth: usize,
}

#[derive(Serialize)]
struct PointVerdict {
    value: Option<f64>,
    member: bool,
    depth: Option<usize>,
}

#[derive(Serialize)]
struct TrajectoryResult {
    states: Vec<Vec<f64>>,
    theta: Vec<f64>,
    safe: bool,
    attracted: bool,
    first_violation: Option<usize>,
}

fn js_err(err: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&err.to_string())
}

/// One benchmark system with its certified initial region, ready for
/// interactive queries.
#[wasm_bindgen]
pub struct RegionExplorer {
    bench: Benchmark,
    cert: Certificate,
    c: f64,
}

#[wasm_bindgen]
impl RegionExplorer {
    #[wasm_bindgen(constructor)]
    pub fn new(system: &str) -> Result<RegionExplorer, JsValue> {
        let bench = by_name(system).map_err(js_err)?;
        let n = bench.system.dim();
        let q = Matrix::identity(n);
        let epsilon = default_epsilon(&q).map_err(js_err)?;
        let report =
            build_initial_roa(bench.system.as_ref(), &bench.region, &q, epsilon).map_err(js_err)?;
        let c = report.c;
        let cert =
            Certificate::from_report(bench.safe_set.clone(), report, bench.system.clone(), 0)
                .map_err(js_err)?;
        Ok(RegionExplorer { bench, cert, c })
    }

    pub fn dim(&self) -> usize {
        self.bench.system.dim()
    }

    /// Static description (dimension, certified level, axis names, plot
    /// ranges) as JSON.
    pub fn info(&self) -> String {
        let (axis_names, plot_ranges, default_depth) = match self.bench.system.name() {
            "cart_pole" => (
                vec!["position", "velocity", "angle", "angular velocity"],
                vec![
                    [-0.1, 0.1],
                    [-0.1, 0.1],
                    [-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4],
                    [-0.1, 0.1],
                ],
                60,
            ),
            _ => (vec!["x1", "x2"], vec![[-1.0, 1.0], [-0.5, 0.5]], 80),
        };
        serde_json::to_string(&SystemInfo {
            name: self.bench.system.name(),
            dim: self.bench.system.dim(),
            c: self.c,
            axis_names,
            plot_ranges,
            default_depth,
        })
        .expect("static data serializes")
    }

    /// Values of the depth-k level function on a planar grid through the
    /// origin, row-major over the first axis. Membership is `value <= 1`.
    #[allow(clippy::too_many_arguments)]
    pub fn section(
        &self,
        depth: usize,
        axis_i: usize,
        axis_j: usize,
        lo_i: f64,
        hi_i: f64,
        lo_j: f64,
        hi_j: f64,
        res_i: usize,
        res_j: usize,
    ) -> Result<Vec<f64>, JsValue> {
        let spec = GridSpec {
            axes: (axis_i, axis_j),
            fixed: vec![0.0; self.dim()],
            ranges: ((lo_i, hi_i), (lo_j, hi_j)),
            resolution: (res_i, res_j),
        };
        let grid = grid_section(&self.cert.with_depth(depth), &spec).map_err(js_err)?;
        Ok(grid.values)
    }

    /// Values of the safe-set function on the same grid layout, for
    /// distinguishing "outside the region" from "outside the safe set".
    #[allow(clippy::too_many_arguments)]
    pub fn section_theta(
        &self,
        axis_i: usize,
        axis_j: usize,
        lo_i: f64,
        hi_i: f64,
        lo_j: f64,
        hi_j: f64,
        res_i: usize,
        res_j: usize,
    ) -> Result<Vec<f64>, JsValue> {
        let spec = GridSpec {
            axes: (axis_i, axis_j),
            fixed: vec![0.0; self.dim()],
            ranges: ((lo_i, hi_i), (lo_j, hi_j)),
            resolution: (res_i, res_j),
        };
        // depth 0 over theta alone: reuse the grid walker with a certificate
        // whose initial function is theta itself
        let theta_cert = Certificate::trusted(
            self.bench.safe_set.clone(),
            self.bench.safe_set.clone(),
            self.bench.system.clone(),
            0,
        )
        .map_err(js_err)?;
        let grid = grid_section(&theta_cert, &spec).map_err(js_err)?;
        Ok(grid.values)
    }

    /// Membership verdict for one point as JSON: level value, membership at
    /// `depth`, and the smallest certifying depth up to `k_max`.
    pub fn check(&self, point: Vec<f64>, depth: usize, k_max: usize) -> Result<String, JsValue> {
        let cert = self.cert.with_depth(depth);
        let value = cert.eval_vk(&point).map_err(js_err)?;
        let verdict = PointVerdict {
            value: value.is_finite().then_some(value),
            member: value <= 1.0,
            depth: cert.certificate_depth(&point, k_max).map_err(js_err)?,
        };
        serde_json::to_string(&verdict).map_err(js_err)
    }

    /// Forward trajectory with the safe-set profile and the
    /// safety/attraction verdict, as JSON.
    pub fn simulate_from(
        &self,
        point: Vec<f64>,
        steps: usize,
        conv_tol: f64,
    ) -> Result<String, JsValue> {
        let traj = simulate(self.bench.system.as_ref(), &point, steps).map_err(js_err)?;
        let verdict =
            check_safe_attraction(&traj, &self.bench.safe_set, conv_tol).map_err(js_err)?;
        let theta: Vec<f64> = traj
            .states()
            .iter()
            .map(|state| self.bench.safe_set.eval(state).expect("dimension checked"))
            .collect();
        serde_json::to_string(&TrajectoryResult {
            states: traj.states().to_vec(),
            theta,
            safe: verdict.safe,
            attracted: verdict.attracted,
            first_violation: verdict.first_violation,
        })
        .map_err(js_err)
    }
}
