use std::fs;

use gammaforge_core::expr::ScalarField;
use gammaforge_core::semigroup::{
    conditional_entropy_curve, dissipation_residual, dissipation_series, equilibrium_entropy, gamma_via_semigroup_limit, Dissipation,
    DiscreteGenerator, GridField, LabelExperiment, PeriodicGrid, DISSIPATION_FD_FRACTION,
};
use gammaforge_core::Error as CoreError;
use serde::Serialize;

use crate::config::Options;
use crate::error::{CliError, Result};
use crate::files::parse_box;
use crate::format::{to_csv, to_json};

use super::{emit, spec_from};

pub const DEFAULT_TOL: f64 = 1e-2;
pub const DEFAULT_PROBE: &str = "sin(x1)";
pub const GAMMA_LIMIT_TIMES: [f64; 4] = [0.08, 0.04, 0.02, 0.01];
/// Slack allowed on `I(t₂) ≤ I(t₁)`.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Default points per axis and dissipation time. The coarser 2D grid needs
/// the label edge to spread over a few cells before the check resolves it.
fn defaults(dim: usize) -> (usize, f64) {
    if dim == 1 {
        (512, 0.05)
    } else {
        (64, 0.2)
    }
}

fn default_times() -> Vec<f64> {
    (1..=40).map(|k| 0.025 * k as f64).collect()
}

#[derive(Serialize)]
struct GridJson {
    shape: Vec<usize>,
    origin: Vec<f64>,
    lengths: Vec<f64>,
}

#[derive(Serialize)]
struct DissipationJson {
    t: f64,
    dh_dt: f64,
    gamma_integral: f64,
    /// `s` in `dH/dt = s ∫ Γ(u) / (u (1 − u)) dμ̄`, as measured.
    sign: f64,
    relative_residual: f64,
}

impl From<&Dissipation> for DissipationJson {
    fn from(d: &Dissipation) -> Self {
        Self {
            t: d.t,
            dh_dt: d.dh_dt,
            gamma_integral: d.gamma_integral,
            sign: d.sign,
            relative_residual: d.relative_residual,
        }
    }
}

#[derive(Serialize)]
struct RefinementRow {
    points_per_axis: usize,
    dt: f64,
    relative_residual: f64,
}

#[derive(Serialize)]
struct Refinement {
    rows: Vec<RefinementRow>,
    /// Coarse over fine residual.
    improvement: f64,
}

#[derive(Serialize)]
struct GammaLimitJson {
    t: Vec<f64>,
    sup_error: Vec<f64>,
    ratio: Vec<f64>,
    /// `‖2 Q_{t/2} − Q_t − formula‖∞` on the two smallest times.
    extrapolated_sup_error: f64,
    /// `‖2 Q_{t/2} − Q_t‖∞`.
    extrapolated_sup: f64,
    non_monotone: bool,
}

#[derive(Serialize)]
struct Summary<'a> {
    grid: GridJson,
    label: String,
    probe: &'a str,
    prior_entropy: f64,
    mi_monotone: bool,
    max_mi_increase: f64,
    /// Direction of `H(B | Y_t)` along the times.
    entropy_direction: &'static str,
    dissipation: DissipationJson,
    refinement: Option<Refinement>,
    tolerance: f64,
    within_tolerance: bool,
}

/// Step the dissipation check takes at time `t` under the cap `max_dt`.
fn dissipation_step(t: f64, max_dt: f64) -> f64 {
    let delta = t * DISSIPATION_FD_FRACTION;
    delta / (delta / max_dt - 1e-9).ceil().max(1.0)
}

struct Setup {
    generator: DiscreteGenerator,
    experiment: LabelExperiment,
}

pub fn semigroup(o: &Options) -> Result<bool> {
    let out_dir = o
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("semigroup needs --out DIR".into()))?;
    let (spec, entry) = spec_from(o)?;
    let dim = spec.dim();
    let weighted = spec.weighted_form.clone().ok_or_else(|| {
        CliError::Core(CoreError::Unsupported("grid experiments need a weighted_form with a diagonal metric".into()))
    })?;
    if dim > 2 {
        return Err(CoreError::Unsupported(format!("grid experiments in dimension {dim}")).into());
    }
    let chart_box = match (&o.chart_box, &entry) {
        (Some(text), _) => parse_box(text)?,
        (None, Some(m)) => m.sample_box.clone(),
        (None, None) => return Err(CliError::Usage("semigroup needs --box".into())),
    };
    if chart_box.dim() != dim {
        return Err(CliError::Usage(format!("box is {}-dimensional, spec {dim}", chart_box.dim())));
    }
    let (default_n, default_t) = defaults(dim);
    let n = o.grid.unwrap_or(default_n);
    let times = o.times.clone().unwrap_or_else(default_times);
    let tol = o.tolerance(DEFAULT_TOL)?;
    let t_d = o.dissipation_time.unwrap_or(default_t);
    let label = match &o.label {
        Some(src) => Some(ScalarField::parse(src, dim)?),
        None => None,
    };
    let split = 0.5 * (chart_box.lo[0] + chart_box.hi[0]);

    let setup = |points: usize, times: Vec<f64>| -> Result<Setup> {
        let lengths: Vec<f64> = chart_box.lo.iter().zip(&chart_box.hi).map(|(l, h)| h - l).collect();
        let grid = PeriodicGrid::new(vec![points; dim], lengths)?.with_origin(chart_box.lo.clone())?;
        let generator = DiscreteGenerator::build(&weighted.metric, &weighted.log_density, grid)?;
        let grid = generator.grid();
        let mut set = Vec::with_capacity(grid.len());
        for v in 0..grid.len() {
            let x = grid.coords(v);
            set.push(match &label {
                Some(f) => f.eval(&x)? > 0.0,
                None => x[0] < split,
            });
        }
        let experiment = LabelExperiment::new(&generator, set, times)?;
        Ok(Setup { generator, experiment })
    };
    let Setup { generator, experiment } = setup(n, times.clone())?;

    // entropy and mutual information series
    let h_b = equilibrium_entropy(&generator, &experiment);
    let curve = conditional_entropy_curve(&generator, &experiment)?;
    let series = dissipation_series(&generator, &experiment, None)?;
    let mut rows = Vec::with_capacity(curve.len());
    for (&(t, h), d) in curve.iter().zip(series) {
        let residual = match d {
            Ok(d) => d.relative_residual,
            Err(CoreError::TimeTooSmall { .. }) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        rows.push(vec![t, h, h_b - h, residual]);
    }
    let max_mi_increase = rows.windows(2).map(|w| w[1][2] - w[0][2]).fold(f64::NEG_INFINITY, f64::max);
    let mi_monotone = max_mi_increase <= MONOTONE_SLACK;
    let up = curve.windows(2).all(|w| w[1].1 >= w[0].1 - MONOTONE_SLACK);
    let down = curve.windows(2).all(|w| w[1].1 <= w[0].1 + MONOTONE_SLACK);
    let entropy_direction = match (up, down) {
        (true, true) => "constant",
        (true, false) => "nondecreasing",
        (false, true) => "nonincreasing",
        (false, false) => "mixed",
    };

    // Γ-limit table
    let probe_src = o.probe.as_deref().unwrap_or(DEFAULT_PROBE);
    let probe = ScalarField::parse(probe_src, dim)?;
    let mut values = Vec::with_capacity(generator.len());
    for v in 0..generator.len() {
        values.push(probe.eval(&generator.grid().coords(v))?);
    }
    let f = GridField(values);
    let limit = gamma_via_semigroup_limit(&generator, &f, &f, &GAMMA_LIMIT_TIMES)?;
    let limit_json = GammaLimitJson {
        t: limit.times.clone(),
        sup_error: limit.sup_error.clone(),
        ratio: limit.ratio.clone(),
        extrapolated_sup_error: limit.extrapolated.sup_distance(&limit.formula),
        extrapolated_sup: limit.extrapolated.iter().fold(0.0, |m, v| m.max(v.abs())),
        non_monotone: limit.non_monotone,
    };

    // dissipation identity and its refinement
    let dissipation = dissipation_residual(&generator, &experiment, t_d, None)?;
    let refinement = if o.refine {
        let dt = dissipation_step(t_d, generator.positivity_time_step());
        let fine = setup(2 * n, vec![t_d])?;
        let fine_dt = dissipation_step(t_d, (dt / 2.0).min(fine.generator.positivity_time_step()));
        let d_fine = dissipation_residual(&fine.generator, &fine.experiment, t_d, Some(dt / 2.0))?;
        Some(Refinement {
            rows: vec![
                RefinementRow {
                    points_per_axis: n,
                    dt,
                    relative_residual: dissipation.relative_residual,
                },
                RefinementRow {
                    points_per_axis: 2 * n,
                    dt: fine_dt,
                    relative_residual: d_fine.relative_residual,
                },
            ],
            improvement: dissipation.relative_residual / d_fine.relative_residual,
        })
    } else {
        None
    };

    let within = mi_monotone
        && dissipation.relative_residual <= tol
        && refinement.as_ref().is_none_or(|r| r.improvement >= 2.0);
    let grid = generator.grid();
    let summary = Summary {
        grid: GridJson {
            shape: grid.shape().to_vec(),
            origin: grid.origin().to_vec(),
            lengths: grid.lengths().to_vec(),
        },
        label: match &o.label {
            Some(src) => format!("{src} > 0"),
            None => format!("x1 < {}", crate::format::sig17(split)),
        },
        probe: probe_src,
        prior_entropy: h_b,
        mi_monotone,
        max_mi_increase,
        entropy_direction,
        dissipation: DissipationJson::from(&dissipation),
        refinement,
        tolerance: tol,
        within_tolerance: within,
    };

    fs::create_dir_all(&out_dir).map_err(|source| CliError::Write {
        path: out_dir.clone(),
        source,
    })?;
    emit(Some(&out_dir.join("series.csv")), &to_csv(&["t", "H", "I", "residual"], &rows))?;
    emit(Some(&out_dir.join("gamma_limit.json")), &to_json(&limit_json))?;
    emit(Some(&out_dir.join("summary.json")), &to_json(&summary))?;
    Ok(within)
}
