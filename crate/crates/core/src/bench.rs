//! Benchmark grid over variants, pivot strategies, tolerances and seeds.
//!
//! Each cell is one solve. Cells run in parallel but rows come back in grid
//! order, so the CSV is byte-identical across runs unless timings are on.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PivotStrategy;
use crate::instances::Instance;
use crate::solvers::{solve, SolverConfig, Variant};

/// Fixed CSV header for bench output.
pub const BENCH_HEADER: &str = "variant,pivot_strategy,epsilon,seed,n,m,status,iterations,pivot_scans,final_distance,elapsed_micros,R,rho_or_empty";

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub variants: Vec<Variant>,
    pub pivots: Vec<PivotStrategy>,
    /// Decreasing tolerances.
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub midpoint_prob: f64,
    pub max_iters: Option<u64>,
    /// Worker threads; `0` lets the pool decide.
    pub jobs: usize,
    /// Fill `elapsed_micros`. Off by default so output is reproducible.
    pub timing: bool,
}

impl BenchSpec {
    pub fn new(variants: Vec<Variant>, epsilons: Vec<f64>, seeds: Vec<u64>) -> Self {
        BenchSpec {
            variants,
            pivots: vec![PivotStrategy::FirstIndex],
            epsilons,
            seeds,
            midpoint_prob: 0.5,
            max_iters: None,
            jobs: 0,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::InvalidParameter("no variants given".into()));
        }
        if self.pivots.is_empty() {
            return Err(Error::InvalidParameter("no pivot strategies given".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidParameter("empty epsilon ladder".into()));
        }
        if let Some(&e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::InvalidEpsilon(e));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "epsilon ladder must be strictly decreasing".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one seed is required".into(),
            ));
        }
        Ok(())
    }

    /// Grid cells in output order. The deterministic variant ignores the
    /// seed, so it gets one cell per tolerance with the first seed.
    fn cells(&self) -> Vec<(Variant, PivotStrategy, f64, u64)> {
        let mut out = Vec::new();
        for &v in &self.variants {
            for &piv in &self.pivots {
                for &eps in &self.epsilons {
                    let seeds = if v.is_randomized() {
                        &self.seeds[..]
                    } else {
                        &self.seeds[..1]
                    };
                    out.extend(seeds.iter().map(|&s| (v, piv, eps, s)));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub variant: Variant,
    pub pivot_strategy: PivotStrategy,
    pub epsilon: f64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// `None` when the cell failed.
    pub result: Option<CellResult>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub status: crate::solvers::Status,
    pub iterations: u64,
    pub pivot_scans: u64,
    pub final_distance: f64,
    pub elapsed_micros: Option<u128>,
    pub radius: f64,
}

impl BenchRecord {
    pub fn status_name(&self) -> &'static str {
        self.result.as_ref().map_or("error", |r| r.status.name())
    }

    pub fn to_csv_row(&self) -> String {
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{:?},{},{},{},{},",
            self.variant,
            self.pivot_strategy,
            self.epsilon,
            self.seed,
            self.n,
            self.m,
            self.status_name()
        );
        match &self.result {
            Some(r) => {
                let elapsed = r.elapsed_micros.map(|e| e.to_string()).unwrap_or_default();
                let _ = write!(
                    row,
                    "{},{},{:?},{},{:?},",
                    r.iterations, r.pivot_scans, r.final_distance, elapsed, r.radius
                );
            }
            None => row.push_str(",,,,,"),
        }
        if let Some(rho) = self.rho {
            let _ = write!(row, "{rho:?}");
        }
        row
    }
}

/// Runs every cell of the grid on one instance.
pub fn run_bench(inst: &Instance, spec: &BenchSpec) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    let cells = spec.cells();
    let run_cell = |&(variant, pivot, epsilon, seed): &(Variant, PivotStrategy, f64, u64)| {
        let cfg = SolverConfig {
            epsilon,
            variant,
            pivot_strategy: pivot,
            seed,
            max_iters: spec.max_iters,
            midpoint_prob: spec.midpoint_prob,
            record_trace: false,
        };
        let result = solve(&inst.p, &inst.points, &cfg)
            .ok()
            .map(|out| CellResult {
                status: out.status,
                iterations: out.iterations,
                pivot_scans: out.pivot_scans,
                final_distance: out.final_distance,
                elapsed_micros: spec.timing.then_some(out.elapsed.as_micros()),
                radius: out.radius,
            });
        BenchRecord {
            variant,
            pivot_strategy: pivot,
            epsilon,
            seed,
            n: inst.n(),
            m: inst.m(),
            result,
            rho: inst.known_rho,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(run_cell).collect()))
}

pub fn write_bench_csv<W: Write>(records: &[BenchRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.to_csv_row())?;
    }
    w.flush()
}

/// Median of the iteration counts (mean of the middle pair for even sizes).
pub fn median(values: &[u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] as f64 + v[mid] as f64) / 2.0
    })
}

/// Ordinary least squares `y ≈ a + b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// `max_i |y_i - ŷ_i| / |y_i|`.
    pub max_rel_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_rel_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = (y - (intercept + slope * x)).abs();
            if *y == 0.0 {
                if r == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                r / y.abs()
            }
        })
        .fold(0.0, f64::max);
    Some(LineFit {
        intercept,
        slope,
        max_rel_residual,
    })
}

/// Slope of `ln(iterations)` against `ln(1/ε)`. Zero counts are clamped to 1.
pub fn growth_exponent(epsilons: &[f64], iterations: &[f64]) -> Option<f64> {
    let xs: Vec<f64> = epsilons.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = iterations.iter().map(|i| i.max(1.0).ln()).collect();
    fit_line(&xs, &ys).map(|f| f.slope)
}

/// Affine fit of iterations against `ln(1/ε)`.
pub fn log_fit(epsilons: &[f64], iterations: &[f64]) -> Option<LineFit> {
    let xs: Vec<f64> = epsilons.iter().map(|e| (1.0 / e).ln()).collect();
    fit_line(&xs, iterations)
}

/// Per (variant, pivot) scaling summary across the tolerance ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub variant: Variant,
    pub pivot_strategy: PivotStrategy,
    pub epsilons: Vec<f64>,
    pub median_iterations: Vec<f64>,
    pub exponent: Option<f64>,
    pub log_fit: Option<LineFit>,
}

impl ScalingSummary {
    /// `median(ε_{k+1}) / median(ε_k)` for each rung.
    pub fn rung_ratios(&self) -> Vec<f64> {
        self.median_iterations
            .windows(2)
            .map(|w| w[1] / w[0].max(1.0))
            .collect()
    }
}

pub fn summarize(records: &[BenchRecord], spec: &BenchSpec) -> Vec<ScalingSummary> {
    let mut out = Vec::new();
    for &variant in &spec.variants {
        for &pivot in &spec.pivots {
            let mut eps = Vec::new();
            let mut med = Vec::new();
            for &e in &spec.epsilons {
                let iters: Vec<u64> = records
                    .iter()
                    .filter(|r| r.variant == variant && r.pivot_strategy == pivot && r.epsilon == e)
                    .filter_map(|r| r.result.as_ref().map(|c| c.iterations))
                    .collect();
                if let Some(m) = median(&iters) {
                    eps.push(e);
                    med.push(m);
                }
            }
            out.push(ScalingSummary {
                variant,
                pivot_strategy: pivot,
                exponent: growth_exponent(&eps, &med),
                log_fit: log_fit(&eps, &med),
                epsilons: eps,
                median_iterations: med,
            });
        }
    }
    out
}

/// Human-readable summary block.
pub fn format_summary(summaries: &[ScalingSummary]) -> String {
    let mut s = String::new();
    for sum in summaries {
        let _ = writeln!(s, "# {} / {}", sum.variant, sum.pivot_strategy);
        for (e, m) in sum.epsilons.iter().zip(&sum.median_iterations) {
            let _ = writeln!(s, "#   epsilon={e:?} median_iterations={m}");
        }
        match sum.exponent {
            Some(x) => {
                let _ = writeln!(s, "#   growth exponent vs 1/epsilon (log-log): {x:.4}");
            }
            None => {
                let _ = writeln!(s, "#   growth exponent vs 1/epsilon (log-log): n/a");
            }
        }
        if let Some(f) = sum.log_fit {
            let _ = writeln!(
                s,
                "#   iterations ~ {:.3} + {:.3} ln(1/epsilon), max relative residual {:.4}",
                f.intercept, f.slope, f.max_rel_residual
            );
        }
    }
    s
}
