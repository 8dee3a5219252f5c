//! Regular-lattice designs and their marginal-average sufficient statistics.
//!
//! The total lattice size `N = prod n_j` is never formed as an integer: at realistic
//! scale (`101^50`) it overflows every machine type. Downstream code only ever sees
//! the effective Fourier-domain noise variance `tau2 = sigma^2 / N`.

use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamKey;

/// Largest lattice that `full_lattice_average` will materialize.
pub const MAX_LATTICE_CELLS: u128 = 10_000_000;

/// A full factorial design with `n_j` equispaced levels `i / n_j` on each axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LatticeDesign {
    grid_sizes: Vec<usize>,
}

impl LatticeDesign {
    pub fn grid_sizes(&self) -> &[usize] {
        &self.grid_sizes
    }

    /// Number of axes.
    pub fn d(&self) -> usize {
        self.grid_sizes.len()
    }

    pub fn n(&self, axis: usize) -> usize {
        self.grid_sizes[axis]
    }

    /// Number of positive frequencies on `axis`, `(n_j - 1) / 2`.
    pub fn max_freq(&self, axis: usize) -> usize {
        (self.grid_sizes[axis] - 1) / 2
    }

    /// The shared grid size when all axes agree.
    pub fn common_n(&self) -> Option<usize> {
        let first = self.grid_sizes[0];
        self.grid_sizes.iter().all(|&n| n == first).then_some(first)
    }

    /// `ln N`, usable where `N` itself would overflow.
    pub fn ln_total_size(&self) -> f64 {
        self.grid_sizes.iter().map(|&n| (n as f64).ln()).sum()
    }

    /// `N` if it fits in a `u128`.
    pub fn total_cells(&self) -> Option<u128> {
        self.grid_sizes
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
    }
}

impl TryFrom<Vec<usize>> for LatticeDesign {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        validate_design(&sizes)
    }
}

impl From<LatticeDesign> for Vec<usize> {
    fn from(d: LatticeDesign) -> Self {
        d.grid_sizes
    }
}

/// Accepts a design iff every grid size is odd and at least 3.
pub fn validate_design(grid_sizes: &[usize]) -> Result<LatticeDesign> {
    if grid_sizes.is_empty() {
        return Err(Error::EmptyDesign);
    }
    for (axis, &size) in grid_sizes.iter().enumerate() {
        if size % 2 == 0 {
            return Err(Error::EvenGridSize { axis, size });
        }
        if size < 3 {
            return Err(Error::GridTooSmall { axis, size });
        }
    }
    Ok(LatticeDesign { grid_sizes: grid_sizes.to_vec() })
}

/// Per-axis marginal means plus the grand mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedData {
    design: LatticeDesign,
    marginals: Vec<Vec<f64>>,
    overall_mean: f64,
    tau2: Option<f64>,
}

impl AveragedData {
    pub fn new(
        design: LatticeDesign,
        marginals: Vec<Vec<f64>>,
        overall_mean: f64,
        tau2: Option<f64>,
    ) -> Result<Self> {
        if marginals.len() != design.d() {
            return Err(Error::AxisCountMismatch {
                what: "marginals",
                expected: design.d(),
                got: marginals.len(),
            });
        }
        for (axis, m) in marginals.iter().enumerate() {
            if m.len() != design.n(axis) {
                return Err(Error::MarginalLengthMismatch {
                    axis,
                    expected: design.n(axis),
                    got: m.len(),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset {
                    field: format!("marginals[{axis}]"),
                    message: "non-finite value".into(),
                });
            }
        }
        if !overall_mean.is_finite() {
            return Err(Error::InvalidDataset {
                field: "overall_mean".into(),
                message: "non-finite value".into(),
            });
        }
        if let Some(t) = tau2 {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidDataset {
                    field: "tau2".into(),
                    message: format!("must be a finite nonnegative number, got {t}"),
                });
            }
        }
        Ok(Self { design, marginals, overall_mean, tau2 })
    }

    pub fn design(&self) -> &LatticeDesign {
        &self.design
    }

    pub fn marginals(&self) -> &[Vec<f64>] {
        &self.marginals
    }

    pub fn marginal(&self, axis: usize) -> &[f64] {
        &self.marginals[axis]
    }

    pub fn overall_mean(&self) -> f64 {
        self.overall_mean
    }

    pub fn tau2(&self) -> Option<f64> {
        self.tau2
    }

    pub fn with_tau2(mut self, tau2: Option<f64>) -> Self {
        self.tau2 = tau2;
        self
    }

    /// Multiplies every observation by `alpha`; a known `tau2` scales by `alpha^2`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            design: self.design.clone(),
            marginals: self
                .marginals
                .iter()
                .map(|m| m.iter().map(|v| v * alpha).collect())
                .collect(),
            overall_mean: self.overall_mean * alpha,
            tau2: self.tau2.map(|t| t * alpha * alpha),
        }
    }
}

type Evaluator = dyn Fn(f64) -> f64 + Send + Sync;

/// A univariate additive component `f_j` evaluated at grid positions in `[0, 1)`.
#[derive(Clone)]
pub struct ComponentFunction {
    label: String,
    eval: Arc<Evaluator>,
}

impl ComponentFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), eval: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Values `f(i / n)` for `i = 0..n`.
    pub fn sample(&self, n: usize) -> Result<Vec<f64>> {
        (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                let v = self.eval(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteComponent { label: self.label.clone(), x })
                }
            })
            .collect()
    }
}

impl fmt::Debug for ComponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentFunction").field("label", &self.label).finish()
    }
}

/// Draws marginal data directly in the averaged model.
///
/// Each marginal point gets independent Gaussian noise of variance `1 / snr`
/// (components are standardized to unit variance). The grand mean gets noise of
/// variance `tau2 = 1 / (snr * n)`. An infinite `snr` is noise-free and records
/// `tau2 = 0`.
pub fn synthesize_marginal(
    design: &LatticeDesign,
    components: &[ComponentFunction],
    a0: f64,
    snr: f64,
    stream: StreamKey,
) -> Result<AveragedData> {
    if !(snr > 0.0) {
        return Err(Error::NonPositiveSnr(snr));
    }
    let n = design.common_n().ok_or(Error::UnequalGridSizesForSnr)?;
    if components.len() != design.d() {
        return Err(Error::ComponentCountMismatch { expected: design.d(), got: components.len() });
    }
    let noise_sd = snr.recip().sqrt();
    let tau2 = (snr * n as f64).recip();
    let mut marginals = Vec::with_capacity(design.d());
    for (axis, comp) in components.iter().enumerate() {
        let mut values = comp.sample(n)?;
        if noise_sd > 0.0 {
            let mut rng = stream.axis_rng(axis);
            for v in values.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v += noise_sd * z;
            }
        }
        for v in values.iter_mut() {
            *v += a0;
        }
        marginals.push(values);
    }
    let mut overall_mean = a0;
    if tau2 > 0.0 {
        let z: f64 = StandardNormal.sample(&mut stream.axis_rng(design.d()));
        overall_mean += tau2.sqrt() * z;
    }
    AveragedData::new(design.clone(), marginals, overall_mean, Some(tau2))
}

/// Reduces a full lattice tensor to its marginal averages.
///
/// The tensor is laid out in row-major order: axis 0 varies slowest.
pub fn full_lattice_average(tensor: &[f64], design: &LatticeDesign) -> Result<AveragedData> {
    let cells = design.total_cells().unwrap_or(u128::MAX);
    if cells > MAX_LATTICE_CELLS {
        return Err(Error::LatticeTooLarge { cells, limit: MAX_LATTICE_CELLS });
    }
    let cells = cells as usize;
    if tensor.len() != cells {
        return Err(Error::TensorShapeMismatch { expected: cells, got: tensor.len() });
    }
    if let Some(idx) = tensor.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(idx));
    }
    let d = design.d();
    let mut sums: Vec<Vec<f64>> = design.grid_sizes().iter().map(|&n| vec![0.0; n]).collect();
    let mut coord = vec![0usize; d];
    let mut total = 0.0;
    for &y in tensor {
        total += y;
        for (axis, &i) in coord.iter().enumerate() {
            sums[axis][i] += y;
        }
        for axis in (0..d).rev() {
            coord[axis] += 1;
            if coord[axis] < design.n(axis) {
                break;
            }
            coord[axis] = 0;
        }
    }
    let marginals = sums
        .into_iter()
        .enumerate()
        .map(|(axis, s)| {
            let scale = design.n(axis) as f64 / cells as f64;
            s.into_iter().map(|v| v * scale).collect()
        })
        .collect();
    AveragedData::new(design.clone(), marginals, total / cells as f64, None)
}
