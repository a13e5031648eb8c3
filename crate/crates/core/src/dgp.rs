//! Seeded simulators for the three Monte Carlo designs.
//!
//! Each simulator returns `n + 1` rows: the first `n` form the estimation
//! sample and the last one is the one-step-ahead holdout. Local-to-zero
//! coefficients are divided by `sqrt(n)` with `n` the estimation length.
//!
//! Stationary components (AR(1) regressors, cointegrating-residual processes,
//! and the ARDL response of design 3) are run through a burn-in of
//! [`DEFAULT_BURN_IN`] periods from zero. Unit-root components start at zero.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, standard_normal};

pub const DEFAULT_BURN_IN: usize = 200;
pub const MIN_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Dgp1,
    Dgp2,
    Dgp3,
}

impl Design {
    pub const ALL: [Design; 3] = [Design::Dgp1, Design::Dgp2, Design::Dgp3];

    pub fn as_str(self) -> &'static str {
        match self {
            Design::Dgp1 => "dgp1",
            Design::Dgp2 => "dgp2",
            Design::Dgp3 => "dgp3",
        }
    }

    /// Number of candidate regressors.
    pub fn p(self) -> usize {
        match self {
            Design::Dgp1 | Design::Dgp2 => 8,
            Design::Dgp3 => 13,
        }
    }

    /// Column indices of the inactive cointegrated pair `(x^c_3, x^c_4)`.
    pub fn inactive_coint_pair(self) -> Option<(usize, usize)> {
        match self {
            Design::Dgp1 => None,
            Design::Dgp2 => Some((4, 5)),
            Design::Dgp3 => Some((3, 4)),
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Design::Dgp1 => 1,
            Design::Dgp2 => 2,
            Design::Dgp3 => 3,
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Design::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown design `{s}`")))
    }
}

/// Persistence class of a regressor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Persistence {
    /// Stationary.
    I0,
    /// Cointegrated, leading (identity) block of the cointegrating matrix.
    C1,
    /// Cointegrated, remaining block.
    C2,
    /// Pure unit root.
    I1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthInfo {
    /// True coefficients, local-to-zero entries already scaled by `1/sqrt(n)`.
    pub theta_star: Vec<f64>,
    pub intercept_star: f64,
    /// Zero-based indices of the nonzero entries of `theta_star`.
    pub active_set: Vec<usize>,
    pub persistence: Vec<Persistence>,
    /// Cointegrating vectors embedded over all `p` columns (one row each).
    pub coint_matrix: Option<Vec<Vec<f64>>>,
}

impl TruthInfo {
    fn new(theta_star: Vec<f64>, intercept_star: f64, persistence: Vec<Persistence>, coint: Option<Vec<Vec<f64>>>) -> Self {
        let active_set = theta_star.iter().enumerate().filter(|(_, b)| **b != 0.0).map(|(j, _)| j).collect();
        Self { theta_star, intercept_star, active_set, persistence, coint_matrix: coint }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub design: Design,
    pub n: usize,
    pub seed: u64,
    pub burn_in: usize,
}

impl DgpSpec {
    pub fn new(design: Design, n: usize, seed: u64) -> Self {
        Self { design, n, seed, burn_in: DEFAULT_BURN_IN }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_N {
            return Err(Error::InvalidInput(format!("sample length must be >= {MIN_N}, got {}", self.n)));
        }
        Ok(())
    }

    pub fn simulate(&self) -> Result<TimeSeriesDataset> {
        self.validate()?;
        let mut rng = rng_from_seed(self.seed);
        let mut draw = || standard_normal(&mut rng);
        Ok(simulate_with(self.design, self.n, self.burn_in, &mut draw))
    }
}

/// Design 1: eight independent random walks, the first four active with
/// coefficient `1/sqrt(n)`, intercept 0.25.
pub fn simulate_dgp1(n: usize, seed: u64) -> TimeSeriesDataset {
    simulate(Design::Dgp1, n, seed)
}

/// Design 2: two AR(1) regressors, a rank-2 cointegrated block of four, and
/// two random walks. Columns `(z1, z2, xc1..xc4, x1, x2)`.
pub fn simulate_dgp2(n: usize, seed: u64) -> TimeSeriesDataset {
    simulate(Design::Dgp2, n, seed)
}

/// Design 3: ARDL response. Columns `(y_lag, xc1..xc4, x, x_lag, z1..z3, z1_lag..z3_lag)`.
pub fn simulate_dgp3(n: usize, seed: u64) -> TimeSeriesDataset {
    simulate(Design::Dgp3, n, seed)
}

/// Panics if `n < MIN_N`; use [`DgpSpec::simulate`] for a checked call.
pub fn simulate(design: Design, n: usize, seed: u64) -> TimeSeriesDataset {
    DgpSpec::new(design, n, seed).simulate().expect("sample length below minimum")
}

/// Runs a design with an arbitrary innovation source (one call per scalar
/// shock, in a fixed order).
pub fn simulate_with(design: Design, n: usize, burn_in: usize, draw: &mut dyn FnMut() -> f64) -> TimeSeriesDataset {
    match design {
        Design::Dgp1 => dgp1(n, draw),
        Design::Dgp2 => dgp2(n, burn_in, draw),
        Design::Dgp3 => dgp3(n, burn_in, draw),
    }
}

fn build(y: Vec<f64>, cols: Vec<Vec<f64>>, names: &[&str], truth: TruthInfo) -> TimeSeriesDataset {
    let rows = y.len();
    let w = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    let names = names.iter().map(|s| s.to_string()).collect();
    TimeSeriesDataset::new(DVector::from_vec(y), w, names)
        .and_then(|d| d.with_truth(truth))
        .expect("simulated data are finite and well shaped")
}

fn dgp1(n: usize, draw: &mut dyn FnMut() -> f64) -> TimeSeriesDataset {
    const P: usize = 8;
    let rows = n + 1;
    let beta = 1.0 / (n as f64).sqrt();
    let theta: Vec<f64> = (0..P).map(|j| if j < 4 { beta } else { 0.0 }).collect();
    let gamma = 0.25;

    let mut cols = vec![Vec::with_capacity(rows); P];
    let mut y = Vec::with_capacity(rows);
    let mut x = [0.0; P];
    for _ in 0..rows {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += draw();
            cols[j].push(*xj);
        }
        let mean: f64 = gamma + x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>();
        y.push(mean + draw());
    }
    let truth = TruthInfo::new(theta, gamma, vec![Persistence::I1; P], None);
    build(y, cols, &["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"], truth)
}

/// Rank-2 cointegrated block `dx = G'L x_{-1} + e` with `e2 = e1 - nu1`,
/// `e4 = e3 - nu2` and AR(1) residual processes `nu`.
struct CointBlock {
    x: [f64; 4],
    nu: [f64; 2],
    ar: f64,
}

impl CointBlock {
    fn new(ar: f64) -> Self {
        Self { x: [0.0; 4], nu: [0.0; 2], ar }
    }

    /// Advances only the `nu` recursions (pre-sample burn-in).
    fn burn(&mut self, draw: &mut dyn FnMut() -> f64) {
        for v in self.nu.iter_mut() {
            *v = self.ar * *v + draw();
        }
    }

    fn step(&mut self, draw: &mut dyn FnMut() -> f64) -> [f64; 4] {
        self.burn(draw);
        let e1 = draw();
        let e3 = draw();
        let e = [e1, e1 - self.nu[0], e3, e3 - self.nu[1]];
        let prev = self.x;
        // Loading rows of G'L: only x2 and x4 react to the lagged equilibrium errors.
        let ecm = [0.0, prev[0] - prev[1], 0.0, prev[2] - prev[3]];
        for k in 0..4 {
            self.x[k] = prev[k] + ecm[k] + e[k];
        }
        self.x
    }

    fn lambda_rows(p: usize, first: usize) -> Vec<Vec<f64>> {
        let mut r1 = vec![0.0; p];
        let mut r2 = vec![0.0; p];
        r1[first] = 1.0;
        r1[first + 1] = -1.0;
        r2[first + 2] = 1.0;
        r2[first + 3] = -1.0;
        vec![r1, r2]
    }
}

struct Ar1 {
    value: f64,
    coef: f64,
}

impl Ar1 {
    fn new(coef: f64) -> Self {
        Self { value: 0.0, coef }
    }

    fn step(&mut self, draw: &mut dyn FnMut() -> f64) -> f64 {
        self.value = self.coef * self.value + draw();
        self.value
    }
}

fn dgp2(n: usize, burn_in: usize, draw: &mut dyn FnMut() -> f64) -> TimeSeriesDataset {
    const P: usize = 8;
    let rows = n + 1;
    let gamma = 0.3;
    let beta1 = 1.0 / (n as f64).sqrt();
    let theta = vec![0.4, 0.0, 0.3, -0.3, 0.0, 0.0, beta1, 0.0];

    let mut z = [Ar1::new(0.5), Ar1::new(0.5)];
    let mut coint = CointBlock::new(0.2);
    for _ in 0..burn_in {
        for zl in z.iter_mut() {
            zl.step(draw);
        }
        coint.burn(draw);
    }

    let mut x = [0.0; 2];
    let mut cols = vec![Vec::with_capacity(rows); P];
    let mut y = Vec::with_capacity(rows);
    for _ in 0..rows {
        let zi = [z[0].step(draw), z[1].step(draw)];
        let xc = coint.step(draw);
        for xl in x.iter_mut() {
            *xl += draw();
        }
        let row = [zi[0], zi[1], xc[0], xc[1], xc[2], xc[3], x[0], x[1]];
        for (j, v) in row.iter().enumerate() {
            cols[j].push(*v);
        }
        let mean = gamma + row.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>();
        y.push(mean + draw());
    }

    use Persistence::*;
    let truth = TruthInfo::new(
        theta,
        gamma,
        vec![I0, I0, C1, C2, C1, C2, I1, I1],
        Some(CointBlock::lambda_rows(P, 2)),
    );
    build(y, cols, &["z1", "z2", "xc1", "xc2", "xc3", "xc4", "x1", "x2"], truth)
}

fn dgp3(n: usize, burn_in: usize, draw: &mut dyn FnMut() -> f64) -> TimeSeriesDataset {
    const P: usize = 13;
    let rows = n + 1;
    let gamma = 0.3;
    let rho = 0.4;
    let phi = [0.75, -0.75, 0.0, 0.0];
    let beta = [1.5 / (n as f64).sqrt(), 0.0];
    // (current, lagged) loadings for z1..z3
    let alpha = [[0.6, 0.4], [0.8, 0.0], [0.0, 0.0]];

    let mut z = [Ar1::new(0.5), Ar1::new(0.2), Ar1::new(0.2)];
    let mut coint = CointBlock::new(0.4);
    let mut z_prev = [0.0; 3];
    let mut y_prev = 0.0;
    for _ in 0..burn_in {
        let zi = [z[0].step(draw), z[1].step(draw), z[2].step(draw)];
        coint.burn(draw);
        let zpart: f64 = (0..3).map(|l| alpha[l][0] * zi[l] + alpha[l][1] * z_prev[l]).sum();
        y_prev = gamma + rho * y_prev + zpart + draw();
        z_prev = zi;
    }

    let mut x = 0.0;
    let mut cols = vec![Vec::with_capacity(rows); P];
    let mut y = Vec::with_capacity(rows);
    for _ in 0..rows {
        let zi = [z[0].step(draw), z[1].step(draw), z[2].step(draw)];
        let xc = coint.step(draw);
        let x_lag = x;
        x += draw();
        let row = [
            y_prev, xc[0], xc[1], xc[2], xc[3], x, x_lag, zi[0], zi[1], zi[2], z_prev[0], z_prev[1], z_prev[2],
        ];
        for (j, v) in row.iter().enumerate() {
            cols[j].push(*v);
        }
        let mean = gamma
            + rho * y_prev
            + (0..4).map(|l| phi[l] * xc[l]).sum::<f64>()
            + beta[0] * x
            + beta[1] * x_lag
            + (0..3).map(|l| alpha[l][0] * zi[l] + alpha[l][1] * z_prev[l]).sum::<f64>();
        let yi = mean + draw();
        y.push(yi);
        y_prev = yi;
        z_prev = zi;
    }

    let theta = vec![
        rho, phi[0], phi[1], phi[2], phi[3], beta[0], beta[1], alpha[0][0], alpha[1][0], alpha[2][0], alpha[0][1],
        alpha[1][1], alpha[2][1],
    ];
    use Persistence::*;
    let truth = TruthInfo::new(
        theta,
        gamma,
        vec![I0, C1, C2, C1, C2, I1, I1, I0, I0, I0, I0, I0, I0],
        Some(CointBlock::lambda_rows(P, 1)),
    );
    build(
        y,
        cols,
        &["y_lag", "xc1", "xc2", "xc3", "xc4", "x", "x_lag", "z1", "z2", "z3", "z1_lag", "z2_lag", "z3_lag"],
        truth,
    )
}

/// Writes `t,y,<predictors...>` with `t` counting from 1.
pub fn write_csv<W: Write>(data: &TimeSeriesDataset, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "y".to_string()];
    header.extend(data.names().iter().cloned());
    wtr.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![(i + 1).to_string(), data.y()[i].to_string()];
        rec.extend((0..data.p()).map(|j| data.predictors()[(i, j)].to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}
