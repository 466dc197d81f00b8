//! Linear observation models `y = H x0 + e` and the Gaussian likelihood.
//!
//! Three operator kinds are supported: identity, convolution with a
//! small kernel under periodic boundary conditions, and subsampling
//! masks. Identity and circulant operators are diagonalized by the 2-D
//! DFT; their transfer function is precomputed at construction and
//! drives the Fourier-domain block sampler.

use crate::error::{Error, Result};
use crate::field::ImageField;
use crate::fourier::Fourier;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use std::sync::Arc;

/// Convolution kernel (point-spread function), row-major, centered at
/// `(rows/2, cols/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Psf {
    pub fn new(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "psf needs {rows}x{cols} entries, got {}",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("psf contains non-finite weights".into()));
        }
        Ok(Self { values, rows, cols })
    }

    /// From nested rows, as given in config files.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Dimension("psf must be non-empty".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("psf rows have unequal lengths".into()));
        }
        Psf::new(rows.iter().flatten().copied().collect(), rows.len(), cols)
    }

    /// Uniform kernel with weights `1/(rows*cols)`.
    pub fn uniform(rows: usize, cols: usize) -> Self {
        let w = 1.0 / (rows * cols) as f64;
        Self { values: vec![w; rows * cols], rows, cols }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn weights(&self) -> &[f64] {
        &self.values
    }

    /// Kernel weights with their periodic offsets `(dr, dc)` relative to
    /// the kernel center.
    fn taps(&self) -> impl Iterator<Item = (isize, isize, f64)> + '_ {
        let (cr, cc) = (self.rows as isize / 2, self.cols as isize / 2);
        self.values.iter().enumerate().map(move |(i, &w)| {
            let a = (i / self.cols) as isize;
            let b = (i % self.cols) as isize;
            (a - cr, b - cc, w)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Identity,
    Circulant(Psf),
    Mask(Vec<usize>),
}

/// Observation operator over `height x width` images.
pub struct LinearOperator {
    kind: Kind,
    height: usize,
    width: usize,
    transfer: Option<Vec<Complex<f64>>>,
    fourier: Option<Arc<Fourier>>,
}

impl std::fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearOperator")
            .field("kind", &self.kind)
            .field("height", &self.height)
            .field("width", &self.width)
            .field("has_transfer", &self.transfer.is_some())
            .finish()
    }
}

impl Clone for LinearOperator {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            height: self.height,
            width: self.width,
            transfer: self.transfer.clone(),
            fourier: self.fourier.clone(),
        }
    }
}

impl LinearOperator {
    pub fn identity(height: usize, width: usize) -> Result<Self> {
        check_shape(height, width)?;
        let fourier = Arc::new(Fourier::new(height, width));
        Ok(Self {
            kind: Kind::Identity,
            height,
            width,
            transfer: Some(vec![Complex::new(1.0, 0.0); height * width]),
            fourier: Some(fourier),
        })
    }

    /// Periodic convolution with `psf`. The kernel must fit inside the
    /// image, otherwise wrap-around taps would overlap.
    pub fn circulant(height: usize, width: usize, psf: Psf) -> Result<Self> {
        check_shape(height, width)?;
        if psf.rows > height || psf.cols > width {
            return Err(Error::Dimension(format!(
                "psf {}x{} larger than image {height}x{width}",
                psf.rows, psf.cols
            )));
        }
        let fourier = Arc::new(Fourier::new(height, width));
        // Kernel image with the center tap at the origin.
        let mut kernel = vec![0.0; height * width];
        for (dr, dc, w) in psf.taps() {
            let r = dr.rem_euclid(height as isize) as usize;
            let c = dc.rem_euclid(width as isize) as usize;
            kernel[r * width + c] += w;
        }
        let transfer = fourier.forward(&kernel);
        Ok(Self {
            kind: Kind::Circulant(psf),
            height,
            width,
            transfer: Some(transfer),
            fourier: Some(fourier),
        })
    }

    /// Restriction to the pixels listed in `kept` (measurement `m` reads
    /// pixel `kept[m]`).
    pub fn mask(height: usize, width: usize, kept: Vec<usize>) -> Result<Self> {
        check_shape(height, width)?;
        let p = height * width;
        if kept.is_empty() {
            return Err(Error::Parameter("mask keeps no pixels".into()));
        }
        if kept.iter().any(|&i| i >= p) {
            return Err(Error::Parameter(format!("mask index out of range (P={p})")));
        }
        let mut seen = vec![false; p];
        for &i in &kept {
            if seen[i] {
                return Err(Error::Parameter(format!("mask index {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(Self { kind: Kind::Mask(kept), height, width, transfer: None, fourier: None })
    }

    pub fn image_shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Domain dimension `P`.
    pub fn image_len(&self) -> usize {
        self.height * self.width
    }

    /// Measurement dimension `M`.
    pub fn measurement_len(&self) -> usize {
        match &self.kind {
            Kind::Identity | Kind::Circulant(_) => self.image_len(),
            Kind::Mask(kept) => kept.len(),
        }
    }

    /// Fourier transfer function, present iff the operator is diagonal
    /// in the DFT basis (identity and circulant kinds).
    pub fn transfer(&self) -> Option<&[Complex<f64>]> {
        self.transfer.as_deref()
    }

    pub(crate) fn fourier(&self) -> Option<&Arc<Fourier>> {
        self.fourier.as_ref()
    }

    pub fn is_mask(&self) -> bool {
        matches!(self.kind, Kind::Mask(_))
    }

    fn check_domain(&self, x: &ImageField) -> Result<()> {
        if x.shape() != (self.height, self.width) {
            return Err(Error::Dimension(format!(
                "image {:?} does not match operator domain {:?}",
                x.shape(),
                (self.height, self.width)
            )));
        }
        Ok(())
    }

    /// `H x`. Convolution runs in the spatial domain with periodic
    /// indexing; the transfer-function route is kept as an independent
    /// cross-check in the tests.
    pub fn apply(&self, x: &ImageField) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        let (h, w) = (self.height as isize, self.width as isize);
        match &self.kind {
            Kind::Identity => Ok(x.data().to_vec()),
            Kind::Circulant(psf) => {
                let mut out = vec![0.0; x.len()];
                for r in 0..self.height {
                    for c in 0..self.width {
                        let mut acc = 0.0;
                        for (dr, dc, wgt) in psf.taps() {
                            let sr = (r as isize - dr).rem_euclid(h) as usize;
                            let sc = (c as isize - dc).rem_euclid(w) as usize;
                            acc += wgt * x.data()[sr * self.width + sc];
                        }
                        out[r * self.width + c] = acc;
                    }
                }
                Ok(out)
            }
            Kind::Mask(kept) => Ok(kept.iter().map(|&i| x.data()[i]).collect()),
        }
    }

    /// `H^T y`; for circulant kinds this is correlation with the kernel,
    /// for masks it scatters the measurements back into a zero image.
    pub fn adjoint(&self, y: &[f64]) -> Result<ImageField> {
        if y.len() != self.measurement_len() {
            return Err(Error::Dimension(format!(
                "measurement has {} entries, operator expects {}",
                y.len(),
                self.measurement_len()
            )));
        }
        let (h, w) = (self.height as isize, self.width as isize);
        match &self.kind {
            Kind::Identity => Ok(ImageField::from_vec(y.to_vec(), self.height, self.width)),
            Kind::Circulant(psf) => {
                let mut out = vec![0.0; self.image_len()];
                for r in 0..self.height {
                    for c in 0..self.width {
                        let mut acc = 0.0;
                        for (dr, dc, wgt) in psf.taps() {
                            let sr = (r as isize + dr).rem_euclid(h) as usize;
                            let sc = (c as isize + dc).rem_euclid(w) as usize;
                            acc += wgt * y[sr * self.width + sc];
                        }
                        out[r * self.width + c] = acc;
                    }
                }
                Ok(ImageField::from_vec(out, self.height, self.width))
            }
            Kind::Mask(kept) => {
                let mut out = vec![0.0; self.image_len()];
                for (m, &i) in kept.iter().enumerate() {
                    out[i] = y[m];
                }
                Ok(ImageField::from_vec(out, self.height, self.width))
            }
        }
    }

    /// Dense `M x P` matrix, assembled column by column. Desk-scale only;
    /// backs the fallback sampler path and small oracles.
    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        let p = self.image_len();
        let m = self.measurement_len();
        let mut mat = DMatrix::zeros(m, p);
        for j in 0..p {
            let mut basis = vec![0.0; p];
            basis[j] = 1.0;
            let col = self.apply(&ImageField::from_vec(basis, self.height, self.width))?;
            for i in 0..m {
                mat[(i, j)] = col[i];
            }
        }
        Ok(mat)
    }
}

fn check_shape(height: usize, width: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::Parameter("operator dimensions must be positive".into()));
    }
    Ok(())
}

/// White Gaussian error model with variance `v_e`.
///
/// `v_e = 0` is accepted at construction so that noiseless measurements
/// can be simulated, but the likelihood and the posterior sampler both
/// require `v_e > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    v_e: f64,
}

impl NoiseModel {
    pub fn new(v_e: f64) -> Result<Self> {
        if !v_e.is_finite() || v_e < 0.0 {
            return Err(Error::Parameter(format!("noise variance must be >= 0, got {v_e}")));
        }
        Ok(Self { v_e })
    }

    /// From a standard deviation, e.g. `sigma_e = 0.05`.
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        Self::new(sigma * sigma)
    }

    pub fn variance(&self) -> f64 {
        self.v_e
    }

    fn require_positive(&self) -> Result<f64> {
        if self.v_e > 0.0 {
            Ok(self.v_e)
        } else {
            Err(Error::Parameter("noise variance must be strictly positive".into()))
        }
    }
}

/// Draws `y = H x0 + e` with `e ~ N(0, v_e I)`.
pub fn simulate_measurement(
    op: &LinearOperator,
    x0: &ImageField,
    noise: &NoiseModel,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let mut y = op.apply(x0)?;
    if noise.v_e > 0.0 {
        let sd = noise.v_e.sqrt();
        for v in &mut y {
            let w: f64 = rng.sample(StandardNormal);
            *v += sd * w;
        }
    }
    Ok(y)
}

/// Log density of `y` under `N(H x0, v_e I)`.
pub fn log_likelihood(
    op: &LinearOperator,
    noise: &NoiseModel,
    y: &[f64],
    x0: &ImageField,
) -> Result<f64> {
    let v_e = noise.require_positive()?;
    let hx = op.apply(x0)?;
    if y.len() != hx.len() {
        return Err(Error::Dimension(format!(
            "measurement has {} entries, expected {}",
            y.len(),
            hx.len()
        )));
    }
    let ssq: f64 = y.iter().zip(&hx).map(|(a, b)| (a - b) * (a - b)).sum();
    let m = y.len() as f64;
    Ok(-ssq / (2.0 * v_e) - 0.5 * m * (2.0 * std::f64::consts::PI * v_e).ln())
}
