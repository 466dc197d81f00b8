//! Flat real-valued images with 2-D shape metadata.

use crate::error::{Error, Result};

/// A real-valued image stored row-major. Gray levels are nominally in
/// `[0, 1]` but unconstrained; every diffusion level of the chain is one
/// of these.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageField {
    data: Vec<f64>,
    height: usize,
    width: usize,
}

impl ImageField {
    /// Wraps `data` as a `height x width` image. Fails when the length
    /// does not match or any entry is non-finite.
    pub fn new(data: Vec<f64>, height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Parameter("image dimensions must be positive".into()));
        }
        if data.len() != height * width {
            return Err(Error::Dimension(format!(
                "image data has {} entries, expected {}x{}={}",
                data.len(),
                height,
                width,
                height * width
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical("image contains non-finite entries".into()));
        }
        Ok(Self { data, height, width })
    }

    pub(crate) fn from_vec(data: Vec<f64>, height: usize, width: usize) -> Self {
        debug_assert_eq!(data.len(), height * width);
        Self { data, height, width }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::from_vec(vec![0.0; height * width], height, width)
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        Self::from_vec(vec![value; height * width], height, width)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    /// Pixel-wise map into a new image of the same shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec(self.data.iter().map(|&v| f(v)).collect(), self.height, self.width)
    }

    /// Pixel-wise combination of two same-shaped images.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in zip_map");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_vec(data, self.height, self.width)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
