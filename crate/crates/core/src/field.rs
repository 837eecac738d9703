//! Image grids: scalar intensities and two-component per-pixel vectors.

use ndarray::{Array2, Array3, ArrayView2, ArrayView3};

use crate::error::{Error, Result};
use crate::space::Point;

/// An `m x n` grid of reals, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    data: Array2<f64>,
}

impl ScalarField {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "empty field");
        Self {
            data: Array2::from_elem((rows, cols), value),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut((usize, usize)) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "empty field");
        Self {
            data: Array2::from_shape_fn((rows, cols), f),
        }
    }

    /// Row-major values; rejects wrong lengths and non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{rows}x{cols} (nonempty)"),
                actual: format!("{} values", values.len()),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite pixel at index {pos}")));
        }
        let data = Array2::from_shape_vec((rows, cols), values).expect("length checked");
        Ok(Self { data })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[[i, j]] = value;
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn map(&self, f: impl FnMut(&f64) -> f64) -> Self {
        Self {
            data: self.data.map(f),
        }
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: format!("{:?}", self.shape()),
                actual: format!("{:?}", other.shape()),
            })
        }
    }
}

impl Point for ScalarField {
    fn as_slice(&self) -> &[f64] {
        self.data.as_slice().expect("standard layout")
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        self.data.as_slice_mut().expect("standard layout")
    }
}

/// An `m x n` grid with two components per pixel; component 0 is the
/// row-direction difference, component 1 the column-direction one.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    data: Array3<f64>,
}

impl VectorField {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty field");
        Self {
            data: Array3::zeros((rows, cols, 2)),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut((usize, usize, usize)) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "empty field");
        Self {
            data: Array3::from_shape_fn((rows, cols, 2), f),
        }
    }

    /// Interleaved row-major values (`[p_00_0, p_00_1, p_01_0, ...]`).
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != 2 * rows * cols {
            return Err(Error::Shape {
                expected: format!("{rows}x{cols}x2 (nonempty)"),
                actual: format!("{} values", values.len()),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry at index {pos}")));
        }
        let data = Array3::from_shape_vec((rows, cols, 2), values).expect("length checked");
        Ok(Self { data })
    }

    pub fn rows(&self) -> usize {
        self.data.dim().0
    }

    pub fn cols(&self) -> usize {
        self.data.dim().1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn get(&self, i: usize, j: usize) -> [f64; 2] {
        [self.data[[i, j, 0]], self.data[[i, j, 1]]]
    }

    pub fn set(&mut self, i: usize, j: usize, value: [f64; 2]) {
        self.data[[i, j, 0]] = value[0];
        self.data[[i, j, 1]] = value[1];
    }

    pub fn view(&self) -> ArrayView3<'_, f64> {
        self.data.view()
    }

    /// Pixel-wise Euclidean norms `|p_ij|_2`.
    pub fn pixel_norms(&self) -> ScalarField {
        ScalarField::from_fn(self.rows(), self.cols(), |(i, j)| {
            let [a, b] = self.get(i, j);
            a.hypot(b)
        })
    }

    /// `max_ij |p_ij|_2`
    pub fn max_pixel_norm(&self) -> f64 {
        self.as_slice()
            .chunks_exact(2)
            .map(|c| c[0].hypot(c[1]))
            .fold(0.0, f64::max)
    }

    /// Visits each pixel as a mutable two-component slice.
    pub fn pixels_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.as_mut_slice().chunks_exact_mut(2)
    }
}

impl Point for VectorField {
    fn as_slice(&self) -> &[f64] {
        self.data.as_slice().expect("standard layout")
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        self.data.as_slice_mut().expect("standard layout")
    }
}
