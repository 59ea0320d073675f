use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::pairwise_sum_complex;
use crate::error::{Error, Result};

/// Midpoint grid on the cube `[-1/2, 1/2]^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    dim: usize,
    points: usize,
}

impl QuadratureGrid {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::invalid(format!("quadrature dimension must be 1 or 3, got {dim}")));
        }
        if points == 0 || !points.is_power_of_two() {
            return Err(Error::invalid(format!("points per axis must be a power of two, got {points}")));
        }
        Ok(QuadratureGrid { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same grid with twice the points per axis.
    pub fn refined(&self) -> Self {
        QuadratureGrid { dim: self.dim, points: self.points * 2 }
    }

    /// Midpoint of the `i`-th subinterval of `[-1/2, 1/2]`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        -0.5 + (i as f64 + 0.5) / self.points as f64
    }

    /// Exact: `points` is a power of two.
    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Coordinates of flat index `idx`; the last axis varies fastest.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = self.node(rem % self.points);
            rem /= self.points;
        }
        out
    }
}

/// Midpoint rule on the cube. Nodes are evaluated in parallel and reduced
/// with a fixed-shape pairwise sum, so the result does not depend on the
/// number of threads.
pub fn cube_quadrature<F>(f: F, grid: &QuadratureGrid) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    let dim = grid.dim();
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let c = grid.coords(idx);
            f(&c[..dim])
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum_complex(&values) * grid.weight())
}

/// Vector-valued variant: `f` returns `width` components per node.
pub fn cube_quadrature_vec<F>(f: F, grid: &QuadratureGrid, width: usize) -> Result<Vec<Complex64>>
where
    F: Fn(&[f64]) -> Result<Vec<Complex64>> + Sync,
{
    let dim = grid.dim();
    let values: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let c = grid.coords(idx);
            let v = f(&c[..dim])?;
            if v.len() != width {
                return Err(Error::invalid(format!("integrand returned {} components, expected {width}", v.len())));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let w = grid.weight();
    Ok((0..width)
        .map(|j| {
            let column: Vec<Complex64> = values.iter().map(|v| v[j]).collect();
            pairwise_sum_complex(&column) * w
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::e;

    fn character(freq: [f64; 3]) -> impl Fn(&[f64]) -> Result<Complex64> + Sync {
        move |x: &[f64]| {
            let phase: f64 = x.iter().zip(freq.iter()).map(|(a, b)| a * b).sum();
            Ok(e(Complex64::new(phase, 0.0)))
        }
    }

    #[test]
    fn nodes_inside_open_cube() {
        let g = QuadratureGrid::new(3, 8).unwrap();
        for idx in 0..g.len() {
            for v in g.coords(idx) {
                assert!(v > -0.5 && v < 0.5);
            }
        }
        assert_eq!(g.weight() * g.len() as f64, 1.0);
    }

    #[test]
    fn one_dimensional_characters() {
        let g = QuadratureGrid::new(1, 8).unwrap();
        let v = cube_quadrature(character([0.0; 3]), &g).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = cube_quadrature(character([-1.0, 0.0, 0.0]), &g).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn three_dimensional_character() {
        let g = QuadratureGrid::new(3, 8).unwrap();
        let v = cube_quadrature(character([1.0, 2.0, 3.0]), &g).unwrap();
        assert!(v.norm() < 1e-14);
        // Exact for all integer frequencies below the grid size.
        for f in 1..8 {
            let v = cube_quadrature(character([f as f64, 0.0, -1.0]), &g).unwrap();
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(QuadratureGrid::new(2, 8).is_err());
        assert!(QuadratureGrid::new(1, 12).is_err());
    }
}
