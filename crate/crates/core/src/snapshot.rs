use serde::Serialize;

use crate::scalar::Real;

/// Where the values of a [`FieldSnapshot`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance<T> {
    Raw,
    /// Spatial mollification with support scale `eps`, optionally averaged
    /// over the time window `[t − tau, t + tau]`.
    Mollified { eps: T, tau: T },
    Exact,
}

/// Grid functions `F`, `v`, `φ` sampled at one instant on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSnapshot<T> {
    pub t: T,
    /// Grid spacing of `x`.
    pub dx: T,
    pub x: Vec<T>,
    pub strain: Vec<T>,
    pub velocity: Vec<T>,
    pub position: Vec<T>,
    pub provenance: Provenance<T>,
}

impl<T: Real> FieldSnapshot<T> {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Cell-centre grid `(j + ½)/M`, `j = 0..M`.
    pub fn cell_centres(cells: usize) -> Vec<T> {
        let m = T::from_count(cells);
        (0..cells).map(|j| (T::from_count(j) + T::lit(0.5)) / m).collect()
    }

    pub fn max_strain(&self) -> T {
        self.strain.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Piecewise-linear interpolation of `values` (sampled on `self.x`) at `x`,
    /// held constant outside the grid.
    pub fn interpolate(&self, values: &[T], x: T) -> T {
        let n = self.x.len();
        if x <= self.x[0] {
            return values[0];
        }
        if x >= self.x[n - 1] {
            return values[n - 1];
        }
        let k = self.x.partition_point(|&xi| xi <= x).clamp(1, n - 1);
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let w = (x - x0) / (x1 - x0);
        values[k - 1] + w * (values[k] - values[k - 1])
    }
}
