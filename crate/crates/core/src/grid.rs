//! Uniform mesh on the unit interval, grid-sampled fields, trapezoid
//! quadrature and the discrete norms used by the controller analysis.

use std::sync::Arc;

use crate::error::Error;

/// Fewer intervals than this and the one-sided boundary stencils overlap.
pub const MIN_INTERVALS: usize = 8;

/// Uniform mesh `x_i = i*h`, `i = 0..=n`, `h = 1/n`, with trapezoid
/// quadrature weights (`h/2` at the endpoints, `h` inside).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Builds the mesh with `n` intervals. Errors if `n < MIN_INTERVALS`.
    pub fn uniform(n: usize) -> Result<Arc<Self>, Error> {
        if n < MIN_INTERVALS {
            return Err(Error::InvalidResolution {
                n,
                min: MIN_INTERVALS,
            });
        }
        let h = 1.0 / n as f64;
        let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut weights = vec![h; n + 1];
        weights[0] = 0.5 * h;
        weights[n] = 0.5 * h;
        Ok(Arc::new(Self {
            n,
            h,
            nodes,
            weights,
        }))
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    /// Mesh width `h = 1/n`.
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A scalar function sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    /// Wraps nodal values; they must match the node count and be finite.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, Error> {
        if values.len() != grid.node_count() {
            return Err(Error::IncompatibleGrids {
                left: grid.intervals(),
                right: values.len().saturating_sub(1),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "field values",
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self, Error> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, value: f64) -> Result<Self, Error> {
        let n = grid.node_count();
        Self::new(grid, vec![value; n])
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.node_count();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoid approximation of the integral over (0,1); exact for
    /// affine integrands.
    pub fn integrate(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Discrete L2 norm, `sqrt(sum w_i f_i^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete H1 norm, combining the L2 norms of the field and of its
    /// finite-difference derivative.
    pub fn h1_norm(&self) -> f64 {
        let df = self.derivative();
        let a = self.l2_norm();
        let b = df.l2_norm();
        (a * a + b * b).sqrt()
    }

    /// Second-order derivative estimate: central differences inside,
    /// one-sided three-point stencils at the endpoints.
    pub fn derivative(&self) -> Field {
        let n = self.grid.intervals();
        let h = self.grid.spacing();
        let f = &self.values;
        let mut d = vec![0.0; n + 1];
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for i in 1..n {
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
        Field {
            grid: self.grid.clone(),
            values: d,
        }
    }

    /// Weighted inner product `sum w_i f_i g_i`; errors when the grids
    /// differ.
    pub fn inner_product(&self, other: &Field) -> Result<f64, Error> {
        self.check_same_grid(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum())
    }

    /// Returns `self` scaled by `c`.
    pub fn scaled(&self, c: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<(), Error> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::IncompatibleGrids {
                left: self.grid.intervals(),
                right: other.grid.intervals(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_layout() {
        let g = Grid::uniform(10).unwrap();
        assert_eq!(g.node_count(), 11);
        assert_abs_diff_eq!(g.spacing(), 0.1);
        assert_abs_diff_eq!(g.nodes()[3], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights()[0], 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights()[5], 0.1, epsilon = 1e-15);
        let sum: f64 = g.weights().iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_minimum_resolution() {
        let g = Grid::uniform(8).unwrap();
        assert_eq!(g.node_count(), 9);
        let sum: f64 = g.weights().iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        assert!(matches!(
            Grid::uniform(4),
            Err(Error::InvalidResolution { n: 4, .. })
        ));
    }

    #[test]
    fn integrate_constant_and_linear() {
        let g = Grid::uniform(10).unwrap();
        let one = Field::constant(g.clone(), 1.0).unwrap();
        assert_abs_diff_eq!(one.integrate(), 1.0, epsilon = 1e-12);
        let x = Field::from_fn(g, |x| x).unwrap();
        assert_abs_diff_eq!(x.integrate(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn integrate_sine() {
        let g = Grid::uniform(200).unwrap();
        let f = Field::from_fn(g, |x| (PI * x).sin()).unwrap();
        assert_abs_diff_eq!(f.integrate(), 2.0 / PI, epsilon = 1e-4);
    }

    #[test]
    fn l2_examples() {
        let g = Grid::uniform(200).unwrap();
        assert_eq!(Field::zeros(g.clone()).l2_norm(), 0.0);
        let two = Field::constant(g.clone(), 2.0).unwrap();
        assert_abs_diff_eq!(two.l2_norm(), 2.0, epsilon = 1e-12);
        let f = Field::from_fn(g, |x| (PI * x).sin()).unwrap();
        assert_abs_diff_eq!(f.l2_norm(), 0.5f64.sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn h1_examples() {
        let g = Grid::uniform(200).unwrap();
        assert_eq!(Field::zeros(g.clone()).h1_norm(), 0.0);
        let c = Field::constant(g.clone(), -3.5).unwrap();
        assert_abs_diff_eq!(c.h1_norm(), 3.5, epsilon = 1e-10);
        let f = Field::from_fn(g, |x| (PI * x).sin()).unwrap();
        let exact = (0.5 + PI * PI / 2.0).sqrt();
        assert_abs_diff_eq!(f.h1_norm(), exact, epsilon = 1e-2);
    }

    #[test]
    fn inner_product_examples() {
        let g = Grid::uniform(200).unwrap();
        let one = Field::constant(g.clone(), 1.0).unwrap();
        assert_abs_diff_eq!(one.inner_product(&one).unwrap(), 1.0, epsilon = 1e-12);
        let f = Field::from_fn(g, |x| (PI * x).sin()).unwrap();
        assert_abs_diff_eq!(f.inner_product(&one).unwrap(), 2.0 / PI, epsilon = 1e-4);
    }

    #[test]
    fn inner_product_grid_mismatch() {
        let f = Field::zeros(Grid::uniform(10).unwrap());
        let g = Field::zeros(Grid::uniform(20).unwrap());
        assert!(matches!(
            f.inner_product(&g),
            Err(Error::IncompatibleGrids { left: 10, right: 20 })
        ));
    }

    #[test]
    fn field_rejects_bad_values() {
        let g = Grid::uniform(10).unwrap();
        assert!(Field::new(g.clone(), vec![0.0; 5]).is_err());
        let mut vals = vec![0.0; 11];
        vals[4] = f64::NAN;
        assert!(matches!(
            Field::new(g, vals),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn quadrature_refinement_is_second_order() {
        // error(n)/error(2n) for integrate(sin(pi x)) should approach 4
        let err = |n: usize| {
            let g = Grid::uniform(n).unwrap();
            let f = Field::from_fn(g, |x| (PI * x).sin()).unwrap();
            (f.integrate() - 2.0 / PI).abs()
        };
        for n in [50usize, 100, 200] {
            let ratio = err(n) / err(2 * n);
            assert!(
                (3.5..=4.5).contains(&ratio),
                "refinement ratio {ratio} out of range at n = {n}"
            );
        }
    }

    #[test]
    fn derivative_is_second_order_at_endpoints() {
        let err = |n: usize| {
            let g = Grid::uniform(n).unwrap();
            let f = Field::from_fn(g.clone(), |x| (PI * x).sin()).unwrap();
            let d = f.derivative();
            let exact = Field::from_fn(g, |x| PI * (PI * x).cos()).unwrap();
            d.values()
                .iter()
                .zip(exact.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err(100) / err(200);
        assert!((3.5..=4.5).contains(&ratio), "derivative ratio {ratio}");
    }

    fn arb_field() -> impl Strategy<Value = Field> {
        (8usize..=64).prop_flat_map(|n| {
            prop::collection::vec(-10.0f64..10.0, n + 1).prop_map(move |vals| {
                Field::new(Grid::uniform(n).unwrap(), vals).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn integrate_exact_on_affine(a in -5.0f64..5.0, b in -5.0f64..5.0, n in 8usize..=128) {
            let g = Grid::uniform(n).unwrap();
            let f = Field::from_fn(g, |x| a * x + b).unwrap();
            prop_assert!((f.integrate() - (0.5 * a + b)).abs() <= 1e-12);
        }

        #[test]
        fn l2_norm_is_homogeneous(f in arb_field(), c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
            let lhs = f.scaled(c).l2_norm();
            let rhs = c.abs() * f.l2_norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn cauchy_schwarz(f in arb_field(), scale in -2.0f64..2.0) {
            // build g on the same grid by reversing + scaling f's values
            let mut vals: Vec<f64> = f.values().to_vec();
            vals.reverse();
            for v in &mut vals {
                *v = *v * scale + 0.25;
            }
            let g = Field::new(f.grid().clone(), vals).unwrap();
            let ip = f.inner_product(&g).unwrap().abs();
            prop_assert!(ip <= f.l2_norm() * g.l2_norm() + 1e-12);
        }
    }
}
