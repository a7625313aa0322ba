//! Normalized Haar averages over the dual group `T^r x Ẑ_{n_1} x ... x Ẑ_{n_k}`
//! by tensor trapezoidal quadrature on the torus and exact sums over
//! characters.
//!
//! For a trigonometric polynomial whose degree in every angle is below the
//! per-axis node count, the trapezoidal rule is exact; for analytic periodic
//! integrands it converges geometrically.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::group::GroupSpec;
use crate::ring::TorusCharacterPoint;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_NODES_PER_AXIS: usize = 1 << 14;
const INITIAL_NODES_PER_AXIS: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Stop once successive estimates differ by less than this.
    pub tol: f64,
    pub max_nodes_per_axis: usize,
    pub exec: Execution,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            max_nodes_per_axis: DEFAULT_MAX_NODES_PER_AXIS,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub nodes_per_axis: usize,
    /// `|I_M - I_{M/2}|` at termination.
    pub last_delta: f64,
}

/// Angle of node `j` out of `m`, in `(-π, π]`.
fn node_angle(j: usize, m: usize) -> f64 {
    -std::f64::consts::PI + TAU * (j + 1) as f64 / m as f64
}

/// Average of `f` over `m^r` torus nodes and all torsion characters.
///
/// The outer loop over the first axis (or over characters when `r = 0`) is
/// the unit of parallel work; partial sums are combined in index order.
pub fn torus_average<F>(spec: &GroupSpec, m: usize, exec: Execution, f: F) -> Result<Complex64>
where
    F: Fn(&TorusCharacterPoint) -> Result<Complex64> + Sync + Send,
{
    let r = spec.free_rank();
    let torsion = spec.torsion();
    let chars = spec.torsion_size() as usize;
    let inner_free = if r == 0 { 1 } else { m.pow(r as u32 - 1) };
    let outer = if r == 0 { 1 } else { m };
    let partials = exec.map_indices(outer, |i0| -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut point = TorusCharacterPoint::new(vec![0.0; r], vec![0; torsion.len()]);
        if r > 0 {
            point.angles[0] = node_angle(i0, m);
        }
        for rest in 0..inner_free {
            let mut idx = rest;
            for axis in 1..r {
                point.angles[axis] = node_angle(idx % m, m);
                idx /= m;
            }
            for c in 0..chars {
                let mut idx = c;
                for (slot, &n) in point.characters.iter_mut().zip(torsion) {
                    *slot = (idx % n as usize) as u64;
                    idx /= n as usize;
                }
                sum += f(&point)?;
            }
        }
        Ok(sum)
    });
    let mut total = Complex64::new(0.0, 0.0);
    for p in partials {
        total += p?;
    }
    let count = (outer * inner_free * chars) as f64;
    Ok(total / count)
}

/// Doubles the per-axis node count until successive estimates of the real
/// average agree to `opts.tol`.
pub fn adaptive_torus_average<F>(
    spec: &GroupSpec,
    opts: &QuadratureOptions,
    f: F,
) -> Result<QuadratureEstimate>
where
    F: Fn(&TorusCharacterPoint) -> Result<f64> + Sync + Send,
{
    let g = |p: &TorusCharacterPoint| f(p).map(|x| Complex64::new(x, 0.0));
    let mut m = INITIAL_NODES_PER_AXIS.min(opts.max_nodes_per_axis.max(1));
    let mut previous = torus_average(spec, m, opts.exec, g)?.re;
    if spec.free_rank() == 0 {
        return Ok(QuadratureEstimate {
            value: previous,
            nodes_per_axis: m,
            last_delta: 0.0,
        });
    }
    let mut delta = f64::INFINITY;
    while 2 * m <= opts.max_nodes_per_axis {
        m *= 2;
        let current = torus_average(spec, m, opts.exec, g)?.re;
        delta = (current - previous).abs();
        previous = current;
        if delta < opts.tol {
            return Ok(QuadratureEstimate {
                value: current,
                nodes_per_axis: m,
                last_delta: delta,
            });
        }
    }
    Err(Error::Convergence {
        nodes: m,
        last_delta: delta,
    })
}
