//! Ihara zeta function of a periodic graph.
//!
//! Two routes are kept apart:
//!
//! * **Exact series** inside `|u| < 1/q`: with `T = uA - q u² I`,
//!   `log Z(u) = χ(B) log(1 - u²) + Σ_{k≥1} Tr_Γ(T^k) / k`, where `Tr_Γ`
//!   sums identity coefficients along the diagonal. Since `A` commutes with
//!   `I`, `T^k = Σ_j C(k, j) (-q)^j u^{k+j} A^{k-j}`, so only the traces
//!   `τ_p = Tr_Γ(A^p)` are needed.
//! * **Numeric determinant** for real `u` where `det M_u(θ)` stays positive:
//!   `log Det_Γ Δ(u)` is the normalized dual-group average of
//!   `log det((1 + q u²) I - u A(θ, χ))`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VoltageGraph;
use crate::matrix::RingMatrix;
use crate::quadrature::{adaptive_torus_average, QuadratureEstimate, QuadratureOptions};
use crate::ring::{Rational, TorusCharacterPoint};
use crate::series::{binomial, divisors, mobius, PowerSeries};

pub const DEFAULT_ORDER: usize = 12;

/// Coefficients of `log Z` truncated at `u^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaSeries {
    log: PowerSeries,
}

impl ZetaSeries {
    pub fn from_log_coeffs(coeffs: Vec<Rational>) -> Self {
        Self {
            log: PowerSeries::from_coeffs(coeffs),
        }
    }

    pub fn order(&self) -> usize {
        self.log.order()
    }

    pub fn log_coeffs(&self) -> &[Rational] {
        self.log.coeffs()
    }

    pub fn log_series(&self) -> &PowerSeries {
        &self.log
    }

    /// `Z(u)` itself, by series exponentiation.
    pub fn zeta_coeffs(&self) -> PowerSeries {
        self.log.exp()
    }

    /// `N_m = m [u^m] log Z`; each must be a non-negative integer.
    pub fn rooted_counts(&self) -> Result<Vec<BigInt>> {
        self.log
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let n = c * Rational::from_integer(m.into());
                if !n.is_integer() || n.is_negative() {
                    return Err(Error::Integrality {
                        order: m,
                        detail: format!("N_{m} = {n} is not a non-negative integer"),
                    });
                }
                Ok(n.to_integer())
            })
            .collect()
    }

    /// `log Z(u)` at a point, truncated at the series order.
    pub fn evaluate_log(&self, u: Complex64) -> Complex64 {
        let mut power = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for c in self.log.coeffs() {
            sum += power * c.to_f64().unwrap_or(f64::NAN);
            power *= u;
        }
        sum
    }
}

/// `Δ(u) = I - uA + u² q I` as a quadratic matrix polynomial over the group
/// ring.
#[derive(Debug, Clone)]
pub struct DeformedLaplacian {
    adjacency: RingMatrix,
    q: u64,
}

impl DeformedLaplacian {
    pub fn new(adjacency: RingMatrix, q: u64) -> Self {
        Self { adjacency, q }
    }

    pub fn of(g: &VoltageGraph) -> Self {
        Self::new(g.adjacency_matrix().0, g.q())
    }

    pub fn dim(&self) -> usize {
        self.adjacency.dim()
    }

    pub fn adjacency(&self) -> &RingMatrix {
        &self.adjacency
    }

    /// Matrix coefficients of `u^0`, `u^1`, `u^2`.
    pub fn coefficients(&self) -> [RingMatrix; 3] {
        let spec = self.adjacency.spec().clone();
        let n = self.dim();
        let id = RingMatrix::identity(spec, n);
        [
            id.clone(),
            self.adjacency.scale(&-Rational::one()),
            id.scale(&Rational::from_integer(self.q.into())),
        ]
    }

    /// Fourier symbol `M_u = (1 + q u²) I - u A(p)`.
    pub fn symbol(&self, u: Complex64, p: &TorusCharacterPoint) -> nalgebra::DMatrix<Complex64> {
        let n = self.dim();
        let a = self.adjacency.evaluate(p);
        let diag = Complex64::new(1.0, 0.0) + u * u * self.q as f64;
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { diag } else { Complex64::new(0.0, 0.0) };
            id - u * a[(i, j)]
        })
    }

    /// `τ_p = Tr_Γ(A^p)` for `p = 0..=max_power`.
    pub fn adjacency_traces(&self, max_power: usize) -> Vec<BigInt> {
        let n = self.dim();
        let mut power = RingMatrix::identity(self.adjacency.spec().clone(), n);
        let mut traces = vec![BigInt::from(n)];
        for _ in 0..max_power {
            power = power.multiply(&self.adjacency).expect("same group and dimension");
            let t = power.von_neumann_trace();
            debug_assert!(t.is_integer());
            traces.push(t.to_integer());
        }
        traces
    }

    /// `Σ_{k≥1} Tr_Γ(T^k)/k = -Tr_Γ Log Δ(u)` truncated at `u^order`.
    pub fn trace_series(&self, order: usize) -> PowerSeries {
        let tau = self.adjacency_traces(order);
        let q = BigInt::from(self.q);
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (m, slot) in coeffs.iter_mut().enumerate().skip(1) {
            // u^m collects k + j = m with 0 <= j <= k, i.e. k in [m/2, m].
            let mut acc = Rational::zero();
            for k in m.div_ceil(2)..=m {
                let j = m - k;
                let sign_q = if j % 2 == 0 {
                    q.pow(j as u32)
                } else {
                    -q.pow(j as u32)
                };
                let num = binomial(k as u64, j as u64) * sign_q * &tau[k - j];
                acc += Rational::new(num, BigInt::from(k));
            }
            *slot = acc;
        }
        PowerSeries::from_coeffs(coeffs)
    }
}

/// `log Z` from an adjacency matrix over the group ring, `q`, and `χ(B)`.
pub fn log_zeta_from_matrix(adjacency: &RingMatrix, q: u64, chi: i64, order: usize) -> ZetaSeries {
    let laplacian = DeformedLaplacian::new(adjacency.clone(), q);
    let mut coeffs = laplacian.trace_series(order).coeffs().to_vec();
    // χ log(1 - u²) = -χ Σ_i u^{2i} / i
    for i in 1..=order / 2 {
        coeffs[2 * i] -= Rational::new(BigInt::from(chi), BigInt::from(i));
    }
    ZetaSeries::from_log_coeffs(coeffs)
}

/// Exact `log Z` series of a validated graph via the determinant formula.
pub fn log_zeta_series(g: &VoltageGraph, order: usize) -> Result<ZetaSeries> {
    let chi = g.euler_characteristic_closed_form();
    if chi != Rational::from_integer(g.euler_characteristic_from_counts().into()) {
        return Err(Error::Validation(format!(
            "χ(B) mismatch: |V|(1-q)/2 = {chi}, |V|-|E| = {}",
            g.euler_characteristic_from_counts()
        )));
    }
    let chi = chi.to_integer().to_i64().expect("small Euler characteristic");
    Ok(log_zeta_from_matrix(&g.adjacency_matrix().0, g.q(), chi, order))
}

/// `PL(n) = (1/n) Σ_{d|n} μ(n/d) N_d`.
pub fn pl_from_series(s: &ZetaSeries) -> Result<Vec<BigInt>> {
    let rooted = s.rooted_counts()?;
    let mut pl = vec![BigInt::zero(); s.order() + 1];
    for n in 1..=s.order() {
        let sum: BigInt = divisors(n)
            .into_iter()
            .map(|d| BigInt::from(mobius(n / d)) * &rooted[d])
            .sum();
        let (quot, rem) = sum.div_rem(&BigInt::from(n));
        if !rem.is_zero() || quot.is_negative() {
            return Err(Error::Integrality {
                order: n,
                detail: format!("PL({n}) = {sum}/{n} is not a non-negative integer"),
            });
        }
        pl[n] = quot;
    }
    Ok(pl)
}

/// Recovers `PL` by peeling off the lowest remaining length:
/// `n PL(n) = N_n - Σ_{d|n, d<n} d PL(d)`.
pub fn pl_by_induction(s: &ZetaSeries) -> Result<Vec<BigInt>> {
    let rooted = s.rooted_counts()?;
    let mut pl = vec![BigInt::zero(); s.order() + 1];
    for n in 1..=s.order() {
        let mut rest = rooted[n].clone();
        for d in divisors(n).into_iter().filter(|&d| d < n) {
            rest -= BigInt::from(d) * &pl[d];
        }
        let (quot, rem) = rest.div_rem(&BigInt::from(n));
        if !rem.is_zero() || quot.is_negative() {
            return Err(Error::Integrality {
                order: n,
                detail: format!("PL({n}) = {rest}/{n} is not a non-negative integer"),
            });
        }
        pl[n] = quot;
    }
    Ok(pl)
}

/// `log Z` of the Euler product `Π (1 - u^ℓ)^{-PL(ℓ)}`:
/// `[u^m] log Z = Σ_{ℓ|m} PL(ℓ) ℓ / m`. `pl[0]` is ignored.
pub fn zeta_series_from_pl(pl: &[u64], order: usize) -> ZetaSeries {
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (m, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let num: u64 = divisors(m)
            .into_iter()
            .map(|l| pl.get(l).copied().unwrap_or(0) * l as u64)
            .sum();
        *slot = Rational::new(num.into(), (m as u64).into());
    }
    ZetaSeries::from_log_coeffs(coeffs)
}

/// Expands `Π_ℓ (1 - u^ℓ)^{-PL(ℓ)}` directly as a product of binomial
/// series, without going through the logarithm.
pub fn euler_product(pl: &[u64], order: usize) -> PowerSeries {
    let mut z = PowerSeries::one(order);
    for (l, &count) in pl.iter().enumerate().skip(1) {
        if count == 0 || l > order {
            continue;
        }
        // (1 - u^l)^{-c} = Σ_k C(c + k - 1, k) u^{kl}
        let mut factor = vec![Rational::zero(); order + 1];
        for k in 0..=order / l {
            factor[k * l] = Rational::from_integer(binomial(count + k as u64 - 1, k as u64));
        }
        z = z.multiply(&PowerSeries::from_coeffs(factor));
    }
    z
}

/// `Ω_q`: the plane minus the circle `|u| = 1/√q` and the real segments
/// `1/q <= |x| <= 1`.
pub fn omega_q_contains(u: Complex64, q: u64) -> bool {
    let q = q as f64;
    let on_circle = (u.norm_sqr() * q - 1.0).abs() <= 1e-12;
    let on_segment = u.im == 0.0 && {
        let x = u.re.abs();
        x * q >= 1.0 - 1e-12 && x <= 1.0 + 1e-12
    };
    !(on_circle || on_segment)
}

/// Where the numeric determinant is known to be positive for real `u`.
fn in_positive_domain(u: f64, q: u64) -> bool {
    u.abs() > 1.0 || u.abs() * (q as f64) < 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetEstimate {
    /// `Det_Γ Δ(u)`.
    pub value: f64,
    /// `log Det_Γ Δ(u)`.
    pub log_value: f64,
    pub nodes_per_axis: usize,
    pub last_delta: f64,
}

/// `Det_Γ Δ(u)` by quadrature, for real `u` with `|u| > 1` or `|u| < 1/q`.
pub fn det_gamma_numeric(g: &VoltageGraph, u: f64, opts: &QuadratureOptions) -> Result<DetEstimate> {
    if u == 0.0 {
        return Ok(DetEstimate {
            value: 1.0,
            log_value: 0.0,
            nodes_per_axis: 0,
            last_delta: 0.0,
        });
    }
    if !in_positive_domain(u, g.q()) {
        return Err(Error::Domain {
            u: u.to_string(),
            detail: format!(
                "numeric determinant needs |u| > 1 or |u| < 1/q = {}",
                1.0 / g.q() as f64
            ),
        });
    }
    let laplacian = DeformedLaplacian::of(g);
    let uc = Complex64::new(u, 0.0);
    let QuadratureEstimate {
        value,
        nodes_per_axis,
        last_delta,
    } = adaptive_torus_average(g.group(), opts, |p| {
        let det = laplacian.symbol(uc, p).determinant();
        if det.re <= 0.0 || det.im.abs() > 1e-9 * det.re.abs().max(1.0) {
            return Err(Error::Domain {
                u: u.to_string(),
                detail: format!("det M_u = {det} is not real positive at θ = {:?}", p.angles),
            });
        }
        Ok(det.re.ln())
    })?;
    Ok(DetEstimate {
        value: value.exp(),
        log_value: value,
        nodes_per_axis,
        last_delta,
    })
}

/// Character-weighted quadrature of `tr(I)`; equals the number of orbits
/// under the normalized trace convention.
pub fn trace_of_identity(g: &VoltageGraph, opts: &QuadratureOptions) -> Result<f64> {
    let n = g.vertex_count();
    let id = RingMatrix::identity(g.group().clone(), n);
    adaptive_torus_average(g.group(), opts, |p| {
        let m = id.evaluate(p);
        Ok(m.trace().re)
    })
    .map(|e| e.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum XiPath {
    Origin,
    Series { order: usize },
    Quadrature { nodes_per_axis: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiValue {
    pub value: Complex64,
    pub error_bound: f64,
    pub path: XiPath,
}

#[derive(Debug, Clone, Copy)]
pub struct XiOptions {
    /// Target absolute error of the truncated `log Z` on the series path.
    pub series_tol: f64,
    pub max_order: usize,
    pub quadrature: QuadratureOptions,
}

impl Default for XiOptions {
    fn default() -> Self {
        Self {
            series_tol: 1e-13,
            max_order: 400,
            quadrature: QuadratureOptions::default(),
        }
    }
}

/// Smallest order whose `log Z` tail bound at radius `|u|` is below `tol`,
/// using `N_m <= n (q+1) q^{m-1}`.
pub fn series_order_for(n: usize, q: u64, radius: f64, tol: f64, max_order: usize) -> Option<usize> {
    let q = q as f64;
    let rho = q * radius;
    if rho >= 1.0 {
        return None;
    }
    let scale = n as f64 * (q + 1.0) / q / (1.0 - rho);
    (1..=max_order).find(|&m| scale * rho.powi(m as i32 + 1) / (m as f64 + 1.0) <= tol)
}

/// Tail bound on `|log Z(u) - Σ_{m<=order} c_m u^m|`.
pub fn series_tail_bound(n: usize, q: u64, radius: f64, order: usize) -> f64 {
    let q = q as f64;
    let rho = q * radius;
    n as f64 * (q + 1.0) / q * rho.powi(order as i32 + 1) / ((order as f64 + 1.0) * (1.0 - rho))
}

fn completion_prefactor(g: &VoltageGraph, u: Complex64) -> Complex64 {
    let n = g.vertex_count() as i32;
    let chi = g.euler_characteristic_from_counts() as i32;
    let one = Complex64::new(1.0, 0.0);
    let q = g.q() as f64;
    (one - u * u).powi(-chi) * (one - u).powi(n) * (one - u * q).powi(n)
}

/// `ξ(u)` from an already computed series, for `|u| < 1/q`.
pub fn xi_from_series(g: &VoltageGraph, series: &ZetaSeries, u: Complex64) -> XiValue {
    let log_z = series.evaluate_log(u);
    let value = completion_prefactor(g, u) * log_z.exp();
    let tail = series_tail_bound(g.vertex_count(), g.q(), u.norm(), series.order());
    XiValue {
        value,
        error_bound: value.norm() * tail.exp_m1(),
        path: XiPath::Series {
            order: series.order(),
        },
    }
}

/// The completed zeta function `ξ(u) = (1-u²)^{-χ}(1-u)^n(1-qu)^n Z(u)`.
///
/// Inside `|u| < 1/q` it is summed from the exact series; for real `|u| > 1`
/// it is `(1-u)^n (1-qu)^n / Det_Γ Δ(u)`.
pub fn xi_eval(g: &VoltageGraph, u: Complex64, opts: &XiOptions) -> Result<XiValue> {
    let q = g.q();
    if u == Complex64::new(0.0, 0.0) {
        return Ok(XiValue {
            value: Complex64::new(1.0, 0.0),
            error_bound: 0.0,
            path: XiPath::Origin,
        });
    }
    if !omega_q_contains(u, q) {
        return Err(Error::Domain {
            u: u.to_string(),
            detail: format!("not in Ω_{q}"),
        });
    }
    if u.norm() * (q as f64) < 1.0 {
        let order = series_order_for(g.vertex_count(), q, u.norm(), opts.series_tol, opts.max_order)
            .ok_or_else(|| Error::Domain {
                u: u.to_string(),
                detail: format!("series would need more than {} terms", opts.max_order),
            })?;
        let series = log_zeta_series(g, order)?;
        return Ok(xi_from_series(g, &series, u));
    }
    if u.im == 0.0 && u.re.abs() > 1.0 {
        let det = det_gamma_numeric(g, u.re, &opts.quadrature)?;
        let n = g.vertex_count() as i32;
        let value = Complex64::new(((1.0 - u.re) * (1.0 - q as f64 * u.re)).powi(n) / det.value, 0.0);
        return Ok(XiValue {
            value,
            error_bound: value.norm() * det.last_delta.exp_m1(),
            path: XiPath::Quadrature {
                nodes_per_axis: det.nodes_per_axis,
            },
        });
    }
    Err(Error::Domain {
        u: u.to_string(),
        detail: "supported points are |u| < 1/q or real |u| > 1".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalEquationCheck {
    pub u: f64,
    pub dual: f64,
    pub xi_u: f64,
    pub xi_dual: f64,
    pub residual: f64,
}

/// Compares `ξ(u)` (numeric determinant) with `ξ(1/(qu))` (exact series)
/// for real `|u| > 1`.
pub fn functional_equation_check(
    g: &VoltageGraph,
    u: f64,
    opts: &XiOptions,
) -> Result<FunctionalEquationCheck> {
    if !(u.abs() > 1.0) || !omega_q_contains(Complex64::new(u, 0.0), g.q()) {
        return Err(Error::Domain {
            u: u.to_string(),
            detail: "functional-equation checks take real u with |u| > 1 in Ω_q".into(),
        });
    }
    let dual = 1.0 / (g.q() as f64 * u);
    let outer = xi_eval(g, Complex64::new(u, 0.0), opts)?;
    let inner = xi_eval(g, Complex64::new(dual, 0.0), opts)?;
    let residual = (outer.value - inner.value).norm() / outer.value.norm();
    Ok(FunctionalEquationCheck {
        u,
        dual,
        xi_u: outer.value.re,
        xi_dual: inner.value.re,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::group::GroupSpec;
    use crate::ring::rational;

    fn z_graph(n: usize, edges: &[(usize, usize, i64)], q: u64) -> VoltageGraph {
        let g = GroupSpec::free(1);
        let edges = edges
            .iter()
            .map(|&(a, b, x)| Edge {
                tail: a,
                head: b,
                voltage: g.element(vec![x], vec![]).unwrap(),
            })
            .collect();
        VoltageGraph::new(g, (0..n).map(|i| format!("v{i}")).collect(), edges, q).unwrap()
    }

    fn example() -> VoltageGraph {
        z_graph(2, &[(0, 0, 1), (1, 1, 1), (0, 1, 0), (0, 1, 1)], 3)
    }

    fn path() -> VoltageGraph {
        z_graph(1, &[(0, 0, 1)], 1)
    }

    #[test]
    fn tree_has_trivial_zeta() {
        let s = log_zeta_series(&path(), 12).unwrap();
        assert!(s.log_coeffs().iter().all(Zero::is_zero));
        assert_eq!(s.zeta_coeffs(), PowerSeries::one(12));
    }

    #[test]
    fn example_low_order_coefficients() {
        let s = log_zeta_series(&example(), 5).unwrap();
        assert!(s.log_coeffs()[1].is_zero());
        assert!(s.log_coeffs()[2].is_zero());
        // [u^3] log Z = N_3 / 3 = 12 / 3
        assert_eq!(s.log_coeffs()[3], rational(4));
        assert_eq!(example().euler_characteristic_from_counts(), -2);
    }

    #[test]
    fn adjacency_trace_of_square_counts_degrees() {
        let tau = DeformedLaplacian::of(&example()).adjacency_traces(2);
        assert_eq!(tau, vec![BigInt::from(2), BigInt::from(0), BigInt::from(8)]);
    }

    #[test]
    fn binomial_route_matches_direct_matrix_powers() {
        // Expand T = uA - q u² I as a matrix polynomial and take powers
        // directly, tracking u-degrees, for a low order.
        let g = example();
        let lap = DeformedLaplacian::of(&g);
        let order = 6;
        let [_, neg_a, qi] = lap.coefficients();
        let spec = g.group().clone();
        let n = lap.dim();
        let t_coeffs: Vec<RingMatrix> = vec![
            RingMatrix::zeros(spec.clone(), n),
            neg_a.scale(&-Rational::one()),
            qi.scale(&-Rational::one()),
        ];
        let mul = |a: &Vec<RingMatrix>, b: &Vec<RingMatrix>| -> Vec<RingMatrix> {
            let mut out = vec![RingMatrix::zeros(spec.clone(), n); order + 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    if i + j <= order {
                        out[i + j] = out[i + j].add(&x.multiply(y).unwrap()).unwrap();
                    }
                }
            }
            out
        };
        let mut t_pad = t_coeffs.clone();
        t_pad.resize(order + 1, RingMatrix::zeros(spec.clone(), n));
        let mut power = t_pad.clone();
        let mut expected = vec![Rational::zero(); order + 1];
        for k in 1..=order {
            for (m, c) in power.iter().enumerate() {
                expected[m] += c.von_neumann_trace() / Rational::from_integer(k.into());
            }
            power = mul(&power, &t_pad);
        }
        assert_eq!(lap.trace_series(order).coeffs(), expected.as_slice());
    }

    #[test]
    fn mobius_and_induction_agree() {
        let s = log_zeta_series(&example(), 12).unwrap();
        assert_eq!(pl_from_series(&s).unwrap(), pl_by_induction(&s).unwrap());
    }

    #[test]
    fn pl_from_hand_series() {
        // N_3 = 12, N_6 = 12 + 6·5 -> PL(6) = 5
        let mut coeffs = vec![Rational::zero(); 7];
        coeffs[3] = rational(4);
        coeffs[6] = Rational::new(42.into(), 6.into());
        let pl = pl_from_series(&ZetaSeries::from_log_coeffs(coeffs)).unwrap();
        assert_eq!(pl[3], BigInt::from(4));
        assert_eq!(pl[6], BigInt::from(5));
        let zero = pl_from_series(&ZetaSeries::from_log_coeffs(vec![Rational::zero(); 9])).unwrap();
        assert!(zero.iter().all(Zero::is_zero));
    }

    #[test]
    fn integrality_violations_are_errors() {
        let mut coeffs = vec![Rational::zero(); 4];
        coeffs[3] = Rational::new(1.into(), 2.into());
        let s = ZetaSeries::from_log_coeffs(coeffs);
        assert!(matches!(
            pl_from_series(&s),
            Err(Error::Integrality { order: 3, .. })
        ));
        let mut coeffs = vec![Rational::zero(); 3];
        coeffs[2] = rational(1); // N_2 = 2 -> PL(2) = 1, fine
        assert!(pl_from_series(&ZetaSeries::from_log_coeffs(coeffs)).is_ok());
        let mut coeffs = vec![Rational::zero(); 3];
        coeffs[2] = Rational::new(1.into(), 2.into()); // N_2 = 1 -> PL(2) = 1/2
        assert!(pl_from_series(&ZetaSeries::from_log_coeffs(coeffs)).is_err());
    }

    #[test]
    fn euler_product_examples() {
        let mut pl = vec![0u64; 4];
        pl[3] = 4;
        let z = euler_product(&pl, 9);
        // (1 - u^3)^{-4} = 1 + 4u^3 + 10u^6 + 20u^9
        let expect = [1, 0, 0, 4, 0, 0, 10, 0, 0, 20];
        for (m, &e) in expect.iter().enumerate() {
            assert_eq!(z.coeff(m), &rational(e));
        }
        assert_eq!(zeta_series_from_pl(&pl, 9).zeta_coeffs(), z);
        assert_eq!(euler_product(&[], 5), PowerSeries::one(5));
        let geo = euler_product(&[0, 0, 1], 6);
        assert_eq!(geo.coeffs(), &[1, 0, 1, 0, 1, 0, 1].map(rational));
    }

    #[test]
    fn omega_membership() {
        assert!(omega_q_contains(Complex64::new(2.0, 0.0), 3));
        assert!(!omega_q_contains(Complex64::new(1.0 / 3f64.sqrt(), 0.0), 3));
        assert!(omega_q_contains(Complex64::new(0.0, 0.5), 3));
        assert!(!omega_q_contains(Complex64::new(0.9, 0.0), 3));
        assert!(!omega_q_contains(Complex64::new(-1.0, 0.0), 3));
        assert!(omega_q_contains(Complex64::new(-1.01, 0.0), 3));
    }

    #[test]
    fn path_determinant_matches_closed_form() {
        // q = 1: M_u(θ) = 1 + u² - 2u cos θ.
        let u = 2.0;
        let est = det_gamma_numeric(&path(), u, &QuadratureOptions::default()).unwrap();
        let (a, b) = (1.0 + u * u, 2.0 * u);
        let exact = (a + (a * a - b * b).sqrt()) / 2.0;
        assert!((est.value - exact).abs() < 1e-10 * exact);
        assert!((est.value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn determinant_domain_is_enforced() {
        let opts = QuadratureOptions::default();
        assert!(matches!(
            det_gamma_numeric(&example(), 0.5, &opts),
            Err(Error::Domain { .. })
        ));
        assert_eq!(det_gamma_numeric(&example(), 0.0, &opts).unwrap().value, 1.0);
        let tiny = det_gamma_numeric(&example(), 1e-6, &opts).unwrap();
        assert!((tiny.value - 1.0).abs() < 1e-5);
    }

    #[test]
    fn numeric_log_det_matches_series_inside_disc() {
        let g = example();
        let u: f64 = 0.1;
        let est = det_gamma_numeric(&g, u, &QuadratureOptions::default()).unwrap();
        let series = DeformedLaplacian::of(&g).trace_series(30);
        let exact: f64 = -series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| c.to_f64().unwrap() * u.powi(m as i32))
            .sum::<f64>();
        assert!(
            (est.log_value - exact).abs() < 1e-8,
            "{} vs {exact}",
            est.log_value
        );
    }

    #[test]
    fn xi_at_origin_and_unsupported_points() {
        let opts = XiOptions::default();
        assert_eq!(
            xi_eval(&example(), Complex64::new(0.0, 0.0), &opts)
                .unwrap()
                .value,
            Complex64::new(1.0, 0.0)
        );
        assert!(xi_eval(&example(), Complex64::new(0.5, 0.0), &opts).is_err());
        assert!(xi_eval(&example(), Complex64::new(0.0, 0.9), &opts).is_err());
    }

    #[test]
    fn path_functional_equation_by_hand() {
        // q = 1, χ = 0, n = 1. Inside the unit disc Det_Γ Δ(u) = 1 and
        // ξ(u) = (1-u)²; outside it Det_Γ Δ(u) = u², so ξ(u) = (1-u)²/u²,
        // which equals (1 - 1/u)² = ξ(1/u).
        let opts = XiOptions::default();
        for u in [2.0f64, 3.0, -2.0] {
            let outer = xi_eval(&path(), Complex64::new(u, 0.0), &opts).unwrap();
            let expected = (1.0 - u).powi(2) / (u * u);
            assert!((outer.value.re - expected).abs() < 1e-9 * expected, "{u}");
            let inner = xi_eval(&path(), Complex64::new(1.0 / u, 0.0), &opts).unwrap();
            assert!((inner.value.re - (1.0 - 1.0 / u).powi(2)).abs() < 1e-12);
            let check = functional_equation_check(&path(), u, &opts).unwrap();
            assert!(check.residual < 1e-8, "{check:?}");
        }
    }

    #[test]
    fn example_functional_equation() {
        let check = functional_equation_check(&example(), 2.0, &XiOptions::default()).unwrap();
        assert!(check.residual < 1e-6, "{check:?}");
    }

    #[test]
    fn trace_normalization() {
        let t = trace_of_identity(&example(), &QuadratureOptions::default()).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn order_selection() {
        assert_eq!(series_order_for(2, 3, 0.5, 1e-10, 100), None);
        let m = series_order_for(2, 3, 1.0 / 6.0, 1e-12, 400).unwrap();
        assert!(series_tail_bound(2, 3, 1.0 / 6.0, m) <= 1e-12);
        assert!(series_tail_bound(2, 3, 1.0 / 6.0, m - 1) > 1e-12);
    }
}
