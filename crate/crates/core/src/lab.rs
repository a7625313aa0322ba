//! Comparison experiments: conjugation invariance of the length spectrum
//! and finite-window checks of the multiplicity-one consequences.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Edge, VoltageGraph};
use crate::group::{GroupElement, GroupSpec};
use crate::matrix::RingMatrix;
use crate::oracle::{census_with, LengthSpectrum};
use crate::ring::{GroupRingElement, Rational};
use crate::zeta::{log_zeta_from_matrix, log_zeta_series};

/// Minimum census length before a full PL agreement is allowed to count as
/// evidence against differing orbit counts.
pub const DEFAULT_CONFIDENCE_WINDOW: usize = 10;

/// Permutation times diagonal group elements: row `i` holds the single term
/// `shifts[i]` in column `columns[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMatrix {
    spec: Arc<GroupSpec>,
    columns: Vec<usize>,
    shifts: Vec<GroupElement>,
}

impl MonomialMatrix {
    pub fn new(spec: Arc<GroupSpec>, columns: Vec<usize>, shifts: Vec<GroupElement>) -> Result<Self> {
        let n = columns.len();
        let mut seen = vec![false; n];
        for &c in &columns {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::Parse(format!(
                    "{columns:?} is not a permutation of 0..{n}"
                )));
            }
        }
        if shifts.len() != n || !shifts.iter().all(|s| spec.contains(s)) {
            return Err(Error::Parse("one shift per row, each in the group".into()));
        }
        Ok(Self {
            spec,
            columns,
            shifts,
        })
    }

    pub fn identity(spec: Arc<GroupSpec>, n: usize) -> Self {
        let shifts = vec![spec.identity(); n];
        Self {
            spec,
            columns: (0..n).collect(),
            shifts,
        }
    }

    /// Uniform permutation; free shift exponents in `[-3, 3]`, uniform torsion.
    pub fn random<R: Rng + ?Sized>(spec: Arc<GroupSpec>, n: usize, rng: &mut R) -> Self {
        let mut columns: Vec<usize> = (0..n).collect();
        columns.shuffle(rng);
        let shifts = (0..n)
            .map(|_| {
                let free = (0..spec.free_rank()).map(|_| rng.gen_range(-3..=3)).collect();
                let torsion = spec
                    .torsion()
                    .iter()
                    .map(|&m| rng.gen_range(0..m as i64))
                    .collect();
                spec.element(free, torsion).expect("shape matches spec")
            })
            .collect();
        Self {
            spec,
            columns,
            shifts,
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn shifts(&self) -> &[GroupElement] {
        &self.shifts
    }

    /// Row-wise `column:shift` pairs, e.g. `1:t^2 0:1`.
    pub fn render(&self) -> String {
        self.columns
            .iter()
            .zip(&self.shifts)
            .map(|(c, s)| format!("{c}:{}", s.render()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_matrix(&self) -> RingMatrix {
        let n = self.dim();
        let mut m = RingMatrix::zeros(self.spec.clone(), n);
        for (i, (&c, g)) in self.columns.iter().zip(&self.shifts).enumerate() {
            m.set(
                i,
                c,
                GroupRingElement::monomial(self.spec.clone(), g.clone(), Rational::from_integer(1.into())),
            );
        }
        m
    }

    /// `P⁻¹`, which for a monomial matrix is its star-transpose.
    pub fn inverse_matrix(&self) -> RingMatrix {
        self.to_matrix().star_transpose()
    }
}

/// Re-presents `g` so that its adjacency matrix becomes `P A P⁻¹`: new
/// vertex `i` is old vertex `columns[i]` with its orbit representative
/// moved by `shifts[i]`.
pub fn conjugate_presentation(g: &VoltageGraph, p: &MonomialMatrix) -> Result<VoltageGraph> {
    let n = g.vertex_count();
    if p.dim() != n || p.spec.as_ref() != g.group().as_ref() {
        return Err(Error::SpecMismatch {
            left: format!("{} ({n} orbits)", g.group()),
            right: format!("{} ({} rows)", p.spec, p.dim()),
        });
    }
    let group = g.group();
    let mut new_index = vec![0; n];
    for (i, &old) in p.columns.iter().enumerate() {
        new_index[old] = i;
    }
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let (i, j) = (new_index[e.tail], new_index[e.head]);
            let shifted = group.add(&group.add(&p.shifts[i], &e.voltage), &group.inverse(&p.shifts[j]));
            Edge {
                tail: i,
                head: j,
                voltage: shifted,
            }
        })
        .collect();
    let names = p
        .columns
        .iter()
        .map(|&old| g.vertex_names()[old].clone())
        .collect();
    let mut out = VoltageGraph::new(group.as_ref().clone(), names, edges, g.q())?;
    if let Some(name) = g.name() {
        out = out.with_name(format!("{name} (conjugated)"));
    }
    let report = out.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!(
            "monomial conjugation broke validity: {}",
            report.failures().join("; ")
        )));
    }
    let expected = conjugate_matrix(&g.adjacency_matrix().0, &p.to_matrix(), &p.inverse_matrix())?;
    if out.adjacency_matrix().0 != expected {
        return Err(Error::Internal(
            "re-presented adjacency differs from P A P^-1".into(),
        ));
    }
    Ok(out)
}

/// `P A P⁻¹` over the group ring.
pub fn conjugate_matrix(a: &RingMatrix, p: &RingMatrix, p_inv: &RingMatrix) -> Result<RingMatrix> {
    let check = p.multiply(p_inv)?;
    if check != RingMatrix::identity(a.spec().clone(), a.dim()) {
        return Err(Error::Internal("supplied inverse does not invert P".into()));
    }
    p.multiply(a)?.multiply(p_inv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Inconclusive,
    Violated,
}

impl Verdict {
    /// CI exit code: 0 consistent, 1 violated, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Consistent => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconclusive => "inconclusive-at-N",
            Verdict::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictLine {
    pub check: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub pl_left: u64,
    pub pl_right: u64,
    pub l_left: u64,
    pub l_right: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub left: String,
    pub right: String,
    pub max_length: usize,
    pub vertices_left: usize,
    pub vertices_right: usize,
    pub rows: Vec<SpectrumRow>,
    pub verdicts: Vec<VerdictLine>,
}

impl ComparisonReport {
    pub fn overall(&self) -> Verdict {
        self.verdicts
            .iter()
            .map(|v| v.verdict)
            .max()
            .unwrap_or(Verdict::Consistent)
    }

    pub fn exit_code(&self) -> i32 {
        self.overall().exit_code()
    }

    pub fn first_disagreement(&self) -> Option<&SpectrumRow> {
        self.rows.iter().find(|r| r.pl_left != r.pl_right)
    }

    pub fn verdict(&self, check: &str) -> Option<Verdict> {
        self.verdicts.iter().find(|v| v.check == check).map(|v| v.verdict)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,PL_left,PL_right,L_left,L_right\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.pl_left, r.pl_right, r.l_left, r.l_right
            ));
        }
        for v in &self.verdicts {
            out.push_str(&format!("# {},{},{}\n", v.check, v.verdict, v.detail));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn rows_from(a: &LengthSpectrum, b: &LengthSpectrum) -> Vec<SpectrumRow> {
        (1..=a.max_length.min(b.max_length))
            .map(|n| SpectrumRow {
                n,
                pl_left: a.pl(n),
                pl_right: b.pl(n),
                l_left: a.l(n),
                l_right: b.l(n),
            })
            .collect()
    }
}

fn label(g: &VoltageGraph, fallback: &str) -> String {
    g.name()
        .map(str::to_string)
        .unwrap_or_else(|| fallback.to_string())
}

/// Checks that conjugating by `p` leaves the exact `log Z` series (to
/// `max_length`) and the oracle spectrum (to `max_length`) unchanged.
pub fn check_conjugation_invariance(
    g: &VoltageGraph,
    p: &MonomialMatrix,
    max_length: usize,
    exec: Execution,
) -> Result<ComparisonReport> {
    let h = conjugate_presentation(g, p)?;
    let series_g = log_zeta_series(g, max_length)?;
    let series_h = log_zeta_series(&h, max_length)?;
    let spec_g = census_with(g, max_length, exec)?;
    let spec_h = census_with(&h, max_length, exec)?;
    let mut verdicts = Vec::new();
    let series_equal = series_g == series_h;
    verdicts.push(VerdictLine {
        check: "log-zeta-series".into(),
        verdict: if series_equal {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
        detail: match series_g
            .log_coeffs()
            .iter()
            .zip(series_h.log_coeffs())
            .position(|(a, b)| a != b)
        {
            None => format!("coefficients equal through u^{max_length}"),
            Some(m) => format!(
                "u^{m}: {} vs {}",
                series_g.log_coeffs()[m],
                series_h.log_coeffs()[m]
            ),
        },
    });
    let rows = ComparisonReport::rows_from(&spec_g, &spec_h);
    let spectra_equal = spec_g.pl == spec_h.pl;
    verdicts.push(VerdictLine {
        check: "oracle-spectrum".into(),
        verdict: if spectra_equal {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
        detail: match rows.iter().find(|r| r.pl_left != r.pl_right) {
            None => format!("PL equal for n <= {max_length}"),
            Some(r) => format!("PL({}) = {} vs {}", r.n, r.pl_left, r.pl_right),
        },
    });
    Ok(ComparisonReport {
        left: label(g, "graph"),
        right: label(&h, "conjugated graph"),
        max_length,
        vertices_left: g.vertex_count(),
        vertices_right: h.vertex_count(),
        rows,
        verdicts,
    })
}

/// Tabulates PL/L for two graphs with the same `q` and applies the
/// finite-window consequences of multiplicity one.
///
/// Multiplicity one constrains only cofinite agreement, which no finite
/// `max_length` can observe. The checkable consequence: full agreement
/// through a long enough window forces equal orbit counts `|V(B)|`.
pub fn compare_spectra(
    g1: &VoltageGraph,
    g2: &VoltageGraph,
    max_length: usize,
    window: usize,
    exec: Execution,
) -> Result<ComparisonReport> {
    if g1.q() != g2.q() {
        return Err(Error::QMismatch {
            left: g1.q(),
            right: g2.q(),
        });
    }
    let a = census_with(g1, max_length, exec)?;
    let b = census_with(g2, max_length, exec)?;
    let rows = ComparisonReport::rows_from(&a, &b);
    let first_diff = rows.iter().find(|r| r.pl_left != r.pl_right).cloned();
    let (n1, n2) = (g1.vertex_count(), g2.vertex_count());

    let mut verdicts = Vec::new();
    verdicts.push(match &first_diff {
        None => VerdictLine {
            check: "multiplicity-one".into(),
            verdict: Verdict::Consistent,
            detail: format!("PL agrees for all n <= {max_length}"),
        },
        Some(r) => VerdictLine {
            check: "multiplicity-one".into(),
            verdict: Verdict::Inconclusive,
            detail: format!(
                "first disagreement PL({}) = {} vs {}; agreement beyond n = {max_length} is not observable",
                r.n, r.pl_left, r.pl_right
            ),
        },
    });
    verdicts.push(if max_length < window {
        VerdictLine {
            check: "corollary-vertex-count".into(),
            verdict: Verdict::Inconclusive,
            detail: format!("window {max_length} below confidence window {window}"),
        }
    } else if first_diff.is_none() && n1 != n2 {
        VerdictLine {
            check: "corollary-vertex-count".into(),
            verdict: Verdict::Violated,
            detail: format!("PL agrees through n = {max_length} but |V(B)| = {n1} vs {n2}"),
        }
    } else {
        VerdictLine {
            check: "corollary-vertex-count".into(),
            verdict: Verdict::Consistent,
            detail: format!("|V(B)| = {n1} vs {n2}"),
        }
    });
    Ok(ComparisonReport {
        left: label(g1, "left"),
        right: label(g2, "right"),
        max_length,
        vertices_left: n1,
        vertices_right: n2,
        rows,
        verdicts,
    })
}

/// Matrix-level check for a general (not necessarily monomial) conjugation:
/// the exact `log Z` series of `P A P⁻¹` equals that of `A`.
pub fn matrix_conjugation_preserves_series(
    g: &VoltageGraph,
    p: &RingMatrix,
    p_inv: &RingMatrix,
    order: usize,
) -> Result<bool> {
    let a = g.adjacency_matrix().0;
    let conj = conjugate_matrix(&a, p, p_inv)?;
    let chi = g.euler_characteristic_from_counts();
    let before = log_zeta_from_matrix(&a, g.q(), chi, order);
    let after = log_zeta_from_matrix(&conj, g.q(), chi, order);
    Ok(before == after)
}
