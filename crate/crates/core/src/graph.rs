//! Periodic graphs presented as finite voltage graphs.
//!
//! A quotient edge `(i, j, γ)` stands for the Γ-orbit of cover edges
//! `(i, a) ~ (j, a + γ)`. A quotient loop `(i, i, γ)` therefore induces both
//! `γ` and `γ⁻¹` at `i` and contributes 2 to the degree.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::matrix::RingMatrix;
use crate::ring::{GroupRingElement, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub voltage: GroupElement,
}

/// An edge traversed in one direction. Step `2e` walks edge `e` forward,
/// step `2e + 1` backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedStep(pub usize);

impl OrientedStep {
    pub fn new(edge: usize, reversed: bool) -> Self {
        Self(2 * edge + reversed as usize)
    }

    pub fn edge(self) -> usize {
        self.0 / 2
    }

    pub fn is_reversed(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn reverse(self) -> Self {
        Self(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltageGraph {
    name: Option<String>,
    group: Arc<GroupSpec>,
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    q: u64,
}

impl VoltageGraph {
    /// Builds a graph, checking only structural well-formedness (indices in
    /// range, voltages from `group`). Use [`VoltageGraph::validate`] for the
    /// periodic-graph hypotheses.
    pub fn new(group: GroupSpec, vertex_names: Vec<String>, edges: Vec<Edge>, q: u64) -> Result<Self> {
        let n = vertex_names.len();
        for (k, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::Parse(format!(
                    "edge {k} references vertex {} but there are only {n}",
                    e.tail.max(e.head)
                )));
            }
            if !group.contains(&e.voltage) {
                return Err(Error::ElementShape {
                    expected: group.to_string(),
                    detail: format!("voltage of edge {k}"),
                });
            }
        }
        Ok(Self {
            name: None,
            group: Arc::new(group),
            vertex_names,
            edges,
            q,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `χ(B) = |V(B)| - |E(B)|` counted on the quotient.
    pub fn euler_characteristic_from_counts(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64
    }

    /// `χ(B) = |V(B)|(1 - q)/2` from regularity; exact as a rational.
    pub fn euler_characteristic_closed_form(&self) -> Rational {
        Rational::new(
            (self.vertex_count() as i64 * (1 - self.q as i64)).into(),
            2.into(),
        )
    }

    pub fn step_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn steps(&self) -> impl Iterator<Item = OrientedStep> {
        (0..self.step_count()).map(OrientedStep)
    }

    pub fn step_tail(&self, s: OrientedStep) -> usize {
        let e = &self.edges[s.edge()];
        if s.is_reversed() {
            e.head
        } else {
            e.tail
        }
    }

    pub fn step_head(&self, s: OrientedStep) -> usize {
        let e = &self.edges[s.edge()];
        if s.is_reversed() {
            e.tail
        } else {
            e.head
        }
    }

    pub fn step_voltage(&self, s: OrientedStep) -> GroupElement {
        let e = &self.edges[s.edge()];
        if s.is_reversed() {
            self.group.inverse(&e.voltage)
        } else {
            e.voltage.clone()
        }
    }

    /// Number of cover edges at each orbit representative.
    pub fn cover_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0; self.vertex_count()];
        for s in self.steps() {
            deg[self.step_tail(s)] += 1;
        }
        deg
    }

    /// `A_ij = Σ γ` over `γ` with `v_i ~ γ·v_j`.
    pub fn adjacency_matrix(&self) -> AdjacencyMatrix {
        let n = self.vertex_count();
        let mut terms: Vec<Vec<Vec<GroupElement>>> = vec![vec![Vec::new(); n]; n];
        for s in self.steps() {
            terms[self.step_tail(s)][self.step_head(s)].push(self.step_voltage(s));
        }
        let entries = terms
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|gs| {
                        GroupRingElement::from_terms(
                            self.group.clone(),
                            gs.into_iter().map(|g| (g, Rational::from_integer(1.into()))),
                        )
                    })
                    .collect()
            })
            .collect();
        AdjacencyMatrix(
            RingMatrix::from_rows(self.group.clone(), entries)
                .expect("entries built over the graph's own group"),
        )
    }

    /// Voltages of a fundamental cycle basis: every non-tree edge of a BFS
    /// spanning forest, closed up through the tree.
    pub fn fundamental_cycle_voltages(&self) -> Vec<GroupElement> {
        let n = self.vertex_count();
        let mut potential: Vec<Option<GroupElement>> = vec![None; n];
        let mut tree_edges = BTreeSet::new();
        for root in 0..n {
            if potential[root].is_some() {
                continue;
            }
            potential[root] = Some(self.group.identity());
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for s in self.steps().filter(|&s| self.step_tail(s) == v) {
                    let w = self.step_head(s);
                    if potential[w].is_none() {
                        let p = self
                            .group
                            .add(potential[v].as_ref().unwrap(), &self.step_voltage(s));
                        potential[w] = Some(p);
                        tree_edges.insert(s.edge());
                        queue.push_back(w);
                    }
                }
            }
        }
        self.edges
            .iter()
            .enumerate()
            .filter(|(k, _)| !tree_edges.contains(k))
            .map(|(_, e)| {
                let through = self.group.add(potential[e.tail].as_ref().unwrap(), &e.voltage);
                self.group.sub(&through, potential[e.head].as_ref().unwrap())
            })
            .collect()
    }

    fn quotient_components(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        for root in 0..n {
            if seen[root] {
                continue;
            }
            components += 1;
            seen[root] = true;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for e in &self.edges {
                    for (a, b) in [(e.tail, e.head), (e.head, e.tail)] {
                        if a == v && !seen[b] {
                            seen[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
        }
        components
    }

    /// Checks every standing hypothesis on the periodic graph and reports
    /// each check separately.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let g = &self.group;

        report.push(
            "infinite-group",
            g.is_infinite(),
            format!("free rank of {g} is 0, so the cover is finite"),
        );
        report.push(
            "vertices",
            self.vertex_count() > 0,
            "graph has no vertices".into(),
        );
        report.push(
            "q",
            self.q >= 1,
            format!("declared q = {} must be at least 1", self.q),
        );

        // Simplicity: no identity loops, no repeated cover adjacency.
        let mut witness = None;
        for (k, e) in self.edges.iter().enumerate() {
            if e.tail == e.head && e.voltage.is_identity() {
                witness = Some(format!("edge {k} is a loop with identity voltage"));
                break;
            }
        }
        if witness.is_none() {
            let mut seen: HashMap<(usize, usize, GroupElement), OrientedStep> = HashMap::new();
            for s in self.steps() {
                let key = (self.step_tail(s), self.step_head(s), self.step_voltage(s));
                if let Some(prev) = seen.get(&key) {
                    witness = Some(format!(
                        "edges {} and {} both join {} to {}·{}",
                        prev.edge(),
                        s.edge(),
                        self.vertex_names[key.0],
                        key.2,
                        self.vertex_names[key.1]
                    ));
                    break;
                }
                seen.insert(key, s);
            }
        }
        report.push_opt("simplicity", witness);

        let inversion = self
            .edges
            .iter()
            .enumerate()
            .find(|(_, e)| e.tail == e.head && g.order(&e.voltage) == Some(2));
        report.push_opt(
            "no-inversions",
            inversion.map(|(k, e)| format!("loop edge {k} has voltage {} of order 2", e.voltage)),
        );

        let bad_degree = self
            .cover_degrees()
            .into_iter()
            .enumerate()
            .find(|&(_, d)| d != self.q + 1);
        report.push_opt(
            "regularity",
            bad_degree.map(|(v, d)| {
                format!(
                    "vertex {} has degree {d}, expected q+1 = {}",
                    self.vertex_names[v],
                    self.q + 1
                )
            }),
        );

        let components = self.quotient_components();
        let connectivity = if components > 1 {
            Some(format!("quotient has {components} components"))
        } else {
            let cycles = self.fundamental_cycle_voltages();
            let sub = g.subgroup_generated(&cycles);
            (!sub.full).then(|| match sub.quotient_order {
                Some(k) => format!("cycle voltages generate a subgroup of index {k}"),
                None => "cycle voltages generate a subgroup of infinite index".to_string(),
            })
        };
        report.push_opt("connectivity", connectivity);

        let closed = self.euler_characteristic_closed_form();
        let counted = Rational::from_integer(self.euler_characteristic_from_counts().into());
        report.push(
            "euler-characteristic",
            closed == counted,
            format!("|V|(1-q)/2 = {closed} but |V| - |E| = {counted}"),
        );
        report
    }

    /// Validates and converts the report into an error on failure.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::Validation(report.failures().join("; ")))
        }
    }

    /// Breadth-first ball of the given radius in the cover.
    pub fn cover_ball(&self, center: (usize, GroupElement), radius: usize) -> CoverBall {
        let mut index: HashMap<(usize, GroupElement), usize> = HashMap::new();
        let mut vertices = vec![center.clone()];
        let mut distance = vec![0];
        index.insert(center, 0);
        let mut frontier = 0;
        while frontier < vertices.len() {
            let d = distance[frontier];
            if d < radius {
                let (v, a) = vertices[frontier].clone();
                for s in self.steps().filter(|&s| self.step_tail(s) == v) {
                    let next = (self.step_head(s), self.group.add(&a, &self.step_voltage(s)));
                    if !index.contains_key(&next) {
                        index.insert(next.clone(), vertices.len());
                        vertices.push(next);
                        distance.push(d + 1);
                    }
                }
            }
            frontier += 1;
        }
        let mut edges = BTreeSet::new();
        for (i, (v, a)) in vertices.iter().enumerate() {
            for s in self.steps().filter(|&s| self.step_tail(s) == *v) {
                let next = (self.step_head(s), self.group.add(a, &self.step_voltage(s)));
                if let Some(&j) = index.get(&next) {
                    edges.insert((i.min(j), i.max(j)));
                }
            }
        }
        CoverBall {
            vertices,
            distance,
            edges: edges.into_iter().collect(),
        }
    }

    /// Same graph with every edge in canonical orientation (`tail <= head`,
    /// loops carrying the lexicographically smaller of `γ`, `γ⁻¹`) and the
    /// edge list sorted.
    pub fn canonicalized(&self) -> Self {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let inv = self.group.inverse(&e.voltage);
                if e.tail > e.head || (e.tail == e.head && inv < e.voltage) {
                    Edge {
                        tail: e.head,
                        head: e.tail,
                        voltage: inv,
                    }
                } else {
                    e.clone()
                }
            })
            .collect();
        edges.sort_by(|a, b| (a.tail, a.head, &a.voltage).cmp(&(b.tail, b.head, &b.voltage)));
        Self {
            edges,
            ..self.clone()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from_graph(self)).expect("graph file serializes")
    }
}

/// On-disk graph description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub q: u64,
    pub group: GroupFile,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub from: usize,
    pub to: usize,
    pub voltage: VoltageFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoltageFile {
    pub free: Vec<i64>,
    #[serde(default)]
    pub torsion: Vec<i64>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<VoltageGraph> {
        let group = GroupSpec::new(self.group.free_rank, self.group.torsion)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let edges = self
            .edges
            .into_iter()
            .enumerate()
            .map(|(k, e)| {
                let voltage = group
                    .element(e.voltage.free, e.voltage.torsion)
                    .map_err(|err| Error::Parse(format!("edge {k}: {err}")))?;
                Ok(Edge {
                    tail: e.from,
                    head: e.to,
                    voltage,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = VoltageGraph::new(group, self.vertices, edges, self.q)?;
        Ok(match self.name {
            Some(name) => graph.with_name(name),
            None => graph,
        })
    }

    pub fn from_graph(g: &VoltageGraph) -> Self {
        Self {
            name: g.name.clone(),
            q: g.q,
            group: GroupFile {
                free_rank: g.group.free_rank(),
                torsion: g.group.torsion().to_vec(),
            },
            vertices: g.vertex_names.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeFile {
                    from: e.tail,
                    to: e.head,
                    voltage: VoltageFile {
                        free: e.voltage.free_part().to_vec(),
                        torsion: e.voltage.torsion_part().iter().map(|&x| x as i64).collect(),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, passed: bool, witness: String) {
        self.checks.push(Check {
            name,
            passed,
            witness: (!passed).then_some(witness),
        });
    }

    fn push_opt(&mut self, name: &'static str, witness: Option<String>) {
        self.checks.push(Check {
            name,
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.witness.as_deref().unwrap_or("failed")))
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "PASS {}", c.name)?,
                Some(w) => writeln!(f, "FAIL {}: {w}", c.name)?,
            }
        }
        Ok(())
    }
}

/// The adjacency operator as an `n x n` matrix over the group ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix(pub RingMatrix);

impl AdjacencyMatrix {
    pub fn matrix(&self) -> &RingMatrix {
        &self.0
    }

    pub fn is_star_symmetric(&self) -> bool {
        self.0.star_transpose() == self.0
    }

    /// Number of group-ring terms in each row.
    pub fn row_supports(&self) -> Vec<usize> {
        self.0
            .rows()
            .iter()
            .map(|row| row.iter().map(|e| e.len()).sum())
            .collect()
    }
}

/// Finite window of the cover: vertices labelled `(orbit, group element)`.
#[derive(Debug, Clone)]
pub struct CoverBall {
    pub vertices: Vec<(usize, GroupElement)>,
    pub distance: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl CoverBall {
    pub fn degree(&self, vertex: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == vertex || b == vertex)
            .count()
    }
}
