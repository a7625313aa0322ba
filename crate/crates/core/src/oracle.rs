//! Brute-force census of reduced cycles in the cover.
//!
//! For a free action of an abelian group, a closed walk in the quotient with
//! total voltage `γ` lifts to a path from `x` to `γ·x`, so it closes in the
//! cover exactly when `γ` is the identity. Γ-classes of reduced cycles of the
//! cover are therefore identity-voltage, cyclically non-backtracking closed
//! walks in the quotient up to rotation. Each class is emitted once, from
//! its lexicographically least rotation: the search only uses steps not
//! smaller than the first one, then keeps a walk iff no rotation beats it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{OrientedStep, VoltageGraph};
use crate::series::divisors;

pub const DEFAULT_MAX_LENGTH: usize = 15;

/// Flattened step data for the search loops.
struct WalkTables {
    tail: Vec<usize>,
    head: Vec<usize>,
    /// Free coordinates followed by torsion coordinates.
    voltage: Vec<Vec<i64>>,
    free_rank: usize,
    moduli: Vec<i64>,
    out: Vec<Vec<usize>>,
    max_free_step: Vec<i64>,
    /// Quotient distances, for the closure bound.
    dist: Vec<Vec<usize>>,
}

impl WalkTables {
    fn new(g: &VoltageGraph) -> Self {
        let n = g.vertex_count();
        let r = g.group().free_rank();
        let mut tail = Vec::new();
        let mut head = Vec::new();
        let mut voltage = Vec::new();
        let mut out = vec![Vec::new(); n];
        let mut max_free_step = vec![0i64; r];
        for s in g.steps() {
            let v = g.step_voltage(s);
            let coords: Vec<i64> = v
                .free_part()
                .iter()
                .copied()
                .chain(v.torsion_part().iter().map(|&x| x as i64))
                .collect();
            for (m, x) in max_free_step.iter_mut().zip(&coords[..r]) {
                *m = (*m).max(x.abs());
            }
            tail.push(g.step_tail(s));
            head.push(g.step_head(s));
            out[g.step_tail(s)].push(s.0);
            voltage.push(coords);
        }
        let mut dist = vec![vec![usize::MAX; n]; n];
        for (src, row) in dist.iter_mut().enumerate() {
            row[src] = 0;
            let mut queue = std::collections::VecDeque::from([src]);
            while let Some(v) = queue.pop_front() {
                for &s in &out[v] {
                    let w = head[s];
                    if row[w] == usize::MAX {
                        row[w] = row[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        Self {
            tail,
            head,
            voltage,
            free_rank: r,
            moduli: g.group().torsion().iter().map(|&n| n as i64).collect(),
            out,
            max_free_step,
            dist,
        }
    }

    fn is_identity(&self, acc: &[i64]) -> bool {
        acc[..self.free_rank].iter().all(|&x| x == 0)
            && acc[self.free_rank..]
                .iter()
                .zip(&self.moduli)
                .all(|(&x, &n)| x.rem_euclid(n) == 0)
    }

    fn add(&self, acc: &mut [i64], step: usize) {
        for (a, x) in acc.iter_mut().zip(&self.voltage[step]) {
            *a += x;
        }
    }

    fn sub(&self, acc: &mut [i64], step: usize) {
        for (a, x) in acc.iter_mut().zip(&self.voltage[step]) {
            *a -= x;
        }
    }

    /// Can a walk whose next `remaining` steps start at `vertex` with
    /// accumulated voltage `acc` still close up at `target` with identity
    /// voltage?
    fn can_close(&self, acc: &[i64], vertex: usize, target: usize, remaining: usize) -> bool {
        if self.dist[vertex][target] > remaining {
            return false;
        }
        acc[..self.free_rank]
            .iter()
            .zip(&self.max_free_step)
            .all(|(&x, &m)| x.unsigned_abs() <= remaining as u64 * m as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthSpectrum {
    pub max_length: usize,
    /// `pl[n]`: Γ-classes of primitive reduced cycles of length `n`.
    pub pl: Vec<u64>,
    /// `l[n] = Σ_{d|n} pl[n/d]`.
    pub l: Vec<u64>,
    /// Γ-classes of all reduced cycles of length `n`, counted directly
    /// (powers included) rather than through the divisor relation.
    pub all_classes: Vec<u64>,
    /// Primitive classes equal to their own reversal.
    pub reversal_invariant: Vec<u64>,
}

impl LengthSpectrum {
    pub fn pl(&self, n: usize) -> u64 {
        self.pl.get(n).copied().unwrap_or(0)
    }

    pub fn l(&self, n: usize) -> u64 {
        self.l.get(n).copied().unwrap_or(0)
    }

    /// Shortest cycle length, if any cycle of length `<= max_length` exists.
    pub fn girth(&self) -> Option<usize> {
        self.pl.iter().position(|&c| c > 0)
    }

    /// `N_m = Σ_{d|m} d·PL(d)`.
    pub fn rooted_count(&self, m: usize) -> u64 {
        assert!(
            m <= self.max_length,
            "census only reaches length {}",
            self.max_length
        );
        if m == 0 {
            return 0;
        }
        divisors(m).into_iter().map(|d| d as u64 * self.pl(d)).sum()
    }

    /// Whether the directly counted classes satisfy the divisor relation.
    pub fn divisor_identity_holds(&self) -> bool {
        self.l == self.all_classes
    }
}

#[derive(Debug, Default)]
struct Tally {
    pl: Vec<u64>,
    all: Vec<u64>,
    reversal_invariant: Vec<u64>,
    violation: Option<(Vec<usize>, usize, Vec<i64>)>,
}

impl Tally {
    fn new(max_length: usize) -> Self {
        Self {
            pl: vec![0; max_length + 1],
            all: vec![0; max_length + 1],
            reversal_invariant: vec![0; max_length + 1],
            violation: None,
        }
    }

    fn merge(&mut self, other: Tally) {
        for (a, b) in self.pl.iter_mut().zip(other.pl) {
            *a += b;
        }
        for (a, b) in self.all.iter_mut().zip(other.all) {
            *a += b;
        }
        for (a, b) in self.reversal_invariant.iter_mut().zip(other.reversal_invariant) {
            *a += b;
        }
        if let Some(v) = other.violation {
            self.note_violation(v);
        }
    }

    /// Keeps the shortest witness, ties broken by the walk itself.
    fn note_violation(&mut self, v: (Vec<usize>, usize, Vec<i64>)) {
        let better = match &self.violation {
            None => true,
            Some((w, _, _)) => (v.0.len(), &v.0) < (w.len(), w),
        };
        if better {
            self.violation = Some(v);
        }
    }
}

/// True iff `walk` is lexicographically least among its rotations.
pub(crate) fn is_least_rotation(walk: &[usize]) -> bool {
    let m = walk.len();
    (1..m).filter(|&i| walk[i] == walk[0]).all(|i| {
        for k in 0..m {
            let a = walk[k];
            let b = walk[(i + k) % m];
            if a != b {
                return a < b;
            }
        }
        true
    })
}

/// Least rotation of a walk.
pub fn canonical_rotation(walk: &[usize]) -> Vec<usize> {
    let m = walk.len();
    (0..m)
        .map(|i| walk[i..].iter().chain(&walk[..i]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Smallest period `p` dividing `len` with `walk[k] == walk[k mod p]`.
pub(crate) fn period(walk: &[usize]) -> usize {
    let m = walk.len();
    divisors(m)
        .into_iter()
        .find(|&p| (p..m).all(|k| walk[k] == walk[k - p]))
        .unwrap_or(m)
}

/// No step is immediately followed by its own reverse.
pub fn is_proper(walk: &[usize]) -> bool {
    walk.windows(2).all(|w| w[1] != w[0] ^ 1)
}

/// A proper closed walk has a tail when its last step undoes its first,
/// i.e. `e_{m-j+1}` reverses `e_j` for a run of `j` starting at 1.
pub fn has_tail(walk: &[usize]) -> bool {
    walk.len() >= 2 && walk[walk.len() - 1] == walk[0] ^ 1
}

/// Non-backtracking including the wrap-around pair.
pub fn is_cyclically_reduced(walk: &[usize]) -> bool {
    is_proper(walk) && walk.first().zip(walk.last()).is_some_and(|(&f, &l)| l != f ^ 1)
}

/// The reversed walk: steps in opposite order, each traversed backwards.
pub fn reverse_walk(walk: &[usize]) -> Vec<usize> {
    walk.iter().rev().map(|&s| s ^ 1).collect()
}

struct Census<'a> {
    tables: &'a WalkTables,
    max_length: usize,
}

impl Census<'_> {
    fn record(&self, walk: &[usize], tally: &mut Tally) {
        if !is_least_rotation(walk) {
            return;
        }
        let m = walk.len();
        let p = period(walk);
        if p == m {
            tally.pl[m] += 1;
            tally.all[m] += 1;
            if canonical_rotation(&reverse_walk(walk)) == walk {
                tally.reversal_invariant[m] += 1;
            }
            return;
        }
        let mut base = vec![0i64; self.tables.voltage[0].len()];
        for &s in &walk[..p] {
            self.tables.add(&mut base, s);
        }
        if self.tables.is_identity(&base) {
            tally.all[m] += 1;
        } else {
            tally.note_violation((walk.to_vec(), m / p, base));
        }
    }

    fn extend(&self, walk: &mut Vec<usize>, acc: &mut Vec<i64>, tally: &mut Tally) {
        let t = self.tables;
        let first = walk[0];
        let last = *walk.last().unwrap();
        let start = t.tail[first];
        if t.head[last] == start && last != first ^ 1 && t.is_identity(acc) {
            debug_assert!(walk.windows(2).all(|w| w[1] != w[0] ^ 1));
            self.record(walk, tally);
        }
        let depth = walk.len();
        if depth == self.max_length {
            return;
        }
        let remaining = self.max_length - depth - 1;
        for &s in &t.out[t.head[last]] {
            if s < first || s == last ^ 1 {
                continue;
            }
            t.add(acc, s);
            if t.can_close(acc, t.head[s], start, remaining) {
                walk.push(s);
                self.extend(walk, acc, tally);
                walk.pop();
            }
            t.sub(acc, s);
        }
    }

    fn run_prefix(&self, prefix: &[usize]) -> Tally {
        let t = self.tables;
        let mut tally = Tally::new(self.max_length);
        let mut acc = vec![0i64; t.voltage[0].len()];
        for &s in prefix {
            t.add(&mut acc, s);
        }
        let remaining = self.max_length - prefix.len();
        if t.can_close(
            &acc,
            t.head[*prefix.last().unwrap()],
            t.tail[prefix[0]],
            remaining,
        ) {
            let mut walk = prefix.to_vec();
            self.extend(&mut walk, &mut acc, &mut tally);
        }
        tally
    }
}

/// Census of reduced cycle classes up to `max_length`.
pub fn census(g: &VoltageGraph, max_length: usize) -> Result<LengthSpectrum> {
    census_with(g, max_length, Execution::default())
}

pub fn census_with(g: &VoltageGraph, max_length: usize, exec: Execution) -> Result<LengthSpectrum> {
    let mut tally = Tally::new(max_length);
    if g.step_count() > 0 && max_length >= 1 {
        let tables = WalkTables::new(g);
        let census = Census {
            tables: &tables,
            max_length,
        };
        // Partition on the first two steps; length-1 walks are handled by
        // their own single-step prefixes.
        let mut prefixes: Vec<Vec<usize>> = Vec::new();
        for first in 0..g.step_count() {
            if max_length == 1 {
                prefixes.push(vec![first]);
                continue;
            }
            for &second in &tables.out[tables.head[first]] {
                if second >= first && second != first ^ 1 {
                    prefixes.push(vec![first, second]);
                }
            }
        }
        let single: Vec<Tally> = (0..g.step_count())
            .filter(|_| max_length > 1)
            .map(|s| {
                let mut t = Tally::new(max_length);
                let mut acc = vec![0i64; tables.voltage[0].len()];
                tables.add(&mut acc, s);
                if tables.head[s] == tables.tail[s] && tables.is_identity(&acc) {
                    census.record(&[s], &mut t);
                }
                t
            })
            .collect();
        for t in single {
            tally.merge(t);
        }
        for t in exec.map_slice(&prefixes, |p| census.run_prefix(p)) {
            tally.merge(t);
        }
        if let Some((walk, power, base)) = tally.violation {
            let r = g.group().free_rank();
            let voltage = g
                .group()
                .element(base[..r].to_vec(), base[r..].to_vec())
                .map(|e| e.render())
                .unwrap_or_else(|_| format!("{base:?}"));
            return Err(Error::StabilizerViolation {
                length: walk.len(),
                walk,
                power,
                voltage,
            });
        }
    }
    let mut l = vec![0u64; max_length + 1];
    for (n, slot) in l.iter_mut().enumerate().skip(1) {
        *slot = divisors(n).into_iter().map(|d| tally.pl[n / d]).sum();
    }
    Ok(LengthSpectrum {
        max_length,
        pl: tally.pl,
        l,
        all_classes: tally.all,
        reversal_invariant: tally.reversal_invariant,
    })
}

/// Counts based, oriented, cyclically reduced identity-voltage closed walks
/// of length exactly `m` directly, without any rotation bookkeeping.
pub fn rooted_walk_count(g: &VoltageGraph, m: usize) -> u64 {
    rooted_walk_count_with(g, m, Execution::default())
}

pub fn rooted_walk_count_with(g: &VoltageGraph, m: usize, exec: Execution) -> u64 {
    if m == 0 || g.step_count() == 0 {
        return 0;
    }
    let t = WalkTables::new(g);
    fn go(t: &WalkTables, first: usize, last: usize, left: usize, acc: &mut Vec<i64>) -> u64 {
        if left == 0 {
            let closes = t.head[last] == t.tail[first] && last != first ^ 1 && t.is_identity(acc);
            return closes as u64;
        }
        let mut total = 0;
        for &s in &t.out[t.head[last]] {
            if s == last ^ 1 {
                continue;
            }
            t.add(acc, s);
            if t.can_close(acc, t.head[s], t.tail[first], left - 1) {
                total += go(t, first, s, left - 1, acc);
            }
            t.sub(acc, s);
        }
        total
    }
    exec.map_indices(g.step_count(), |first| {
        let mut acc = vec![0i64; t.voltage[0].len()];
        t.add(&mut acc, first);
        go(&t, first, first, m - 1, &mut acc)
    })
    .into_iter()
    .sum()
}

/// Closed walks of length `m` (backtracking allowed) starting at orbit
/// representatives, i.e. `Tr_Γ(A^m)` counted combinatorially.
pub fn closed_walk_count(g: &VoltageGraph, m: usize) -> u64 {
    let t = WalkTables::new(g);
    fn go(t: &WalkTables, start: usize, v: usize, left: usize, acc: &mut Vec<i64>) -> u64 {
        if left == 0 {
            return (v == start && t.is_identity(acc)) as u64;
        }
        let mut total = 0;
        for &s in &t.out[v] {
            t.add(acc, s);
            if t.can_close(acc, t.head[s], start, left - 1) {
                total += go(t, start, t.head[s], left - 1, acc);
            }
            t.sub(acc, s);
        }
        total
    }
    let width = g.group().free_rank() + g.group().torsion().len();
    (0..g.vertex_count())
        .map(|v| go(&t, v, v, m, &mut vec![0i64; width]))
        .sum()
}

/// Renders a walk as `v -[t]-> w -[1]-> ...`.
pub fn describe_walk(g: &VoltageGraph, walk: &[usize]) -> String {
    let mut out = String::new();
    for (i, &s) in walk.iter().enumerate() {
        let step = OrientedStep(s);
        if i == 0 {
            out.push_str(&g.vertex_names()[g.step_tail(step)]);
        }
        out.push_str(&format!(
            " -[{}]-> {}",
            g.step_voltage(step),
            g.vertex_names()[g.step_head(step)]
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::group::GroupSpec;

    fn graph(
        group: GroupSpec,
        n: usize,
        edges: &[(usize, usize, Vec<i64>, Vec<i64>)],
        q: u64,
    ) -> VoltageGraph {
        let edges = edges
            .iter()
            .map(|(a, b, f, t)| Edge {
                tail: *a,
                head: *b,
                voltage: group.element(f.clone(), t.clone()).unwrap(),
            })
            .collect();
        VoltageGraph::new(group, (0..n).map(|i| format!("v{i}")).collect(), edges, q).unwrap()
    }

    fn example() -> VoltageGraph {
        graph(
            GroupSpec::free(1),
            2,
            &[
                (0, 0, vec![1], vec![]),
                (1, 1, vec![1], vec![]),
                (0, 1, vec![0], vec![]),
                (0, 1, vec![1], vec![]),
            ],
            3,
        )
    }

    #[test]
    fn rotation_helpers() {
        assert!(is_least_rotation(&[0, 2, 1]));
        assert!(!is_least_rotation(&[0, 2, 0, 1]));
        assert!(is_least_rotation(&[0, 1, 0, 1]));
        assert_eq!(canonical_rotation(&[3, 1, 2]), vec![1, 2, 3]);
        assert_eq!(period(&[0, 1, 0, 1]), 2);
        assert_eq!(period(&[0, 1, 0, 2]), 4);
        assert_eq!(period(&[5, 5, 5]), 1);
        assert_eq!(reverse_walk(&[0, 2, 5]), vec![4, 3, 1]);
    }

    #[test]
    fn tree_cover_has_no_cycles() {
        let path = graph(GroupSpec::free(1), 1, &[(0, 0, vec![1], vec![])], 1);
        let spec = census(&path, 12).unwrap();
        assert!(spec.pl.iter().all(|&c| c == 0));
        assert_eq!(spec.girth(), None);
    }

    #[test]
    fn example_has_four_oriented_triangles() {
        let spec = census(&example(), 3).unwrap();
        assert_eq!(spec.pl, vec![0, 0, 0, 4]);
        assert_eq!(spec.rooted_count(3), 12);
        assert_eq!(spec.rooted_count(1), 0);
        assert_eq!(spec.rooted_count(2), 0);
    }

    #[test]
    fn example_divisor_relation_at_six() {
        let spec = census(&example(), 6).unwrap();
        assert_eq!(spec.pl(2), 0);
        assert_eq!(spec.l(6), spec.pl(6) + spec.pl(3));
        assert!(spec.divisor_identity_holds());
        assert_eq!(spec.rooted_count(6), 3 * spec.pl(3) + 6 * spec.pl(6));
    }

    #[test]
    fn rooted_count_matches_direct_count() {
        let g = example();
        let spec = census(&g, 8).unwrap();
        for m in 0..=8 {
            assert_eq!(spec.rooted_count(m), rooted_walk_count(&g, m), "m = {m}");
        }
    }

    #[test]
    fn closed_walks_of_length_two_count_degrees() {
        assert_eq!(closed_walk_count(&example(), 2), 8);
    }

    #[test]
    fn square_lattice_counts() {
        // Z^2 with unit-step loops: 4-cycles are the unit squares, each with
        // 4 rotations and 2 orientations; per vertex orbit that is 2
        // oriented squares... every square is a Γ-class, two orientations.
        let g = graph(
            GroupSpec::free(2),
            1,
            &[(0, 0, vec![1, 0], vec![]), (0, 0, vec![0, 1], vec![])],
            3,
        );
        let spec = census(&g, 6).unwrap();
        assert_eq!(spec.girth(), Some(4));
        assert_eq!(spec.pl(4), 2);
        assert_eq!(spec.pl(5), 0);
        assert_eq!(spec.pl(6), 4);
    }

    #[test]
    fn torsion_power_structure_is_reported() {
        // loops t and t·s over Z x Z_2: walk (t)(t s)^-1 has voltage s.
        let g = graph(
            GroupSpec::new(1, vec![2]).unwrap(),
            1,
            &[(0, 0, vec![1], vec![0]), (0, 0, vec![1], vec![1])],
            3,
        );
        assert!(g.validate().is_valid());
        match census(&g, 12) {
            Err(Error::StabilizerViolation {
                length,
                power,
                voltage,
                ..
            }) => {
                assert_eq!(length, 4);
                assert_eq!(power, 2);
                assert_eq!(voltage, "s");
            }
            other => panic!("expected stabilizer violation, got {other:?}"),
        }
        assert!(census(&g, 3).is_ok());
    }

    #[test]
    fn four_edge_path_with_tail() {
        // e1 e2 e3 e4 with e4 the reverse of e1: proper but has a tail.
        let e1 = OrientedStep::new(2, false).0; // v -> w
        let e2 = OrientedStep::new(1, false).0; // w -> w (loop t)
        let e3 = OrientedStep::new(1, false).0;
        let e4 = OrientedStep::new(2, true).0; // w -> v
        let walk = [e1, e2, e3, e4];
        assert!(is_proper(&walk));
        assert!(has_tail(&walk));
        assert!(!is_cyclically_reduced(&walk));
    }

    #[test]
    fn tail_less_equals_cyclic_non_backtracking() {
        // Exhaustive over all closed step sequences of length <= 6 in the
        // example quotient.
        let g = example();
        let t = WalkTables::new(&g);
        fn all_closed(t: &WalkTables, walk: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
            if walk.len() == len {
                if t.head[*walk.last().unwrap()] == t.tail[walk[0]] {
                    out.push(walk.clone());
                }
                return;
            }
            let v = t.head[*walk.last().unwrap()];
            for &s in &t.out[v] {
                walk.push(s);
                all_closed(t, walk, len, out);
                walk.pop();
            }
        }
        let mut walks = Vec::new();
        for len in 1..=6 {
            for s in 0..g.step_count() {
                all_closed(&t, &mut vec![s], len, &mut walks);
            }
        }
        assert!(walks.len() > 1000);
        for w in &walks {
            let proper_tailless = is_proper(w) && !has_tail(w);
            assert_eq!(proper_tailless, is_cyclically_reduced(w), "{w:?}");
        }
    }

    #[test]
    fn sequential_and_default_agree() {
        let g = example();
        let a = census_with(&g, 10, Execution::Sequential).unwrap();
        let b = census_with(&g, 10, Execution::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reversal_pairs_orientations() {
        let spec = census(&example(), 10).unwrap();
        for n in 3..=10 {
            if spec.reversal_invariant[n] == 0 {
                assert_eq!(spec.pl(n) % 2, 0, "n = {n}");
            }
        }
    }
}
