//! Finitely generated abelian groups `Z^r x Z_{n_1} x ... x Z_{n_k}`.
//!
//! Elements are stored additively as exponent vectors. Rendering uses the
//! multiplicative generator names `t` (free) and `s` (torsion); a kind with
//! more than one generator is indexed from 1 (`t1`, `t2`, `s1`, ...).

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    free_rank: usize,
    torsion: Vec<u64>,
}

impl GroupSpec {
    /// Builds `Z^free_rank x Z_{torsion[0]} x ...`; torsion orders must be
    /// at least 2 and form a divisibility chain.
    pub fn new(free_rank: usize, torsion: Vec<u64>) -> Result<Self> {
        if let Some(bad) = torsion.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidGroup(format!("torsion order {bad} is below 2")));
        }
        for pair in torsion.windows(2) {
            if pair[1] % pair[0] != 0 {
                return Err(Error::InvalidGroup(format!(
                    "torsion orders must form a divisibility chain, but {} does not divide {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { free_rank, torsion })
    }

    pub fn free(free_rank: usize) -> Self {
        Self {
            free_rank,
            torsion: Vec::new(),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    /// Number of torsion characters, `n_1 * ... * n_k`.
    pub fn torsion_size(&self) -> u64 {
        self.torsion.iter().product()
    }

    pub fn is_infinite(&self) -> bool {
        self.free_rank > 0
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            free: vec![0; self.free_rank],
            torsion: vec![0; self.torsion.len()],
        }
    }

    /// Builds an element, reducing torsion entries into `[0, n_i)`.
    pub fn element(&self, free: Vec<i64>, torsion: Vec<i64>) -> Result<GroupElement> {
        if free.len() != self.free_rank || torsion.len() != self.torsion.len() {
            return Err(Error::ElementShape {
                expected: self.to_string(),
                detail: format!(
                    "expected {} free and {} torsion entries, got {} and {}",
                    self.free_rank,
                    self.torsion.len(),
                    free.len(),
                    torsion.len()
                ),
            });
        }
        let torsion = torsion
            .iter()
            .zip(&self.torsion)
            .map(|(&w, &n)| w.rem_euclid(n as i64) as u64)
            .collect();
        Ok(GroupElement { free, torsion })
    }

    /// The `j`-th free generator `t_j`.
    pub fn free_generator(&self, j: usize) -> GroupElement {
        let mut e = self.identity();
        e.free[j] = 1;
        e
    }

    /// The `i`-th torsion generator `s_i`.
    pub fn torsion_generator(&self, i: usize) -> GroupElement {
        let mut e = self.identity();
        e.torsion[i] = 1 % self.torsion[i];
        e
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.free.len() == self.free_rank
            && a.torsion.len() == self.torsion.len()
            && a.torsion.iter().zip(&self.torsion).all(|(&w, &n)| w < n)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.inverse(b))
    }

    /// `a^k` in multiplicative notation.
    pub fn pow(&self, a: &GroupElement, k: i64) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| x * k).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion)
                .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        }
    }

    /// Order of `a`, or `None` when it is infinite.
    pub fn order(&self, a: &GroupElement) -> Option<u64> {
        if a.free.iter().any(|&x| x != 0) {
            return None;
        }
        Some(
            a.torsion
                .iter()
                .zip(&self.torsion)
                .map(|(&w, &n)| n / w.gcd(&n))
                .fold(1, |acc, o| acc.lcm(&o)),
        )
    }

    /// Decides whether `elements` generate the whole group.
    ///
    /// The subgroup is the row lattice of the elements stacked on top of the
    /// torsion relations `n_i e_{r+i}` inside `Z^{r+k}`; it is everything iff
    /// that lattice has full rank and all invariant factors equal 1.
    pub fn subgroup_generated(&self, elements: &[GroupElement]) -> SubgroupDescription {
        let width = self.free_rank + self.torsion.len();
        let mut rows: Vec<Vec<i128>> = elements
            .iter()
            .map(|e| {
                e.free
                    .iter()
                    .map(|&x| x as i128)
                    .chain(e.torsion.iter().map(|&x| x as i128))
                    .collect()
            })
            .collect();
        for (i, &n) in self.torsion.iter().enumerate() {
            let mut row = vec![0i128; width];
            row[self.free_rank + i] = n as i128;
            rows.push(row);
        }
        // Z^{r+k} modulo this lattice is Γ / H.
        let invariants = smith_invariants(rows, width);
        let full_rank = invariants.len() == width;
        let quotient_order = full_rank.then(|| invariants.iter().map(|&d| d as u128).product());
        SubgroupDescription {
            full: full_rank && invariants.iter().all(|&d| d == 1),
            ambient_invariants: invariants,
            quotient_order,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for n in &self.torsion {
            parts.push(format!("Z_{n}"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Element of a [`GroupSpec`]: free exponents plus torsion residues.
///
/// Ordering is lexicographic on `(free, torsion)`; this is the canonical term
/// order used for serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    free: Vec<i64>,
    torsion: Vec<u64>,
}

impl GroupElement {
    pub fn free_part(&self) -> &[i64] {
        &self.free
    }

    pub fn torsion_part(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_identity(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.torsion.iter().all(|&x| x == 0)
    }

    /// Sum of absolute free exponents.
    pub fn free_degree(&self) -> u64 {
        self.free.iter().map(|x| x.unsigned_abs()).sum()
    }

    /// Multiplicative rendering, `"1"` for the identity.
    pub fn render(&self) -> String {
        let mut factors = Vec::new();
        let free_indexed = self.free.len() > 1;
        let torsion_indexed = self.torsion.len() > 1;
        for (i, &w) in self.torsion.iter().enumerate() {
            if w != 0 {
                factors.push(power("s", torsion_indexed.then_some(i + 1), w as i64));
            }
        }
        for (j, &u) in self.free.iter().enumerate() {
            if u != 0 {
                factors.push(power("t", free_indexed.then_some(j + 1), u));
            }
        }
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }
}

fn power(base: &str, index: Option<usize>, exp: i64) -> String {
    let name = match index {
        Some(i) => format!("{base}{i}"),
        None => base.to_string(),
    };
    if exp == 1 {
        name
    } else {
        format!("{name}^{exp}")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescription {
    pub full: bool,
    /// Nonzero invariant factors of the relation lattice in `Z^{r+k}`.
    pub ambient_invariants: Vec<i128>,
    /// `|Γ / H|`, or `None` when the index is infinite.
    pub quotient_order: Option<u128>,
}

/// Nonzero diagonal entries of the Smith normal form of the integer matrix
/// whose rows are `rows` (each of length `width`).
pub fn smith_invariants(mut rows: Vec<Vec<i128>>, width: usize) -> Vec<i128> {
    let height = rows.len();
    let mut invariants = Vec::new();
    let mut top = 0;
    for col in 0..width {
        if top >= height {
            break;
        }
        // Pick any nonzero pivot in the remaining block.
        let Some((pr, pc)) = (top..height)
            .flat_map(|i| (col..width).map(move |j| (i, j)))
            .filter(|&(i, j)| rows[i][j] != 0)
            .min_by_key(|&(i, j)| rows[i][j].abs())
        else {
            break;
        };
        rows.swap(top, pr);
        for row in rows.iter_mut() {
            row.swap(col, pc);
        }
        loop {
            let mut clean = true;
            // Clear the column below the pivot.
            for i in top + 1..height {
                if rows[i][col] != 0 {
                    let f = rows[i][col].div_euclid(rows[top][col]);
                    for j in col..width {
                        rows[i][j] -= f * rows[top][j];
                    }
                    if rows[i][col] != 0 {
                        rows.swap(top, i);
                        clean = false;
                    }
                }
            }
            // Clear the row right of the pivot.
            for j in col + 1..width {
                if rows[top][j] != 0 {
                    let f = rows[top][j].div_euclid(rows[top][col]);
                    for row in rows.iter_mut() {
                        let v = row[col];
                        row[j] -= f * v;
                    }
                    if rows[top][j] != 0 {
                        for row in rows.iter_mut() {
                            row.swap(col, j);
                        }
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let p = rows[top][col];
            let offender = (top + 1..height)
                .flat_map(|i| (col + 1..width).map(move |j| (i, j)))
                .find(|&(i, j)| rows[i][j] % p != 0);
            match offender {
                Some((i, _)) => {
                    for j in col..width {
                        let v = rows[i][j];
                        rows[top][j] += v;
                    }
                }
                None => break,
            }
        }
        invariants.push(rows[top][col].abs());
        top += 1;
    }
    invariants
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> GroupSpec {
        GroupSpec::free(2)
    }

    #[test]
    fn rejects_broken_divisibility_chain() {
        assert!(GroupSpec::new(1, vec![2, 3]).is_err());
        assert!(GroupSpec::new(1, vec![1]).is_err());
        assert!(GroupSpec::new(1, vec![2, 4]).is_ok());
    }

    #[test]
    fn torsion_is_reduced() {
        let g = GroupSpec::new(1, vec![3]).unwrap();
        let a = g.element(vec![2], vec![-1]).unwrap();
        assert_eq!(a.torsion_part(), &[2]);
        assert!(g.add(&a, &g.inverse(&a)).is_identity());
        assert_eq!(g.pow(&g.torsion_generator(0), 3), g.identity());
    }

    #[test]
    fn element_shape_is_checked() {
        let g = GroupSpec::free(1);
        assert!(matches!(
            g.element(vec![1, 2], vec![]),
            Err(Error::ElementShape { .. })
        ));
    }

    #[test]
    fn orders() {
        let g = GroupSpec::new(1, vec![2, 6]).unwrap();
        assert_eq!(g.order(&g.identity()), Some(1));
        assert_eq!(g.order(&g.free_generator(0)), None);
        assert_eq!(g.order(&g.element(vec![0], vec![1, 0]).unwrap()), Some(2));
        assert_eq!(g.order(&g.element(vec![0], vec![1, 4]).unwrap()), Some(6));
        assert_eq!(g.order(&g.element(vec![0], vec![0, 3]).unwrap()), Some(2));
    }

    #[test]
    fn generator_of_z_is_full() {
        let g = GroupSpec::free(1);
        assert!(g.subgroup_generated(&[g.free_generator(0)]).full);
    }

    #[test]
    fn t_squared_is_proper_of_index_two() {
        let g = GroupSpec::free(1);
        let d = g.subgroup_generated(&[g.element(vec![2], vec![]).unwrap()]);
        assert!(!d.full);
        assert_eq!(d.quotient_order, Some(2));
    }

    #[test]
    fn skewed_basis_of_z2_is_full() {
        // det [[1,0],[1,1]] = 1
        let g = z2();
        let a = g.element(vec![1, 0], vec![]).unwrap();
        let b = g.element(vec![1, 1], vec![]).unwrap();
        assert!(g.subgroup_generated(&[a, b]).full);
    }

    #[test]
    fn rank_deficient_is_proper_with_infinite_index() {
        let g = z2();
        let a = g.element(vec![1, 1], vec![]).unwrap();
        let b = g.element(vec![2, 2], vec![]).unwrap();
        let d = g.subgroup_generated(&[a, b]);
        assert!(!d.full);
        assert_eq!(d.quotient_order, None);
    }

    #[test]
    fn torsion_generation() {
        let g = GroupSpec::new(1, vec![4]).unwrap();
        let t = g.free_generator(0);
        let s2 = g.element(vec![0], vec![2]).unwrap();
        let d = g.subgroup_generated(&[t.clone(), s2]);
        assert!(!d.full);
        assert_eq!(d.quotient_order, Some(2));
        let ts = g.element(vec![1], vec![1]).unwrap();
        assert!(g.subgroup_generated(&[t, ts]).full);
    }

    #[test]
    fn smith_matches_determinant_oracle() {
        // For square full-rank integer matrices the product of invariant
        // factors equals |det|.
        let m = vec![vec![2i128, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let inv = smith_invariants(m, 3);
        assert_eq!(inv, vec![2, 6, 12]);
    }

    #[test]
    fn rendering() {
        let g = GroupSpec::new(1, vec![2, 2]).unwrap();
        assert_eq!(g.identity().render(), "1");
        assert_eq!(g.element(vec![-2], vec![1, 0]).unwrap().render(), "s1*t^-2");
        let h = GroupSpec::free(2);
        assert_eq!(h.element(vec![1, -1], vec![]).unwrap().render(), "t1*t2^-1");
        assert_eq!(GroupSpec::free(1).free_generator(0).render(), "t");
    }
}
