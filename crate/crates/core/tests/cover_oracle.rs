//! Rooted cycle counts computed inside an explicit ball of the cover, with
//! no voltage bookkeeping, against the exact series and the quotient census.

use std::path::PathBuf;

use num_bigint::BigInt;
use periodic_zeta::oracle::{census, closed_walk_count, rooted_walk_count};
use periodic_zeta::zeta::{log_zeta_series, pl_from_series};
use periodic_zeta::VoltageGraph;

fn load(name: &str) -> VoltageGraph {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    VoltageGraph::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Cyclically non-backtracking closed walks of length `m` at the centre of
/// the ball, in the simple graph spanned by the ball's edges.
fn rooted_in_ball(g: &VoltageGraph, orbit: usize, m: usize) -> u64 {
    let ball = g.cover_ball((orbit, g.group().identity()), m.div_ceil(2));
    let mut adj = vec![Vec::new(); ball.vertices.len()];
    for &(a, b) in &ball.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    fn walk(adj: &[Vec<usize>], path: &mut Vec<usize>, m: usize, count: &mut u64) {
        let here = *path.last().unwrap();
        if path.len() == m + 1 {
            if here == path[0] && path[1] != path[m - 1] {
                *count += 1;
            }
            return;
        }
        for &next in &adj[here] {
            if path.len() >= 2 && next == path[path.len() - 2] {
                continue;
            }
            path.push(next);
            walk(adj, path, m, count);
            path.pop();
        }
    }
    let mut count = 0;
    walk(&adj, &mut vec![0], m, &mut count);
    count
}

fn rooted_in_cover(g: &VoltageGraph, m: usize) -> u64 {
    (0..g.vertex_count()).map(|i| rooted_in_ball(g, i, m)).sum()
}

const GRAPHS: [&str; 7] = [
    "example.json",
    "example-shifted.json",
    "path.json",
    "square.json",
    "honeycomb.json",
    "ladder.json",
    "cylinder-z8.json",
];

#[test]
fn cover_counts_match_series_and_census() {
    for name in GRAPHS {
        let g = load(name);
        let series = log_zeta_series(&g, 9).unwrap();
        let rooted = series.rooted_counts().unwrap();
        let spectrum = census(&g, 9).unwrap();
        for m in 1..=9 {
            let direct = rooted_in_cover(&g, m);
            assert_eq!(BigInt::from(direct), rooted[m], "{name}: N_{m}");
            assert_eq!(direct, spectrum.rooted_count(m), "{name}: N_{m} from census");
            assert_eq!(
                direct,
                rooted_walk_count(&g, m),
                "{name}: N_{m} by quotient walks"
            );
        }
    }
}

#[test]
fn cover_balls_are_regular_inside() {
    for name in GRAPHS {
        let g = load(name);
        for orbit in 0..g.vertex_count() {
            let ball = g.cover_ball((orbit, g.group().identity()), 4);
            for (v, &d) in ball.distance.iter().enumerate() {
                if d < 4 {
                    assert_eq!(
                        ball.degree(v) as u64,
                        g.q() + 1,
                        "{name}: vertex {:?}",
                        ball.vertices[v]
                    );
                }
            }
        }
    }
}

#[test]
fn closed_walks_on_two_steps_count_edges() {
    // every closed 2-walk is a step followed by its reverse
    for name in GRAPHS {
        let g = load(name);
        assert_eq!(
            closed_walk_count(&g, 2),
            g.vertex_count() as u64 * (g.q() + 1),
            "{name}"
        );
    }
}

#[test]
fn frozen_rooted_counts_and_spectra() {
    let cases: [(&str, [u64; 10], [u64; 10]); 5] = [
        (
            "example.json",
            [0, 0, 12, 16, 20, 108, 252, 784, 2172, 5980],
            [0, 0, 4, 4, 4, 16, 36, 96, 240, 596],
        ),
        (
            "square.json",
            [0, 0, 0, 8, 0, 24, 0, 216, 0, 1520],
            [0, 0, 0, 2, 0, 4, 0, 26, 0, 152],
        ),
        (
            "honeycomb.json",
            [0, 0, 0, 0, 0, 12, 0, 0, 0, 60],
            [0, 0, 0, 0, 0, 2, 0, 0, 0, 6],
        ),
        (
            "ladder.json",
            [0, 0, 0, 8, 0, 12, 0, 40, 0, 180],
            [0, 0, 0, 2, 0, 2, 0, 4, 0, 18],
        ),
        (
            "cylinder-z8.json",
            [0, 0, 0, 8, 0, 24, 0, 216, 0, 1520],
            [0, 0, 0, 2, 0, 4, 0, 26, 0, 152],
        ),
    ];
    for (name, n_m, pl) in cases {
        let g = load(name);
        let series = log_zeta_series(&g, 10).unwrap();
        let rooted = series.rooted_counts().unwrap();
        let inverted = pl_from_series(&series).unwrap();
        for m in 1..=10 {
            assert_eq!(rooted[m], BigInt::from(n_m[m - 1]), "{name}: N_{m}");
            assert_eq!(inverted[m], BigInt::from(pl[m - 1]), "{name}: PL({m})");
        }
    }
}
