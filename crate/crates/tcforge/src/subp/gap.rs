use crate::kernel::{get_cell, set_cell, BitSet, Table2D};

use super::SubpError;

/// Reachability table of the layered path algorithm: row k holds every
/// vertex reachable from vertex 0 by a path of length at most k. Rows run
/// k = 0..a, so the last row settles all paths. Edges are pair codes:
/// cell (j, i) of `e` means an edge from j to i.
pub fn gap_array(a: u64, e: &BitSet) -> Table2D {
    let mut z = Table2D::new();
    if a == 0 {
        return z;
    }
    set_cell(&mut z, 0, 0);
    for k in 0..a - 1 {
        for i in 0..a {
            let reached = get_cell(&z, k, i)
                || (0..a).any(|j| get_cell(e, j, i) && get_cell(&z, k, j));
            if reached {
                set_cell(&mut z, k + 1, i);
            }
        }
    }
    z
}

/// Whether the target vertex is reachable from vertex 0. Paths of length
/// a-1 suffice in a graph of a vertices.
pub fn gap_reach(a: u64, e: &BitSet, target: u64) -> Result<bool, SubpError> {
    if target >= a {
        return Err(SubpError::BadVertex { target, count: a });
    }
    Ok(get_cell(&gap_array(a, e), a - 1, target))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("digraph text must look like \"a=5; 0->1; 1->2;\": {0}")]
pub struct ParseGraphError(pub String);

/// Parses edge-list text: a vertex count, then semicolon-separated edges.
pub fn parse_digraph(s: &str) -> Result<(u64, BitSet), ParseGraphError> {
    let mut parts = s.split(';').map(str::trim);
    let head = parts.next().unwrap_or("");
    let a: u64 = head
        .strip_prefix("a=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| ParseGraphError(format!("bad vertex count {:?}", head)))?;
    let mut e = BitSet::new();
    for part in parts {
        if part.is_empty() {
            continue;
        }
        let (j, i) = part
            .split_once("->")
            .ok_or_else(|| ParseGraphError(format!("bad edge {:?}", part)))?;
        let j: u64 = j
            .trim()
            .parse()
            .map_err(|_| ParseGraphError(format!("bad edge {:?}", part)))?;
        let i: u64 = i
            .trim()
            .parse()
            .map_err(|_| ParseGraphError(format!("bad edge {:?}", part)))?;
        if j >= a || i >= a {
            return Err(ParseGraphError(format!(
                "edge {}->{} is out of range for {} vertices",
                j, i, a
            )));
        }
        set_cell(&mut e, j, i);
    }
    Ok((a, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{row, seeded_rng};
    use rand::Rng;

    fn edges(a: u64, list: &[(u64, u64)]) -> BitSet {
        let mut e = BitSet::new();
        for &(j, i) in list {
            assert!(j < a && i < a);
            set_cell(&mut e, j, i);
        }
        e
    }

    /// Vertices within the given distance of vertex 0, by plain search.
    fn bfs_ball(a: u64, e: &BitSet, radius: u64) -> BitSet {
        let mut ball = BitSet::new();
        if a == 0 {
            return ball;
        }
        ball.insert(0);
        for _ in 0..radius {
            let mut next = ball.clone();
            for j in ball.iter() {
                for i in 0..a {
                    if get_cell(e, j, i) {
                        next.insert(i);
                    }
                }
            }
            ball = next;
        }
        ball
    }

    #[test]
    fn pinned_tables() {
        let e = edges(3, &[(0, 1), (1, 2)]);
        let z = gap_array(3, &e);
        assert_eq!(row(0, &z), BitSet::from_indices([0]));
        assert_eq!(row(1, &z), BitSet::from_indices([0, 1]));
        assert_eq!(row(2, &z), BitSet::from_indices([0, 1, 2]));

        let z = gap_array(2, &BitSet::new());
        assert_eq!(row(0, &z), BitSet::from_indices([0]));
        assert_eq!(row(1, &z), BitSet::from_indices([0]));

        let z = gap_array(3, &edges(3, &[(1, 2)]));
        for k in 0..3 {
            assert_eq!(row(k, &z), BitSet::from_indices([0]));
        }
    }

    #[test]
    fn reachability_queries() {
        let chain = edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(gap_reach(4, &chain, 3).unwrap());
        assert!(gap_reach(4, &chain, 0).unwrap());
        let split = edges(4, &[(0, 1), (2, 3)]);
        assert!(!gap_reach(4, &split, 3).unwrap());
        assert_eq!(
            gap_reach(4, &split, 9),
            Err(SubpError::BadVertex { target: 9, count: 4 })
        );
        assert_eq!(
            gap_reach(0, &BitSet::new(), 0),
            Err(SubpError::BadVertex { target: 0, count: 0 })
        );
    }

    #[test]
    fn rows_match_search_balls_and_grow_monotonically() {
        let mut rng = seeded_rng(41);
        for _ in 0..60 {
            let a = rng.gen_range(1..12u64);
            let mut e = BitSet::new();
            for _ in 0..rng.gen_range(0..2 * a) {
                set_cell(&mut e, rng.gen_range(0..a), rng.gen_range(0..a));
            }
            let z = gap_array(a, &e);
            let mut prev = BitSet::new();
            for k in 0..a {
                let r = row(k, &z);
                assert_eq!(r, bfs_ball(a, &e, k), "a={} k={} e={}", a, e, k);
                assert_eq!(prev.union(&r), r, "rows must grow");
                prev = r;
            }
        }
    }

    #[test]
    fn last_row_is_a_fixed_point() {
        let mut rng = seeded_rng(42);
        for _ in 0..40 {
            let a = rng.gen_range(1..10u64);
            let mut e = BitSet::new();
            for _ in 0..rng.gen_range(0..2 * a) {
                set_cell(&mut e, rng.gen_range(0..a), rng.gen_range(0..a));
            }
            let settled = row(a - 1, &gap_array(a, &e));
            let one_more = bfs_ball(a, &e, a);
            assert_eq!(settled, one_more);
        }
    }

    #[test]
    fn digraph_text_form() {
        let (a, e) = parse_digraph("a=5; 0->1; 1->2;").unwrap();
        assert_eq!(a, 5);
        assert_eq!(e, edges(5, &[(0, 1), (1, 2)]));
        let (a, e) = parse_digraph("a=2").unwrap();
        assert_eq!((a, e), (2, BitSet::new()));
        assert!(parse_digraph("5; 0->1").is_err());
        assert!(parse_digraph("a=2; 0->7").is_err());
        assert!(parse_digraph("a=2; 0-1").is_err());
    }
}
