//! Deterministic generators for the named network constructions.
//!
//! Every generator is a total function of its parameters: identical inputs
//! produce identical arc sets, byte-for-byte in serialized form. The
//! complementary families are built the way they are specified: start from
//! the complete graph and remove two in-arcs per node, which keeps every
//! in-degree at the odd value `n - 2` and rules out tie cases.

use crate::config::MAX_NODES;
use crate::error::{MbanError, Result};
use crate::graph::Digraph;

/// The seven named constructions, keyed by their stable CLI identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `complete`: every ordered pair is an arc, self-loops included.
    Complete,
    /// `cycle`: the rotation network; the negative control, not a solver.
    DirectedCycle,
    /// `generated`: an arbitrary inner graph plus n+1 omniscient nodes.
    Generated,
    /// `complete-cycle`: node 0 sees everyone, the rest form a path.
    CompleteCycle,
    /// `left-right`: complete minus two in-arcs per node, left/right pattern.
    ComplementaryLeftRight,
    /// `circle-triangle`: complete minus a cycle, most self-loops, and a
    /// 0-2 pair.
    ComplementaryCircleTriangle,
    /// `two-cycles`: a long cycle and a dense cluster sharing a cross point.
    TwoIntersectingCycles,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Complete,
        FamilyKind::DirectedCycle,
        FamilyKind::Generated,
        FamilyKind::CompleteCycle,
        FamilyKind::ComplementaryLeftRight,
        FamilyKind::ComplementaryCircleTriangle,
        FamilyKind::TwoIntersectingCycles,
    ];

    /// Stable CLI identifier.
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Complete => "complete",
            FamilyKind::DirectedCycle => "cycle",
            FamilyKind::Generated => "generated",
            FamilyKind::CompleteCycle => "complete-cycle",
            FamilyKind::ComplementaryLeftRight => "left-right",
            FamilyKind::ComplementaryCircleTriangle => "circle-triangle",
            FamilyKind::TwoIntersectingCycles => "two-cycles",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| MbanError::Parameter(format!("unknown family {name:?}")))
    }
}

/// A fully resolved request for one family instance.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Node count of the generated network. For [`FamilyKind::Generated`]
    /// this is derived from the inner graph as `2 * inner.n() + 1`.
    pub n: usize,
    /// Cross point for [`FamilyKind::TwoIntersectingCycles`]; defaults to
    /// the smallest legal value `ceil(n/2)`.
    pub cross_point: Option<usize>,
    /// Inner graph for [`FamilyKind::Generated`].
    pub inner: Option<Digraph>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize) -> Self {
        Self {
            kind,
            n,
            cross_point: None,
            inner: None,
        }
    }

    /// Validates the family preconditions and builds the graph. All kinds
    /// require odd `n` (the classification task is undefined otherwise);
    /// the three complementary kinds additionally require `n >= 7`, the
    /// others `n >= 3`.
    pub fn build(&self) -> Result<Digraph> {
        if let FamilyKind::Generated = self.kind {
            let inner = self.inner.as_ref().ok_or_else(|| {
                MbanError::Parameter("family `generated` requires an inner graph".into())
            })?;
            let expected = 2 * inner.n() + 1;
            if self.n != expected {
                return Err(MbanError::Parameter(format!(
                    "family `generated` with a {}-node inner graph has {expected} nodes, not {}",
                    inner.n(),
                    self.n
                )));
            }
            return generated(inner);
        }
        let n = self.n;
        if n % 2 == 0 {
            return Err(MbanError::Parameter(format!(
                "family `{}` requires odd n, got {n}",
                self.kind.name()
            )));
        }
        match self.kind {
            FamilyKind::Complete | FamilyKind::DirectedCycle | FamilyKind::CompleteCycle => {
                if n < 3 {
                    return Err(MbanError::Parameter(format!(
                        "family `{}` requires n >= 3, got {n}",
                        self.kind.name()
                    )));
                }
            }
            _ => {
                if n < 7 {
                    return Err(MbanError::Parameter(format!(
                        "family `{}` requires n >= 7, got {n}",
                        self.kind.name()
                    )));
                }
            }
        }
        match self.kind {
            FamilyKind::Complete => complete(n),
            FamilyKind::DirectedCycle => directed_cycle(n),
            FamilyKind::CompleteCycle => complete_cycle(n),
            FamilyKind::ComplementaryLeftRight => complementary_left_right(n),
            FamilyKind::ComplementaryCircleTriangle => complementary_circle_triangle(n),
            FamilyKind::TwoIntersectingCycles => {
                let c = self.cross_point.unwrap_or(n.div_ceil(2));
                two_intersecting_cycles(n, c)
            }
            FamilyKind::Generated => unreachable!("handled above"),
        }
    }
}

/// Complete digraph `K_n`: all `n^2` ordered pairs, self-loops included.
pub fn complete(n: usize) -> Result<Digraph> {
    if n < 1 {
        return Err(MbanError::Parameter("complete requires n >= 1".into()));
    }
    let mut g = Digraph::new(n)?;
    for u in 0..n {
        for v in 0..n {
            g.add_arc(u, v)?;
        }
    }
    Ok(g)
}

/// Directed cycle `C_n` with arcs `(i, i+1 mod n)`; every in-degree is 1,
/// so every local function is the identity and the network only rotates.
pub fn directed_cycle(n: usize) -> Result<Digraph> {
    if n < 2 {
        return Err(MbanError::Parameter("cycle requires n >= 2".into()));
    }
    let mut g = Digraph::new(n)?;
    for i in 0..n {
        g.add_arc(i, (i + 1) % n)?;
    }
    Ok(g)
}

/// Embeds `inner` into a network of `2n + 1` nodes by adding `n + 1` new
/// omniscient nodes: each new node has the full vertex set (itself and the
/// other new nodes included) as both in- and out-neighborhood, so after one
/// step every new node carries the global majority and after two steps the
/// inner nodes copy it.
pub fn generated(inner: &Digraph) -> Result<Digraph> {
    let n = inner.n();
    let total = 2 * n + 1;
    if total > MAX_NODES {
        return Err(MbanError::TooLarge {
            what: "generated family",
            n: total,
            max: MAX_NODES,
            detail: format!("inner graph of {n} nodes expands to {total}"),
        });
    }
    let mut g = Digraph::new(total)?;
    for (u, v) in inner.arcs() {
        g.add_arc(u, v)?;
    }
    for s in n..total {
        for w in 0..total {
            g.add_arc(w, s)?;
            g.add_arc(s, w)?;
        }
    }
    Ok(g)
}

/// Node 0 takes everyone (self-loop included) as input; node `k >= 1` takes
/// only `k - 1`. Arc count `2n - 1`.
pub fn complete_cycle(n: usize) -> Result<Digraph> {
    if n < 3 || n % 2 == 0 {
        return Err(MbanError::Parameter(format!(
            "complete-cycle requires odd n >= 3, got {n}"
        )));
    }
    let mut g = Digraph::new(n)?;
    for i in 0..n {
        g.add_arc(i, (i + 1) % n)?;
        g.add_arc(i, 0)?;
    }
    Ok(g)
}

/// Complete graph minus two in-arcs per node. The removal pattern pairs the
/// left block `U = (0, 2, .., floor(n/2)-1)` with consecutive elements of
/// `S = (0, .., floor(n/2)-2)` and the right block `R = (1, floor(n/2), ..,
/// n-1)` with consecutive elements of `T = (floor(n/2)-1, .., n-1)`. Every
/// in-degree ends up at the odd value `n - 2`.
pub fn complementary_left_right(n: usize) -> Result<Digraph> {
    if n < 7 || n % 2 == 0 {
        return Err(MbanError::Parameter(format!(
            "left-right requires odd n >= 7, got {n}"
        )));
    }
    let half = n / 2;
    let u_seq: Vec<usize> = std::iter::once(0).chain(2..half).collect();
    let r_seq: Vec<usize> = std::iter::once(1).chain(half..n).collect();
    let s_seq: Vec<usize> = (0..half - 1).collect();
    let t_seq: Vec<usize> = (half - 1..n).collect();
    debug_assert_eq!(u_seq.len(), s_seq.len());
    debug_assert_eq!(r_seq.len(), t_seq.len());

    let mut g = complete(n)?;
    let s_len = s_seq.len();
    for (i, &u) in u_seq.iter().enumerate() {
        g.remove_arc(s_seq[(i + 1) % s_len], u)?;
        g.remove_arc(s_seq[(i + 2) % s_len], u)?;
    }
    let t_len = t_seq.len() as isize;
    for (i, &r) in r_seq.iter().enumerate() {
        let i = i as isize;
        g.remove_arc(t_seq[(i - 1).rem_euclid(t_len) as usize], r)?;
        g.remove_arc(t_seq[(i - 2).rem_euclid(t_len) as usize], r)?;
    }
    Ok(g)
}

/// Complete graph minus the rotation cycle, minus every self-loop except at
/// 0 and 2, minus the pair `(0,2)`/`(2,0)`. Every in-degree is `n - 2`.
pub fn complementary_circle_triangle(n: usize) -> Result<Digraph> {
    if n < 7 || n % 2 == 0 {
        return Err(MbanError::Parameter(format!(
            "circle-triangle requires odd n >= 7, got {n}"
        )));
    }
    let mut g = complete(n)?;
    for i in 0..n {
        g.remove_arc(i, (i + 1) % n)?;
        if i != 0 && i != 2 {
            g.remove_arc(i, i)?;
        }
    }
    g.remove_arc(0, 2)?;
    g.remove_arc(2, 0)?;
    Ok(g)
}

/// A path `0 -> 1 -> .. -> floor(n/2)` and a dense upper block
/// `{ceil(n/2), .., n-1}` of in-degree `n - 2`, intersecting at the cross
/// point `c` which closes the long cycle through the arc `(c, 0)`.
pub fn two_intersecting_cycles(n: usize, c: usize) -> Result<Digraph> {
    if n < 7 || n % 2 == 0 {
        return Err(MbanError::Parameter(format!(
            "two-cycles requires odd n >= 7, got {n}"
        )));
    }
    let half = n / 2;
    let upper = n.div_ceil(2);
    if !(upper..=n - 2).contains(&c) {
        return Err(MbanError::Parameter(format!(
            "cross point {c} out of range {upper}..={} for n={n}",
            n - 2
        )));
    }
    let mut g = Digraph::new(n)?;
    for i in 0..half {
        g.add_arc(i, i + 1)?;
    }
    for i in 1..n {
        for j in upper..n {
            g.add_arc(i, j)?;
        }
    }
    for i in upper..n - 1 {
        g.remove_arc(i - half, i)?;
    }
    g.remove_arc(c, n - 1)?;
    g.add_arc(c, 0)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn in_set(g: &Digraph, v: usize) -> Vec<usize> {
        g.in_neighbors(v).collect()
    }

    #[test]
    fn complete_examples() {
        let g = complete(3).unwrap();
        assert_eq!(g.arc_count(), 9);
        assert!((0..3).all(|v| g.in_degree(v) == 3));
        assert_eq!(complete(1).unwrap().arcs(), vec![(0, 0)]);
        let g7 = complete(7).unwrap();
        assert!((0..7).all(|v| g7.in_degree(v) == 7));
        assert!(complete(0).is_err());
    }

    #[test]
    fn directed_cycle_examples() {
        let g = directed_cycle(3).unwrap();
        assert_eq!(g.arcs(), vec![(0, 1), (1, 2), (2, 0)]);
        let g5 = directed_cycle(5).unwrap();
        assert_eq!(g5.arc_count(), 5);
        assert!((0..5).all(|v| g5.in_degree(v) == 1));
    }

    #[test]
    fn generated_from_fig1_inner() {
        // Two-node inner graph with arcs (0,1), (1,0), (0,0).
        let mut inner = Digraph::new(2).unwrap();
        inner.add_arc(0, 1).unwrap();
        inner.add_arc(1, 0).unwrap();
        inner.add_arc(0, 0).unwrap();
        let g = generated(&inner).unwrap();
        assert_eq!(g.n(), 5);
        for s in 2..5 {
            assert_eq!(g.in_degree(s), 5);
        }
        assert_eq!(g.in_degree(0), 2 + 3);
        assert_eq!(g.in_degree(1), 1 + 3);
    }

    #[test]
    fn generated_from_single_node() {
        let inner = Digraph::new(1).unwrap();
        let g = generated(&inner).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.in_degree(0), 2);
        assert_eq!(g.in_degree(1), 3);
        assert_eq!(g.in_degree(2), 3);
    }

    #[test]
    fn complete_cycle_examples() {
        let g = complete_cycle(7).unwrap();
        assert_eq!(g.in_degree(0), 7);
        assert!((1..7).all(|v| g.in_degree(v) == 1));
        assert_eq!(g.arc_count(), 13);

        let g3 = complete_cycle(3).unwrap();
        assert_eq!(g3.arcs(), vec![(0, 0), (0, 1), (1, 0), (1, 2), (2, 0)]);
        assert!(complete_cycle(4).is_err());
    }

    #[test]
    fn left_right_neighborhoods_n7() {
        let g = complementary_left_right(7).unwrap();
        assert_eq!(in_set(&g, 0), vec![2, 3, 4, 5, 6]);
        assert_eq!(in_set(&g, 1), vec![0, 1, 2, 3, 4]);
        assert_eq!(in_set(&g, 3), vec![0, 1, 3, 4, 5]);
        assert!((0..7).all(|v| g.in_degree(v) == 5));
        assert_eq!(g.arc_count(), 35);
    }

    #[test]
    fn left_right_degree_law() {
        for n in [7usize, 9, 11, 13] {
            let g = complementary_left_right(n).unwrap();
            assert!((0..n).all(|v| g.in_degree(v) == n - 2), "n={n}");
        }
        assert!(complementary_left_right(6).is_err());
        assert!(complementary_left_right(5).is_err());
    }

    #[test]
    fn circle_triangle_neighborhoods() {
        let g = complementary_circle_triangle(7).unwrap();
        assert_eq!(in_set(&g, 0), vec![0, 1, 3, 4, 5]);
        assert_eq!(in_set(&g, 1), vec![2, 3, 4, 5, 6]);
        assert_eq!(in_set(&g, 2), vec![2, 3, 4, 5, 6]);
        let g9 = complementary_circle_triangle(9).unwrap();
        assert_eq!(in_set(&g9, 5), vec![0, 1, 2, 3, 6, 7, 8]);
        for n in [7usize, 9, 11] {
            let g = complementary_circle_triangle(n).unwrap();
            assert!((0..n).all(|v| g.in_degree(v) == n - 2), "n={n}");
        }
        assert!(complementary_circle_triangle(8).is_err());
    }

    #[test]
    fn two_cycles_neighborhoods_n7() {
        let g = two_intersecting_cycles(7, 4).unwrap();
        assert_eq!(in_set(&g, 5), vec![1, 3, 4, 5, 6]);
        assert_eq!(in_set(&g, 6), vec![1, 2, 3, 5, 6]);
        assert_eq!(in_set(&g, 0), vec![4]);
        assert_eq!(in_set(&g, 1), vec![0]);
    }

    #[test]
    fn two_cycles_degree_split() {
        for n in [7usize, 9, 11] {
            for c in n.div_ceil(2)..=n - 2 {
                let g = two_intersecting_cycles(n, c).unwrap();
                for v in 0..n {
                    let d = g.in_degree(v);
                    assert!(d == 1 || d == n - 2, "n={n} c={c} v={v} d={d}");
                }
                let m = g.metrics();
                assert_eq!(m.distinct_in_degrees, 2);
                assert!(m.non_omniscient);
            }
        }
        assert!(two_intersecting_cycles(7, 3).is_err());
        assert!(two_intersecting_cycles(7, 6).is_err());
    }

    #[test]
    fn odd_degree_guarantee() {
        for n in [7usize, 9, 11, 13] {
            let graphs = vec![
                complete(n).unwrap(),
                complete_cycle(n).unwrap(),
                complementary_left_right(n).unwrap(),
                complementary_circle_triangle(n).unwrap(),
                two_intersecting_cycles(n, n.div_ceil(2)).unwrap(),
            ];
            for g in graphs {
                assert!((0..n).all(|v| g.in_degree(v) % 2 == 1), "n={n}");
            }
        }
    }

    #[test]
    fn spec_builds_with_defaults() {
        let mut spec = FamilySpec::new(FamilyKind::TwoIntersectingCycles, 7);
        let g = spec.build().unwrap();
        // Default cross point is ceil(n/2) = 4, which feeds node 0.
        assert_eq!(in_set(&g, 0), vec![4]);
        spec.cross_point = Some(5);
        assert_eq!(in_set(&spec.build().unwrap(), 0), vec![5]);
    }

    #[test]
    fn spec_rejects_even_sizes() {
        for kind in FamilyKind::ALL {
            if kind == FamilyKind::Generated {
                continue;
            }
            let spec = FamilySpec::new(kind, 6);
            assert!(spec.build().is_err(), "{}", kind.name());
        }
    }

    #[test]
    fn spec_generated_requires_inner() {
        let spec = FamilySpec::new(FamilyKind::Generated, 5);
        assert!(spec.build().is_err());
        let mut spec = FamilySpec::new(FamilyKind::Generated, 5);
        spec.inner = Some(Digraph::new(2).unwrap());
        assert_eq!(spec.build().unwrap().n(), 5);
        let mut bad = FamilySpec::new(FamilyKind::Generated, 7);
        bad.inner = Some(Digraph::new(2).unwrap());
        assert!(bad.build().is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for kind in FamilyKind::ALL {
            assert_eq!(FamilyKind::from_name(kind.name()).unwrap(), kind);
        }
        assert!(FamilyKind::from_name("nope").is_err());
    }
}
