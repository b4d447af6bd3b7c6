//! Rooted distance graphs and shortest-path oracles.

use thiserror::Error;

use crate::error::{Error as ModelError, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::network::{bfs, Tcsp};
use crate::weight::{w_add, Weight};

/// Complete weighted digraph over `X0..Xn`; `+inf` marks an absent edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedDistanceGraph {
    size: usize,
    w: Vec<Weight>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("negative circuit through X{vertex}")]
pub struct NegativeCircuit {
    pub vertex: usize,
}

impl RootedDistanceGraph {
    /// Graph over `X0..Xn` with no edges.
    pub fn new(n: usize) -> Self {
        let size = n + 1;
        let mut w = vec![Weight::PosInf; size * size];
        for i in 0..size {
            w[i * size + i] = Weight::zero();
        }
        RootedDistanceGraph { size, w }
    }

    pub fn n(&self) -> usize {
        self.size - 1
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weight(&self, i: usize, j: usize) -> &Weight {
        &self.w[i * self.size + j]
    }

    pub fn set_weight(&mut self, i: usize, j: usize, w: Weight) {
        assert!(i != j, "diagonal weights are fixed to 0");
        self.w[i * self.size + j] = w;
    }

    /// Relabels vertices so that `a` and `b` trade places.
    pub fn swap_vertices(&self, a: usize, b: usize) -> Self {
        let map = |v: usize| {
            if v == a {
                b
            } else if v == b {
                a
            } else {
                v
            }
        };
        let mut out = self.clone();
        for i in 0..self.size {
            for j in 0..self.size {
                out.w[map(i) * self.size + map(j)] = self.weight(i, j).clone();
            }
        }
        out
    }

    /// Vertices reachable from `from` over finite-weight edges.
    pub fn reachable_from(&self, from: usize) -> Vec<bool> {
        bfs(self.size, |u, v| self.weight(u, v).is_finite(), from)
    }

    /// Vertices from which `to` is reachable over finite-weight edges.
    pub fn reaching(&self, to: usize) -> Vec<bool> {
        bfs(self.size, |u, v| self.weight(v, u).is_finite(), to)
    }
}

/// Distance graph of an STP.
pub fn stp_to_graph(p: &Tcsp) -> Result<RootedDistanceGraph> {
    let mut g = RootedDistanceGraph::new(p.n());
    for i in 0..p.size() {
        for j in i + 1..p.size() {
            let label = p.entry(i, j);
            match label.parts() {
                // an empty label becomes the 0~ circuit, which maps back to [0,0)
                [] => {
                    g.set_weight(i, j, Weight::strict(0));
                    g.set_weight(j, i, Weight::zero());
                }
                [part] => {
                    g.set_weight(i, j, Weight::from_upper(part.hi()));
                    g.set_weight(j, i, Weight::from_lower(part.lo()));
                }
                _ => return Err(ModelError::NotAnStp { i, j }),
            }
        }
    }
    Ok(g)
}

/// STP of a rooted distance graph. Pairs with two infinite weights stay
/// unconstrained.
pub fn graph_to_stp(g: &RootedDistanceGraph) -> Tcsp {
    let mut p = Tcsp::new(g.n());
    for i in 0..g.size() {
        for j in i + 1..g.size() {
            let l1 = g.weight(i, j);
            let l2 = g.weight(j, i);
            if !l1.is_finite() && !l2.is_finite() {
                continue;
            }
            let label = Interval::new(l2.to_lower(), l1.to_upper()).map(IntervalUnion::single).unwrap_or_default();
            p.set_constraint(i, j, label);
        }
    }
    p
}

/// All-pairs shortest paths. Stops at the first vertex whose distance to
/// itself drops below 0.
pub fn floyd_warshall(g: &RootedDistanceGraph) -> Result<RootedDistanceGraph, NegativeCircuit> {
    let size = g.size;
    let mut d = g.clone();
    for k in 0..size {
        for i in 0..size {
            let dik = d.w[i * size + k].clone();
            if !dik.is_finite() {
                continue;
            }
            for j in 0..size {
                let via = w_add(&dik, &d.w[k * size + j]);
                if via < d.w[i * size + j] {
                    if i == j {
                        return Err(NegativeCircuit { vertex: i });
                    }
                    d.w[i * size + j] = via;
                }
            }
        }
    }
    Ok(d)
}

/// One-to-all shortest paths from `source`.
pub fn bellman_ford(g: &RootedDistanceGraph, source: usize) -> Result<Vec<Weight>, NegativeCircuit> {
    let size = g.size;
    let mut dist = vec![Weight::PosInf; size];
    dist[source] = Weight::zero();
    for _ in 0..size {
        let mut changed = false;
        for u in 0..size {
            if !dist[u].is_finite() {
                continue;
            }
            for v in 0..size {
                if u == v {
                    continue;
                }
                let via = w_add(&dist[u], g.weight(u, v));
                if via < dist[v] {
                    dist[v] = via;
                    changed = true;
                }
            }
        }
        if !changed {
            return zero_circuit(g, &dist).map_or(Ok(dist), Err);
        }
    }
    // still relaxing after |V| rounds
    let vertex = (0..size)
        .find(|&v| (0..size).any(|u| u != v && dist[u].is_finite() && w_add(&dist[u], g.weight(u, v)) < dist[v]))
        .unwrap_or(source);
    Err(NegativeCircuit { vertex })
}

/// Relaxation settles even in the presence of a circuit of weight 0~, as
/// repeating it only keeps a bound strict. Such a circuit is made of edges
/// that are tight in value and holds at least one strict edge.
fn zero_circuit(g: &RootedDistanceGraph, dist: &[Weight]) -> Option<NegativeCircuit> {
    let tight = |u: usize, v: usize| {
        u != v && dist[u].is_finite() && {
            let via = w_add(&dist[u], g.weight(u, v));
            via.is_finite() && via.value() == dist[v].value()
        }
    };
    (0..g.size)
        .flat_map(|u| (0..g.size).map(move |v| (u, v)))
        .find(|&(u, v)| tight(u, v) && g.weight(u, v).is_strict() && bfs(g.size, tight, v)[u])
        .map(|(u, _)| NegativeCircuit { vertex: u })
}

/// True iff a finite-weight path leads from `from` to `to`.
pub fn reachable(g: &RootedDistanceGraph, from: usize, to: usize) -> bool {
    g.reachable_from(from)[to]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_tcsp;

    fn u(s: &str) -> IntervalUnion {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    fn chain() -> Tcsp {
        build_tcsp(
            4,
            [
                (0, 1, u("[10,20]")),
                (0, 4, u("[60,70]")),
                (1, 2, u("[30,40]")),
                (2, 3, u("[-20,-10]")),
                (3, 4, u("[40,50]")),
            ],
        )
        .unwrap()
    }

    fn divergent() -> Tcsp {
        build_tcsp(
            4,
            [
                (0, 1, u("[10,20]")),
                (1, 2, u("[30,+inf)")),
                (2, 3, u("[-20,-10]")),
                (2, 4, u("(-inf,4]")),
                (3, 4, u("[40,50]")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn edge_weights_from_labels() {
        let g = stp_to_graph(&chain()).unwrap();
        assert_eq!(g.weight(0, 1), &w("20"));
        assert_eq!(g.weight(1, 0), &w("-10"));
        let g = stp_to_graph(&divergent()).unwrap();
        assert_eq!(g.weight(1, 2), &Weight::PosInf);
        assert_eq!(g.weight(2, 1), &w("-30"));
        let g = stp_to_graph(&build_tcsp(2, [(1, 2, u("[3,8)"))]).unwrap()).unwrap();
        assert_eq!(g.weight(1, 2), &w("8~"));
        assert_eq!(g.weight(2, 1), &w("-3"));
        assert_eq!(g.weight(0, 2), &Weight::PosInf);
    }

    #[test]
    fn non_convex_label_is_rejected() {
        let p = build_tcsp(1, [(0, 1, u("[0,1] u [2,3]"))]).unwrap();
        assert_eq!(stp_to_graph(&p), Err(ModelError::NotAnStp { i: 0, j: 1 }));
    }

    #[test]
    fn table_m_cells() {
        let cases = [
            ("6", "-2~", "(2,6]"),
            ("+inf", "5", "[-5,+inf)"),
            ("4~", "+inf", "(-inf,4)"),
            ("4", "+inf", "(-inf,4]"),
            ("+inf", "5~", "(-5,+inf)"),
            ("6~", "-2", "[2,6)"),
            ("6~", "-2~", "(2,6)"),
            ("6", "-2", "[2,6]"),
            ("1", "-1", "{1}"),
            ("1", "-2", "{}"),
        ];
        for (l1, l2, expected) in cases {
            let mut g = RootedDistanceGraph::new(1);
            g.set_weight(0, 1, w(l1));
            g.set_weight(1, 0, w(l2));
            assert_eq!(graph_to_stp(&g).entry(0, 1).to_string(), expected, "cell ({l1}, {l2})");
        }
    }

    #[test]
    fn round_trip_of_reference_network() {
        let p = divergent();
        assert_eq!(graph_to_stp(&stp_to_graph(&p).unwrap()), p);
    }

    #[test]
    fn shortest_paths_of_chain() {
        let g = stp_to_graph(&chain()).unwrap();
        let d = floyd_warshall(&g).unwrap();
        assert_eq!(d.weight(0, 2), &w("50"));
        assert_eq!(d.weight(2, 0), &w("-40"));
        let row: Vec<String> = bellman_ford(&g, 0).unwrap()[1..].iter().map(|x| x.to_string()).collect();
        assert_eq!(row, ["20", "50", "30", "70"]);
    }

    #[test]
    fn negative_circuits() {
        let g = stp_to_graph(&divergent()).unwrap();
        assert!(floyd_warshall(&g).is_err());
        assert!(bellman_ford(&g, 2).is_err());
        let mut strict = RootedDistanceGraph::new(1);
        strict.set_weight(0, 1, w("3~"));
        strict.set_weight(1, 0, w("-3"));
        assert!(floyd_warshall(&strict).is_err());
        assert!(bellman_ford(&strict, 0).is_err() && bellman_ford(&strict, 1).is_err());
        let trivial = RootedDistanceGraph::new(0);
        assert_eq!(floyd_warshall(&trivial).unwrap(), trivial);
    }

    #[test]
    fn edgeless_graph_distances() {
        let dist = bellman_ford(&RootedDistanceGraph::new(3), 1).unwrap();
        assert_eq!(dist, vec![Weight::PosInf, Weight::zero(), Weight::PosInf, Weight::PosInf]);
    }

    #[test]
    fn reachability() {
        let g = stp_to_graph(&divergent()).unwrap();
        assert!(!reachable(&g, 0, 2));
        assert!(reachable(&g, 2, 0));
        assert!(reachable(&g, 3, 3));
    }

    #[test]
    fn swapping_the_root() {
        let g = stp_to_graph(&chain()).unwrap();
        let s = g.swap_vertices(0, 2);
        assert_eq!(s.weight(2, 0), g.weight(0, 2));
        assert_eq!(s.weight(0, 1), g.weight(2, 1));
        assert_eq!(s.swap_vertices(0, 2), g);
    }
}
