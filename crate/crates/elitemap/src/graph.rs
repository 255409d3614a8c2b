//! Directed graph representation and the structural statistics the rest of
//! the pipeline consumes.
//!
//! Node identity is the exact label string (no case folding). Graphs are
//! immutable after construction and safe to share across threads; node order
//! is the insertion order of first appearance, so identical input always
//! produces an identical graph.

use std::collections::HashMap;
use std::io;
use std::path::Path;

use thiserror::Error;

/// Errors from graph construction, I/O, and queries.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("row {row}: {problem}")]
    Malformed { row: usize, problem: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("{0}")]
    Domain(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

/// A directed graph over string-labelled nodes.
///
/// No self-loops, no duplicate edges. Edges are stored sorted by
/// `(source, target)` index so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

/// Outcome of building a graph from raw edge rows.
#[derive(Debug, Clone)]
pub struct EdgeListBuild {
    pub graph: DirectedGraph,
    /// Self-loop rows dropped during construction.
    pub self_loops_dropped: usize,
    /// Duplicate edge rows dropped during construction.
    pub duplicates_dropped: usize,
}

impl DirectedGraph {
    /// Build from `(follower, followed)` rows; nodes appear in first-seen order.
    pub fn from_edge_list<S: AsRef<str>>(rows: &[(S, S)]) -> Result<EdgeListBuild, GraphError> {
        Self::from_edge_list_with_nodes(std::iter::empty::<&str>(), rows)
    }

    /// Build over a predefined node set plus `(follower, followed)` rows.
    ///
    /// `seed_nodes` are inserted first (in the given order) so that nodes
    /// without any edge — which a plain edge list cannot express — still end
    /// up in the graph. Endpoints not in `seed_nodes` are appended.
    pub fn from_edge_list_with_nodes<N, S>(
        seed_nodes: N,
        rows: &[(S, S)],
    ) -> Result<EdgeListBuild, GraphError>
    where
        N: IntoIterator,
        N::Item: AsRef<str>,
        S: AsRef<str>,
    {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |label: &str, row: usize| -> Result<usize, GraphError> {
            if label.is_empty() {
                return Err(GraphError::Malformed {
                    row,
                    problem: "empty node label".into(),
                });
            }
            Ok(*index.entry(label.to_string()).or_insert_with(|| {
                labels.push(label.to_string());
                labels.len() - 1
            }))
        };

        for (row, label) in seed_nodes.into_iter().enumerate() {
            intern(label.as_ref(), row + 1)?;
        }

        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::new();
        let mut self_loops = 0usize;
        let mut duplicates = 0usize;
        for (row, (from, to)) in rows.iter().enumerate() {
            let i = intern(from.as_ref(), row + 1)?;
            let j = intern(to.as_ref(), row + 1)?;
            if i == j {
                self_loops += 1;
            } else if seen.insert((i, j)) {
                edges.push((i, j));
            } else {
                duplicates += 1;
            }
        }
        edges.sort_unstable();

        let n = labels.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(i, j) in &edges {
            out_adj[i].push(j);
            in_adj[j].push(i);
        }
        for a in in_adj.iter_mut() {
            a.sort_unstable();
        }

        Ok(EdgeListBuild {
            graph: DirectedGraph {
                labels,
                index,
                edges,
                out_adj,
                in_adj,
            },
            self_loops_dropped: self_loops,
            duplicates_dropped: duplicates,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Edges as `(source, target)` index pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out_adj[from].binary_search(&to).is_ok()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_adj[node].len()
    }

    /// In-degree + out-degree of a node given by index.
    pub fn total_degree(&self, node: usize) -> usize {
        self.out_degree(node) + self.in_degree(node)
    }

    /// In-degree + out-degree of a node given by label.
    pub fn total_degree_of(&self, label: &str) -> Result<usize, GraphError> {
        let node = self
            .index_of(label)
            .ok_or_else(|| GraphError::UnknownNode(label.to_string()))?;
        Ok(self.total_degree(node))
    }

    /// Fraction of the `n(n-1)` possible directed edges that are present.
    pub fn density(&self) -> Result<f64, GraphError> {
        let n = self.node_count();
        if n < 2 {
            return Err(GraphError::Domain(format!(
                "density needs at least 2 nodes, got {n}"
            )));
        }
        Ok(self.edge_count() as f64 / (n * (n - 1)) as f64)
    }

    /// Drop all nodes with no edge in either direction.
    ///
    /// Returns the reduced graph and the removed labels (in node order).
    /// Edge indices are remapped; the edge set itself is unchanged.
    pub fn remove_isolates(&self) -> (DirectedGraph, Vec<String>) {
        let keep: Vec<usize> = (0..self.node_count())
            .filter(|&v| self.total_degree(v) > 0)
            .collect();
        let removed: Vec<String> = (0..self.node_count())
            .filter(|&v| self.total_degree(v) == 0)
            .map(|v| self.labels[v].clone())
            .collect();
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let rows: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|&(i, j)| (self.labels[i].clone(), self.labels[j].clone()))
            .collect();
        let seed: Vec<&str> = keep.iter().map(|&v| self.labels[v].as_str()).collect();
        let built = DirectedGraph::from_edge_list_with_nodes(seed, &rows)
            .expect("rebuilding from a valid graph cannot fail");
        (built.graph, removed)
    }

    /// Sorted neighbour lists of the symmetrized graph (edge in either direction).
    pub fn symmetric_adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Dense row-major adjacency indicator, `n*n` entries with zero diagonal.
    pub fn dense_adjacency(&self) -> Vec<bool> {
        let n = self.node_count();
        let mut y = vec![false; n * n];
        for &(i, j) in &self.edges {
            y[i * n + j] = true;
        }
        y
    }

    /// Hop distances on the symmetrized graph.
    ///
    /// BFS from every node; diagonal 0. Pairs with no connecting path are
    /// imputed as (max finite distance + 1) so the matrix stays finite for
    /// embedding. The imputation constant is fixed, not configurable.
    pub fn geodesic_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.node_count();
        let adj = self.symmetric_adjacency();
        const UNREACHED: u32 = u32::MAX;
        let mut dist = vec![vec![UNREACHED; n]; n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..n {
            dist[s][s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                let dv = dist[s][v];
                for &w in &adj[v] {
                    if dist[s][w] == UNREACHED {
                        dist[s][w] = dv + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let max_finite = dist
            .iter()
            .flatten()
            .filter(|&&d| d != UNREACHED)
            .copied()
            .max()
            .unwrap_or(0);
        for row in dist.iter_mut() {
            for d in row.iter_mut() {
                if *d == UNREACHED {
                    *d = max_finite + 1;
                }
            }
        }
        dist
    }
}

/// Read `(follower, followed)` rows from CSV with header `follower,followed`.
pub fn read_edge_csv<R: io::Read>(reader: R) -> Result<Vec<(String, String)>, GraphError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let got: Vec<&str> = headers.iter().map(str::trim).collect();
        if got != ["follower", "followed"] {
            return Err(GraphError::Malformed {
                row: 1,
                problem: format!("expected header `follower,followed`, got `{}`", got.join(",")),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2; // 1-based, after the header line
        if record.len() != 2 {
            return Err(GraphError::Malformed {
                row,
                problem: format!("expected 2 fields, got {}", record.len()),
            });
        }
        let from = record[0].trim();
        let to = record[1].trim();
        if from.is_empty() || to.is_empty() {
            return Err(GraphError::Malformed {
                row,
                problem: "empty node label".into(),
            });
        }
        rows.push((from.to_string(), to.to_string()));
    }
    Ok(rows)
}

/// Convenience wrapper over [`read_edge_csv`] for a file path.
pub fn read_edge_csv_file(path: &Path) -> Result<Vec<(String, String)>, GraphError> {
    read_edge_csv(std::fs::File::open(path)?)
}

/// Write the edge set as `follower,followed` CSV (same format as the input).
pub fn write_edge_csv<W: io::Write>(graph: &DirectedGraph, writer: W) -> Result<(), GraphError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["follower", "followed"])?;
    for &(i, j) in graph.edges() {
        wtr.write_record([graph.label(i), graph.label(j)])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph_from(rows: &[(&str, &str)]) -> DirectedGraph {
        DirectedGraph::from_edge_list(rows).unwrap().graph
    }

    #[test]
    fn dedups_and_keeps_reciprocal_edges() {
        let built = DirectedGraph::from_edge_list(&[("a", "b"), ("b", "a"), ("a", "b")]).unwrap();
        assert_eq!(built.graph.node_count(), 2);
        assert_eq!(built.graph.edge_count(), 2);
        assert_eq!(built.duplicates_dropped, 1);
        assert_eq!(built.self_loops_dropped, 0);
    }

    #[test]
    fn drops_and_counts_self_loops() {
        let built = DirectedGraph::from_edge_list(&[("a", "a")]).unwrap();
        assert_eq!(built.graph.node_count(), 1);
        assert_eq!(built.graph.edge_count(), 0);
        assert_eq!(built.self_loops_dropped, 1);
    }

    #[test]
    fn node_order_is_first_appearance() {
        let g = graph_from(&[("c", "a"), ("a", "b")]);
        assert_eq!(g.labels(), &["c", "a", "b"]);
    }

    #[test]
    fn empty_label_is_rejected() {
        let err = DirectedGraph::from_edge_list(&[("a", "")]).unwrap_err();
        assert!(matches!(err, GraphError::Malformed { row: 1, .. }));
    }

    #[test]
    fn seeded_nodes_may_stay_isolated() {
        let built =
            DirectedGraph::from_edge_list_with_nodes(["x", "y", "z"], &[("x", "y")]).unwrap();
        assert_eq!(built.graph.node_count(), 3);
        assert_eq!(built.graph.total_degree_of("z").unwrap(), 0);
    }

    #[test]
    fn remove_isolates_three_nodes_one_edge() {
        let built =
            DirectedGraph::from_edge_list_with_nodes(["a", "b", "c"], &[("a", "b")]).unwrap();
        let (g, removed) = built.graph.remove_isolates();
        assert_eq!(removed, vec!["c".to_string()]);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn remove_isolates_is_fixed_point_without_isolates() {
        let g = graph_from(&[("a", "b"), ("b", "c")]);
        let (g2, removed) = g.remove_isolates();
        assert!(removed.is_empty());
        assert_eq!(g2, g);
    }

    #[test]
    fn density_complete_empty_and_error() {
        let complete = graph_from(&[
            ("a", "b"),
            ("a", "c"),
            ("b", "a"),
            ("b", "c"),
            ("c", "a"),
            ("c", "b"),
        ]);
        assert_eq!(complete.density().unwrap(), 1.0);

        let empty = DirectedGraph::from_edge_list_with_nodes(["a", "b"], &[] as &[(&str, &str)])
            .unwrap()
            .graph;
        assert_eq!(empty.density().unwrap(), 0.0);

        let single = DirectedGraph::from_edge_list_with_nodes(["a"], &[] as &[(&str, &str)])
            .unwrap()
            .graph;
        assert!(single.density().is_err());
    }

    #[test]
    fn total_degree_basics() {
        let g = graph_from(&[("a", "b"), ("b", "a")]);
        assert_eq!(g.total_degree_of("a").unwrap(), 2);

        let star = graph_from(&[("s1", "hub"), ("s2", "hub"), ("s3", "hub"), ("s4", "hub"), ("s5", "hub")]);
        assert_eq!(star.total_degree_of("hub").unwrap(), 5);
        assert!(star.total_degree_of("nope").is_err());
    }

    #[test]
    fn geodesics_on_a_path() {
        let g = graph_from(&[("a", "b"), ("b", "c")]);
        let d = g.geodesic_matrix();
        assert_eq!(d[0][2], 2);
        assert_eq!(d[2][0], 2);
        assert_eq!(d[0][0], 0);
    }

    #[test]
    fn unreachable_pairs_get_max_finite_plus_one() {
        // two disjoint dyads: max finite distance 1, cross-component entries 2
        let g = graph_from(&[("a", "b"), ("c", "d")]);
        let d = g.geodesic_matrix();
        assert_eq!(d[0][1], 1);
        assert_eq!(d[0][2], 2);
        assert_eq!(d[1][3], 2);
    }

    /// Independent all-pairs oracle: Floyd–Warshall on the symmetrized graph.
    fn floyd_warshall_oracle(g: &DirectedGraph) -> Vec<Vec<u32>> {
        let n = g.node_count();
        const INF: u32 = u32::MAX / 4;
        let mut d = vec![vec![INF; n]; n];
        for v in 0..n {
            d[v][v] = 0;
        }
        for &(i, j) in g.edges() {
            d[i][j] = 1;
            d[j][i] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k].saturating_add(d[k][j]));
                }
            }
        }
        let max_finite = d
            .iter()
            .flatten()
            .filter(|&&x| x < INF)
            .copied()
            .max()
            .unwrap_or(0);
        for row in d.iter_mut() {
            for x in row.iter_mut() {
                if *x >= INF {
                    *x = max_finite + 1;
                }
            }
        }
        d
    }

    #[test]
    fn five_cycle_geodesics_match_oracle() {
        let g = graph_from(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]);
        let d = g.geodesic_matrix();
        assert_eq!(d, floyd_warshall_oracle(&g));
        assert!(d.iter().flatten().all(|&x| x <= 2));
    }

    fn arbitrary_edge_rows() -> impl Strategy<Value = Vec<(String, String)>> {
        proptest::collection::vec((0u8..12, 0u8..12), 0..60).prop_map(|pairs| {
            pairs
                .into_iter()
                .map(|(i, j)| (format!("n{i}"), format!("n{j}")))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn density_times_dyads_is_edge_count(rows in arbitrary_edge_rows()) {
            let g = DirectedGraph::from_edge_list(&rows).unwrap().graph;
            if g.node_count() >= 2 {
                let n = g.node_count() as f64;
                let product = g.density().unwrap() * n * (n - 1.0);
                prop_assert!((product - g.edge_count() as f64).abs() < 1e-9);
                prop_assert_eq!(product.round() as usize, g.edge_count());
            }
        }

        #[test]
        fn degree_sum_is_twice_edges(rows in arbitrary_edge_rows()) {
            let g = DirectedGraph::from_edge_list(&rows).unwrap().graph;
            let total: usize = (0..g.node_count()).map(|v| g.total_degree(v)).sum();
            prop_assert_eq!(total, 2 * g.edge_count());
        }

        #[test]
        fn remove_isolates_is_idempotent(rows in arbitrary_edge_rows()) {
            let g = DirectedGraph::from_edge_list(&rows).unwrap().graph;
            let (once, _) = g.remove_isolates();
            let (twice, removed_again) = once.remove_isolates();
            prop_assert!(removed_again.is_empty());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn geodesics_match_floyd_warshall(rows in arbitrary_edge_rows()) {
            let g = DirectedGraph::from_edge_list(&rows).unwrap().graph;
            if g.node_count() > 0 {
                let d = g.geodesic_matrix();
                let oracle = floyd_warshall_oracle(&g);
                prop_assert_eq!(&d, &oracle);
                let n = g.node_count();
                for i in 0..n {
                    prop_assert_eq!(d[i][i], 0);
                    for j in 0..n {
                        prop_assert_eq!(d[i][j], d[j][i]);
                        for k in 0..n {
                            prop_assert!(d[i][j] <= d[i][k] + d[k][j]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let g = graph_from(&[("a", "b"), ("b", "c")]);
        let mut buf = Vec::new();
        write_edge_csv(&g, &mut buf).unwrap();
        let rows = read_edge_csv(&buf[..]).unwrap();
        let g2 = DirectedGraph::from_edge_list(&rows).unwrap().graph;
        assert_eq!(g2.edge_count(), g.edge_count());

        let bad_header = read_edge_csv("from,to\na,b\n".as_bytes());
        assert!(matches!(bad_header, Err(GraphError::Malformed { row: 1, .. })));

        let bad_arity = read_edge_csv("follower,followed\na,b,c\n".as_bytes());
        assert!(matches!(bad_arity, Err(GraphError::Malformed { row: 2, .. })));
    }
}
