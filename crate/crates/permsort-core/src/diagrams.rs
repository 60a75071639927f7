//! Graph views of permutations and step sequences: the adjacency graph of a
//! permutation, the layered diagram of a step tuple together with its
//! straight-line crossing count, contraction back to an adjacency graph, and
//! treewidth estimation (exact on small graphs, greedy upper bounds beyond).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use crate::error::Error;
use crate::perm::Perm;
use crate::Result;

/// Simple undirected graph on vertices 0..n. Edges are stored normalized with
/// the smaller endpoint first; duplicates collapse and self-loops are refused.
/// Vertices may carry integer plane coordinates and string labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(u32, u32)>,
    coords: Option<Vec<(i64, i64)>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
            coords: None,
            labels: None,
        }
    }

    /// Inserts the edge {u, v}. Inserting an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.insert((a as u32, b as u32));
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.contains(&(a as u32, b as u32))
    }

    /// Edges in sorted order, smaller endpoint first.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges().filter(|&(a, b)| a == v || b == v).count()
    }

    pub fn set_coords(&mut self, coords: Vec<(i64, i64)>) {
        assert_eq!(coords.len(), self.n, "one coordinate pair per vertex");
        self.coords = Some(coords);
    }

    pub fn coords(&self) -> Option<&[(i64, i64)]> {
        self.coords.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.n, "one label per vertex");
        self.labels = Some(labels);
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn adjacency_masks(&self) -> Vec<u32> {
        assert!(self.n <= 32);
        let mut adj = vec![0u32; self.n];
        for (u, v) in self.edges() {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        adj
    }
}

/// Graph on the values of pi: vertex v-1 stands for the element with value v,
/// values in adjacent positions are joined, and so are values differing by
/// one. The result is a union of two spanning paths (position order and value
/// order), so it has at most 2(n-1) edges and maximum degree 4. Coordinates
/// are the diagram points (position, value).
pub fn adjacency_graph(pi: &Perm) -> Graph {
    let n = pi.len();
    let mut g = Graph::new(n);
    for i in 1..n {
        g.add_edge(pi.at(i) - 1, pi.at(i + 1) - 1);
    }
    for v in 1..n {
        g.add_edge(v - 1, v);
    }
    let mut coords = vec![(0i64, 0i64); n];
    let mut labels = vec![String::new(); n];
    for i in 1..=n {
        coords[pi.at(i) - 1] = (i as i64, pi.at(i) as i64);
        labels[pi.at(i) - 1] = pi.at(i).to_string();
    }
    g.set_coords(coords);
    g.set_labels(labels);
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRole {
    Starting,
    Terminal,
    Internal,
}

impl VertexRole {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexRole::Starting => "starting",
            VertexRole::Terminal => "terminal",
            VertexRole::Internal => "internal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRole {
    Horizontal,
    Vertical,
    Diagonal,
}

impl EdgeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeRole::Horizontal => "horizontal",
            EdgeRole::Vertical => "vertical",
            EdgeRole::Diagonal => "diagonal",
        }
    }
}

/// Block holding a vertex: Id(i) is the i-th fixed identity copy (1-based,
/// along the anti-diagonal of the layout), Step(i) the copy of the i-th step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Id(usize),
    Step(usize),
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Id(i) => write!(f, "id{i}"),
            Block::Step(i) => write!(f, "step{i}"),
        }
    }
}

/// Layered drawing of a step tuple (s1, ..., st) on n symbols inside an
/// [(t+1)n] x [(t+1)n] grid. Identity copies occupy the blocks along the
/// anti-diagonal; the copy of step i sits directly above the i-th identity
/// copy. Vertices sharing a horizontal line are joined (horizontal edges), as
/// are vertices sharing a vertical line (vertical edges); together these form
/// n vertex-disjoint paths from the starting vertices (bottom-right identity
/// copy, numbered left to right) to the terminal vertices (top-left copy).
/// The path leaving starting vertex j ends at terminal number w(j), where w
/// is the composition of the steps with the first step applied innermost
/// last, i.e. w = st o ... o s1. Consecutive starting vertices and
/// consecutive terminal vertices are joined by diagonal edges.
pub struct SortingDiagram {
    graph: Graph,
    n: usize,
    steps: Vec<Perm>,
    roles: Vec<VertexRole>,
    blocks: Vec<Block>,
    edge_roles: BTreeMap<(u32, u32), EdgeRole>,
}

/// Builds the layered diagram of a nonempty tuple of equal-size steps.
pub fn build_sorting_diagram(steps: &[Perm]) -> Result<SortingDiagram> {
    let t = steps.len();
    if t == 0 {
        return Err(Error::domain("diagram needs at least one step"));
    }
    let n = steps[0].len();
    if n == 0 {
        return Err(Error::domain("diagram steps must be nonempty"));
    }
    if steps.iter().any(|s| s.len() != n) {
        return Err(Error::domain("diagram steps differ in size"));
    }

    let total = (2 * t + 1) * n;
    // Block order in vertex ids: Id(1), Step(1), Id(2), Step(2), ..., Id(t+1).
    let id_v = |i: usize, j: usize| (2 * (i - 1)) * n + (j - 1);
    let step_v = |i: usize, j: usize| (2 * i - 1) * n + (j - 1);

    let mut coords = vec![(0i64, 0i64); total];
    let mut roles = vec![VertexRole::Internal; total];
    let mut blocks = vec![Block::Id(0); total];
    for i in 1..=t + 1 {
        for j in 1..=n {
            let v = id_v(i, j);
            coords[v] = (((t + 1 - i) * n + j) as i64, ((i - 1) * n + j) as i64);
            blocks[v] = Block::Id(i);
            if i == 1 {
                roles[v] = VertexRole::Starting;
            } else if i == t + 1 {
                roles[v] = VertexRole::Terminal;
            }
        }
    }
    for i in 1..=t {
        let s = &steps[i - 1];
        for j in 1..=n {
            let v = step_v(i, j);
            coords[v] = (((t + 1 - i) * n + j) as i64, (i * n + s.at(j)) as i64);
            blocks[v] = Block::Step(i);
        }
    }

    let mut graph = Graph::new(total);
    graph.set_coords(coords);
    let mut edge_roles = BTreeMap::new();
    let mut add = |graph: &mut Graph, u: usize, v: usize, role: EdgeRole| {
        graph.add_edge(u, v);
        let key = if u < v {
            (u as u32, v as u32)
        } else {
            (v as u32, u as u32)
        };
        edge_roles.insert(key, role);
    };
    for i in 1..=t {
        let s = &steps[i - 1];
        for j in 1..=n {
            add(&mut graph, id_v(i, j), step_v(i, j), EdgeRole::Vertical);
            add(
                &mut graph,
                step_v(i, j),
                id_v(i + 1, s.at(j)),
                EdgeRole::Horizontal,
            );
        }
    }
    for j in 1..n {
        add(&mut graph, id_v(1, j), id_v(1, j + 1), EdgeRole::Diagonal);
        add(
            &mut graph,
            id_v(t + 1, j),
            id_v(t + 1, j + 1),
            EdgeRole::Diagonal,
        );
    }

    Ok(SortingDiagram {
        graph,
        n,
        steps: steps.to_vec(),
        roles,
        blocks,
        edge_roles,
    })
}

impl SortingDiagram {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[Perm] {
        &self.steps
    }

    /// Composition of the steps with the first step applied first; the
    /// horizontal and vertical paths connect starting vertex j to terminal
    /// vertex composition(j).
    pub fn composition(&self) -> Perm {
        self.steps
            .iter()
            .fold(Perm::identity(self.n), |acc, s| s.compose(&acc))
    }

    /// Vertex id of the j-th starting vertex, 1-based.
    pub fn start_vertex(&self, j: usize) -> usize {
        assert!(1 <= j && j <= self.n);
        j - 1
    }

    /// Vertex id of the j-th terminal vertex, 1-based.
    pub fn terminal_vertex(&self, j: usize) -> usize {
        assert!(1 <= j && j <= self.n);
        2 * self.steps.len() * self.n + (j - 1)
    }

    pub fn vertex_role(&self, v: usize) -> VertexRole {
        self.roles[v]
    }

    pub fn block(&self, v: usize) -> Block {
        self.blocks[v]
    }

    pub fn edge_role(&self, u: usize, v: usize) -> Option<EdgeRole> {
        let key = if u < v {
            (u as u32, v as u32)
        } else {
            (v as u32, u as u32)
        };
        self.edge_roles.get(&key).copied()
    }

    /// DOT text with exact positions plus role and block attributes.
    pub fn to_dot(&self) -> String {
        let coords = self.graph.coords().expect("diagram always has coordinates");
        let mut out = String::from("graph {\n");
        let rows = coords.iter().zip(self.roles.iter().zip(&self.blocks));
        for (v, (&(x, y), (role, block))) in rows.enumerate() {
            let _ = writeln!(
                out,
                "  {v} [pos=\"{x},{y}!\" role=\"{}\" block=\"{block}\"];",
                role.as_str(),
            );
        }
        for (u, v) in self.graph.edges() {
            let role = self.edge_role(u, v).expect("every edge has a role");
            let _ = writeln!(out, "  {u} -- {v} [role=\"{}\"];", role.as_str());
        }
        out.push_str("}\n");
        out
    }

    /// JSON object with keys n, t, steps, edges, coords, roles, blocks,
    /// edge_roles.
    pub fn to_json(&self) -> String {
        let coords = self.graph.coords().expect("diagram always has coordinates");
        serde_json::json!({
            "n": self.n,
            "t": self.steps.len(),
            "steps": self.steps.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "edges": self.graph.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
            "coords": coords,
            "roles": self.roles.iter().map(|r| r.as_str()).collect::<Vec<_>>(),
            "blocks": self.blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "edge_roles": self
                .graph
                .edges()
                .map(|(u, v)| {
                    let role = self.edge_role(u, v).expect("every edge has a role");
                    serde_json::json!([u, v, role.as_str()])
                })
                .collect::<Vec<_>>(),
        })
        .to_string()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Contracts every horizontal and vertical edge of the diagram. The n
/// start-to-terminal paths collapse to single vertices; labeling each by its
/// terminal number and keeping the diagonal edges yields exactly
/// adjacency_graph of the diagram's step composition.
pub fn contract_to_adjacency(sd: &SortingDiagram) -> Graph {
    let total = sd.graph.vertex_count();
    let mut uf = UnionFind::new(total);
    for (&(u, v), &role) in &sd.edge_roles {
        if role != EdgeRole::Diagonal {
            uf.union(u as usize, v as usize);
        }
    }
    let n = sd.n;
    let mut label = vec![0usize; total];
    for j in 1..=n {
        let root = uf.find(sd.terminal_vertex(j));
        debug_assert_eq!(label[root], 0, "paths are vertex-disjoint");
        label[root] = j;
    }
    let mut g = Graph::new(n);
    let mut labels = vec![String::new(); n];
    for v in 1..=n {
        labels[v - 1] = v.to_string();
    }
    g.set_labels(labels);
    for (&(u, v), &role) in &sd.edge_roles {
        if role == EdgeRole::Diagonal {
            let lu = label[uf.find(u as usize)];
            let lv = label[uf.find(v as usize)];
            assert!(lu != 0 && lv != 0, "every path reaches a terminal vertex");
            g.add_edge(lu - 1, lv - 1);
        }
    }
    g
}

/// Crossing count of the straight-line drawing. A vertical edge and a
/// horizontal edge cross exactly when their endpoints inside the same step
/// copy form an inversion of that step, so the total is the sum of inversion
/// counts over the steps.
pub fn straight_line_crossings(sd: &SortingDiagram) -> u64 {
    sd.steps.iter().map(|s| s.inversions()).sum()
}

/// Largest graph accepted by treewidth_exact.
pub const TREEWIDTH_EXACT_MAX: usize = 20;

/// Exact treewidth by dynamic programming over vertex subsets in the
/// elimination-order formulation: dp[S] is the best achievable width when S
/// is eliminated first, and eliminating v right after S \ {v} costs the
/// number of vertices outside S reachable from v through S \ {v}.
pub fn treewidth_exact(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > TREEWIDTH_EXACT_MAX {
        return Err(Error::ResourceLimit(format!(
            "exact treewidth handles at most {TREEWIDTH_EXACT_MAX} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let adj = g.adjacency_masks();
    let full: u32 = if n == 32 { !0 } else { (1u32 << n) - 1 };
    let mut dp = vec![0u8; 1usize << n];
    for set in 1..=full {
        let mut best = u8::MAX;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = set & !(1 << v);
            let cost = reach_count(&adj, without, v).max(dp[without as usize]);
            best = best.min(cost);
        }
        dp[set as usize] = best;
    }
    Ok(dp[full as usize] as usize)
}

/// Number of vertices outside `inside` and distinct from v that are reachable
/// from v along paths whose interior stays in `inside`.
fn reach_count(adj: &[u32], inside: u32, v: usize) -> u8 {
    let mut visited = 1u32 << v;
    let mut stack = adj[v];
    let mut out = 0u32;
    while stack != 0 {
        let b = stack.trailing_zeros() as usize;
        stack &= stack - 1;
        if visited >> b & 1 == 1 {
            continue;
        }
        visited |= 1 << b;
        if inside >> b & 1 == 1 {
            stack |= adj[b] & !visited;
        } else {
            out |= 1 << b;
        }
    }
    out.count_ones() as u8
}

/// Upper bound on treewidth: width of a greedy elimination order. Both the
/// minimum-degree and the minimum-fill-in rules are tried and the smaller
/// width wins. Always at least the exact treewidth.
pub fn treewidth_upper(g: &Graph) -> usize {
    greedy_width(g, false).min(greedy_width(g, true))
}

fn greedy_width(g: &Graph, min_fill: bool) -> usize {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (u, v) in g.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut alive = vec![true; n];
    let mut width = 0;
    for _ in 0..n {
        let mut pick = usize::MAX;
        let mut pick_score = u64::MAX;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let score = if min_fill {
                fill_in(&adj, v)
            } else {
                adj[v].len() as u64
            };
            if score < pick_score {
                pick_score = score;
                pick = v;
            }
        }
        width = width.max(adj[pick].len());
        let nbrs: Vec<usize> = adj[pick].iter().copied().collect();
        for a in 0..nbrs.len() {
            for b in a + 1..nbrs.len() {
                adj[nbrs[a]].insert(nbrs[b]);
                adj[nbrs[b]].insert(nbrs[a]);
            }
        }
        for &u in &nbrs {
            adj[u].remove(&pick);
        }
        adj[pick].clear();
        alive[pick] = false;
    }
    width
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> u64 {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for a in 0..nbrs.len() {
        for b in a + 1..nbrs.len() {
            if !adj[nbrs[a]].contains(&nbrs[b]) {
                missing += 1;
            }
        }
    }
    missing
}

/// DOT text for a plain graph. Coordinates become pos attributes and labels
/// become label attributes when present.
pub fn export_dot(g: &Graph) -> String {
    let mut out = String::from("graph {\n");
    for v in 0..g.vertex_count() {
        let mut attrs = Vec::new();
        if let Some(coords) = g.coords() {
            attrs.push(format!("pos=\"{},{}!\"", coords[v].0, coords[v].1));
        }
        if let Some(labels) = g.labels() {
            attrs.push(format!("label=\"{}\"", labels[v]));
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {v};");
        } else {
            let _ = writeln!(out, "  {v} [{}];", attrs.join(" "));
        }
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

/// JSON object {"n", "edges", "coords", "roles"}; coords and roles are null
/// when the graph does not carry them.
pub fn export_json(g: &Graph) -> String {
    serde_json::json!({
        "n": g.vertex_count(),
        "edges": g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        "coords": g.coords(),
        "roles": g.labels(),
    })
    .to_string()
}
