//! Problem parameters and the combinatorial objects being counted.
//!
//! Vertices are numbered class by class: vertex `i` (0-based) of class `t`
//! has global index `t * m + i`. Edge coordinates are stored 0-based and
//! rendered 1-based in JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An instance `(r, m, d)`: `r` classes of `m` vertices, target degree `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub r: u32,
    pub m: u32,
    pub d: u64,
}

impl Params {
    pub fn new(r: u32, m: u32, d: u64) -> Result<Self> {
        make_params(r, m, d)
    }

    /// Number of vertices `r * m`.
    pub fn n(&self) -> u64 {
        u64::from(self.r) * u64::from(self.m)
    }

    /// Number of possible edges `m^r`.
    pub fn cells(&self) -> u64 {
        u64::from(self.m).pow(self.r)
    }

    /// Number of possible edges through one vertex, `m^(r-1)`.
    pub fn cells_per_vertex(&self) -> u64 {
        u64::from(self.m).pow(self.r - 1)
    }

    /// Edge count of a regular instance, `m * d`.
    pub fn edges(&self) -> u64 {
        u64::from(self.m) * self.d
    }

    /// Edge density `d / m^(r-1)`.
    pub fn lambda(&self) -> f64 {
        self.d as f64 / self.cells_per_vertex() as f64
    }

    /// Variance factor `lambda (1 - lambda)`.
    pub fn big_lambda(&self) -> f64 {
        let l = self.lambda();
        l * (1.0 - l)
    }

    pub fn complement(&self) -> Params {
        Params { r: self.r, m: self.m, d: self.cells_per_vertex() - self.d }
    }

    /// Class and in-class index of a global vertex id.
    pub fn vertex_class(&self, v: u64) -> (u32, u32) {
        let m = u64::from(self.m);
        ((v / m) as u32, (v % m) as u32)
    }

    /// Coordinates of the cell with lexicographic index `idx`.
    pub fn cell_coords(&self, mut idx: u64) -> Vec<u32> {
        let m = u64::from(self.m);
        let mut coords = vec![0u32; self.r as usize];
        for slot in coords.iter_mut().rev() {
            *slot = (idx % m) as u32;
            idx /= m;
        }
        coords
    }

    /// Global vertex ids of the cell with lexicographic index `idx`.
    pub fn cell_vertices(&self, idx: u64) -> Vec<u64> {
        self.cell_coords(idx)
            .into_iter()
            .enumerate()
            .map(|(t, c)| t as u64 * u64::from(self.m) + u64::from(c))
            .collect()
    }
}

/// Validate and build an instance.
pub fn make_params(r: u32, m: u32, d: u64) -> Result<Params> {
    if r < 2 {
        return Err(Error::domain(format!("r must be at least 2, got {r}")));
    }
    if m < 1 {
        return Err(Error::domain("m must be at least 1"));
    }
    let cells = u64::from(m).checked_pow(r).ok_or_else(|| Error::domain(format!("m^r = {m}^{r} overflows 64 bits")))?;
    let per_vertex = cells / u64::from(m);
    if d > per_vertex {
        return Err(Error::domain(format!("d = {d} exceeds m^(r-1) = {per_vertex}")));
    }
    Ok(Params { r, m, d })
}

/// Parameters for the configuration model alone, where multi-hypergraphs
/// may need `d > m^(r-1)`. Counting and estimation routines expect
/// [`make_params`].
pub fn make_multigraph_params(r: u32, m: u32, d: u64) -> Result<Params> {
    make_params(r, m, 0)?;
    u64::from(m)
        .checked_mul(d)
        .filter(|&md| md <= u64::from(u32::MAX))
        .ok_or_else(|| Error::domain("m * d is too large"))?;
    Ok(Params { r, m, d })
}

/// One edge: a 0-based coordinate per class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub Vec<u32>);

impl Edge {
    pub fn new(coords: Vec<u32>) -> Self {
        Edge(coords)
    }

    /// Build from the 1-based coordinates used in JSON and in the literature.
    pub fn from_one_based(coords: &[u32]) -> Result<Self> {
        coords
            .iter()
            .map(|&c| c.checked_sub(1).ok_or_else(|| Error::domain("edge coordinates are 1-based")))
            .collect::<Result<Vec<_>>>()
            .map(Edge)
    }

    pub fn one_based(&self) -> Vec<u32> {
        self.0.iter().map(|c| c + 1).collect()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn validate(&self, p: &Params) -> Result<()> {
        if self.0.len() != p.r as usize {
            return Err(Error::domain(format!("edge has {} coordinates, expected {}", self.0.len(), p.r)));
        }
        if let Some(c) = self.0.iter().find(|&&c| c >= p.m) {
            return Err(Error::domain(format!("edge coordinate {} outside [1, {}]", c + 1, p.m)));
        }
        Ok(())
    }

    /// Lexicographic cell index.
    pub fn cell_index(&self, p: &Params) -> u64 {
        self.0.iter().fold(0u64, |acc, &c| acc * u64::from(p.m) + u64::from(c))
    }

    /// Number of classes in which two edges share a vertex.
    pub fn intersection(&self, other: &Edge) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a == b).count()
    }
}

fn vertex_degrees<'a>(p: &Params, edges: impl Iterator<Item = (&'a Edge, u64)>) -> Vec<u64> {
    let m = p.m as usize;
    let mut deg = vec![0u64; p.n() as usize];
    for (e, mult) in edges {
        for (t, &c) in e.0.iter().enumerate() {
            deg[t * m + c as usize] += mult;
        }
    }
    deg
}

/// A simple (r,r)-graph with edges kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    params: Params,
    edges: Vec<Edge>,
}

impl Hypergraph {
    /// Sorts the edges and rejects duplicates or malformed coordinates.
    /// `params.d` is the nominal degree; regularity is not required.
    pub fn new(params: Params, mut edges: Vec<Edge>) -> Result<Self> {
        for e in &edges {
            e.validate(&params)?;
        }
        edges.sort();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("hypergraph has a repeated edge"));
        }
        Ok(Hypergraph { params, edges })
    }

    /// Build from a sorted list of distinct cell indices.
    pub fn from_cells(params: Params, cells: &[u64]) -> Self {
        let edges = cells.iter().map(|&c| Edge(params.cell_coords(c))).collect();
        Hypergraph { params, edges }
    }

    pub fn empty(params: Params) -> Self {
        Hypergraph { params, edges: Vec::new() }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn degrees(&self) -> Vec<u64> {
        degrees(&self.params, self.edges.iter().map(|e| (e, 1)))
    }

    /// Every vertex has degree `params.d`.
    pub fn is_regular(&self) -> bool {
        self.degrees().iter().all(|&g| g == self.params.d)
    }

    pub fn cell_indices(&self) -> Vec<u64> {
        self.edges.iter().map(|e| e.cell_index(&self.params)).collect()
    }

    /// Canonical JSON form with 1-based coordinates.
    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            r: self.params.r,
            m: self.params.m,
            d: self.params.d,
            edges: self.edges.iter().map(Edge::one_based).collect(),
        }
    }

    pub fn from_json(j: &HypergraphJson) -> Result<Self> {
        let params = make_params(j.r, j.m, j.d)?;
        let edges = j.edges.iter().map(|e| Edge::from_one_based(e)).collect::<Result<Vec<_>>>()?;
        Hypergraph::new(params, edges)
    }
}

/// Wire form of a [`Hypergraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub r: u32,
    pub m: u32,
    pub d: u64,
    pub edges: Vec<Vec<u32>>,
}

/// Degree vector (length `n`) of an edge multiset.
pub fn degrees<'a>(p: &Params, edges: impl Iterator<Item = (&'a Edge, u64)>) -> Vec<u64> {
    vertex_degrees(p, edges)
}

/// Complement within `[m]^r`. A d-regular input maps to an
/// `(m^(r-1) - d)`-regular output.
pub fn complement(g: &Hypergraph) -> Hypergraph {
    let p = g.params;
    let present = g.cell_indices();
    let mut it = present.iter().peekable();
    let mut cells = Vec::with_capacity((p.cells() as usize).saturating_sub(present.len()));
    for idx in 0..p.cells() {
        if it.peek() == Some(&&idx) {
            it.next();
        } else {
            cells.push(idx);
        }
    }
    Hypergraph::from_cells(p.complement(), &cells)
}

/// An edge multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiHypergraph {
    pub params: Params,
    pub edge_mult: BTreeMap<Edge, u32>,
}

impl MultiHypergraph {
    pub fn total_multiplicity(&self) -> u64 {
        self.edge_mult.values().map(|&k| u64::from(k)).sum()
    }

    pub fn is_simple(&self) -> bool {
        self.edge_mult.values().all(|&k| k == 1)
    }

    pub fn degrees(&self) -> Vec<u64> {
        degrees(&self.params, self.edge_mult.iter().map(|(e, &k)| (e, u64::from(k))))
    }

    /// The underlying simple hypergraph, if there are no repeated edges.
    pub fn to_simple(&self) -> Option<Hypergraph> {
        if !self.is_simple() {
            return None;
        }
        Some(Hypergraph { params: self.params, edges: self.edge_mult.keys().cloned().collect() })
    }
}

/// A configuration: `r - 1` permutations of `[m d]` matching class-1 spines
/// to spines of the other classes. Spine `j` of any class sits on vertex
/// `j / d` of that class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub params: Params,
    pub perms: Vec<Vec<u32>>,
}

impl Configuration {
    pub fn new(params: Params, perms: Vec<Vec<u32>>) -> Result<Self> {
        let md = params.edges() as usize;
        if perms.len() != params.r as usize - 1 {
            return Err(Error::domain(format!(
                "configuration needs {} permutations, got {}",
                params.r - 1,
                perms.len()
            )));
        }
        for p in &perms {
            if p.len() != md {
                return Err(Error::domain("permutation has the wrong length"));
            }
            let mut seen = vec![false; md];
            for &x in p {
                let x = x as usize;
                if x >= md || seen[x] {
                    return Err(Error::domain("not a permutation"));
                }
                seen[x] = true;
            }
        }
        Ok(Configuration { params, perms })
    }

    pub fn identity(params: Params) -> Self {
        let md = params.edges() as u32;
        Configuration { params, perms: vec![(0..md).collect(); params.r as usize - 1] }
    }

    /// Number of spine sets, `m d`.
    pub fn len(&self) -> usize {
        self.params.edges() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spine_vertex(&self, spine: u32) -> u32 {
        (u64::from(spine) / self.params.d) as u32
    }

    /// Vertex coordinates of spine set `i` (the one containing class-1 spine `i`).
    pub fn spine_set_edge(&self, i: usize) -> Edge {
        let mut coords = Vec::with_capacity(self.params.r as usize);
        coords.push(self.spine_vertex(i as u32));
        for p in &self.perms {
            coords.push(self.spine_vertex(p[i]));
        }
        Edge(coords)
    }

    /// The multi-hypergraph this configuration provides.
    pub fn provides(&self) -> MultiHypergraph {
        let mut edge_mult = BTreeMap::new();
        for i in 0..self.len() {
            *edge_mult.entry(self.spine_set_edge(i)).or_insert(0) += 1;
        }
        MultiHypergraph { params: self.params, edge_mult }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[u32]) -> Edge {
        Edge::from_one_based(c).unwrap()
    }

    #[test]
    fn params_examples() {
        let p = make_params(3, 2, 2).unwrap();
        assert_eq!(p.lambda(), 0.5);
        assert_eq!(p.big_lambda(), 0.25);
        assert_eq!(p.n(), 6);
        let p = make_params(3, 2, 0).unwrap();
        assert_eq!((p.lambda(), p.big_lambda()), (0.0, 0.0));
        let p = make_params(4, 3, 27).unwrap();
        assert_eq!((p.lambda(), p.big_lambda()), (1.0, 0.0));
        assert_eq!(p.complement().d, 0);
    }

    #[test]
    fn params_rejects_bad_input() {
        assert!(matches!(make_params(1, 2, 0), Err(Error::Domain(_))));
        assert!(matches!(make_params(3, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(make_params(3, 2, 5), Err(Error::Domain(_))));
        assert!(matches!(make_params(40, 10, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn complement_of_empty_is_full() {
        let p = make_params(3, 2, 0).unwrap();
        let full = complement(&Hypergraph::empty(p));
        assert_eq!(full.len(), 8);
        assert_eq!(full.params().d, 4);
        assert!(full.is_regular());
        assert_eq!(full.degrees(), vec![4; 6]);
    }

    #[test]
    fn complement_of_two_edges() {
        let p = make_params(3, 2, 1).unwrap();
        let g = Hypergraph::new(p, vec![e(&[1, 1, 1]), e(&[2, 2, 2])]).unwrap();
        assert_eq!(g.degrees(), vec![1; 6]);
        let c = complement(&g);
        assert_eq!(c.len(), 6);
        assert_eq!(c.params().d, 3);
        assert!(c.is_regular());
        assert_eq!(complement(&c), g);
    }

    #[test]
    fn empty_graph_degrees() {
        let p = make_params(3, 2, 0).unwrap();
        assert_eq!(Hypergraph::empty(p).degrees(), vec![0; 6]);
    }

    #[test]
    fn rejects_duplicates_and_bad_coords() {
        let p = make_params(3, 2, 1).unwrap();
        assert!(Hypergraph::new(p, vec![e(&[1, 1, 1]), e(&[1, 1, 1])]).is_err());
        assert!(Hypergraph::new(p, vec![e(&[1, 1, 3])]).is_err());
        assert!(Hypergraph::new(p, vec![e(&[1, 1])]).is_err());
        assert!(Edge::from_one_based(&[0, 1, 1]).is_err());
    }

    #[test]
    fn json_is_one_based_and_sorted() {
        let p = make_params(3, 2, 1).unwrap();
        let g = Hypergraph::new(p, vec![e(&[2, 2, 2]), e(&[1, 1, 1])]).unwrap();
        let s = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(s, r#"{"r":3,"m":2,"d":1,"edges":[[1,1,1],[2,2,2]]}"#);
        let back: HypergraphJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Hypergraph::from_json(&back).unwrap(), g);
    }

    #[test]
    fn cell_index_round_trip() {
        let p = make_params(4, 3, 1).unwrap();
        for idx in 0..p.cells() {
            assert_eq!(Edge(p.cell_coords(idx)).cell_index(&p), idx);
        }
    }

    #[test]
    fn identity_configuration_provides_diagonal() {
        let p = make_params(3, 2, 1).unwrap();
        let mh = Configuration::identity(p).provides();
        assert!(mh.is_simple());
        let keys: Vec<_> = mh.edge_mult.keys().cloned().collect();
        assert_eq!(keys, vec![e(&[1, 1, 1]), e(&[2, 2, 2])]);
    }

    #[test]
    fn configuration_validation() {
        let p = make_params(3, 2, 1).unwrap();
        assert!(Configuration::new(p, vec![vec![0, 1]]).is_err());
        assert!(Configuration::new(p, vec![vec![0, 0], vec![0, 1]]).is_err());
        assert!(Configuration::new(p, vec![vec![1, 0], vec![0, 1]]).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn complement_is_involution(r in 2u32..4, m in 1u32..4, bits in proptest::collection::vec(proptest::bool::ANY, 64)) {
            let p = make_params(r, m, 0).unwrap();
            let cells: Vec<u64> = (0..p.cells()).filter(|&i| bits[i as usize % 64]).collect();
            let g = Hypergraph::from_cells(p, &cells);
            let c = complement(&g);
            proptest::prop_assert_eq!(c.len() as u64, p.cells() - g.len() as u64);
            let back = complement(&c);
            proptest::prop_assert_eq!(back.cell_indices(), g.cell_indices());
            let dg = g.degrees();
            let dc = c.degrees();
            for (a, b) in dg.iter().zip(&dc) {
                proptest::prop_assert_eq!(a + b, p.cells_per_vertex());
            }
        }
    }
}
