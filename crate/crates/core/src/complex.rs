//! Finite abstract simplicial complexes.
//!
//! Simplices are sorted vertex lists. A complex stores every face (not only the
//! maximal ones), grouped by dimension and sorted lexicographically within a
//! dimension. Vertices are `0..num_vertices` and every vertex is a 0-simplex.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Simplex = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("vertex {vertex} out of range (num_vertices = {num_vertices})")]
    IndexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("empty simplex")]
    EmptySimplex,
    #[error("repeated vertex in simplex {0:?}")]
    RepeatedVertex(Vec<usize>),
    #[error("complex has dimension {0} > 1, not a graph")]
    NotAGraph(usize),
    #[error("{0:?} is not a simplex of the complex or its faces are missing")]
    NotASubcomplex(Simplex),
}

/// JSON form: `{"num_vertices": n, "maximal_simplices": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub num_vertices: usize,
    pub maximal_simplices: Vec<Vec<usize>>,
}

impl ComplexSpec {
    pub fn build(&self) -> Result<SComplex, ComplexError> {
        SComplex::from_maximal(self.num_vertices, &self.maximal_simplices)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SComplex {
    num_vertices: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: HashMap<Simplex, usize>,
}

/// Euler characteristic and orientability of a recognized closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurfaceType {
    pub orientable: bool,
    /// Handle count for orientable surfaces, crosscap count otherwise.
    pub genus: usize,
}

/// Barycentric subdivision together with the simplex of the original complex
/// each new vertex stands for.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub complex: SComplex,
    pub faces: Vec<Simplex>,
}

/// Split of a complex by the open star of a subcomplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenStar {
    /// Simplices with at least one vertex in the subcomplex.
    pub star: Vec<Simplex>,
    /// The remaining simplices; always a subcomplex.
    pub complement: Vec<Simplex>,
}

impl SComplex {
    pub fn empty() -> Self {
        SComplex {
            num_vertices: 0,
            by_dim: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Downward closure of the given simplices on `num_vertices` vertices.
    pub fn from_maximal<S: AsRef<[usize]>>(
        num_vertices: usize,
        maximal: &[S],
    ) -> Result<Self, ComplexError> {
        let mut faces: BTreeSet<Simplex> = (0..num_vertices).map(|v| vec![v]).collect();
        for s in maximal {
            let s = s.as_ref();
            if s.is_empty() {
                return Err(ComplexError::EmptySimplex);
            }
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            if let Some(&v) = sorted.iter().find(|&&v| v >= num_vertices) {
                return Err(ComplexError::IndexOutOfRange {
                    vertex: v,
                    num_vertices,
                });
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::RepeatedVertex(s.to_vec()));
            }
            if faces.contains(&sorted) {
                continue;
            }
            let k = sorted.len();
            for mask in 1u64..(1u64 << k) {
                let face: Simplex = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| sorted[i])
                    .collect();
                faces.insert(face);
            }
        }
        Ok(Self::from_closed(num_vertices, faces))
    }

    fn from_closed(num_vertices: usize, faces: impl IntoIterator<Item = Simplex>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for f in faces {
            let d = f.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(f);
        }
        let mut index = HashMap::new();
        for layer in &mut by_dim {
            layer.sort();
            for (i, s) in layer.iter().enumerate() {
                index.insert(s.clone(), i);
            }
        }
        SComplex {
            num_vertices,
            by_dim,
            index,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All simplices, by dimension and then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn num_simplices(&self) -> usize {
        self.index.len()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index.contains_key(s)
    }

    /// Position of a sorted simplex within its dimension.
    pub fn position(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Position of a simplex in [`SComplex::iter`] order.
    pub fn global_position(&self, s: &[usize]) -> Option<usize> {
        let p = self.position(s)?;
        let offset: usize = self.by_dim[..s.len() - 1].iter().map(Vec::len).sum();
        Some(offset + p)
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered: HashSet<Simplex> = HashSet::new();
        for s in self.iter().filter(|s| s.len() > 1) {
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                covered.insert(f);
            }
        }
        self.iter()
            .filter(|s| !covered.contains(*s))
            .cloned()
            .collect()
    }

    pub fn spec(&self) -> ComplexSpec {
        ComplexSpec {
            num_vertices: self.num_vertices,
            maximal_simplices: self.maximal_simplices(),
        }
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// Barycentric subdivision. New vertex `i` is the barycenter of `faces[i]`,
    /// numbered in [`SComplex::iter`] order.
    pub fn barycentric_subdivision(&self) -> Subdivision {
        let faces: Vec<Simplex> = self.iter().cloned().collect();
        let id = |s: &[usize]| self.global_position(s).expect("face of complex");
        let mut flags: Vec<Simplex> = Vec::new();
        for top in self.maximal_simplices() {
            let mut order = top.clone();
            for_each_permutation(&mut order, &mut |perm| {
                let mut flag = Vec::with_capacity(perm.len());
                for k in 1..=perm.len() {
                    let mut f = perm[..k].to_vec();
                    f.sort_unstable();
                    flag.push(id(&f));
                }
                flags.push(flag);
            });
        }
        let complex = SComplex::from_maximal(faces.len(), &flags).expect("valid flags");
        Subdivision { complex, faces }
    }

    /// Number of connected components and first Betti number of a graph.
    pub fn graph_betti(&self) -> Result<(usize, usize), ComplexError> {
        if let Some(d) = self.dim() {
            if d > 1 {
                return Err(ComplexError::NotAGraph(d));
            }
        }
        let components = self.components();
        let e = self.simplices(1).len();
        Ok((components, e + components - self.num_vertices))
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.num_vertices);
        for e in self.simplices(1) {
            uf.union(e[0], e[1]);
        }
        uf.count()
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    /// Recognizes a closed (connected, boundaryless) triangulated surface.
    pub fn is_closed_surface(&self) -> Option<SurfaceType> {
        if self.dim() != Some(2) || !self.surface_links_ok() || !self.is_connected() {
            return None;
        }
        let chi = self.euler_characteristic();
        let orientable = self.orient().is_some();
        if orientable {
            let two_g = 2 - chi;
            (two_g >= 0 && two_g % 2 == 0).then_some(SurfaceType {
                orientable,
                genus: (two_g / 2) as usize,
            })
        } else {
            let k = 2 - chi;
            (k >= 1).then_some(SurfaceType {
                orientable,
                genus: k as usize,
            })
        }
    }

    fn surface_links_ok(&self) -> bool {
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in self.simplices(2) {
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                *edge_count.entry((a, b)).or_default() += 1;
            }
        }
        if self.simplices(1).len() != edge_count.len() || edge_count.values().any(|&c| c != 2) {
            return false;
        }
        (0..self.num_vertices).all(|v| self.link_cycle(v).is_some())
    }

    /// Link of a vertex in a surface as a cyclic vertex sequence, if it is a single cycle.
    pub fn link_cycle(&self, v: usize) -> Option<Vec<usize>> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for t in self.simplices(2).iter().filter(|t| t.contains(&v)) {
            let rest: Vec<usize> = t.iter().copied().filter(|&x| x != v).collect();
            adj.entry(rest[0]).or_default().push(rest[1]);
            adj.entry(rest[1]).or_default().push(rest[0]);
        }
        if adj.len() < 3 || adj.values().any(|n| n.len() != 2) {
            return None;
        }
        let start = *adj.keys().min().unwrap();
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = adj[&start].iter().copied().min().unwrap();
        while cur != start {
            cycle.push(cur);
            let next = adj[&cur].iter().copied().find(|&x| x != prev).unwrap();
            prev = cur;
            cur = next;
        }
        (cycle.len() == adj.len()).then_some(cycle)
    }

    /// Coherent orientation of a pure 2-complex in which every edge has two triangles:
    /// every triangle as an ordered triple, or `None` if no orientation exists.
    pub fn orient(&self) -> Option<Vec<[usize; 3]>> {
        let tris = self.simplices(2);
        let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in tris.iter().enumerate() {
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                by_edge.entry((a, b)).or_default().push(i);
            }
        }
        let mut oriented: Vec<Option<[usize; 3]>> = vec![None; tris.len()];
        for root in 0..tris.len() {
            if oriented[root].is_some() {
                continue;
            }
            let t = &tris[root];
            oriented[root] = Some([t[0], t[1], t[2]]);
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                let o = oriented[i].unwrap();
                for k in 0..3 {
                    let (a, b) = (o[k], o[(k + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    for &j in &by_edge[&key] {
                        if j == i {
                            continue;
                        }
                        // The neighbour must traverse the shared edge as (b, a).
                        let c = tris[j].iter().copied().find(|&x| x != a && x != b).unwrap();
                        let want = [b, a, c];
                        match oriented[j] {
                            None => {
                                oriented[j] = Some(want);
                                queue.push_back(j);
                            }
                            Some(have) => {
                                if !same_cyclic(&have, &want) {
                                    return None;
                                }
                            }
                        }
                    }
                }
            }
        }
        oriented.into_iter().collect()
    }

    /// Open star of the vertices of a subcomplex `a` and its complement.
    pub fn open_star_neighborhood(&self, a: &[Simplex]) -> Result<OpenStar, ComplexError> {
        let mut verts = HashSet::new();
        for s in a {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            if !self.contains(&sorted) {
                return Err(ComplexError::NotASubcomplex(s.clone()));
            }
            verts.extend(sorted.iter().copied());
        }
        let given: HashSet<Simplex> = a
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s
            })
            .collect();
        for s in &given {
            if s.len() > 1 {
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    if !given.contains(&f) {
                        return Err(ComplexError::NotASubcomplex(s.clone()));
                    }
                }
            }
        }
        let (star, complement) = self
            .iter()
            .cloned()
            .partition(|s| s.iter().any(|v| verts.contains(v)));
        Ok(OpenStar { star, complement })
    }

    /// Full subcomplex on the given vertices, relabeled to `0..k` in ascending
    /// order; also returns the old index of each new vertex.
    pub fn induced_subcomplex(&self, vertices: &[usize]) -> (SComplex, Vec<usize>) {
        let mut old: Vec<usize> = vertices.to_vec();
        old.sort_unstable();
        old.dedup();
        let new_of: HashMap<usize, usize> = old.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let faces: Vec<Simplex> = self
            .iter()
            .filter(|s| s.iter().all(|v| new_of.contains_key(v)))
            .map(|s| s.iter().map(|v| new_of[v]).collect())
            .collect();
        (Self::from_closed(old.len(), faces), old)
    }

    /// Subcomplex formed by a face-closed set of simplices, relabeled like
    /// [`SComplex::induced_subcomplex`].
    pub fn subcomplex(&self, simplices: &[Simplex]) -> (SComplex, Vec<usize>) {
        let mut old: Vec<usize> = simplices.iter().flatten().copied().collect();
        old.sort_unstable();
        old.dedup();
        let new_of: HashMap<usize, usize> = old.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let faces: Vec<Simplex> = simplices
            .iter()
            .map(|s| {
                let mut t: Simplex = s.iter().map(|v| new_of[v]).collect();
                t.sort_unstable();
                t
            })
            .collect();
        (
            SComplex::from_maximal(old.len(), &faces).expect("relabeled faces are valid"),
            old,
        )
    }
}

fn same_cyclic(a: &[usize; 3], b: &[usize; 3]) -> bool {
    (0..3).any(|r| (0..3).all(|k| a[k] == b[(k + r) % 3]))
}

fn for_each_permutation(items: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn go(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            go(items, k + 1, f);
            items.swap(k, i);
        }
    }
    go(items, 0, f);
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            sets: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.sets -= 1;
        true
    }

    pub(crate) fn count(&self) -> usize {
        self.sets
    }
}

/// A handful of standard complexes used by tests, examples and the CLI.
pub mod standard {
    use super::SComplex;

    /// The full `d`-simplex.
    pub fn simplex(d: usize) -> SComplex {
        let top: Vec<usize> = (0..=d).collect();
        SComplex::from_maximal(d + 1, &[top]).unwrap()
    }

    /// Boundary of the `(d+1)`-simplex, a triangulated `d`-sphere.
    pub fn sphere_boundary(d: usize) -> SComplex {
        let n = d + 2;
        let facets: Vec<Vec<usize>> = (0..n)
            .map(|skip| (0..n).filter(|&v| v != skip).collect())
            .collect();
        SComplex::from_maximal(n, &facets).unwrap()
    }

    /// Cycle graph on `n ≥ 3` vertices.
    pub fn cycle(n: usize) -> SComplex {
        let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SComplex::from_maximal(n, &edges).unwrap()
    }

    /// The 7-vertex Möbius torus.
    pub fn torus7() -> SComplex {
        let mut tris = Vec::new();
        for i in 0..7 {
            tris.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
            tris.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
        }
        SComplex::from_maximal(7, &tris).unwrap()
    }

    /// The octahedron, a 6-vertex 2-sphere; antipodal pairs are `(i, i + 3)`.
    pub fn octahedron() -> SComplex {
        let mut tris = Vec::new();
        for a in [0, 3] {
            for b in [1, 4] {
                for c in [2, 5] {
                    tris.push(vec![a, b, c]);
                }
            }
        }
        SComplex::from_maximal(6, &tris).unwrap()
    }

    /// A 10-vertex triangulation of the closed orientable surface of genus 2.
    pub fn genus2_10() -> SComplex {
        const TRIS: [[usize; 3]; 24] = [
            [0, 1, 4],
            [0, 1, 6],
            [0, 2, 5],
            [0, 2, 8],
            [0, 3, 4],
            [0, 3, 5],
            [0, 6, 9],
            [0, 7, 8],
            [0, 7, 9],
            [1, 2, 3],
            [1, 2, 5],
            [1, 3, 7],
            [1, 4, 5],
            [1, 6, 8],
            [1, 7, 9],
            [1, 8, 9],
            [2, 3, 4],
            [2, 4, 7],
            [2, 6, 7],
            [2, 6, 9],
            [2, 8, 9],
            [3, 5, 7],
            [4, 5, 7],
            [6, 7, 8],
        ];
        SComplex::from_maximal(10, &TRIS).unwrap()
    }
}
