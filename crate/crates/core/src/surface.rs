//! Branched covers of closed orientable surfaces.
//!
//! Riemann–Hurwitz arithmetic, generating-vector search, minimal vertex counts,
//! orbit-count bounds, and the construction of a regular G-triangulation of the
//! total space from a triangulation of the quotient.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{SComplex, Simplex, UnionFind};
use crate::gcomplex::GComplex;
use crate::group::{Perm, PermGroup};

/// Node budget used by the lift when assigning voltages.
pub const DEFAULT_SEARCH_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("invalid branching data: {0}")]
    InvalidBranchingData(String),
    #[error("branching data is not realizable: Riemann-Hurwitz gives genus {0}")]
    NotRealizable(String),
    #[error("search exceeded its budget of {budget} nodes")]
    SearchBudgetExceeded { budget: usize },
    #[error("invalid generating vector: {0}")]
    InvalidGeneratingVector(GvViolation),
    #[error("case r = {r}, g' = {g_prime}, free = {free} is not covered")]
    CaseNotCovered {
        r: usize,
        g_prime: usize,
        free: bool,
    },
    #[error("non-orientable surfaces have at least one crosscap")]
    NoCrosscaps,
    #[error("complex is not a closed surface")]
    NotASurface,
    #[error("branch vertex {0} is not a vertex of the complex")]
    BranchVertexMissing(usize),
    #[error("branch vertex {0} listed twice")]
    DuplicateBranchVertex(usize),
    #[error("branch vertices {0} and {1} span an edge")]
    BranchVerticesAdjacent(usize, usize),
    #[error("quotient triangulation does not match the branching data: {0}")]
    QuotientMismatch(String),
    #[error("lift verification failed: {0}")]
    VerificationFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GvViolation {
    WrongLength {
        hyperbolic: usize,
        elliptic: usize,
    },
    NotInGroup,
    WrongPeriod {
        position: usize,
        expected: usize,
        got: usize,
    },
    ProductNotIdentity,
    DoesNotGenerate {
        generated_order: usize,
    },
}

impl fmt::Display for GvViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GvViolation::WrongLength {
                hyperbolic,
                elliptic,
            } => {
                write!(
                    f,
                    "expected {hyperbolic} hyperbolic and {elliptic} elliptic elements"
                )
            }
            GvViolation::NotInGroup => write!(f, "element not in the group"),
            GvViolation::WrongPeriod {
                position,
                expected,
                got,
            } => {
                write!(
                    f,
                    "elliptic element {position} has order {got}, expected {expected}"
                )
            }
            GvViolation::ProductNotIdentity => write!(f, "product relation fails"),
            GvViolation::DoesNotGenerate { generated_order } => {
                write!(f, "elements generate a subgroup of order {generated_order}")
            }
        }
    }
}

/// Branching data `(g′; m₁, …, m_r)` of an action of a group of order `m`.
///
/// JSON form: `{"g_prime": .., "m": .., "periods": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingData {
    pub g_prime: usize,
    pub m: usize,
    pub periods: Vec<usize>,
}

impl BranchingData {
    pub fn new(g_prime: usize, m: usize, periods: Vec<usize>) -> Result<Self, SurfaceError> {
        let d = BranchingData {
            g_prime,
            m,
            periods,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), SurfaceError> {
        if self.m == 0 {
            return Err(SurfaceError::InvalidBranchingData(
                "group order must be positive".into(),
            ));
        }
        for &p in &self.periods {
            if p < 2 || !self.m.is_multiple_of(p) {
                return Err(SurfaceError::InvalidBranchingData(format!(
                    "period {p} must be at least 2 and divide {}",
                    self.m
                )));
            }
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.periods.len()
    }

    /// The total-space genus, if Riemann–Hurwitz gives a non-negative integer.
    pub fn genus(&self) -> Result<usize, SurfaceError> {
        let g = rh_genus(self);
        if g.is_integer() && *g.numer() >= 0 {
            Ok(*g.numer() as usize)
        } else {
            Err(SurfaceError::NotRealizable(g.to_string()))
        }
    }
}

fn branching_term(m: usize, periods: &[usize]) -> Ratio<i64> {
    let m = m as i64;
    periods
        .iter()
        .map(|&p| Ratio::new(m * (p as i64 - 1), 2 * p as i64))
        .sum()
}

/// `g = 1 + m(g′ − 1) + ½ m Σ (1 − 1/m_j)`.
pub fn rh_genus(data: &BranchingData) -> Ratio<i64> {
    let m = data.m as i64;
    Ratio::from_integer(1 + m * (data.g_prime as i64 - 1)) + branching_term(data.m, &data.periods)
}

/// Quotient genus `g′` for an action of order `m` on a genus-`g` surface.
pub fn rh_quotient_genus(g: usize, m: usize, periods: &[usize]) -> Ratio<i64> {
    let rest = Ratio::from_integer(g as i64 - 1) - branching_term(m, periods);
    Ratio::from_integer(1) + rest / m as i64
}

/// Group elements `a₁, b₁, …, a_{g′}, b_{g′}` and `c₁, …, c_r`, as element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingVector {
    pub hyperbolic: Vec<usize>,
    pub elliptic: Vec<usize>,
}

/// JSON form of a generating vector, with elements written as permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingVectorSpec {
    pub hyperbolic: Vec<Perm>,
    pub elliptic: Vec<Perm>,
}

impl GeneratingVector {
    pub fn from_spec(spec: &GeneratingVectorSpec, group: &PermGroup) -> Result<Self, GvViolation> {
        let look = |ps: &[Perm]| {
            ps.iter()
                .map(|p| group.index_of(p).ok_or(GvViolation::NotInGroup))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(GeneratingVector {
            hyperbolic: look(&spec.hyperbolic)?,
            elliptic: look(&spec.elliptic)?,
        })
    }

    pub fn to_spec(&self, group: &PermGroup) -> GeneratingVectorSpec {
        let perms = |ix: &[usize]| ix.iter().map(|&i| group.element(i).clone()).collect();
        GeneratingVectorSpec {
            hyperbolic: perms(&self.hyperbolic),
            elliptic: perms(&self.elliptic),
        }
    }

    /// `Π [a_i, b_i] · Π c_j`.
    pub fn product(&self, group: &PermGroup) -> usize {
        let mut p = 0;
        for pair in self.hyperbolic.chunks(2) {
            p = group.mul(p, group.commutator(pair[0], pair[1]));
        }
        self.elliptic.iter().fold(p, |acc, &c| group.mul(acc, c))
    }

    pub fn verify(
        &self,
        group: &PermGroup,
        g_prime: usize,
        periods: &[usize],
    ) -> Result<(), GvViolation> {
        if self.hyperbolic.len() != 2 * g_prime || self.elliptic.len() != periods.len() {
            return Err(GvViolation::WrongLength {
                hyperbolic: 2 * g_prime,
                elliptic: periods.len(),
            });
        }
        if self
            .hyperbolic
            .iter()
            .chain(&self.elliptic)
            .any(|&x| x >= group.order())
        {
            return Err(GvViolation::NotInGroup);
        }
        for (position, (&c, &expected)) in self.elliptic.iter().zip(periods).enumerate() {
            let got = group.element_order(c);
            if got != expected {
                return Err(GvViolation::WrongPeriod {
                    position,
                    expected,
                    got,
                });
            }
        }
        if self.product(group) != 0 {
            return Err(GvViolation::ProductNotIdentity);
        }
        let all: Vec<usize> = self
            .hyperbolic
            .iter()
            .chain(&self.elliptic)
            .copied()
            .collect();
        let generated_order = group.generated_subgroup(&all).order();
        if generated_order != group.order() {
            return Err(GvViolation::DoesNotGenerate { generated_order });
        }
        Ok(())
    }
}

/// Depth-first search for a generating `(g′; m₁, …, m_r)`-vector of `group`.
///
/// Candidates are tried by element order and then index; the last elliptic
/// element is forced by the product relation. `Ok(None)` certifies that no
/// vector exists.
pub fn find_generating_vector(
    group: &PermGroup,
    g_prime: usize,
    periods: &[usize],
    budget: usize,
) -> Result<Option<GeneratingVector>, SurfaceError> {
    let mut by_order: Vec<usize> = (0..group.order()).collect();
    by_order.sort_by_key(|&x| (group.element_order(x), x));
    let elliptic: Vec<Vec<usize>> = periods
        .iter()
        .map(|&p| {
            by_order
                .iter()
                .copied()
                .filter(|&x| group.element_order(x) == p)
                .collect()
        })
        .collect();
    let mut s = GvSearch {
        group,
        g_prime,
        periods,
        by_order,
        elliptic,
        nodes: 0,
        budget,
        chosen: Vec::new(),
    };
    Ok(s.run(0)?.then(|| {
        let (h, e) = s.chosen.split_at(2 * g_prime);
        GeneratingVector {
            hyperbolic: h.to_vec(),
            elliptic: e.to_vec(),
        }
    }))
}

struct GvSearch<'a> {
    group: &'a PermGroup,
    g_prime: usize,
    periods: &'a [usize],
    by_order: Vec<usize>,
    elliptic: Vec<Vec<usize>>,
    nodes: usize,
    budget: usize,
    chosen: Vec<usize>,
}

impl GvSearch<'_> {
    fn run(&mut self, prod: usize) -> Result<bool, SurfaceError> {
        let k = self.chosen.len();
        let h = 2 * self.g_prime;
        let r = self.periods.len();
        if k >= h && (r == 0 || k == h + r - 1) {
            return Ok(self.finish(prod));
        }
        let cands = if k < h {
            self.by_order.clone()
        } else {
            self.elliptic[k - h].clone()
        };
        for x in cands {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(SurfaceError::SearchBudgetExceeded {
                    budget: self.budget,
                });
            }
            let next = if k < h {
                if k % 2 == 1 {
                    self.group
                        .mul(prod, self.group.commutator(self.chosen[k - 1], x))
                } else {
                    prod
                }
            } else {
                self.group.mul(prod, x)
            };
            self.chosen.push(x);
            if self.run(next)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }

    fn finish(&mut self, prod: usize) -> bool {
        if let Some(&last) = self.periods.last() {
            let c = self.group.inv(prod);
            if self.group.element_order(c) != last {
                return false;
            }
            self.chosen.push(c);
        } else if prod != 0 {
            return false;
        }
        if self.group.generated_subgroup(&self.chosen).order() == self.group.order() {
            return true;
        }
        if !self.periods.is_empty() {
            self.chosen.pop();
        }
        false
    }
}

/// Minimal number of vertices of a triangulation of the closed surface of the
/// given genus (crosscap number when non-orientable).
pub fn jungerman_ringel(genus: usize, orientable: bool) -> Result<usize, SurfaceError> {
    let chi = if orientable {
        2 - 2 * genus as i64
    } else if genus == 0 {
        return Err(SurfaceError::NoCrosscaps);
    } else {
        2 - genus as i64
    };
    let x = (49 - 24 * chi) as u64;
    // Least n with 2n − 7 ≥ √x.
    let mut n = (7 + x.isqrt()) / 2;
    while 2 * n < 7 || (2 * n - 7).pow(2) < x {
        n += 1;
    }
    let exceptional = if orientable {
        genus == 2
    } else {
        genus == 2 || genus == 3
    };
    Ok(n as usize + exceptional as usize)
}

/// `n_g` for an orientable surface of genus `g`.
pub fn minimal_vertices(genus: usize) -> usize {
    jungerman_ringel(genus, true).expect("orientable surfaces always have a value")
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceBounds {
    /// `n_{g′}`, the minimal vertex count of the quotient surface.
    pub quotient_vertices: usize,
    /// `max(n_{g′}, r)`.
    pub n: usize,
    pub orbit_lower: usize,
    pub orbit_upper: usize,
    pub ct_lower: usize,
    pub ct_upper: usize,
}

/// Bounds on the number of vertex orbits of a regular G-triangulation and on `ct_G`.
pub fn surface_orbit_bounds(data: &BranchingData) -> Result<SurfaceBounds, SurfaceError> {
    data.validate()?;
    let r = data.r();
    let quotient_vertices = minimal_vertices(data.g_prime);
    let n = quotient_vertices.max(r);
    let upper = n + binom(r, 2) + binom(r, 3);
    Ok(SurfaceBounds {
        quotient_vertices,
        n,
        orbit_lower: n,
        orbit_upper: upper,
        ct_lower: if data.g_prime == 2 {
            9
        } else {
            quotient_vertices
        },
        ct_upper: upper,
    })
}

/// Equivariant LS-category of a surface with an orientation-preserving action.
pub fn surface_cat_g(data: &BranchingData, free: bool) -> Result<usize, SurfaceError> {
    data.validate()?;
    data.genus()?;
    let (r, g) = (data.r(), data.g_prime);
    let not_covered = Err(SurfaceError::CaseNotCovered {
        r,
        g_prime: g,
        free,
    });
    match (free, r, g) {
        (true, 0, g) if g > 0 => Ok(3),
        (true, _, _) => not_covered,
        (false, 0, _) => not_covered,
        (false, r, _) if r >= 3 => Ok(r),
        (false, 2, 0) => Ok(2),
        (false, _, g) if g >= 1 => Ok(3),
        _ => not_covered,
    }
}

fn check_branch_vertices(k: &SComplex, branch: &[usize]) -> Result<Vec<bool>, SurfaceError> {
    let mut is_branch = vec![false; k.num_vertices()];
    for &b in branch {
        if b >= k.num_vertices() {
            return Err(SurfaceError::BranchVertexMissing(b));
        }
        if std::mem::replace(&mut is_branch[b], true) {
            return Err(SurfaceError::DuplicateBranchVertex(b));
        }
    }
    Ok(is_branch)
}

/// Refines a surface triangulation so that no two branch vertices share a simplex.
///
/// The subcomplex spanned by the branch vertices is barycentrically subdivided
/// and triangles meeting it in an edge are split through that edge's midpoint.
/// Midpoints get ids `n + i` for the `i`-th such edge in lexicographic order,
/// then barycentres of the spanned triangles follow.
pub fn expand_for_lift(k: &SComplex, branch: &[usize]) -> Result<SComplex, SurfaceError> {
    k.is_closed_surface().ok_or(SurfaceError::NotASurface)?;
    let is_branch = check_branch_vertices(k, branch)?;
    let n = k.num_vertices();
    let spanned = |s: &Simplex| s.iter().all(|&v| is_branch[v]);
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    for e in k.simplices(1).iter().filter(|e| spanned(e)) {
        let id = n + mid.len();
        mid.insert((e[0], e[1]), id);
    }
    let mut next = n + mid.len();
    let mut tris: Vec<Simplex> = Vec::new();
    for t in k.simplices(2) {
        let b: Vec<usize> = t.iter().copied().filter(|&v| is_branch[v]).collect();
        match b.len() {
            3 => {
                let centre = next;
                next += 1;
                for &v in t {
                    for &w in t.iter().filter(|&&w| w != v) {
                        tris.push(vec![v, mid[&(v.min(w), v.max(w))], centre]);
                    }
                }
            }
            2 => {
                let v0 = t.iter().copied().find(|&v| !is_branch[v]).unwrap();
                let m = mid[&(b[0], b[1])];
                tris.push(vec![v0, b[0], m]);
                tris.push(vec![v0, m, b[1]]);
            }
            _ => tris.push(t.clone()),
        }
    }
    Ok(SComplex::from_maximal(next, &tris).expect("refinement of a valid surface"))
}

#[derive(Debug, Clone)]
pub struct LiftResult {
    pub total: GComplex,
    /// Vertex of the quotient triangulation under each vertex of the total space.
    pub projection: Vec<usize>,
    /// Vertices of the total space over each branch vertex, in input order.
    pub branch_vertex_orbits: Vec<Vec<usize>>,
    /// Monodromy around each branch vertex, as an element index.
    pub holonomy: Vec<usize>,
    pub genus: usize,
}

/// Word in free generators: `(generator, inverted)` letters, kept freely reduced.
type Word = Vec<(usize, bool)>;

fn word_mul(a: &Word, b: &Word) -> Word {
    let mut out = a.clone();
    for &(g, inv) in b {
        if out.last() == Some(&(g, !inv)) {
            out.pop();
        } else {
            out.push((g, inv));
        }
    }
    out
}

fn word_inv(a: &Word) -> Word {
    a.iter().rev().map(|&(g, inv)| (g, !inv)).collect()
}

fn word_eval(group: &PermGroup, w: &Word, values: &[usize], inverses: &[usize]) -> usize {
    w.iter().fold(0, |acc, &(g, inv)| {
        group.mul(acc, if inv { inverses[g] } else { values[g] })
    })
}

/// Voltages on the edges of the quotient with branch vertices removed, as words
/// in the free generators, plus the words that must satisfy constraints.
struct VoltageSystem {
    /// Edges of the punctured quotient, `a < b`, by index.
    edge_id: HashMap<(usize, usize), usize>,
    voltage: Vec<Word>,
    free_generators: usize,
    /// Oriented link cycle around each branch vertex, starting vertex first.
    links: Vec<Vec<usize>>,
    holonomy: Vec<Word>,
    /// Present for closed quotients: the relation left over at the root triangle.
    closing: Option<Word>,
}

impl VoltageSystem {
    fn oriented(&self, a: usize, b: usize) -> Word {
        let w = &self.voltage[self.edge_id[&(a.min(b), a.max(b))]];
        if a < b {
            w.clone()
        } else {
            word_inv(w)
        }
    }

    fn build(k: &SComplex, branch: &[usize], is_branch: &[bool]) -> Result<Self, SurfaceError> {
        let fail = |m: &str| SurfaceError::VerificationFailed(m.to_string());
        let oriented = k.orient().ok_or(SurfaceError::NotASurface)?;
        let all_tris = k.simplices(2);
        let edges: Vec<(usize, usize)> = k
            .simplices(1)
            .iter()
            .filter(|e| !is_branch[e[0]] && !is_branch[e[1]])
            .map(|e| (e[0], e[1]))
            .collect();
        let edge_id: HashMap<(usize, usize), usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        // Spanning tree of the punctured 1-skeleton.
        let mut uf = UnionFind::new(k.num_vertices());
        let tree: Vec<bool> = edges.iter().map(|&(a, b)| uf.union(a, b)).collect();

        // Dual graph on the punctured triangles plus one exterior node.
        let inner: Vec<usize> = (0..all_tris.len())
            .filter(|&i| all_tris[i].iter().all(|&v| !is_branch[v]))
            .collect();
        let node_of: HashMap<usize, usize> =
            inner.iter().enumerate().map(|(n, &t)| (t, n)).collect();
        let exterior = inner.len();
        let nodes = inner.len() + usize::from(!branch.is_empty());
        let mut tris_of_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in all_tris.iter().enumerate() {
            for e in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                tris_of_edge.entry(e).or_default().push(i);
            }
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for (id, e) in edges.iter().enumerate() {
            if tree[id] {
                continue;
            }
            let ends: Vec<usize> = tris_of_edge[e]
                .iter()
                .map(|t| node_of.get(t).copied().unwrap_or(exterior))
                .collect();
            adj[ends[0]].push((id, ends[1]));
            if ends[0] != ends[1] {
                adj[ends[1]].push((id, ends[0]));
            }
        }
        let root = if branch.is_empty() { 0 } else { exterior };
        let mut parent_edge: Vec<Option<usize>> = vec![None; nodes];
        let mut seen = vec![false; nodes];
        let mut order = Vec::with_capacity(nodes);
        if nodes > 0 {
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                order.push(x);
                for &(e, y) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        parent_edge[y] = Some(e);
                        queue.push_back(y);
                    }
                }
            }
        }
        if order.len() != nodes {
            return Err(fail("dual graph of the punctured surface is disconnected"));
        }
        let dual_tree: HashSet<usize> = parent_edge.iter().flatten().copied().collect();

        let mut voltage: Vec<Option<Word>> = vec![None; edges.len()];
        let mut free_generators = 0;
        for id in 0..edges.len() {
            if tree[id] {
                voltage[id] = Some(Vec::new());
            } else if !dual_tree.contains(&id) {
                voltage[id] = Some(vec![(free_generators, false)]);
                free_generators += 1;
            }
        }
        // Each triangle's relation fixes the voltage on the dual-tree edge to its parent;
        // leaves first, so everything else in the relation is already known.
        let relation_sides = |t: &Simplex| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
        let side_word = |voltage: &[Option<Word>], a: usize, b: usize| -> Option<Word> {
            let w = voltage[edge_id[&(a.min(b), a.max(b))]].as_ref()?;
            Some(if a < b { w.clone() } else { word_inv(w) })
        };
        for &node in order.iter().rev() {
            let Some(pe) = parent_edge[node] else {
                continue;
            };
            let sides = relation_sides(&all_tris[inner[node]]);
            let k0 = sides
                .iter()
                .position(|&(a, b)| edge_id[&(a.min(b), a.max(b))] == pe)
                .unwrap();
            let (a1, b1) = sides[(k0 + 1) % 3];
            let (a2, b2) = sides[(k0 + 2) % 3];
            let rest = word_mul(
                &side_word(&voltage, a1, b1).ok_or_else(|| fail("unsolved relation"))?,
                &side_word(&voltage, a2, b2).ok_or_else(|| fail("unsolved relation"))?,
            );
            // X·rest = 1, so X = rest⁻¹ on the side as traversed.
            let (a0, b0) = sides[k0];
            voltage[pe] = Some(if a0 < b0 { word_inv(&rest) } else { rest });
        }
        let voltage: Vec<Word> = voltage
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| fail("edge voltage left undetermined"))?;
        let mut sys = VoltageSystem {
            edge_id,
            voltage,
            free_generators,
            links: Vec::new(),
            holonomy: Vec::new(),
            closing: None,
        };
        if branch.is_empty() && nodes > 0 {
            let t = &all_tris[inner[root]];
            let w = relation_sides(t).iter().fold(Vec::new(), |acc, &(a, b)| {
                word_mul(&acc, &sys.oriented(a, b))
            });
            sys.closing = Some(w);
        }
        for &b in branch {
            let mut cycle = k.link_cycle(b).ok_or(SurfaceError::NotASurface)?;
            let (w0, w1) = (cycle[0], cycle[1]);
            let tri = oriented
                .iter()
                .find(|t| t.contains(&b) && t.contains(&w0) && t.contains(&w1))
                .unwrap();
            let pos = tri.iter().position(|&v| v == b).unwrap();
            if tri[(pos + 1) % 3] != w0 {
                cycle[1..].reverse();
            }
            let len = cycle.len();
            let hol = (0..len).fold(Vec::new(), |acc, i| {
                word_mul(&acc, &sys.oriented(cycle[i], cycle[(i + 1) % len]))
            });
            sys.links.push(cycle);
            sys.holonomy.push(hol);
        }
        Ok(sys)
    }
}

/// Assigns free generators so that every constraint word lands in its allowed
/// class and the values generate the group.
struct VoltageSearch<'a> {
    group: &'a PermGroup,
    /// (word, class id it must land in, deepest generator it uses)
    constraints: Vec<(Word, usize, usize)>,
    classes: Vec<usize>,
    values: Vec<usize>,
    inverses: Vec<usize>,
    nodes: usize,
    budget: usize,
}

impl VoltageSearch<'_> {
    fn run(&mut self, depth: usize, total: usize) -> Result<bool, SurfaceError> {
        for (w, class, deepest) in &self.constraints {
            let ready = if depth == 0 {
                *deepest == usize::MAX
            } else {
                *deepest == depth - 1
            };
            if ready
                && self.classes[word_eval(self.group, w, &self.values, &self.inverses)] != *class
            {
                return Ok(false);
            }
        }
        if depth == total {
            return Ok(self.group.generated_subgroup(&self.values).order() == self.group.order());
        }
        for x in 0..self.group.order() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(SurfaceError::SearchBudgetExceeded {
                    budget: self.budget,
                });
            }
            self.values[depth] = x;
            self.inverses[depth] = self.group.inv(x);
            if self.run(depth + 1, total)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Builds a regular G-triangulation of the branched cover described by a
/// generating vector, over a triangulation `k` of the quotient surface whose
/// branch vertices (listed in the order of `data.periods`) are pairwise non-adjacent.
///
/// The cover is assembled from group-valued voltages on the edges of `k` away
/// from the branch vertices. The result is checked before it is returned.
pub fn lift_triangulation(
    k: &SComplex,
    branch: &[usize],
    data: &BranchingData,
    gv: &GeneratingVector,
    group: &Arc<PermGroup>,
) -> Result<LiftResult, SurfaceError> {
    data.validate()?;
    if group.order() != data.m {
        return Err(SurfaceError::InvalidBranchingData(format!(
            "group has order {}, data says {}",
            group.order(),
            data.m
        )));
    }
    gv.verify(group, data.g_prime, &data.periods)
        .map_err(SurfaceError::InvalidGeneratingVector)?;
    let genus = data.genus()?;
    let ty = k.is_closed_surface().ok_or(SurfaceError::NotASurface)?;
    if !ty.orientable || ty.genus != data.g_prime {
        return Err(SurfaceError::QuotientMismatch(format!(
            "triangulation has genus {} (orientable: {}), expected orientable genus {}",
            ty.genus, ty.orientable, data.g_prime
        )));
    }
    if branch.len() != data.r() {
        return Err(SurfaceError::QuotientMismatch(format!(
            "{} branch vertices for {} periods",
            branch.len(),
            data.r()
        )));
    }
    let is_branch = check_branch_vertices(k, branch)?;
    if let Some(e) = k
        .simplices(1)
        .iter()
        .find(|e| is_branch[e[0]] && is_branch[e[1]])
    {
        return Err(SurfaceError::BranchVerticesAdjacent(e[0], e[1]));
    }

    let sys = VoltageSystem::build(k, branch, &is_branch)?;
    let classes = group.element_classes();
    let values = assign_voltages(group, &sys, &classes, &gv.elliptic).or_else(|e| match e {
        SurfaceError::VerificationFailed(_) => {
            let inverted: Vec<usize> = gv.elliptic.iter().map(|&c| group.inv(c)).collect();
            assign_voltages(group, &sys, &classes, &inverted)
        }
        other => Err(other),
    })?;
    build_cover(k, branch, &is_branch, data, group, &sys, &values, genus)
}

fn assign_voltages(
    group: &PermGroup,
    sys: &VoltageSystem,
    classes: &[usize],
    elliptic: &[usize],
) -> Result<Vec<usize>, SurfaceError> {
    let deepest = |w: &Word| w.iter().map(|&(g, _)| g).max().unwrap_or(usize::MAX);
    let mut constraints: Vec<(Word, usize, usize)> = sys
        .holonomy
        .iter()
        .zip(elliptic)
        .map(|(w, &c)| (w.clone(), classes[c], deepest(w)))
        .collect();
    if let Some(w) = &sys.closing {
        constraints.push((w.clone(), classes[0], deepest(w)));
    }
    let total = sys.free_generators;
    let mut search = VoltageSearch {
        group,
        constraints,
        classes: classes.to_vec(),
        values: vec![0; total],
        inverses: vec![0; total],
        nodes: 0,
        budget: DEFAULT_SEARCH_BUDGET,
    };
    if search.run(0, total)? {
        Ok(search.values)
    } else {
        Err(SurfaceError::VerificationFailed(
            "no voltage assignment realizes the generating vector".into(),
        ))
    }
}

#[allow(clippy::too_many_arguments)]
fn build_cover(
    k: &SComplex,
    branch: &[usize],
    is_branch: &[bool],
    data: &BranchingData,
    group: &Arc<PermGroup>,
    sys: &VoltageSystem,
    values: &[usize],
    genus: usize,
) -> Result<LiftResult, SurfaceError> {
    let fail = |m: String| SurfaceError::VerificationFailed(m);
    let m = group.order();
    let inverses: Vec<usize> = values.iter().map(|&x| group.inv(x)).collect();
    let edge_value: Vec<usize> = sys
        .voltage
        .iter()
        .map(|w| word_eval(group, w, values, &inverses))
        .collect();
    let vol = |a: usize, b: usize| {
        let x = edge_value[sys.edge_id[&(a.min(b), a.max(b))]];
        if a < b {
            x
        } else {
            group.inv(x)
        }
    };

    let mut rank = vec![usize::MAX; k.num_vertices()];
    let mut projection = Vec::new();
    for v in (0..k.num_vertices()).filter(|&v| !is_branch[v]) {
        rank[v] = projection.len() / m;
        projection.extend(std::iter::repeat_n(v, m));
    }
    let id = |w: usize, g: usize| rank[w] * m + g;

    // Vertices over branch vertex j are the cosets x·⟨h_j⟩, keyed by least element.
    let mut holonomy = Vec::new();
    let mut coset_vertex: Vec<HashMap<usize, usize>> = Vec::new();
    let mut coset_of: Vec<Vec<usize>> = Vec::new();
    let mut branch_vertex_orbits = Vec::new();
    for (j, w) in sys.holonomy.iter().enumerate() {
        let h = word_eval(group, w, values, &inverses);
        holonomy.push(h);
        let cyc = group.generated_subgroup(&[h]);
        let key: Vec<usize> = (0..m)
            .map(|x| {
                cyc.elements()
                    .iter()
                    .map(|&s| group.mul(x, s))
                    .min()
                    .unwrap()
            })
            .collect();
        let mut keys: Vec<usize> = key.clone();
        keys.sort_unstable();
        keys.dedup();
        let mut ids = HashMap::new();
        let mut orbit = Vec::new();
        for kk in keys {
            ids.insert(kk, projection.len());
            orbit.push(projection.len());
            projection.push(branch[j]);
        }
        coset_vertex.push(ids);
        coset_of.push(key);
        branch_vertex_orbits.push(orbit);
    }
    let coset_id = |j: usize, x: usize| coset_vertex[j][&coset_of[j][x]];

    let mut tris: Vec<[usize; 3]> = Vec::new();
    for t in k
        .simplices(2)
        .iter()
        .filter(|t| t.iter().all(|&v| !is_branch[v]))
    {
        let (ab, bc) = (vol(t[0], t[1]), vol(t[1], t[2]));
        for g in 0..m {
            let gb = group.mul(g, ab);
            tris.push([id(t[0], g), id(t[1], gb), id(t[2], group.mul(gb, bc))]);
        }
    }
    for (j, cycle) in sys.links.iter().enumerate() {
        let len = cycle.len();
        let mut prefix = 0;
        for i in 0..len {
            let (u, v) = (cycle[i], cycle[(i + 1) % len]);
            let step = vol(u, v);
            let pinv = group.inv(prefix);
            for x in 0..m {
                tris.push([
                    id(u, x),
                    id(v, group.mul(x, step)),
                    coset_id(j, group.mul(x, pinv)),
                ]);
            }
            prefix = group.mul(prefix, step);
        }
    }
    let total = SComplex::from_maximal(projection.len(), &tris).map_err(|e| fail(e.to_string()))?;

    let action = (0..m)
        .map(|h| {
            let mut img = vec![0; projection.len()];
            for v in (0..k.num_vertices()).filter(|&v| !is_branch[v]) {
                for g in 0..m {
                    img[id(v, g)] = id(v, group.mul(h, g));
                }
            }
            for j in 0..branch.len() {
                for x in 0..m {
                    img[coset_id(j, x)] = coset_id(j, group.mul(h, x));
                }
            }
            Perm::new(img)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| fail(e.to_string()))?;
    let total = GComplex::from_element_action(total, group.clone(), action)
        .map_err(|e| fail(e.to_string()))?;

    let result = LiftResult {
        total,
        projection,
        branch_vertex_orbits,
        holonomy,
        genus,
    };
    verify_lift(&result, k, data).map_err(fail)?;
    Ok(result)
}

/// Checks a lift against everything the construction promises.
pub fn verify_lift(lift: &LiftResult, k: &SComplex, data: &BranchingData) -> Result<(), String> {
    let x = &lift.total;
    let surface = x
        .complex()
        .is_closed_surface()
        .ok_or("total space is not a closed surface")?;
    if !surface.orientable || surface.genus != lift.genus {
        return Err(format!(
            "total space has genus {} (orientable: {}), expected orientable genus {}",
            surface.genus, surface.orientable, lift.genus
        ));
    }
    let report = x.regularity();
    if !report.is_strictly_regular() {
        return Err(format!("action is not strictly regular: {report:?}"));
    }
    let m = data.m as i64;
    let expected_chi =
        m * k.euler_characteristic() - data.periods.iter().map(|&p| m - m / p as i64).sum::<i64>();
    if x.complex().euler_characteristic() != expected_chi {
        return Err(format!(
            "Euler characteristic {} differs from {expected_chi}",
            x.complex().euler_characteristic()
        ));
    }
    let q = x.quotient().map_err(|e| e.to_string())?;
    // Orbit id → quotient vertex must be a well-defined bijection carrying q onto k.
    let mut to_k = vec![usize::MAX; q.complex.num_vertices()];
    for (v, &o) in q.vertex_projection.iter().enumerate() {
        let want = lift.projection[v];
        if to_k[o] != usize::MAX && to_k[o] != want {
            return Err(format!("orbit {o} projects to two vertices"));
        }
        to_k[o] = want;
    }
    let distinct: BTreeMap<usize, ()> = to_k.iter().map(|&v| (v, ())).collect();
    if to_k.len() != k.num_vertices() || distinct.len() != to_k.len() {
        return Err(format!(
            "{} vertex orbits over {} quotient vertices",
            to_k.len(),
            k.num_vertices()
        ));
    }
    if q.complex.f_vector() != k.f_vector() {
        return Err("quotient f-vector differs".into());
    }
    for s in q.complex.iter() {
        let mut t: Simplex = s.iter().map(|&v| to_k[v]).collect();
        t.sort_unstable();
        if !k.contains(&t) {
            return Err(format!("quotient simplex {t:?} is not in the base"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::standard::*;

    fn data(g_prime: usize, m: usize, periods: &[usize]) -> BranchingData {
        BranchingData::new(g_prime, m, periods.to_vec()).unwrap()
    }

    #[test]
    fn riemann_hurwitz_examples() {
        assert_eq!(rh_genus(&data(5, 1, &[])), Ratio::from_integer(5));
        assert_eq!(rh_genus(&data(0, 2, &[2; 6])), Ratio::from_integer(2));
        assert_eq!(rh_genus(&data(2, 3, &[])), Ratio::from_integer(4));
        assert_eq!(rh_quotient_genus(5, 1, &[]), Ratio::from_integer(5));
        assert_eq!(rh_quotient_genus(2, 2, &[2; 6]), Ratio::from_integer(0));
        assert_eq!(rh_quotient_genus(4, 3, &[]), Ratio::from_integer(2));
        // Three branch points of order 2 under Z₂ leave a half-integer.
        assert_eq!(rh_genus(&data(0, 2, &[2; 3])), Ratio::new(1, 2));
        assert!(data(0, 2, &[2; 3]).genus().is_err());
        assert!(BranchingData::new(0, 4, vec![3]).is_err());
    }

    #[test]
    fn generating_vector_examples() {
        let z2 = PermGroup::cyclic(2);
        let gv = find_generating_vector(&z2, 0, &[2; 6], 10_000)
            .unwrap()
            .unwrap();
        assert_eq!(gv.elliptic, vec![1; 6]);
        gv.verify(&z2, 0, &[2; 6]).unwrap();

        let z3 = PermGroup::cyclic(3);
        let gv = find_generating_vector(&z3, 2, &[], 10_000)
            .unwrap()
            .unwrap();
        gv.verify(&z3, 2, &[]).unwrap();
        assert_eq!(find_generating_vector(&z3, 0, &[3], 10_000).unwrap(), None);

        let s3 = PermGroup::symmetric(3).unwrap();
        let gv = find_generating_vector(&s3, 0, &[2, 2, 3], 10_000)
            .unwrap()
            .unwrap();
        gv.verify(&s3, 0, &[2, 2, 3]).unwrap();
        assert_eq!(
            find_generating_vector(&s3, 3, &[], 5),
            Err(SurfaceError::SearchBudgetExceeded { budget: 5 })
        );
        let bad = GeneratingVector {
            hyperbolic: vec![],
            elliptic: vec![1, 2],
        };
        assert_eq!(bad.verify(&z3, 0, &[3, 3]), Ok(()));
        let bad = GeneratingVector {
            hyperbolic: vec![],
            elliptic: vec![1, 1],
        };
        assert_eq!(
            bad.verify(&z3, 0, &[3, 3]),
            Err(GvViolation::ProductNotIdentity)
        );
    }

    #[test]
    fn jungerman_ringel_values() {
        let orientable: Vec<usize> = (0..5).map(|g| jungerman_ringel(g, true).unwrap()).collect();
        assert_eq!(orientable, vec![4, 7, 10, 10, 11]);
        let crosscaps: Vec<usize> = (1..5)
            .map(|k| jungerman_ringel(k, false).unwrap())
            .collect();
        assert_eq!(crosscaps, vec![6, 8, 9, 9]);
        assert_eq!(jungerman_ringel(0, false), Err(SurfaceError::NoCrosscaps));
    }

    #[test]
    fn orbit_bounds() {
        let free = surface_orbit_bounds(&data(1, 3, &[])).unwrap();
        assert_eq!((free.orbit_lower, free.orbit_upper), (7, 7));
        let two = surface_orbit_bounds(&data(0, 5, &[5, 5])).unwrap();
        assert_eq!((two.orbit_lower, two.orbit_upper), (4, 5));
        let hyper = surface_orbit_bounds(&data(0, 2, &[2; 6])).unwrap();
        assert_eq!((hyper.orbit_lower, hyper.orbit_upper), (6, 41));
        assert_eq!(surface_orbit_bounds(&data(2, 3, &[])).unwrap().ct_lower, 9);
    }

    #[test]
    fn category_cases() {
        assert_eq!(surface_cat_g(&data(1, 3, &[]), true), Ok(3));
        assert_eq!(surface_cat_g(&data(0, 2, &[2; 6]), false), Ok(6));
        assert_eq!(surface_cat_g(&data(0, 5, &[5, 5]), false), Ok(2));
        assert_eq!(surface_cat_g(&data(1, 2, &[2, 2]), false), Ok(3));
        assert!(matches!(
            surface_cat_g(&data(0, 2, &[2]), false),
            Err(SurfaceError::NotRealizable(_))
        ));
        assert!(matches!(
            surface_cat_g(&data(0, 1, &[]), true),
            Err(SurfaceError::CaseNotCovered { .. })
        ));
    }

    #[test]
    fn expansion_cases() {
        let oct = octahedron();
        assert_eq!(expand_for_lift(&oct, &[0]).unwrap(), oct);
        assert_eq!(expand_for_lift(&oct, &[0, 3]).unwrap(), oct);
        let two = expand_for_lift(&oct, &[0, 1]).unwrap();
        assert_eq!(two.num_vertices(), 7);
        let three = expand_for_lift(&oct, &[0, 1, 2]).unwrap();
        assert_eq!(three.num_vertices(), 10);
        let all = expand_for_lift(&oct, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(all.f_vector(), vec![26, 72, 48]);
        for (k, b) in [
            (&two, &[0, 1][..]),
            (&three, &[0, 1, 2]),
            (&all, &[0, 1, 2, 3, 4, 5]),
        ] {
            assert!(k.is_closed_surface().is_some());
            assert!(k
                .simplices(1)
                .iter()
                .all(|e| !(b.contains(&e[0]) && b.contains(&e[1]))));
        }
        assert_eq!(
            expand_for_lift(&oct, &[9]),
            Err(SurfaceError::BranchVertexMissing(9))
        );
        assert_eq!(
            expand_for_lift(&cycle(4), &[0]),
            Err(SurfaceError::NotASurface)
        );
    }

    #[test]
    fn trivial_lift_is_identity() {
        let g = Arc::new(PermGroup::cyclic(1));
        let d = data(1, 1, &[]);
        let gv = find_generating_vector(&g, 1, &[], 1000).unwrap().unwrap();
        let lift = lift_triangulation(&torus7(), &[], &d, &gv, &g).unwrap();
        assert_eq!(lift.total.complex(), &torus7());
        assert_eq!(lift.projection, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn z3_over_sphere_gives_torus() {
        let g = Arc::new(PermGroup::cyclic(3));
        let d = data(0, 3, &[3, 3, 3]);
        let k = expand_for_lift(&sphere_boundary(2), &[0, 1, 2]).unwrap();
        let gv = find_generating_vector(&g, 0, &[3, 3, 3], 10_000)
            .unwrap()
            .unwrap();
        let lift = lift_triangulation(&k, &[0, 1, 2], &d, &gv, &g).unwrap();
        assert_eq!(lift.genus, 1);
        assert_eq!(
            lift.total.complex().num_vertices(),
            3 * k.num_vertices() - 6
        );
        assert!(lift.branch_vertex_orbits.iter().all(|o| o.len() == 1));
    }

    #[test]
    fn z2_over_sphere_with_two_branch_points() {
        let g = Arc::new(PermGroup::cyclic(2));
        let d = data(0, 2, &[2, 2]);
        let gv = find_generating_vector(&g, 0, &[2, 2], 1000)
            .unwrap()
            .unwrap();
        let lift = lift_triangulation(&octahedron(), &[0, 3], &d, &gv, &g).unwrap();
        assert_eq!(lift.genus, 0);
        assert_eq!(lift.total.complex().f_vector(), vec![10, 24, 16]);
    }

    #[test]
    fn lift_rejects_bad_inputs() {
        let g = Arc::new(PermGroup::cyclic(2));
        let d = data(0, 2, &[2, 2]);
        let gv = GeneratingVector {
            hyperbolic: vec![],
            elliptic: vec![1, 1],
        };
        assert_eq!(
            lift_triangulation(&octahedron(), &[0, 1], &d, &gv, &g).unwrap_err(),
            SurfaceError::BranchVerticesAdjacent(0, 1)
        );
        let bad = GeneratingVector {
            hyperbolic: vec![],
            elliptic: vec![1, 0],
        };
        assert!(matches!(
            lift_triangulation(&octahedron(), &[0, 3], &d, &bad, &g).unwrap_err(),
            SurfaceError::InvalidGeneratingVector(_)
        ));
        assert!(matches!(
            lift_triangulation(&torus7(), &[0, 3], &d, &gv, &g).unwrap_err(),
            SurfaceError::QuotientMismatch(_)
        ));
    }
}
