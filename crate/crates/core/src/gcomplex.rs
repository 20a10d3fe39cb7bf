//! Simplicial complexes with a simplicial action of a finite permutation group.
//!
//! The action is stored as one vertex permutation per group element. All
//! regularity checks return concrete witnesses that can be re-checked by hand.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, ComplexSpec, SComplex, Simplex, UnionFind};
use crate::group::{GroupError, GroupSpec, Perm, PermGroup, Subgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    R1,
    R2,
    R3,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GComplexError {
    #[error("expected {expected} generator images, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },
    #[error("vertex permutation has degree {got}, complex has {expected} vertices")]
    VertexCountMismatch { expected: usize, got: usize },
    #[error(
        "generator images do not define a homomorphism (element {element}, generator {generator})"
    )]
    NotAHomomorphism { element: usize, generator: usize },
    #[error("generator {generator} maps simplex {simplex:?} outside the complex")]
    NotSimplicial { generator: usize, simplex: Simplex },
    #[error("action is not regular: {condition:?} fails")]
    NotRegular { condition: Condition },
    #[error("simplex orbits {first:?} and {second:?} have the same image in the quotient")]
    MultiEdge { first: Simplex, second: Simplex },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// JSON form: `{"complex": ..., "group": ..., "generator_vertex_images": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub complex: ComplexSpec,
    pub group: GroupSpec,
    pub generator_vertex_images: Vec<Vec<usize>>,
}

impl ActionSpec {
    pub fn build(&self, cap: usize) -> Result<GComplex, GComplexError> {
        let complex = self.complex.build()?;
        let group = Arc::new(self.group.build(cap)?);
        let images = self
            .generator_vertex_images
            .iter()
            .map(|v| Perm::new(v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        GComplex::build_action(complex, group, images)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct R1Witness {
    pub simplex: Simplex,
    pub vertex: usize,
    pub element: usize,
    pub image: usize,
}

/// `⟨v_0..v_n⟩` and `⟨g_0 v_0 .. g_n v_n⟩` are both simplices but no single
/// element maps `v_i ↦ g_i v_i` for all `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct R2Witness {
    pub simplex: Simplex,
    pub elements: Vec<usize>,
    pub image: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct R3Witness {
    pub simplex: Simplex,
    /// Two vertices of the simplex whose stabilizers are not nested.
    pub vertices: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Check<W> {
    fn from_witness(w: Option<W>) -> Self {
        Check {
            holds: w.is_none(),
            witness: w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub r1: Check<R1Witness>,
    pub r2: Check<R2Witness>,
    pub r3: Check<R3Witness>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.r1.holds && self.r2.holds
    }

    pub fn is_strictly_regular(&self) -> bool {
        self.r1.holds && self.r2.holds && self.r3.holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplexOrbit {
    pub representative: Simplex,
    pub members: Vec<Simplex>,
    /// Order of the setwise stabilizer of the representative.
    pub stabilizer_order: usize,
    /// Order of the pointwise stabilizer of the representative.
    pub pointwise_stabilizer_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivariantFVector {
    pub orbit_counts: Vec<usize>,
    /// Setwise stabilizer order of each orbit representative, per dimension.
    pub stabilizer_orders: Vec<Vec<usize>>,
}

impl EquivariantFVector {
    /// `Σ |G| / |G_σ|` over orbit representatives, per dimension.
    pub fn expanded(&self, group_order: usize) -> Vec<usize> {
        self.stabilizer_orders
            .iter()
            .map(|s| s.iter().map(|&o| group_order / o).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub complex: SComplex,
    /// Quotient vertex of each vertex.
    pub vertex_projection: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct NerveResult {
    pub nerve: GComplex,
    /// Nerve vertex (cover element) corresponding to each vertex of the input.
    pub isomorphism: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GComplex {
    complex: SComplex,
    group: Arc<PermGroup>,
    action: Vec<Perm>,
}

impl GComplex {
    /// Extends one vertex permutation per group generator to an action of the whole group.
    pub fn build_action(
        complex: SComplex,
        group: Arc<PermGroup>,
        generator_images: Vec<Perm>,
    ) -> Result<Self, GComplexError> {
        let gens = group.generators().len();
        if generator_images.len() != gens {
            return Err(GComplexError::WrongGeneratorCount {
                expected: gens,
                got: generator_images.len(),
            });
        }
        let n = complex.num_vertices();
        if let Some(p) = generator_images.iter().find(|p| p.degree() != n) {
            return Err(GComplexError::VertexCountMismatch {
                expected: n,
                got: p.degree(),
            });
        }
        let mut action = Vec::with_capacity(group.order());
        action.push(Perm::identity(n));
        for &(parent, s) in &group.word_tree()[1..] {
            action.push(generator_images[s].compose(&action[parent]));
        }
        Self::from_element_action_with_images(complex, group, action, &generator_images)
    }

    /// Builds a G-complex from the vertex permutation of every group element.
    pub fn from_element_action(
        complex: SComplex,
        group: Arc<PermGroup>,
        action: Vec<Perm>,
    ) -> Result<Self, GComplexError> {
        let images: Vec<Perm> = group
            .generators()
            .iter()
            .map(|g| action[group.index_of(g).unwrap()].clone())
            .collect();
        Self::from_element_action_with_images(complex, group, action, &images)
    }

    fn from_element_action_with_images(
        complex: SComplex,
        group: Arc<PermGroup>,
        action: Vec<Perm>,
        images: &[Perm],
    ) -> Result<Self, GComplexError> {
        let n = complex.num_vertices();
        if action.len() != group.order() {
            return Err(GComplexError::WrongGeneratorCount {
                expected: group.order(),
                got: action.len(),
            });
        }
        if let Some(p) = action.iter().find(|p| p.degree() != n) {
            return Err(GComplexError::VertexCountMismatch {
                expected: n,
                got: p.degree(),
            });
        }
        if !action[0].is_identity() {
            return Err(GComplexError::NotAHomomorphism {
                element: 0,
                generator: 0,
            });
        }
        // φ(s·g) = φ(s)∘φ(g) for every generator s and element g forces a homomorphism.
        for (s, gen) in group.generators().iter().enumerate() {
            let gi = group.index_of(gen).unwrap();
            for g in 0..group.order() {
                if action[group.mul(gi, g)] != images[s].compose(&action[g]) {
                    return Err(GComplexError::NotAHomomorphism {
                        element: g,
                        generator: s,
                    });
                }
            }
        }
        for (s, img) in images.iter().enumerate() {
            for sigma in complex.maximal_simplices() {
                let t = map_simplex(img, &sigma);
                if !complex.contains(&t) {
                    return Err(GComplexError::NotSimplicial {
                        generator: s,
                        simplex: sigma,
                    });
                }
            }
        }
        Ok(GComplex {
            complex,
            group,
            action,
        })
    }

    /// The complex with the trivial action of `group`.
    pub fn trivial(complex: SComplex, group: Arc<PermGroup>) -> Self {
        let n = complex.num_vertices();
        let action = vec![Perm::identity(n); group.order()];
        GComplex {
            complex,
            group,
            action,
        }
    }

    pub fn complex(&self) -> &SComplex {
        &self.complex
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn vertex_action(&self, g: usize) -> &Perm {
        &self.action[g]
    }

    #[inline]
    pub fn act_vertex(&self, g: usize, v: usize) -> usize {
        self.action[g].apply(v)
    }

    pub fn act_simplex(&self, g: usize, s: &[usize]) -> Simplex {
        map_simplex(&self.action[g], s)
    }

    pub fn spec(&self) -> ActionSpec {
        ActionSpec {
            complex: self.complex.spec(),
            group: self.group.spec(),
            generator_vertex_images: self
                .group
                .generators()
                .iter()
                .map(|g| {
                    self.action[self.group.index_of(g).unwrap()]
                        .images()
                        .to_vec()
                })
                .collect(),
        }
    }

    pub fn vertex_stabilizer(&self, v: usize) -> Subgroup {
        self.group
            .stabilizer(|g, x: &usize| self.act_vertex(g, *x), &v)
    }

    /// Setwise stabilizer of a simplex.
    pub fn simplex_stabilizer(&self, s: &[usize]) -> Subgroup {
        let s = s.to_vec();
        self.group
            .stabilizer(|g, x: &Simplex| self.act_simplex(g, x), &s)
    }

    pub fn pointwise_stabilizer(&self, s: &[usize]) -> Subgroup {
        s.iter()
            .map(|&v| self.vertex_stabilizer(v))
            .reduce(|a, b| a.intersection(&b))
            .unwrap_or_else(|| self.group.full_subgroup())
    }

    /// Orbit id of every vertex, numbered by smallest member.
    pub fn vertex_orbits(&self) -> Vec<usize> {
        let n = self.complex.num_vertices();
        let mut id = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if id[v] == usize::MAX {
                for g in 0..self.group.order() {
                    id[self.act_vertex(g, v)] = next;
                }
                next += 1;
            }
        }
        id
    }

    pub fn check_r1(&self) -> Check<R1Witness> {
        for sigma in self.complex.maximal_simplices() {
            for &v in &sigma {
                for g in 0..self.group.order() {
                    let w = self.act_vertex(g, v);
                    if w != v && sigma.binary_search(&w).is_ok() {
                        return Check::from_witness(Some(R1Witness {
                            simplex: sigma,
                            vertex: v,
                            element: g,
                            image: w,
                        }));
                    }
                }
            }
        }
        Check::from_witness(None)
    }

    /// R2 holds iff simplices sharing a vertex-orbit profile form one orbit, and
    /// every orbit-respecting self-bijection of a simplex is induced by a group element.
    pub fn check_r2(&self) -> Check<R2Witness> {
        let orbit = self.vertex_orbits();
        let mut best: Option<R2Witness> = None;
        let mut offer = |w: R2Witness| {
            let better = match &best {
                None => true,
                Some(b) => (&w.simplex, &w.image) < (&b.simplex, &b.image),
            };
            if better {
                best = Some(w);
            }
        };
        for d in 0..=self.complex.dim().unwrap_or(0) {
            let mut buckets: BTreeMap<Vec<usize>, Vec<&Simplex>> = BTreeMap::new();
            for s in self.complex.simplices(d) {
                let mut profile: Vec<usize> = s.iter().map(|&v| orbit[v]).collect();
                profile.sort_unstable();
                buckets.entry(profile).or_default().push(s);
            }
            for members in buckets.values() {
                let sigma = members[0];
                let sigma_orbit: HashSet<Simplex> = (0..self.group.order())
                    .map(|g| self.act_simplex(g, sigma))
                    .collect();
                if let Some(tau) = members.iter().find(|t| !sigma_orbit.contains(**t)) {
                    let image = self.orbit_matching(sigma, tau, &orbit);
                    offer(self.r2_witness(sigma, image));
                }
                // Orbit-respecting self-bijections of each orbit representative.
                let mut reps: Vec<&Simplex> = Vec::new();
                let mut seen: HashSet<Simplex> = HashSet::new();
                for &s in members {
                    if seen.contains(s) {
                        continue;
                    }
                    reps.push(s);
                    seen.extend((0..self.group.order()).map(|g| self.act_simplex(g, s)));
                }
                for s in reps {
                    if let Some(image) = self.unrealized_self_matching(s, &orbit) {
                        offer(self.r2_witness(s, image));
                    }
                }
            }
        }
        Check::from_witness(best)
    }

    /// Orbit-respecting bijection `sigma → tau`, pairing equal orbits in ascending vertex order.
    fn orbit_matching(&self, sigma: &[usize], tau: &[usize], orbit: &[usize]) -> Vec<usize> {
        let mut used = vec![false; tau.len()];
        sigma
            .iter()
            .map(|&v| {
                let j = (0..tau.len())
                    .find(|&j| !used[j] && orbit[tau[j]] == orbit[v])
                    .expect("same orbit profile");
                used[j] = true;
                tau[j]
            })
            .collect()
    }

    fn unrealized_self_matching(&self, s: &[usize], orbit: &[usize]) -> Option<Vec<usize>> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for &v in s {
            *counts.entry(orbit[v]).or_default() += 1;
        }
        if counts.values().all(|&c| c == 1) {
            return None;
        }
        let realized: HashSet<Vec<usize>> = (0..self.group.order())
            .map(|g| s.iter().map(|&v| self.act_vertex(g, v)).collect())
            .collect();
        let mut found = None;
        let mut current = Vec::with_capacity(s.len());
        let mut used = vec![false; s.len()];
        self.search_matchings(s, orbit, &mut current, &mut used, &mut |image| {
            if found.is_none() && !realized.contains(image) {
                found = Some(image.to_vec());
            }
        });
        found
    }

    fn search_matchings(
        &self,
        s: &[usize],
        orbit: &[usize],
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        f: &mut impl FnMut(&[usize]),
    ) {
        let k = current.len();
        if k == s.len() {
            f(current);
            return;
        }
        for j in 0..s.len() {
            if !used[j] && orbit[s[j]] == orbit[s[k]] {
                used[j] = true;
                current.push(s[j]);
                self.search_matchings(s, orbit, current, used, f);
                current.pop();
                used[j] = false;
            }
        }
    }

    fn r2_witness(&self, sigma: &[usize], image: Vec<usize>) -> R2Witness {
        let elements = sigma
            .iter()
            .zip(&image)
            .map(|(&v, &w)| {
                (0..self.group.order())
                    .find(|&g| self.act_vertex(g, v) == w)
                    .expect("same orbit")
            })
            .collect();
        R2Witness {
            simplex: sigma.to_vec(),
            elements,
            image,
        }
    }

    pub fn check_r3(&self) -> Check<R3Witness> {
        let stabs: Vec<Subgroup> = (0..self.complex.num_vertices())
            .map(|v| self.vertex_stabilizer(v))
            .collect();
        for sigma in self.complex.maximal_simplices() {
            for (i, &u) in sigma.iter().enumerate() {
                for &v in &sigma[i + 1..] {
                    if !stabs[u].is_subgroup_of(&stabs[v]) && !stabs[v].is_subgroup_of(&stabs[u]) {
                        return Check::from_witness(Some(R3Witness {
                            simplex: sigma,
                            vertices: (u, v),
                        }));
                    }
                }
            }
        }
        Check::from_witness(None)
    }

    pub fn regularity(&self) -> RegularityReport {
        RegularityReport {
            r1: self.check_r1(),
            r2: self.check_r2(),
            r3: self.check_r3(),
        }
    }

    /// Partition of all simplices into orbits, by dimension and then by representative.
    pub fn simplex_orbits(&self) -> Vec<SimplexOrbit> {
        let mut out = Vec::new();
        let mut assigned: HashSet<Simplex> = HashSet::new();
        for s in self.complex.iter() {
            if assigned.contains(s) {
                continue;
            }
            let mut members = Vec::new();
            let mut stabilizer_order = 0;
            for g in 0..self.group.order() {
                let t = self.act_simplex(g, s);
                if t == *s {
                    stabilizer_order += 1;
                }
                members.push(t);
            }
            members.sort();
            members.dedup();
            assigned.extend(members.iter().cloned());
            let pointwise = (0..self.group.order())
                .filter(|&g| s.iter().all(|&v| self.act_vertex(g, v) == v))
                .count();
            out.push(SimplexOrbit {
                representative: s.clone(),
                members,
                stabilizer_order,
                pointwise_stabilizer_order: pointwise,
            });
        }
        out
    }

    pub fn equivariant_f_vector(&self) -> EquivariantFVector {
        let dims = self.complex.f_vector().len();
        let mut orbit_counts = vec![0; dims];
        let mut stabilizer_orders = vec![Vec::new(); dims];
        for o in self.simplex_orbits() {
            let d = o.representative.len() - 1;
            orbit_counts[d] += 1;
            stabilizer_orders[d].push(o.stabilizer_order);
        }
        EquivariantFVector {
            orbit_counts,
            stabilizer_orders,
        }
    }

    /// The orbit complex `K/G`.
    ///
    /// Rejects actions violating R1, then quotients whose simplex orbits collide,
    /// then any remaining R2 violation.
    pub fn quotient(&self) -> Result<Quotient, GComplexError> {
        if !self.check_r1().holds {
            return Err(GComplexError::NotRegular {
                condition: Condition::R1,
            });
        }
        let proj = self.vertex_orbits();
        let num = proj.iter().copied().max().map_or(0, |m| m + 1);
        let mut image_of: HashMap<Simplex, Simplex> = HashMap::new();
        for o in self.simplex_orbits() {
            let mut img: Simplex = o.representative.iter().map(|&v| proj[v]).collect();
            img.sort_unstable();
            if let Some(prev) = image_of.insert(img, o.representative.clone()) {
                return Err(GComplexError::MultiEdge {
                    first: prev,
                    second: o.representative,
                });
            }
        }
        if !self.check_r2().holds {
            return Err(GComplexError::NotRegular {
                condition: Condition::R2,
            });
        }
        let simplices: Vec<Simplex> = image_of.into_keys().collect();
        let complex = SComplex::from_maximal(num, &simplices)?;
        Ok(Quotient {
            complex,
            vertex_projection: proj,
        })
    }

    /// `K^H`: simplices whose vertices are all fixed by `h`, relabeled, with the
    /// original index of each vertex.
    pub fn fixed_subcomplex(&self, h: &Subgroup) -> (SComplex, Vec<usize>) {
        let fixed: Vec<usize> = (0..self.complex.num_vertices())
            .filter(|&v| h.elements().iter().all(|&g| self.act_vertex(g, v) == v))
            .collect();
        self.complex.induced_subcomplex(&fixed)
    }

    /// `GA` for a subcomplex `A`, as a sorted face-closed list of simplices.
    pub fn saturation(&self, a: &[Simplex]) -> Result<Vec<Simplex>, GComplexError> {
        let mut out: HashSet<Simplex> = HashSet::new();
        for s in a {
            let mut s = s.clone();
            s.sort_unstable();
            if !self.complex.contains(&s) {
                return Err(ComplexError::NotASubcomplex(s).into());
            }
            for g in 0..self.group.order() {
                let t = self.act_simplex(g, &s);
                for mask in 1u64..(1u64 << t.len()) {
                    out.insert(
                        (0..t.len())
                            .filter(|i| mask & (1 << i) != 0)
                            .map(|i| t[i])
                            .collect(),
                    );
                }
            }
        }
        let mut v: Vec<Simplex> = out.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(v)
    }

    /// Nerve of the cover by open vertex stars, with the induced action, and the
    /// vertex ↔ cover-element isomorphism.
    pub fn star_cover_nerve(&self) -> Result<NerveResult, GComplexError> {
        let report = self.regularity();
        if !report.r1.holds {
            return Err(GComplexError::NotRegular {
                condition: Condition::R1,
            });
        }
        if !report.r2.holds {
            return Err(GComplexError::NotRegular {
                condition: Condition::R2,
            });
        }
        let n = self.complex.num_vertices();
        let all: Vec<&Simplex> = self.complex.iter().collect();
        // Open star of v: ids of simplices containing v.
        let mut stars: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (id, s) in self.complex.iter().enumerate() {
            for &v in s {
                stars[v].push(id);
            }
        }
        // Cover elements are the distinct stars; order them by smallest vertex.
        let mut element_of: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut isomorphism = Vec::with_capacity(n);
        for star in &stars {
            let next = element_of.len();
            isomorphism.push(*element_of.entry(star.clone()).or_insert(next));
        }
        let m = element_of.len();
        let mut cover: Vec<HashSet<usize>> = vec![HashSet::new(); m];
        for (v, star) in stars.iter().enumerate() {
            cover[isomorphism[v]] = star.iter().copied().collect();
        }
        // Grow nerve simplices one cover element at a time, keeping the running intersection.
        let mut faces: Vec<Simplex> = Vec::new();
        let mut stack: Vec<(Simplex, HashSet<usize>)> =
            (0..m).map(|i| (vec![i], cover[i].clone())).collect();
        while let Some((s, common)) = stack.pop() {
            let last = *s.last().unwrap();
            for (j, u) in cover.iter().enumerate().skip(last + 1) {
                let next: HashSet<usize> = common.intersection(u).copied().collect();
                if !next.is_empty() {
                    let mut t = s.clone();
                    t.push(j);
                    stack.push((t, next));
                }
            }
            faces.push(s);
        }
        let nerve = SComplex::from_maximal(m, &faces)?;
        // g·U_v = U_{gv}: read off the induced permutation of cover elements.
        let mut action = Vec::with_capacity(self.group.order());
        for g in 0..self.group.order() {
            let mut img = vec![usize::MAX; m];
            for (v, star) in stars.iter().enumerate() {
                let moved: Vec<usize> = {
                    let mut ids: Vec<usize> = star
                        .iter()
                        .map(|&id| {
                            self.complex
                                .global_position(&self.act_simplex(g, all[id]))
                                .unwrap()
                        })
                        .collect();
                    ids.sort_unstable();
                    ids
                };
                img[isomorphism[v]] = element_of[&moved];
            }
            action.push(Perm::new(img)?);
        }
        let nerve = GComplex::from_element_action(nerve, self.group.clone(), action)?;
        Ok(NerveResult { nerve, isomorphism })
    }

    /// Barycentric subdivision with the induced action.
    pub fn subdivide(&self) -> GComplex {
        let sd = self.complex.barycentric_subdivision();
        let action = (0..self.group.order())
            .map(|g| {
                let images = sd
                    .faces
                    .iter()
                    .map(|f| {
                        self.complex
                            .global_position(&self.act_simplex(g, f))
                            .expect("simplicial action")
                    })
                    .collect();
                Perm::new(images).expect("bijection on simplices")
            })
            .collect();
        GComplex {
            complex: sd.complex,
            group: self.group.clone(),
            action,
        }
    }

    /// Subdivides until the action is strictly regular: not at all if it already
    /// is, once if R1 holds, twice otherwise. Returns the number of subdivisions.
    pub fn regularize(&self) -> (GComplex, usize) {
        let report = self.regularity();
        if report.is_strictly_regular() {
            return (self.clone(), 0);
        }
        let rounds = if report.r1.holds { 1 } else { 2 };
        let mut x = self.subdivide();
        if rounds == 2 {
            x = x.subdivide();
        }
        assert!(
            x.regularity().is_strictly_regular(),
            "second barycentric subdivision must be strictly regular"
        );
        (x, rounds)
    }

    /// Whether the two G-complexes are equal after relabeling vertices by `map`
    /// (vertex `v` of `self` ↦ `map[v]` of `other`), equivariantly.
    pub fn is_isomorphic_via(&self, other: &GComplex, map: &[usize]) -> bool {
        if self.group.key() != other.group.key()
            || self.complex.f_vector() != other.complex.f_vector()
            || map.len() != self.complex.num_vertices()
        {
            return false;
        }
        let mut seen = HashSet::new();
        if !map
            .iter()
            .all(|&w| w < other.complex.num_vertices() && seen.insert(w))
        {
            return false;
        }
        let simplices_match = self.complex.iter().all(|s| {
            let mut t: Simplex = s.iter().map(|&v| map[v]).collect();
            t.sort_unstable();
            other.complex.contains(&t)
        });
        simplices_match
            && (0..self.group.order()).all(|g| {
                let h = other.group.index_of(self.group.element(g)).unwrap();
                (0..map.len()).all(|v| map[self.act_vertex(g, v)] == other.act_vertex(h, map[v]))
            })
    }
}

fn map_simplex(p: &Perm, s: &[usize]) -> Simplex {
    let mut t: Simplex = s.iter().map(|&v| p.apply(v)).collect();
    t.sort_unstable();
    t
}

/// Number of connected components of a graph given by edges on `n` vertices.
pub(crate) fn count_components(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut uf = UnionFind::new(n);
    for (a, b) in edges {
        uf.union(a, b);
    }
    uf.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::standard::*;

    fn z3_on_triangle() -> GComplex {
        let g = Arc::new(PermGroup::cyclic(3));
        GComplex::build_action(simplex(2), g, vec![Perm::new(vec![1, 2, 0]).unwrap()]).unwrap()
    }

    #[test]
    fn build_examples() {
        let x = GComplex::trivial(sphere_boundary(2), Arc::new(PermGroup::cyclic(1)));
        assert!(x.regularity().is_strictly_regular());
        z3_on_triangle();
        let pair = SComplex::from_maximal(2, &[[0], [1]]).unwrap();
        let x = GComplex::build_action(
            pair,
            Arc::new(PermGroup::cyclic(2)),
            vec![Perm::new(vec![1, 0]).unwrap()],
        )
        .unwrap();
        assert_eq!(x.vertex_orbits(), vec![0, 0]);
    }

    #[test]
    fn build_errors() {
        let z2 = Arc::new(PermGroup::cyclic(2));
        // A 3-cycle cannot be the image of an involution.
        let err = GComplex::build_action(
            simplex(2),
            z2.clone(),
            vec![Perm::new(vec![1, 2, 0]).unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, GComplexError::NotAHomomorphism { .. }));
        // Swapping 0 and 2 on a path 0-1-2-3 is not simplicial.
        let path = SComplex::from_maximal(4, &[[0, 1], [1, 2], [2, 3]]).unwrap();
        let err =
            GComplex::build_action(path, z2.clone(), vec![Perm::new(vec![2, 1, 0, 3]).unwrap()])
                .unwrap_err();
        assert!(matches!(err, GComplexError::NotSimplicial { .. }));
        let err = GComplex::build_action(simplex(2), z2, vec![]).unwrap_err();
        assert_eq!(
            err,
            GComplexError::WrongGeneratorCount {
                expected: 1,
                got: 0
            }
        );
    }

    #[test]
    fn z3_triangle_fails_r1_and_r2() {
        let x = z3_on_triangle();
        let r = x.regularity();
        assert_eq!(
            r.r1.witness,
            Some(R1Witness {
                simplex: vec![0, 1, 2],
                vertex: 0,
                element: 1,
                image: 1
            })
        );
        assert!(!r.r2.holds);
        assert!(r.r3.holds);
    }

    #[test]
    fn quotient_and_multiedge() {
        let z2 = Arc::new(PermGroup::cyclic(2));
        let anti = GComplex::build_action(
            cycle(6),
            z2,
            vec![Perm::new((0..6).map(|i| (i + 3) % 6).collect()).unwrap()],
        )
        .unwrap();
        let q = anti.quotient().unwrap();
        assert_eq!(q.complex, cycle(3));
        assert_eq!(anti.equivariant_f_vector().orbit_counts, vec![3, 3]);

        let z3 = Arc::new(PermGroup::cyclic(3));
        let rot2 = GComplex::build_action(
            cycle(6),
            z3,
            vec![Perm::new((0..6).map(|i| (i + 2) % 6).collect()).unwrap()],
        )
        .unwrap();
        assert!(rot2.check_r1().holds);
        assert!(matches!(
            rot2.quotient(),
            Err(GComplexError::MultiEdge { .. })
        ));
        assert!(matches!(
            z3_on_triangle().quotient(),
            Err(GComplexError::NotRegular {
                condition: Condition::R1
            })
        ));
    }

    #[test]
    fn fixed_sets_and_saturation() {
        let z2 = Arc::new(PermGroup::cyclic(2));
        // Reflection of the hexagon through vertices 0 and 3.
        let refl = Perm::new(vec![0, 5, 4, 3, 2, 1]).unwrap();
        let x = GComplex::build_action(cycle(6), z2.clone(), vec![refl]).unwrap();
        let (fixed, verts) = x.fixed_subcomplex(&z2.full_subgroup());
        assert_eq!(fixed.f_vector(), vec![2]);
        assert_eq!(verts, vec![0, 3]);
        let (all, _) = x.fixed_subcomplex(&z2.trivial_subgroup());
        assert_eq!(all, cycle(6));
        let sat = x.saturation(&[vec![1, 2]]).unwrap();
        assert_eq!(
            sat,
            vec![vec![1], vec![2], vec![4], vec![5], vec![1, 2], vec![4, 5]]
        );

        let anti = GComplex::build_action(
            cycle(6),
            z2.clone(),
            vec![Perm::new((0..6).map(|i| (i + 3) % 6).collect()).unwrap()],
        )
        .unwrap();
        let (fixed, _) = anti.fixed_subcomplex(&z2.full_subgroup());
        assert_eq!(fixed.num_vertices(), 0);
    }

    #[test]
    fn nerve_of_star_cover() {
        let z2 = Arc::new(PermGroup::cyclic(2));
        let anti = GComplex::build_action(
            cycle(6),
            z2,
            vec![Perm::new((0..6).map(|i| (i + 3) % 6).collect()).unwrap()],
        )
        .unwrap();
        let n = anti.star_cover_nerve().unwrap();
        assert!(anti.is_isomorphic_via(&n.nerve, &n.isomorphism));
        let sphere = GComplex::trivial(sphere_boundary(2), Arc::new(PermGroup::cyclic(1)));
        let n = sphere.star_cover_nerve().unwrap();
        assert_eq!(n.nerve.complex(), sphere.complex());
        assert!(z3_on_triangle().star_cover_nerve().is_err());
    }

    #[test]
    fn regularize_subdivides_at_most_twice() {
        let x = z3_on_triangle();
        let sd1 = x.subdivide();
        assert!(sd1.check_r1().holds);
        let (sd2, rounds) = x.regularize();
        assert_eq!(rounds, 2);
        assert!(sd2.regularity().is_strictly_regular());
        assert_eq!(sd2.complex().f_vector(), vec![25, 60, 36]);
        let (same, rounds) = sd2.regularize();
        assert_eq!(rounds, 0);
        assert_eq!(same.complex(), sd2.complex());
        let (once, rounds) = sd1.regularize();
        assert_eq!(rounds, 1);
        assert!(once.regularity().is_strictly_regular());
    }

    #[test]
    fn sd_triangle_orbit_sizes() {
        let sd = z3_on_triangle().subdivide();
        let f = sd.equivariant_f_vector();
        assert_eq!(f.orbit_counts[0], 3);
        let mut sizes: Vec<usize> = sd
            .simplex_orbits()
            .iter()
            .filter(|o| o.representative.len() == 1)
            .map(|o| o.members.len())
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 3]);
    }

    /// R2 straight from the definition: every choice of `g_0..g_n` over every simplex.
    fn r2_by_definition(x: &GComplex) -> bool {
        let order = x.group().order();
        x.complex().iter().all(|s| {
            let k = s.len();
            let mut choice = vec![0usize; k];
            loop {
                let image: Vec<usize> = s
                    .iter()
                    .zip(&choice)
                    .map(|(&v, &g)| x.act_vertex(g, v))
                    .collect();
                let mut sorted = image.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() == k && x.complex().contains(&sorted) {
                    let realized = (0..order)
                        .any(|g| s.iter().zip(&image).all(|(&v, &w)| x.act_vertex(g, v) == w));
                    if !realized {
                        return false;
                    }
                }
                let mut i = 0;
                while i < k {
                    choice[i] += 1;
                    if choice[i] < order {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == k {
                    return true;
                }
            }
        })
    }

    fn check_r2_witness(x: &GComplex, w: &R2Witness) {
        let mut img = w.image.clone();
        img.sort_unstable();
        assert!(x.complex().contains(&img));
        for ((&v, &g), &t) in w.simplex.iter().zip(&w.elements).zip(&w.image) {
            assert_eq!(x.act_vertex(g, v), t);
        }
        assert!(!(0..x.group().order()).any(|g| w
            .simplex
            .iter()
            .zip(&w.image)
            .all(|(&v, &t)| x.act_vertex(g, v) == t)));
    }

    fn fixtures() -> Vec<GComplex> {
        let z2 = Arc::new(PermGroup::cyclic(2));
        let z3 = Arc::new(PermGroup::cyclic(3));
        let z6 = Arc::new(PermGroup::cyclic(6));
        let shift = |n: usize, k: usize| Perm::new((0..n).map(|i| (i + k) % n).collect()).unwrap();
        let mut out = vec![
            z3_on_triangle(),
            z3_on_triangle().subdivide(),
            GComplex::build_action(cycle(6), z2.clone(), vec![shift(6, 3)]).unwrap(),
            GComplex::build_action(cycle(6), z3.clone(), vec![shift(6, 2)]).unwrap(),
            GComplex::build_action(cycle(6), z6, vec![shift(6, 1)]).unwrap(),
            GComplex::build_action(
                cycle(6),
                z2.clone(),
                vec![Perm::new(vec![0, 5, 4, 3, 2, 1]).unwrap()],
            )
            .unwrap(),
            // Edge reflection of the hexagon: swaps 0 and 1.
            GComplex::build_action(
                cycle(6),
                z2.clone(),
                vec![Perm::new(vec![1, 0, 5, 4, 3, 2]).unwrap()],
            )
            .unwrap(),
            GComplex::build_action(octahedron(), z2.clone(), vec![shift(6, 3)]).unwrap(),
            GComplex::build_action(torus7(), Arc::new(PermGroup::cyclic(7)), vec![shift(7, 1)])
                .unwrap(),
        ];
        // Square with a diagonal, reflected across the other diagonal.
        let sq = SComplex::from_maximal(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        out.push(
            GComplex::build_action(sq, z2, vec![Perm::new(vec![2, 1, 0, 3]).unwrap()]).unwrap(),
        );
        out
    }

    #[test]
    fn r2_agrees_with_definition() {
        for x in fixtures() {
            let fast = x.check_r2();
            assert_eq!(fast.holds, r2_by_definition(&x), "{:?}", x.spec());
            if let Some(w) = &fast.witness {
                check_r2_witness(&x, w);
            }
            let sd = x.subdivide();
            assert_eq!(sd.check_r2().holds, r2_by_definition(&sd));
        }
    }

    #[test]
    fn orbit_stabilizer_on_fixtures() {
        for x in fixtures() {
            for o in x.simplex_orbits() {
                assert_eq!(o.members.len() * o.stabilizer_order, x.group().order());
            }
            let f = x.equivariant_f_vector();
            assert_eq!(f.expanded(x.group().order()), x.complex().f_vector());
        }
    }

    #[test]
    fn r3_fails_for_incomparable_stabilizers() {
        // S3 acting on cosets: vertices 0..3 are the points {0,1,2} (stabilizers Z2),
        // vertices 3..5 are the two cyclic orders (stabilizer Z3). Edge {0,3}.
        let s3 = Arc::new(PermGroup::symmetric(3).unwrap());
        let k =
            SComplex::from_maximal(5, &[[0, 3], [1, 3], [2, 3], [0, 4], [1, 4], [2, 4]]).unwrap();
        let images: Vec<Perm> = s3
            .generators()
            .iter()
            .map(|g| {
                let mut img: Vec<usize> = (0..3).map(|i| g.apply(i)).collect();
                // Transpositions swap the two cyclic orders, 3-cycles fix them.
                let sign_even = g.compose(g).compose(g).is_identity();
                if sign_even {
                    img.extend([3, 4])
                } else {
                    img.extend([4, 3])
                }
                Perm::new(img).unwrap()
            })
            .collect();
        let x = GComplex::build_action(k, s3, images).unwrap();
        let r3 = x.check_r3();
        assert!(!r3.holds);
        assert_eq!(r3.witness.unwrap().simplex, vec![0, 3]);
    }
}
