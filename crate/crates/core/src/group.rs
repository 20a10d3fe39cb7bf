//! Finite permutation groups, their subgroup lattice and the poset of orbit types.
//!
//! Permutations act on the left and compose as `(g * h)(x) = g(h(x))`.
//! Group elements are addressed by their index in [`PermGroup::elements`];
//! index 0 is always the identity.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on the number of elements of a group we are willing to enumerate.
pub const DEFAULT_GROUP_CAP: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("not a permutation of 0..{degree}: {images:?}")]
    NotAPermutation { degree: usize, images: Vec<usize> },
    #[error("group exceeds the size cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("orbit types belong to different groups")]
    MixedGroups,
    #[error("group degree must be at least 1")]
    EmptyDegree,
}

/// A permutation of `{0, .., n-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GroupError::NotAPermutation { degree: n, images });
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub fn identity(degree: usize) -> Self {
        Perm((0..degree).collect())
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a >= degree || b >= degree {
                    return Err(GroupError::NotAPermutation { degree, images });
                }
                images[a] = b;
            }
        }
        Perm::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = GroupError;
    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

/// JSON form of a group: `{"degree": n, "generators": [[...], ...], "name": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GroupSpec {
    pub fn build(&self, cap: usize) -> Result<PermGroup, GroupError> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                if g.len() != self.degree {
                    return Err(GroupError::NotAPermutation {
                        degree: self.degree,
                        images: g.clone(),
                    });
                }
                Perm::new(g.clone())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut group = PermGroup::generate_with_cap(self.degree, gens, cap)?;
        group.name = self.name.clone();
        Ok(group)
    }
}

/// A finite group of permutations with its full element list.
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    /// For element `i > 0`: `(parent, generator)` with `elements[i] = gen ∘ elements[parent]`.
    words: Vec<(usize, usize)>,
    key: u64,
    table: OnceLock<Vec<u32>>,
    pub name: Option<String>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    /// The group generated by `generators`, capped at [`DEFAULT_GROUP_CAP`] elements.
    pub fn generate(degree: usize, generators: Vec<Perm>) -> Result<Self, GroupError> {
        Self::generate_with_cap(degree, generators, DEFAULT_GROUP_CAP)
    }

    pub fn generate_with_cap(
        degree: usize,
        generators: Vec<Perm>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        if degree == 0 {
            return Err(GroupError::EmptyDegree);
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(GroupError::NotAPermutation {
                    degree,
                    images: g.0.clone(),
                });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut words = vec![(usize::MAX, usize::MAX)];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (s, gen) in generators.iter().enumerate() {
                let p = gen.compose(&elements[i]);
                if index.contains_key(&p) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(GroupError::GroupTooLarge { cap });
                }
                index.insert(p.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(p);
                words.push((i, s));
            }
        }
        let mut sorted: Vec<&Perm> = elements.iter().collect();
        sorted.sort();
        let mut h = DefaultHasher::new();
        degree.hash(&mut h);
        sorted.hash(&mut h);
        Ok(PermGroup {
            degree,
            generators,
            elements,
            index,
            words,
            key: h.finish(),
            table: OnceLock::new(),
            name: None,
        })
    }

    /// Cyclic group of order `n` acting regularly on `n` points.
    pub fn cyclic(n: usize) -> Self {
        let gens = if n > 1 {
            vec![Perm((0..n).map(|i| (i + 1) % n).collect())]
        } else {
            vec![]
        };
        let mut g = Self::generate(n.max(1), gens).expect("cyclic group");
        g.name = Some(format!("Z{n}"));
        g
    }

    /// Symmetric group on `n` points.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        let mut gens = Vec::new();
        if n > 1 {
            gens.push(Perm::from_cycles(n, &[&[0, 1]])?);
        }
        if n > 2 {
            gens.push(Perm((0..n).map(|i| (i + 1) % n).collect()));
        }
        let mut g = Self::generate(n.max(1), gens)?;
        g.name = Some(format!("S{n}"));
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Identifier shared by groups with the same degree and element set.
    pub fn key(&self) -> u64 {
        self.key
    }

    /// Breadth-first spanning tree of the Cayley graph: `(parent, generator)` per element.
    pub fn word_tree(&self) -> &[(usize, usize)] {
        &self.words
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec {
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.0.clone()).collect(),
            name: self.name.clone(),
        }
    }

    fn table(&self) -> &[u32] {
        self.table.get_or_init(|| {
            let n = self.order();
            let mut t = Vec::with_capacity(n * n);
            for a in &self.elements {
                for b in &self.elements {
                    t.push(self.index[&a.compose(b)] as u32);
                }
            }
            t
        })
    }

    /// Index of `elements[a] ∘ elements[b]`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table()[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ab_ai = self.mul(ab, self.inv(a));
        self.mul(ab_ai, self.inv(b))
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(a, x);
            k += 1;
        }
        k
    }

    /// Conjugacy class id of every element; ids are assigned in order of first appearance.
    pub fn element_classes(&self) -> Vec<usize> {
        let n = self.order();
        let mut class = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if class[x] != usize::MAX {
                continue;
            }
            for g in 0..n {
                class[self.conjugate(g, x)] = next;
            }
            next += 1;
        }
        class
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self, vec![0])
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self, (0..self.order()).collect())
    }

    /// The subgroup generated by the given element indices.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Subgroup {
        Subgroup::from_sorted(self, self.closure(gens))
    }

    fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(s, x);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Every subgroup of the group, ordered by size and then by element indices.
    ///
    /// Subgroups are found by the cyclic extension method: start from the cyclic
    /// subgroups and repeatedly join a known subgroup with a cyclic one.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let n = self.order();
        let mut cyclic: Vec<(Vec<usize>, usize)> = Vec::new();
        let mut seen_cyclic = HashSet::new();
        for g in 0..n {
            let c = self.closure(&[g]);
            if seen_cyclic.insert(c.clone()) {
                cyclic.push((c, g));
            }
        }
        // Each entry: (elements, generating set).
        let mut all: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let mut frontier: Vec<Vec<usize>> = Vec::new();
        for (c, g) in &cyclic {
            let gens = if *g == 0 { vec![] } else { vec![*g] };
            all.insert(c.clone(), gens);
            frontier.push(c.clone());
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in &frontier {
                let members: HashSet<usize> = h.iter().copied().collect();
                let hgens = all[h].clone();
                for (_, g) in &cyclic {
                    if members.contains(g) {
                        continue;
                    }
                    let mut gens = hgens.clone();
                    gens.push(*g);
                    let j = self.closure(&gens);
                    if !all.contains_key(&j) {
                        all.insert(j.clone(), gens);
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Vec<usize>> = all.into_keys().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out.into_iter()
            .map(|e| Subgroup::from_sorted(self, e))
            .collect()
    }

    /// `g H g⁻¹`.
    pub fn conjugate_subgroup(&self, g: usize, h: &Subgroup) -> Subgroup {
        let mut e: Vec<usize> = h.elements.iter().map(|&x| self.conjugate(g, x)).collect();
        e.sort_unstable();
        Subgroup::from_sorted(self, e)
    }

    /// Conjugacy classes of subgroups with the orbit-type order.
    pub fn orbit_type_poset(&self) -> OrbitTypePoset {
        let subs = self.subgroups();
        let mut class_of: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut classes: Vec<OrbitType> = Vec::new();
        for s in &subs {
            if class_of.contains_key(&s.elements) {
                continue;
            }
            let id = classes.len();
            let mut conj: Vec<Subgroup> = Vec::new();
            for g in 0..self.order() {
                let c = self.conjugate_subgroup(g, s);
                if let std::collections::hash_map::Entry::Vacant(e) =
                    class_of.entry(c.elements.clone())
                {
                    e.insert(id);
                    conj.push(c);
                }
            }
            conj.sort_by(|a, b| a.elements.cmp(&b.elements));
            classes.push(OrbitType {
                id,
                representative: s.clone(),
                conjugates: conj,
            });
        }
        let k = classes.len();
        // below[a][b]: (A) ⪯ (B), i.e. some conjugate of A lies in B.
        let mut below = vec![vec![false; k]; k];
        for a in 0..k {
            for b in 0..k {
                let rep_b = &classes[b].representative;
                below[a][b] = classes[a]
                    .conjugates
                    .iter()
                    .any(|c| c.is_subgroup_of(rep_b));
            }
        }
        OrbitTypePoset {
            group_key: self.key,
            classes,
            below,
            class_of,
        }
    }

    /// Stabilizer `G_x` of a point under an action given by `act(g, x)`.
    pub fn stabilizer<P: PartialEq>(&self, act: impl Fn(usize, &P) -> P, x: &P) -> Subgroup {
        let e = (0..self.order()).filter(|&g| act(g, x) == *x).collect();
        Subgroup::from_sorted(self, e)
    }

    /// The orbit `Gx`, sorted and deduplicated.
    pub fn orbit<P: Ord>(&self, act: impl Fn(usize, &P) -> P, x: &P) -> Vec<P> {
        let mut o: Vec<P> = (0..self.order()).map(|g| act(g, x)).collect();
        o.sort();
        o.dedup();
        o
    }
}

/// A subgroup, stored as the sorted element indices of its parent group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Subgroup {
    #[serde(skip)]
    group_key: u64,
    #[serde(skip)]
    parent_order: usize,
    elements: Vec<usize>,
}

impl Subgroup {
    fn from_sorted(g: &PermGroup, elements: Vec<usize>) -> Self {
        Subgroup {
            group_key: g.key,
            parent_order: g.order(),
            elements,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.parent_order / self.order()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.group_key == other.group_key && self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            group_key: self.group_key,
            parent_order: self.parent_order,
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        }
    }

    pub fn group_key(&self) -> u64 {
        self.group_key
    }
}

/// A conjugacy class of subgroups, i.e. an orbit type `(H)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitType {
    pub id: usize,
    pub representative: Subgroup,
    pub conjugates: Vec<Subgroup>,
}

/// The poset of orbit types of a group, with `(H) ⪰ (K)` iff a conjugate of `K` lies in `H`.
#[derive(Debug, Clone)]
pub struct OrbitTypePoset {
    group_key: u64,
    classes: Vec<OrbitType>,
    below: Vec<Vec<bool>>,
    class_of: HashMap<Vec<usize>, usize>,
}

impl OrbitTypePoset {
    /// Classes ordered by subgroup size, so the order is a linear extension of the poset.
    pub fn classes(&self) -> &[OrbitType] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class id of a subgroup of the underlying group.
    pub fn class_of(&self, h: &Subgroup) -> Option<usize> {
        if h.group_key != self.group_key {
            return None;
        }
        self.class_of.get(&h.elements).copied()
    }

    /// `(a) ⪯ (b)`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.below[a][b] || self.below[b][a]
    }

    /// Whether the poset restricted to `types` is a chain.
    pub fn is_linearly_ordered(&self, types: &[&OrbitType]) -> Result<bool, GroupError> {
        let mut ids = Vec::with_capacity(types.len());
        for t in types {
            if t.representative.group_key != self.group_key {
                return Err(GroupError::MixedGroups);
            }
            ids.push(t.id);
        }
        Ok(ids
            .iter()
            .all(|&a| ids.iter().all(|&b| self.comparable(a, b))))
    }

    pub fn is_chain(&self) -> bool {
        let all: Vec<&OrbitType> = self.classes.iter().collect();
        self.is_linearly_ordered(&all).unwrap_or(false)
    }
}
