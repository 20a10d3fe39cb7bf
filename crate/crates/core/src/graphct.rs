//! Equivariant covering type of finite G-graphs, computed stratum by stratum.
//!
//! Every orbit type `(H)` occurring in the graph contributes the covering type
//! of a bouquet of `h` circles, where `h` counts the independent loops of the
//! stratum quotient.

use std::collections::{BTreeMap, HashMap};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::complex::SComplex;
use crate::gcomplex::{count_components, Condition, GComplex};
use crate::group::OrbitType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphCtError {
    #[error("complex has dimension {0} > 1, not a graph")]
    NotAGraph(usize),
    #[error("action is not regular: {0:?} fails")]
    NotRegular(Condition),
    #[error("graph is not connected")]
    NotConnected,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumReport {
    pub orbit_type: OrbitType,
    /// Order of the subgroups in the orbit type.
    pub isotropy_order: usize,
    /// Stratum as a subgraph of the barycentric subdivision, relabeled.
    #[serde(serialize_with = "as_spec")]
    pub stratum_subgraph: SComplex,
    /// Vertex of the subdivision for each stratum vertex.
    pub subdivision_vertices: Vec<usize>,
    pub quotient_vertices: usize,
    pub quotient_edges: usize,
    pub quotient_components: usize,
    /// `E − V + C` of the stratum quotient.
    pub quotient_loops: usize,
    pub contribution: usize,
    /// Set when the stratum quotient has no loops, where the bouquet formula still gives 2.
    pub no_loops: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphCoveringType {
    pub total: usize,
    pub strata: Vec<StratumReport>,
}

fn as_spec<S: Serializer>(k: &SComplex, s: S) -> Result<S::Ok, S::Error> {
    k.spec().serialize(s)
}

/// Covering type of a bouquet of `h` circles: the least `n ≥ 2` with `(2n − 3)² ≥ 1 + 8h`.
pub fn bouquet_ct(h: usize) -> usize {
    let x = 1 + 8 * h as u128;
    let mut n = ((3 + x.isqrt()) / 2).max(2);
    while (2 * n - 3).pow(2) < x {
        n += 1;
    }
    n as usize
}

/// Splits a regular G-graph into its orbit-type strata.
///
/// Strata live in the barycentric subdivision: the stratum of `(H)` is the full
/// subgraph on the subdivision vertices whose stabilizer has type `(H)`.
/// Reported in increasing subgroup order.
pub fn stratify(x: &GComplex) -> Result<Vec<StratumReport>, GraphCtError> {
    if let Some(d) = x.complex().dim().filter(|&d| d > 1) {
        return Err(GraphCtError::NotAGraph(d));
    }
    if !x.check_r1().holds {
        return Err(GraphCtError::NotRegular(Condition::R1));
    }
    let sd = x.subdivide();
    let poset = x.group().orbit_type_poset();
    let n = sd.complex().num_vertices();
    let types: Vec<usize> = (0..n)
        .map(|v| {
            poset
                .class_of(&sd.vertex_stabilizer(v))
                .expect("stabilizer is a subgroup")
        })
        .collect();
    let orbit = sd.vertex_orbits();

    let mut by_type: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &t) in types.iter().enumerate() {
        by_type.entry(t).or_default().push(v);
    }
    let mut out = Vec::with_capacity(by_type.len());
    for (t, verts) in by_type {
        let (stratum, old) = sd.complex().induced_subcomplex(&verts);
        let mut orbit_index: HashMap<usize, usize> = HashMap::new();
        for &v in &old {
            let next = orbit_index.len();
            orbit_index.entry(orbit[v]).or_insert(next);
        }
        // One quotient edge per edge orbit, keyed by the orbit's least member.
        let mut edge_orbits: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        for e in stratum.simplices(1) {
            let lifted = [old[e[0]], old[e[1]]];
            let canon = (0..x.group().order())
                .map(|g| sd.act_simplex(g, &lifted))
                .min()
                .unwrap();
            let ends = (
                orbit_index[&orbit[lifted[0]]],
                orbit_index[&orbit[lifted[1]]],
            );
            edge_orbits.insert(canon, ends);
        }
        let v_star = orbit_index.len();
        let e_star = edge_orbits.len();
        let c_star = count_components(v_star, edge_orbits.values().copied());
        let h = e_star + c_star - v_star;
        let class = poset.classes()[t].clone();
        out.push(StratumReport {
            isotropy_order: class.representative.order(),
            orbit_type: class,
            stratum_subgraph: stratum,
            subdivision_vertices: old,
            quotient_vertices: v_star,
            quotient_edges: e_star,
            quotient_components: c_star,
            quotient_loops: h,
            contribution: bouquet_ct(h),
            no_loops: h == 0,
        });
    }
    Ok(out)
}

/// `ct_G` of a connected regular G-graph: the sum of the stratum contributions.
pub fn graph_covering_type(x: &GComplex) -> Result<GraphCoveringType, GraphCtError> {
    if let Some(d) = x.complex().dim().filter(|&d| d > 1) {
        return Err(GraphCtError::NotAGraph(d));
    }
    if !x.complex().is_connected() {
        return Err(GraphCtError::NotConnected);
    }
    let strata = stratify(x)?;
    Ok(GraphCoveringType {
        total: strata.iter().map(|s| s.contribution).sum(),
        strata,
    })
}
