//! Rational polyhedral cones inside the nonnegative orthant, Newton data of
//! monomial sets, dual fans and common refinements.
//!
//! All cones live in the fan support `σ = R^d_{>=0}` and are strictly convex.
//! A [`Cone`] carries three canonical descriptions that agree with each
//! other: extreme rays (primitive in the reference lattice `N`), a basis of
//! the orthogonal complement of its linear span (`eqs`), and facet normals
//! valid within the span (`ineqs`). Canonical ordering makes structural
//! equality coincide with geometric equality.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numlin::{kernel, rank, rat_int, rref, solve_left, Lattice, Rat, RatVec};

// ---------------------------------------------------------------------------
// Double description: extreme rays of {x : <a_i, x> >= 0}.
// ---------------------------------------------------------------------------

/// Extreme rays of the cone cut out by the given half-spaces in `R^m`.
///
/// Handles intermediate lineality; the result is correct whether or not the
/// final cone is full-dimensional. Rays are returned as primitive integer
/// directions, sorted.
pub(crate) fn dd_extreme_rays(constraints: &[RatVec], m: usize) -> Vec<RatVec> {
    let mut lineality: Vec<RatVec> = (0..m).map(|i| RatVec::unit(m, i)).collect();
    let mut rays: Vec<RatVec> = Vec::new();
    let mut processed: Vec<RatVec> = Vec::new();

    for a in constraints {
        if a.is_zero() {
            continue;
        }
        let pivot = lineality.iter().position(|l| !a.dot(l).is_zero());
        if let Some(p) = pivot {
            let mut lstar = lineality.remove(p);
            if a.dot(&lstar).is_negative() {
                lstar = lstar.neg();
            }
            let denom = a.dot(&lstar);
            for l in lineality.iter_mut() {
                let f = a.dot(l) / &denom;
                *l = l.sub(&lstar.scale(&f));
            }
            for r in rays.iter_mut() {
                let f = a.dot(r) / &denom;
                *r = r.sub(&lstar.scale(&f)).primitive_direction();
            }
            rays.push(lstar.primitive_direction());
        } else {
            let lin_dim = lineality.len();
            let mut pos = Vec::new();
            let mut zero = Vec::new();
            let mut neg = Vec::new();
            for r in rays.iter() {
                let v = a.dot(r);
                if v.is_positive() {
                    pos.push(r.clone());
                } else if v.is_zero() {
                    zero.push(r.clone());
                } else {
                    neg.push(r.clone());
                }
            }
            let mut next = pos.clone();
            next.extend(zero.iter().cloned());
            for rp in &pos {
                for rn in &neg {
                    if !adjacent(rp, rn, &rays, &processed, m, lin_dim) {
                        continue;
                    }
                    let cp = a.dot(rp);
                    let cn = a.dot(rn);
                    // cp > 0 > cn: positive combination vanishing on a
                    let combo = rn.scale(&cp).sub(&rp.scale(&cn));
                    if !combo.is_zero() {
                        next.push(combo.primitive_direction());
                    }
                }
            }
            next.sort();
            next.dedup();
            rays = next;
        }
        processed.push(a.clone());
    }
    rays.sort();
    rays.dedup();
    rays
}

/// Algebraic adjacency test inside the cone of the processed constraints.
fn adjacent(
    rp: &RatVec,
    rn: &RatVec,
    rays: &[RatVec],
    processed: &[RatVec],
    m: usize,
    lin_dim: usize,
) -> bool {
    if rays.len() == 2 {
        return true;
    }
    let common: Vec<RatVec> = processed
        .iter()
        .filter(|a| a.dot(rp).is_zero() && a.dot(rn).is_zero())
        .cloned()
        .collect();
    if m < lin_dim + 2 {
        return false;
    }
    rank(&common) == m - lin_dim - 2
}

// ---------------------------------------------------------------------------
// Cones.
// ---------------------------------------------------------------------------

/// A strictly convex rational cone inside `σ = R^d_{>=0}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    ambient: usize,
    dim: usize,
    /// Extreme rays, primitive in the reference lattice, sorted.
    rays: Vec<RatVec>,
    /// Canonical basis of `lin(C)^perp`.
    eqs: Vec<RatVec>,
    /// Facet normals, valid for points of `lin(C)`; primitive, sorted.
    ineqs: Vec<RatVec>,
}

impl Cone {
    /// The cone spanned by the given rays, with canonical data computed.
    pub fn from_rays(rays: &[RatVec], n: &Lattice) -> Cone {
        let ambient = n.dim();
        let mut dirs: Vec<RatVec> = rays
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| n.primitive_on_ray(r))
            .collect();
        dirs.sort();
        dirs.dedup();
        if dirs.is_empty() {
            return Cone {
                ambient,
                dim: 0,
                rays: vec![],
                eqs: canonical_normals(&kernel(&[], ambient)),
                ineqs: vec![],
            };
        }
        let lin_basis = rref(&dirs);
        let dim = lin_basis.len();
        let eqs = canonical_normals(&kernel(&lin_basis, ambient));
        // pivot columns of the RREF basis give coordinates in lin(C)
        let pivots = pivot_columns(&lin_basis);
        let coords = |x: &RatVec| x.restrict(&pivots);
        let ray_coords: Vec<RatVec> = dirs.iter().map(coords).collect();
        // facet normals within lin(C): extreme rays of the polar
        let polar = dd_extreme_rays(&ray_coords, dim);
        // extreme rays: double description applied to the facet system
        let extreme_coords = dd_extreme_rays(&polar, dim);
        let mut extreme: Vec<RatVec> = extreme_coords
            .iter()
            .map(|c| {
                let mut acc = RatVec::zero(ambient);
                for (ci, b) in c.iter().zip(lin_basis.iter()) {
                    acc = acc.add(&b.scale(ci));
                }
                n.primitive_on_ray(&acc)
            })
            .collect();
        extreme.sort();
        extreme.dedup();
        // lift facet normals back to the ambient space
        let mut ineqs: Vec<RatVec> = polar
            .iter()
            .map(|nn| lift_normal(nn, &lin_basis).primitive_direction())
            .collect();
        ineqs.sort();
        ineqs.dedup();
        Cone {
            ambient,
            dim,
            rays: extreme,
            eqs,
            ineqs,
        }
    }

    /// The full orthant `σ` for the reference lattice.
    pub fn orthant(n: &Lattice) -> Cone {
        let d = n.dim();
        let rays: Vec<RatVec> = (0..d).map(|i| RatVec::unit(d, i)).collect();
        Cone::from_rays(&rays, n)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[RatVec] {
        &self.rays
    }

    /// Basis of the orthogonal complement of the span.
    pub fn eqs(&self) -> &[RatVec] {
        &self.eqs
    }

    /// Facet normals, valid for points of the span.
    pub fn ineqs(&self) -> &[RatVec] {
        &self.ineqs
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Closed membership.
    pub fn contains(&self, v: &RatVec) -> bool {
        self.eqs.iter().all(|e| e.dot(v).is_zero())
            && self.ineqs.iter().all(|a| !a.dot(v).is_negative())
    }

    /// Membership in the relative interior.
    pub fn relint_contains(&self, v: &RatVec) -> bool {
        self.eqs.iter().all(|e| e.dot(v).is_zero())
            && self.ineqs.iter().all(|a| a.dot(v).is_positive())
    }

    /// Whether the relative interior lies in the interior of `σ`.
    ///
    /// Cones of a subdivision of `σ` either have their relative interior
    /// inside `int σ` or entirely on the boundary, so testing one interior
    /// point suffices.
    pub fn relint_in_interior(&self) -> bool {
        if self.rays.is_empty() {
            return false;
        }
        self.relint_representative().is_strictly_positive()
    }

    /// A deterministic point of the relative interior (sum of the rays).
    pub fn relint_representative(&self) -> RatVec {
        let mut acc = RatVec::zero(self.ambient);
        for r in &self.rays {
            acc = acc.add(r);
        }
        acc
    }

    /// Containment of another cone.
    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
    }

    /// Intersection, recomputed in canonical form.
    pub fn intersect(&self, other: &Cone, n: &Lattice) -> Cone {
        let mut constraints: Vec<RatVec> = Vec::new();
        for e in self.eqs.iter().chain(other.eqs.iter()) {
            constraints.push(e.clone());
            constraints.push(e.neg());
        }
        constraints.extend(self.ineqs.iter().cloned());
        constraints.extend(other.ineqs.iter().cloned());
        let rays = dd_extreme_rays(&constraints, self.ambient);
        Cone::from_rays(&rays, n)
    }

    /// All faces, the cone itself and the zero cone included.
    pub fn faces(&self, n: &Lattice) -> Vec<Cone> {
        let mut out: BTreeSet<Cone> = BTreeSet::new();
        let mut queue = vec![self.clone()];
        out.insert(self.clone());
        while let Some(c) = queue.pop() {
            for a in &c.ineqs {
                let sub: Vec<RatVec> = c
                    .rays
                    .iter()
                    .filter(|r| a.dot(r).is_zero())
                    .cloned()
                    .collect();
                let f = Cone::from_rays(&sub, n);
                if out.insert(f.clone()) {
                    queue.push(f);
                }
            }
            if c.dim == 1 {
                let f = Cone::from_rays(&[], n);
                if out.insert(f.clone()) {
                    queue.push(f);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Facets (faces of codimension one inside the cone).
    pub fn facets(&self, n: &Lattice) -> Vec<Cone> {
        if self.dim == 0 {
            return vec![];
        }
        if self.dim == 1 {
            return vec![Cone::from_rays(&[], n)];
        }
        let mut out: BTreeSet<Cone> = BTreeSet::new();
        for a in &self.ineqs {
            let sub: Vec<RatVec> = self
                .rays
                .iter()
                .filter(|r| a.dot(r).is_zero())
                .cloned()
                .collect();
            let f = Cone::from_rays(&sub, n);
            if f.dim + 1 == self.dim {
                out.insert(f);
            }
        }
        out.into_iter().collect()
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cone(dim {}; rays", self.dim)?;
        for r in &self.rays {
            write!(f, " {r}")?;
        }
        write!(f, ")")
    }
}

/// Lift an inequality from span coordinates to the ambient space.
fn lift_normal(normal_in_coords: &RatVec, lin_basis: &[RatVec]) -> RatVec {
    // gram matrix of the span basis
    let m = lin_basis.len();
    let gram: Vec<RatVec> = (0..m)
        .map(|i| RatVec::new((0..m).map(|j| lin_basis[i].dot(&lin_basis[j])).collect()))
        .collect();
    let sol = solve_left(&gram, normal_in_coords).expect("gram matrix invertible");
    let mut out = RatVec::zero(lin_basis[0].dim());
    for (c, b) in sol.iter().zip(lin_basis.iter()) {
        out = out.add(&b.scale(c));
    }
    out
}

fn pivot_columns(rref_rows: &[RatVec]) -> Vec<usize> {
    rref_rows
        .iter()
        .map(|r| r.iter().position(|e| !e.is_zero()).expect("nonzero row"))
        .collect()
}

fn canonical_normals(rows: &[RatVec]) -> Vec<RatVec> {
    let mut out: Vec<RatVec> = rows
        .iter()
        .filter(|r| !r.is_zero())
        .map(|r| r.primitive_direction())
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Fans.
// ---------------------------------------------------------------------------

/// A fan supported on `σ`: a set of cones closed under taking faces.
#[derive(Clone, PartialEq, Eq)]
pub struct Fan {
    cones: Vec<Cone>,
}

impl Fan {
    /// Build from a covering family of maximal cones; closes under faces.
    pub fn from_maximal(maximal: &[Cone], n: &Lattice) -> Fan {
        let mut all: BTreeSet<Cone> = BTreeSet::new();
        for c in maximal {
            for f in c.faces(n) {
                all.insert(f);
            }
        }
        Fan {
            cones: all.into_iter().collect(),
        }
    }

    /// The trivial fan consisting of `σ` and its faces.
    pub fn trivial(n: &Lattice) -> Fan {
        Fan::from_maximal(&[Cone::orthant(n)], n)
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cones_of_dim(&self, dim: usize) -> impl Iterator<Item = &Cone> {
        self.cones.iter().filter(move |c| c.dim() == dim)
    }

    /// Maximal cones (dimension equal to the ambient dimension).
    pub fn maximal_cones(&self) -> Vec<&Cone> {
        let d = self
            .cones
            .iter()
            .map(|c| c.dim())
            .max()
            .unwrap_or(0);
        self.cones.iter().filter(|c| c.dim() == d).collect()
    }

    /// Rays of the fan (one-dimensional cones), primitive in `N`.
    pub fn rays(&self) -> Vec<RatVec> {
        let mut out: Vec<RatVec> = self
            .cones_of_dim(1)
            .map(|c| c.rays()[0].clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The unique cone whose relative interior contains `v`.
    pub fn cone_containing_relint(&self, v: &RatVec) -> Option<&Cone> {
        self.cones.iter().find(|c| c.relint_contains(v))
    }
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Fan with {} cones:", self.cones.len())?;
        for c in &self.cones {
            writeln!(f, "  {c:?}")?;
        }
        Ok(())
    }
}

/// Common refinement of fans with support `σ`.
pub fn refine(fans: &[Fan], n: &Lattice) -> Fan {
    assert!(!fans.is_empty());
    let mut acc: Vec<Cone> = fans[0].maximal_cones().into_iter().cloned().collect();
    for fan in &fans[1..] {
        let mut next: BTreeSet<Cone> = BTreeSet::new();
        for c1 in &acc {
            for c2 in fan.maximal_cones() {
                let c = c1.intersect(c2, n);
                if c.dim() == c1.ambient_dim() {
                    next.insert(c);
                }
            }
        }
        acc = next.into_iter().collect();
    }
    Fan::from_maximal(&acc, n)
}

// ---------------------------------------------------------------------------
// Newton data of a monomial set.
// ---------------------------------------------------------------------------

/// Generators of a monomial ideal inside `σ^∨ ∩ M`, with its lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonData {
    generators: Vec<RatVec>,
    lattice_m: Lattice,
}

impl NewtonData {
    pub fn new(generators: Vec<RatVec>, lattice_m: Lattice) -> Result<NewtonData> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        let mut gens = generators;
        for g in &gens {
            assert!(
                !g.is_zero() && g.is_nonneg(),
                "Newton data generators must be nonzero with nonnegative coordinates"
            );
        }
        gens.sort();
        gens.dedup();
        Ok(NewtonData {
            generators: gens,
            lattice_m,
        })
    }

    pub fn generators(&self) -> &[RatVec] {
        &self.generators
    }

    pub fn lattice_m(&self) -> &Lattice {
        &self.lattice_m
    }

    /// Value of the support function at `ν`: the minimal pairing.
    pub fn support_value(&self, nu: &RatVec) -> Rat {
        self.generators
            .iter()
            .map(|g| nu.dot(g))
            .min()
            .expect("nonempty generators")
    }

    /// Generators achieving the minimum pairing at `ν`.
    pub fn min_generators(&self, nu: &RatVec) -> Vec<RatVec> {
        let m = self.support_value(nu);
        self.generators
            .iter()
            .filter(|g| nu.dot(g) == m)
            .cloned()
            .collect()
    }

    /// Dual fan of the Newton polyhedron, a subdivision of `σ`.
    ///
    /// Maximal cones are the closures of the loci with constant minimizing
    /// set, enumerated generator by generator.
    pub fn dual_fan(&self, n: &Lattice) -> Fan {
        let d = n.dim();
        let orthant: Vec<RatVec> = (0..d).map(|i| RatVec::unit(d, i)).collect();
        let mut maximal: BTreeSet<Cone> = BTreeSet::new();
        for g in &self.generators {
            let mut constraints = orthant.clone();
            for g2 in &self.generators {
                if g2 != g {
                    constraints.push(g2.sub(g));
                }
            }
            let rays = dd_extreme_rays(&constraints, d);
            if rank(&rays) == d {
                maximal.insert(Cone::from_rays(&rays, n));
            }
        }
        let max: Vec<Cone> = maximal.into_iter().collect();
        Fan::from_maximal(&max, n)
    }
}

// ---------------------------------------------------------------------------
// Half-open triangulation.
// ---------------------------------------------------------------------------

/// A simplicial cone with per-ray half-open flags.
///
/// The flag at position `i` marks the facet opposite ray `i` as open: lattice
/// points on that facet are excluded, which in parallelepiped coordinates
/// moves `t_i` from `[0,1)` to `(0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialPiece {
    pub rays: Vec<RatVec>,
    pub open_flags: Vec<bool>,
}

/// Decompose a strictly convex cone into half-open simplicial pieces whose
/// disjoint union covers the closed cone exactly once.
///
/// The triangulation pulls from the lexicographically least ray; flags are
/// assigned with a deterministic generic interior point.
pub fn triangulate(c: &Cone, n: &Lattice) -> Vec<SimplicialPiece> {
    if c.dim() == 0 {
        return vec![SimplicialPiece {
            rays: vec![],
            open_flags: vec![],
        }];
    }
    if c.is_simplicial() {
        return vec![SimplicialPiece {
            rays: c.rays().to_vec(),
            open_flags: vec![false; c.dim()],
        }];
    }
    let simplices = pull_triangulation(c, n);
    // span coordinates of lin(c)
    let lin_basis = rref(c.rays());
    let pivots = pivot_columns(&lin_basis);
    let m = lin_basis.len();
    // deterministic generic interior point, retried until off all walls
    'weights: for seed in 1i64.. {
        let mut w = RatVec::zero(c.ambient_dim());
        let mut weight = Rat::one();
        for r in c.rays() {
            w = w.add(&r.scale(&weight));
            weight *= rat_int(seed + 1);
        }
        let w_coords = w.restrict(&pivots);
        let mut pieces = Vec::new();
        for rays in &simplices {
            let coords: Vec<RatVec> = rays.iter().map(|r| r.restrict(&pivots)).collect();
            let normals = simplicial_facet_normals(&coords, m);
            let mut flags = Vec::with_capacity(m);
            for a in &normals {
                let v = a.dot(&w_coords);
                if v.is_zero() {
                    continue 'weights;
                }
                flags.push(v.is_negative());
            }
            pieces.push(SimplicialPiece {
                rays: rays.clone(),
                open_flags: flags,
            });
        }
        return pieces;
    }
    unreachable!("some weight seed is generic");
}

/// Pulling triangulation: join the least ray with triangulations of the
/// facets that do not contain it.
fn pull_triangulation(c: &Cone, n: &Lattice) -> Vec<Vec<RatVec>> {
    if c.is_simplicial() {
        return vec![c.rays().to_vec()];
    }
    let r0 = c.rays()[0].clone(); // rays are sorted: lexicographically least
    let mut out = Vec::new();
    for f in c.facets(n) {
        if f.contains(&r0) {
            continue;
        }
        for mut simplex in pull_triangulation(&f, n) {
            simplex.push(r0.clone());
            simplex.sort();
            out.push(simplex);
        }
    }
    out
}

/// Facet normals of a simplicial cone in span coordinates: row `i` pairs to
/// `δ_ij` against ray `j`, so the normal opposite ray `i` vanishes on all
/// other rays.
fn simplicial_facet_normals(ray_coords: &[RatVec], m: usize) -> Vec<RatVec> {
    let inv = crate::numlin::inverse(ray_coords).expect("simplicial rays are independent");
    // normal_i = column i of inverse
    (0..m)
        .map(|i| RatVec::new((0..m).map(|j| inv[j].entries()[i].clone()).collect()))
        .collect()
}
