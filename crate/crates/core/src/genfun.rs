//! Rational forms of lattice-point generating series of rational cones.
//!
//! A [`ConeSeries`] stores the generating series of a (closed or relatively
//! open) cone as a finite numerator over denominator factors `(1 - x^ν_ρ)`,
//! one per ray. Closed simplicial pieces are handled by enumerating the
//! half-open fundamental parallelepiped; relative interiors come from
//! inclusion–exclusion over faces, which avoids Laurent inversion and reuses
//! the closed-cone routine. Denominator rays are never cancelled against
//! numerator terms so the factors keep their provenance.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ltseries::{BivRat, LPoly, LVolRat, TPoly};
use crate::numlin::{snf_left, Lattice, Rat, RatVec};
use crate::polyhedra::{triangulate, Cone, SimplicialPiece};

/// A finite integer combination of lattice points, the numerator of a
/// [`ConeSeries`].
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MonomialSum {
    terms: BTreeMap<RatVec, BigInt>,
}

impl MonomialSum {
    pub fn zero() -> MonomialSum {
        MonomialSum::default()
    }

    pub fn point(p: RatVec) -> MonomialSum {
        let mut s = MonomialSum::zero();
        s.add_term(p, BigInt::from(1));
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RatVec, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, p: RatVec, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(p.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, other: &MonomialSum) -> MonomialSum {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> MonomialSum {
        let mut out = MonomialSum::zero();
        for (p, c0) in &self.terms {
            out.add_term(p.clone(), c0 * c);
        }
        out
    }

    /// Multiply by the factor `(1 - x^v)`.
    pub fn mul_ray_factor(&self, v: &RatVec) -> MonomialSum {
        let mut out = self.clone();
        for (p, c) in &self.terms {
            out.add_term(p.add(v), -c.clone());
        }
        out
    }
}

impl fmt::Debug for MonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*x^{p}")?;
        }
        Ok(())
    }
}

/// Rational form of a lattice-point generating series:
/// `numerator / prod over rays (1 - x^ν_ρ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSeries {
    numerator: MonomialSum,
    denominator_rays: Vec<RatVec>,
}

impl ConeSeries {
    pub fn numerator(&self) -> &MonomialSum {
        &self.numerator
    }

    pub fn denominator_rays(&self) -> &[RatVec] {
        &self.denominator_rays
    }
}

/// Generating series of a half-open simplicial cone.
///
/// The numerator enumerates the lattice points of the fundamental
/// parallelepiped `{Σ t_i v_i : t_i ∈ [0,1) or (0,1] per flag}`; the
/// denominator rays are the rays of the piece.
pub fn closed_cone_series(piece: &SimplicialPiece, n: &Lattice) -> Result<ConeSeries> {
    let m = piece.rays.len();
    if m > 0 {
        let coords: Vec<RatVec> = piece
            .rays
            .iter()
            .map(|r| n.coordinates(r).expect("ray lies in the lattice span"))
            .collect();
        if crate::numlin::rank(&coords) < m {
            return Err(Error::NotSimplicial {
                rays: m,
                dim: crate::numlin::rank(&coords),
            });
        }
    }
    let mut numerator = MonomialSum::zero();
    for t in parallelepiped_parameters(piece, n) {
        let mut p = RatVec::zero(n.dim());
        for (ti, v) in t.iter().zip(piece.rays.iter()) {
            p = p.add(&v.scale(ti));
        }
        debug_assert!(n.member(&p));
        numerator.add_term(p, BigInt::from(1));
    }
    Ok(ConeSeries {
        numerator,
        denominator_rays: piece.rays.clone(),
    })
}

/// Parameter tuples `t` of the parallelepiped lattice points, adjusted into
/// `[0,1)` or `(0,1]` per the open flags.
fn parallelepiped_parameters(piece: &SimplicialPiece, n: &Lattice) -> Vec<Vec<Rat>> {
    let m = piece.rays.len();
    if m == 0 {
        return vec![vec![]];
    }
    // integer coordinates of the rays in the lattice basis
    let c_rows: Vec<Vec<BigInt>> = piece
        .rays
        .iter()
        .map(|r| {
            n.coordinates(r)
                .expect("ray lies in the lattice span")
                .iter()
                .map(|c| {
                    assert!(c.is_integer(), "rays must be lattice points");
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    let (diag, u) = snf_left(&c_rows);
    let mut out = Vec::new();
    let mut index = vec![BigInt::zero(); m];
    loop {
        // t = (index_i / diag_i) * U, one representative per residue class
        let mut t = vec![Rat::zero(); m];
        for i in 0..m {
            let ui = BigRational::new(index[i].clone(), diag[i].clone());
            for (j, tj) in t.iter_mut().enumerate() {
                *tj += &ui * BigRational::from_integer(u[i][j].clone());
            }
        }
        for (ti, &open) in t.iter_mut().zip(piece.open_flags.iter()) {
            let fl = ti.floor();
            *ti -= fl;
            if open && ti.is_zero() {
                *ti = Rat::from_integer(BigInt::from(1));
            }
        }
        out.push(t);
        // increment the mixed-radix index
        let mut carry = true;
        for i in 0..m {
            if !carry {
                break;
            }
            index[i] += 1;
            if index[i] < diag[i] {
                carry = false;
            } else {
                index[i] = BigInt::zero();
            }
        }
        if carry {
            break;
        }
    }
    out
}

/// Generating series of the relative interior of a strictly convex cone.
///
/// Computed by inclusion–exclusion over the faces, each face triangulated
/// into half-open simplicial pieces, and normalized to a single fraction
/// over the rays of the cone.
pub fn relint_cone_series(c: &Cone, n: &Lattice) -> Result<ConeSeries> {
    let all_rays: Vec<RatVec> = c.rays().to_vec();
    let mut numerator = MonomialSum::zero();
    for face in c.faces(n) {
        let sign = if (c.dim() - face.dim()).is_multiple_of(2) {
            BigInt::from(1)
        } else {
            BigInt::from(-1)
        };
        for piece in triangulate(&face, n) {
            let cs = closed_cone_series(&piece, n)?;
            let mut contrib = cs.numerator.clone();
            for r in &all_rays {
                if !piece.rays.contains(r) {
                    contrib = contrib.mul_ray_factor(r);
                }
            }
            numerator = numerator.add(&contrib.scale(&sign));
        }
    }
    Ok(ConeSeries {
        numerator,
        denominator_rays: all_rays,
    })
}

/// Substitute `x^u -> L^{<u,a>} T^{<u,b>}` into a cone series.
///
/// The linear maps are given by pairing against fixed elements of `M`; both
/// must take integer values on the lattice points involved. Denominator rays
/// must not map to the zero factor.
pub fn substitute_lt(cs: &ConeSeries, a_elem: &RatVec, b_elem: &RatVec) -> Result<BivRat> {
    let mut num = TPoly::zero();
    for (p, c) in cs.numerator.terms() {
        let a = pairing_int(p, a_elem);
        let b = pairing_int(p, b_elem);
        assert!(!b.is_negative(), "T-grading must be nonnegative on the cone");
        let b_usize = usize::try_from(&b).expect("T-exponent fits usize");
        let a_i64 = i64::try_from(&a).expect("L-exponent fits i64");
        num.add_term(b_usize, LPoly::monomial(a_i64, c.clone()));
    }
    let mut den: BTreeMap<(i64, usize), usize> = BTreeMap::new();
    for r in cs.denominator_rays() {
        let a = pairing_int(r, a_elem);
        let b = pairing_int(r, b_elem);
        assert!(!b.is_negative(), "T-grading must be nonnegative on rays");
        let a_i64 = i64::try_from(&a).expect("L-exponent fits i64");
        let b_usize = usize::try_from(&b).expect("T-exponent fits usize");
        if a_i64 == 0 && b_usize == 0 {
            return Err(Error::InvalidSubstitution {
                ray: format!("{r}"),
            });
        }
        *den.entry((a_i64, b_usize)).or_insert(0) += 1;
    }
    Ok(BivRat::new(num, den))
}

/// Substitute `x^u -> L^{<u,a>}` into a cone series, for strictly negative
/// values on the denominator rays; the factors become `(1 - L^{-c})`.
pub fn substitute_l(cs: &ConeSeries, a_elem: &RatVec) -> Result<LVolRat> {
    let mut num = LPoly::zero();
    for (p, c) in cs.numerator.terms() {
        let a = pairing_int(p, a_elem);
        let a_i64 = i64::try_from(&a).expect("L-exponent fits i64");
        num.add_term(a_i64, c.clone());
    }
    let mut den: BTreeMap<u64, usize> = BTreeMap::new();
    for r in cs.denominator_rays() {
        let a = pairing_int(r, a_elem);
        if !a.is_negative() {
            return Err(Error::InvalidSubstitution {
                ray: format!("{r}"),
            });
        }
        let c = u64::try_from(&(-a)).expect("order fits u64");
        *den.entry(c).or_insert(0) += 1;
    }
    Ok(LVolRat::new(num, den))
}

fn pairing_int(p: &RatVec, elem: &RatVec) -> BigInt {
    let v = p.dot(elem);
    assert!(
        v.is_integer(),
        "pairing <{p}, {elem}> = {v} is not an integer"
    );
    v.to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::rat;
    use crate::polyhedra::Cone;

    fn z(d: usize) -> Lattice {
        Lattice::standard(d)
    }

    fn rv(v: &[i64]) -> RatVec {
        RatVec::from_ints(v)
    }

    fn closed_piece(rays: &[RatVec]) -> SimplicialPiece {
        SimplicialPiece {
            rays: rays.to_vec(),
            open_flags: vec![false; rays.len()],
        }
    }

    /// Expand a cone series inside the box `[0, bound]^d` by saturating the
    /// numerator with the denominator rays.
    fn expand_in_box(cs: &ConeSeries, bound: i64) -> BTreeMap<RatVec, BigInt> {
        let inside = |p: &RatVec| {
            p.iter()
                .all(|c| !c.is_negative() && *c <= rat(bound, 1))
        };
        let mut acc: BTreeMap<RatVec, BigInt> = BTreeMap::new();
        for (p, c) in cs.numerator.terms() {
            *acc.entry(p.clone()).or_insert_with(BigInt::zero) += c;
        }
        for r in cs.denominator_rays() {
            // multiply by 1/(1 - x^r) = sum_m x^{m r}, truncated to the box
            let mut next: BTreeMap<RatVec, BigInt> = BTreeMap::new();
            for (p, c) in &acc {
                if c.is_zero() {
                    continue;
                }
                let mut q = p.clone();
                loop {
                    *next.entry(q.clone()).or_insert_with(BigInt::zero) += c;
                    q = q.add(r);
                    // points may wander outside and return only for rays with
                    // mixed signs, which cone rays never have
                    if !inside(&q) {
                        break;
                    }
                }
            }
            acc = next;
        }
        acc.retain(|p, c| inside(p) && !c.is_zero());
        acc
    }

    #[test]
    fn unimodular_closed_cone() {
        let n = z(2);
        let piece = closed_piece(&[rv(&[1, 0]), rv(&[0, 1])]);
        let cs = closed_cone_series(&piece, &n).unwrap();
        assert_eq!(cs.numerator, MonomialSum::point(RatVec::zero(2)));
    }

    #[test]
    fn ray_in_sublattice() {
        let n = Lattice::from_generators(&[rv(&[4, 0]), rv(&[0, 2])], 2).unwrap();
        let piece = closed_piece(&[rv(&[4, 4])]);
        let cs = closed_cone_series(&piece, &n).unwrap();
        assert_eq!(cs.numerator, MonomialSum::point(RatVec::zero(2)));
        assert_eq!(cs.denominator_rays(), &[rv(&[4, 4])]);
    }

    #[test]
    fn parallelepiped_two_dim() {
        let n = z(2);
        let piece = closed_piece(&[rv(&[1, 0]), rv(&[1, 2])]);
        let cs = closed_cone_series(&piece, &n).unwrap();
        let mut expected = MonomialSum::point(RatVec::zero(2));
        expected.add_term(rv(&[1, 1]), BigInt::from(1));
        assert_eq!(cs.numerator, expected);
    }

    #[test]
    fn relint_of_ray() {
        let n = z(2);
        let c = Cone::from_rays(&[rv(&[1, 4])], &n);
        let cs = relint_cone_series(&c, &n).unwrap();
        assert_eq!(cs.numerator, MonomialSum::point(rv(&[1, 4])));
        assert_eq!(cs.denominator_rays(), &[rv(&[1, 4])]);
    }

    #[test]
    fn relint_of_orthant() {
        let n = z(2);
        let c = Cone::orthant(&n);
        let cs = relint_cone_series(&c, &n).unwrap();
        assert_eq!(cs.numerator, MonomialSum::point(rv(&[1, 1])));
    }

    #[test]
    fn relint_matches_box_enumeration() {
        let n = Lattice::from_generators(&[rv(&[4, 0]), rv(&[0, 2])], 2).unwrap();
        let c = Cone::from_rays(&[rv(&[4, 4]), rv(&[4, 16])], &n);
        let cs = relint_cone_series(&c, &n).unwrap();
        let expanded = expand_in_box(&cs, 40);
        for x in 0..=10 {
            for y in 0..=20 {
                let p = rv(&[4 * x, 2 * y]);
                let expected = BigInt::from(u8::from(c.relint_contains(&p)));
                let got = expanded.get(&p).cloned().unwrap_or_default();
                assert_eq!(got, expected, "at {p}");
            }
        }
    }

    #[test]
    fn closed_equals_sum_of_face_relints() {
        let n = z(2);
        let c = Cone::from_rays(&[rv(&[1, 0]), rv(&[1, 2])], &n);
        let closed = closed_cone_series(&closed_piece(&[rv(&[1, 0]), rv(&[1, 2])]), &n).unwrap();
        let mut total: BTreeMap<RatVec, BigInt> = BTreeMap::new();
        for face in c.faces(&n) {
            let cs = relint_cone_series(&face, &n).unwrap();
            for (p, v) in expand_in_box(&cs, 12) {
                *total.entry(p).or_insert_with(BigInt::zero) += v;
            }
        }
        total.retain(|_, v| !v.is_zero());
        let closed_exp = expand_in_box(&closed, 12);
        // compare within a safe sub-box to dodge truncation edge effects
        for x in 0..=8 {
            for y in 0..=8 {
                let p = rv(&[x, y]);
                assert_eq!(
                    total.get(&p).cloned().unwrap_or_default(),
                    closed_exp.get(&p).cloned().unwrap_or_default(),
                    "at {p}"
                );
            }
        }
    }

    #[test]
    fn substitute_lt_examples() {
        let n = Lattice::from_generators(&[rv(&[4, 0]), rv(&[0, 2])], 2).unwrap();
        // single ray (4,4): x^v/(1-x^v) with a=0 on v, b(v)=4 gives T^4/(1-T^4)
        let c = Cone::from_rays(&[rv(&[4, 4])], &n);
        let cs = relint_cone_series(&c, &n).unwrap();
        let a = RatVec::new(vec![rat(1, 1), rat(-1, 1)]); // vanishes on (4,4)
        let b = RatVec::new(vec![rat(1, 2), rat(1, 2)]); // value 4 on (4,4)
        let sub = substitute_lt(&cs, &a, &b).unwrap();
        let expected = BivRat::new(
            TPoly::monomial(4, LPoly::one()),
            [((0i64, 4usize), 1usize)].into_iter().collect(),
        );
        assert!(sub.equals(&expected));

        // ray (4,16) with the surface maps: L^12 T^16 / (1 - L^12 T^16)
        let c2 = Cone::from_rays(&[rv(&[4, 16])], &n);
        let cs2 = relint_cone_series(&c2, &n).unwrap();
        // a: psi_2 = <., (1, 1/2)>; b: phi_2 = <., (2, 1/2)> on that sector
        let a2 = RatVec::new(vec![rat(1, 1), rat(1, 2)]);
        let b2 = RatVec::new(vec![rat(2, 1), rat(1, 2)]);
        let sub2 = substitute_lt(&cs2, &a2, &b2).unwrap();
        let expected2 = BivRat::new(
            TPoly::monomial(16, LPoly::monomial(12, BigInt::from(1))),
            [((12i64, 16usize), 1usize)].into_iter().collect(),
        );
        assert!(sub2.equals(&expected2));

        // zero numerator stays zero
        let zero = ConeSeries {
            numerator: MonomialSum::zero(),
            denominator_rays: vec![rv(&[2, 2])],
        };
        assert!(substitute_lt(&zero, &a, &b).unwrap().is_zero());
    }

    #[test]
    fn substitute_l_examples() {
        let n = Lattice::from_generators(&[rv(&[4, 0]), rv(&[0, 2])], 2).unwrap();
        let c = Cone::from_rays(&[rv(&[4, 16])], &n);
        let cs = relint_cone_series(&c, &n).unwrap();
        // -ord along (5, 0): value -20 on (4,16)
        let a = RatVec::new(vec![rat(-5, 1), rat(0, 1)]);
        let vol = substitute_l(&cs, &a).unwrap();
        assert_eq!(vol.num(), &LPoly::monomial(-20, BigInt::from(1)));
        assert_eq!(vol.den().get(&20), Some(&1));

        // nonnegative value on a ray is rejected
        let bad = RatVec::new(vec![rat(5, 1), rat(0, 1)]);
        assert!(matches!(
            substitute_l(&cs, &bad),
            Err(Error::InvalidSubstitution { .. })
        ));

        // empty numerator maps to zero
        let empty = ConeSeries {
            numerator: MonomialSum::zero(),
            denominator_rays: vec![rv(&[4, 16])],
        };
        assert!(substitute_l(&empty, &a).unwrap().num().is_zero());
    }

    #[test]
    fn substitute_commutes_with_box_expansion() {
        let n = z(2);
        let c = Cone::from_rays(&[rv(&[1, 1]), rv(&[1, 3])], &n);
        let cs = relint_cone_series(&c, &n).unwrap();
        let a = RatVec::new(vec![rat(1, 1), rat(0, 1)]);
        let b = RatVec::new(vec![rat(1, 1), rat(1, 1)]);
        let sub = substitute_lt(&cs, &a, &b).unwrap();
        let order = 10usize;
        let coeffs = sub.expand(order).unwrap();
        // direct: sum over relint points in a box large enough for the order
        let mut direct: Vec<LPoly> = vec![LPoly::zero(); order + 1];
        for x in 0..=(order as i64) {
            for y in 0..=(order as i64) {
                let p = rv(&[x, y]);
                if !c.relint_contains(&p) {
                    continue;
                }
                let bt = x + y;
                if bt as usize <= order {
                    direct[bt as usize].add_term(x, BigInt::from(1));
                }
            }
        }
        for s in 0..=order {
            assert_eq!(coeffs[s], direct[s], "coefficient of T^{s}");
        }
    }
}
