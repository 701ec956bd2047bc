//! A branch whose first exponent sits strictly below the unit simplex:
//! exponents (1/2,1/4) in dimension two. Its level-1 minimizing region is
//! two-dimensional with a strictly positive minimizer, so distinct lattice
//! points share support values and the per-cone series must be reconstructed
//! from class enumeration rather than summed pointwise.

use qoseries::motivic::{self, Options, PieceMethod};
use qoseries::numlin::{rat, RatVec};
use qoseries::qocore::{CharData, QoSystem};

fn rvq(v: &[(i64, i64)]) -> RatVec {
    RatVec::new(v.iter().map(|&(p, q)| rat(p, q)).collect())
}

fn hidden_vertex_sys() -> QoSystem {
    QoSystem::new(CharData::qo(2, vec![rvq(&[(1, 2), (1, 4)])]).unwrap()).unwrap()
}

#[test]
fn level_one_region_is_two_dimensional() {
    let sys = hidden_vertex_sys();
    let interior: Vec<_> = sys
        .contributing_cones(1)
        .into_iter()
        .filter(|(c, flag)| *flag && c.dim() > 0)
        .collect();
    assert!(interior.iter().any(|(c, _)| c.dim() == 2));
}

#[test]
fn collapsed_classes_are_reconstructed_and_match_oracle() {
    let sys = hidden_vertex_sys();
    let opts = Options::default();
    let mut reconstructed = 0usize;
    for (cone, interior) in sys.contributing_cones(1) {
        if !interior || cone.dim() == 0 {
            continue;
        }
        let (_, method) = motivic::p_ktau(&sys, 1, &cone, &opts).unwrap();
        if method == PieceMethod::Reconstructed {
            reconstructed += 1;
        }
    }
    assert!(reconstructed > 0, "expected a collapsed-class cone at level 1");

    let report = qoseries::oracle::crosscheck(&sys, 12, &opts).unwrap();
    assert!(report.matches, "first mismatch: {:?}", report.first_mismatch);
}

#[test]
fn geometric_series_denominators_lie_in_pole_set() {
    let sys = hidden_vertex_sys();
    let opts = Options::default();
    let geom = motivic::p_geom(&sys, &opts).unwrap();
    let poles = motivic::candidate_poles(&sys, &opts).unwrap();
    let canon = motivic::canonical_form(&geom, &poles, None).unwrap();
    assert!(canon.equals(&geom));
    for &(a, b) in canon.den().keys() {
        assert!(poles.contains(&(a, b as u64)));
    }
}
