//! Assembly of the interior series, the full geometric motivic Poincaré
//! series, the candidate-pole set and the motivic volume.
//!
//! Per contributing cone the series is summed in closed form whenever the
//! support values separate the lattice points of the cone (always at the top
//! level `k = d`); otherwise the coefficients are enumerated by the oracle
//! and the numerator is reconstructed against the prescribed denominator.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::genfun::{relint_cone_series, substitute_l, substitute_lt};
use crate::ltseries::{reconstruct_numerator, BivRat, LPoly, LVolRat, TPoly};
use crate::numlin::{rank, rref, RatVec};
use crate::polyhedra::Cone;
use crate::qocore::{QoSystem, SectionLattice};

/// Assembly options.
#[derive(Clone, Debug)]
pub struct Options {
    /// Lattice used for coordinate sections.
    pub section_lattice: SectionLattice,
    /// Point budget per cone for oracle enumeration.
    pub box_limit: u64,
    /// Guard-window override for numerator reconstruction.
    pub guard: Option<usize>,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            section_lattice: SectionLattice::Ambient,
            box_limit: 1 << 20,
            guard: None,
        }
    }
}

/// How a per-cone series was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceMethod {
    Closed,
    Reconstructed,
}

/// The series of jets truncating to the origin: `1/(1-T)`.
pub fn p_point() -> BivRat {
    BivRat::geometric(0, 1)
}

/// The interior series of a plane-curve germ of multiplicity `m`:
/// `(L-1)/(1-LT) * T^m/(1-T^m)`.
pub fn p_curve(m: u64) -> BivRat {
    let mut den: BTreeMap<(i64, usize), usize> = BTreeMap::new();
    den.insert((1, 1), 1);
    *den.entry((0, m as usize)).or_insert(0) += 1;
    BivRat::new(TPoly::monomial(m as usize, LPoly::l_minus_one()), den)
}

/// Deterministic minimizing generator of the k-th ideal over the relative
/// interior of a cone: the least one at the interior representative.
fn min_generator(sys: &QoSystem, k: usize, cone: &Cone) -> RatVec {
    let rep = cone.relint_representative();
    sys.jacobian(k).min_generators(&rep)[0].clone()
}

/// The element of `M` pairing to `Ψ_k`: `(k-1) g_k - k g_{k-1}`.
fn psi_element(sys: &QoSystem, k: usize, cone: &Cone) -> RatVec {
    let d = sys.dim();
    let g_k = min_generator(sys, k, cone);
    if k == 1 {
        return RatVec::zero(d);
    }
    let g_prev = min_generator(sys, k - 1, cone);
    g_k.scale(&crate::numlin::rat_int(k as i64 - 1))
        .sub(&g_prev.scale(&crate::numlin::rat_int(k as i64)))
}

/// The element of `M` pairing to `φ_k`: `g_k - g_{k-1}`.
fn phi_element(sys: &QoSystem, k: usize, cone: &Cone) -> RatVec {
    let g_k = min_generator(sys, k, cone);
    if k == 1 {
        return g_k;
    }
    g_k.sub(&min_generator(sys, k - 1, cone))
}

/// Check that the level-`k` grading is at least one on every ray of the
/// cone; a violation means the series would have unbounded coefficients.
fn assert_grading_positive(sys: &QoSystem, k: usize, cone: &Cone) -> Result<()> {
    for ray in cone.rays() {
        let phi = sys.phi(k, ray);
        if !phi.is_positive() {
            return Err(Error::InternalInconsistency(format!(
                "grading φ_{k} is {phi} on ray {ray} of a contributing cone; \
                 the level-{k} series would not converge"
            )));
        }
    }
    Ok(())
}

/// Is the tuple of support values injective on the span of the cone?
fn values_separate_points(sys: &QoSystem, k: usize, cone: &Cone) -> bool {
    if cone.dim() > k {
        return false;
    }
    let basis = rref(cone.rays());
    let gens: Vec<RatVec> = (1..=k).map(|i| min_generator(sys, i, cone)).collect();
    let pairing_rows: Vec<RatVec> = basis
        .iter()
        .map(|b| RatVec::new(gens.iter().map(|g| b.dot(g)).collect()))
        .collect();
    rank(&pairing_rows) == cone.dim()
}

/// The contribution of one contributing cone at level `k`.
///
/// Closed path: partition the relative interior by the next refinement and
/// telescope the geometric sums into
/// `(L-1)^k/(1-L^k T) * Σ (L^{Ψ_k} T^{φ_k} - L^{Ψ_{k+1}} T^{φ_{k+1}})`.
/// Fallback (support values collapse classes, only possible below the top
/// level): enumerate the class sums and reconstruct the numerator over the
/// prescribed per-ray denominator.
pub fn p_ktau(
    sys: &QoSystem,
    k: usize,
    cone: &Cone,
    opts: &Options,
) -> Result<(BivRat, PieceMethod)> {
    let d = sys.dim();
    assert!(k >= 1 && k <= d && cone.dim() >= 1);
    assert_grading_positive(sys, k, cone)?;
    if values_separate_points(sys, k, cone) {
        let fan_next = sys.cumulative_fan((k + 1).min(d));
        let n = sys.lattice_n();
        let mut total = BivRat::zero();
        for sub in fan_next.cones() {
            if sub.dim() == 0
                || !cone.contains_cone(sub)
                || !cone.relint_contains(&sub.relint_representative())
            {
                continue;
            }
            let series = relint_cone_series(sub, n)?;
            let term1 = substitute_lt(&series, &psi_element(sys, k, sub), &phi_element(sys, k, sub))?;
            let piece = if k < d {
                let term2 = substitute_lt(
                    &series,
                    &psi_element(sys, k + 1, sub),
                    &phi_element(sys, k + 1, sub),
                )?;
                term1.sub(&term2)
            } else {
                term1
            };
            total = total.add(&piece);
        }
        let prefactor = BivRat::geometric(k as i64, 1).scale(&LPoly::l_minus_one().pow(k));
        Ok((total.mul(&prefactor), PieceMethod::Closed))
    } else {
        let series = reconstruct_collapsed(sys, k, cone, opts)?;
        Ok((series, PieceMethod::Reconstructed))
    }
}

/// Fallback: oracle enumeration of the class sums over one cone plus
/// numerator reconstruction against the per-ray denominator.
fn reconstruct_collapsed(
    sys: &QoSystem,
    k: usize,
    cone: &Cone,
    opts: &Options,
) -> Result<BivRat> {
    let d = sys.dim();
    debug_assert!(k < d);
    let mut den: BTreeMap<(i64, usize), usize> = BTreeMap::new();
    for ray in cone.rays() {
        let a = int_i64(&sys.psi(k, ray));
        let b = int_usize(&sys.phi(k, ray));
        *den.entry((a, b)).or_insert(0) += 1;
    }
    for ray in sys.fan(k + 1).rays() {
        if !cone.contains(&ray) {
            continue;
        }
        let phi_next = sys.phi(k + 1, &ray);
        if phi_next == sys.phi(k, &ray) {
            continue;
        }
        let a = int_i64(&sys.psi(k + 1, &ray));
        let b = int_usize(&phi_next);
        *den.entry((a, b)).or_insert(0) += 1;
    }
    let den_deg: usize = den.iter().map(|(&(_, b), &m)| b * m).sum();
    let max_b = den.keys().map(|&(_, b)| b).max().unwrap_or(1);
    let mut guard = opts.guard.unwrap_or(2 * max_b).max(2);
    let mut last_err = None;
    for _ in 0..3 {
        let order = den_deg + guard;
        let coeffs = crate::oracle::cone_class_series(sys, k, cone, order, opts.box_limit)?;
        match reconstruct_numerator(&coeffs, &den, guard) {
            Ok(num) => return Ok(BivRat::new(num, den)),
            Err(e) => last_err = Some(e),
        }
        guard *= 2;
    }
    Err(last_err.unwrap())
}

fn int_i64(v: &BigInt) -> i64 {
    i64::try_from(v).expect("exponent fits i64")
}

fn int_usize(v: &BigInt) -> usize {
    usize::try_from(v).expect("exponent fits usize")
}

/// The interior series: jets not factoring through any proper coordinate
/// section, summed over all contributing cones.
pub fn p_interior(sys: &QoSystem, opts: &Options) -> Result<BivRat> {
    let mut total = BivRat::zero();
    for k in 1..=sys.dim() {
        for (cone, interior) in sys.contributing_cones(k) {
            if !interior || cone.dim() == 0 {
                continue;
            }
            let (piece, _) = p_ktau(sys, k, &cone, opts)?;
            total = total.add(&piece);
        }
    }
    Ok(total)
}

/// The geometric motivic Poincaré series: the sum of the interior series of
/// all coordinate sections.
pub fn p_geom(sys: &QoSystem, opts: &Options) -> Result<BivRat> {
    let mut total = BivRat::zero();
    for section in sys.sections() {
        if section.is_point() {
            total = total.add(&p_point());
            continue;
        }
        let cd = section.char_data(sys.char_data().mode(), opts.section_lattice)?;
        let sub_sys = QoSystem::new(cd)?;
        total = total.add(&p_interior(&sub_sys, opts)?);
    }
    Ok(total)
}

/// Union of the candidate-pole sets of all coordinate sections.
pub fn candidate_poles(sys: &QoSystem, opts: &Options) -> Result<BTreeSet<(i64, u64)>> {
    let mut out: BTreeSet<(i64, u64)> = BTreeSet::new();
    for section in sys.sections() {
        if section.is_point() {
            out.insert((0, 1));
            continue;
        }
        let cd = section.char_data(sys.char_data().mode(), opts.section_lattice)?;
        let sub_sys = QoSystem::new(cd)?;
        out.extend(sub_sys.b_set());
    }
    Ok(out)
}

/// The motivic volume of the arc space, from the top-level data alone:
/// `(L-1)^d Σ_τ η_τ(R_τ) Π (1 - L^{-ord_d(ν_ρ)})^{-1}` over the cones of the
/// top dual fan meeting the interior.
pub fn motivic_volume(sys: &QoSystem) -> Result<LVolRat> {
    let d = sys.dim();
    let fan = sys.fan(d);
    let n = sys.lattice_n();
    let mut total = LVolRat::zero();
    for cone in fan.cones() {
        if cone.dim() == 0 || !cone.relint_in_interior() {
            continue;
        }
        let g_d = min_generator(sys, d, cone);
        let series = relint_cone_series(cone, n)?;
        let piece = substitute_l(&series, &g_d.neg())?;
        total = total.add(&piece);
    }
    Ok(total.scale(&LPoly::l_minus_one().pow(d)))
}

/// Canonicalize a series against a pole set: reconstruct the numerator over
/// the product of the pole factors, each taken once.
pub fn canonical_form(
    series: &BivRat,
    poles: &BTreeSet<(i64, u64)>,
    guard_opt: Option<usize>,
) -> Result<BivRat> {
    let den: BTreeMap<(i64, usize), usize> = poles
        .iter()
        .map(|&(a, b)| ((a, b as usize), 1usize))
        .collect();
    let den_deg: usize = den.keys().map(|&(_, b)| b).sum();
    let max_b = den.keys().map(|&(_, b)| b).max().unwrap_or(1);
    let mut guard = guard_opt.unwrap_or(2 * max_b).max(2);
    let mut last_err = None;
    for _ in 0..3 {
        let order = den_deg + guard;
        let coeffs = series.expand(order)?;
        match reconstruct_numerator(&coeffs, &den, guard) {
            Ok(num) => return Ok(BivRat::new(num, den)),
            Err(e) => last_err = Some(e),
        }
        guard *= 2;
    }
    Err(last_err.unwrap())
}

/// Per-cone record in the assembly report.
#[derive(Clone, Debug)]
pub struct PieceReport {
    pub k: usize,
    pub cone_rays: Vec<RatVec>,
    pub method: PieceMethod,
    pub series: BivRat,
}

/// Per-face record in the assembly report.
#[derive(Clone, Debug)]
pub struct FaceReport {
    pub keep: Vec<usize>,
    pub series: BivRat,
    pub poles: BTreeSet<(i64, u64)>,
}

/// Full assembly: every per-cone piece, per-face series, the interior and
/// geometric series with canonical forms, candidate poles and the volume.
pub struct AssemblyReport {
    pub pieces: Vec<PieceReport>,
    pub interior: BivRat,
    pub interior_canonical: BivRat,
    pub faces: Vec<FaceReport>,
    pub geometric: BivRat,
    pub geometric_canonical: BivRat,
    pub candidate_poles: BTreeSet<(i64, u64)>,
    pub volume: LVolRat,
}

pub fn assembly_report(sys: &QoSystem, opts: &Options) -> Result<AssemblyReport> {
    let mut pieces = Vec::new();
    let mut interior = BivRat::zero();
    for k in 1..=sys.dim() {
        for (cone, flag) in sys.contributing_cones(k) {
            if !flag || cone.dim() == 0 {
                continue;
            }
            let (series, method) = p_ktau(sys, k, &cone, opts)?;
            interior = interior.add(&series);
            pieces.push(PieceReport {
                k,
                cone_rays: cone.rays().to_vec(),
                method,
                series,
            });
        }
    }
    let interior_canonical = canonical_form(&interior, &sys.b_set(), opts.guard)?;

    let mut faces = Vec::new();
    let mut geometric = BivRat::zero();
    for section in sys.sections() {
        let (series, poles) = if section.is_point() {
            (p_point(), [(0i64, 1u64)].into_iter().collect())
        } else {
            let cd = section.char_data(sys.char_data().mode(), opts.section_lattice)?;
            let sub_sys = QoSystem::new(cd)?;
            (p_interior(&sub_sys, opts)?, sub_sys.b_set())
        };
        geometric = geometric.add(&series);
        faces.push(FaceReport {
            keep: section.keep.clone(),
            series,
            poles,
        });
    }
    let candidate_poles: BTreeSet<(i64, u64)> =
        faces.iter().flat_map(|f| f.poles.iter().copied()).collect();
    let geometric_canonical = canonical_form(&geometric, &candidate_poles, opts.guard)?;
    let volume = motivic_volume(sys)?;
    Ok(AssemblyReport {
        pieces,
        interior,
        interior_canonical,
        faces,
        geometric,
        geometric_canonical,
        candidate_poles,
        volume,
    })
}
