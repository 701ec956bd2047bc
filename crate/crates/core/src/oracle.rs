//! Brute-force enumeration of jet classes: the independent ground truth for
//! every closed form in the crate.
//!
//! A class at level `s` is determined by the active stratum `k`, the cone of
//! the cumulative refinement whose relative interior holds the witness, and
//! the tuple of support values up to `k`; it contributes
//! `(L-1)^k L^{sk - ord_k}` to the coefficient of `T^s`. Witnesses are
//! scanned over axis-aligned boxes in dual-lattice coordinates, doubling the
//! radius until two consecutive rounds agree, plus one safety doubling — the
//! class count per level is finite but no effective witness bound is
//! available, so stabilization is empirical and reported as such.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ltseries::LPoly;
use crate::numlin::{inverse, Rat, RatVec};
use crate::polyhedra::Cone;
use crate::qocore::QoSystem;

/// Identity of a jet class: stratum, cone, and the support-value tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassKey {
    pub k: usize,
    pub cone: usize,
    pub ords: Vec<i128>,
}

/// Classes per jet level, with the box radius that stabilized them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    /// `per_level[s]` holds the classes at level `s`; index 0 stays empty.
    pub per_level: Vec<BTreeSet<ClassKey>>,
    pub stabilized_radius: i64,
}

/// Integer-cleared linear form: `<ν, f> = dot(ν_scaled, coeffs) / denom`.
struct ScaledForm {
    coeffs: Vec<i128>,
    denom: i128,
}

impl ScaledForm {
    fn from_ratvec(f: &RatVec, n_scale: &BigInt) -> ScaledForm {
        let mut lcm = BigInt::one();
        for e in f.iter() {
            lcm = lcm.lcm(e.denom());
        }
        let coeffs = f
            .iter()
            .map(|e| big_to_i128(&(e.numer() * &lcm / e.denom())))
            .collect();
        ScaledForm {
            coeffs,
            denom: big_to_i128(&(lcm * n_scale)),
        }
    }

    fn dot(&self, nu_scaled: &[i128]) -> i128 {
        self.coeffs
            .iter()
            .zip(nu_scaled.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Exact value on a lattice point.
    fn value(&self, nu_scaled: &[i128]) -> i128 {
        let d = self.dot(nu_scaled);
        debug_assert_eq!(d % self.denom, 0, "pairing must be integral on N");
        d / self.denom
    }

    fn sign(&self, nu_scaled: &[i128]) -> i128 {
        self.dot(nu_scaled).signum()
    }
}

/// Sign tests for relative-interior membership of one cone.
struct ConeTest {
    eqs: Vec<ScaledForm>,
    ineqs: Vec<ScaledForm>,
    index: usize,
}

impl ConeTest {
    fn relint_contains(&self, nu_scaled: &[i128]) -> bool {
        self.eqs.iter().all(|f| f.sign(nu_scaled) == 0)
            && self.ineqs.iter().all(|f| f.sign(nu_scaled) > 0)
    }
}

fn big_to_i128(v: &BigInt) -> i128 {
    v.to_i128().expect("coordinates stay at desk scale")
}

/// Sign tests are scale-invariant, so the forms are cleared with unit scale.
fn cone_test(cone: &Cone, index: usize) -> ConeTest {
    let one = BigInt::one();
    ConeTest {
        eqs: cone
            .eqs()
            .iter()
            .map(|e| ScaledForm::from_ratvec(e, &one))
            .collect(),
        ineqs: cone
            .ineqs()
            .iter()
            .map(|e| ScaledForm::from_ratvec(e, &one))
            .collect(),
        index,
    }
}

/// Precomputed integer data for fast box scans.
struct Enumerator<'a> {
    sys: &'a QoSystem,
    n_scale: BigInt,
    /// Scaled basis rows of `N` (integer vectors).
    basis_scaled: Vec<Vec<i128>>,
    /// Rational inverse of the basis, for coefficient bounds.
    basis_inv: Vec<RatVec>,
    /// Per level `k`: the generator forms of the k-th ideal.
    gens: Vec<Vec<ScaledForm>>,
    /// Per level `k`: tests for the contributing interior cones.
    cones: Vec<Vec<ConeTest>>,
}

impl<'a> Enumerator<'a> {
    fn new(sys: &'a QoSystem) -> Enumerator<'a> {
        let n = sys.lattice_n();
        let basis = n.basis();
        let mut n_scale = BigInt::one();
        for row in &basis {
            for e in row.iter() {
                n_scale = n_scale.lcm(e.denom());
            }
        }
        let basis_scaled: Vec<Vec<i128>> = basis
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| big_to_i128(&(e.numer() * &n_scale / e.denom())))
                    .collect()
            })
            .collect();
        let basis_inv = inverse(&basis).expect("full-rank lattice basis");
        let d = sys.dim();
        let gens = (1..=d)
            .map(|k| {
                sys.jacobian(k)
                    .generators()
                    .iter()
                    .map(|g| ScaledForm::from_ratvec(g, &n_scale))
                    .collect()
            })
            .collect();
        let cones = (1..=d)
            .map(|k| {
                sys.contributing_cones(k)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, (c, interior))| *interior && c.dim() > 0)
                    .map(|(i, (c, _))| cone_test(&c, i))
                    .collect()
            })
            .collect();
        Enumerator {
            sys,
            n_scale,
            basis_scaled,
            basis_inv,
            gens,
            cones,
        }
    }

    fn ord(&self, k: usize, nu_scaled: &[i128]) -> i128 {
        if k == 0 {
            return 0;
        }
        self.gens[k - 1]
            .iter()
            .map(|f| f.value(nu_scaled))
            .min()
            .expect("nonempty generators")
    }

    /// Scan all interior lattice points with coordinates in `(0, radius]`,
    /// enforcing the point budget.
    fn scan(
        &self,
        radius: i64,
        budget: u64,
        mut visit: impl FnMut(&[i128]),
    ) -> Result<()> {
        let d = self.sys.dim();
        // coefficient bounds from the box corners
        let r = Rat::from_integer(BigInt::from(radius));
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for i in 0..d {
            let mut lo_acc = Rat::zero();
            let mut hi_acc = Rat::zero();
            for j in 0..d {
                let e = &self.basis_inv[j][i];
                let scaled = e * &r;
                if scaled.is_positive() {
                    hi_acc += scaled;
                } else {
                    lo_acc += scaled;
                }
            }
            lo[i] = big_to_i128(&lo_acc.floor().to_integer()) as i64;
            hi[i] = big_to_i128(&hi_acc.ceil().to_integer()) as i64;
        }
        let mut count: u64 = 1;
        for i in 0..d {
            count = count.saturating_mul((hi[i] - lo[i] + 1).max(0) as u64);
        }
        if count > budget {
            return Err(Error::BudgetExceeded(format!(
                "box scan at radius {radius} needs {count} candidate points, budget {budget}"
            )));
        }
        let bound = i128::from(radius) * big_to_i128(&self.n_scale);
        let mut coeff = vec![0i64; d];
        self.scan_rec(0, &lo, &hi, &mut coeff, bound, &mut visit);
        Ok(())
    }

    fn scan_rec(
        &self,
        depth: usize,
        lo: &[i64],
        hi: &[i64],
        coeff: &mut [i64],
        bound: i128,
        visit: &mut impl FnMut(&[i128]),
    ) {
        let d = self.sys.dim();
        if depth == d {
            let mut nu = vec![0i128; d];
            for (j, &cj) in coeff.iter().enumerate() {
                let c = i128::from(cj);
                if c == 0 {
                    continue;
                }
                for (i, v) in nu.iter_mut().enumerate() {
                    *v += c * self.basis_scaled[j][i];
                }
            }
            if nu.iter().all(|&x| x > 0 && x <= bound) {
                visit(&nu);
            }
            return;
        }
        for c in lo[depth]..=hi[depth] {
            coeff[depth] = c;
            self.scan_rec(depth + 1, lo, hi, coeff, bound, visit);
        }
    }

    /// One box round of the global class enumeration.
    fn classes_round(&self, radius: i64, s_max: usize, budget: u64) -> Result<Vec<BTreeSet<ClassKey>>> {
        let d = self.sys.dim();
        let mut per_level: Vec<BTreeSet<ClassKey>> = vec![BTreeSet::new(); s_max + 1];
        self.scan(radius, budget, |nu| {
            let ords: Vec<i128> = (0..=d).map(|k| self.ord(k, nu)).collect();
            for k in 1..=d {
                let phi_k = ords[k] - ords[k - 1];
                let s_lo = phi_k.max(1);
                let s_hi = if k == d {
                    s_max as i128
                } else {
                    let phi_next = ords[k + 1] - ords[k];
                    (phi_next - 1).min(s_max as i128)
                };
                if s_lo > s_hi {
                    continue;
                }
                let Some(test) = self.cones[k - 1]
                    .iter()
                    .find(|t| t.relint_contains(nu))
                else {
                    continue;
                };
                let key = ClassKey {
                    k,
                    cone: test.index,
                    ords: ords[1..=k].to_vec(),
                };
                for s in s_lo..=s_hi {
                    per_level[s as usize].insert(key.clone());
                }
            }
        })?;
        Ok(per_level)
    }

    /// One box round of the single-cone class enumeration.
    fn cone_round(
        &self,
        k: usize,
        test: &ConeTest,
        radius: i64,
        s_max: usize,
        budget: u64,
    ) -> Result<Vec<BTreeSet<Vec<i128>>>> {
        let d = self.sys.dim();
        let top = if k == d { k } else { k + 1 };
        let mut per_level: Vec<BTreeSet<Vec<i128>>> = vec![BTreeSet::new(); s_max + 1];
        self.scan(radius, budget, |nu| {
            if !test.relint_contains(nu) {
                return;
            }
            let ords: Vec<i128> = (0..=top).map(|j| self.ord(j, nu)).collect();
            let phi_k = ords[k] - ords[k - 1];
            let s_lo = phi_k.max(1);
            let s_hi = if k == d {
                s_max as i128
            } else {
                (ords[k + 1] - ords[k] - 1).min(s_max as i128)
            };
            if s_lo > s_hi {
                return;
            }
            let key = ords[1..=k].to_vec();
            for s in s_lo..=s_hi {
                per_level[s as usize].insert(key.clone());
            }
        })?;
        Ok(per_level)
    }
}

/// Stabilized enumeration of all jet classes up to level `s_max`.
///
/// Boxes double until two consecutive rounds agree, then one safety round is
/// taken; disagreement there restarts the criterion.
pub fn enumerate_classes(sys: &QoSystem, s_max: usize, box_limit: u64) -> Result<ClassTable> {
    let enumerator = Enumerator::new(sys);
    let mut radius: i64 = 2;
    let mut prev = enumerator.classes_round(radius, s_max, box_limit)?;
    loop {
        let next_radius = radius * 2;
        let next = enumerator.classes_round(next_radius, s_max, box_limit)?;
        if next == prev {
            // safety doubling
            let safety = enumerator.classes_round(next_radius * 2, s_max, box_limit)?;
            if safety == next {
                return Ok(ClassTable {
                    per_level: safety,
                    stabilized_radius: next_radius * 2,
                });
            }
            prev = safety;
            radius = next_radius * 2;
        } else {
            prev = next;
            radius = next_radius;
        }
    }
}

/// Series coefficients from the classes: the coefficient of `T^s` is the sum
/// of `(L-1)^k L^{sk - ord_k}` over the classes at level `s`.
pub fn series_coefficients(sys: &QoSystem, s_max: usize, box_limit: u64) -> Result<Vec<LPoly>> {
    let table = enumerate_classes(sys, s_max, box_limit)?;
    Ok(coefficients_from_classes(&table, s_max))
}

pub fn coefficients_from_classes(table: &ClassTable, s_max: usize) -> Vec<LPoly> {
    let max_k = table
        .per_level
        .iter()
        .flat_map(|set| set.iter().map(|key| key.k))
        .max()
        .unwrap_or(0);
    let lm1_pows: Vec<LPoly> = (0..=max_k).map(|k| LPoly::l_minus_one().pow(k)).collect();
    let mut out = vec![LPoly::zero(); s_max + 1];
    for (s, classes) in table.per_level.iter().enumerate() {
        let mut acc = LPoly::zero();
        for key in classes {
            let ord_k = *key.ords.last().expect("nonempty tuple");
            let exp = (s as i128) * (key.k as i128) - ord_k;
            let term = lm1_pows[key.k].shift(i64::try_from(exp).expect("exponent fits i64"));
            acc = acc.add(&term);
        }
        out[s] = acc;
    }
    out
}

/// Class-sum coefficients of a single contributing cone at level `k`,
/// including the `(L-1)^k` factor, to order `s_max`.
pub fn cone_class_series(
    sys: &QoSystem,
    k: usize,
    cone: &Cone,
    s_max: usize,
    box_limit: u64,
) -> Result<Vec<LPoly>> {
    let enumerator = Enumerator::new(sys);
    let test = cone_test(cone, 0);
    let mut radius: i64 = 2;
    let mut prev = enumerator.cone_round(k, &test, radius, s_max, box_limit)?;
    let stable = loop {
        let next_radius = radius * 2;
        let next = enumerator.cone_round(k, &test, next_radius, s_max, box_limit)?;
        if next == prev {
            let safety = enumerator.cone_round(k, &test, next_radius * 2, s_max, box_limit)?;
            if safety == next {
                break safety;
            }
            prev = safety;
            radius = next_radius * 2;
        } else {
            prev = next;
            radius = next_radius;
        }
    };
    let lm1 = LPoly::l_minus_one().pow(k);
    let mut out = vec![LPoly::zero(); s_max + 1];
    for (s, classes) in stable.iter().enumerate() {
        let mut acc = LPoly::zero();
        for ords in classes {
            let ord_k = *ords.last().expect("nonempty tuple");
            let exp = (s as i128) * (k as i128) - ord_k;
            acc = acc.add(&lm1.shift(i64::try_from(exp).expect("exponent fits i64")));
        }
        out[s] = acc;
    }
    Ok(out)
}

/// Outcome of comparing closed-form expansion against the oracle.
#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub s_max: usize,
    pub matches: bool,
    /// `(s, closed-form coefficient, oracle coefficient)` of the first
    /// disagreement, with the classes at that level.
    pub first_mismatch: Option<(usize, LPoly, LPoly, Vec<ClassKey>)>,
    pub stabilized_radius: i64,
}

/// Compare coefficients of the closed-form interior series with the oracle.
pub fn crosscheck(
    sys: &QoSystem,
    s_max: usize,
    opts: &crate::motivic::Options,
) -> Result<CrosscheckReport> {
    let closed = crate::motivic::p_interior(sys, opts)?;
    let expanded = closed.expand(s_max)?;
    let table = enumerate_classes(sys, s_max, opts.box_limit)?;
    Ok(compare_with_table(&expanded, &table, s_max))
}

/// Comparison harness, separated so tests can feed corrupted coefficients.
pub fn compare_with_table(
    closed_coeffs: &[LPoly],
    table: &ClassTable,
    s_max: usize,
) -> CrosscheckReport {
    let oracle_coeffs = coefficients_from_classes(table, s_max);
    for s in 0..=s_max {
        if closed_coeffs[s] != oracle_coeffs[s] {
            return CrosscheckReport {
                s_max,
                matches: false,
                first_mismatch: Some((
                    s,
                    closed_coeffs[s].clone(),
                    oracle_coeffs[s].clone(),
                    table.per_level[s].iter().cloned().collect(),
                )),
                stabilized_radius: table.stabilized_radius,
            };
        }
    }
    CrosscheckReport {
        s_max,
        matches: true,
        first_mismatch: None,
        stabilized_radius: table.stabilized_radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motivic::Options;
    use crate::numlin::rat;
    use crate::qocore::CharData;

    fn rvq(v: &[(i64, i64)]) -> RatVec {
        RatVec::new(v.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    fn surface_sys() -> QoSystem {
        QoSystem::new(
            CharData::qo(
                2,
                vec![
                    rvq(&[(3, 2), (0, 1)]),
                    rvq(&[(7, 4), (0, 1)]),
                    rvq(&[(2, 1), (1, 2)]),
                ],
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn smooth_line_classes() {
        let sys = QoSystem::new(CharData::qo(1, vec![]).unwrap()).unwrap();
        let coeffs = series_coefficients(&sys, 3, 1 << 20).unwrap();
        assert_eq!(coeffs[0], LPoly::zero());
        // coefficient of T^s is L^s - 1
        for (s, got) in coeffs.iter().enumerate().skip(1) {
            let mut expected = LPoly::monomial(s as i64, BigInt::one());
            expected.add_term(0, BigInt::from(-1));
            assert_eq!(got, &expected, "T^{s}");
        }
    }

    #[test]
    fn surface_level_four() {
        let sys = surface_sys();
        let table = enumerate_classes(&sys, 4, 1 << 20).unwrap();
        for s in 0..4 {
            assert!(table.per_level[s].is_empty(), "level {s}");
        }
        let classes: Vec<&ClassKey> = table.per_level[4].iter().collect();
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.k == 2));
        let ords: BTreeSet<Vec<i128>> = classes.iter().map(|c| c.ords.clone()).collect();
        let expected: BTreeSet<Vec<i128>> =
            [vec![2, 6], vec![4, 8]].into_iter().collect();
        assert_eq!(ords, expected);
        // contributions: (L-1)^2 (L^2 + 1) at T^4
        let coeffs = coefficients_from_classes(&table, 4);
        let expected_coeff = LPoly::l_minus_one()
            .pow(2)
            .mul(&LPoly::monomial(2, BigInt::one()).add(&LPoly::one()));
        assert_eq!(coeffs[4], expected_coeff);
    }

    #[test]
    fn crosscheck_smooth_surface() {
        let sys = QoSystem::new(CharData::qo(2, vec![]).unwrap()).unwrap();
        let report = crosscheck(&sys, 8, &Options::default()).unwrap();
        assert!(report.matches, "{:?}", report.first_mismatch);
    }

    #[test]
    fn corrupted_coefficients_are_reported() {
        let sys = QoSystem::new(CharData::qo(1, vec![]).unwrap()).unwrap();
        let table = enumerate_classes(&sys, 5, 1 << 20).unwrap();
        let mut coeffs = coefficients_from_classes(&table, 5);
        coeffs[3] = coeffs[3].add(&LPoly::one());
        let report = compare_with_table(&coeffs, &table, 5);
        assert!(!report.matches);
        assert_eq!(report.first_mismatch.as_ref().unwrap().0, 3);
    }
}
