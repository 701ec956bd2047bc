//! Characteristic data of a quasi-ordinary branch (or toric generator data),
//! the lattice chain, logarithmic jacobian ideals, the piecewise-linear
//! grading functions, the greedy minimizer chain, contributing cones and the
//! candidate-pole set.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numlin::{rank, rref, Lattice, Rat, RatVec};
use crate::polyhedra::{refine, Fan, NewtonData};

/// Input flavor: quasi-ordinary exponents or toric semigroup generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Qo,
    Toric,
}

/// Which lattice a coordinate section is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SectionLattice {
    /// `M ∩ θ^⊥`: the ambient lattice of the section (default).
    #[default]
    Ambient,
    /// The lattice generated by the section's own data.
    Branch,
}

/// Validated combinatorial input.
#[derive(Clone, PartialEq, Eq)]
pub struct CharData {
    mode: Mode,
    d: usize,
    /// Characteristic exponents (qo) or semigroup generators (toric),
    /// after the recorded coordinate permutation.
    vectors: Vec<RatVec>,
    lattice_m: Lattice,
    chain: Option<LatticeChain>,
    /// Coordinate permutation applied to reach the normal form; entry `j`
    /// holds the original position of the new coordinate `j`.
    permutation: Vec<usize>,
    warnings: Vec<String>,
}

/// The chain `M_0 ⊆ M_1 ⊆ … ⊆ M_g` with its indices.
#[derive(Clone, PartialEq, Eq)]
pub struct LatticeChain {
    pub lattices: Vec<Lattice>,
    pub indices: Vec<BigInt>,
}

impl CharData {
    /// Validate top-level quasi-ordinary input. Normalization failures are
    /// errors here; use [`CharData::qo_derived`] for section data.
    pub fn qo(d: usize, exponents: Vec<RatVec>) -> Result<CharData> {
        Self::qo_inner(d, exponents, None, false)
    }

    /// Validate section-derived quasi-ordinary data over a supplied ambient
    /// lattice; normalization failures are warnings.
    pub fn qo_derived(d: usize, exponents: Vec<RatVec>, lattice: Lattice) -> Result<CharData> {
        Self::qo_inner(d, exponents, Some(lattice), true)
    }

    fn qo_inner(
        d: usize,
        exponents: Vec<RatVec>,
        lattice: Option<Lattice>,
        derived: bool,
    ) -> Result<CharData> {
        assert!(d >= 1, "ambient dimension must be positive");
        for (j, e) in exponents.iter().enumerate() {
            assert_eq!(e.dim(), d, "exponent dimension mismatch");
            if !e.is_nonneg() || e.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "exponent #{} must be nonzero with nonnegative entries",
                    j + 1
                )));
            }
        }
        // componentwise monotone and strictly increasing
        for j in 1..exponents.len() {
            let prev = &exponents[j - 1];
            let cur = &exponents[j];
            let dominates = (0..d).all(|i| prev[i] <= cur[i]);
            if !dominates || prev == cur {
                return Err(Error::NotMonotone { index: j + 1 });
            }
        }
        // sort coordinates so the per-coordinate exponent sequences decrease
        // lexicographically; record the permutation
        let mut permutation: Vec<usize> = (0..d).collect();
        permutation.sort_by(|&a, &b| {
            let seq_a: Vec<&Rat> = exponents.iter().map(|e| &e[a]).collect();
            let seq_b: Vec<&Rat> = exponents.iter().map(|e| &e[b]).collect();
            seq_b.cmp(&seq_a).then(a.cmp(&b))
        });
        let exponents: Vec<RatVec> = exponents
            .iter()
            .map(|e| RatVec::new(permutation.iter().map(|&i| e[i].clone()).collect()))
            .collect();
        let lattice = lattice.map(|l| l.permute_coordinates(&permutation));

        let mut warnings = Vec::new();
        if let Some(first) = exponents.first() {
            let pure_first = (1..d).all(|i| first[i].is_zero());
            if pure_first && first[0] < crate::numlin::rat_int(1) {
                if derived {
                    warnings.push(format!(
                        "section data is not normalized: first exponent ({}, 0, ...) below 1",
                        first[0]
                    ));
                } else {
                    return Err(Error::NotNormalized {
                        value: format!("{}", first[0]),
                    });
                }
            }
        }

        // lattice chain
        let mut lattices = vec![Lattice::standard(d)];
        let mut indices = Vec::new();
        for (j, e) in exponents.iter().enumerate() {
            let prev = lattices.last().unwrap();
            if prev.member(e) {
                return Err(Error::NotCharacteristic { index: j + 1 });
            }
            let mut gens = prev.basis();
            gens.push(e.clone());
            let next = Lattice::from_generators(&gens, d).expect("chain stays full rank");
            indices.push(prev.index_in(&next).expect("chain is increasing"));
            lattices.push(next);
        }
        let chain = LatticeChain { lattices, indices };
        let lattice_m = match lattice {
            Some(l) => {
                for e in &exponents {
                    if !l.member(e) {
                        return Err(Error::InvalidInput(format!(
                            "exponent {e} does not lie in the supplied lattice"
                        )));
                    }
                }
                l
            }
            None => chain.lattices.last().unwrap().clone(),
        };
        Ok(CharData {
            mode: Mode::Qo,
            d,
            vectors: exponents,
            lattice_m,
            chain: Some(chain),
            permutation,
            warnings,
        })
    }

    /// Validate toric input: semigroup generators, optionally with a
    /// supplied lattice (defaults to the group they generate).
    pub fn toric(d: usize, generators: Vec<RatVec>, lattice: Option<Lattice>) -> Result<CharData> {
        assert!(d >= 1, "ambient dimension must be positive");
        let mut gens = Vec::new();
        for (j, g) in generators.iter().enumerate() {
            assert_eq!(g.dim(), d, "generator dimension mismatch");
            if !g.is_nonneg() || g.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "generator #{} must be nonzero with nonnegative entries",
                    j + 1
                )));
            }
            if !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        let lattice_m = match lattice {
            Some(l) => {
                for g in &gens {
                    if !l.member(g) {
                        return Err(Error::InvalidInput(format!(
                            "generator {g} does not lie in the supplied lattice"
                        )));
                    }
                }
                l
            }
            None => Lattice::from_generators(&gens, d)?,
        };
        if rank(&gens) < d {
            return Err(Error::RankDeficient {
                rank: rank(&gens),
                dim: d,
            });
        }
        Ok(CharData {
            mode: Mode::Toric,
            d,
            vectors: gens,
            lattice_m,
            chain: None,
            permutation: (0..d).collect(),
            warnings: Vec::new(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Exponents (qo) or generators (toric), in the permuted frame.
    pub fn vectors(&self) -> &[RatVec] {
        &self.vectors
    }

    pub fn lattice_m(&self) -> &Lattice {
        &self.lattice_m
    }

    pub fn chain(&self) -> Option<&LatticeChain> {
        self.chain.as_ref()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// In qo mode, the list `e_1..e_d, λ_1..λ_g` indexed from zero.
    fn extended_vectors(&self) -> Vec<RatVec> {
        debug_assert_eq!(self.mode, Mode::Qo);
        let mut out: Vec<RatVec> = (0..self.d).map(|i| RatVec::unit(self.d, i)).collect();
        out.extend(self.vectors.iter().cloned());
        out
    }
}

impl fmt::Debug for CharData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CharData({:?}, d={}, vectors=[", self.mode, self.d)?;
        for (i, v) in self.vectors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "])")
    }
}

// ---------------------------------------------------------------------------
// The precomputed system: ideals, fans, refinements.
// ---------------------------------------------------------------------------

/// All per-germ precomputed data: jacobian generator sets, their dual fans
/// and the cumulative refinements. Fans are built on first use; everything
/// is immutable afterwards and safe to share.
pub struct QoSystem {
    cd: CharData,
    n: Lattice,
    jk: Vec<NewtonData>,
    sigma: std::sync::OnceLock<Vec<Fan>>,
    cumulative: std::sync::OnceLock<Vec<Fan>>,
}

impl QoSystem {
    pub fn new(cd: CharData) -> Result<QoSystem> {
        let n = cd.lattice_m().dual();
        let d = cd.dim();
        let mut jk = Vec::with_capacity(d);
        for k in 1..=d {
            jk.push(jacobian_generators(&cd, k)?);
        }
        Ok(QoSystem {
            cd,
            n,
            jk,
            sigma: std::sync::OnceLock::new(),
            cumulative: std::sync::OnceLock::new(),
        })
    }

    pub fn char_data(&self) -> &CharData {
        &self.cd
    }

    pub fn dim(&self) -> usize {
        self.cd.dim()
    }

    pub fn lattice_n(&self) -> &Lattice {
        &self.n
    }

    /// Generator set of the k-th logarithmic jacobian ideal, `1 <= k <= d`.
    pub fn jacobian(&self, k: usize) -> &NewtonData {
        &self.jk[k - 1]
    }

    fn fans(&self) -> &Vec<Fan> {
        self.sigma
            .get_or_init(|| self.jk.iter().map(|nd| nd.dual_fan(&self.n)).collect())
    }

    /// Dual fan of the k-th Newton polyhedron.
    pub fn fan(&self, k: usize) -> &Fan {
        &self.fans()[k - 1]
    }

    /// Common refinement of the first k dual fans.
    pub fn cumulative_fan(&self, k: usize) -> &Fan {
        let cums = self.cumulative.get_or_init(|| {
            let sigma = self.fans();
            let mut out: Vec<Fan> = Vec::with_capacity(sigma.len());
            for k in 0..sigma.len() {
                let fan = if k == 0 {
                    sigma[0].clone()
                } else {
                    refine(&[out[k - 1].clone(), sigma[k].clone()], &self.n)
                };
                out.push(fan);
            }
            out
        });
        &cums[k - 1]
    }

    /// Support-function value of the k-th ideal at a lattice point.
    pub fn ord(&self, k: usize, nu: &RatVec) -> BigInt {
        if k == 0 {
            return BigInt::zero();
        }
        let v = self.jk[k - 1].support_value(nu);
        assert!(v.is_integer(), "support value must be integral on N");
        v.to_integer()
    }

    /// `φ_k = ord_k - ord_{k-1}` for `1 <= k <= d`; `φ_0 = 0`.
    pub fn phi(&self, k: usize, nu: &RatVec) -> BigInt {
        if k == 0 {
            return BigInt::zero();
        }
        self.ord(k, nu) - self.ord(k - 1, nu)
    }

    /// `Ψ_k = (k-1) ord_k - k ord_{k-1}` for `1 <= k <= d`; `Ψ_1 = 0`.
    pub fn psi(&self, k: usize, nu: &RatVec) -> BigInt {
        BigInt::from(k as i64 - 1) * self.ord(k, nu) - BigInt::from(k as i64) * self.ord(k - 1, nu)
    }

    /// The stratum index of `(ν, s)`: the unique `k` with
    /// `φ_k(ν) <= s < φ_{k+1}(ν)` (conventions `φ_0 = 0`, `φ_{d+1} = ∞`).
    pub fn stratum(&self, nu: &RatVec, s: &BigInt) -> usize {
        let mut k = 0usize;
        for j in 1..=self.dim() {
            if self.phi(j, nu) <= *s {
                k = j;
            } else {
                break;
            }
        }
        k
    }

    /// Contributing cones at level `k`, with the flag marking cones whose
    /// relative interior lies in the interior of `σ`.
    ///
    /// For `k < d` a cone contributes when every minimizing generator of the
    /// k-th ideal over its relative interior has strictly positive
    /// coordinates; at `k = d` every cone of the refinement qualifies.
    pub fn contributing_cones(&self, k: usize) -> Vec<(crate::polyhedra::Cone, bool)> {
        let fan = self.cumulative_fan(k);
        let mut out = Vec::new();
        for cone in fan.cones() {
            let interior = cone.relint_in_interior();
            if k < self.dim() {
                if cone.dim() == 0 {
                    continue;
                }
                let rep = cone.relint_representative();
                let mins = self.jk[k - 1].min_generators(&rep);
                if !mins.iter().all(|g| g.is_strictly_positive()) {
                    continue;
                }
            }
            out.push((cone.clone(), interior));
        }
        out
    }

    /// The finite candidate-pole set of the interior series.
    pub fn b_set(&self) -> BTreeSet<(i64, u64)> {
        let d = self.dim();
        let mut out = BTreeSet::new();
        out.insert((d as i64, 1u64));
        for k in 1..=d {
            let mut rays: Vec<RatVec> = Vec::new();
            for fan in &self.fans()[..k] {
                rays.extend(fan.rays());
            }
            rays.sort();
            rays.dedup();
            for ray in rays {
                if k < d && !ray.is_strictly_positive() {
                    continue;
                }
                let a = self.psi(k, &ray);
                let b = self.phi(k, &ray);
                assert!(
                    b.is_positive(),
                    "grading φ_{k} must be positive on contributing ray {ray}"
                );
                out.insert((
                    i64::try_from(&a).expect("exponent fits i64"),
                    u64::try_from(&b).expect("exponent fits u64"),
                ));
            }
        }
        out
    }

    /// Coordinate sections, one per subset of surviving coordinates.
    pub fn sections(&self) -> Vec<SectionData> {
        let d = self.dim();
        let mut out = Vec::new();
        for mask in 0..(1u32 << d) {
            let keep: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
            out.push(self.section(&keep));
        }
        out.sort_by_key(|s| (std::cmp::Reverse(s.keep.len()), s.keep.clone()));
        out
    }

    fn section(&self, keep: &[usize]) -> SectionData {
        let cd = &self.cd;
        if keep.is_empty() {
            return SectionData {
                keep: vec![],
                surviving: vec![],
                lattice_ambient: None,
                lattice_branch: None,
                component_index: BigInt::from(1),
            };
        }
        let ambient = cd.lattice_m().intersect_coordinate_subspace(keep);
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        let restricted: Vec<RatVec> = cd
            .vectors
            .iter()
            .filter(|v| v.support().iter().all(|i| keep_set.contains(i)))
            .map(|v| v.restrict(keep))
            .collect();
        let (surviving, branch) = match cd.mode {
            Mode::Qo => {
                // keep an exponent only when it leaves the lattice built so far
                let mut lattice = Lattice::standard(keep.len());
                let mut surv = Vec::new();
                for e in restricted {
                    if lattice.member(&e) {
                        continue;
                    }
                    let mut gens = lattice.basis();
                    gens.push(e.clone());
                    lattice = Lattice::from_generators(&gens, keep.len())
                        .expect("section chain stays full rank");
                    surv.push(e);
                }
                (surv, lattice)
            }
            Mode::Toric => {
                let mut surv = restricted;
                surv.sort();
                surv.dedup();
                let mut gens: Vec<RatVec> =
                    (0..keep.len()).map(|i| RatVec::unit(keep.len(), i)).collect();
                gens.extend(surv.iter().cloned());
                // the unit vectors keep this full rank even when the
                // restricted generators are degenerate
                let lattice = Lattice::from_generators(&gens, keep.len())
                    .expect("units span the section");
                (surv, lattice)
            }
        };
        let component_index = branch.index_in(&ambient).unwrap_or_else(|_| BigInt::from(1));
        SectionData {
            keep: keep.to_vec(),
            surviving,
            lattice_ambient: Some(ambient),
            lattice_branch: Some(branch),
            component_index,
        }
    }
}

// ---------------------------------------------------------------------------
// Jacobian generator sets.
// ---------------------------------------------------------------------------

/// Generators of the k-th logarithmic jacobian ideal.
///
/// Quasi-ordinary mode: sums of `k` linearly independent vectors among the
/// coordinate vectors and the characteristic exponents, at most one exponent
/// per sum and always in the last slot. Toric mode: sums of `k` linearly
/// independent semigroup generators.
pub fn jacobian_generators(cd: &CharData, k: usize) -> Result<NewtonData> {
    assert!(k >= 1 && k <= cd.dim());
    let mut sums: Vec<RatVec> = Vec::new();
    match cd.mode {
        Mode::Qo => {
            let d = cd.dim();
            let g = cd.vectors.len();
            // unit-only subsets
            for combo in combinations(d, k) {
                let mut s = RatVec::zero(d);
                for &i in &combo {
                    s = s.add(&RatVec::unit(d, i));
                }
                sums.push(s);
            }
            // k-1 units plus one exponent, independent when the exponent has
            // support outside the chosen units
            for t in 0..g {
                let lam = &cd.vectors[t];
                let supp: BTreeSet<usize> = lam.support().into_iter().collect();
                for combo in combinations(d, k - 1) {
                    let chosen: BTreeSet<usize> = combo.iter().copied().collect();
                    if supp.is_subset(&chosen) {
                        continue;
                    }
                    let mut s = lam.clone();
                    for &i in &combo {
                        s = s.add(&RatVec::unit(d, i));
                    }
                    sums.push(s);
                }
            }
        }
        Mode::Toric => {
            let n = cd.vectors.len();
            for combo in combinations(n, k) {
                let chosen: Vec<RatVec> = combo.iter().map(|&i| cd.vectors[i].clone()).collect();
                if rank(&chosen) < k {
                    continue;
                }
                let mut s = RatVec::zero(cd.dim());
                for v in &chosen {
                    s = s.add(v);
                }
                sums.push(s);
            }
        }
    }
    NewtonData::new(sums, cd.lattice_m().clone())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The greedy minimizer chain.
// ---------------------------------------------------------------------------

/// Which rule produced a step of the minimizer chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepChoice {
    /// Appended the cheapest admissible vector.
    Append,
    /// Swapped the held exponent for the next one plus the freed coordinate.
    Swap,
}

/// State of the minimizer chain after step `k`.
#[derive(Clone, Debug)]
pub struct WkResult {
    pub k: usize,
    /// The minimizing vector `w_k` with `<ν, w_k> = ord_k(ν)`.
    pub w: RatVec,
    /// Indices into `e_1..e_d, λ_1..λ_g` of the summands, sorted.
    pub summands: Vec<usize>,
    /// Canonical basis of the span of the summands.
    pub ell_basis: Vec<RatVec>,
    /// 1-based index of the exponent among the summands; 0 when none.
    pub n_k: usize,
    /// Least exponent index outside the span; `g + 1` when none.
    pub t_k: usize,
    /// 1-based coordinate in the span that is not a summand; 0 when none.
    pub m_k: usize,
    /// Rule that produced this step (`None` for the first step).
    pub choice: Option<StepChoice>,
}

impl QoSystem {
    /// Run the greedy minimizer chain at an interior lattice point up to
    /// level `upto_k`, returning one record per step.
    ///
    /// Ties in the pairing order are broken with coordinate vectors before
    /// exponents, then by index, which fixes the output deterministically.
    pub fn minimizer_chain(&self, nu: &RatVec, upto_k: usize) -> Result<Vec<WkResult>> {
        assert_eq!(self.cd.mode, Mode::Qo, "minimizer chain is qo-mode only");
        assert!(upto_k >= 1 && upto_k <= self.dim());
        assert!(
            nu.is_strictly_positive(),
            "minimizer chain needs an interior point"
        );
        let d = self.dim();
        let g = self.cd.vectors.len();
        let vectors = self.cd.extended_vectors();
        let value = |idx: usize| nu.dot(&vectors[idx]);
        // pairing order with deterministic tie-breaking
        let mut order: Vec<usize> = (0..d + g).collect();
        order.sort_by(|&a, &b| {
            value(a)
                .cmp(&value(b))
                .then((a >= d).cmp(&(b >= d)))
                .then(a.cmp(&b))
        });

        let mut steps: Vec<WkResult> = Vec::new();
        let mut summands = vec![order[0]];
        let mut choice: Option<StepChoice> = None;
        for k in 1..=upto_k {
            let w = summands
                .iter()
                .fold(RatVec::zero(d), |acc, &i| acc.add(&vectors[i]));
            let expected = self.ord(k, nu);
            let got = nu.dot(&w);
            if got != Rat::from_integer(expected.clone()) {
                return Err(Error::InternalInconsistency(format!(
                    "minimizer value {got} differs from support value {expected} at level {k}"
                )));
            }
            let span_vecs: Vec<RatVec> = summands.iter().map(|&i| vectors[i].clone()).collect();
            let ell_basis = rref(&span_vecs);
            let n_k = summands
                .iter()
                .find(|&&i| i >= d)
                .map(|&i| i - d + 1)
                .unwrap_or(0);
            let t_k = (1..=g)
                .find(|&j| {
                    let mut with = ell_basis.clone();
                    with.push(self.cd.vectors[j - 1].clone());
                    rank(&with) > ell_basis.len()
                })
                .unwrap_or(g + 1);
            let m_k = if n_k == 0 {
                0
            } else {
                let lam = &self.cd.vectors[n_k - 1];
                let in_summands: BTreeSet<usize> =
                    summands.iter().copied().filter(|&i| i < d).collect();
                let missing: Vec<usize> = lam
                    .support()
                    .into_iter()
                    .filter(|i| !in_summands.contains(i))
                    .collect();
                match missing.as_slice() {
                    [single] => single + 1,
                    [] => 0,
                    _ => 0,
                }
            };
            steps.push(WkResult {
                k,
                w: w.clone(),
                summands: summands.clone(),
                ell_basis: ell_basis.clone(),
                n_k,
                t_k,
                m_k,
                choice,
            });
            if k == upto_k {
                break;
            }

            // choose the next vector
            let next_gens = self.jacobian(k + 1);
            let i_k = order
                .iter()
                .copied()
                .find(|&i| {
                    let cand = w.add(&vectors[i]);
                    next_gens.generators().binary_search(&cand).is_ok()
                })
                .ok_or_else(|| {
                    Error::InternalInconsistency(format!("no admissible extension at level {k}"))
                })?;
            let a_vec = w.add(&vectors[i_k]);
            let a_val = nu.dot(&a_vec);
            // swap candidate: defined only with a held exponent, a freed
            // coordinate and a next exponent available
            let b = if n_k > 0 && m_k > 0 && t_k <= g {
                let lam_n = &self.cd.vectors[n_k - 1];
                let lam_t = &self.cd.vectors[t_k - 1];
                let b_vec = w
                    .sub(lam_n)
                    .add(lam_t)
                    .add(&RatVec::unit(d, m_k - 1));
                let b_val = nu.dot(&b_vec);
                Some((b_vec, b_val))
            } else {
                None
            };
            match b {
                Some((b_vec, b_val)) if b_val < a_val => {
                    debug_assert!(next_gens.generators().binary_search(&b_vec).is_ok());
                    summands.retain(|&i| i != d + n_k - 1);
                    summands.push(d + t_k - 1);
                    summands.push(m_k - 1);
                    summands.sort();
                    choice = Some(StepChoice::Swap);
                }
                _ => {
                    // recover a valid summand representation for the append
                    if !summands.contains(&i_k)
                        && represents(&vectors, &summands, i_k, d)
                    {
                        summands.push(i_k);
                        summands.sort();
                    } else {
                        let reps = representation_of(&vectors, &a_vec, k + 1, d, g);
                        summands = reps.ok_or_else(|| {
                            Error::InternalInconsistency(format!(
                                "no summand representation for {a_vec} at level {}",
                                k + 1
                            ))
                        })?;
                    }
                    choice = Some(StepChoice::Append);
                }
            }
        }
        Ok(steps)
    }

    /// The coordinate subspace attached to `(ν, s)` together with its
    /// stratum index: the span of the cheap vectors below the active
    /// exponent threshold.
    pub fn ell_nu_s(&self, nu: &RatVec, s: &BigInt) -> (usize, Vec<RatVec>) {
        assert_eq!(self.cd.mode, Mode::Qo);
        let d = self.dim();
        let g = self.cd.vectors.len();
        let k = self.stratum(nu, s);
        let t_k = if k == 0 {
            1
        } else {
            self.minimizer_chain(nu, k).expect("chain runs").last().unwrap().t_k
        };
        let s_rat = Rat::from_integer(s.clone());
        let mut gens: Vec<RatVec> = Vec::new();
        for i in 0..d {
            if nu[i] <= s_rat {
                gens.push(RatVec::unit(d, i));
            }
        }
        for j in 1..=g.min(t_k.saturating_sub(1)) {
            let lam = &self.cd.vectors[j - 1];
            if nu.dot(lam) <= s_rat {
                gens.push(lam.clone());
            }
        }
        (k, rref(&gens))
    }

    /// The largest usable exponent index at `(ν, s)`; `None` in stratum 0.
    pub fn p_index(&self, nu: &RatVec, s: &BigInt) -> Option<usize> {
        assert_eq!(self.cd.mode, Mode::Qo);
        let g = self.cd.vectors.len();
        let k = self.stratum(nu, s);
        if k == 0 {
            return None;
        }
        let step = self
            .minimizer_chain(nu, k)
            .expect("chain runs")
            .pop()
            .unwrap();
        let s_rat = Rat::from_integer(s.clone());
        if step.n_k == 0 {
            let p = (1..=g)
                .filter(|&j| nu.dot(&self.cd.vectors[j - 1]) <= s_rat)
                .max()
                .unwrap_or(0);
            Some(p)
        } else if step.m_k == 0 {
            Some(step.n_k)
        } else {
            let e_m = RatVec::unit(self.dim(), step.m_k - 1);
            let lam_n = &self.cd.vectors[step.n_k - 1];
            let p = (step.n_k + 1..step.t_k)
                .filter(|&j| {
                    let v = e_m.sub(lam_n).add(&self.cd.vectors[j - 1]);
                    nu.dot(&v) <= s_rat
                })
                .max()
                .unwrap_or(step.n_k);
            Some(p)
        }
    }
}

/// Does appending vector `idx` to the summands yield a valid generator
/// representation (independent, at most one exponent)?
fn represents(vectors: &[RatVec], summands: &[usize], idx: usize, d: usize) -> bool {
    let exponents = summands.iter().filter(|&&i| i >= d).count() + usize::from(idx >= d);
    if exponents > 1 {
        return false;
    }
    let mut vecs: Vec<RatVec> = summands.iter().map(|&i| vectors[i].clone()).collect();
    vecs.push(vectors[idx].clone());
    rank(&vecs) == vecs.len()
}

/// Find any valid summand representation of a target vector as a sum of `k`
/// admissible vectors; deterministic first match.
fn representation_of(
    vectors: &[RatVec],
    target: &RatVec,
    k: usize,
    d: usize,
    g: usize,
) -> Option<Vec<usize>> {
    // unit-only
    for combo in combinations(d, k) {
        let sum = combo
            .iter()
            .fold(RatVec::zero(d), |acc, &i| acc.add(&vectors[i]));
        if &sum == target {
            return Some(combo);
        }
    }
    for t in 0..g {
        for combo in combinations(d, k - 1) {
            let mut sum = vectors[d + t].clone();
            for &i in &combo {
                sum = sum.add(&vectors[i]);
            }
            if &sum == target {
                let mut out = combo;
                out.push(d + t);
                let vecs: Vec<RatVec> = out.iter().map(|&i| vectors[i].clone()).collect();
                if rank(&vecs) == vecs.len() {
                    out.sort();
                    return Some(out);
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Sections.
// ---------------------------------------------------------------------------

/// One coordinate section: the data of the germ cut by vanishing all
/// coordinates outside `keep`.
#[derive(Clone, Debug)]
pub struct SectionData {
    /// Surviving coordinate positions (the support of `θ^⊥`).
    pub keep: Vec<usize>,
    /// Surviving filtered exponents/generators in the `keep`-frame.
    pub surviving: Vec<RatVec>,
    /// `M ∩ θ^⊥` in the `keep`-frame; `None` for the point section.
    pub lattice_ambient: Option<Lattice>,
    /// Lattice generated by the section's own data; `None` for the point.
    pub lattice_branch: Option<Lattice>,
    /// Index of the branch lattice inside the ambient one (the number of
    /// irreducible components of the germ at a generic section point).
    pub component_index: BigInt,
}

impl SectionData {
    pub fn is_point(&self) -> bool {
        self.keep.is_empty()
    }

    /// Validated data for the section germ, over the chosen lattice.
    pub fn char_data(&self, mode: Mode, switch: SectionLattice) -> Result<CharData> {
        assert!(!self.is_point());
        let lattice = match switch {
            SectionLattice::Ambient => self.lattice_ambient.clone().unwrap(),
            SectionLattice::Branch => self.lattice_branch.clone().unwrap(),
        };
        match mode {
            Mode::Qo => CharData::qo_derived(self.keep.len(), self.surviving.clone(), lattice),
            Mode::Toric => CharData::toric(self.keep.len(), self.surviving.clone(), Some(lattice)),
        }
    }
}

impl Lattice {
    /// Reorder coordinates: new coordinate `j` reads old coordinate
    /// `perm[j]`; result re-canonicalized.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Lattice {
        let gens: Vec<RatVec> = self
            .basis()
            .iter()
            .map(|row| RatVec::new(perm.iter().map(|&i| row[i].clone()).collect()))
            .collect();
        Lattice::from_generators(&gens, self.dim()).expect("permutation keeps rank")
    }
}
