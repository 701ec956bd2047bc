//! Exact rational arithmetic and lattice linear algebra.
//!
//! Lattices are full-rank subgroups of `Q^d` stored as an integer basis over a
//! single common denominator (`scale`). The basis is kept in row Hermite
//! normal form with positive pivots, so structural equality of two [`Lattice`]
//! values coincides with equality of the subgroups they represent.

#![allow(clippy::needless_range_loop)] // matrix code indexes rows and columns

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Build a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Build an integer rational.
pub fn rat_int(num: i64) -> Rat {
    BigRational::from_integer(BigInt::from(num))
}

/// A point of `Q^d`. The length is fixed by the context that created it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVec(Vec<Rat>);

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVec(entries)
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVec(entries.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        RatVec(vec![Rat::zero(); dim])
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = vec![Rat::zero(); dim];
        v[index] = Rat::one();
        RatVec(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        RatVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        RatVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> RatVec {
        RatVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| a.is_zero())
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|a| !a.is_negative())
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|a| a.is_positive())
    }

    /// Indices of nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Restriction to the given coordinate positions, in their order.
    pub fn restrict(&self, keep: &[usize]) -> RatVec {
        RatVec(keep.iter().map(|&i| self.0[i].clone()).collect())
    }

    /// Scale to a primitive integer vector (direction normal form).
    pub fn primitive_direction(&self) -> RatVec {
        assert!(!self.is_zero());
        let den_lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|a| a.numer() * &den_lcm / a.denom()).collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, a| acc.gcd(a));
        RatVec(ints.iter().map(|a| Rat::from_integer(a / &g)).collect())
    }
}

impl std::ops::Index<usize> for RatVec {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// Integer matrix routines: Hermite and Smith normal forms.
// ---------------------------------------------------------------------------

/// Row Hermite normal form of an integer matrix, in place reduction.
///
/// Returns the reduced matrix (nonzero rows first) and its rank. Pivots are
/// positive, entries above a pivot are reduced into `[0, pivot)`.
pub(crate) fn hnf(mut rows: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, usize) {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0usize;
    for col in 0..cols {
        // find a row at or below pivot_row with nonzero entry in col
        let mut chosen = None;
        for r in pivot_row..rows.len() {
            if !rows[r][col].is_zero() {
                chosen = Some(r);
                break;
            }
        }
        let Some(first) = chosen else { continue };
        rows.swap(pivot_row, first);
        // eliminate below by gcd steps
        loop {
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                done = false;
                let (p, q) = (rows[pivot_row][col].clone(), rows[r][col].clone());
                if p.abs() > q.abs() {
                    rows.swap(pivot_row, r);
                    continue;
                }
                let f = &rows[r][col] / &rows[pivot_row][col];
                for c in 0..cols {
                    let sub = &rows[pivot_row][c] * &f;
                    rows[r][c] -= sub;
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col].is_negative() {
            for c in 0..cols {
                rows[pivot_row][c] = -rows[pivot_row][c].clone();
            }
        }
        // reduce entries above the pivot into [0, pivot)
        for r in 0..pivot_row {
            let f = rows[r][col].div_floor(&rows[pivot_row][col]);
            if !f.is_zero() {
                for c in 0..cols {
                    let sub = &rows[pivot_row][c] * &f;
                    rows[r][c] -= sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    (rows, pivot_row)
}

/// Hermite reduction tracking a left unimodular transform.
///
/// Returns `(h, u, rank)` with `u * a = h`, `u` unimodular. Zero rows of `h`
/// are kept (at the bottom), so rows of `u` below `rank` span the left kernel.
pub(crate) fn hnf_with_transform(a: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, usize) {
    let n = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let mut chosen = None;
        for r in pivot_row..n {
            if !h[r][col].is_zero() {
                chosen = Some(r);
                break;
            }
        }
        let Some(first) = chosen else { continue };
        h.swap(pivot_row, first);
        u.swap(pivot_row, first);
        loop {
            let mut done = true;
            for r in pivot_row + 1..n {
                if h[r][col].is_zero() {
                    continue;
                }
                done = false;
                if h[pivot_row][col].abs() > h[r][col].abs() {
                    h.swap(pivot_row, r);
                    u.swap(pivot_row, r);
                    continue;
                }
                let f = &h[r][col] / &h[pivot_row][col];
                for c in 0..cols {
                    let sub = &h[pivot_row][c] * &f;
                    h[r][c] -= sub;
                }
                for c in 0..n {
                    let sub = &u[pivot_row][c] * &f;
                    u[r][c] -= sub;
                }
            }
            if done {
                break;
            }
        }
        if h[pivot_row][col].is_negative() {
            for c in 0..cols {
                h[pivot_row][c] = -h[pivot_row][c].clone();
            }
            for c in 0..n {
                u[pivot_row][c] = -u[pivot_row][c].clone();
            }
        }
        for r in 0..pivot_row {
            let f = h[r][col].div_floor(&h[pivot_row][col]);
            if !f.is_zero() {
                for c in 0..cols {
                    let sub = &h[pivot_row][c] * &f;
                    h[r][c] -= sub;
                }
                for c in 0..n {
                    let sub = &u[pivot_row][c] * &f;
                    u[r][c] -= sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == n {
            break;
        }
    }
    (h, u, pivot_row)
}

/// Smith-style diagonalization with left transform only.
///
/// Returns `(diag, u)` where `u` is unimodular `m×m` and `u * a * v` is
/// diagonal with entries `diag` for some untracked unimodular `v`. The
/// divisibility chain is not enforced; callers only need the diagonal and
/// the left transform. Requires `a` of full row rank `m`.
pub(crate) fn snf_left(a: &[Vec<BigInt>]) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut s: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let steps = m.min(cols);
    for k in 0..steps {
        'outer: loop {
            // move a nonzero entry of the trailing block into (k, k)
            let mut found = false;
            'search: for r in k..m {
                for c in k..cols {
                    if !s[r][c].is_zero() {
                        s.swap(k, r);
                        u.swap(k, r);
                        for row in s.iter_mut() {
                            row.swap(k, c);
                        }
                        found = true;
                        break 'search;
                    }
                }
            }
            if !found {
                break 'outer;
            }
            // column phase: zero out s[r][k] for r > k by euclidean row steps
            while let Some(r) = (k + 1..m).find(|&r| !s[r][k].is_zero()) {
                if s[k][k].abs() > s[r][k].abs() {
                    s.swap(k, r);
                    u.swap(k, r);
                }
                let f = &s[r][k] / &s[k][k];
                for c in 0..cols {
                    let sub = &s[k][c] * &f;
                    s[r][c] -= sub;
                }
                for c in 0..m {
                    let sub = &u[k][c] * &f;
                    u[r][c] -= sub;
                }
            }
            // row phase: zero out s[k][c] for c > k by euclidean column steps
            while let Some(c) = (k + 1..cols).find(|&c| !s[k][c].is_zero()) {
                if s[k][k].abs() > s[k][c].abs() {
                    for row in s.iter_mut() {
                        row.swap(k, c);
                    }
                }
                let f = &s[k][c] / &s[k][k];
                for row in s.iter_mut() {
                    let sub = &row[k] * &f;
                    row[c] -= sub;
                }
            }
            // a column swap in the row phase may dirty column k again
            if (k + 1..m).all(|r| s[r][k].is_zero()) {
                break 'outer;
            }
        }
        if s[k][k].is_negative() {
            for c in 0..cols {
                s[k][c] = -s[k][c].clone();
            }
            for c in 0..m {
                u[k][c] = -u[k][c].clone();
            }
        }
    }
    let diag: Vec<BigInt> = (0..steps).map(|k| s[k][k].clone()).collect();
    assert!(
        diag.iter().all(|d| !d.is_zero()),
        "snf_left requires full row rank"
    );
    (diag, u)
}

/// Canonical basis of the null space `{a : <a, row> = 0 for every row}`.
pub(crate) fn kernel(rows: &[RatVec], ambient: usize) -> Vec<RatVec> {
    let r = rref(rows);
    let mut pivots = Vec::new();
    for row in &r {
        pivots.push(row.entries().iter().position(|e| !e.is_zero()).unwrap());
    }
    let mut out = Vec::new();
    for free in 0..ambient {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); ambient];
        v[free] = Rat::one();
        for (row, &p) in r.iter().zip(pivots.iter()) {
            v[p] = -row.entries()[free].clone();
        }
        out.push(RatVec::new(v));
    }
    out
}

// ---------------------------------------------------------------------------
// Rational matrix routines.
// ---------------------------------------------------------------------------

/// Rank of a rational matrix (rows of equal length).
pub(crate) fn rank(rows: &[RatVec]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| r.0.clone()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &inv;
                for c in col..cols {
                    let sub = &m[rank][c] * &f;
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Reduced row echelon form; canonical representation of a row space.
pub(crate) fn rref(rows: &[RatVec]) -> Vec<RatVec> {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| r.0.clone()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for c in col..cols {
            m[rank][c] = &m[rank][c] / &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..cols {
                    let sub = &m[rank][c] * &f;
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    m.into_iter().map(RatVec).collect()
}

/// Solve `x * a = b` for a square invertible `a` (rows form the matrix).
pub(crate) fn solve_left(a: &[RatVec], b: &RatVec) -> Option<RatVec> {
    let n = a.len();
    if n == 0 {
        return if b.is_zero() { Some(RatVec::new(vec![])) } else { None };
    }
    let cols = a[0].dim();
    // augmented transpose system: a^T x^T = b^T
    let mut m: Vec<Vec<Rat>> = (0..cols)
        .map(|c| {
            let mut row: Vec<Rat> = (0..n).map(|r| a[r].0[c].clone()).collect();
            row.push(b.0[c].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0usize;
    for col in 0..n {
        let Some(p) = (r0..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(r0, p);
        let inv = m[r0][col].clone();
        for c in col..=n {
            m[r0][c] = &m[r0][c] / &inv;
        }
        for r in 0..m.len() {
            if r != r0 && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let sub = &m[r0][c] * &f;
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        r0 += 1;
    }
    // consistency: rows past r0 must have zero rhs
    for r in r0..m.len() {
        if !m[r][n].is_zero() {
            return None;
        }
    }
    if pivots.len() < n {
        // underdetermined; callers only use square invertible systems
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = m[row][n].clone();
    }
    Some(RatVec(x))
}

/// Inverse of a square rational matrix given by rows.
pub(crate) fn inverse(rows: &[RatVec]) -> Option<Vec<RatVec>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.0.clone();
            for j in 0..n {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] / &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let sub = &m[col][c] * &f;
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some(
        m.into_iter()
            .map(|row| RatVec(row[n..].to_vec()))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Lattices.
// ---------------------------------------------------------------------------

/// A full-rank subgroup of `Q^d` in canonical Hermite form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    /// Positive common denominator: the lattice is `int_basis / scale`.
    scale: BigInt,
    /// `dim × dim` integer rows in Hermite normal form with positive pivots.
    int_basis: Vec<Vec<BigInt>>,
}

impl Lattice {
    /// The standard lattice `Z^d`.
    pub fn standard(dim: usize) -> Lattice {
        let int_basis = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        Lattice {
            dim,
            scale: BigInt::one(),
            int_basis,
        }
    }

    /// Canonical lattice equal to the integer span of the generators.
    pub fn from_generators(gens: &[RatVec], dim: usize) -> Result<Lattice> {
        let mut scale = BigInt::one();
        for g in gens {
            assert_eq!(g.dim(), dim, "generator dimension mismatch");
            for a in g.iter() {
                scale = scale.lcm(a.denom());
            }
        }
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                g.iter()
                    .map(|a| a.numer() * &scale / a.denom())
                    .collect()
            })
            .collect();
        let (h, rank) = hnf(rows);
        if rank < dim {
            return Err(Error::RankDeficient { rank, dim });
        }
        Ok(Lattice {
            dim,
            scale,
            int_basis: h,
        }
        .reduced())
    }

    /// Divide out the common content of scale and basis entries.
    fn reduced(mut self) -> Lattice {
        let mut g = self.scale.clone();
        for row in &self.int_basis {
            for e in row {
                g = g.gcd(e);
            }
        }
        if g > BigInt::one() {
            self.scale /= &g;
            for row in self.int_basis.iter_mut() {
                for e in row.iter_mut() {
                    *e /= &g;
                }
            }
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis rows as rational vectors.
    pub fn basis(&self) -> Vec<RatVec> {
        self.int_basis
            .iter()
            .map(|row| {
                RatVec(
                    row.iter()
                        .map(|e| Rat::new(e.clone(), self.scale.clone()))
                        .collect(),
                )
            })
            .collect()
    }

    /// Absolute value of the basis determinant (covolume).
    pub fn covolume(&self) -> Rat {
        // Hermite basis is upper triangular up to column skips; for a square
        // full-rank matrix the pivots sit on the diagonal.
        let mut det = Rat::one();
        for (i, row) in self.int_basis.iter().enumerate() {
            det *= Rat::new(row[i].clone(), self.scale.clone());
        }
        det.abs()
    }

    /// Rational coordinates of `v` in the basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &RatVec) -> Option<RatVec> {
        solve_left(&self.basis(), v)
    }

    /// Membership test: integer coordinates in the basis.
    pub fn member(&self, v: &RatVec) -> bool {
        match self.coordinates(v) {
            Some(coords) => coords.iter().all(|c| c.is_integer()),
            None => false,
        }
    }

    /// Index `[super : sub]` of `self` inside `superlat`.
    pub fn index_in(&self, superlat: &Lattice) -> Result<BigInt> {
        for row in self.basis() {
            if !superlat.member(&row) {
                return Err(Error::NotSublattice);
            }
        }
        let q = self.covolume() / superlat.covolume();
        debug_assert!(q.is_integer());
        Ok(q.to_integer())
    }

    /// Dual lattice `{ w : <w, v> in Z for all v in self }`.
    pub fn dual(&self) -> Lattice {
        let inv = inverse(&self.basis()).expect("full-rank basis");
        // dual basis rows are the columns of the inverse
        let n = self.dim;
        let rows: Vec<RatVec> = (0..n)
            .map(|j| RatVec((0..n).map(|i| inv[i].0[j].clone()).collect()))
            .collect();
        Lattice::from_generators(&rows, n).expect("dual of full-rank lattice")
    }

    /// Intersection with the coordinate subspace spanned by `keep`,
    /// returned as a full-rank lattice in the `keep`-coordinate frame.
    pub fn intersect_coordinate_subspace(&self, keep: &[usize]) -> Lattice {
        assert!(!keep.is_empty());
        let drop: Vec<usize> = (0..self.dim).filter(|i| !keep.contains(i)).collect();
        if drop.is_empty() {
            return self.clone();
        }
        // integer kernel of the map x -> (x * B) restricted to dropped columns
        let cols: Vec<Vec<BigInt>> = self
            .int_basis
            .iter()
            .map(|row| drop.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let (h, u, rank) = hnf_with_transform(&cols);
        debug_assert!(h.len() == self.dim);
        let kernel_rows = &u[rank..];
        let basis = self.basis();
        let gens: Vec<RatVec> = kernel_rows
            .iter()
            .map(|coeffs| {
                let mut acc = RatVec::zero(self.dim);
                for (c, row) in coeffs.iter().zip(basis.iter()) {
                    acc = acc.add(&row.scale(&Rat::from_integer(c.clone())));
                }
                acc.restrict(keep)
            })
            .collect();
        Lattice::from_generators(&gens, keep.len()).expect("kernel spans the section")
    }

    /// Shortest nonzero lattice point on the ray through `direction`.
    pub fn primitive_on_ray(&self, direction: &RatVec) -> RatVec {
        assert!(!direction.is_zero());
        let coords = self
            .coordinates(direction)
            .expect("direction must lie in the lattice span");
        let mut t = BigInt::one();
        for c in coords.iter() {
            t = t.lcm(c.denom());
        }
        // t * direction has integer coordinates; divide by their gcd
        let g = coords
            .iter()
            .map(|c| c.numer() * &t / c.denom())
            .fold(BigInt::zero(), |acc, v| acc.gcd(&v));
        direction.scale(&Rat::new(t, g))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice[")?;
        for (i, row) in self.basis().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{row}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
