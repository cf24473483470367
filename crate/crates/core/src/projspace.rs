//! Projective spaces PG(n-1, q): canonical subspaces, the subspace lattice,
//! exhaustive enumeration and the action of semilinear maps.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldTower};
use crate::linalg::{self, Matrix};

/// Default cap on the number of subspaces an enumeration may produce.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Number of points of PG(n-1, q).
pub fn point_count(n: usize, q: u64) -> u64 {
    gaussian_binomial(n, 1, q) as u64
}

/// A subspace of PG(n-1, q), stored as the reduced row-echelon basis of the
/// underlying vector subspace of `F^n`.
#[derive(Clone)]
pub struct ProjSubspace {
    field: Field,
    n: usize,
    rows: Matrix,
}

impl PartialEq for ProjSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows && self.field == other.field
    }
}

impl Eq for ProjSubspace {}

impl Hash for ProjSubspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.rows.hash(state);
    }
}

impl PartialOrd for ProjSubspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ProjSubspace {
    /// Rank first, then the canonical matrix read row-major.
    fn cmp(&self, other: &Self) -> Ordering {
        self.rows
            .len()
            .cmp(&other.rows.len())
            .then_with(|| self.n.cmp(&other.n))
            .then_with(|| self.rows.iter().flatten().cmp(other.rows.iter().flatten()))
    }
}

impl fmt::Debug for ProjSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.to_text())
    }
}

impl ProjSubspace {
    /// The canonical subspace spanned by `generators` in `F^n`.
    pub fn canonical(field: &Field, n: usize, generators: &[Vec<u32>]) -> Result<Self> {
        for g in generators {
            if g.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
            if let Some(&x) = g.iter().find(|&&x| !field.contains(x)) {
                return Err(Error::NotInSubfield(x));
            }
        }
        let mut rows = generators.to_vec();
        linalg::rref(field.tower(), &mut rows);
        Ok(ProjSubspace {
            field: field.clone(),
            n,
            rows,
        })
    }

    pub fn empty(field: &Field, n: usize) -> Self {
        ProjSubspace {
            field: field.clone(),
            n,
            rows: Vec::new(),
        }
    }

    pub fn whole(field: &Field, n: usize) -> Self {
        ProjSubspace {
            field: field.clone(),
            n,
            rows: linalg::identity(n),
        }
    }

    pub fn point(field: &Field, v: &[u32]) -> Result<Self> {
        if v.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        Self::canonical(field, v.len(), &[v.to_vec()])
    }

    /// Builds from rows already known to be in reduced row-echelon form.
    pub(crate) fn from_rref(field: &Field, n: usize, rows: Matrix) -> Self {
        ProjSubspace {
            field: field.clone(),
            n,
            rows,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn tower(&self) -> &FieldTower {
        self.field.tower()
    }

    /// Vector dimension of the ambient space.
    pub fn ambient_n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn dim(&self) -> isize {
        self.rows.len() as isize - 1
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).unwrap())
            .collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn span(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        linalg::rref(self.tower(), &mut rows);
        Ok(Self::from_rref(&self.field, self.n, rows))
    }

    /// Orthogonal complement under the standard dot product.
    pub fn complement(&self) -> Self {
        let mut ns = linalg::null_space(self.tower(), &self.rows, self.n);
        linalg::rref(self.tower(), &mut ns);
        Self::from_rref(&self.field, self.n, ns)
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty(&self.field, self.n));
        }
        let c = self.complement().span(&other.complement())?;
        Ok(c.complement())
    }

    /// Residue of `v` after elimination against the canonical rows.
    pub fn reduce_vector(&self, v: &[u32]) -> Vec<u32> {
        let f = self.tower();
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = row.iter().position(|&x| x != 0).unwrap();
            let c = v[p];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        v
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        v.len() == self.n && self.reduce_vector(v).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.n == self.n && other.rows.iter().all(|r| self.contains_vector(r))
    }

    /// Coordinates of a vector of the subspace with respect to the canonical rows.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        if !self.contains_vector(v) {
            return None;
        }
        Some(self.pivots().iter().map(|&p| v[p]).collect())
    }

    /// The same subspace viewed over a larger (or smaller) field of the same tower.
    pub fn over(&self, field: &Field) -> Result<Self> {
        if field.tower() != self.tower() {
            return Err(Error::FieldMismatch);
        }
        if let Some(&x) = self.rows.iter().flatten().find(|&&x| !field.contains(x)) {
            return Err(Error::NotInSubfield(x));
        }
        Ok(Self::from_rref(field, self.n, self.rows.clone()))
    }

    /// Calls `visit` with every nonzero vector of the subspace.
    pub fn for_each_vector(&self, mut visit: impl FnMut(&[u32])) {
        let k = self.rank();
        if k == 0 {
            return;
        }
        let f = self.tower();
        let elems = self.field.elements();
        let q = elems.len();
        let mut digits = vec![0usize; k];
        let mut v = vec![0u32; self.n];
        loop {
            // increment
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            v.iter_mut().for_each(|x| *x = 0);
            for (d, row) in digits.iter().zip(&self.rows) {
                let c = elems[*d];
                if c == 0 {
                    continue;
                }
                for (x, &y) in v.iter_mut().zip(row) {
                    if y != 0 {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
            }
            visit(&v);
        }
    }

    /// Calls `visit` with one normalized vector for every point of the subspace.
    pub fn for_each_point(&self, mut visit: impl FnMut(&[u32])) {
        self.find_point(|v| {
            visit(v);
            false
        });
    }

    /// First point, in enumeration order, whose normalized vector satisfies `pred`.
    pub fn find_point(&self, mut pred: impl FnMut(&[u32]) -> bool) -> Option<Vec<u32>> {
        let k = self.rank();
        let f = self.tower();
        let elems = self.field.elements();
        let q = elems.len();
        let mut v = vec![0u32; self.n];
        for lead in 0..k {
            let free = k - lead - 1;
            let total = (q as u64).pow(free as u32);
            for code in 0..total {
                v.copy_from_slice(&self.rows[lead]);
                let mut c = code;
                for row in &self.rows[lead + 1..] {
                    let a = elems[(c % q as u64) as usize];
                    c /= q as u64;
                    if a != 0 {
                        for (x, &y) in v.iter_mut().zip(row) {
                            if y != 0 {
                                *x = f.add(*x, f.mul(a, y));
                            }
                        }
                    }
                }
                if pred(&v) {
                    return Some(v);
                }
            }
        }
        None
    }

    /// Normalized vectors of all points, sorted.
    pub fn points(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        self.for_each_point(|v| out.push(v.to_vec()));
        out.sort();
        out
    }

    pub fn point_count(&self) -> u64 {
        point_count(self.rank(), self.field.order() as u64)
    }

    /// All subspaces of projective dimension `k` contained in this one, sorted.
    pub fn subspaces(&self, k: usize, budget: u128) -> Result<Vec<ProjSubspace>> {
        let local = enumerate(&self.field, self.rank(), k, budget)?;
        let f = self.tower();
        Ok(local
            .into_iter()
            .map(|s| {
                let gens = linalg::mat_mul(f, s.rows(), &self.rows);
                ProjSubspace::canonical(&self.field, self.n, &gens).expect("consistent lengths")
            })
            .collect::<Vec<_>>())
        .map(|mut v| {
            v.sort();
            v
        })
    }

    /// Text form: rows separated by `;`, entries by `,`.
    pub fn to_text(&self) -> String {
        let t = self.tower();
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| format_entry(t, x))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_text(field: &Field, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty subspace text".into()));
        }
        let rows = text
            .split(';')
            .map(|r| parse_row(field.tower(), r))
            .collect::<Result<Vec<_>>>()?;
        let n = rows[0].len();
        Self::canonical(field, n, &rows)
    }
}

/// Element serialization inside subspace text: a decimal digit for elements
/// of the prime field, a bracketed digit list otherwise.
pub fn format_entry(t: &FieldTower, x: u32) -> String {
    if x < t.p() {
        x.to_string()
    } else {
        t.format_element(x)
    }
}

pub fn format_vector(t: &FieldTower, v: &[u32]) -> String {
    v.iter()
        .map(|&x| format_entry(t, x))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_row(t: &FieldTower, row: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in row.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(t.parse_element(&cur)?);
                cur.clear();
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in {row:?}")));
    }
    out.push(t.parse_element(&cur)?);
    Ok(out)
}

/// Bijection between the points of PG(n-1, q) and `0..point_count`, increasing
/// in the lexicographic order of normalized vectors.
#[derive(Clone, Debug)]
pub struct PointCodec {
    field: Field,
    n: usize,
    q: u64,
    powers: Vec<u64>,
}

impl PointCodec {
    pub fn new(field: &Field, n: usize) -> Self {
        let q = field.order() as u64;
        let powers = (0..=n).map(|i| q.pow(i as u32)).collect();
        PointCodec {
            field: field.clone(),
            n,
            q,
            powers,
        }
    }

    pub fn len(&self) -> u64 {
        point_count(self.n, self.q)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Index of the point spanned by the nonzero vector `v`.
    #[inline]
    pub fn encode(&self, v: &[u32]) -> u64 {
        let f = self.field.tower();
        let j = v.iter().position(|&x| x != 0).expect("nonzero vector");
        let inv = f.inv(v[j]);
        let tail = self.n - 1 - j;
        let mut idx = (self.powers[tail] - 1) / (self.q - 1);
        for (i, &x) in v[j + 1..].iter().enumerate() {
            let y = if inv == 1 { x } else { f.mul(x, inv) };
            idx += self.field.rank_of(y) as u64 * self.powers[tail - 1 - i];
        }
        idx
    }

    pub fn decode(&self, mut idx: u64) -> Vec<u32> {
        let mut tail = 0;
        while (self.powers[tail + 1] - 1) / (self.q - 1) <= idx {
            tail += 1;
        }
        idx -= (self.powers[tail] - 1) / (self.q - 1);
        let j = self.n - 1 - tail;
        let mut v = vec![0u32; self.n];
        v[j] = 1;
        for i in (j + 1..self.n).rev() {
            v[i] = self.field.elements()[(idx % self.q) as usize];
            idx /= self.q;
        }
        v
    }
}

/// All normalized points of PG(n-1, q), in increasing order.
pub fn all_points(field: &Field, n: usize) -> Vec<Vec<u32>> {
    let codec = PointCodec::new(field, n);
    (0..codec.len()).map(|i| codec.decode(i)).collect()
}

/// Every subspace of projective dimension `k` of PG(n-1, q), sorted by the
/// canonical order.
pub fn enumerate(field: &Field, n: usize, k: usize, budget: u128) -> Result<Vec<ProjSubspace>> {
    let count = gaussian_binomial(n, k + 1, field.order() as u64);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_subspace(field, n, k, |s| out.push(s))?;
    out.sort();
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

/// Streams every subspace of projective dimension `k`, in generation order
/// (grouped by pivot set), without a budget check.
pub fn for_each_subspace(
    field: &Field,
    n: usize,
    k: usize,
    mut visit: impl FnMut(ProjSubspace),
) -> Result<()> {
    let rank = k + 1;
    if rank > n {
        return Err(Error::Precondition(format!(
            "no subspace of dimension {k} in PG({}, q)",
            n as isize - 1
        )));
    }
    let elems = field.elements();
    let q = elems.len() as u64;
    let mut pivots: Vec<usize> = (0..rank).collect();
    loop {
        // free positions: (row, col) with col > pivot[row] and col not a pivot
        let free: Vec<(usize, usize)> = (0..rank)
            .flat_map(|i| {
                let piv = &pivots;
                (piv[i] + 1..n)
                    .filter(move |c| !piv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let total = q.pow(free.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![0u32; n]; rank];
            for (i, &p) in pivots.iter().enumerate() {
                rows[i][p] = 1;
            }
            let mut c = code;
            for &(i, col) in &free {
                rows[i][col] = elems[(c % q) as usize];
                c /= q;
            }
            visit(ProjSubspace::from_rref(field, n, rows));
        }
        // next combination
        let mut i = rank;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if pivots[i] < n - rank + i {
                pivots[i] += 1;
                for j in i + 1..rank {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A semilinear map `v -> v^σ A` on row vectors, with `σ: x -> x^{p^s}`.
#[derive(Clone, PartialEq, Eq)]
pub struct SemilinearMap {
    field: Field,
    matrix: Matrix,
    s: u32,
}

impl fmt::Debug for SemilinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SemilinearMap(s={}, {:?})", self.s, self.matrix)
    }
}

impl SemilinearMap {
    pub fn new(field: &Field, matrix: Matrix, s: u32) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.first().map_or(0, |r| r.len()),
            });
        }
        if let Some(&x) = matrix.iter().flatten().find(|&&x| !field.contains(x)) {
            return Err(Error::NotInSubfield(x));
        }
        if linalg::determinant(field.tower(), &matrix) == 0 {
            return Err(Error::Singular);
        }
        Ok(SemilinearMap {
            field: field.clone(),
            matrix,
            s: s % field.degree(),
        })
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        SemilinearMap {
            field: field.clone(),
            matrix: linalg::identity(n),
            s: 0,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply_vector(&self, v: &[u32]) -> Vec<u32> {
        let t = self.field.tower();
        if self.s == 0 {
            linalg::vec_mat(t, v, &self.matrix)
        } else {
            let w: Vec<u32> = v.iter().map(|&x| t.frob(x, self.s)).collect();
            linalg::vec_mat(t, &w, &self.matrix)
        }
    }

    pub fn act(&self, sub: &ProjSubspace) -> Result<ProjSubspace> {
        if sub.ambient_n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: sub.ambient_n(),
            });
        }
        if sub.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let rows: Matrix = sub.rows().iter().map(|r| self.apply_vector(r)).collect();
        ProjSubspace::canonical(&self.field, self.n(), &rows)
    }

    /// The inverse map `w -> w^{σ^{-1}} (A^{-1})^{σ^{-1}}`.
    pub fn inverse(&self) -> Result<Self> {
        let t = self.field.tower();
        let back = (self.field.degree() - self.s) % self.field.degree();
        let inv = linalg::inverse(t, &self.matrix)?;
        Ok(SemilinearMap {
            field: self.field.clone(),
            matrix: linalg::frob_matrix(t, &inv, back),
            s: back,
        })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let t = self.field.tower();
        let a2 = linalg::frob_matrix(t, &other.matrix, self.s);
        Ok(SemilinearMap {
            field: self.field.clone(),
            matrix: linalg::mat_mul(t, &a2, &self.matrix),
            s: (self.s + other.s) % self.field.degree(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Field {
        FieldTower::of_order(q).unwrap().full()
    }

    #[test]
    fn canonical_examples() {
        let f = gf(2);
        let s = ProjSubspace::canonical(&f, 3, &[vec![0, 1, 1], vec![0, 1, 0]]).unwrap();
        assert_eq!(s.rows(), &vec![vec![0, 1, 0], vec![0, 0, 1]]);
        let e = ProjSubspace::canonical(&f, 3, &[]).unwrap();
        assert_eq!(e.dim(), -1);
        let f4 = gf(4);
        let p = ProjSubspace::point(&f4, &[0, 2, 3]).unwrap();
        assert_eq!(p.rows()[0][1], 1);
        assert!(ProjSubspace::canonical(&f, 3, &[vec![1, 0]]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let f2 = gf(2);
        assert_eq!(enumerate(&f2, 3, 0, DEFAULT_BUDGET).unwrap().len(), 7);
        assert_eq!(enumerate(&f2, 4, 1, DEFAULT_BUDGET).unwrap().len(), 35);
        assert_eq!(enumerate(&f2, 6, 2, DEFAULT_BUDGET).unwrap().len(), 1395);
        assert!(matches!(
            enumerate(&f2, 6, 2, 100),
            Err(Error::BudgetExceeded { count: 1395, .. })
        ));
    }

    #[test]
    fn lines_meet_in_points() {
        let f = gf(3);
        let lines = enumerate(&f, 3, 1, DEFAULT_BUDGET).unwrap();
        for a in &lines {
            for b in &lines {
                let m = a.meet(b).unwrap();
                if a == b {
                    assert_eq!(m, *a);
                } else {
                    assert_eq!(m.dim(), 0);
                }
            }
        }
        let empty = ProjSubspace::empty(&f, 3);
        assert_eq!(lines[0].span(&empty).unwrap(), lines[0]);
    }

    #[test]
    fn codec_round_trip() {
        let f = gf(4);
        let codec = PointCodec::new(&f, 3);
        assert_eq!(codec.len(), 21);
        let pts = all_points(&f, 3);
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(codec.encode(p), i as u64);
            let scaled: Vec<u32> = p.iter().map(|&x| f.mul(x, 3)).collect();
            assert_eq!(codec.encode(&scaled), i as u64);
        }
    }

    #[test]
    fn pgl_is_transitive_on_pg14() {
        let f = gf(4);
        let codec = PointCodec::new(&f, 2);
        let start = ProjSubspace::point(&f, &[1, 0]).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if let Ok(m) = SemilinearMap::new(&f, vec![vec![a, b], vec![c, d]], 0) {
                            let img = m.act(&start).unwrap();
                            seen.insert(codec.encode(&img.rows()[0]));
                        }
                    }
                }
            }
        }
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn frobenius_fixes_rational_subspaces() {
        let f = gf(9);
        let m = SemilinearMap::new(&f, linalg::identity(3), 1).unwrap();
        let s = ProjSubspace::canonical(&f, 3, &[vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.act(&s).unwrap(), s);
        let t = ProjSubspace::canonical(&f, 3, &[vec![1, 3, 0]]).unwrap();
        assert_ne!(m.act(&t).unwrap(), t);
    }

    #[test]
    fn text_round_trip() {
        let f = gf(4);
        let s = ProjSubspace::canonical(&f, 3, &[vec![1, 2, 3], vec![0, 1, 1]]).unwrap();
        let back = ProjSubspace::parse_text(&f, &s.to_text()).unwrap();
        assert_eq!(back, s);
        let g = gf(2);
        let p = ProjSubspace::parse_text(&g, "1,0,1;0,1,1").unwrap();
        assert_eq!(p.to_text(), "1,0,1;0,1,1");
    }
}
