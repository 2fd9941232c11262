//! Sparse operators on truncated Hilbert spaces.
//!
//! Every operator in the crate couples only a handful of basis vectors to one
//! another, so spectral work is done per connected component of the sparsity
//! graph with dense [`CMat`] blocks.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C};
use crate::scalar::{cabs, cone, cre, czero, Real};

/// Ordered basis with a label lookup table.
#[derive(Clone, Debug)]
pub struct Basis<L> {
    labels: Vec<L>,
    index: HashMap<L, usize>,
}

impl<L: Clone + Eq + Hash> Basis<L> {
    pub fn new(labels: Vec<L>) -> Self {
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Basis { labels, index }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &L {
        &self.labels[i]
    }

    pub fn get(&self, l: &L) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn select(&self, mut pred: impl FnMut(&L) -> bool) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| pred(&self.labels[i])).collect()
    }
}

/// Square sparse complex matrix; each row keeps its entries sorted by column.
#[derive(Clone, Debug)]
pub struct BlockOperator<T> {
    dim: usize,
    rows: Vec<Vec<(usize, C<T>)>>,
}

impl<T: Real> BlockOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        BlockOperator { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![cone(); dim])
    }

    pub fn diagonal(d: &[C<T>]) -> Self {
        BlockOperator {
            dim: d.len(),
            rows: d.iter().enumerate().map(|(i, x)| if x.is_zero() { vec![] } else { vec![(i, *x)] }).collect(),
        }
    }

    pub fn diagonal_real(d: &[T]) -> Self {
        let v: Vec<C<T>> = d.iter().map(|x| cre(*x)).collect();
        Self::diagonal(&v)
    }

    /// Sum duplicate `(row, col, value)` triplets.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, C<T>)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, C<T>>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in entries {
            assert!(i < dim && j < dim, "triplet ({i}, {j}) outside dimension {dim}");
            *acc[i].entry(j).or_insert_with(czero) += v;
        }
        BlockOperator {
            dim,
            rows: acc.into_iter().map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, C<T>)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => czero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C<T>)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, *v)))
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn scale(&self, c: C<T>) -> Self {
        BlockOperator {
            dim: self.dim,
            rows: self.rows.iter().map(|r| r.iter().map(|(j, v)| (*j, *v * c)).filter(|(_, v)| !v.is_zero()).collect()).collect(),
        }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(cre(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dim(other);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_dim(other);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, -v))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_dim(other);
        let mut rows = Vec::with_capacity(self.dim);
        for r in &self.rows {
            let mut acc: BTreeMap<usize, C<T>> = BTreeMap::new();
            for (k, a) in r {
                for (j, b) in &other.rows[*k] {
                    *acc.entry(*j).or_insert_with(czero) += *a * *b;
                }
            }
            rows.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        BlockOperator { dim: self.dim, rows }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        self.rows.iter().map(|r| r.iter().fold(czero(), |acc, (j, a)| acc + *a * v[*j])).collect()
    }

    pub fn max_abs(&self) -> T {
        self.triplets().fold(T::zero(), |acc, (_, _, v)| acc.max(cabs(v)))
    }

    /// Largest entry modulus with both indices in `keep`.
    pub fn max_abs_on(&self, keep: &[bool]) -> T {
        self.triplets().filter(|(i, j, _)| keep[*i] && keep[*j]).fold(T::zero(), |acc, (_, _, v)| acc.max(cabs(v)))
    }

    /// Largest entry modulus with the row in `keep`, any column.
    pub fn max_abs_rows(&self, keep: &[bool]) -> T {
        self.triplets().filter(|(i, _, _)| keep[*i]).fold(T::zero(), |acc, (_, _, v)| acc.max(cabs(v)))
    }

    pub fn hermitian_defect(&self) -> T {
        self.sub(&self.adjoint()).max_abs()
    }

    /// Principal submatrix on `idx`, reindexed in the given order.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let entries = idx.iter().enumerate().flat_map(|(k, &i)| {
            let pos = &pos;
            self.rows[i].iter().filter(move |(j, _)| pos[*j] != usize::MAX).map(move |(j, v)| (k, pos[*j], *v))
        });
        Self::from_triplets(idx.len(), entries.collect::<Vec<_>>())
    }

    /// Zero every entry whose row or column falls outside `keep`.
    pub fn mask(&self, keep: &[bool]) -> Self {
        Self::from_triplets(self.dim, self.triplets().filter(|(i, j, _)| keep[*i] && keep[*j]))
    }

    pub fn dense_block(&self, idx: &[usize]) -> CMat<T> {
        let mut pos = HashMap::with_capacity(idx.len());
        for (k, &i) in idx.iter().enumerate() {
            pos.insert(i, k);
        }
        let mut m = CMat::zeros(idx.len(), idx.len());
        for (k, &i) in idx.iter().enumerate() {
            for (j, v) in &self.rows[i] {
                if let Some(&c) = pos.get(j) {
                    m[(k, c)] = *v;
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> CMat<T> {
        let idx: Vec<usize> = (0..self.dim).collect();
        self.dense_block(&idx)
    }

    pub fn from_dense(m: &CMat<T>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m[(i, j)].is_zero() {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.rows(), t)
    }

    /// Connected components of the symmetrized sparsity pattern, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, j, _) in self.triplets() {
            let a = find(&mut parent, i);
            let b = find(&mut parent, j);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Full eigendecomposition of a Hermitian operator as `(eigenvalue, sparse eigenvector)` pairs.
    pub fn eigensystem(&self) -> Result<Vec<(T, Vec<(usize, C<T>)>)>> {
        self.ensure_hermitian()?;
        let mut out = Vec::with_capacity(self.dim);
        for comp in self.components() {
            let (w, v) = self.dense_block(&comp).eigh()?;
            for (k, lam) in w.iter().enumerate() {
                let vec = comp.iter().enumerate().map(|(r, &i)| (i, v[(r, k)])).filter(|(_, x)| !x.is_zero()).collect();
                out.push((*lam, vec));
            }
        }
        Ok(out)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        self.ensure_hermitian()?;
        let mut out = Vec::with_capacity(self.dim);
        for comp in self.components() {
            out.extend(self.dense_block(&comp).eigvalsh()?);
        }
        Ok(out)
    }

    fn ensure_hermitian(&self) -> Result<()> {
        let scale = self.max_abs().max(T::one());
        let d = self.hermitian_defect();
        if d > scale * T::from_f64(1e-12) {
            return Err(Error::NotSelfAdjoint(d.to_f64()));
        }
        Ok(())
    }

    /// `f(A)` for Hermitian `A` by per-component spectral calculus.
    pub fn hermitian_fn(&self, f: impl Fn(T) -> T) -> Result<Self> {
        self.ensure_hermitian()?;
        let mut t = Vec::new();
        for comp in self.components() {
            let fm = self.dense_block(&comp).hermitian_fn(&f)?;
            for (a, &i) in comp.iter().enumerate() {
                for (b, &j) in comp.iter().enumerate() {
                    let v = fm[(a, b)];
                    if !v.is_zero() {
                        t.push((i, j, v));
                    }
                }
            }
        }
        Ok(Self::from_triplets(self.dim, t))
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Result<Vec<T>> {
        let g = self.adjoint().mul(self);
        let mut s: Vec<T> = g.eigenvalues()?.into_iter().map(|x| x.max(T::zero()).sqrt()).collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(s)
    }

    pub fn op_norm(&self) -> Result<T> {
        Ok(self.singular_values()?.first().copied().unwrap_or_else(T::zero))
    }

    /// Operator norm of the compression to the index set `keep`.
    pub fn op_norm_on(&self, keep: &[bool]) -> Result<T> {
        self.mask(keep).op_norm()
    }

    /// Conjugate by a unitary given as a sparse operator: `U^† A U`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.adjoint().mul(self).mul(u)
    }

    /// Kronecker product `self ⊗ other`; the first factor is the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let d2 = other.dim;
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                t.push((i * d2 + k, j * d2 + l, a * b));
            }
        }
        Self::from_triplets(self.dim * d2, t)
    }

    pub fn is_zero_op(&self) -> bool {
        self.nnz() == 0
    }

    pub fn one_norm_bound(&self) -> T {
        self.rows.iter().map(|r| r.iter().fold(T::zero(), |acc, (_, v)| acc + cabs(*v))).fold(T::zero(), |a, b| a.max(b))
    }
}

/// Diagonal operator with the given `f64` entries.
pub fn real_diag<T: Real>(values: &[f64]) -> BlockOperator<T> {
    let d: Vec<T> = values.iter().map(|x| T::from_f64(*x)).collect();
    BlockOperator::diagonal_real(&d)
}
