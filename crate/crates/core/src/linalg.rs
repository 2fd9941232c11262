//! Small dense complex matrices, written against [`Real`] so they run in double-double.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{abs2, cabs, cone, cre, czero, Real};

pub type C<T> = Complex<T>;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn diag(d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = *x;
        }
        m
    }

    pub fn diag_real(d: &[T]) -> Self {
        let v: Vec<C<T>> = d.iter().map(|x| cre(*x)).collect();
        Self::diag(&v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: C<T>) -> Self {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * c).collect() }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(cre(c))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(cabs(*x)))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc + abs2(*x)).sqrt()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(self * other)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn mat_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(czero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// `max |A - A^†|`.
    pub fn hermitian_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max(cabs(self[(i, j)] - self[(j, i)].conj()));
            }
        }
        d
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix.
    pub fn eigh(&self) -> Result<(Vec<T>, CMat<T>)> {
        if !self.is_square() {
            return Err(Error::Shape(format!("eigh on {}x{}", self.rows, self.cols)));
        }
        let scale = self.max_abs().max(T::one());
        let defect = self.hermitian_defect();
        if defect > scale * T::from_f64(1e-12) {
            return Err(Error::NotSelfAdjoint(defect.to_f64()));
        }
        jacobi_eigh(self)
    }

    pub fn eigvalsh(&self) -> Result<Vec<T>> {
        Ok(self.eigh()?.0)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Result<Vec<T>> {
        let g = if self.rows >= self.cols { &self.adjoint() * self } else { self * &self.adjoint() };
        let mut s: Vec<T> = g.eigvalsh()?.into_iter().map(|x| x.max(T::zero()).sqrt()).collect();
        s.reverse();
        Ok(s)
    }

    pub fn op_norm(&self) -> Result<T> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(T::zero());
        }
        Ok(self.singular_values()?.first().copied().unwrap_or_else(T::zero))
    }

    /// `U f(Λ) U^†` for Hermitian `self`.
    pub fn hermitian_fn(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let (w, u) = self.eigh()?;
        let n = self.rows;
        let fw: Vec<T> = w.iter().map(|x| f(*x)).collect();
        Ok(Self::from_fn(n, n, |i, j| {
            let mut acc = czero();
            for k in 0..n {
                acc += u[(i, k)] * cre(fw[k]) * u[(j, k)].conj();
            }
            acc
        }))
    }

    /// Least-squares solution of `self · x = b` by Householder QR.
    pub fn lstsq(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        let (m, n) = (self.rows, self.cols);
        if b.len() != m {
            return Err(Error::Shape(format!("rhs length {} for {}x{}", b.len(), m, n)));
        }
        if m < n {
            return Err(Error::Shape(format!("underdetermined {}x{}", m, n)));
        }
        let mut a = self.clone();
        let mut y = b.to_vec();
        let scale = a.max_abs();
        for k in 0..n {
            let norm = (k..m).fold(T::zero(), |acc, i| acc + abs2(a[(i, k)])).sqrt();
            if norm <= scale * T::epsilon() * T::from_f64(64.0) || norm.is_zero() {
                return Err(Error::Singular(format!("rank deficient at column {k}")));
            }
            let x0 = a[(k, k)];
            let phase = if cabs(x0).is_zero() { cone() } else { x0 / cre(cabs(x0)) };
            let alpha = -(phase * cre(norm));
            let mut v: Vec<C<T>> = (k..m).map(|i| a[(i, k)]).collect();
            v[0] -= alpha;
            let vnorm2 = v.iter().fold(T::zero(), |acc, x| acc + abs2(*x));
            if vnorm2.is_zero() {
                continue;
            }
            let two = T::from_f64(2.0);
            for j in k..n {
                let dot = v.iter().enumerate().fold(czero::<T>(), |acc, (t, vi)| acc + vi.conj() * a[(k + t, j)]);
                let f = dot * cre(two / vnorm2);
                for (t, vi) in v.iter().enumerate() {
                    let upd = *vi * f;
                    a[(k + t, j)] -= upd;
                }
            }
            let dot = v.iter().enumerate().fold(czero::<T>(), |acc, (t, vi)| acc + vi.conj() * y[k + t]);
            let f = dot * cre(two / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                y[k + t] -= *vi * f;
            }
        }
        let mut x = vec![czero(); n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= a[(i, j)] * x[j];
            }
            x[i] = acc / a[(i, i)];
        }
        Ok(x)
    }

    /// Solve the square system `self · x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        if !self.is_square() || b.len() != self.rows {
            return Err(Error::Shape("solve needs a square system".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut y = b.to_vec();
        let scale = a.max_abs();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| cabs(a[(i, k)]).partial_cmp(&cabs(a[(j, k)])).unwrap()).unwrap();
            if cabs(a[(p, k)]) <= scale * T::epsilon() {
                return Err(Error::Singular(format!("pivot {k}")));
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                y.swap(k, p);
            }
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let upd = f * a[(k, j)];
                    a[(i, j)] -= upd;
                }
                let upd = f * y[k];
                y[i] -= upd;
            }
        }
        let mut x = vec![czero(); n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= a[(i, j)] * x[j];
            }
            x[i] = acc / a[(i, i)];
        }
        Ok(x)
    }
}

const MAX_SWEEPS: usize = 60;

fn jacobi_eigh<T: Real>(m: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    let n = m.rows;
    let mut a = m.clone();
    // symmetrize so rounding in the input cannot bias the rotations
    for i in 0..n {
        a[(i, i)] = cre(a[(i, i)].re);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * cre(T::from_f64(0.5));
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(n);
    let tiny = T::epsilon() * T::epsilon();
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diag_norm2(&a);
        let diag = (0..n).fold(T::zero(), |acc, i| acc + abs2(a[(i, i)]));
        if off <= tiny * diag || off.is_zero() {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diag_norm2(&a);
        let diag = (0..n).fold(T::zero(), |acc, i| acc + abs2(a[(i, i)]));
        if off > tiny * diag * T::from_f64(1e6) {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let w: Vec<T> = idx.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = CMat::from_fn(n, n, |r, c| v[(r, idx[c])]);
    Ok((w, vecs))
}

fn off_diag_norm2<T: Real>(a: &CMat<T>) -> T {
    let n = a.rows;
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += abs2(a[(i, j)]);
            }
        }
    }
    s
}

fn rotate<T: Real>(a: &mut CMat<T>, v: &mut CMat<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = cabs(apq);
    if mag.is_zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase e so that diag(1, conj e) makes the (p,q) entry real
    let e = apq / cre(mag);
    let tau = (aqq - app) / (T::from_f64(2.0) * mag);
    // for huge tau, tau² overflows and double-double turns inf - inf into NaN
    let t = if tau.abs() > T::from_f64(1e100) {
        T::from_f64(0.5) / tau
    } else {
        tau.signum_or_one() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let n = a.rows;
    let ec = e.conj();
    // columns: A <- A V with V_pp = c, V_pq = s, V_qp = -s conj(e), V_qq = c conj(e)
    let vpp = cre(c);
    let vpq = cre(s);
    let vqp = ec * cre(-s);
    let vqq = ec * cre(c);
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = czero();
    a[(q, p)] = czero();
    a[(p, p)] = cre(a[(p, p)].re);
    a[(q, q)] = cre(a[(q, q)].re);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> Self;
}

impl<T: Real> SignumOrOne for T {
    fn signum_or_one(self) -> T {
        if self < T::zero() {
            -T::one()
        } else {
            T::one()
        }
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape");
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape");
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect() }
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;
    fn neg(self) -> CMat<T> {
        self.scale(-cone::<T>())
    }
}

/// Roots of `Σ c_k z^k` (coefficients lowest degree first) by Aberth iteration.
pub fn poly_roots<T: Real>(coeffs: &[C<T>]) -> Result<Vec<C<T>>> {
    let mut c = coeffs.to_vec();
    let scale = c.iter().fold(T::zero(), |acc, x| acc.max(cabs(*x)));
    while c.len() > 1 && cabs(*c.last().unwrap()) <= scale * T::from_f64(1e-28) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = *c.last().unwrap();
    let monic: Vec<C<T>> = c.iter().map(|x| *x / lead).collect();
    // Cauchy bound for the initial circle
    let radius = T::one() + monic[..deg].iter().fold(T::zero(), |acc, x| acc.max(cabs(*x)));
    let mut z: Vec<C<T>> = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            C::new(radius * T::from_f64(0.5 * ang.cos()), radius * T::from_f64(0.5 * ang.sin()))
        })
        .collect();
    let eval = |x: C<T>| -> (C<T>, C<T>) {
        let mut p = czero();
        let mut dp = czero();
        for k in (0..=deg).rev() {
            dp = dp * x + p;
            p = p * x + monic[k];
        }
        (p, dp)
    };
    let tol = T::epsilon() * T::from_f64(16.0);
    for _ in 0..500 {
        let mut moved = T::zero();
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut sum = czero();
            for j in 0..deg {
                if j != i {
                    sum += cone::<T>() / (z[i] - z[j]);
                }
            }
            let w = ratio / (cone::<T>() - ratio * sum);
            z[i] -= w;
            moved = moved.max(cabs(w) / (T::one() + cabs(z[i])));
        }
        if moved <= tol {
            return Ok(z);
        }
    }
    // accept if residuals are small anyway
    let worst = z.iter().fold(T::zero(), |acc, x| {
        let (p, _) = eval(*x);
        acc.max(cabs(p) / (T::one() + cabs(*x)).powi(deg as i32))
    });
    if worst <= T::from_f64(1e-24) {
        Ok(z)
    } else {
        Err(Error::NoConvergence(500))
    }
}

/// Ordinary least-squares line `y = a + b x`, returning `(a, b, r2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientData(format!("{n} points for a line fit")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("degenerate abscissae".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((a, b, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use qd::Quad;

    fn q(x: f64) -> Quad {
        Quad::from_f64(x)
    }

    fn random_hermitian(n: usize, seed: &[f64]) -> CMat<Quad> {
        let mut k = 0;
        let mut next = || {
            k += 1;
            seed[k % seed.len()] * (k as f64).sin()
        };
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cre(q(next()));
            for j in i + 1..n {
                let z = C::new(q(next()), q(next()));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn eigh_reconstructs(n in 1usize..9, seed in prop::collection::vec(-3.0f64..3.0, 5..20)) {
            let m = random_hermitian(n, &seed);
            let (w, v) = m.eigh().unwrap();
            let rec = &(&v * &CMat::diag_real(&w)) * &v.adjoint();
            prop_assert!((&rec - &m).max_abs() < q(1e-28));
            prop_assert!((&(&v.adjoint() * &v) - &CMat::identity(n)).max_abs() < q(1e-28));
            prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn eigh_degenerate() {
        let m = CMat::<Quad>::diag_real(&[q(2.0), q(2.0), q(-1.0)]);
        let (w, _) = m.eigh().unwrap();
        assert_eq!(w, vec![q(-1.0), q(2.0), q(2.0)]);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = CMat::<f64>::zeros(2, 2);
        m[(0, 1)] = cre(1.0);
        assert!(matches!(m.eigh(), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn pauli_y_eigs() {
        let mut m = CMat::<Quad>::zeros(2, 2);
        m[(0, 1)] = C::new(q(0.0), q(-1.0));
        m[(1, 0)] = C::new(q(0.0), q(1.0));
        let (w, _) = m.eigh().unwrap();
        assert!((w[0] + Quad::ONE).abs() < q(1e-31) && (w[1] - Quad::ONE).abs() < q(1e-31));
    }

    #[test]
    fn lstsq_exact_system() {
        let a = CMat::<Quad>::from_fn(4, 2, |i, j| C::new(q((i + 1) as f64), q((i * j) as f64)));
        let x = vec![C::new(q(1.5), q(-0.5)), C::new(q(0.25), q(2.0))];
        let b = a.mat_vec(&x);
        let y = a.lstsq(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!(cabs(*u - *v) < q(1e-28));
        }
        let sq = CMat::<Quad>::from_fn(2, 2, |i, j| cre(q((i + 2 * j + 1) as f64)));
        let sol = sq.solve(&[cone(), czero()]).unwrap();
        let back = sq.mat_vec(&sol);
        assert!(cabs(back[0] - cone()) < q(1e-30) && cabs(back[1]) < q(1e-30));
    }

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z+2)(z-i) = z^3 + (1-i) z^2 + (-2-i) z + 2i
        let c = vec![C::new(q(0.0), q(2.0)), C::new(q(-2.0), q(-1.0)), C::new(q(1.0), q(-1.0)), cone()];
        let mut r = poly_roots(&c).unwrap();
        r.sort_by(|a, b| PartialOrd::partial_cmp(&a.re, &b.re).unwrap());
        let expect = [C::new(q(-2.0), q(0.0)), C::new(q(0.0), q(1.0)), C::new(q(1.0), q(0.0))];
        for (a, b) in r.iter().zip(expect.iter()) {
            assert!(cabs(*a - *b) < q(1e-28), "{a:?}");
        }
    }

    #[test]
    fn fit_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (a, b, r2) = linear_fit(&x, &y).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_rectangular() {
        let a = CMat::<Quad>::from_fn(3, 2, |i, j| if i == j { cre(q((i + 1) as f64)) } else { czero() });
        let s = a.singular_values().unwrap();
        assert!((s[0] - q(2.0)).abs() < q(1e-30) && (s[1] - q(1.0)).abs() < q(1e-30));
    }
}
