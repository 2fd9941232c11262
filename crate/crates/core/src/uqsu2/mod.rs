//! Finite-dimensional representation theory of U_q(su2).

mod cg;
mod infra;

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::linalg::{CMat, C};
use crate::qscalar::QParam;
use crate::scalar::{cone, cre, Real};

pub use cg::{cg_table, clear_cg_cache, couplings, load_cg_cache, save_cg_cache, CgTable};
pub use infra::{classical_cg, infrastructure_report, InfraReport};

/// Generators of U_q(su2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    E,
    F,
    K,
    KInv,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::E, Gen::F, Gen::K, Gen::KInv];

    /// Change of the `k`-weight, in units of `m`.
    pub fn weight(self) -> i32 {
        match self {
            Gen::E => 1,
            Gen::F => -1,
            _ => 0,
        }
    }

    pub fn counit(self) -> i32 {
        match self {
            Gen::E | Gen::F => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Gen::E => "e",
            Gen::F => "f",
            Gen::K => "k",
            Gen::KInv => "k^-1",
        };
        f.write_str(s)
    }
}

/// Index of `|l, m>` in the ascending-`m` basis.
pub fn m_index(l: HalfInt, m: HalfInt) -> usize {
    m.diff(-l) as usize
}

/// `√([l-m][l+m+1])`, the matrix element of `e` from `|l,m>` to `|l,m+1>`.
pub fn e_elem<T: Real>(l: HalfInt, m: HalfInt, q: &QParam<T>) -> T {
    let a = l.diff(m);
    let b = (l + m).twice() as i64 / 2 + 1;
    if a <= 0 || b <= 0 {
        return T::zero();
    }
    (q.qint(a) * q.qint(b)).sqrt()
}

/// `√([l-m+1][l+m])`, the matrix element of `f` from `|l,m>` to `|l,m-1>`.
pub fn f_elem<T: Real>(l: HalfInt, m: HalfInt, q: &QParam<T>) -> T {
    let a = l.diff(m) + 1;
    let b = (l + m).twice() as i64 / 2;
    if a <= 0 || b <= 0 {
        return T::zero();
    }
    (q.qint(a) * q.qint(b)).sqrt()
}

/// `π_{q,l}(g)` in the basis `m = -l, ..., l`.
pub fn irrep_matrix<T: Real>(l: HalfInt, g: Gen, q: &QParam<T>) -> CMat<T> {
    assert!(l.twice() >= 0, "negative spin {l}");
    let d = l.twice() as usize + 1;
    let mut out = CMat::zeros(d, d);
    for (i, m) in l.range_sym().enumerate() {
        match g {
            Gen::K => out[(i, i)] = cre(q.spow(m.twice() as i64)),
            Gen::KInv => out[(i, i)] = cre(q.spow(-m.twice() as i64)),
            Gen::E => {
                if i + 1 < d {
                    out[(i + 1, i)] = cre(e_elem(l, m, q));
                }
            }
            Gen::F => {
                if i > 0 {
                    out[(i - 1, i)] = cre(f_elem(l, m, q));
                }
            }
        }
    }
    out
}

/// Classical spin-`l` matrices `(j+, j-, j0)`.
pub fn classical_spin<T: Real>(l: HalfInt) -> (CMat<T>, CMat<T>, CMat<T>) {
    let d = l.twice() as usize + 1;
    let lf = l.to_f64();
    let mut jp = CMat::zeros(d, d);
    let mut jm = CMat::zeros(d, d);
    let mut j0 = CMat::zeros(d, d);
    for (i, m) in l.range_sym().enumerate() {
        let mf = m.to_f64();
        j0[(i, i)] = cre(T::from_f64(mf));
        if i + 1 < d {
            jp[(i + 1, i)] = cre(T::from_f64(lf * (lf + 1.0) - mf * (mf + 1.0)).sqrt());
        }
        if i > 0 {
            jm[(i - 1, i)] = cre(T::from_f64(lf * (lf + 1.0) - mf * (mf - 1.0)).sqrt());
        }
    }
    (jp, jm, j0)
}

/// A linear combination of words in the generators.
#[derive(Clone, Debug)]
pub struct UqElement<T> {
    terms: Vec<(C<T>, Vec<Gen>)>,
}

impl<T: Real> UqElement<T> {
    pub fn zero() -> Self {
        UqElement { terms: Vec::new() }
    }

    pub fn one() -> Self {
        UqElement { terms: vec![(cone(), vec![])] }
    }

    pub fn gen(g: Gen) -> Self {
        UqElement { terms: vec![(cone(), vec![g])] }
    }

    /// `c · g1 g2 ... gn`.
    pub fn word(c: C<T>, gens: &[Gen]) -> Self {
        UqElement { terms: vec![(c, gens.to_vec())] }
    }

    pub fn terms(&self) -> &[(C<T>, Vec<Gen>)] {
        &self.terms
    }

    pub fn scale(&self, c: C<T>) -> Self {
        UqElement { terms: self.terms.iter().map(|(a, w)| (*a * c, w.clone())).collect() }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(cre(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        UqElement { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-cone::<T>()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, w1) in &self.terms {
            for (b, w2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                terms.push((*a * *b, w));
            }
        }
        UqElement { terms }
    }

    /// Net `k`-weight if homogeneous.
    pub fn weight(&self) -> Option<i32> {
        let mut ws = self.terms.iter().filter(|(c, _)| !c.is_zero()).map(|(_, w)| w.iter().map(|g| g.weight()).sum::<i32>());
        let first = ws.next()?;
        ws.all(|w| w == first).then_some(first)
    }

    /// Image under `π_{q,l}`.
    pub fn rep(&self, l: HalfInt, q: &QParam<T>) -> CMat<T> {
        let d = l.twice() as usize + 1;
        let gens: Vec<CMat<T>> = Gen::ALL.iter().map(|g| irrep_matrix(l, *g, q)).collect();
        self.eval_with(d, |g| gens[g as usize].clone())
    }

    /// Evaluate with an arbitrary assignment of generator matrices.
    pub fn eval_with(&self, dim: usize, mut mat: impl FnMut(Gen) -> CMat<T>) -> CMat<T> {
        let mut out = CMat::zeros(dim, dim);
        for (c, w) in &self.terms {
            let mut acc = CMat::identity(dim);
            for g in w {
                acc = &acc * &mat(*g);
            }
            out = &out + &acc.scale(*c);
        }
        out
    }

    /// `(π_{l1} ⊗ π_{l2}) Δ_q(x)`.
    pub fn coproduct_rep(&self, l1: HalfInt, l2: HalfInt, q: &QParam<T>) -> CMat<T> {
        let d = (l1.twice() as usize + 1) * (l2.twice() as usize + 1);
        self.eval_with(d, |g| coproduct_matrix(l1, l2, g, q))
    }

    /// Antipode, extended as an anti-homomorphism.
    pub fn antipode(&self, q: &QParam<T>) -> Self {
        let mut out = UqElement::zero();
        for (c, w) in &self.terms {
            let mut acc = UqElement::word(*c, &[]);
            for g in w.iter().rev() {
                acc = acc.mul(&antipode_gen(*g, q));
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn counit(&self) -> C<T> {
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (c, w)| {
            if w.iter().all(|g| g.counit() == 1) {
                acc + *c
            } else {
                acc
            }
        })
    }
}

impl<T: Real> Default for UqElement<T> {
    fn default() -> Self {
        UqElement::zero()
    }
}

fn antipode_gen<T: Real>(g: Gen, q: &QParam<T>) -> UqElement<T> {
    match g {
        Gen::E => UqElement::gen(Gen::E).scale_real(-q.q()),
        Gen::F => UqElement::gen(Gen::F).scale_real(-T::one() / q.q()),
        Gen::K => UqElement::gen(Gen::KInv),
        Gen::KInv => UqElement::gen(Gen::K),
    }
}

/// `(π_{l1} ⊗ π_{l2}) Δ_q(g)`; the first factor is the slow index.
pub fn coproduct_matrix<T: Real>(l1: HalfInt, l2: HalfInt, g: Gen, q: &QParam<T>) -> CMat<T> {
    let m = |l, g| irrep_matrix(l, g, q);
    match g {
        Gen::K | Gen::KInv => m(l1, g).kron(&m(l2, g)),
        Gen::E | Gen::F => &m(l1, g).kron(&m(l2, Gen::K)) + &m(l1, Gen::KInv).kron(&m(l2, g)),
    }
}

/// Hopf adjoint action `x ▷ Y = π(x') Y π(S(x''))` of a single generator.
pub fn adjoint_gen<T: Real>(g: Gen, y: &CMat<T>, pi: &impl Fn(Gen) -> CMat<T>, q: &QParam<T>) -> CMat<T> {
    match g {
        Gen::K => &(&pi(Gen::K) * y) * &pi(Gen::KInv),
        Gen::KInv => &(&pi(Gen::KInv) * y) * &pi(Gen::K),
        // Δe = e⊗k + k⁻¹⊗e, S(k) = k⁻¹, S(e) = -q e
        Gen::E => {
            let a = &(&pi(Gen::E) * y) * &pi(Gen::KInv);
            let b = &(&pi(Gen::KInv) * y) * &pi(Gen::E);
            &a - &b.scale_real(q.q())
        }
        Gen::F => {
            let a = &(&pi(Gen::F) * y) * &pi(Gen::KInv);
            let b = &(&pi(Gen::KInv) * y) * &pi(Gen::F);
            &a - &b.scale_real(T::one() / q.q())
        }
    }
}

/// Adjoint action of an element on `B(V_l)`.
pub fn adjoint_action<T: Real>(l: HalfInt, x: &UqElement<T>, y: &CMat<T>, q: &QParam<T>) -> Result<CMat<T>> {
    let d = l.twice() as usize + 1;
    if y.rows() != d || y.cols() != d {
        return Err(Error::Shape(format!("{}x{} matrix acted on by spin {l}", y.rows(), y.cols())));
    }
    let pi = |g| irrep_matrix(l, g, q);
    Ok(adjoint_with(x, y, &pi, q))
}

/// Adjoint action with caller-supplied generator matrices.
pub fn adjoint_with<T: Real>(x: &UqElement<T>, y: &CMat<T>, pi: &impl Fn(Gen) -> CMat<T>, q: &QParam<T>) -> CMat<T> {
    let mut out = CMat::zeros(y.rows(), y.cols());
    for (c, w) in x.terms() {
        let mut acc = y.clone();
        for g in w.iter().rev() {
            acc = adjoint_gen(*g, &acc, pi, q);
        }
        out = &out + &acc.scale(*c);
    }
    out
}

/// Per-relation residuals of the defining relations in `V_l`.
#[derive(Clone, Debug, Serialize)]
pub struct RelationResiduals {
    pub kek_inv: f64,
    pub kfk_inv: f64,
    pub e_f_commutator: f64,
    pub e_adjoint_is_f: f64,
    pub k_self_adjoint: f64,
    pub k_inverse: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        [self.kek_inv, self.kfk_inv, self.e_f_commutator, self.e_adjoint_is_f, self.k_self_adjoint, self.k_inverse]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn check_relations<T: Real>(l: HalfInt, q: &QParam<T>) -> RelationResiduals {
    let e = irrep_matrix(l, Gen::E, q);
    let f = irrep_matrix(l, Gen::F, q);
    let k = irrep_matrix(l, Gen::K, q);
    let ki = irrep_matrix(l, Gen::KInv, q);
    let d = e.rows();
    let kek = &(&(&k * &e) * &ki) - &e.scale_real(q.q());
    let kfk = &(&(&k * &f) * &ki) - &f.scale_real(T::one() / q.q());
    let k2 = &k * &k;
    let ki2 = &ki * &ki;
    let rhs = (&k2 - &ki2).scale_real(T::one() / (q.q() - T::one() / q.q()));
    let comm = &e.commutator(&f) - &rhs;
    RelationResiduals {
        kek_inv: kek.max_abs().to_f64(),
        kfk_inv: kfk.max_abs().to_f64(),
        e_f_commutator: comm.max_abs().to_f64(),
        e_adjoint_is_f: (&e.adjoint() - &f).max_abs().to_f64(),
        k_self_adjoint: (&k.adjoint() - &k).max_abs().to_f64(),
        k_inverse: (&(&k * &ki) - &CMat::identity(d)).max_abs().to_f64(),
    }
}

/// Largest deviation between `π_{q,l}` and `π_l ∘ φ_l` built from classical spin matrices.
pub fn classical_iso_check<T: Real>(l: HalfInt, q: &QParam<T>) -> f64 {
    let (jp, jm, _) = classical_spin::<T>(l);
    let d = l.twice() as usize + 1;
    let lf = l.to_f64();
    // diagonal functions of j0, evaluated on the basis vector they act on
    let mut ge = vec![T::zero(); d];
    let mut gf = vec![T::zero(); d];
    let mut gk = vec![T::zero(); d];
    for (i, m) in l.range_sym().enumerate() {
        let mf = m.to_f64();
        let two_l = l.twice() as i64;
        let two_m = m.twice() as i64;
        // [j - j0 + 1][j + j0] / (j(j+1) - j0(j0 - 1))
        let den_e = lf * (lf + 1.0) - mf * (mf - 1.0);
        if den_e != 0.0 {
            let num = q.qint((two_l - two_m) / 2 + 1) * q.qint((two_l + two_m) / 2);
            ge[i] = (num / T::from_f64(den_e)).max(T::zero()).sqrt();
        }
        let den_f = lf * (lf + 1.0) - mf * (mf + 1.0);
        if den_f != 0.0 {
            let num = q.qint((two_l - two_m) / 2) * q.qint((two_l + two_m) / 2 + 1);
            gf[i] = (num / T::from_f64(den_f)).max(T::zero()).sqrt();
        }
        gk[i] = q.spow(two_m);
    }
    let phi_e = &CMat::diag_real(&ge) * &jp;
    let phi_f = &CMat::diag_real(&gf) * &jm;
    let phi_k = CMat::diag_real(&gk);
    let r_e = (&phi_e - &irrep_matrix(l, Gen::E, q)).max_abs();
    let r_f = (&phi_f - &irrep_matrix(l, Gen::F, q)).max_abs();
    let r_k = (&phi_k - &irrep_matrix(l, Gen::K, q)).max_abs();
    r_e.max(r_f).max(r_k).to_f64()
}

/// Dimensions of the `k`-eigenspaces of `V_l`, ordered by weight.
pub fn weight_multiplicities<T: Real>(l: HalfInt, q: &QParam<T>) -> Result<Vec<usize>> {
    let k = irrep_matrix(l, Gen::K, q);
    let w = k.eigvalsh()?;
    let tol = T::from_f64(1e-20);
    let mut out: Vec<(T, usize)> = Vec::new();
    for x in w {
        match out.last_mut() {
            Some((v, n)) if (x - *v).abs() <= tol * (T::one() + v.abs()) => *n += 1,
            _ => out.push((x, 1)),
        }
    }
    Ok(out.into_iter().map(|(_, n)| n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qd::Quad;

    fn q(s: &str) -> QParam<Quad> {
        QParam::parse(s).unwrap()
    }

    #[test]
    fn spin_half_matrices() {
        let q5 = q("0.5");
        let h = HalfInt::HALF;
        let k = irrep_matrix(h, Gen::K, &q5);
        assert!((k[(0, 0)].re - Quad::from_f64(0.5).sqrt().recip()).abs() < Quad::from_f64(1e-30));
        let e = irrep_matrix(h, Gen::E, &q5);
        assert_eq!(e[(1, 0)].re, Quad::ONE);
        assert!(e[(0, 1)].is_zero() && e[(0, 0)].is_zero());
        let e1 = irrep_matrix(HalfInt::ONE, Gen::E, &q5);
        let expect = (q5.qint(2)).sqrt();
        assert!((e1[(2, 1)].re - expect).abs() < Quad::from_f64(1e-30));
        assert!((e1[(2, 1)].re.to_f64() - 1.5811388).abs() < 1e-7);
    }

    #[test]
    fn relations_hold() {
        for (qs, twol) in [("0.5", 1), ("0.9", 6), ("0.3", 4)] {
            let r = check_relations(HalfInt::from_twice(twol), &q(qs));
            assert!(r.max() < 1e-28, "{qs} {twol}: {r:?}");
        }
    }

    #[test]
    fn coproduct_of_k_and_counit() {
        let q5 = q("0.5");
        let h = HalfInt::HALF;
        let dk = coproduct_matrix(h, h, Gen::K, &q5);
        // q^{-1}, 1, 1, q in the m-ascending Kronecker basis
        for (i, v) in [2.0, 1.0, 1.0, 0.5].iter().enumerate() {
            assert!((dk[(i, i)].re - Quad::from_f64(*v)).abs() < Quad::from_f64(1e-30));
        }
        // singlet q^{1/2}|↑↓> - q^{-1/2}|↓↑> is killed by Δe; |↑↓> has index 2
        let de = coproduct_matrix(h, h, Gen::E, &q5);
        let mut v = vec![Complex::new(Quad::zero(), Quad::zero()); 4];
        v[2] = cre(q5.s());
        v[1] = cre(-q5.s().recip());
        let out = de.mat_vec(&v);
        assert!(out.iter().all(|z| crate::scalar::cabs(*z) < Quad::from_f64(1e-30)));
        for g in Gen::ALL {
            assert_eq!(UqElement::<Quad>::gen(g).counit().re, Quad::from_f64(g.counit() as f64));
        }
    }

    #[test]
    fn adjoint_action_basics() {
        let q7 = q("0.7");
        let l = HalfInt::ONE;
        let id = CMat::<Quad>::identity(3);
        for g in Gen::ALL {
            let r = adjoint_action(l, &UqElement::gen(g), &id, &q7).unwrap();
            let expect = id.scale_real(Quad::from_f64(g.counit() as f64));
            assert!((&r - &expect).max_abs() < Quad::from_f64(1e-30));
        }
        // e ▷ f via the Sweedler expansion
        let f = irrep_matrix(l, Gen::F, &q7);
        let e = irrep_matrix(l, Gen::E, &q7);
        let ki = irrep_matrix(l, Gen::KInv, &q7);
        let direct = &(&(&e * &f) * &ki) + &(&(&ki * &f) * &e).scale_real(-q7.q());
        let via = adjoint_action(l, &UqElement::gen(Gen::E), &f, &q7).unwrap();
        assert!((&direct - &via).max_abs() < Quad::from_f64(1e-30));
        assert!(adjoint_action(l, &UqElement::gen(Gen::E), &CMat::identity(2), &q7).is_err());
    }

    #[test]
    fn adjoint_action_is_an_action() {
        // (xy) ▷ Y = x ▷ (y ▷ Y) and matches π(x') Y π(S(x'')) through the antipode
        let q3 = q("0.3");
        let l = HalfInt::from_twice(3);
        let y = CMat::<Quad>::from_fn(4, 4, |i, j| Complex::new(Quad::from_f64((i * 3 + j) as f64 * 0.1), Quad::from_f64(i as f64 - j as f64)));
        let ef = UqElement::gen(Gen::E).mul(&UqElement::gen(Gen::F));
        let a = adjoint_action(l, &ef, &y, &q3).unwrap();
        let b = adjoint_action(l, &UqElement::gen(Gen::E), &adjoint_action(l, &UqElement::gen(Gen::F), &y, &q3).unwrap(), &q3).unwrap();
        assert!((&a - &b).max_abs() < Quad::from_f64(1e-27));
        let s = UqElement::gen(Gen::E).antipode(&q3);
        assert_eq!(s.terms()[0].1, vec![Gen::E]);
        assert!((s.terms()[0].0.re + q3.q()).abs() < Quad::from_f64(1e-30));
    }

    #[test]
    fn classical_isomorphism() {
        assert!(classical_iso_check(HalfInt::HALF, &q("0.5")) < 1e-28);
        assert!(classical_iso_check(HalfInt::ONE, &q("0.9")) < 1e-28);
        assert!(classical_iso_check(HalfInt::from_twice(7), &q("0.3")) < 1e-26);
        assert_eq!(classical_iso_check(HalfInt::ZERO, &q("0.5")), 0.0);
    }

    #[test]
    fn near_classical_limit() {
        let q1 = q("0.9999");
        let (jp, _, _) = classical_spin::<Quad>(HalfInt::ONE);
        let e = irrep_matrix(HalfInt::ONE, Gen::E, &q1);
        assert!((&e - &jp).max_abs().to_f64() < 1e-3);
    }

    #[test]
    fn weight_spaces_are_one_dimensional() {
        for twol in 0..8 {
            let w = weight_multiplicities(HalfInt::from_twice(twol), &q("0.6")).unwrap();
            assert_eq!(w, vec![1; twol as usize + 1]);
        }
    }
}
