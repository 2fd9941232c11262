//! Covariant q-Clifford generators for SU_q(3).
//!
//! The adjoint representation is written in the Gelfand–Tsetlin basis
//! `e₁ … e₈`; the sixteen-dimensional spinor is two copies of it, and the
//! generators `ψ_i` sit in the off-diagonal 8×8 blocks with free parameters
//! `b₊` (upper block) and `b₋` (lower block).

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{poly_roots, CMat, C};
use crate::podles::NamedResidual;
use crate::qscalar::QParam;
use crate::scalar::{cabs, cone, cre, czero, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Su3Gen {
    E1,
    E2,
    F1,
    F2,
    K1,
    K2,
}

impl Su3Gen {
    pub const ALL: [Su3Gen; 6] = [Su3Gen::E1, Su3Gen::E2, Su3Gen::F1, Su3Gen::F2, Su3Gen::K1, Su3Gen::K2];
}

/// The eight-dimensional adjoint representation.
#[derive(Clone, Debug)]
pub struct AdjointRepSu3<T> {
    pub e: [CMat<T>; 2],
    pub f: [CMat<T>; 2],
    pub k: [CMat<T>; 2],
    pub k_inv: [CMat<T>; 2],
}

/// 8×8 matrix from 1-based `(row, col, value)` entries.
fn units<T: Real>(n: usize, entries: &[(usize, usize, C<T>)]) -> CMat<T> {
    let mut m = CMat::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i - 1, j - 1)] += v;
    }
    m
}

pub fn adjoint_rep_su3<T: Real>(q: &QParam<T>) -> AdjointRepSu3<T> {
    let r = |x: T| cre(x);
    let one = cone::<T>();
    let s2 = q.sqrt_qint(2);
    let s32 = (q.qint(3) / q.qint(2)).sqrt();
    let e1 = units(8, &[(1, 2, one), (3, 5, r(s2)), (5, 6, r(s2)), (7, 8, one)]);
    let e2 = units(
        8,
        &[(1, 3, one), (2, 4, r(s32)), (2, 5, r(T::one() / s2)), (4, 7, r(s32)), (5, 7, r(T::one() / s2)), (6, 8, one)],
    );
    // exponents of q^{1/2}
    let k1 = [1, -1, 2, 0, 0, -2, 1, -1];
    let k2 = [1, 2, -1, 0, 0, 1, -2, -1];
    let diag = |p: &[i64; 8], sign: i64| CMat::diag_real(&p.iter().map(|&x| q.spow(sign * x)).collect::<Vec<_>>());
    AdjointRepSu3 {
        f: [e1.adjoint(), e2.adjoint()],
        e: [e1, e2],
        k: [diag(&k1, 1), diag(&k2, 1)],
        k_inv: [diag(&k1, -1), diag(&k2, -1)],
    }
}

impl<T: Real> AdjointRepSu3<T> {
    pub fn gen(&self, g: Su3Gen) -> &CMat<T> {
        match g {
            Su3Gen::E1 => &self.e[0],
            Su3Gen::E2 => &self.e[1],
            Su3Gen::F1 => &self.f[0],
            Su3Gen::F2 => &self.f[1],
            Su3Gen::K1 => &self.k[0],
            Su3Gen::K2 => &self.k[1],
        }
    }

    /// Block-diagonal copy acting on both halves of the spinor.
    pub fn doubled(&self, g: Su3Gen) -> CMat<T> {
        CMat::identity(2).kron(self.gen(g))
    }

    pub fn doubled_k_inv(&self, i: usize) -> CMat<T> {
        CMat::identity(2).kron(&self.k_inv[i])
    }
}

/// Defining relations and q-Serre relations for any family of matrices
/// `(e₁, e₂, f₁, f₂, k₁, k₂)`.
pub fn su3_relations<T: Real>(e: &[CMat<T>; 2], f: &[CMat<T>; 2], k: &[CMat<T>; 2], q: &QParam<T>) -> Vec<NamedResidual> {
    let n = e[0].rows();
    let id = CMat::<T>::identity(n);
    let qq = q.q();
    let b2 = q.qint(2);
    let cartan = [[2i64, -1], [-1, 2]];
    let mut k_inv = Vec::new();
    for ki in k {
        // k is invertible; solve column by column
        let cols: Vec<Vec<C<T>>> = (0..n)
            .map(|j| {
                let mut b = vec![czero(); n];
                b[j] = cone();
                ki.solve(&b).unwrap_or_else(|_| vec![czero(); n])
            })
            .collect();
        k_inv.push(CMat::from_fn(n, n, |r, c| cols[c][r]));
    }
    let scale = e.iter().chain(f).chain(k).map(|m| m.max_abs().to_f64()).fold(1.0, f64::max);
    let res = |m: CMat<T>| m.max_abs().to_f64() / scale;
    let mut out = Vec::new();
    let mut kk = 0.0f64;
    let mut ke = 0.0f64;
    let mut ef = 0.0f64;
    let mut serre = 0.0f64;
    for i in 0..2 {
        kk = kk.max(res(&(&k[i] * &k_inv[i]) - &id));
        for j in 0..2 {
            kk = kk.max(res(k[i].commutator(&k[j])));
            let w = q.spow(cartan[i][j]);
            ke = ke.max(res(&(&(&k[i] * &e[j]) * &k_inv[i]) - &e[j].scale_real(w)));
            ke = ke.max(res(&(&(&k[i] * &f[j]) * &k_inv[i]) - &f[j].scale_real(T::one() / w)));
            let mut c = e[i].commutator(&f[j]);
            if i == j {
                let k2 = &k[i] * &k[i];
                let k2i = &k_inv[i] * &k_inv[i];
                c = &c - &(&k2 - &k2i).scale_real(T::one() / (qq - T::one() / qq));
            }
            ef = ef.max(res(c));
            if i != j {
                for x in [e, f] {
                    let s = &(&(&(&x[i] * &x[i]) * &x[j]) - &(&(&x[i] * &x[j]) * &x[i]).scale_real(b2)) + &(&(&x[j] * &x[i]) * &x[i]);
                    serre = serre.max(res(s));
                }
            }
        }
    }
    out.push(NamedResidual { name: "k_i k_j = k_j k_i, k k^-1 = 1", residual: kk });
    out.push(NamedResidual { name: "k_i e_j k_i^-1 = q^(a_ij/2) e_j (and f)", residual: ke });
    out.push(NamedResidual { name: "[e_i, f_j] = d_ij (k_i^2 - k_i^-2)/(q - q^-1)", residual: ef });
    out.push(NamedResidual { name: "q-Serre", residual: serre });
    out
}

/// The eight generators `ψ^±_{q,i}` for one value of the parameter.
pub fn psi_block<T: Real>(b: C<T>, q: &QParam<T>) -> [CMat<T>; 8] {
    let one = cone::<T>();
    let r = |x: T| cre(x);
    let qq = q.q();
    let s2 = q.sqrt_qint(2);
    let s3 = r(q.sqrt_qint(3));
    let br2 = q.qint(2);
    let sp = |k: i64| q.spow(k);
    let inv = |x: T| T::one() / x;
    // recurring combinations
    let bp = b + s3; // b + √[3]
    let bm = b * s3 - one; // √[3] b - 1
    let cq = b * s3 * r(qq * qq) + one; // q² √[3] b + 1
    let dq = b * r(qq * qq) - s3; // q² b - √[3]
    let p1 = [
        (1, 4, one),
        (1, 5, b),
        (2, 6, b * r(sp(-1) * s2)),
        (3, 7, bp * r(inv((qq * br2).sqrt()))),
        (4, 8, bm * r(inv(qq * br2))),
        (5, 8, bp * r(inv(qq * br2))),
    ];
    let p2 = [
        (1, 3, -b * r(sp(-3) * s2)),
        (2, 4, one),
        (2, 5, -b * r(sp(-4))),
        (4, 7, -bm * r(inv(qq * qq * br2))),
        (5, 7, bp * r(inv(br2))),
        (6, 8, bp * r(inv((qq * br2).sqrt()))),
    ];
    let p3 = [
        (1, 2, -bp * r(inv((sp(6) * br2).sqrt()))),
        (3, 4, -(r(sp(-4)) + s3 * b) * r(inv(qq * br2))),
        (3, 5, dq * r(inv(qq * br2))),
        (4, 6, (r(sp(-4)) + s3 * b) * r(inv(br2))),
        (5, 6, (b - s3 * r(sp(-4))) * r(inv(br2))),
        (7, 8, b * r(sp(-1) * s2)),
    ];
    let c3 = r(inv(sp(6) * br2)); // (q³[2])⁻¹
    let p4 = [
        (1, 1, bm * c3),
        (2, 2, bm * c3),
        (3, 3, -cq * c3),
        (4, 4, one + bm * c3),
        (5, 5, -cq * c3),
        (6, 6, -cq * c3),
        (7, 7, one),
        (8, 8, one),
    ];
    let p5 = [
        (1, 1, bp * c3),
        (2, 2, -bp * r(inv(qq * br2))),
        (3, 3, -dq * c3),
        (4, 5, -cq * c3),
        (5, 4, -cq * c3),
        (5, 5, (b - s3 * r(sp(-4))) * r((qq - inv(qq)) / br2)),
        (6, 6, dq * r(inv(qq * br2))),
        (7, 7, -b * r(sp(-4))),
        (8, 8, b),
    ];
    let p6 = [
        (2, 1, bp * r(inv(sp(5) * s2))),
        (4, 3, cq * r(inv(sp(8) * br2))),
        (5, 3, -dq * r(inv(qq * qq * br2))),
        (6, 4, -cq * c3),
        (6, 5, -dq * c3),
        (8, 7, -b * r(sp(-3) * s2)),
    ];
    let p7 = [
        (3, 1, b * r(sp(-5) * s2)),
        (4, 2, -r(inv(qq))),
        (5, 2, b * r(sp(-6))),
        (7, 4, bm * c3),
        (7, 5, -bp * r(inv(qq * br2))),
        (8, 6, -bp * r(inv(sp(3) * s2))),
    ];
    let p8 = [
        (4, 1, r(sp(-4))),
        (5, 1, b * r(sp(-4))),
        (6, 2, b * r(sp(-5) * s2)),
        (7, 3, bp * r(inv(sp(5) * s2))),
        (8, 4, bm * c3),
        (8, 5, bp * c3),
    ];
    [
        units(8, &p1),
        units(8, &p2),
        units(8, &p3),
        units(8, &p4),
        units(8, &p5),
        units(8, &p6),
        units(8, &p7),
        units(8, &p8),
    ]
}

#[derive(Clone, Debug)]
pub struct PsiFamily<T> {
    pub b_plus: C<T>,
    pub b_minus: C<T>,
    pub plus: [CMat<T>; 8],
    pub minus: [CMat<T>; 8],
    /// `(0 ψ⁺; ψ⁻ 0)` on the sixteen-dimensional spinor.
    pub full: Vec<CMat<T>>,
}

pub fn psi_family<T: Real>(b_plus: C<T>, b_minus: C<T>, q: &QParam<T>) -> PsiFamily<T> {
    let plus = psi_block(b_plus, q);
    let minus = psi_block(b_minus, q);
    let full = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| {
            CMat::from_fn(16, 16, |i, j| match (i < 8, j < 8) {
                (true, false) => p[(i, j - 8)],
                (false, true) => m[(i - 8, j)],
                _ => czero(),
            })
        })
        .collect();
    PsiFamily { b_plus, b_minus, plus, minus, full }
}

impl<T: Real> PsiFamily<T> {
    /// Largest entry in the diagonal 8×8 blocks (zero by construction).
    pub fn diagonal_block_leak(&self) -> T {
        self.full.iter().fold(T::zero(), |acc, m| {
            let mut worst = acc;
            for i in 0..16 {
                for j in 0..16 {
                    if (i < 8) == (j < 8) {
                        worst = worst.max(cabs(m[(i, j)]));
                    }
                }
            }
            worst
        })
    }
}

/// `b₋ = (1 − √[3] b₊)/(√[3] + b₊)`.
pub fn constraint_b_minus<T: Real>(b_plus: C<T>, q: &QParam<T>) -> Result<C<T>> {
    let s3 = cre(q.sqrt_qint(3));
    let den = s3 + b_plus;
    if cabs(den) <= T::epsilon() * T::from_f64(1e3) * cabs(s3) {
        return Err(Error::Singular("b_plus = -sqrt([3]) is a pole of the constraint".into()));
    }
    Ok((cone::<T>() - s3 * b_plus) / den)
}

/// Solve `ψ₁ψ₁ = 0` for `b₋` directly: the product is affine in `b₋`, so one
/// least-squares step over all entries gives `b₋` and the leftover residual.
pub fn solve_b_minus_numeric<T: Real>(b_plus: C<T>, q: &QParam<T>) -> Result<(C<T>, T)> {
    let sq = |bm: C<T>| {
        let p = psi_family(b_plus, bm, q);
        &p.full[0] * &p.full[0]
    };
    let a0 = sq(czero());
    let a1 = &sq(cone()) - &a0;
    let n = a0.rows();
    let col = CMat::from_fn(n * n, 1, |i, _| a1[(i / n, i % n)]);
    let rhs: Vec<C<T>> = (0..n * n).map(|i| -a0[(i / n, i % n)]).collect();
    let bm = col.lstsq(&rhs)?[0];
    let residual = sq(bm).max_abs();
    Ok((bm, residual))
}

/// `x ▷ Y` for `Y` on the spinor, with `π_q` block-diagonal.
pub fn adjoint_action_su3<T: Real>(rep: &AdjointRepSu3<T>, g: Su3Gen, y: &CMat<T>, q: &QParam<T>) -> CMat<T> {
    let qq = q.q();
    match g {
        Su3Gen::E1 | Su3Gen::E2 | Su3Gen::F1 | Su3Gen::F2 => {
            let i = matches!(g, Su3Gen::E2 | Su3Gen::F2) as usize;
            let x = rep.doubled(g);
            let ki = rep.doubled_k_inv(i);
            let c = if matches!(g, Su3Gen::E1 | Su3Gen::E2) { qq } else { T::one() / qq };
            // Δx = x ⊗ k + k⁻¹ ⊗ x,  S(e) = −q e,  S(f) = −q⁻¹ f
            &(&(&x * y) * &ki) - &(&(&ki * y) * &x).scale_real(c)
        }
        Su3Gen::K1 | Su3Gen::K2 => {
            let i = (g == Su3Gen::K2) as usize;
            &(&rep.doubled(g) * y) * &rep.doubled_k_inv(i)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    /// Worst relative residual of `x ▷ ψ_i − Σ_j R(x)_{ji} ψ_j`.
    pub closure: f64,
    /// Relations and q-Serre relations evaluated on the matrices `R(x)`.
    pub relations: Vec<NamedResidual>,
    /// `R(k_i)` diagonal with the adjoint weights of `π_{q,ρ}(k_i)`.
    pub weight_residual: f64,
    pub min_singular_value: f64,
}

/// The expansion matrices `R(x)` for the six generators.
#[derive(Clone, Debug)]
pub struct Expansion<T> {
    pub r: Vec<(Su3Gen, CMat<T>)>,
}

impl<T: Real> Expansion<T> {
    pub fn get(&self, g: Su3Gen) -> &CMat<T> {
        &self.r.iter().find(|(h, _)| *h == g).expect("all generators present").1
    }
}

fn flatten_columns<T: Real>(mats: &[CMat<T>]) -> CMat<T> {
    let n = mats[0].rows();
    CMat::from_fn(n * n, mats.len(), |i, j| mats[j][(i / n, i % n)])
}

pub fn covariance<T: Real>(p: &PsiFamily<T>, q: &QParam<T>) -> Result<(CovarianceReport, Expansion<T>)> {
    let rep = adjoint_rep_su3(q);
    let basis = flatten_columns(&p.full);
    let sv = basis.singular_values()?;
    let smin = sv.iter().fold(T::from_f64(f64::INFINITY), |a, &b| a.min(b));
    let smax = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    if smin <= smax * T::from_f64(1e-20) {
        return Err(Error::Singular("psi family is not linearly independent".into()));
    }
    let scale = p.full.iter().fold(T::zero(), |a, m| a.max(m.max_abs()));
    let mut closure = T::zero();
    let mut r = Vec::new();
    for g in Su3Gen::ALL {
        let mut rm = CMat::zeros(8, 8);
        for (i, psi) in p.full.iter().enumerate() {
            let img = adjoint_action_su3(&rep, g, psi, q);
            let rhs = flatten_columns(std::slice::from_ref(&img)).column(0);
            let coef = basis.lstsq(&rhs)?;
            let mut back = img.clone();
            for (j, c) in coef.iter().enumerate() {
                back = &back - &p.full[j].scale(*c);
                rm[(j, i)] = *c;
            }
            closure = closure.max(back.max_abs() / scale);
        }
        r.push((g, rm));
    }
    let ex = Expansion { r };
    let e = [ex.get(Su3Gen::E1).clone(), ex.get(Su3Gen::E2).clone()];
    let f = [ex.get(Su3Gen::F1).clone(), ex.get(Su3Gen::F2).clone()];
    let k = [ex.get(Su3Gen::K1).clone(), ex.get(Su3Gen::K2).clone()];
    let relations = su3_relations(&e, &f, &k, q);
    let mut weight_residual = T::zero();
    for i in 0..2 {
        for a in 0..8 {
            for b in 0..8 {
                let want = if a == b { rep.k[i][(a, a)] } else { czero() };
                weight_residual = weight_residual.max(cabs(k[i][(a, b)] - want));
            }
        }
    }
    let report = CovarianceReport {
        closure: closure.to_f64(),
        relations,
        weight_residual: weight_residual.to_f64(),
        min_singular_value: smin.to_f64(),
    };
    Ok((report, ex))
}

/// Change of basis `P` with `R(x) P = P π_{q,ρ}(x)` for all six generators,
/// taken as the null vector of the stacked linear system.
pub fn intertwiner<T: Real>(ex: &Expansion<T>, q: &QParam<T>) -> Result<CMat<T>> {
    let rep = adjoint_rep_su3(q);
    let n = 8;
    let mut rows = Vec::new();
    for g in Su3Gen::ALL {
        let r = ex.get(g);
        let pi = rep.gen(g);
        // (R P − P π)_{ab} = Σ_c R_ac P_cb − P_ac π_cb
        for a in 0..n {
            for b in 0..n {
                let mut row = vec![czero::<T>(); n * n];
                for c in 0..n {
                    row[c * n + b] += r[(a, c)];
                    row[a * n + c] -= pi[(c, b)];
                }
                rows.push(row);
            }
        }
    }
    let m = CMat::from_fn(rows.len(), n * n, |i, j| rows[i][j]);
    let gram = &m.adjoint() * &m;
    let (vals, vecs) = gram.eigh()?;
    let idx = (0..vals.len()).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap()).unwrap();
    let v = vecs.column(idx);
    let p = CMat::from_fn(n, n, |a, b| v[a * n + b]);
    // fix the phase on the largest entry
    let (mut best, mut big) = (czero::<T>(), T::zero());
    for a in 0..n {
        for b in 0..n {
            if cabs(p[(a, b)]) > big {
                big = cabs(p[(a, b)]);
                best = p[(a, b)];
            }
        }
    }
    Ok(p.scale(cre(big) / best))
}

/// `max_x ‖R(x) P − P π(x)‖ / ‖P‖` together with the condition number of `P`.
pub fn intertwiner_residual<T: Real>(ex: &Expansion<T>, p: &CMat<T>, q: &QParam<T>) -> Result<(f64, f64)> {
    let rep = adjoint_rep_su3(q);
    let norm = p.max_abs();
    let mut worst = T::zero();
    for g in Su3Gen::ALL {
        let d = &(ex.get(g) * p) - &(p * rep.gen(g));
        worst = worst.max(d.max_abs() / norm);
    }
    let sv = p.singular_values()?;
    let smin = sv.iter().fold(T::from_f64(f64::INFINITY), |a, &b| a.min(b));
    let smax = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok((worst.to_f64(), (smax / smin).to_f64()))
}

/// Coefficients `(i, j, c)` of `ω_ρ(b₊, z) = Σ c ψ_i ⊗ ψ_j`, returned as
/// `(i, j, constant part, coefficient of z)`.
fn omega_rho_terms<T: Real>(q: &QParam<T>) -> Vec<(usize, usize, T, T)> {
    let s3 = q.sqrt_qint(3);
    let b2 = q.qint(2);
    let s2 = q.sqrt_qint(2);
    let zero = T::zero();
    vec![
        (0, 3, -T::one() / s3, q.spow(6) * b2 / s3),
        (3, 0, q.spow(-6) * b2 / s3, -T::one() / s3),
        (0, 4, T::one(), zero),
        (4, 0, zero, T::one()),
        (1, 2, -q.spow(-3) * s2, zero),
        (2, 1, zero, -q.spow(3) * s2),
    ]
}

/// `m(ω_ρ(b₊, z))` on the sixteen-dimensional spinor.
pub fn m_omega_rho<T: Real>(p: &PsiFamily<T>, z: C<T>, q: &QParam<T>) -> CMat<T> {
    let mut out = CMat::zeros(16, 16);
    for (i, j, c0, cz) in omega_rho_terms(q) {
        let c = cre(c0) + z * cre(cz);
        out = &out + &(&p.full[i] * &p.full[j]).scale(c);
    }
    out
}

/// `m(ω₀)` on the sixteen-dimensional spinor.
pub fn m_omega_zero<T: Real>(p: &PsiFamily<T>, q: &QParam<T>) -> CMat<T> {
    let qp = |n: i64| q.qpow(n);
    let terms = [
        (0, 7, qp(2)),
        (7, 0, qp(-2)),
        (1, 6, -qp(1)),
        (6, 1, -qp(-1)),
        (2, 5, -qp(1)),
        (5, 2, -qp(-1)),
        (3, 3, T::one()),
        (4, 4, T::one()),
    ];
    let mut out = CMat::zeros(16, 16);
    for (i, j, c) in terms {
        out = &out + &(&p.full[i] * &p.full[j]).scale_real(c);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaSolution {
    pub z: [f64; 2],
    pub b_plus: [f64; 2],
    pub b_minus: [f64; 2],
    /// Relative size of `m(ω_ρ)` at the solution.
    pub m_omega_residual: f64,
    /// `ψ₁ψ₁` at the solution.
    pub psi1_square: f64,
    /// Distance of `z` to the nearer of `z′`, `z″`.
    pub z_distance: f64,
    /// Distance of `(z, b₊)` to the nearest printed pair.
    pub printed_distance: f64,
    /// Distance of `(z, b₊)` to the nearest pair from [`omega_rho_quadratics`].
    pub corrected_distance: f64,
    pub branch: String,
}

pub fn cpair<T: Real>(z: C<T>) -> [f64; 2] {
    [z.re.to_f64(), z.im.to_f64()]
}

/// The four displayed `(z, b₊)` pairs: `(z′, b′₊±)` then `(z″, b″₊±)`.
pub fn omega_rho_closed_forms<T: Real>(q: &QParam<T>) -> Vec<(&'static str, C<T>, C<T>)> {
    let qp = |n: i64| q.qpow(n);
    let one = T::one();
    let two = T::from_f64(2.0);
    let z1 = (qp(6) + qp(2) + one) / ((qp(6) + qp(4) + one) * qp(4));
    let z2 = (qp(6) + qp(4) + one) / ((qp(6) + qp(2) + one) * qp(2));
    // √(−[3]) on the principal branch
    let root = Complex::new(T::zero(), q.sqrt_qint(3));
    let b2 = cre(q.qint(2));
    let qq = cre(q.q());
    let mut out = Vec::new();
    for (name, sign) in [("z', b'+ (+)", one), ("z', b'+ (-)", -one)] {
        let b = (cre(qp(2) - one) + cre(sign) * qq * b2 * root) / (cre(two * qp(2)) * root);
        out.push((name, cre(z1), b));
    }
    for (name, sign) in [("z'', b''+ (+)", one), ("z'', b''+ (-)", -one)] {
        let b = (cre(one - qp(2)) + cre(sign) * qq * b2 * root) / (cre(two) * root);
        out.push((name, cre(z2), b));
    }
    out
}

/// The `(z, b₊)` pairs read off the numerical roots: for `z′` the two `b₊`
/// have sum `(q² − 1)/(q²√[3])` and product `q⁻²`, for `z″` sum
/// `(1 − q²)/√[3]` and product `q²`.  Both discriminants equal
/// `−3q²[2]²`, which gives
/// `b′₊ = (q² − 1 ± i√3 q[2])/(2q²√[3])` and `b″₊ = (1 − q² ± i√3 q[2])/(2√[3])`.
pub fn omega_rho_quadratics<T: Real>(q: &QParam<T>) -> Vec<(&'static str, C<T>, C<T>)> {
    let qp = |n: i64| q.qpow(n);
    let one = T::one();
    let two = T::from_f64(2.0);
    let s3 = q.sqrt_qint(3);
    let im = q.q() * q.qint(2) * T::from_f64(3.0).sqrt();
    let printed = omega_rho_closed_forms(q);
    let (z1, z2) = (printed[0].1, printed[2].1);
    let mut out = Vec::new();
    for (name, sign) in [("z', b'+ (+)", one), ("z', b'+ (-)", -one)] {
        let d = two * qp(2) * s3;
        out.push((name, z1, C::new((qp(2) - one) / d, sign * im / d)));
    }
    for (name, sign) in [("z'', b''+ (+)", one), ("z'', b''+ (-)", -one)] {
        let d = two * s3;
        out.push((name, z2, C::new((one - qp(2)) / d, sign * im / d)));
    }
    out
}

/// True when every `b₊` in the list has its complex conjugate in the list
/// (paired with the same `z`).
pub fn closed_under_conjugation<T: Real>(pairs: &[(C<T>, C<T>)], tol: T) -> bool {
    pairs.iter().all(|(z, b)| pairs.iter().any(|(z2, b2)| cabs(*z2 - *z) <= tol && cabs(*b2 - b.conj()) <= tol))
}

/// Polynomial in `b₊` with matrix coefficients, lowest degree first.
#[derive(Clone, Debug)]
struct PolyMat<T> {
    coeffs: Vec<CMat<T>>,
}

impl<T: Real> PolyMat<T> {
    fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs[0].rows();
        let mut coeffs = vec![CMat::zeros(n, n); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        PolyMat { coeffs }
    }

    fn add_scaled(&mut self, other: &Self, c: T) {
        for (i, b) in other.coeffs.iter().enumerate() {
            self.coeffs[i] = &self.coeffs[i] + &b.scale_real(c);
        }
    }

    fn eval_entry(&self, e: usize, b: C<T>) -> C<T> {
        let n = self.coeffs[0].rows();
        self.coeffs.iter().rev().fold(czero(), |acc, m| acc * b + m[(e / n, e % n)])
    }
}

fn poly_mul<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    let mut out = vec![czero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    out
}

/// Fixed, well-spread complex weights for generic linear combinations.
fn weight<T: Real>(e: usize, salt: f64) -> C<T> {
    let t = e as f64 * 0.618_033_988_749 + salt;
    C::new(T::from_f64((7.3 * t).sin()), T::from_f64((3.1 * t).cos()))
}

/// Solve `m(ω_ρ(b₊, z)) = 0` with `b₋ = b₋(b₊)`.
///
/// After multiplying through by `√[3] + b₊` every entry of `m(ω_ρ)` has the
/// form `A(b₊) + z B(b₊)` with `A`, `B` quadratic.  Eliminating `z` between
/// two generic combinations of entries leaves a quartic in `b₊`, whose roots
/// are then screened against the full matrix equation.
pub fn solve_omega_rho<T: Real>(q: &QParam<T>) -> Result<Vec<OmegaSolution>> {
    let s3 = cre(q.sqrt_qint(3));
    // ψ⁺ = P + b Q, (√[3] + b) ψ⁻ = (√[3] P + Q) + b (P − √[3] Q)
    let p0 = psi_family(czero(), czero(), q);
    let p1 = psi_family(cone(), cone(), q);
    let lin = |i: usize| {
        let p = &p0.full[i];
        let qd = &p1.full[i] - p;
        let upper = |m: &CMat<T>| CMat::from_fn(16, 16, |a, b| if a < 8 && b >= 8 { m[(a, b)] } else { czero() });
        let lower = |m: &CMat<T>| CMat::from_fn(16, 16, |a, b| if a >= 8 && b < 8 { m[(a, b)] } else { czero() });
        let plus = PolyMat { coeffs: vec![upper(p), upper(&qd), CMat::zeros(16, 16)] };
        let minus = PolyMat {
            coeffs: vec![&lower(p).scale(s3) + &lower(&qd), &lower(p) - &lower(&qd).scale(s3), CMat::zeros(16, 16)],
        };
        (plus, minus)
    };
    let n = 16 * 16;
    let mut a_poly = PolyMat { coeffs: vec![CMat::zeros(16, 16); 5] };
    let mut b_poly = a_poly.clone();
    for (i, j, c0, cz) in omega_rho_terms(q) {
        let (pi, mi) = lin(i);
        let (pj, mj) = lin(j);
        // (√[3]+b) ψ_i ψ_j = ψ⁺_i · (√[3]+b)ψ⁻_j + (√[3]+b)ψ⁻_i · ψ⁺_j
        let mut prod = pi.mul(&mj);
        let other = mi.mul(&pj);
        prod.add_scaled(&other, T::one());
        let mut padded = PolyMat { coeffs: vec![CMat::zeros(16, 16); 5] };
        padded.add_scaled(&prod, T::one());
        a_poly.add_scaled(&padded, c0);
        b_poly.add_scaled(&padded, cz);
    }
    let combo = |poly: &PolyMat<T>, salt: f64| -> Vec<C<T>> {
        (0..5)
            .map(|d| (0..n).fold(czero(), |acc, e| acc + weight::<T>(e, salt) * poly.coeffs[d][(e / 16, e % 16)]))
            .collect()
    };
    let (a1, b1) = (combo(&a_poly, 0.1), combo(&b_poly, 0.1));
    let (a2, b2) = (combo(&a_poly, 0.77), combo(&b_poly, 0.77));
    let minor: Vec<C<T>> = poly_mul(&a1, &b2).iter().zip(poly_mul(&a2, &b1)).map(|(x, y)| *x - y).collect();
    let roots = poly_roots(&minor)?;
    let closed = omega_rho_closed_forms(q);
    let quad = omega_rho_quadratics(q);
    let mut out = Vec::new();
    for b in roots {
        if cabs(b + s3) < T::from_f64(1e-12) {
            continue;
        }
        // z by least squares over all entries
        let (mut num, mut den) = (czero::<T>(), T::zero());
        for e in 0..n {
            let av = a_poly.eval_entry(e, b);
            let bv = b_poly.eval_entry(e, b);
            num -= bv.conj() * av;
            den += crate::scalar::abs2(bv);
        }
        if den.is_zero() {
            continue;
        }
        let z = num / cre(den);
        let bm = constraint_b_minus(b, q)?;
        let fam = psi_family(b, bm, q);
        let scale = omega_rho_terms(q).iter().fold(T::zero(), |acc, (i, j, c0, cz)| {
            let c = cabs(cre(*c0) + z * cre(*cz));
            acc.max(c * (&fam.full[*i] * &fam.full[*j]).max_abs())
        });
        let resid = m_omega_rho(&fam, z, q).max_abs() / scale.max(T::one());
        let sq = (&fam.full[0] * &fam.full[0]).max_abs();
        let nearest = |set: &[(&'static str, C<T>, C<T>)]| {
            set.iter()
                .map(|(name, zc, bc)| (*name, cabs(*zc - z).max(cabs(*bc - b))))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap()
        };
        let (_, printed) = nearest(&closed);
        let (branch, corrected) = nearest(&quad);
        let zd = closed.iter().fold(T::from_f64(f64::INFINITY), |acc, (_, zc, _)| acc.min(cabs(*zc - z)));
        out.push(OmegaSolution {
            z: cpair(z),
            b_plus: cpair(b),
            b_minus: cpair(bm),
            m_omega_residual: resid.to_f64(),
            psi1_square: sq.to_f64(),
            z_distance: zd.to_f64(),
            printed_distance: printed.to_f64(),
            corrected_distance: corrected.to_f64(),
            branch: branch.to_string(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaZero {
    pub scalar: [f64; 2],
    pub trace_scalar: [f64; 2],
    pub closed_form: [f64; 2],
    /// Largest entry of `m(ω₀) − scalar·1`, relative to the scalar.
    pub off_scalar: f64,
    pub closed_form_deviation: f64,
}

/// `[4](2b₊ + (1 − b₊²)√[3]) / (q³(b₊ + √[3]))`.
pub fn omega_zero_closed_form<T: Real>(b_plus: C<T>, q: &QParam<T>) -> Result<C<T>> {
    let s3 = cre(q.sqrt_qint(3));
    let den = cre(q.qpow(3)) * (b_plus + s3);
    if cabs(den).is_zero() {
        return Err(Error::Singular("b_plus = -sqrt([3])".into()));
    }
    let two = cre(T::from_f64(2.0));
    Ok(cre(q.qint(4)) * (two * b_plus + (cone::<T>() - b_plus * b_plus) * s3) / den)
}

pub fn omega_zero_scalar<T: Real>(b_plus: C<T>, q: &QParam<T>) -> Result<OmegaZero> {
    let bm = constraint_b_minus(b_plus, q)?;
    let fam = psi_family(b_plus, bm, q);
    let m = m_omega_zero(&fam, q);
    let scalar = m[(0, 0)];
    let trace_scalar = m.trace() / cre(T::from_f64(16.0));
    let off = &m - &CMat::identity(16).scale(scalar);
    let closed = omega_zero_closed_form(b_plus, q)?;
    let size = T::one().max(cabs(closed));
    let off_scalar = off.max_abs() / size;
    if off_scalar > T::from_f64(1e-8) {
        return Err(Error::ConventionFault(format!("m(omega_0) is not scalar (off-scalar part {:e})", off_scalar.to_f64())));
    }
    Ok(OmegaZero {
        scalar: cpair(scalar),
        trace_scalar: cpair(trace_scalar),
        closed_form: cpair(closed),
        off_scalar: off_scalar.to_f64(),
        closed_form_deviation: (cabs(scalar - closed) / size).to_f64(),
    })
}

/// Anticommutators `{ψ_i, ψ_j}` split into a scalar part `g_ij` (trace/16)
/// and the largest remainder.  Classically the remainder vanishes and `g`
/// is a nondegenerate pairing.
pub fn anticommutator_pairing<T: Real>(p: &PsiFamily<T>) -> (CMat<T>, T) {
    let mut g = CMat::zeros(8, 8);
    let mut rest = T::zero();
    let scale = p.full.iter().fold(T::zero(), |a, m| a.max(m.max_abs()));
    for i in 0..8 {
        for j in 0..8 {
            let a = p.full[i].anticommutator(&p.full[j]);
            let s = a.trace() / cre(T::from_f64(16.0));
            g[(i, j)] = s;
            rest = rest.max((&a - &CMat::identity(16).scale(s)).max_abs() / (scale * scale));
        }
    }
    (g, rest)
}

#[derive(Clone, Debug, Serialize)]
pub struct Su3Report {
    pub q: String,
    pub rep_relations: Vec<NamedResidual>,
    pub samples: usize,
    pub covariance_closure: f64,
    pub expansion_relations: f64,
    pub expansion_weights: f64,
    /// `R(x) P − P π(x)` with `P` fixed from the first sample.
    pub intertwiner_residual: f64,
    pub intertwiner_condition: f64,
    pub perturbed_closure: f64,
    pub b_minus_oracle: f64,
    pub psi1_square: f64,
    pub solutions: Vec<OmegaSolution>,
    pub z_match: f64,
    pub printed_match: f64,
    pub corrected_match: f64,
    pub solutions_conjugation_closed: bool,
    pub printed_conjugation_closed: bool,
    pub omega_zero: Vec<OmegaZero>,
    pub omega_zero_deviation: f64,
}

/// `b₊` samples: a fixed seeded draw from the square `[-2, 2]²`, skipping
/// the neighbourhood of the pole.
pub fn sample_b_plus<T: Real>(n: usize, seed: u64, q: &QParam<T>) -> Vec<C<T>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pole = -q.sqrt_qint(3).to_f64();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (re, im): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if ((re - pole).powi(2) + im * im).sqrt() > 0.1 {
            out.push(C::new(T::from_f64(re), T::from_f64(im)));
        }
    }
    out
}

/// Perturb one entry of `ψ⁺_{q,3}` (negative control for covariance).
pub fn perturb_psi3<T: Real>(p: &PsiFamily<T>, eps: T) -> PsiFamily<T> {
    let mut out = p.clone();
    out.plus[2][(0, 1)] += cre(eps);
    out.full[2][(0, 9)] += cre(eps);
    out
}

pub fn su3_report<T: Real>(q: &QParam<T>, samples: usize) -> Result<Su3Report> {
    let rep = adjoint_rep_su3(q);
    let rep_relations = su3_relations(&rep.e, &rep.f, &rep.k, q);
    let bs = sample_b_plus(samples, 20_110_601, q);
    let (mut closure, mut rel, mut wts, mut inter, mut cond) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut oracle, mut sq) = (0.0f64, 0.0f64);
    let mut p0: Option<CMat<T>> = None;
    let mut perturbed = 0.0;
    for (k, b) in bs.iter().enumerate() {
        let bm = constraint_b_minus(*b, q)?;
        let fam = psi_family(*b, bm, q);
        let (c, ex) = covariance(&fam, q)?;
        closure = closure.max(c.closure);
        rel = c.relations.iter().fold(rel, |a, r| a.max(r.residual));
        wts = wts.max(c.weight_residual);
        let p = match &p0 {
            Some(p) => p.clone(),
            None => {
                let p = intertwiner(&ex, q)?;
                p0 = Some(p.clone());
                p
            }
        };
        let (r, cnd) = intertwiner_residual(&ex, &p, q)?;
        inter = inter.max(r);
        cond = cond.max(cnd);
        let (bn, res) = solve_b_minus_numeric(*b, q)?;
        oracle = oracle.max((cabs(bn - bm) / (T::one() + cabs(bm))).to_f64());
        sq = sq.max(res.to_f64());
        if k == 0 {
            let bad = perturb_psi3(&fam, T::from_f64(1e-2));
            perturbed = covariance(&bad, q)?.0.closure;
        }
    }
    let solutions = solve_omega_rho(q)?;
    let worst = |f: fn(&OmegaSolution) -> f64| solutions.iter().map(f).fold(0.0, f64::max);
    let z_match = worst(|s| s.z_distance);
    let printed_match = worst(|s| s.printed_distance);
    let corrected_match = worst(|s| s.corrected_distance);
    let tol = T::from_f64(1e-12);
    let numeric_pairs: Vec<(C<T>, C<T>)> = solutions
        .iter()
        .map(|s| (C::new(T::from_f64(s.z[0]), T::from_f64(s.z[1])), C::new(T::from_f64(s.b_plus[0]), T::from_f64(s.b_plus[1]))))
        .collect();
    let printed_pairs: Vec<(C<T>, C<T>)> = omega_rho_closed_forms(q).into_iter().map(|(_, z, b)| (z, b)).collect();
    let solutions_conjugation_closed = solutions.len() == 4 && closed_under_conjugation(&numeric_pairs, tol);
    let printed_conjugation_closed = closed_under_conjugation(&printed_pairs, tol);
    let mut zero_points: Vec<C<T>> = vec![czero(), cone()];
    zero_points.extend(bs.iter().take(4));
    let omega_zero = zero_points.iter().map(|b| omega_zero_scalar(*b, q)).collect::<Result<Vec<_>>>()?;
    let omega_zero_deviation = omega_zero.iter().map(|o| o.closed_form_deviation).fold(0.0, f64::max);
    Ok(Su3Report {
        q: q.text().to_string(),
        rep_relations,
        samples,
        covariance_closure: closure,
        expansion_relations: rel,
        expansion_weights: wts,
        intertwiner_residual: inter,
        intertwiner_condition: cond,
        perturbed_closure: perturbed,
        b_minus_oracle: oracle,
        psi1_square: sq.max(solutions.iter().map(|s| s.psi1_square).fold(0.0, f64::max)),
        solutions,
        z_match,
        printed_match,
        corrected_match,
        solutions_conjugation_closed,
        printed_conjugation_closed,
        omega_zero,
        omega_zero_deviation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalLimit {
    pub q: String,
    pub b_plus: [f64; 2],
    pub b_minus: [f64; 2],
    /// Largest non-scalar part of `{ψ_i, ψ_j}`.
    pub anticommutator_remainder: f64,
    /// Smallest singular value of the pairing `g_ij`.
    pub pairing_min_singular: f64,
}

/// Near `q = 1` the `ω_ρ` branches all tend to `b₊ = ±i`, `b₋ = ∓i`; there the
/// generators should anticommute to scalars.
pub fn classical_limit<T: Real>(q: &QParam<T>, b_plus: C<T>) -> Result<ClassicalLimit> {
    let bm = constraint_b_minus(b_plus, q)?;
    let fam = psi_family(b_plus, bm, q);
    let (g, rest) = anticommutator_pairing(&fam);
    let sv = g.singular_values()?;
    Ok(ClassicalLimit {
        q: q.text().to_string(),
        b_plus: cpair(b_plus),
        b_minus: cpair(bm),
        anticommutator_remainder: rest.to_f64(),
        pairing_min_singular: sv.last().copied().unwrap_or_else(T::zero).to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Hp;
    use num_traits::Zero;

    fn qp(s: &str) -> QParam<Hp> {
        QParam::parse(s).unwrap()
    }

    fn c(re: f64, im: f64) -> C<Hp> {
        C::new(Hp::from_f64(re), Hp::from_f64(im))
    }

    #[test]
    fn adjoint_rep_relations() {
        for s in ["0.3", "0.7", "0.9"] {
            let q = qp(s);
            let rep = adjoint_rep_su3(&q);
            for r in su3_relations(&rep.e, &rep.f, &rep.k, &q) {
                assert!(r.residual < 1e-28, "{s}: {} {:e}", r.name, r.residual);
            }
            assert!(rep.e[0].commutator(&rep.f[1]).max_abs() < Hp::from_f64(1e-30));
        }
        let q = qp("0.5");
        let k1 = adjoint_rep_su3(&q).k[0].clone();
        let want = [q.spow(1), q.spow(-1), q.q(), Hp::from_f64(1.0), Hp::from_f64(1.0), q.qpow(-1), q.spow(1), q.spow(-1)];
        for (i, w) in want.iter().enumerate() {
            assert!((k1[(i, i)].re - *w).abs() < Hp::from_f64(1e-30));
        }
    }

    #[test]
    fn psi_entries_and_constraint() {
        let q = qp("0.7");
        let fam = psi_family(c(0.4, -0.1), c(0.2, 0.3), &q);
        assert_eq!(fam.plus[0][(0, 3)], cone());
        assert_eq!(fam.plus[3][(6, 6)], cone());
        assert_eq!(fam.full[0][(0, 11)], cone());
        assert!(fam.diagonal_block_leak().is_zero());
        let s3 = q.sqrt_qint(3);
        let b = constraint_b_minus(cre(Hp::from_f64(1.0) / s3), &q).unwrap();
        assert!(cabs(b) < Hp::from_f64(1e-30));
        let b = constraint_b_minus(czero(), &q).unwrap();
        assert!(cabs(b - cre(Hp::from_f64(1.0) / s3)) < Hp::from_f64(1e-30));
        assert!(constraint_b_minus(cre(-s3), &q).is_err());
        let (bn, res) = solve_b_minus_numeric(c(0.3, 0.2), &q).unwrap();
        let bc = constraint_b_minus(c(0.3, 0.2), &q).unwrap();
        assert!(cabs(bn - bc).to_f64() < 1e-20 && res.to_f64() < 1e-25);
    }

    #[test]
    fn covariance_closes_and_perturbation_breaks_it() {
        let q = qp("0.7");
        let b = c(0.3, 0.2);
        let fam = psi_family(b, constraint_b_minus(b, &q).unwrap(), &q);
        let (rep, ex) = covariance(&fam, &q).unwrap();
        assert!(rep.closure < 1e-25 && rep.weight_residual < 1e-25);
        assert!(rep.relations.iter().all(|r| r.residual < 1e-25));
        let p = intertwiner(&ex, &q).unwrap();
        let (res, cond) = intertwiner_residual(&ex, &p, &q).unwrap();
        assert!(res < 1e-25 && cond < 1e6);
        let bad = perturb_psi3(&fam, Hp::from_f64(1e-2));
        assert!(covariance(&bad, &q).unwrap().0.closure > 1e-4);
    }

    #[test]
    fn omega_rho_roots() {
        let q = qp("0.7");
        let sols = solve_omega_rho(&q).unwrap();
        assert_eq!(sols.len(), 4);
        for s in &sols {
            assert!(s.m_omega_residual < 1e-25 && s.psi1_square < 1e-25, "{s:?}");
            assert!(s.z_distance < 1e-25 && s.corrected_distance < 1e-25, "{s:?}");
        }
        // z' at q = 0.9: numerator 0.531441 + 0.81 + 1 = 2.341441
        let q9 = qp("0.9");
        let z1 = omega_rho_closed_forms(&q9)[0].1.re.to_f64();
        assert!((z1 - 2.341441 / ((0.531441 + 0.6561 + 1.0) * 0.6561)).abs() < 1e-12);
    }

    #[test]
    fn omega_zero_values() {
        let q = qp("0.5");
        let o = omega_zero_scalar(czero(), &q).unwrap();
        assert!((o.scalar[0] - 85.0).abs() < 1e-25 && o.scalar[1].abs() < 1e-25);
        assert!((o.trace_scalar[0] - o.scalar[0]).abs() < 1e-20);
        // numerator root of 2b + (1 - b²)√[3]
        let s3 = q.sqrt_qint(3);
        let root = (Hp::from_f64(1.0) + (Hp::from_f64(1.0) + s3 * s3).sqrt()) / s3;
        let o = omega_zero_scalar(cre(root), &q).unwrap();
        assert!(o.scalar[0].abs() < 1e-25);
    }

    #[test]
    fn classical_family() {
        let q: QParam<Hp> = QParam::parse("0.9999").unwrap();
        let lim = classical_limit(&q, c(0.0, 1.0)).unwrap();
        assert!(lim.anticommutator_remainder < 1e-3 && lim.pairing_min_singular > 1.0, "{lim:?}");
    }
}
