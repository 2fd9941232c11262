//! The quantum group U_q(2): coordinate algebra with a central unitary `C`,
//! the doubled spinor space and the block Dirac operator `D̂`.
//!
//! An element is stored as a map from the central charge `c` to its SU_q(2)
//! part, so the product reuses the SU_q(2) Clebsch–Gordan product and adds
//! charges.  On the Hilbert space the charge is one more basis label next to
//! the SU_q(2) spin label and the spinor sector `±`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coordalg::{generators, PwElement, PwIndex};
use crate::error::{Error, Result};
use crate::fit::LineFit;
use crate::half::HalfInt;
use crate::linalg::C;
use crate::operator::{Basis, BlockOperator};
use crate::qscalar::QParam;
use crate::scalar::{cabs, ci, cre, czero, Real};
use crate::spinhilbert::{isospectral_value, mult_down, mult_up, Arrow, SpinLabel, SpinorSpace};
use crate::uqsu2::{Gen, UqElement};

/// `t^{l,c}_{m,n}`; `l` and `c` are both integers or both half-odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PwIndexU2 {
    pub l: HalfInt,
    pub m: HalfInt,
    pub n: HalfInt,
    pub c: HalfInt,
}

impl PwIndexU2 {
    pub fn new(l: HalfInt, m: HalfInt, n: HalfInt, c: HalfInt) -> Result<Self> {
        PwIndex::new(l, m, n)?;
        if !l.same_parity(c) {
            return Err(Error::InvalidArgument(format!("charge {c} has the wrong parity for l = {l}")));
        }
        Ok(PwIndexU2 { l, m, n, c })
    }

    pub fn su(&self) -> PwIndex {
        PwIndex { l: self.l, m: self.m, n: self.n }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct U2Element<T> {
    parts: BTreeMap<HalfInt, PwElement<T>>,
}

impl<T: Real> U2Element<T> {
    pub fn zero() -> Self {
        U2Element { parts: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::charged(HalfInt::ZERO, PwElement::one())
    }

    /// `C^k` for integer `k`.
    pub fn central(k: i32) -> Self {
        Self::charged(HalfInt::int(k), PwElement::one())
    }

    pub fn basis(idx: PwIndexU2) -> Self {
        Self::charged(idx.c, PwElement::basis(idx.su()))
    }

    /// An SU_q(2) element placed at charge `c`; no parity check.
    pub fn charged(c: HalfInt, x: PwElement<T>) -> Self {
        let mut parts = BTreeMap::new();
        if !x.is_empty() {
            parts.insert(c, x);
        }
        U2Element { parts }
    }

    pub fn parts(&self) -> impl Iterator<Item = (&HalfInt, &PwElement<T>)> {
        self.parts.iter()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PwIndexU2, C<T>)> + '_ {
        self.parts
            .iter()
            .flat_map(|(c, x)| x.terms().map(move |(i, v)| (PwIndexU2 { l: i.l, m: i.m, n: i.n, c: *c }, *v)))
    }

    pub fn coeff(&self, idx: &PwIndexU2) -> C<T> {
        self.parts.get(&idx.c).map(|x| x.coeff(&idx.su())).unwrap_or_else(czero)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn max_abs(&self) -> T {
        self.parts.values().fold(T::zero(), |a, x| a.max(x.max_abs()))
    }

    pub fn degree(&self) -> HalfInt {
        self.parts.values().map(|x| x.degree()).max().unwrap_or(HalfInt::ZERO)
    }

    /// Every term has `l ≡ c` mod 1.
    pub fn parity_ok(&self) -> bool {
        self.terms().all(|(i, _)| i.l.same_parity(i.c))
    }

    fn combine(&self, other: &Self, f: impl Fn(&PwElement<T>, &PwElement<T>) -> PwElement<T>) -> Self {
        let mut parts = self.parts.clone();
        for (c, y) in &other.parts {
            let x = parts.remove(c).unwrap_or_else(PwElement::zero);
            let z = f(&x, y);
            if !z.is_empty() {
                parts.insert(*c, z);
            }
        }
        U2Element { parts }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x.add(y))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x.sub(y))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        U2Element { parts: self.parts.iter().map(|(c, x)| (*c, x.scale(s))).filter(|(_, x)| !x.is_empty()).collect() }
    }

    /// Clebsch–Gordan product on the SU_q(2) parts, charges add.
    pub fn multiply(&self, other: &Self, q: &QParam<T>) -> Result<Self> {
        if !self.parity_ok() || !other.parity_ok() {
            return Err(Error::InvalidArgument("factor violates the l = c mod 1 rule".into()));
        }
        let mut out = Self::zero();
        for (c1, x) in &self.parts {
            for (c2, y) in &other.parts {
                out = out.add(&Self::charged(*c1 + *c2, x.multiply(y, q)?));
            }
        }
        debug_assert!(out.parity_ok());
        Ok(out)
    }

    /// `(t^{l,c}_{m,n})* = (−1)^{2l+m+n} q^{n−m} t^{l,−c}_{−m,−n}`.
    pub fn involution(&self, q: &QParam<T>) -> Self {
        let mut out = Self::zero();
        for (c, x) in &self.parts {
            out = out.add(&Self::charged(-*c, x.involution(q)));
        }
        out
    }

    /// `ĥ(t^{l,c}_{m,n}) = δ_{c,0} h(t^l_{m,n})`.
    pub fn haar(&self) -> C<T> {
        self.parts.get(&HalfInt::ZERO).map(|x| x.haar()).unwrap_or_else(czero)
    }
}

/// `ĥ(x* y)`.
pub fn u2_inner<T: Real>(x: &U2Element<T>, y: &U2Element<T>, q: &QParam<T>) -> Result<C<T>> {
    Ok(x.involution(q).multiply(y, q)?.haar())
}

#[derive(Clone, Debug)]
pub struct U2Generators<T> {
    pub a: U2Element<T>,
    pub b: U2Element<T>,
    pub a_star: U2Element<T>,
    pub b_star: U2Element<T>,
    pub c: U2Element<T>,
    pub c_star: U2Element<T>,
}

/// `a = t^{½,½}_{½,½}`, `b = t^{½,½}_{½,−½}`, `C = t^{0,1}_{0,0}` and their adjoints.
pub fn u2_generators<T: Real>(q: &QParam<T>) -> U2Generators<T> {
    let g = generators(q);
    let h = HalfInt::HALF;
    U2Generators {
        a: U2Element::charged(h, g.a),
        b: U2Element::charged(h, g.b),
        a_star: U2Element::charged(-h, g.a_star),
        b_star: U2Element::charged(-h, g.b_star),
        c: U2Element::central(1),
        c_star: U2Element::central(-1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sector {
    Plus,
    Minus,
}

/// `|j μ n ↑/↓ c ±⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpinLabelU2 {
    pub c: HalfInt,
    pub sector: Sector,
    pub spin: SpinLabel,
}

/// `n_{j,c} = √((2j + 3/2)² + c²)`.
pub fn n_jc<T: Real>(j: HalfInt, c: HalfInt) -> T {
    let x = T::from_f64(2.0 * j.to_f64() + 1.5);
    let c = T::from_f64(c.to_f64());
    (x * x + c * c).sqrt()
}

/// `|D̂|` on a basis vector: `n_{j,c}` on `↑`, `n_{j−½,c}` on `↓`.
pub fn abs_dirac_value<T: Real>(lab: &SpinLabelU2) -> T {
    match lab.spin.arrow {
        Arrow::Up => n_jc(lab.spin.j, lab.c),
        Arrow::Down => n_jc(lab.spin.j - HalfInt::HALF, lab.c),
    }
}

/// Truncated `L²(U_q(2)) ⊗ Σ̂`: all `j ≤ l_max`, `|c| ≤ c_max`, `c ≡ j`.
pub struct U2Space<T> {
    su: SpinorSpace<T>,
    c_max: HalfInt,
    basis: Basis<SpinLabelU2>,
    /// position of each label's SU_q(2) part in the SU_q(2) spin basis
    su_index: Vec<usize>,
}

impl<T: Real> U2Space<T> {
    pub fn new(l_max: HalfInt, c_max: HalfInt, q: &QParam<T>) -> Result<Self> {
        if c_max.twice() < 0 {
            return Err(Error::InvalidArgument("c_max must be non-negative".into()));
        }
        let su = SpinorSpace::new(l_max, q)?;
        let mut labels = Vec::new();
        let mut su_index = Vec::new();
        for tc in -c_max.twice()..=c_max.twice() {
            let c = HalfInt::from_twice(tc);
            for sector in [Sector::Plus, Sector::Minus] {
                for (k, spin) in su.spin_basis().labels().iter().enumerate() {
                    if spin.j.same_parity(c) {
                        labels.push(SpinLabelU2 { c, sector, spin: *spin });
                        su_index.push(k);
                    }
                }
            }
        }
        Ok(U2Space { su, c_max, basis: Basis::new(labels), su_index })
    }

    pub fn su(&self) -> &SpinorSpace<T> {
        &self.su
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Basis<SpinLabelU2> {
        &self.basis
    }

    pub fn c_max(&self) -> HalfInt {
        self.c_max
    }

    /// Labels at least `margin_j` below `l_max` and `margin_c` inside the charge window.
    pub fn interior(&self, margin_j: HalfInt, margin_c: HalfInt) -> Vec<bool> {
        let jcut = self.su.l_max().twice() - margin_j.twice();
        let ccut = self.c_max.twice() - margin_c.twice();
        self.basis.labels().iter().map(|l| l.spin.j.twice() <= jcut && l.c.twice().abs() <= ccut).collect()
    }

    /// `op` (in the SU_q(2) spin basis) acting on every sector, shifting the charge by `shift`.
    pub fn lift(&self, op: &BlockOperator<T>, shift: HalfInt) -> BlockOperator<T> {
        let mut by_su: Vec<Vec<usize>> = vec![Vec::new(); self.su.dim()];
        for (i, k) in self.su_index.iter().enumerate() {
            by_su[*k].push(i);
        }
        let su_labels = self.su.spin_basis().labels();
        let mut trip = Vec::new();
        for (row_su, col_su, v) in op.triplets() {
            for &col in &by_su[col_su] {
                let lab = &self.basis.labels()[col];
                let row_lab = SpinLabelU2 { c: lab.c + shift, sector: lab.sector, spin: su_labels[row_su] };
                if let Some(row) = self.basis.get(&row_lab) {
                    trip.push((row, col, v));
                }
            }
        }
        BlockOperator::from_triplets(self.dim(), trip)
    }

    /// `ρ̂(t)`: the SU_q(2) GNS action on each charge part, shifting `c`.
    pub fn rho_hat(&self, t: &U2Element<T>) -> Result<BlockOperator<T>> {
        let mut out = BlockOperator::zeros(self.dim());
        for (c, x) in t.parts() {
            let su = self.su.to_spin(&self.su.rho(x)?);
            out = out.add(&self.lift(&su, *c));
        }
        Ok(out)
    }

    /// The U_q(su₂) symmetry on the SU_q(2) factor, charge and sector untouched.
    pub fn symmetry(&self, x: &UqElement<T>) -> BlockOperator<T> {
        self.lift(&self.su.to_spin(&self.su.symmetry(x)), HalfInt::ZERO)
    }

    /// `D̂ = (0, iD + c; −iD + c, 0)` in the `(+, −)` sectors, `D` the isospectral operator.
    pub fn dirac(&self) -> BlockOperator<T> {
        let mut trip = Vec::new();
        for (i, lab) in self.basis.labels().iter().enumerate() {
            let d: T = isospectral_value(&lab.spin);
            let c = cre(T::from_f64(lab.c.to_f64()));
            let (other, v) = match lab.sector {
                // column in the + sector feeds the − row: −iD + c
                Sector::Plus => (Sector::Minus, c - ci::<T>() * cre(d)),
                Sector::Minus => (Sector::Plus, c + ci::<T>() * cre(d)),
            };
            let row = self.basis.get(&SpinLabelU2 { sector: other, ..*lab }).expect("both sectors present");
            trip.push((row, i, v));
        }
        BlockOperator::from_triplets(self.dim(), trip)
    }

    /// `|D̂| = √(D² + c²)`, diagonal in this basis.
    pub fn abs_dirac(&self) -> BlockOperator<T> {
        let d: Vec<T> = self.basis.labels().iter().map(abs_dirac_value).collect();
        BlockOperator::diagonal_real(&d)
    }

    /// `γ = diag(1, −1)` on the sectors.
    pub fn chirality(&self) -> BlockOperator<T> {
        let d: Vec<T> = self
            .basis
            .labels()
            .iter()
            .map(|l| if l.sector == Sector::Plus { T::one() } else { -T::one() })
            .collect();
        BlockOperator::diagonal_real(&d)
    }

    /// `P̂↑` and `P̂↓`: the arrow projections (positive / negative part of `D`).
    pub fn arrow_mask(&self, arrow: Arrow) -> Vec<bool> {
        self.basis.labels().iter().map(|l| l.spin.arrow == arrow).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AbsSpectrum {
    /// Worst `||λ| − n|` over interior eigenvalues of `D̂`, matched by label.
    pub deviation: f64,
    /// Worst deviation of the functional-calculus `√(D̂²)` from the diagonal closed form.
    pub functional_calculus: f64,
    pub interior_dim: usize,
}

/// Eigenvalues of `D̂` (numerically, per 2×2 block) against `±n_{j,c}`.
pub fn abs_spectrum<T: Real>(space: &U2Space<T>, keep: &[bool]) -> Result<AbsSpectrum> {
    let d = space.dirac();
    let mut worst = T::zero();
    for (val, vec) in d.eigensystem()? {
        // all weight of an eigenvector sits on one (j, n, μ, arrow, c) pair of sectors
        let (i, _) = vec.iter().fold((0usize, T::zero()), |acc, (i, v)| if cabs(*v) > acc.1 { (*i, cabs(*v)) } else { acc });
        if !keep[i] {
            continue;
        }
        let want: T = abs_dirac_value(&space.basis().labels()[i]);
        worst = worst.max((val.abs() - want).abs());
    }
    let sq = d.mul(&d);
    let root = sq.hermitian_fn(|x| x.max(T::zero()).sqrt())?;
    let fc = root.sub(&space.abs_dirac()).max_abs_on(keep);
    Ok(AbsSpectrum {
        deviation: worst.to_f64(),
        functional_calculus: fc.to_f64(),
        interior_dim: keep.iter().filter(|k| **k).count(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub generator: String,
    pub order: u32,
    pub norm_small: f64,
    pub norm_large: f64,
    pub drift: f64,
    /// Same-arrow part of `δ^p` against the `(n − n)^p`-weighted closed form.
    pub display_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Uq2Report {
    pub q: String,
    pub two_j_max: i32,
    pub two_c_max: i32,
    pub dim: usize,
    pub parity_violations: usize,
    pub abs_spectrum: AbsSpectrum,
    pub chirality_anticommutator: f64,
    pub chirality_commutes: f64,
    pub hermitian_defect: f64,
    pub central_commutator: f64,
    pub central_isometry: f64,
    pub c_commutes_with_a: f64,
    pub sector_symmetry: f64,
    pub equivariance: f64,
    pub commutator_norms: Vec<(String, f64, f64, f64)>,
    pub probes: Vec<ProbeRow>,
    pub delta_d_commute: f64,
    pub offdiag_decay: LineFit,
    pub dimension: DimensionFit,
}

/// `δ(X) = [|D̂|, X]` with `|D̂|` diagonal, iterated by explicit commutators.
pub fn delta_pow<T: Real>(abs: &BlockOperator<T>, x: &BlockOperator<T>, p: u32) -> BlockOperator<T> {
    let mut y = x.clone();
    for _ in 0..p {
        y = abs.commutator(&y);
    }
    y
}

/// The same-arrow part of `X` weighted by `(n_row − n_col)^p` from the closed form.
fn displayed_form<T: Real>(space: &U2Space<T>, x: &BlockOperator<T>, p: u32) -> BlockOperator<T> {
    let labs = space.basis().labels();
    BlockOperator::from_triplets(
        space.dim(),
        x.triplets()
            .filter(|(i, j, _)| labs[*i].spin.arrow == labs[*j].spin.arrow)
            .map(|(i, j, v)| {
                let w = abs_dirac_value::<T>(&labs[i]) - abs_dirac_value::<T>(&labs[j]);
                (i, j, v * cre(w.powi(p as i32)))
            })
            .collect::<Vec<_>>(),
    )
}

fn same_arrow_part<T: Real>(space: &U2Space<T>, x: &BlockOperator<T>, same: bool) -> BlockOperator<T> {
    let labs = space.basis().labels();
    BlockOperator::from_triplets(
        space.dim(),
        x.triplets().filter(|(i, j, _)| (labs[*i].spin.arrow == labs[*j].spin.arrow) == same).collect::<Vec<_>>(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionFit {
    pub lambda: f64,
    pub exponent: f64,
    pub r2: f64,
    pub half_lambda_exponent: f64,
    pub su2_exponent: f64,
    /// Closed-form count against the eigenvalues of the truncated `|D̂|` where the ball fits.
    pub count_mismatch: usize,
}

/// `N(Λ) = #{eigenvalues of |D̂| ≤ Λ}` with multiplicity, from the closed form.
/// `with_charge = false` keeps only `c = 0` (the SU_q(2) count).
pub fn closed_form_count(lambda: f64, with_charge: bool) -> u64 {
    let mut total = 0u64;
    let mut tj = 0i32;
    loop {
        let j = HalfInt::from_twice(tj);
        if n_jc::<f64>(j - HalfInt::HALF, HalfInt::ZERO) > lambda && tj > 0 {
            break;
        }
        let tc_max = if with_charge { (2.0 * lambda).floor() as i32 } else { 0 };
        for tc in -tc_max..=tc_max {
            let c = HalfInt::from_twice(tc);
            if !c.same_parity(j) {
                continue;
            }
            // two spinor sectors
            if n_jc::<f64>(j, c) <= lambda {
                total += 2 * mult_up(j) as u64;
            }
            if tj > 0 && n_jc::<f64>(j - HalfInt::HALF, c) <= lambda {
                total += 2 * mult_down(j) as u64;
            }
        }
        tj += 1;
    }
    total
}

fn count_fit(lambda: f64, with_charge: bool) -> Result<LineFit> {
    let xs: Vec<f64> = (10..=40).map(|k| lambda * k as f64 / 40.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| closed_form_count(*x, with_charge) as f64).collect();
    LineFit::loglog(&xs, &ys)
}

pub fn dimension_fit<T: Real>(space: &U2Space<T>, lambda: f64) -> Result<DimensionFit> {
    let full = count_fit(lambda, true)?;
    let half = count_fit(lambda / 2.0, true)?;
    let su2 = count_fit(lambda, false)?;
    // the ball n ≤ Λ0 fits in the window when Λ0 < 2 l_max + 3/2 and Λ0 < c_max
    let cap = (2.0 * space.su().l_max().to_f64() + 1.5).min(space.c_max().to_f64() + 0.5);
    let eig: Vec<f64> = space.basis().labels().iter().map(|l| abs_dirac_value::<f64>(l)).collect();
    let mut mismatch = 0;
    let mut x = 1.5;
    while x < cap {
        let numeric = eig.iter().filter(|e| **e <= x + 1e-12).count() as u64;
        if numeric != closed_form_count(x, true) {
            mismatch += 1;
        }
        x += 0.25;
    }
    Ok(DimensionFit {
        lambda,
        exponent: full.slope,
        r2: full.r2,
        half_lambda_exponent: half.slope,
        su2_exponent: su2.slope,
        count_mismatch: mismatch,
    })
}

fn gen_name(i: usize) -> &'static str {
    ["a", "b", "C"][i]
}

pub fn uq2_report<T: Real>(q: &QParam<T>, l_max: HalfInt, c_max: HalfInt, probe_order: u32) -> Result<Uq2Report> {
    let small = U2Space::new(l_max, c_max, q)?;
    let large = U2Space::new(l_max + HalfInt::ONE, c_max, q)?;
    let g = u2_generators(q);
    let one = HalfInt::ONE;

    // parity over a batch of products of generators
    let pool = [&g.a, &g.b, &g.a_star, &g.b_star, &g.c, &g.c_star];
    let mut parity_violations = 0;
    for x in pool {
        for y in pool {
            for z in pool {
                let p = x.multiply(y, q)?.multiply(z, q)?;
                if !p.parity_ok() {
                    parity_violations += 1;
                }
            }
        }
    }

    let keep = small.interior(one, one);
    let abs_spectrum = abs_spectrum(&small, &keep)?;
    let d = small.dirac();
    let gamma = small.chirality();
    let chirality_anticommutator = gamma.anticommutator(&d).max_abs().to_f64();
    let hermitian_defect = d.hermitian_defect().to_f64();
    let rho: Vec<BlockOperator<T>> = [&g.a, &g.b, &g.c].iter().map(|t| small.rho_hat(t)).collect::<Result<_>>()?;
    let chirality_commutes = rho.iter().map(|r| gamma.commutator(r).max_abs().to_f64()).fold(0.0, f64::max);

    // [D̂, ρ̂(C)] = offdiag(1,1) ρ̂(C)
    let swap = small.dirac_swap();
    let rc = &rho[2];
    let central_commutator = d.commutator(rc).sub(&swap.mul(rc)).max_abs_on(&keep).to_f64();
    let id = BlockOperator::identity(small.dim());
    let central_isometry = rc.adjoint().mul(rc).sub(&id).max_abs_on(&keep).to_f64();
    let c_commutes_with_a = rc.commutator(&rho[0]).max_abs_on(&keep).to_f64();

    // sector blocks of ρ̂ identical
    let labs = small.basis().labels();
    let mut sector_symmetry = T::zero();
    for r in &rho {
        for (i, j, v) in r.triplets() {
            if labs[i].sector == Sector::Plus {
                let flip = |l: &SpinLabelU2| small.basis().get(&SpinLabelU2 { sector: Sector::Minus, ..*l }).unwrap();
                sector_symmetry = sector_symmetry.max(cabs(r.get(flip(&labs[i]), flip(&labs[j])) - v));
            }
        }
    }

    let mut equivariance = T::zero();
    for gen in Gen::ALL {
        let s = small.symmetry(&UqElement::gen(gen));
        equivariance = equivariance.max(d.commutator(&s).max_abs_on(&keep));
    }

    // commutator norms and δ^p probes at two truncations
    let mut commutator_norms = Vec::new();
    let mut probes = Vec::new();
    let abs_s = small.abs_dirac();
    let abs_l = large.abs_dirac();
    let d_l = large.dirac();
    let mut delta_d_commute = T::zero();
    for (k, t) in [&g.a, &g.b, &g.c].iter().enumerate() {
        let dl = t.degree();
        let dc = HalfInt::ONE;
        let ks = small.interior(dl, dc);
        let kl = large.interior(dl, dc);
        let rs = &rho[k];
        let rl = large.rho_hat(t)?;
        let ns = d.commutator(rs).op_norm_on(&ks)?.to_f64();
        let nl = d_l.commutator(&rl).op_norm_on(&kl)?.to_f64();
        commutator_norms.push((gen_name(k).to_string(), ns, nl, (nl - ns).abs() / ns));
        for p in 1..=probe_order {
            let xs = delta_pow(&abs_s, rs, p);
            let xl = delta_pow(&abs_l, &rl, p);
            let ns = xs.op_norm_on(&ks)?.to_f64();
            let nl = xl.op_norm_on(&kl)?.to_f64();
            let shown = displayed_form(&small, rs, p);
            let display_residual = same_arrow_part(&small, &xs, true).sub(&shown).max_abs_on(&ks).to_f64();
            probes.push(ProbeRow {
                generator: gen_name(k).to_string(),
                order: p,
                norm_small: ns,
                norm_large: nl,
                drift: if ns > 0.0 { (nl - ns).abs() / ns } else { 0.0 },
                display_residual,
            });
        }
        // δ([D̂, X]) = [D̂, δ(X)]
        let lhs = abs_s.commutator(&d.commutator(rs));
        let rhs = d.commutator(&abs_s.commutator(rs));
        delta_d_commute = delta_d_commute.max(lhs.sub(&rhs).max_abs_on(&ks));
    }

    // the ↑↓ part of ρ̂(a), per level j: should fall off geometrically
    let cross = same_arrow_part(&large, &large.rho_hat(&g.a)?, false);
    let kl = large.interior(one, one);
    let labs_l = large.basis().labels();
    let mut level: BTreeMap<i32, T> = BTreeMap::new();
    for (i, j, v) in cross.triplets() {
        if kl[i] && kl[j] {
            let e = level.entry(labs_l[j].spin.j.twice()).or_insert_with(T::zero);
            *e = e.max(cabs(v));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        level.iter().filter(|(_, v)| v.to_f64() > 0.0).map(|(tj, v)| (*tj as f64 / 2.0, v.to_f64())).unzip();
    let offdiag_decay = LineFit::semilog(&xs, &ys)?;

    let dimension = dimension_fit(&small, 20.0)?;
    Ok(Uq2Report {
        q: q.text().to_string(),
        two_j_max: l_max.twice(),
        two_c_max: c_max.twice(),
        dim: small.dim(),
        parity_violations,
        abs_spectrum,
        chirality_anticommutator,
        chirality_commutes,
        hermitian_defect,
        central_commutator,
        central_isometry,
        c_commutes_with_a,
        sector_symmetry: sector_symmetry.to_f64(),
        equivariance: equivariance.to_f64(),
        commutator_norms,
        probes,
        delta_d_commute: delta_d_commute.to_f64(),
        offdiag_decay,
        dimension,
    })
}

impl<T: Real> U2Space<T> {
    /// `(0 1; 1 0)` on the sectors.
    pub fn dirac_swap(&self) -> BlockOperator<T> {
        let trip: Vec<(usize, usize, C<T>)> = self
            .basis
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let other = if l.sector == Sector::Plus { Sector::Minus } else { Sector::Plus };
                (self.basis.get(&SpinLabelU2 { sector: other, ..*l }).unwrap(), i, cre(T::one()))
            })
            .collect();
        BlockOperator::from_triplets(self.dim(), trip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use proptest::prelude::*;
    use qd::Quad;

    fn q(s: &str) -> QParam<Quad> {
        QParam::parse(s).unwrap()
    }

    fn tol(x: f64) -> Quad {
        Quad::from_f64(x)
    }

    fn idx(l: i32, m: i32, n: i32, c: i32) -> PwIndexU2 {
        let h = HalfInt::from_twice;
        PwIndexU2::new(h(l), h(m), h(n), h(c)).unwrap()
    }

    #[test]
    fn algebra_examples() {
        let q = q("0.5");
        let g = u2_generators(&q);
        let cc = g.c.multiply(&g.c_star, &q).unwrap();
        assert!(cc.sub(&U2Element::one()).max_abs() < tol(1e-30));
        assert!(g.c.involution(&q).sub(&g.c_star).max_abs() < tol(1e-30));

        let t = U2Element::basis(idx(2, 0, 2, 4));
        let h = u2_inner(&t, &t, &q).unwrap();
        assert!(cabs(h - cre(Quad::ONE / q.qint(3))) < tol(1e-30), "{h:?}");
        // nonzero charge integrates to zero
        assert!(t.haar().norm_sqr() < tol(1e-60));

        // C is central
        let ca = g.c.multiply(&g.a, &q).unwrap();
        assert!(ca.sub(&g.a.multiply(&g.c, &q).unwrap()).max_abs() < tol(1e-30));
        assert_eq!(ca.terms().next().unwrap().0.c, HalfInt::from_twice(3));

        // SU_q(2) relation a a* + b b* = 1 survives with charges cancelling
        let s = g.a.multiply(&g.a_star, &q).unwrap().add(&g.b.multiply(&g.b_star, &q).unwrap());
        assert!(s.sub(&U2Element::one()).max_abs() < tol(1e-29));

        assert!(PwIndexU2::new(HalfInt::ONE, HalfInt::ZERO, HalfInt::ZERO, HalfInt::HALF).is_err());
        let bad = U2Element::charged(HalfInt::ZERO, crate::coordalg::generators(&q).a);
        assert!(bad.multiply(&g.a, &q).is_err());
    }

    fn element(raw: &[(u8, i8, f64, f64)], q: &QParam<Quad>) -> U2Element<Quad> {
        let g = u2_generators(q);
        let pool = [&g.a, &g.b, &g.a_star, &g.b_star];
        let mut out = U2Element::zero();
        for (k, shift, re, im) in raw {
            let t = pool[*k as usize % 4].multiply(&U2Element::central(*shift as i32), q).unwrap();
            out = out.add(&t.scale(Complex::new(tol(*re), tol(*im))));
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn involution_and_parity(
            x in prop::collection::vec((0u8..4, -2i8..3, -2.0f64..2.0, -2.0f64..2.0), 1..4),
            y in prop::collection::vec((0u8..4, -2i8..3, -2.0f64..2.0, -2.0f64..2.0), 1..4),
        ) {
            let q = q("0.7");
            let x = element(&x, &q);
            let y = element(&y, &q);
            prop_assert!(x.involution(&q).involution(&q).sub(&x).max_abs() < tol(1e-29));
            let xy = x.multiply(&y, &q).unwrap();
            prop_assert!(xy.parity_ok());
            let xyz = xy.multiply(&x.involution(&q), &q).unwrap();
            prop_assert!(xyz.parity_ok());
            let lhs = xy.involution(&q);
            let rhs = y.involution(&q).multiply(&x.involution(&q), &q).unwrap();
            prop_assert!(lhs.sub(&rhs).max_abs() < tol(1e-28));
            // faithfulness of ĥ on the span
            prop_assume!(!x.is_zero());
            prop_assert!(u2_inner(&x, &x, &q).unwrap().re > Quad::ZERO);
        }
    }

    #[test]
    fn small_space_operators() {
        let q = q("0.4");
        let sp = U2Space::new(HalfInt::from_twice(3), HalfInt::from_twice(4), &q).unwrap();
        assert!(sp.basis().labels().iter().all(|l| l.c.same_parity(l.spin.j)));
        let keep = sp.interior(HalfInt::ONE, HalfInt::ONE);
        let spec = abs_spectrum(&sp, &keep).unwrap();
        assert!(spec.deviation < 1e-28 && spec.functional_calculus < 1e-28);

        // j = 0, c = 0, ↑: 3/2
        let i = sp
            .basis()
            .labels()
            .iter()
            .position(|l| l.spin.j == HalfInt::ZERO && l.c == HalfInt::ZERO && l.spin.arrow == Arrow::Up)
            .unwrap();
        assert!((abs_dirac_value::<Quad>(&sp.basis().labels()[i]) - tol(1.5)).abs() < tol(1e-30));

        let d = sp.dirac();
        let gamma = sp.chirality();
        assert!(gamma.anticommutator(&d).max_abs() < tol(1e-30));
        assert!(d.mul(&d).sub(&sp.abs_dirac().mul(&sp.abs_dirac())).max_abs() < tol(1e-28));

        let g = u2_generators(&q);
        let rc = sp.rho_hat(&g.c).unwrap();
        let lhs = d.commutator(&rc);
        assert!(lhs.sub(&sp.dirac_swap().mul(&rc)).max_abs_on(&keep) < tol(1e-28));
        let ra = sp.rho_hat(&g.a).unwrap();
        assert!(rc.commutator(&ra).max_abs_on(&keep) < tol(1e-28));
        assert!(gamma.commutator(&ra).max_abs() < tol(1e-30));
        // ρ̂ is a *-representation on the interior
        let ras = sp.rho_hat(&g.a_star).unwrap();
        assert!(ras.sub(&ra.adjoint()).max_abs_on(&keep) < tol(1e-28));
        let prod = sp.rho_hat(&g.a.multiply(&g.c, &q).unwrap()).unwrap();
        assert!(prod.sub(&ra.mul(&rc)).max_abs_on(&keep) < tol(1e-28));

        // δ(ρ̂(C)) is bounded by 1
        let n = delta_pow(&sp.abs_dirac(), &rc, 1).op_norm_on(&keep).unwrap();
        assert!(n <= Quad::ONE && n > Quad::ZERO);
    }

    #[test]
    fn dimension_count() {
        assert_eq!(closed_form_count(1.5, true), 2 * 2);
        // below 2.6: j=0 ↑ at c=0,±1,±2 (2 each); j=½ ↑ at c=±½ (6 each), ↓ at c=±½,±3/2 (2 each);
        // j=1 ↓ at c=0 (6); doubled by sectors
        assert_eq!(closed_form_count(2.6, true), 2 * (5 * 2 + 2 * 6 + 4 * 2 + 6));
        assert_eq!(closed_form_count(2.6, false), 2 * (2 + 6));
        let q = q("0.5");
        let sp = U2Space::new(HalfInt::from_twice(4), HalfInt::from_twice(6), &q).unwrap();
        let fit = dimension_fit(&sp, 20.0).unwrap();
        assert!((3.7..=4.3).contains(&fit.exponent), "{fit:?}");
        assert!((fit.exponent - fit.half_lambda_exponent).abs() < 0.2);
        assert!((fit.su2_exponent - 3.0).abs() < 0.2);
        assert_eq!(fit.count_mismatch, 0);
    }
}
