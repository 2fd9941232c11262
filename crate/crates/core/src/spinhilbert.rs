//! The spinor space `L²(SU_q(2)) ⊗ C²`, truncated at `l <= l_max`, in the product
//! basis `|l m n> ⊗ |s>` and in the spin basis `|j μ n ↑/↓>` obtained by coupling
//! `V_l ⊗ V_{1/2}`.

use serde::Serialize;

use crate::coordalg::{left_multiplication, pw_labels, PwElement, PwIndex, Truncation};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::linalg::{CMat, C};
use crate::operator::{Basis, BlockOperator};
use crate::qscalar::QParam;
use crate::scalar::{cre, Real};
use crate::uqsu2::{cg_table, irrep_matrix, Gen, UqElement};

/// `|l m n> ⊗ |s>` with spinor weight `s = ±1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProdLabel {
    pub l: HalfInt,
    pub n: HalfInt,
    pub m: HalfInt,
    pub s: HalfInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Arrow {
    Up,
    Down,
}

impl Arrow {
    pub fn symbol(self) -> &'static str {
        match self {
            Arrow::Up => "up",
            Arrow::Down => "down",
        }
    }
}

/// `|j μ n ↑>` spans `V_{j+1/2}`, `|j μ n ↓>` spans `V_{j-1/2}`; `j` is the `L²` spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpinLabel {
    pub j: HalfInt,
    pub n: HalfInt,
    pub arrow: Arrow,
    pub mu: HalfInt,
}

impl SpinLabel {
    /// Spin of the irreducible block this vector lies in.
    pub fn coupled(&self) -> HalfInt {
        match self.arrow {
            Arrow::Up => self.j + HalfInt::HALF,
            Arrow::Down => self.j - HalfInt::HALF,
        }
    }
}

/// Multiplicity of the `↑` eigenvalue at level `j`: `(2j+2)(2j+1)`.
pub fn mult_up(j: HalfInt) -> usize {
    let t = j.twice() as usize;
    (t + 2) * (t + 1)
}

/// Multiplicity of the `↓` eigenvalue at level `j`: `2j(2j+1)`.
pub fn mult_down(j: HalfInt) -> usize {
    let t = j.twice() as usize;
    t * (t + 1)
}

/// 2×2 matrix of `U_q(su2)` elements in display order (row/column 0 is `↑ = +1/2`).
pub type SpinorEntries<T> = [[UqElement<T>; 2]; 2];

/// Spinor index in the ascending-weight basis for a display row.
fn spinor_index(display: usize) -> usize {
    1 - display
}

/// Reorder a 2×2 matrix between display order and ascending weight order.
pub fn flip2<T: Real>(m: &CMat<T>) -> CMat<T> {
    CMat::from_fn(2, 2, |i, j| m[(1 - i, 1 - j)])
}

#[derive(Clone, Debug)]
pub struct SpinorSpace<T> {
    q: QParam<T>,
    l_max: HalfInt,
    product: Basis<ProdLabel>,
    spin: Basis<SpinLabel>,
    /// Columns are spin vectors written in the product basis.
    u: BlockOperator<T>,
    pw: Basis<PwIndex>,
}

impl<T: Real> SpinorSpace<T> {
    pub fn new(l_max: HalfInt, q: &QParam<T>) -> Result<Self> {
        if l_max.twice() < 0 {
            return Err(Error::Truncation(format!("l_max = {l_max}")));
        }
        let pw = Basis::new(pw_labels(l_max));
        let mut prod = Vec::with_capacity(2 * pw.len());
        for i in pw.labels() {
            for s in [-HalfInt::HALF, HalfInt::HALF] {
                prod.push(ProdLabel { l: i.l, n: i.n, m: i.m, s });
            }
        }
        let product = Basis::new(prod);
        let mut spin = Vec::with_capacity(product.len());
        let mut trip = Vec::new();
        for tl in 0..=l_max.twice() {
            let l = HalfInt::from_twice(tl);
            let table = cg_table(l, HalfInt::HALF, q)?;
            for n in l.range_sym() {
                for arrow in [Arrow::Up, Arrow::Down] {
                    let p = match arrow {
                        Arrow::Up => l + HalfInt::HALF,
                        Arrow::Down if tl > 0 => l - HalfInt::HALF,
                        Arrow::Down => continue,
                    };
                    for mu in p.range_sym() {
                        let col = spin.len();
                        spin.push(SpinLabel { j: l, n, arrow, mu });
                        for s in [-HalfInt::HALF, HalfInt::HALF] {
                            let m = mu - s;
                            if m.twice().abs() > tl {
                                continue;
                            }
                            let c = table.coeff(p, m, s);
                            let row = product.get(&ProdLabel { l, n, m, s }).expect("label in range");
                            trip.push((row, col, cre(c)));
                        }
                    }
                }
            }
        }
        let spin = Basis::new(spin);
        if spin.len() != product.len() {
            return Err(Error::Multiplicity(format!("spin basis has {} vectors, product basis {}", spin.len(), product.len())));
        }
        let u = BlockOperator::from_triplets(product.len(), trip);
        Ok(SpinorSpace { q: q.clone(), l_max, product, spin, u, pw })
    }

    pub fn q(&self) -> &QParam<T> {
        &self.q
    }

    pub fn l_max(&self) -> HalfInt {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        self.product.len()
    }

    pub fn product_basis(&self) -> &Basis<ProdLabel> {
        &self.product
    }

    pub fn spin_basis(&self) -> &Basis<SpinLabel> {
        &self.spin
    }

    /// The decomposition map, columns indexed by the spin basis.
    pub fn decomposition(&self) -> &BlockOperator<T> {
        &self.u
    }

    /// `U^† A U`.
    pub fn to_spin(&self, a: &BlockOperator<T>) -> BlockOperator<T> {
        a.conjugate_by(&self.u)
    }

    /// `U A U^†`.
    pub fn to_product(&self, a: &BlockOperator<T>) -> BlockOperator<T> {
        self.u.mul(a).mul(&self.u.adjoint())
    }

    /// Product-basis indices with `l <= l_max - margin`.
    pub fn interior(&self, margin: HalfInt) -> Vec<bool> {
        let cut = self.l_max.twice() - margin.twice();
        self.product.labels().iter().map(|p| p.l.twice() <= cut).collect()
    }

    pub fn interior_spin(&self, margin: HalfInt) -> Vec<bool> {
        let cut = self.l_max.twice() - margin.twice();
        self.spin.labels().iter().map(|p| p.j.twice() <= cut).collect()
    }

    fn block_op(&self, mut block: impl FnMut(HalfInt) -> CMat<T>) -> BlockOperator<T> {
        let mut trip = Vec::new();
        for tl in 0..=self.l_max.twice() {
            let l = HalfInt::from_twice(tl);
            let b = block(l);
            let d = 2 * (tl as usize + 1);
            debug_assert_eq!(b.rows(), d);
            for n in l.range_sym() {
                let off = self.product.get(&ProdLabel { l, n, m: -l, s: -HalfInt::HALF }).unwrap();
                for i in 0..d {
                    for j in 0..d {
                        let v = b[(i, j)];
                        if v.re != T::zero() || v.im != T::zero() {
                            trip.push((off + i, off + j, v));
                        }
                    }
                }
            }
        }
        BlockOperator::from_triplets(self.dim(), trip)
    }

    /// `∂(x) ⊗ 1` with `∂` realized by `π_{q,l}` on the `m` index of `|l m n>`.
    pub fn partial(&self, x: &UqElement<T>) -> BlockOperator<T> {
        self.block_op(|l| x.rep(l, &self.q).kron(&CMat::identity(2)))
    }

    /// An operator matrix `∂(x_{αβ}) ⊗ E_{αβ}` given in display order.
    pub fn spinor_operator(&self, entries: &SpinorEntries<T>) -> BlockOperator<T> {
        self.block_op(|l| {
            let d = l.twice() as usize + 1;
            let mut out = CMat::zeros(2 * d, 2 * d);
            for (a, row) in entries.iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    let mut unit = CMat::zeros(2, 2);
                    unit[(spinor_index(a), spinor_index(b))] = crate::scalar::cone();
                    out = &out + &x.rep(l, &self.q).kron(&unit);
                }
            }
            out
        })
    }

    /// `(∂ ⊗ π_{1/2}) Δ_q(x)`, the symmetry action on spinors.
    pub fn symmetry(&self, x: &UqElement<T>) -> BlockOperator<T> {
        self.block_op(|l| x.coproduct_rep(l, HalfInt::HALF, &self.q))
    }

    /// `ρ(t) ⊗ 1`; images above `l_max` are dropped.
    pub fn rho(&self, t: &PwElement<T>) -> Result<BlockOperator<T>> {
        let r = left_multiplication(t, &self.pw, &self.q)?;
        Ok(r.kron(&BlockOperator::identity(2)))
    }

    /// `ρ(t) ⊗ 1` with the interior fixed by the degree of `t`.
    pub fn rho_interior(&self, t: &PwElement<T>) -> Result<(BlockOperator<T>, Vec<bool>)> {
        let tr = Truncation::new(self.l_max, t.degree())?;
        let keep = self.product.labels().iter().map(|p| tr.is_interior(p.l)).collect();
        Ok((self.rho(t)?, keep))
    }

    /// Diagonal operator in the spin basis, returned in the product basis.
    pub fn spin_diagonal(&self, f: impl Fn(&SpinLabel) -> T) -> BlockOperator<T> {
        let d: Vec<T> = self.spin.labels().iter().map(f).collect();
        self.to_product(&BlockOperator::diagonal_real(&d))
    }

    /// The isospectral operator: `2j + 3/2` on `↑`, `-2j - 1/2` on `↓`.
    pub fn isospectral_dirac(&self) -> BlockOperator<T> {
        self.spin_diagonal(isospectral_value)
    }

    /// Unitarity of the decomposition and block-diagonality of the symmetry.
    pub fn decomposition_report(&self) -> DecompositionReport {
        let id = BlockOperator::identity(self.dim());
        let unitarity = self.u.adjoint().mul(&self.u).sub(&id).max_abs().to_f64();
        let mut block = 0.0f64;
        for g in Gen::ALL {
            let s = self.to_spin(&self.symmetry(&UqElement::gen(g)));
            // expected: π_{coupled}(g) on each (j, n, arrow) block
            let mut trip = Vec::new();
            for (c, lab) in self.spin.labels().iter().enumerate() {
                if lab.mu != -lab.coupled() {
                    continue;
                }
                let p = lab.coupled();
                let m = irrep_matrix(p, g, &self.q);
                let d = m.rows();
                for i in 0..d {
                    for j in 0..d {
                        if m[(i, j)].re != T::zero() {
                            trip.push((c + i, c + j, m[(i, j)]));
                        }
                    }
                }
            }
            let expect = BlockOperator::from_triplets(self.dim(), trip);
            block = block.max(s.sub(&expect).max_abs().to_f64());
        }
        DecompositionReport { dim: self.dim(), unitarity, block_residual: block }
    }
}

pub fn isospectral_value<T: Real>(lab: &SpinLabel) -> T {
    let j = T::from_f64(lab.j.to_f64());
    let two = T::from_f64(2.0);
    match lab.arrow {
        Arrow::Up => two * j + T::from_f64(1.5),
        Arrow::Down => -two * j - T::from_f64(0.5),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub dim: usize,
    pub unitarity: f64,
    pub block_residual: f64,
}

/// `max_g ‖[D, (∂⊗π)Δ(g)]‖` over the generators, entrywise.
pub fn equivariance_residual<T: Real>(space: &SpinorSpace<T>, d: &BlockOperator<T>) -> f64 {
    Gen::ALL
        .iter()
        .map(|g| d.commutator(&space.symmetry(&UqElement::gen(*g))).max_abs().to_f64())
        .fold(0.0, f64::max)
}

/// Entry-wise relative comparison helper.
pub fn rel_residual<T: Real>(a: &BlockOperator<T>, b: &BlockOperator<T>) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(T::one());
    (a.sub(b).max_abs() / scale).to_f64()
}

/// Multiply a spinor entry matrix by a scalar.
pub fn scale_entries<T: Real>(e: &SpinorEntries<T>, c: C<T>) -> SpinorEntries<T> {
    [[e[0][0].scale(c), e[0][1].scale(c)], [e[1][0].scale(c), e[1][1].scale(c)]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use qd::Quad;

    #[test]
    fn dimensions_and_unitarity() {
        let q = QParam::<Quad>::parse("0.5").unwrap();
        let sp = SpinorSpace::new(HalfInt::from_twice(4), &q).unwrap();
        let expect: usize = (0..=4).map(|t| 2 * (t + 1) * (t + 1)).sum();
        assert_eq!(sp.dim(), expect);
        let r = sp.decomposition_report();
        assert!(r.unitarity < 1e-28, "{r:?}");
        assert!(r.block_residual < 1e-27, "{r:?}");
        let ups = sp.spin_basis().labels().iter().filter(|l| l.arrow == Arrow::Up && l.j == HalfInt::ONE).count();
        assert_eq!(ups, mult_up(HalfInt::ONE));
        let downs = sp.spin_basis().labels().iter().filter(|l| l.arrow == Arrow::Down && l.j == HalfInt::ONE).count();
        assert_eq!(downs, mult_down(HalfInt::ONE));
    }

    #[test]
    fn isospectral_is_equivariant() {
        let q = QParam::<Quad>::parse("0.3").unwrap();
        let sp = SpinorSpace::new(HalfInt::from_twice(3), &q).unwrap();
        let d = sp.isospectral_dirac();
        assert!(equivariance_residual(&sp, &d) < 1e-26);
        let ev = d.eigenvalues().unwrap();
        assert!(ev.iter().all(|x| (x.to_f64() * 2.0).fract().abs() < 1e-20 || ((x.to_f64() * 2.0).fract().abs() - 1.0).abs() < 1e-20));
    }

    #[test]
    fn symmetry_is_a_representation() {
        let q = QParam::<Quad>::parse("0.7").unwrap();
        let sp = SpinorSpace::new(HalfInt::from_twice(3), &q).unwrap();
        let e = sp.symmetry(&UqElement::gen(Gen::E));
        let f = sp.symmetry(&UqElement::gen(Gen::F));
        let k = sp.symmetry(&UqElement::gen(Gen::K));
        let ki = sp.symmetry(&UqElement::gen(Gen::KInv));
        let rhs = k.mul(&k).sub(&ki.mul(&ki)).scale_real(Quad::ONE / (q.q() - q.q().recip()));
        assert!(e.commutator(&f).sub(&rhs).max_abs() < Quad::from_f64(1e-27));
        assert!(e.adjoint().sub(&f).max_abs() < Quad::from_f64(1e-28));
    }
}
