//! The standard Podleś sphere: the `∂(k)`-invariant subalgebra generated by
//! `A = ab*`, `B = bb*`, its invariant spinors and the Dirac operator `[2]∂(0 f; e 0)`.

use serde::Serialize;

use crate::coordalg::{generators, PwElement};
use crate::error::{Error, Result};
use crate::fit::LineFit;
use crate::half::HalfInt;
use crate::operator::BlockOperator;
use crate::qscalar::QParam;
use crate::scalar::{cre, Real};
use crate::spinhilbert::{ProdLabel, SpinorEntries, SpinorSpace};
use crate::uqsu2::{irrep_matrix, m_index, Gen, UqElement};

pub struct SphereGenerators<T> {
    pub a: PwElement<T>,
    pub a_star: PwElement<T>,
    pub b: PwElement<T>,
}

/// `A = ab*`, `A* = ba*`, `B = bb*`.
pub fn sphere_generators<T: Real>(q: &QParam<T>) -> Result<SphereGenerators<T>> {
    let g = generators(q);
    Ok(SphereGenerators {
        a: g.a.multiply(&g.b_star, q)?,
        a_star: g.b.multiply(&g.a_star, q)?,
        b: g.b.multiply(&g.b_star, q)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedResidual {
    pub name: &'static str,
    pub residual: f64,
}

/// The four relations, plus `A* = (A)*`, `B* = B` and `∂(k)`-invariance.
pub fn sphere_relations<T: Real>(q: &QParam<T>) -> Result<Vec<NamedResidual>> {
    let s = sphere_generators(q)?;
    let mul = |x: &PwElement<T>, y: &PwElement<T>| x.multiply(y, q);
    let qq = q.q();
    let ab = mul(&s.a, &s.b)?;
    let ba = mul(&s.b, &s.a)?;
    let asb = mul(&s.a_star, &s.b)?;
    let bas = mul(&s.b, &s.a_star)?;
    let asa = mul(&s.a_star, &s.a)?;
    let aas = mul(&s.a, &s.a_star)?;
    let bb = mul(&s.b, &s.b)?;
    let r = |x: PwElement<T>| x.max_abs().to_f64();
    let k = UqElement::gen(Gen::K);
    let inv = [&s.a, &s.a_star, &s.b].iter().map(|x| r(x.left_action(&k, q).sub(x))).fold(0.0, f64::max);
    Ok(vec![
        NamedResidual { name: "AB = q^-2 BA", residual: r(ab.sub(&ba.scale_real(q.qpow(-2)))) },
        NamedResidual { name: "A*B = q^2 BA*", residual: r(asb.sub(&bas.scale_real(qq * qq))) },
        NamedResidual { name: "A*A = B(1 - q^2 B)", residual: r(asa.sub(&s.b.sub(&bb.scale_real(qq * qq)))) },
        NamedResidual { name: "AA* = q^-2 B(1 - B)", residual: r(aas.sub(&s.b.sub(&bb).scale_real(T::one() / (qq * qq)))) },
        NamedResidual { name: "A* is the adjoint of A", residual: r(s.a.involution(q).sub(&s.a_star)) },
        NamedResidual { name: "B* = B", residual: r(s.b.involution(q).sub(&s.b)) },
        NamedResidual { name: "d(k) X = X", residual: inv },
    ])
}

/// `|l n +> = |l, -1/2, n> ⊗ |+1/2>`, `|l n -> = |l, 1/2, n> ⊗ |-1/2>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SphereLabel {
    pub l: HalfInt,
    pub n: HalfInt,
    pub plus: bool,
}

impl SphereLabel {
    pub fn product(&self) -> ProdLabel {
        let h = HalfInt::HALF;
        if self.plus {
            ProdLabel { l: self.l, n: self.n, m: -h, s: h }
        } else {
            ProdLabel { l: self.l, n: self.n, m: h, s: -h }
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    pub labels: Vec<SphereLabel>,
    /// Product-basis index of each label.
    pub index: Vec<usize>,
    /// Rank of the fixed-point space of `(∂⊗π)Δ(k)` in the truncation.
    pub fixed_rank: usize,
}

/// Displayed labels, checked against the numerically computed fixed-point space.
pub fn invariant_subspace<T: Real>(space: &SpinorSpace<T>) -> Result<InvariantSubspace> {
    let k = space.symmetry(&UqElement::gen(Gen::K));
    let tol = T::from_f64(1e-25);
    let mut fixed = Vec::new();
    for i in 0..space.dim() {
        let off = k.row(i).iter().any(|(j, v)| *j != i && crate::scalar::cabs(*v) > tol);
        if !off && (k.get(i, i).re - T::one()).abs() <= tol && k.get(i, i).im.abs() <= tol {
            fixed.push(i);
        }
    }
    let mut labels = Vec::new();
    for tl in (1..=space.l_max().twice()).step_by(2) {
        let l = HalfInt::from_twice(tl);
        for n in l.range_sym() {
            for plus in [true, false] {
                labels.push(SphereLabel { l, n, plus });
            }
        }
    }
    let index: Vec<usize> = labels.iter().map(|s| space.product_basis().get(&s.product()).expect("label in truncation")).collect();
    let mut sorted = index.clone();
    sorted.sort_unstable();
    if sorted != fixed {
        return Err(Error::Multiplicity(format!("{} displayed labels, fixed-point space has dimension {}", labels.len(), fixed.len())));
    }
    Ok(InvariantSubspace { labels, index, fixed_rank: fixed.len() })
}

/// `[2]∂(0, q^{-1/2}k⁻¹f; q^{1/2}k⁻¹e, 0)`.
pub fn sphere_entries_twisted<T: Real>(q: &QParam<T>) -> SpinorEntries<T> {
    let b2 = q.qint(2);
    [
        [UqElement::zero(), UqElement::word(cre(b2 * q.spow(-1)), &[Gen::KInv, Gen::F])],
        [UqElement::word(cre(b2 * q.spow(1)), &[Gen::KInv, Gen::E]), UqElement::zero()],
    ]
}

/// `[2]∂(0, f; e, 0)`.
pub fn sphere_entries_plain<T: Real>(q: &QParam<T>) -> SpinorEntries<T> {
    let b2 = q.qint(2);
    [[UqElement::zero(), UqElement::word(cre(b2), &[Gen::F])], [UqElement::word(cre(b2), &[Gen::E]), UqElement::zero()]]
}

#[derive(Clone, Debug)]
pub struct SphereDirac<T> {
    pub sub: InvariantSubspace,
    /// Restricted to the invariant subspace, indexed like `sub.labels`.
    pub op: BlockOperator<T>,
    pub forms_agree: f64,
    pub leakage: f64,
}

pub fn sphere_dirac<T: Real>(space: &SpinorSpace<T>, tol: f64) -> Result<SphereDirac<T>> {
    let sub = invariant_subspace(space)?;
    let d1 = space.spinor_operator(&sphere_entries_twisted(space.q()));
    let d2 = space.spinor_operator(&sphere_entries_plain(space.q()));
    let r1 = d1.restrict(&sub.index);
    let r2 = d2.restrict(&sub.index);
    let forms_agree = crate::spinhilbert::rel_residual(&r1, &r2);
    let mut inside = vec![false; space.dim()];
    for &i in &sub.index {
        inside[i] = true;
    }
    let leakage = d1.triplets().filter(|(i, j, _)| inside[*j] && !inside[*i]).fold(0.0f64, |m, (_, _, v)| m.max(crate::scalar::cabs(v).to_f64()));
    if forms_agree > tol {
        return Err(Error::ConventionFault(format!("the two forms of the sphere operator differ by {forms_agree:e}")));
    }
    Ok(SphereDirac { sub, op: r1, forms_agree, leakage })
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorEigen {
    pub l: String,
    pub magnitude: f64,
    pub closed_form: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorNorm {
    pub name: &'static str,
    pub norm: f64,
    pub leakage: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereReport {
    pub q: String,
    pub l_max: String,
    pub relations: Vec<NamedResidual>,
    pub invariant_dimension: usize,
    pub forms_agree: f64,
    pub dirac_leakage: f64,
    pub gamma_anticommutator: f64,
    pub spectrum_symmetry: f64,
    pub closed_form_deviation: f64,
    pub sectors: Vec<SectorEigen>,
    /// `|λ_{l}| / |λ_{l-1}|` for `l >= 3`.
    pub sector_ratios: Vec<(String, f64)>,
    /// Worst relative deviation of those ratios from `q^{-2}`.
    pub ratio_deviation_q_minus_2: f64,
    /// Same against `q^{-1}`.
    pub ratio_deviation_q_minus_1: f64,
    pub growth_fit: LineFit,
    pub commutators: Vec<CommutatorNorm>,
    pub heat_trace: f64,
    pub equivariance: f64,
}

fn right_action<T: Real>(space: &SpinorSpace<T>, g: Gen) -> BlockOperator<T> {
    let q = space.q();
    let mut trip = Vec::new();
    for (col, lab) in space.product_basis().labels().iter().enumerate() {
        let m = irrep_matrix(lab.l, g, q);
        let c = m_index(lab.l, lab.n);
        for (r, n2) in lab.l.range_sym().enumerate() {
            let v = m[(r, c)];
            if v.re != T::zero() {
                let row = space.product_basis().get(&ProdLabel { n: n2, ..*lab }).unwrap();
                trip.push((row, col, v));
            }
        }
    }
    BlockOperator::from_triplets(space.dim(), trip)
}

pub fn sphere_triple_report<T: Real>(space: &SpinorSpace<T>) -> Result<SphereReport> {
    let q = space.q();
    let relations = sphere_relations(q)?;
    let sd = sphere_dirac(space, 1e-20)?;
    let sub = &sd.sub;
    let d = &sd.op;
    let gamma: Vec<T> = sub.labels.iter().map(|l| if l.plus { T::one() } else { -T::one() }).collect();
    let gamma = BlockOperator::diagonal_real(&gamma);
    let gamma_anticommutator = gamma.anticommutator(d).max_abs().to_f64();

    let ev = d.eigenvalues()?;
    let mut sorted = ev.clone();
    sorted.sort_by(|a, b| PartialOrd::partial_cmp(a, b).unwrap_or(std::cmp::Ordering::Equal));
    let n = sorted.len();
    let spectrum_symmetry = (0..n).map(|i| (sorted[i] + sorted[n - 1 - i]).abs().to_f64()).fold(0.0, f64::max);

    let mut sectors = Vec::new();
    let mut sector_l = Vec::new();
    let mut dev = 0.0f64;
    for tl in (1..=space.l_max().twice()).step_by(2) {
        let l = HalfInt::from_twice(tl);
        let closed = q.qint(2) * q.qint((tl as i64 + 1) / 2);
        let idx: Vec<usize> = sub.labels.iter().enumerate().filter(|(_, s)| s.l == l).map(|(i, _)| i).collect();
        let block = d.restrict(&idx).eigenvalues()?;
        let mags: Vec<T> = block.iter().map(|x| x.abs()).collect();
        for m in &mags {
            dev = dev.max(((*m - closed).abs() / closed).to_f64());
        }
        let top = mags.iter().fold(T::zero(), |a, b| a.max(*b));
        sector_l.push(l);
        sectors.push(SectorEigen { l: l.to_string(), magnitude: top.to_f64(), closed_form: closed.to_f64(), multiplicity: mags.len() });
    }
    let mut sector_ratios = Vec::new();
    let (mut d2, mut d1) = (0.0f64, 0.0f64);
    let qf = q.q().to_f64();
    for (i, w) in sectors.windows(2).enumerate() {
        if sector_l[i + 1].to_f64() < 3.0 {
            continue;
        }
        let ratio = w[1].magnitude / w[0].magnitude;
        d2 = d2.max((ratio * qf * qf - 1.0).abs());
        d1 = d1.max((ratio * qf - 1.0).abs());
        sector_ratios.push((w[1].l.clone(), ratio));
    }
    let xs: Vec<f64> = (1..=space.l_max().twice()).step_by(2).map(|t| t as f64 / 2.0).collect();
    let ys: Vec<f64> = sectors.iter().map(|s| s.magnitude).collect();
    let growth_fit = LineFit::semilog(&xs, &ys)?;

    // commutators with ρ(X), columns with l <= l_max - 1
    let s = sphere_generators(q)?;
    let mut inside = vec![false; space.dim()];
    for &i in &sub.index {
        inside[i] = true;
    }
    let keep: Vec<bool> = sub.labels.iter().map(|l| l.l.twice() <= space.l_max().twice() - 2).collect();
    let mut commutators = Vec::new();
    for (name, x) in [("A", &s.a), ("A*", &s.a_star), ("B", &s.b)] {
        let rho = space.rho(x)?;
        let leakage = rho.triplets().filter(|(i, j, _)| inside[*j] && !inside[*i]).fold(0.0f64, |m, (_, _, v)| m.max(crate::scalar::cabs(v).to_f64()));
        let r = rho.restrict(&sub.index);
        let c = d.commutator(&r);
        let norm = crate::dirac_su2::col_norm(&c, &keep)?.to_f64();
        commutators.push(CommutatorNorm { name, norm, leakage });
    }
    let heat_trace = ev.iter().map(|x| (-x.abs().to_f64()).exp()).sum();

    let full = space.spinor_operator(&sphere_entries_plain(q));
    let mut equivariance = 0.0f64;
    for g in Gen::ALL {
        let r = right_action(space, g);
        equivariance = equivariance.max(full.commutator(&r).restrict(&sub.index).max_abs().to_f64());
    }
    let k = space.symmetry(&UqElement::gen(Gen::K));
    equivariance = equivariance.max(full.commutator(&k).restrict(&sub.index).max_abs().to_f64());

    Ok(SphereReport {
        q: q.text().to_string(),
        l_max: space.l_max().to_string(),
        relations,
        invariant_dimension: sub.fixed_rank,
        forms_agree: sd.forms_agree,
        dirac_leakage: sd.leakage,
        gamma_anticommutator,
        spectrum_symmetry,
        closed_form_deviation: dev,
        sectors,
        sector_ratios,
        ratio_deviation_q_minus_2: d2,
        ratio_deviation_q_minus_1: d1,
        growth_fit,
        commutators,
        heat_trace,
        equivariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qd::Quad;

    #[test]
    fn relations_vanish() {
        for qs in ["0.5", "0.3", "0.9"] {
            let q = QParam::<Quad>::parse(qs).unwrap();
            let s = sphere_generators(&q).unwrap();
            assert!(s.b.sub(&PwElement::one().scale(s.b.haar())).max_abs() > Quad::from_f64(0.1));
            for r in sphere_relations(&q).unwrap() {
                assert!(r.residual < 1e-28, "{qs} {r:?}");
            }
        }
    }

    #[test]
    fn invariant_space_and_operator() {
        let q = QParam::<Quad>::parse("0.5").unwrap();
        let sp = SpinorSpace::new(HalfInt::from_twice(5), &q).unwrap();
        let sub = invariant_subspace(&sp).unwrap();
        assert_eq!(sub.fixed_rank, 2 * (2 + 4 + 6));
        let sd = sphere_dirac(&sp, 1e-20).unwrap();
        assert!(sd.forms_agree < 1e-28 && sd.leakage == 0.0);
    }
}
