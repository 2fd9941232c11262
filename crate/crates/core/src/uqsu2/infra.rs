//! Consistency checks of the representation layer: relations, CG unitarity,
//! block-diagonalization of the coproduct and the classical limit.

use serde::Serialize;

use super::{check_relations, coproduct_matrix, couplings, irrep_matrix, cg_table, Gen};
use crate::error::Result;
use crate::half::HalfInt;
use crate::linalg::CMat;
use crate::qscalar::QParam;
use crate::scalar::Real;

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Classical `<j1 m1; j2 m2 | J M>` by Racah's closed formula (Condon–Shortley phase).
pub fn classical_cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    if (m1 + m2) != m || m1.twice().abs() > j1.twice() || m2.twice().abs() > j2.twice() || m.twice().abs() > j.twice() {
        return 0.0;
    }
    let t = |x: HalfInt| x.twice();
    // all combinations below are integers when the labels are admissible
    let i = |twice: i32| -> Option<i32> { (twice % 2 == 0 && twice >= 0).then_some(twice / 2) };
    let (Some(a), Some(b), Some(c)) = (i(t(j1) + t(j2) - t(j)), i(t(j1) - t(j2) + t(j)), i(-t(j1) + t(j2) + t(j))) else {
        return 0.0;
    };
    let s = i(t(j1) + t(j2) + t(j)).unwrap() + 1;
    let f = |twice: i32| fact(i(twice).unwrap());
    let pre = ((t(j) + 1) as f64 * fact(a) * fact(b) * fact(c) / fact(s)).sqrt()
        * (f(t(j1) + t(m1)) * f(t(j1) - t(m1)) * f(t(j2) + t(m2)) * f(t(j2) - t(m2)) * f(t(j) + t(m)) * f(t(j) - t(m)))
            .sqrt();
    let mut sum = 0.0;
    for k in 0..=s {
        let d = [
            k,
            a - k,
            (t(j1) - t(m1)) / 2 - k,
            (t(j2) + t(m2)) / 2 - k,
            (t(j) - t(j2) + t(m1)) / 2 + k,
            (t(j) - t(j1) - t(m2)) / 2 + k,
        ];
        if d.iter().any(|x| *x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / d.iter().map(|x| fact(*x)).product::<f64>();
    }
    pre * sum
}

#[derive(Clone, Debug, Serialize)]
pub struct InfraReport {
    pub q: String,
    pub two_l_max: i32,
    pub relations: f64,
    pub cg_unitarity: f64,
    pub block_diagonalization: f64,
    /// Worst `|C_q − C_classical|` over all tables with `l1, l2 ≤ l_max`; meaningful as q → 1.
    pub classical_cg: f64,
}

/// Every check for `l, l1, l2 ≤ l_max`.
pub fn infrastructure_report<T: Real>(l_max: HalfInt, q: &QParam<T>) -> Result<InfraReport> {
    let mut relations = 0.0f64;
    let mut unitarity = T::zero();
    let mut blocks = T::zero();
    let mut classical = 0.0f64;
    for a in 0..=l_max.twice() {
        let l1 = HalfInt::from_twice(a);
        relations = relations.max(check_relations(l1, q).max());
        for b in 0..=l_max.twice() {
            let l2 = HalfInt::from_twice(b);
            let t = cg_table(l1, l2, q)?;
            let u = t.unitary();
            let d = u.rows();
            unitarity = unitarity.max((&(&u.adjoint() * &u) - &CMat::identity(d)).max_abs());
            for g in Gen::ALL {
                // U† Δ(g) U must be the direct sum of the irreps
                let conj = &(&u.adjoint() * &coproduct_matrix(l1, l2, g, q)) * &u;
                let mut expect = CMat::zeros(d, d);
                let mut off = 0;
                for p in couplings(l1, l2).into_iter().rev() {
                    let m = irrep_matrix(p, g, q);
                    for i in 0..m.rows() {
                        for j in 0..m.rows() {
                            expect[(off + i, off + j)] = m[(i, j)];
                        }
                    }
                    off += m.rows();
                }
                let scale = T::one().max(expect.max_abs());
                blocks = blocks.max((&conj - &expect).max_abs() / scale);
            }
            for p in couplings(l1, l2) {
                for m1 in l1.range_sym() {
                    for m2 in l2.range_sym() {
                        let got = t.coeff(p, m1, m2).to_f64();
                        let want = classical_cg(l1, m1, l2, m2, p, m1 + m2);
                        classical = classical.max((got - want).abs());
                    }
                }
            }
        }
    }
    Ok(InfraReport {
        q: q.text().to_string(),
        two_l_max: l_max.twice(),
        relations,
        cg_unitarity: unitarity.to_f64(),
        block_diagonalization: blocks.to_f64(),
        classical_cg: classical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qd::Quad;

    #[test]
    fn racah_known_values() {
        let h = HalfInt::HALF;
        let z = HalfInt::ZERO;
        let one = HalfInt::ONE;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((classical_cg(h, h, h, -h, z, z) - r).abs() < 1e-15);
        assert!((classical_cg(h, -h, h, h, z, z) + r).abs() < 1e-15);
        assert!((classical_cg(h, h, h, -h, one, z) - r).abs() < 1e-15);
        // <1 1; 1 -1 | 2 0> = 1/√6
        assert!((classical_cg(one, one, one, -one, HalfInt::int(2), z) - 6f64.sqrt().recip()).abs() < 1e-15);
        // <1 0; 1 0 | 1 0> = 0
        assert!(classical_cg(one, z, one, z, one, z).abs() < 1e-15);
        // orthogonality over a larger pair
        let (j1, j2) = (HalfInt::from_twice(3), HalfInt::from_twice(4));
        for p in couplings(j1, j2) {
            let norm: f64 = j1.range_sym().flat_map(|m1| j2.range_sym().map(move |m2| (m1, m2)))
                .filter(|(m1, m2)| (*m1 + *m2) == HalfInt::HALF)
                .map(|(m1, m2)| classical_cg(j1, m1, j2, m2, p, HalfInt::HALF).powi(2))
                .sum();
            assert!((norm - 1.0).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn report_at_small_l() {
        let q: QParam<Quad> = QParam::parse("0.9999").unwrap();
        let r = infrastructure_report(HalfInt::ONE, &q).unwrap();
        assert!(r.relations < 1e-25 && r.cg_unitarity < 1e-25 && r.block_diagonalization < 1e-25, "{r:?}");
        assert!(r.classical_cg < 1e-3, "{r:?}");
        let q: QParam<Quad> = QParam::parse("0.5").unwrap();
        assert!(infrastructure_report(HalfInt::ONE, &q).unwrap().classical_cg > 1e-2);
    }
}
