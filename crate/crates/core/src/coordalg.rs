//! The coordinate algebra of SU_q(2) in the Peter–Weyl basis `t^l_{mn}`, its Haar
//! state and the GNS representation on a truncated `L²(SU_q(2))`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::linalg::{CMat, C};
use crate::operator::{Basis, BlockOperator};
use crate::qscalar::QParam;
use crate::scalar::{cabs, cre, czero, Real};
use crate::uqsu2::{cg_table, couplings, UqElement};

/// Label of `t^l_{mn}`. Ordered by `l`, then `n`, then `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PwIndex {
    pub l: HalfInt,
    pub n: HalfInt,
    pub m: HalfInt,
}

impl PwIndex {
    pub fn new(l: HalfInt, m: HalfInt, n: HalfInt) -> Result<Self> {
        let ok = l.twice() >= 0
            && m.twice().abs() <= l.twice()
            && n.twice().abs() <= l.twice()
            && l.same_parity(m)
            && l.same_parity(n);
        if !ok {
            return Err(Error::InvalidArgument(format!("no matrix coefficient t^{l}_{{{m},{n}}}")));
        }
        Ok(PwIndex { l, n, m })
    }

    pub fn from_twice(l: i32, m: i32, n: i32) -> Result<Self> {
        Self::new(HalfInt::from_twice(l), HalfInt::from_twice(m), HalfInt::from_twice(n))
    }

    /// `q^m √[2l+1]`, so that `|lmn> = ortho · t^l_{mn}` is a unit vector.
    pub fn ortho<T: Real>(&self, q: &QParam<T>) -> T {
        q.spow(self.m.twice() as i64) * q.sqrt_qint(self.l.twice() as i64 + 1)
    }
}

/// Every label with `l <= l_max`, in [`PwIndex`] order.
pub fn pw_labels(l_max: HalfInt) -> Vec<PwIndex> {
    let mut out = Vec::new();
    for tl in 0..=l_max.twice() {
        let l = HalfInt::from_twice(tl);
        for n in l.range_sym() {
            for m in l.range_sym() {
                out.push(PwIndex { l, n, m });
            }
        }
    }
    out
}

/// Finite linear combination of matrix coefficients, without zero terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PwElement<T> {
    terms: BTreeMap<PwIndex, C<T>>,
}

impl<T: Real> PwElement<T> {
    pub fn zero() -> Self {
        PwElement { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::basis(PwIndex { l: HalfInt::ZERO, n: HalfInt::ZERO, m: HalfInt::ZERO })
    }

    pub fn basis(idx: PwIndex) -> Self {
        Self::term(idx, Complex::new(T::one(), T::zero()))
    }

    pub fn term(idx: PwIndex, c: C<T>) -> Self {
        let mut e = Self::zero();
        e.push(idx, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PwIndex, C<T>)>) -> Self {
        let mut e = Self::zero();
        for (i, c) in terms {
            e.push(i, c);
        }
        e
    }

    fn push(&mut self, idx: PwIndex, c: C<T>) {
        let slot = self.terms.entry(idx).or_insert_with(czero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PwIndex, &C<T>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &PwIndex) -> C<T> {
        self.terms.get(idx).copied().unwrap_or_else(czero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `l` present.
    pub fn degree(&self) -> HalfInt {
        self.terms.keys().map(|i| i.l).max().unwrap_or(HalfInt::ZERO)
    }

    pub fn max_abs(&self) -> T {
        self.terms.values().fold(T::zero(), |m, c| m.max(cabs(*c)))
    }

    /// Drop terms with modulus at most `tol`.
    pub fn chop(&self, tol: T) -> Self {
        PwElement { terms: self.terms.iter().filter(|(_, c)| cabs(**c) > tol).map(|(i, c)| (*i, *c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.push(*i, *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self::from_terms(self.terms.iter().map(|(i, x)| (*i, *x * c)))
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(cre(c))
    }

    /// `t^l_{mn} t^{l'}_{m'n'} = Σ_p C(l,l',p; m,m') C(l,l',p; n,n') t^p_{m+m', n+n'}`.
    pub fn multiply(&self, other: &Self, q: &QParam<T>) -> Result<Self> {
        let mut out = Self::zero();
        for (i1, c1) in &self.terms {
            for (i2, c2) in &other.terms {
                let table = cg_table(i1.l, i2.l, q)?;
                let (mm, nn) = (i1.m + i2.m, i1.n + i2.n);
                for p in couplings(i1.l, i2.l) {
                    if mm.twice().abs() > p.twice() || nn.twice().abs() > p.twice() {
                        continue;
                    }
                    let w = table.coeff(p, i1.m, i2.m) * table.coeff(p, i1.n, i2.n);
                    if !w.is_zero() {
                        out.push(PwIndex { l: p, n: nn, m: mm }, *c1 * *c2 * cre(w));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(t^l_{mn})* = (-1)^{2l+m+n} q^{n-m} t^l_{-m,-n}`, extended antilinearly.
    pub fn involution(&self, q: &QParam<T>) -> Self {
        Self::from_terms(self.terms.iter().map(|(i, c)| {
            let e = (2 * i.l.twice() + i.m.twice() + i.n.twice()) / 2;
            let sign = if e.rem_euclid(2) == 0 { T::one() } else { -T::one() };
            let w = sign * q.qpow(i.n.diff(i.m));
            (PwIndex { l: i.l, n: -i.n, m: -i.m }, c.conj() * cre(w))
        }))
    }

    /// Haar state: the coefficient of `t^0_{00}`.
    pub fn haar(&self) -> C<T> {
        self.coeff(&PwIndex { l: HalfInt::ZERO, n: HalfInt::ZERO, m: HalfInt::ZERO })
    }

    /// `∂(x)`: `π_{q,l}(x)` acting on the first index of each `t^l_{mn}`.
    pub fn left_action(&self, x: &UqElement<T>, q: &QParam<T>) -> Self {
        let mut reps: HashMap<HalfInt, CMat<T>> = HashMap::new();
        let mut out = Self::zero();
        for (i, c) in &self.terms {
            let r = reps.entry(i.l).or_insert_with(|| x.rep(i.l, q));
            let col = crate::uqsu2::m_index(i.l, i.m);
            for (row, m2) in i.l.range_sym().enumerate() {
                let v = r[(row, col)];
                if !v.is_zero() {
                    out.push(PwIndex { l: i.l, n: i.n, m: m2 }, *c * v);
                }
            }
        }
        out
    }
}

/// `h(x* y)` from the closed form `h((t^l_{mn})* t^l_{mn}) = q^{-2m} / [2l+1]`.
pub fn haar_inner<T: Real>(x: &PwElement<T>, y: &PwElement<T>, q: &QParam<T>) -> C<T> {
    let mut acc = czero();
    for (i, c) in &x.terms {
        if let Some(d) = y.terms.get(i) {
            let w = q.spow(-2 * i.m.twice() as i64) / q.qint(i.l.twice() as i64 + 1);
            acc += c.conj() * *d * cre(w);
        }
    }
    acc
}

/// Generators `a = t^{1/2}_{1/2,1/2}`, `b = t^{1/2}_{1/2,-1/2}` and their adjoints.
pub struct Generators<T> {
    pub a: PwElement<T>,
    pub b: PwElement<T>,
    pub a_star: PwElement<T>,
    pub b_star: PwElement<T>,
}

pub fn generators<T: Real>(q: &QParam<T>) -> Generators<T> {
    let idx = |m, n| PwIndex::from_twice(1, m, n).unwrap();
    let a = PwElement::basis(idx(1, 1));
    let b = PwElement::basis(idx(1, -1));
    Generators { a_star: a.involution(q), b_star: b.involution(q), a, b }
}

/// Truncation `l <= l_max`; rows with `l > l_max - margin` are outside the interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub l_max: HalfInt,
    pub margin: HalfInt,
}

impl Truncation {
    pub fn new(l_max: HalfInt, margin: HalfInt) -> Result<Self> {
        if l_max.twice() < 0 || margin.twice() < 0 || margin.twice() > l_max.twice() {
            return Err(Error::Truncation(format!("l_max = {l_max}, margin = {margin}")));
        }
        Ok(Truncation { l_max, margin })
    }

    pub fn is_interior(&self, l: HalfInt) -> bool {
        l.twice() <= self.l_max.twice() - self.margin.twice()
    }
}

/// Left multiplication in the orthonormal basis `|lmn>`, truncated.
#[derive(Clone, Debug)]
pub struct GnsMatrix<T> {
    pub basis: Basis<PwIndex>,
    pub op: BlockOperator<T>,
    pub interior: Vec<bool>,
}

/// `ρ(t)` with entries `ortho(l,m,n) · c / ortho(l',m',n')`. The margin must cover `t`'s degree.
pub fn gns_matrix<T: Real>(t: &PwElement<T>, trunc: Truncation, q: &QParam<T>) -> Result<GnsMatrix<T>> {
    if trunc.margin.twice() < t.degree().twice() {
        return Err(Error::Truncation(format!("margin {} below degree {} of the multiplier", trunc.margin, t.degree())));
    }
    let basis = Basis::new(pw_labels(trunc.l_max));
    let op = left_multiplication(t, &basis, q)?;
    let interior = basis.labels().iter().map(|i| trunc.is_interior(i.l)).collect();
    Ok(GnsMatrix { basis, op, interior })
}

/// Left multiplication on an arbitrary finite set of Peter–Weyl labels; images
/// leaving the set are dropped.
pub fn left_multiplication<T: Real>(t: &PwElement<T>, basis: &Basis<PwIndex>, q: &QParam<T>) -> Result<BlockOperator<T>> {
    let mut trip = Vec::new();
    let mut ortho: HashMap<PwIndex, T> = HashMap::new();
    let mut ortho_of = |i: &PwIndex| *ortho.entry(*i).or_insert_with(|| i.ortho(q));
    for (col, idx) in basis.labels().iter().enumerate() {
        let img = t.multiply(&PwElement::basis(*idx), q)?;
        let oc = ortho_of(idx);
        for (ri, c) in img.terms() {
            if let Some(row) = basis.get(ri) {
                trip.push((row, col, *c * cre(oc / ortho_of(ri))));
            }
        }
    }
    Ok(BlockOperator::from_triplets(basis.len(), trip))
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    two_l: i32,
    two_m: i32,
    two_n: i32,
    re: [f64; 2],
    im: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct JsonElement {
    terms: Vec<JsonTerm>,
}

impl<T: Real> PwElement<T> {
    /// Lossless JSON: each real part is stored as a leading `f64` and its correction.
    pub fn to_json(&self) -> String {
        let terms = self
            .terms
            .iter()
            .map(|(i, c)| {
                let (rh, rl) = c.re.to_parts();
                let (ih, il) = c.im.to_parts();
                JsonTerm { two_l: i.l.twice(), two_m: i.m.twice(), two_n: i.n.twice(), re: [rh, rl], im: [ih, il] }
            })
            .collect();
        serde_json::to_string(&JsonElement { terms }).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: JsonElement = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = Self::zero();
        for t in j.terms {
            let idx = PwIndex::from_twice(t.two_l, t.two_m, t.two_n)?;
            out.push(idx, Complex::new(T::from_parts(t.re[0], t.re[1]), T::from_parts(t.im[0], t.im[1])));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use qd::Quad;

    fn q(s: &str) -> QParam<Quad> {
        QParam::parse(s).unwrap()
    }

    fn tol(x: f64) -> Quad {
        Quad::from_f64(x)
    }

    #[test]
    fn defining_relations() {
        for qs in ["0.5", "0.3", "0.9"] {
            let q = q(qs);
            let g = generators(&q);
            let ab = g.a.multiply(&g.b, &q).unwrap();
            let ba = g.b.multiply(&g.a, &q).unwrap();
            assert!(ba.sub(&ab.scale_real(q.q())).max_abs() < tol(1e-29), "{qs}");
            let aa = g.a.multiply(&g.a_star, &q).unwrap();
            let bb = g.b.multiply(&g.b_star, &q).unwrap();
            assert!(aa.add(&bb).sub(&PwElement::one()).max_abs() < tol(1e-29), "{qs}");
            let bsb = g.b_star.multiply(&g.b, &q).unwrap();
            assert!(bb.sub(&bsb).max_abs() < tol(1e-29), "{qs}");
        }
    }

    #[test]
    fn involution_properties() {
        let q = q("0.6");
        let g = generators(&q);
        // b* = -q^{-1} t_{-1/2,1/2}
        let expect = PwElement::term(PwIndex::from_twice(1, -1, 1).unwrap(), cre(-q.q().recip()));
        assert!(g.b_star.sub(&expect).max_abs() < tol(1e-30));
        let x = g.a.add(&g.b.scale(Complex::new(tol(0.5), tol(2.0))));
        let back = x.involution(&q).involution(&q);
        assert!(back.sub(&x).max_abs() < tol(1e-30));
        let xy = x.multiply(&g.b_star, &q).unwrap();
        let rhs = g.b_star.involution(&q).multiply(&x.involution(&q), &q).unwrap();
        assert!(xy.involution(&q).sub(&rhs).max_abs() < tol(1e-29));
    }

    #[test]
    fn haar_two_routes() {
        let q = q("0.4");
        for i in pw_labels(HalfInt::from_twice(4)) {
            let t = PwElement::basis(i);
            let prod = t.involution(&q).multiply(&t, &q).unwrap().haar();
            let closed = haar_inner(&t, &t, &q);
            assert!(cabs(prod - closed) < tol(1e-26) * closed.re, "{i:?}");
            let o = i.ortho(&q);
            assert!((closed.re * o * o - Quad::ONE).abs() < tol(1e-28));
        }
        let t = PwElement::basis(PwIndex::from_twice(2, 0, 2).unwrap());
        let u = PwElement::basis(PwIndex::from_twice(2, 2, 2).unwrap());
        assert!(haar_inner(&t, &u, &q).is_zero());
        assert!(t.involution(&q).multiply(&u, &q).unwrap().haar().norm_sqr() < tol(1e-60));
    }

    #[test]
    fn gns_is_a_star_representation() {
        let q = q("0.5");
        let g = generators(&q);
        let tr = Truncation::new(HalfInt::from_twice(6), HalfInt::HALF).unwrap();
        let ra = gns_matrix(&g.a, tr, &q).unwrap();
        let ras = gns_matrix(&g.a_star, tr, &q).unwrap();
        let rb = gns_matrix(&g.b, tr, &q).unwrap();
        let diff = ras.op.sub(&ra.op.adjoint());
        let keep = &ra.interior;
        assert!(diff.max_abs_on(keep) < tol(1e-28));
        // ρ(ba) = q ρ(a) ρ(b) on the interior of a margin-1 truncation
        let lhs = rb.op.mul(&ra.op);
        let rhs = ra.op.mul(&rb.op).scale_real(q.q());
        let inner: Vec<bool> = ra.basis.labels().iter().map(|i| i.l.twice() <= 4).collect();
        assert!(lhs.sub(&rhs).max_abs_on(&inner) < tol(1e-28));
        assert!(gns_matrix(&g.a.multiply(&g.b, &q).unwrap(), tr, &q).is_err());
    }

    #[test]
    fn left_action_of_k() {
        let q = q("0.5");
        let t = PwElement::basis(PwIndex::from_twice(2, 2, 0).unwrap());
        let out = t.left_action(&UqElement::gen(crate::uqsu2::Gen::K), &q);
        assert!(cabs(out.coeff(&PwIndex::from_twice(2, 2, 0).unwrap()) - cre(q.q())) < tol(1e-30));
        let out = t.left_action(&UqElement::gen(crate::uqsu2::Gen::F), &q);
        let c = out.coeff(&PwIndex::from_twice(2, 0, 0).unwrap());
        assert!(cabs(c - cre(q.qint(2).sqrt())) < tol(1e-30));
    }

    #[test]
    fn json_round_trip() {
        let q = q("0.3");
        let g = generators(&q);
        let x = g.a.multiply(&g.b_star, &q).unwrap().add(&g.b.scale(Complex::new(tol(0.1), tol(-0.7))));
        let back = PwElement::<Quad>::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        assert!(PwElement::<Quad>::from_json(r#"{"terms":[{"two_l":1,"two_m":2,"two_n":1,"re":[1,0],"im":[0,0]}]}"#).is_err());
    }

    fn arb_element() -> impl Strategy<Value = Vec<(i32, i32, i32, f64, f64)>> {
        prop::collection::vec((0..3i32, 0..4i32, 0..4i32, -2.0..2.0f64, -2.0..2.0f64), 1..4)
    }

    fn build(v: &[(i32, i32, i32, f64, f64)]) -> PwElement<Quad> {
        PwElement::from_terms(v.iter().map(|(l, a, b, re, im)| {
            let tl = *l;
            let m = -tl + 2 * (a % (tl + 1));
            let n = -tl + 2 * (b % (tl + 1));
            (PwIndex::from_twice(tl, m, n).unwrap(), Complex::new(Quad::from_f64(*re), Quad::from_f64(*im)))
        }))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn associative(x in arb_element(), y in arb_element(), z in arb_element()) {
            let q = q("0.7");
            let (x, y, z) = (build(&x), build(&y), build(&z));
            let l = x.multiply(&y, &q).unwrap().multiply(&z, &q).unwrap();
            let r = x.multiply(&y.multiply(&z, &q).unwrap(), &q).unwrap();
            prop_assert!(l.sub(&r).max_abs() < tol(1e-26));
        }

        #[test]
        fn haar_is_positive(x in arb_element()) {
            let q = q("0.35");
            let x = build(&x);
            let v = x.involution(&q).multiply(&x, &q).unwrap().haar();
            let w = haar_inner(&x, &x, &q);
            prop_assert!(v.re > Quad::zero());
            prop_assert!(cabs(v - w) < tol(1e-25) * (Quad::ONE + w.re));
        }
    }
}
