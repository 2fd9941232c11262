//! Clebsch–Gordan coefficients for `V_{l1} ⊗ V_{l2}`, with an in-memory cache and a
//! checksummed on-disk format.

use std::any::{Any, TypeId};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use sha2::{Digest, Sha256};

use super::{e_elem, f_elem};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::linalg::CMat;
use crate::qscalar::QParam;
use crate::scalar::{cre, Real};

const MAGIC: &[u8; 8] = b"QDCGTAB1";

/// Real q-CG coefficients `C(l1, l2, p; m1, m2) = <l1 m1; l2 m2 | p, m1 + m2>`.
#[derive(Clone, Debug)]
pub struct CgTable<T> {
    l1: HalfInt,
    l2: HalfInt,
    q_text: String,
    bits: u32,
    entries: BTreeMap<(i32, i32, i32), T>,
}

impl<T: Real> CgTable<T> {
    pub fn l1(&self) -> HalfInt {
        self.l1
    }

    pub fn l2(&self) -> HalfInt {
        self.l2
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Zero when the labels are not admissible.
    pub fn coeff(&self, p: HalfInt, m1: HalfInt, m2: HalfInt) -> T {
        self.entries.get(&(p.twice(), m1.twice(), m2.twice())).copied().unwrap_or_else(T::zero)
    }

    /// Coupled labels `(p, M)`: `p` descending, `M` ascending.
    pub fn coupled_labels(&self) -> Vec<(HalfInt, HalfInt)> {
        couplings(self.l1, self.l2).into_iter().rev().flat_map(|p| p.range_sym().map(move |m| (p, m))).collect()
    }

    /// Rows in the Kronecker basis (`m1` slow), columns as [`Self::coupled_labels`].
    pub fn unitary(&self) -> CMat<T> {
        let d2 = self.l2.twice() as usize + 1;
        let cols = self.coupled_labels();
        let d = cols.len();
        let mut u = CMat::zeros(d, d);
        for (j, (p, mm)) in cols.iter().enumerate() {
            for (i1, m1) in self.l1.range_sym().enumerate() {
                let m2 = *mm - m1;
                if m2.twice().abs() <= self.l2.twice() {
                    let i2 = (m2.twice() + self.l2.twice()) as usize / 2;
                    u[(i1 * d2 + i2, j)] = cre(self.coeff(*p, m1, m2));
                }
            }
        }
        u
    }
}

/// `|l1 - l2|, ..., l1 + l2`.
pub fn couplings(l1: HalfInt, l2: HalfInt) -> Vec<HalfInt> {
    let lo = (l1.twice() - l2.twice()).abs();
    let hi = l1.twice() + l2.twice();
    (lo..=hi).step_by(2).map(HalfInt::from_twice).collect()
}

fn in_range(l: HalfInt, m: HalfInt) -> bool {
    m.twice().abs() <= l.twice() && l.same_parity(m)
}

pub(crate) fn compute<T: Real>(l1: HalfInt, l2: HalfInt, q: &QParam<T>) -> Result<CgTable<T>> {
    if l1.twice() < 0 || l2.twice() < 0 {
        return Err(Error::InvalidArgument(format!("negative spin in CG table ({l1}, {l2})")));
    }
    let mut entries = BTreeMap::new();
    let m1s: Vec<HalfInt> = l1.range_sym().collect();
    for p in couplings(l1, l2).into_iter().rev() {
        check_kernel(l1, l2, p, q)?;
        // highest weight: Δe v = 0 fixes c_{m1+1} / c_{m1}
        let start = if (p - l2).twice() > -l1.twice() { p - l2 } else { -l1 };
        let mut hw: Vec<(HalfInt, T)> = vec![(start, T::one())];
        let mut m1 = start;
        while m1.twice() < l1.twice() {
            let m2 = p - m1 - HalfInt::ONE;
            let (_, c) = *hw.last().unwrap();
            let next = -c * e_elem(l1, m1, q) * q.spow(p.twice() as i64 + 2) / e_elem(l2, m2, q);
            m1 = m1 + HalfInt::ONE;
            hw.push((m1, next));
        }
        let norm = hw.iter().fold(T::zero(), |a, (_, c)| a + *c * *c).sqrt();
        // the coefficient at m1 = l1 is positive
        let sign = hw.last().unwrap().1.signum();
        let mut v: BTreeMap<i32, T> = hw.into_iter().map(|(m, c)| (m.twice(), c * sign / norm)).collect();
        let mut mm = p;
        loop {
            for (m1, c) in &v {
                entries.insert((p.twice(), *m1, mm.twice() - *m1), *c);
            }
            if mm.twice() == -p.twice() {
                break;
            }
            // Δf = f⊗k + k⁻¹⊗f
            let target = mm - HalfInt::ONE;
            let mut w: BTreeMap<i32, T> = BTreeMap::new();
            for &a in &m1s {
                let b = target - a;
                if !in_range(l2, b) {
                    continue;
                }
                let mut acc = T::zero();
                let a1 = a + HalfInt::ONE;
                if let Some(c) = v.get(&a1.twice()) {
                    acc += *c * f_elem(l1, a1, q) * q.spow(b.twice() as i64);
                }
                let b1 = b + HalfInt::ONE;
                if in_range(l2, b1) {
                    if let Some(c) = v.get(&a.twice()) {
                        acc += *c * q.spow(-a.twice() as i64) * f_elem(l2, b1, q);
                    }
                }
                w.insert(a.twice(), acc);
            }
            let n = w.values().fold(T::zero(), |s, c| s + *c * *c).sqrt();
            v = w.into_iter().map(|(k, c)| (k, c / n)).collect();
            mm = target;
        }
    }
    Ok(CgTable { l1, l2, q_text: q.text().to_string(), bits: q.bits(), entries })
}

/// The kernel of `Δe` on the weight-`p` subspace must be one-dimensional.
fn check_kernel<T: Real>(l1: HalfInt, l2: HalfInt, p: HalfInt, q: &QParam<T>) -> Result<()> {
    let src: Vec<HalfInt> = l1.range_sym().filter(|m1| in_range(l2, p - *m1)).collect();
    let tgt: Vec<HalfInt> = l1.range_sym().filter(|m1| in_range(l2, p + HalfInt::ONE - *m1)).collect();
    let mut a = CMat::zeros(tgt.len().max(1), src.len());
    for (j, &m1) in src.iter().enumerate() {
        let m2 = p - m1;
        for (i, &t1) in tgt.iter().enumerate() {
            let mut x = T::zero();
            if t1 == m1 + HalfInt::ONE {
                x += e_elem(l1, m1, q) * q.spow(m2.twice() as i64);
            }
            if t1 == m1 {
                x += q.spow(-m1.twice() as i64) * e_elem(l2, m2, q);
            }
            a[(i, j)] = cre(x);
        }
    }
    let g = &a.adjoint() * &a;
    let ev = g.eigvalsh()?;
    let scale = ev.iter().fold(T::one(), |m, x| m.max(x.abs()));
    let tol = scale * T::from_f64(1e-20);
    let found = ev.iter().filter(|x| x.abs() <= tol).count();
    if found != 1 {
        return Err(Error::KernelDimension {
            expected: 1,
            found,
            context: format!("highest-weight space of spin {p} in {l1} ⊗ {l2}"),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    ty: TypeId,
    l1: i32,
    l2: i32,
    q: String,
    bits: u32,
}

type Cache = RwLock<HashMap<Key, Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn key<T: Real>(l1: HalfInt, l2: HalfInt, q: &QParam<T>) -> Key {
    Key { ty: TypeId::of::<T>(), l1: l1.twice(), l2: l2.twice(), q: q.exact().to_string(), bits: q.bits() }
}

/// Cached CG table; readers share, a miss computes under the write lock.
pub fn cg_table<T: Real>(l1: HalfInt, l2: HalfInt, q: &QParam<T>) -> Result<Arc<CgTable<T>>> {
    let k = key(l1, l2, q);
    if let Some(t) = cache().read().get(&k) {
        return Ok(downcast(t.clone()));
    }
    let mut w = cache().write();
    if let Some(t) = w.get(&k) {
        return Ok(downcast(t.clone()));
    }
    let t = Arc::new(compute(l1, l2, q)?);
    w.insert(k, t.clone());
    Ok(t)
}

fn downcast<T: Real>(a: Arc<dyn Any + Send + Sync>) -> Arc<CgTable<T>> {
    a.downcast::<CgTable<T>>().expect("CG cache keyed by scalar type")
}

pub fn clear_cg_cache() {
    cache().write().clear();
}

/// Write every cached table of scalar type `T`; returns the number written.
pub fn save_cg_cache<T: Real>(path: &Path) -> Result<usize> {
    let tables: Vec<Arc<CgTable<T>>> = {
        let r = cache().read();
        let mut v: Vec<(&Key, Arc<CgTable<T>>)> =
            r.iter().filter(|(k, _)| k.ty == TypeId::of::<T>()).map(|(k, t)| (k, downcast(t.clone()))).collect();
        v.sort_by(|a, b| (a.0.l1, a.0.l2, &a.0.q, a.0.bits).cmp(&(b.0.l1, b.0.l2, &b.0.q, b.0.bits)));
        v.into_iter().map(|(_, t)| t).collect()
    };
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(tables.len() as u32).to_le_bytes());
    for t in &tables {
        buf.extend_from_slice(&t.l1.twice().to_le_bytes());
        buf.extend_from_slice(&t.l2.twice().to_le_bytes());
        buf.extend_from_slice(&(t.q_text.len() as u32).to_le_bytes());
        buf.extend_from_slice(t.q_text.as_bytes());
        buf.extend_from_slice(&t.bits.to_le_bytes());
        buf.extend_from_slice(&(t.entries.len() as u32).to_le_bytes());
        for ((p, m1, m2), c) in &t.entries {
            buf.extend_from_slice(&p.to_le_bytes());
            buf.extend_from_slice(&m1.to_le_bytes());
            buf.extend_from_slice(&m2.to_le_bytes());
            let (hi, lo) = c.to_parts();
            buf.extend_from_slice(&hi.to_le_bytes());
            buf.extend_from_slice(&lo.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(digest.as_slice());
    std::fs::write(path, buf)?;
    Ok(tables.len())
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::CacheCorrupt(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Load tables of scalar type `T` into the cache; returns the number loaded.
///
/// A bad checksum or an inconsistent record is an error; nothing is inserted then.
pub fn load_cg_cache<T: Real>(path: &Path) -> Result<usize> {
    let data = std::fs::read(path)?;
    if data.len() < MAGIC.len() + 4 + 32 || &data[..MAGIC.len()] != MAGIC {
        return Err(Error::CacheCorrupt("bad magic".into()));
    }
    let (body, sum) = data.split_at(data.len() - 32);
    if Sha256::digest(body).as_slice() != sum {
        return Err(Error::CacheCorrupt("checksum mismatch".into()));
    }
    let mut r = Reader { data: body, pos: MAGIC.len() };
    let n = r.u32()?;
    let mut loaded = Vec::new();
    for _ in 0..n {
        let l1 = HalfInt::from_twice(r.i32()?);
        let l2 = HalfInt::from_twice(r.i32()?);
        let qlen = r.u32()? as usize;
        let q_text = std::str::from_utf8(r.take(qlen)?).map_err(|_| Error::CacheCorrupt("q is not UTF-8".into()))?.to_string();
        let bits = r.u32()?;
        let q = QParam::<T>::with_precision(&q_text, bits).map_err(|e| Error::CacheCorrupt(format!("key q={q_text}: {e}")))?;
        let count = r.u32()?;
        let mut entries = BTreeMap::new();
        for _ in 0..count {
            let (p, m1, m2) = (r.i32()?, r.i32()?, r.i32()?);
            let (hp, h1, h2) = (HalfInt::from_twice(p), HalfInt::from_twice(m1), HalfInt::from_twice(m2));
            let ok = in_range(hp, h1 + h2)
                && in_range(l1, h1)
                && in_range(l2, h2)
                && couplings(l1, l2).contains(&hp);
            if !ok {
                return Err(Error::CacheCorrupt(format!("label ({p}, {m1}, {m2}) outside table ({l1}, {l2})")));
            }
            let (hi, lo) = (r.f64()?, r.f64()?);
            if !hi.is_finite() || hi.abs() > 1.0 + 1e-12 {
                return Err(Error::CacheCorrupt(format!("coefficient {hi} out of range")));
            }
            entries.insert((p, m1, m2), T::from_parts(hi, lo));
        }
        loaded.push((key(l1, l2, &q), CgTable { l1, l2, q_text, bits, entries }));
    }
    if r.pos != body.len() {
        return Err(Error::CacheCorrupt("trailing bytes".into()));
    }
    let count = loaded.len();
    let mut w = cache().write();
    for (k, t) in loaded {
        w.insert(k, Arc::new(t));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use qd::Quad;

    fn q(s: &str) -> QParam<Quad> {
        QParam::parse(s).unwrap()
    }

    fn close(a: Quad, b: Quad, tol: f64) -> bool {
        (a - b).abs() < Quad::from_f64(tol)
    }

    #[test]
    fn spin_half_pair() {
        let q5 = q("0.5");
        let h = HalfInt::HALF;
        let t = compute(h, h, &q5).unwrap();
        let b2 = q5.qint(2).sqrt();
        // singlet: q^{1/2}|↑↓> - q^{-1/2}|↓↑>, over √[2]
        assert!(close(t.coeff(HalfInt::ZERO, h, -h), q5.s() / b2, 1e-30));
        assert!(close(t.coeff(HalfInt::ZERO, -h, h), -q5.s().recip() / b2, 1e-30));
        assert!(close(t.coeff(HalfInt::ONE, h, -h), q5.s().recip() / b2, 1e-30));
        assert!(close(t.coeff(HalfInt::ONE, -h, h), q5.s() / b2, 1e-30));
        assert!(close(t.coeff(HalfInt::ONE, h, h), Quad::ONE, 1e-30));
        assert_eq!(t.coeff(HalfInt::ONE, h, HalfInt::from_twice(3)), Quad::zero());
    }

    #[test]
    fn unitary_and_intertwining() {
        let q3 = q("0.3");
        for (a, b) in [(1, 1), (2, 3), (4, 2), (6, 5), (0, 3)] {
            let (l1, l2) = (HalfInt::from_twice(a), HalfInt::from_twice(b));
            let t = compute(l1, l2, &q3).unwrap();
            let u = t.unitary();
            let d = u.rows();
            assert!((&(&u.adjoint() * &u) - &CMat::identity(d)).max_abs() < Quad::from_f64(1e-28), "{a} {b}");
            for g in super::super::Gen::ALL {
                let lhs = &super::super::coproduct_matrix(l1, l2, g, &q3) * &u;
                let mut blocks = CMat::zeros(d, d);
                let labels = t.coupled_labels();
                let mut off = 0;
                for p in couplings(l1, l2).into_iter().rev() {
                    let m = super::super::irrep_matrix(p, g, &q3);
                    let n = m.rows();
                    for i in 0..n {
                        for j in 0..n {
                            blocks[(off + i, off + j)] = m[(i, j)];
                        }
                    }
                    off += n;
                }
                assert_eq!(off, labels.len());
                let rhs = &u * &blocks;
                let r = (&lhs - &rhs).max_abs();
                assert!(r < Quad::from_f64(1e-28) * (Quad::ONE + lhs.max_abs()), "{a} {b} {g} {r:?}");
            }
        }
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let q7 = q("0.7");
        let t = cg_table(HalfInt::ONE, HalfInt::HALF, &q7).unwrap();
        let t2 = cg_table(HalfInt::ONE, HalfInt::HALF, &q("0.70")).unwrap();
        assert!(Arc::ptr_eq(&t, &t2));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cg.bin");
        assert!(save_cg_cache::<Quad>(&path).unwrap() >= 1);
        assert!(load_cg_cache::<Quad>(&path).unwrap() >= 1);
        let back = cg_table(HalfInt::ONE, HalfInt::HALF, &q7).unwrap();
        for ((k, a), (k2, b)) in t.entries.iter().zip(back.entries.iter()) {
            assert_eq!(k, k2);
            assert_eq!(a.to_parts(), b.to_parts());
        }
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_cg_cache::<Quad>(&path), Err(Error::CacheCorrupt(_))));
        std::fs::write(&path, &bytes[..10]).unwrap();
        assert!(matches!(load_cg_cache::<Quad>(&path), Err(Error::CacheCorrupt(_))));
    }

    #[test]
    fn concurrent_readers() {
        let q6 = q("0.6");
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let q6 = q6.clone();
                std::thread::spawn(move || cg_table(HalfInt::from_twice(i % 4), HalfInt::from_twice(3), &q6).unwrap().len())
            })
            .collect();
        for h in handles {
            assert!(h.join().unwrap() > 0);
        }
    }
}
