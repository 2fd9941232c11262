//! Dirac operators on SU_q(2): the algebraic operator built from the
//! q-Clifford structure, the geometric exponential and its logarithm, the
//! singlet reconstruction, and the Fredholm and summability diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::LineFit;
use crate::half::HalfInt;
use crate::linalg::{CMat, C};
use crate::operator::BlockOperator;
use crate::qscalar::{q_bracket_op, ExactScalar, QParam};
use crate::scalar::{cabs, cone, cre, czero, Real};
use crate::spinhilbert::{flip2, isospectral_value, mult_down, mult_up, Arrow, SpinLabel, SpinorEntries, SpinorSpace};
use crate::uqsu2::{adjoint_with, irrep_matrix, Gen, UqElement};


fn w<T: Real>(c: T, gens: &[Gen]) -> UqElement<T> {
    UqElement::word(cre(c), gens)
}

/// `𝔇 = ∂(ef - q⁻²fe, q^{-1/2}[2]k⁻¹f; q^{1/2}[2]k⁻¹e, -q²ef + fe)`.
pub fn algebraic_entries<T: Real>(q: &QParam<T>) -> SpinorEntries<T> {
    let one = T::one();
    let b2 = q.qint(2);
    [
        [w(one, &[Gen::E, Gen::F]).add(&w(-q.qpow(-2), &[Gen::F, Gen::E])), w(q.spow(-1) * b2, &[Gen::KInv, Gen::F])],
        [w(q.spow(1) * b2, &[Gen::KInv, Gen::E]), w(-q.qpow(2), &[Gen::E, Gen::F]).add(&w(one, &[Gen::F, Gen::E]))],
    ]
}

pub fn algebraic_dirac<T: Real>(space: &SpinorSpace<T>) -> BlockOperator<T> {
    space.spinor_operator(&algebraic_entries(space.q()))
}

/// Readings of the geometric exponential: the printed one and the repairs of its
/// lower row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeoVariant {
    /// `(2,1) = k⁻¹f`, `(2,2) = -k²`.
    Printed,
    /// `(2,1) = k⁻¹f`, `(2,2) = k⁻²`.
    FixDiagonal,
    /// `(2,1) = k⁻¹e`, `(2,2) = -k²`.
    FixOffDiagonal,
    /// `(2,1) = k⁻¹e`, `(2,2) = k⁻²`.
    Corrected,
}

impl GeoVariant {
    pub const ALL: [GeoVariant; 4] = [GeoVariant::Printed, GeoVariant::FixDiagonal, GeoVariant::FixOffDiagonal, GeoVariant::Corrected];

    pub fn name(self) -> &'static str {
        match self {
            GeoVariant::Printed => "printed",
            GeoVariant::FixDiagonal => "fix-diagonal",
            GeoVariant::FixOffDiagonal => "fix-off-diagonal",
            GeoVariant::Corrected => "corrected",
        }
    }
}

pub fn geometric_entries<T: Real>(variant: GeoVariant, q: &QParam<T>) -> SpinorEntries<T> {
    let kappa = q.q() - (T::one() / q.q());
    let one = T::one();
    let top_left = w(one, &[Gen::K, Gen::K]).add(&w(kappa * (one - q.qpow(-2)), &[Gen::F, Gen::E]));
    let top_right = w(kappa * q.spow(-1), &[Gen::F, Gen::KInv]);
    let lower = match variant {
        GeoVariant::Printed | GeoVariant::FixDiagonal => Gen::F,
        _ => Gen::E,
    };
    let bottom_left = w(kappa * q.spow(-1), &[Gen::KInv, lower]);
    let bottom_right = match variant {
        GeoVariant::Printed | GeoVariant::FixOffDiagonal => w(-one, &[Gen::K, Gen::K]),
        _ => w(one, &[Gen::KInv, Gen::KInv]),
    };
    [[top_left, top_right], [bottom_left, bottom_right]]
}

/// `q^{2j}` on `↑`, `q^{-(2j+2)}` on `↓`.
pub fn exp_value<T: Real>(lab: &SpinLabel, q: &QParam<T>) -> T {
    let tj = lab.j.twice() as i64;
    match lab.arrow {
        Arrow::Up => q.qpow(tj),
        Arrow::Down => q.qpow(-tj - 2),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantTrial {
    pub variant: GeoVariant,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct GeometricChoice<T> {
    pub variant: GeoVariant,
    pub op: BlockOperator<T>,
    pub trials: Vec<VariantTrial>,
}

/// Build every variant and keep the one whose spin-basis form is
/// `diag(q^{2j}, q^{-(2j+2)})`.
pub fn geometric_exponential<T: Real>(space: &SpinorSpace<T>, tol: f64) -> Result<GeometricChoice<T>> {
    let q = space.q();
    let expect: Vec<T> = space.spin_basis().labels().iter().map(|l| exp_value(l, q)).collect();
    let expect = BlockOperator::diagonal_real(&expect);
    let mut trials = Vec::new();
    let mut chosen = None;
    for v in GeoVariant::ALL {
        let op = space.spinor_operator(&geometric_entries(v, q));
        let s = space.to_spin(&op);
        let scale = expect.max_abs().max(T::one());
        let residual = (s.sub(&expect).max_abs() / scale).to_f64();
        let passed = residual < tol;
        trials.push(VariantTrial { variant: v, residual, passed });
        if passed && chosen.is_none() {
            chosen = Some((v, op));
        }
    }
    match chosen {
        Some((variant, op)) => Ok(GeometricChoice { variant, op, trials }),
        None => Err(Error::ConventionFault(format!(
            "no reading of the geometric exponential has the expected spectrum: {}",
            trials.iter().map(|t| format!("{}={:.3e}", t.variant.name(), t.residual)).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// `log_q` of a positive operator.
pub fn log_q<T: Real>(p: &BlockOperator<T>, q: &QParam<T>) -> Result<BlockOperator<T>> {
    let ev = p.eigenvalues()?;
    if let Some(bad) = ev.iter().find(|x| **x <= T::zero()) {
        return Err(Error::ConventionFault(format!("exponential has non-positive eigenvalue {:e}", bad.to_f64())));
    }
    let lq = q.q().ln();
    p.hermitian_fn(|x| x.ln() / lq)
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalReport {
    pub q: String,
    pub l_max: String,
    pub variant: GeoVariant,
    pub trials: Vec<VariantTrial>,
    /// `‖[D̃] - 𝔇‖ / max(1, ‖𝔇‖)`, entrywise.
    pub residual: f64,
    /// `‖D̃ + 3/2 - D‖`, entrywise.
    pub isospectral_residual: f64,
}

/// Realized `D̃`, selected variant and the comparison `[D̃] = 𝔇`.
pub fn fundamental_relation<T: Real>(space: &SpinorSpace<T>) -> Result<(FundamentalReport, BlockOperator<T>)> {
    let q = space.q();
    let geo = geometric_exponential(space, 1e-20)?;
    let dt = log_q(&geo.op, q)?;
    let bracket = q_bracket_op(&dt, q)?;
    let alg = algebraic_dirac(space);
    let residual = crate::spinhilbert::rel_residual(&bracket, &alg);
    let shift = dt.add(&BlockOperator::identity(space.dim()).scale_real(T::from_f64(1.5)));
    let iso = shift.sub(&space.isospectral_dirac()).max_abs().to_f64();
    let report = FundamentalReport {
        q: q.text().to_string(),
        l_max: space.l_max().to_string(),
        variant: geo.variant,
        trials: geo.trials,
        residual,
        isospectral_residual: iso,
    };
    Ok((report, dt))
}

/// `[2j]` on `↑`, `[-(2j+2)]` on `↓`.
pub fn algebraic_value<T: Real>(lab: &SpinLabel, q: &QParam<T>) -> T {
    let tj = lab.j.twice() as i64;
    match lab.arrow {
        Arrow::Up => q.qint(tj),
        Arrow::Down => q.qint(-tj - 2),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub j: String,
    pub arrow: &'static str,
    pub algebraic: f64,
    pub isospectral: f64,
    pub multiplicity: usize,
}

/// Predicted eigenvalues with multiplicities for `j <= j_max`.
pub fn spectrum_table<T: Real>(j_max: HalfInt, q: &QParam<T>) -> Vec<SpectrumRow> {
    let mut rows = Vec::new();
    for tj in 0..=j_max.twice() {
        let j = HalfInt::from_twice(tj);
        for arrow in [Arrow::Up, Arrow::Down] {
            let mult = match arrow {
                Arrow::Up => mult_up(j),
                Arrow::Down => mult_down(j),
            };
            if mult == 0 {
                continue;
            }
            let lab = SpinLabel { j, n: HalfInt::ZERO, arrow, mu: HalfInt::ZERO };
            rows.push(SpectrumRow {
                j: j.to_string(),
                arrow: arrow.symbol(),
                algebraic: algebraic_value(&lab, q).to_f64(),
                isospectral: isospectral_value::<T>(&lab).to_f64(),
                multiplicity: mult,
            });
        }
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub q: String,
    pub j_max: String,
    pub eigenvalues: usize,
    /// Largest `|computed - predicted| / max(1, |predicted|)` after sorting.
    pub max_deviation: f64,
    pub multiplicities_match: bool,
    pub self_adjoint_defect: f64,
    pub equivariance: f64,
}

/// Compare the computed spectrum of `𝔇` with `{[2j], [-(2j+2)]}` and their multiplicities.
pub fn spectrum_check<T: Real>(space: &SpinorSpace<T>) -> Result<SpectrumReport> {
    let q = space.q();
    let d = algebraic_dirac(space);
    let defect = d.hermitian_defect().to_f64();
    let mut got = d.eigenvalues()?;
    let mut want: Vec<T> = space.spin_basis().labels().iter().map(|l| algebraic_value(l, q)).collect();
    let cmp = |a: &T, b: &T| PartialOrd::partial_cmp(a, b).unwrap_or(std::cmp::Ordering::Equal);
    got.sort_by(cmp);
    want.sort_by(cmp);
    let mut dev = 0.0f64;
    for (a, b) in got.iter().zip(&want) {
        dev = dev.max(((*a - *b).abs() / b.abs().max(T::one())).to_f64());
    }
    // multiplicities: cluster computed values and compare counts with the table
    let mut mult_ok = got.len() == want.len();
    for row in spectrum_table(space.l_max(), q) {
        let v = T::from_f64(row.algebraic);
        let tol = T::from_f64(1e-10) * v.abs().max(T::one());
        let count = got.iter().filter(|x| (**x - v).abs() <= tol).count();
        let expected: usize = spectrum_table(space.l_max(), q)
            .iter()
            .filter(|r| (T::from_f64(r.algebraic) - v).abs() <= tol)
            .map(|r| r.multiplicity)
            .sum();
        mult_ok &= count == expected;
    }
    let equivariance = crate::spinhilbert::equivariance_residual(space, &d);
    Ok(SpectrumReport {
        q: q.text().to_string(),
        j_max: space.l_max().to_string(),
        eigenvalues: got.len(),
        max_deviation: dev,
        multiplicities_match: mult_ok,
        self_adjoint_defect: defect,
        equivariance,
    })
}

/// `ψ_1, ψ_0, ψ_{-1}` in display order.
pub fn psi_matrices<T: Real>(q: &QParam<T>) -> [CMat<T>; 3] {
    let z = czero::<T>();
    let s = q.s();
    let r = T::one() / q.sqrt_qint(2);
    let p1 = CMat::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { cre(s) } else { z });
    let p0 = CMat::diag_real(&[-r / q.q(), r * q.q()]);
    let pm = CMat::from_fn(2, 2, |i, j| if (i, j) == (1, 0) { cre(-T::one() / s) } else { z });
    [p1, p0, pm]
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub name: &'static str,
    pub residual: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CliffordReport {
    pub q: String,
    pub relations: Vec<RelationCheck>,
    pub max_residual: f64,
    pub all_exact: bool,
}

type EMat = [[ExactScalar; 2]; 2];

fn emul(a: &EMat, b: &EMat) -> EMat {
    let mut out: EMat = Default::default();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        }
    }
    out
}

fn eadd(a: &EMat, b: &EMat) -> EMat {
    let mut out: EMat = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &a[i][j] + &b[i][j];
        }
    }
    out
}

fn escale(c: &ExactScalar, a: &EMat) -> EMat {
    let mut out: EMat = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = c * &a[i][j];
        }
    }
    out
}

fn eis(a: &EMat, b: &EMat) -> bool {
    (0..2).all(|i| (0..2).all(|j| a[i][j] == b[i][j]))
}

/// The five relations among `ψ_1, ψ_0, ψ_{-1}`, each checked numerically and as
/// Laurent polynomials in `q^{1/2}` (with `ψ_0` rescaled by `√[2]`).
pub fn clifford_su2<T: Real>(q: &QParam<T>) -> CliffordReport {
    let [p1, p0, pm] = psi_matrices(q);
    let id = CMat::<T>::identity(2);
    let qq = q.q();
    let b2 = q.qint(2);
    let mm = |a: &CMat<T>, b: &CMat<T>| a * b;
    let numeric = [
        ("psi1 psi1 = psi-1 psi-1 = 0", mm(&p1, &p1).max_abs().max(mm(&pm, &pm).max_abs())),
        ("q^-1 psi1 psi0 + q psi0 psi1 = 0", (&mm(&p1, &p0).scale_real(T::one() / qq) + &mm(&p0, &p1).scale_real(qq)).max_abs()),
        (
            "q^-2 psi1 psi-1 + [2] psi0 psi0 + q^2 psi-1 psi1 = 0",
            (&(&mm(&p1, &pm).scale_real(q.qpow(-2)) + &mm(&p0, &p0).scale_real(b2)) + &mm(&pm, &p1).scale_real(q.qpow(2))).max_abs(),
        ),
        ("psi0 psi-1 + q^2 psi-1 psi0 = 0", (&mm(&p0, &pm) + &mm(&pm, &p0).scale_real(q.qpow(2))).max_abs()),
        ("psi1 psi-1 + psi-1 psi1 = -1", (&(&mm(&p1, &pm) + &mm(&pm, &p1)) + &id).max_abs()),
    ];
    // exact: ψ̂0 = √[2] ψ0 = diag(-q⁻¹, q)
    let z = ExactScalar::zero;
    let e1: EMat = [[z(), ExactScalar::s_pow(1)], [z(), z()]];
    let e0: EMat = [[-ExactScalar::q_pow(-1), z()], [z(), ExactScalar::q_pow(1)]];
    let em: EMat = [[z(), z()], [-ExactScalar::s_pow(-1), z()]];
    let ez: EMat = Default::default();
    let eid: EMat = [[ExactScalar::one(), z()], [z(), ExactScalar::one()]];
    let neg_id = escale(&ExactScalar::int(-1), &eid);
    let qp = ExactScalar::q_pow;
    let exact = [
        eis(&emul(&e1, &e1), &ez) && eis(&emul(&em, &em), &ez),
        eis(&eadd(&escale(&qp(-1), &emul(&e1, &e0)), &escale(&qp(1), &emul(&e0, &e1))), &ez),
        eis(&eadd(&eadd(&escale(&qp(-2), &emul(&e1, &em)), &emul(&e0, &e0)), &escale(&qp(2), &emul(&em, &e1))), &ez),
        eis(&eadd(&emul(&e0, &em), &escale(&qp(2), &emul(&em, &e0))), &ez),
        eis(&eadd(&emul(&e1, &em), &emul(&em, &e1)), &neg_id),
    ];
    let relations: Vec<RelationCheck> = numeric
        .iter()
        .zip(exact)
        .map(|((name, r), ex)| RelationCheck { name, residual: r.to_f64(), exact: ex })
        .collect();
    let max_residual = relations.iter().map(|r| r.residual).fold(0.0, f64::max);
    let all_exact = relations.iter().all(|r| r.exact);
    CliffordReport { q: q.text().to_string(), relations, max_residual, all_exact }
}

/// `θ_{-1}, θ_0, θ_1` (ascending weight): `-k⁻¹f`, `(q⁻¹fe - qef)/√[2]`, `k⁻¹e`.
pub fn theta<T: Real>(q: &QParam<T>) -> [UqElement<T>; 3] {
    let r = T::one() / q.sqrt_qint(2);
    [
        w(-T::one(), &[Gen::KInv, Gen::F]),
        w(r / q.q(), &[Gen::F, Gen::E]).add(&w(-r * q.q(), &[Gen::E, Gen::F])),
        w(T::one(), &[Gen::KInv, Gen::E]),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct SingletReport {
    pub q: String,
    pub l_max: String,
    /// Scales of `σ(<1,i|) = s_i ψ_{-i}` for `i = 1, 0, -1`, normalized to `s_0 = 1`.
    pub scales: [[f64; 2]; 3],
    pub intertwiner_residual: f64,
    pub c: [f64; 2],
    pub residual: f64,
    pub weight_zero_residual: f64,
}

/// Solve the module-map condition for the scales of `σ`, then fit the overall constant.
pub fn singlet_reconstruction<T: Real>(space: &SpinorSpace<T>) -> Result<SingletReport> {
    let q = space.q();
    let [p1, p0, pm] = psi_matrices(q);
    // ascending weight: ψ_{-1}, ψ_0, ψ_1; σ(<1,i|) with dual index k = i + 1 uses ψ_{-i}
    let psi_w = [pm, p0, p1];
    let psi_for = |k: usize| psi_w[2 - k].clone();
    let half = HalfInt::HALF;
    let pi_disp = |gg: Gen| flip2(&irrep_matrix(half, gg, q));
    let mut rows: Vec<[C<T>; 3]> = Vec::new();
    for x in [Gen::E, Gen::F, Gen::K] {
        let dual = UqElement::gen(x).antipode(q).rep(HalfInt::ONE, q).transpose();
        for k in 0..3 {
            let act = adjoint_with(&UqElement::gen(x), &psi_for(k), &pi_disp, q);
            for a in 0..2 {
                for b in 0..2 {
                    let mut row = [czero(); 3];
                    row[k] += act[(a, b)];
                    for (j, r) in row.iter_mut().enumerate() {
                        *r -= dual[(j, k)] * psi_for(j)[(a, b)];
                    }
                    rows.push(row);
                }
            }
        }
    }
    let n = rows.len();
    let a = CMat::from_fn(n, 2, |i, j| rows[i][if j == 0 { 0 } else { 2 }]);
    let rhs: Vec<C<T>> = rows.iter().map(|r| -r[1]).collect();
    let sol = a.lstsq(&rhs)?;
    let s = [sol[0], cone(), sol[1]];
    let inter = rows
        .iter()
        .map(|r| cabs(r[0] * s[0] + r[1] * s[1] + r[2] * s[2]))
        .fold(T::zero(), |m, v| m.max(v))
        .to_f64();
    let th = theta(q);
    let mut entries: SpinorEntries<T> = Default::default();
    let mut diag0: SpinorEntries<T> = Default::default();
    for k in 0..3 {
        let p = psi_for(k);
        for a in 0..2 {
            for b in 0..2 {
                let c = s[k] * p[(a, b)];
                if cabs(c) > T::zero() {
                    entries[a][b] = entries[a][b].add(&th[k].scale(c));
                    if k == 1 {
                        diag0[a][b] = diag0[a][b].add(&th[k].scale(c));
                    }
                }
            }
        }
    }
    let omega = space.spinor_operator(&entries);
    let dirac = algebraic_dirac(space);
    // least-squares constant over all entries
    let mut num = czero::<T>();
    let mut den = T::zero();
    for (i, j, v) in omega.triplets() {
        num += v.conj() * dirac.get(i, j);
        den += crate::scalar::abs2(v);
    }
    if den == T::zero() {
        return Err(Error::Singular("reconstructed operator vanishes".into()));
    }
    let c = num / cre(den);
    let residual = crate::spinhilbert::rel_residual(&omega.scale(c), &dirac);
    let diag_alg = algebraic_entries(q);
    let diag_only: SpinorEntries<T> = [[diag_alg[0][0].clone(), UqElement::zero()], [UqElement::zero(), diag_alg[1][1].clone()]];
    let w0 = crate::spinhilbert::rel_residual(&space.spinor_operator(&diag0).scale(c), &space.spinor_operator(&diag_only));
    let f = |z: C<T>| [z.re.to_f64(), z.im.to_f64()];
    Ok(SingletReport {
        q: q.text().to_string(),
        l_max: space.l_max().to_string(),
        scales: [f(s[2]), f(s[1]), f(s[0])],
        intertwiner_residual: inter,
        c: f(c),
        residual,
        weight_zero_residual: w0,
    })
}

/// `F = D (1 + D²)^{-1/2}`.
pub fn fredholm_sign<T: Real>(d: &BlockOperator<T>) -> Result<BlockOperator<T>> {
    d.hermitian_fn(|x| x / (T::one() + x * x).sqrt())
}

/// `[D̃]_t = (q^{tD̃} - q^{-tD̃}) / (q^t - q^{-t})`, equal to `D̃` at `t = 0`.
pub fn homotopy_bracket<T: Real>(dt: &BlockOperator<T>, t: f64, q: &QParam<T>) -> Result<BlockOperator<T>> {
    if t == 0.0 {
        return Ok(dt.clone());
    }
    let tt = T::from_f64(t);
    let den = q.qpow_real(tt) - q.qpow_real(-tt);
    dt.hermitian_fn(|x| (q.qpow_real(tt * x) - q.qpow_real(-tt * x)) / den)
}

/// Keep only the columns in `keep`.
pub fn mask_cols<T: Real>(a: &BlockOperator<T>, keep: &[bool]) -> BlockOperator<T> {
    BlockOperator::from_triplets(a.dim(), a.triplets().filter(|(_, j, _)| keep[*j]))
}

/// Norm of `A` restricted to the columns in `keep`.
pub fn col_norm<T: Real>(a: &BlockOperator<T>, keep: &[bool]) -> Result<T> {
    mask_cols(a, keep).op_norm()
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyPoint {
    pub t: f64,
    pub commutator_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    pub q: String,
    pub l_max: String,
    pub points: Vec<HomotopyPoint>,
    /// `‖F_1 - 𝔉_q‖` with `𝔉_q` from the algebraic operator.
    pub endpoint_one: f64,
    /// `‖F_{1e-8} - F_q‖`.
    pub endpoint_zero: f64,
    pub max_norm: f64,
}

/// `‖[F_t, ρ(a)]‖` on the interior for each `t`, plus the endpoint identities.
pub fn homotopy_family<T: Real>(space: &SpinorSpace<T>, t_grid: &[f64]) -> Result<HomotopyReport> {
    let q = space.q();
    let (_, dt) = fundamental_relation(space)?;
    let gens = crate::coordalg::generators(q);
    let (ra, keep) = space.rho_interior(&gens.a)?;
    let mut points = Vec::new();
    for &t in t_grid {
        let ft = fredholm_sign(&homotopy_bracket(&dt, t, q)?)?;
        let n = col_norm(&ft.commutator(&ra), &keep)?.to_f64();
        points.push(HomotopyPoint { t, commutator_norm: n });
    }
    let f1 = fredholm_sign(&homotopy_bracket(&dt, 1.0, q)?)?;
    let frak = fredholm_sign(&algebraic_dirac(space))?;
    let endpoint_one = f1.sub(&frak).max_abs().to_f64();
    let f0 = fredholm_sign(&dt)?;
    let fe = fredholm_sign(&homotopy_bracket(&dt, 1e-8, q)?)?;
    let endpoint_zero = fe.sub(&f0).max_abs().to_f64();
    let max_norm = points.iter().map(|p| p.commutator_norm).fold(0.0, f64::max);
    Ok(HomotopyReport { q: q.text().to_string(), l_max: space.l_max().to_string(), points, endpoint_one, endpoint_zero, max_norm })
}

#[derive(Clone, Debug, Serialize)]
pub struct SummabilityReport {
    pub q: String,
    pub l_max: String,
    /// `(j, ‖[𝔉_q, ρ(a)] P_j‖)` for interior levels.
    pub level_norms: Vec<(f64, f64)>,
    /// Fit of `log ‖[𝔉_q, ρ(a)] P_j‖` against `j`.
    pub algebraic_decay: LineFit,
    pub largest_singular_values: Vec<f64>,
    /// Closed-form against computed eigenvalues of `F_q² - 1`.
    pub fq_closed_form_deviation: f64,
    /// Fit of `log |μ_k(F_q² - 1)|` against `log k`.
    pub fq_power_law: LineFit,
}

pub fn summability_report<T: Real>(space: &SpinorSpace<T>) -> Result<SummabilityReport> {
    let q = space.q();
    let gens = crate::coordalg::generators(q);
    let (ra, keep) = space.rho_interior(&gens.a)?;
    let frak = fredholm_sign(&algebraic_dirac(space))?;
    let comm = mask_cols(&frak.commutator(&ra), &keep);
    let mut level_norms = Vec::new();
    let labels = space.product_basis().labels();
    for tj in 0..space.l_max().twice() {
        let sel: Vec<bool> = labels.iter().map(|p| p.l.twice() == tj).collect();
        let n = col_norm(&comm, &sel)?.to_f64();
        level_norms.push((tj as f64 / 2.0, n));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = level_norms.iter().filter(|(_, n)| *n > 0.0).cloned().unzip();
    let algebraic_decay = LineFit::semilog(&xs, &ys)?;
    let sv = comm.singular_values()?;
    let largest_singular_values = sv.iter().take(8).map(|x| x.to_f64()).collect();

    // F_q² - 1 = -(1 + D̃²)^{-1}
    let (_, dt) = fundamental_relation(space)?;
    let m = dt.hermitian_fn(|x| -T::one() / (T::one() + x * x))?;
    let lam_max = space.l_max().twice() as f64;
    let complete = |lam: f64| lam.abs() <= lam_max + 1e-9;
    let mut numeric: Vec<f64> = m.eigenvalues()?.into_iter().map(|x| -x.to_f64()).filter(|mu| complete(((1.0 / mu) - 1.0).max(0.0).sqrt())).collect();
    let mut closed: Vec<f64> = space
        .spin_basis()
        .labels()
        .iter()
        .map(|l| {
            let lam: f64 = match l.arrow {
                Arrow::Up => l.j.to_f64() * 2.0,
                Arrow::Down => -(l.j.to_f64() * 2.0 + 2.0),
            };
            (lam, 1.0 / (1.0 + lam * lam))
        })
        .filter(|(lam, _)| complete(*lam))
        .map(|(_, mu)| mu)
        .collect();
    numeric.sort_by(|a, b| b.total_cmp(a));
    closed.sort_by(|a, b| b.total_cmp(a));
    let fq_closed_form_deviation = if numeric.len() == closed.len() {
        numeric.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let ks: Vec<f64> = (1..=closed.len()).map(|k| k as f64).collect();
    let fq_power_law = LineFit::loglog(&ks, &closed)?;
    Ok(SummabilityReport {
        q: q.text().to_string(),
        l_max: space.l_max().to_string(),
        level_norms,
        algebraic_decay,
        largest_singular_values,
        fq_closed_form_deviation,
        fq_power_law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qd::Quad;

    fn space(qs: &str, tl: i32) -> SpinorSpace<Quad> {
        SpinorSpace::new(HalfInt::from_twice(tl), &QParam::parse(qs).unwrap()).unwrap()
    }

    #[test]
    fn spectrum_of_algebraic_operator() {
        let sp = space("0.5", 4);
        let r = spectrum_check(&sp).unwrap();
        assert!(r.max_deviation < 1e-25, "{r:?}");
        assert!(r.multiplicities_match, "{r:?}");
        assert!(r.self_adjoint_defect < 1e-28 && r.equivariance < 1e-25, "{r:?}");
    }

    #[test]
    fn geometric_variant_and_fundamental_relation() {
        let sp = space("0.5", 4);
        let (r, _) = fundamental_relation(&sp).unwrap();
        assert_eq!(r.variant, GeoVariant::Corrected, "{r:?}");
        assert!(r.trials.iter().filter(|t| t.passed).count() == 1, "{r:?}");
        assert!(r.residual < 1e-25, "{r:?}");
        assert!(r.isospectral_residual < 1e-25, "{r:?}");
    }

    #[test]
    fn clifford_relations() {
        let r = clifford_su2(&QParam::<Quad>::parse("0.3").unwrap());
        assert!(r.all_exact, "{r:?}");
        assert!(r.max_residual < 1e-28, "{r:?}");
    }

    #[test]
    fn singlet() {
        let sp = space("0.7", 3);
        let r = singlet_reconstruction(&sp).unwrap();
        assert!(r.intertwiner_residual < 1e-28, "{r:?}");
        assert!(r.residual < 1e-26, "{r:?}");
        assert!(r.weight_zero_residual < 1e-26, "{r:?}");
        // σ scales ∝ (-q, 1, -q⁻¹), constant [2]
        assert!((r.scales[0][0] + 0.7).abs() < 1e-14 && (r.scales[2][0] + 1.0 / 0.7).abs() < 1e-14, "{r:?}");
        assert!((r.c[0] - (0.7 + 1.0 / 0.7)).abs() < 1e-14, "{r:?}");
    }

    #[test]
    fn homotopy_endpoints() {
        let sp = space("0.5", 4);
        let r = homotopy_family(&sp, &[0.0, 0.5, 1.0]).unwrap();
        assert!(r.endpoint_one < 1e-20 && r.endpoint_zero < 1e-10, "{r:?}");
        assert!(r.points.iter().all(|p| p.commutator_norm.is_finite() && p.commutator_norm < 10.0));
    }
}
