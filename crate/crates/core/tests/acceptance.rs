//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use qdirac::clifford_su3::su3_report;
use qdirac::dirac_su2::{clifford_su2, fundamental_relation, homotopy_family, spectrum_check, summability_report, GeoVariant};
use qdirac::podles::sphere_triple_report;
use qdirac::qscalar::QParam;
use qdirac::spinhilbert::SpinorSpace;
use qdirac::uq2::uq2_report;
use qdirac::uqsu2::infrastructure_report;
use qdirac::{HalfInt, Hp};

struct Verdict {
    pass: bool,
    summary: String,
}

fn q(s: &str) -> QParam<Hp> {
    QParam::parse(s).expect("valid q")
}

fn space(qs: &str, j: HalfInt) -> SpinorSpace<Hp> {
    SpinorSpace::new(j, &q(qs)).expect("space")
}

fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn spectrum() -> Verdict {
    let mut dev = 0.0f64;
    let mut mult = true;
    let mut slowest = Duration::ZERO;
    for qs in ["0.3", "0.5", "0.9"] {
        let t = Instant::now();
        let r = spectrum_check(&space(qs, HalfInt::int(4))).expect("spectrum");
        slowest = slowest.max(t.elapsed());
        dev = dev.max(r.max_deviation);
        mult &= r.multiplicities_match;
    }
    Verdict {
        pass: dev < 1e-20 && mult && slowest < Duration::from_secs(120),
        summary: format!("max eigenvalue deviation {dev:.2e} (< 1e-20), multiplicities match: {mult}, slowest q {:.1}s (< 120s)", slowest.as_secs_f64()),
    }
}

fn fundamental() -> Verdict {
    let mut res = 0.0f64;
    let mut gated = true;
    for qs in ["0.3", "0.5", "0.9"] {
        let (r, _) = fundamental_relation(&space(qs, HalfInt::int(4))).expect("fundamental");
        res = res.max(r.residual);
        // exactly one candidate survives the positivity gate, and it is the corrected entry
        gated &= r.variant == GeoVariant::Corrected && r.trials.iter().filter(|t| t.passed).count() == 1;
    }
    Verdict {
        pass: res < 1e-20 && gated,
        summary: format!("interior residual {res:.2e} (< 1e-20), sign resolved by positivity gate: {gated}"),
    }
}

fn clifford() -> Verdict {
    let res = worst(["0.3", "0.5", "0.9"].map(|s| clifford_su2(&q(s)).max_residual));
    Verdict { pass: res < 1e-25, summary: format!("five relations, max residual {res:.2e} (< 1e-25)") }
}

fn su3() -> Verdict {
    let (mut z, mut printed, mut vieta, mut cov, mut m0, mut psi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut count = true;
    for qs in ["0.3", "0.7", "0.9"] {
        let r = su3_report(&q(qs), 4).expect("su3 report");
        count &= r.solutions.len() == 4;
        z = z.max(r.z_match);
        printed = printed.max(r.printed_match);
        vieta = vieta.max(r.corrected_match);
        cov = cov.max(r.covariance_closure);
        m0 = m0.max(r.omega_zero_deviation);
        psi = psi.max(r.psi1_square);
    }
    let pass = count && z < 1e-10 && printed < 1e-10 && cov < 1e-20 && m0 < 1e-20 && psi < 1e-20;
    Verdict {
        pass,
        summary: format!(
            "4 roots: {count}; z vs z',z'' {z:.2e}; b+ vs printed b'+,b''+ {printed:.2e} (< 1e-10); \
             b+ vs Vieta forms {vieta:.2e}; covariance {cov:.2e}; m(w0) {m0:.2e}; psi1^2 {psi:.2e}"
        ),
    }
}

fn fredholm() -> Verdict {
    let r = summability_report(&space("0.5", HalfInt::int(6))).expect("summability");
    let decay = r.algebraic_decay;
    let power = r.fq_power_law.slope;
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let a = homotopy_family(&space("0.5", HalfInt::int(4)), &grid).expect("homotopy");
    let b = homotopy_family(&space("0.5", HalfInt::int(5)), &grid).expect("homotopy");
    let ends = a.endpoint_one.max(a.endpoint_zero);
    let drift = worst(a.points.iter().zip(&b.points).map(|(x, y)| (x.commutator_norm - y.commutator_norm).abs() / x.commutator_norm));
    let pass = decay.r2 > 0.99 && decay.slope < 0.0 && (-0.8..=-0.55).contains(&power) && ends < 1e-10 && drift < 0.01;
    Verdict {
        pass,
        summary: format!(
            "exp decay R^2 {:.4} (> 0.99); F_q power law {power:.3} in [-0.8, -0.55] at J=6; \
             endpoints {ends:.2e} (< 1e-10); sup_t norm {:.4}, drift {drift:.2e} (< 1%)",
            decay.r2, a.max_norm
        ),
    }
}

fn podles() -> Verdict {
    let r = sphere_triple_report(&space("0.5", HalfInt::from_twice(7))).expect("podles");
    let rel = worst(r.relations.iter().map(|n| n.residual));
    let pass = rel < 1e-25 && r.forms_agree < 1e-20 && r.ratio_deviation_q_minus_2 < 0.05 && r.gamma_anticommutator == 0.0;
    Verdict {
        pass,
        summary: format!(
            "relations {rel:.2e}; two forms {:.2e}; sector ratio vs q^-2 off by {:.1}% (< 5%), vs q^-1 off by {:.1}%; gamma {:.1e}",
            r.forms_agree,
            100.0 * r.ratio_deviation_q_minus_2,
            100.0 * r.ratio_deviation_q_minus_1,
            r.gamma_anticommutator
        ),
    }
}

fn uq2() -> Verdict {
    let r = uq2_report(&q("0.5"), HalfInt::int(4), HalfInt::int(6), 2).expect("uq2");
    let abs = r.abs_spectrum.deviation.max(r.abs_spectrum.functional_calculus);
    let drift = worst(r.probes.iter().map(|p| p.drift));
    let e = r.dimension.exponent;
    let pass = abs < 1e-20 && r.central_commutator < 1e-20 && drift < 0.01 && (3.7..=4.3).contains(&e);
    Verdict {
        pass,
        summary: format!(
            "|D| vs n_jc {abs:.2e}; [D, C] identity {:.2e}; delta^p drift {drift:.2e} (p <= 2); dimension exponent {e:.3} in [3.7, 4.3]",
            r.central_commutator
        ),
    }
}

fn infra() -> Verdict {
    let l = HalfInt::int(3);
    let reps: Vec<_> = ["0.3", "0.5", "0.9"].iter().map(|s| infrastructure_report(l, &q(s)).expect("infra")).collect();
    let res = worst(reps.iter().map(|r| r.relations.max(r.cg_unitarity).max(r.block_diagonalization)));
    let classical = infrastructure_report(l, &q("0.9999")).expect("infra").classical_cg;
    Verdict {
        pass: res < 1e-25 && classical < 1e-3,
        summary: format!("relations/unitarity/blocks {res:.2e} (< 1e-25); CG at q = 1 - 1e-4 vs Racah {classical:.2e} (< 1e-3)"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("SU_q(2) algebraic spectrum", spectrum),
        ("fundamental relation", fundamental),
        ("q-Clifford su2", clifford),
        ("SU_q(3) solutions and covariance", su3),
        ("Fredholm summability and homotopy", fredholm),
        ("Podles sphere", podles),
        ("U_q(2) triple", uq2),
        ("representation infrastructure", infra),
    ];
    let verdicts: Vec<Verdict> = std::thread::scope(|s| {
        let hs: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        hs.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), v)) in criteria.iter().zip(&verdicts).enumerate() {
        println!("criterion {} [{}] {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.summary);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of 8 criteria pass", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
