//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use teichlab_core::experiments::{run, Experiment, ExperimentConfig, RunOutput};
use teichlab_core::holonomy::{build_representation, curve_length, FnPoint};
use teichlab_core::metrics::{dl, lipschitz_sup, THM1_DL_OFFSET};
use teichlab_core::topology::{dehn_twist, enumerate_slopes, CurveClass, Slope};
use teichlab_core::Result;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn experiment(exp: Experiment, overrides: &[&str]) -> Result<RunOutput> {
    let cfg = ExperimentConfig::default()
        .with_overrides(overrides)
        .expect("acceptance overrides are valid");
    run(&cfg, exp)
}

fn from_run(out: RunOutput) -> Verdict {
    let passed = out.passed;
    Verdict::new(passed, out.summary)
}

fn random_point(r: &mut ChaCha8Rng) -> FnPoint {
    let l: f64 = r.gen_range((0.05f64).ln()..(4.0f64).ln()).exp();
    let s: f64 = r.gen_range(-2.0 * l..2.0 * l);
    FnPoint::torus(l, s).unwrap()
}

fn kernel() -> Result<Verdict> {
    experiment(Experiment::HexagonSelftest, &["samples=10000"]).map(from_run)
}

fn holonomy() -> Result<Verdict> {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let mut cusp: f64 = 0.0;
    for _ in 0..100 {
        let rep = build_representation(&random_point(&mut r))?;
        cusp = cusp.max((rep.commutator_trace()? + 2.0).abs());
    }

    let slopes: Vec<CurveClass> = enumerate_slopes(12).into_iter().take(50).collect();
    let meridian = CurveClass::Slope(Slope::MERIDIAN);
    let mut twist: f64 = 0.0;
    for _ in 0..100 {
        let sigma = random_point(&mut r);
        let c = sigma.coords()[0];
        let tau = FnPoint::torus(c.length, c.twist + c.length)?;
        for s in &slopes {
            let a = curve_length(&tau, s)?;
            let b = curve_length(&sigma, &dehn_twist(s, &meridian, -1)?)?;
            twist = twist.max((a - b).abs() / a.max(1.0));
        }
    }

    let mut exact = true;
    for _ in 0..100 {
        let sigma = random_point(&mut r);
        exact &= curve_length(&sigma, &meridian)? == sigma.coords()[0].length;
    }

    Ok(Verdict::new(
        cusp <= 1e-9 && twist <= 1e-9 && exact,
        format!("cusp_residual={cusp:.3e} full_twist_residual={twist:.3e} meridian_exact={exact}"),
    ))
}

fn metric_axioms() -> Result<Verdict> {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let small = enumerate_slopes(4);
    let cands = enumerate_slopes(8);
    let (mut symmetric, mut unit, mut monotone) = (true, true, true);
    let mut triangle: f64 = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let (a, b, c) = (random_point(&mut r), random_point(&mut r), random_point(&mut r));
        let ab = dl(&a, &b, &cands)?.value;
        let bc = dl(&b, &c, &cands)?.value;
        let ac = dl(&a, &c, &cands)?.value;
        symmetric &= ab == dl(&b, &a, &cands)?.value;
        unit &= lipschitz_sup(&a, &a, &cands)?.value == 1.0;
        monotone &= dl(&a, &b, &small)?.value <= ab;
        triangle = triangle.max(ac - ab - bc);
    }
    Ok(Verdict::new(
        symmetric && unit && monotone && triangle <= 1e-12,
        format!(
            "symmetric={symmetric} self_ratio_one={unit} nested_monotone={monotone} max_triangle_excess={triangle:.3e}"
        ),
    ))
}

fn torus_equality() -> Result<Verdict> {
    experiment(Experiment::TorusEquality, &["grid=10", "cutoff=200"]).map(from_run)
}

fn wolpert() -> Result<Verdict> {
    experiment(Experiment::Wolpert, &["grid=10", "cutoff=200"]).map(from_run)
}

fn annulus_lemma() -> Result<Verdict> {
    experiment(Experiment::AnnulusLemma, &[]).map(from_run)
}

fn half_plane() -> Result<Verdict> {
    experiment(Experiment::HalfPlaneCompare, &[]).map(from_run)
}

fn thm1() -> Result<Verdict> {
    let out = experiment(Experiment::Thm1Divergence, &["n_max=6"])?;
    let detail = format!("{} recorded_offset={THM1_DL_OFFSET}", out.summary);
    Ok(Verdict::new(out.passed, detail))
}

fn product_regions() -> Result<Verdict> {
    experiment(Experiment::ProdregError, &["samples=50"]).map(from_run)
}

fn thick() -> Result<Verdict> {
    experiment(Experiment::ThickCompare, &["samples=100"]).map(from_run)
}

fn determinism() -> Result<Verdict> {
    let mut same = true;
    for (exp, set) in [
        (Experiment::ThickCompare, &["samples=20", "seed=11"][..]),
        (Experiment::MarkingDistance, &["seed=11"][..]),
        (Experiment::HexagonSelftest, &["samples=500", "seed=11"][..]),
    ] {
        let a = experiment(exp, set)?;
        let b = experiment(exp, set)?;
        same &= a.csv.as_bytes() == b.csv.as_bytes();
    }
    Ok(Verdict::new(same, format!("byte_identical={same}")))
}

type Criterion = (&'static str, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("trig kernel", kernel),
        ("holonomy", holonomy),
        ("metric axioms", metric_axioms),
        ("torus equality", torus_equality),
        ("wolpert inequality", wolpert),
        ("annulus lemma", annulus_lemma),
        ("half-plane growth", half_plane),
        ("divergent family", thm1),
        ("product regions", product_regions),
        ("thick comparability", thick),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name} ({secs:.1}s) {}", i + 1, verdict.detail);
        if !verdict.passed {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
