//! One pass/fail line per acceptance criterion, with timing budgets.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::One;
use rand::{Rng, SeedableRng};

use falsetate::charelem::{
    cycle_product, evaluate, frobenius_orbits, lemma_closed_form, local_error_eval, EvalResult, LocalErrorData,
    LocalModuleSpec, ModuleKind,
};
use falsetate::cyclotomic::{CycElem, RatCyc};
use falsetate::euler::{p2_frobenius_matrix, FormData, TwistConvention};
use falsetate::group::decomposition_data;
use falsetate::linalg::Matrix;
use falsetate::padic::{teichmuller, PadicCtx, PadicScalar, Valuation};
use falsetate::reps::{character_pairing, enumerate_irreps, ArtinRep, RepContext};
use falsetate::verify::{
    evaluate_sides, ingest_form, setup_level, verify_functional_equation, verify_with_setup, RecordStatus,
    VerificationReport, VerifyOptions,
};

type Outcome = Result<String, String>;

/// Number, name, budget in seconds and check.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

const PRECISION: u32 = 40;

fn fixture(name: &str) -> FormData {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    ingest_form(&path).expect("fixture parses")
}

fn ctx(p: u64) -> Arc<PadicCtx> {
    PadicCtx::new(p, PRECISION).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same(a: &EvalResult, b: &EvalResult) -> bool {
    match (a.value(), b.value()) {
        (Some(x), Some(y)) => x.same_value(y),
        (None, None) => true,
        _ => false,
    }
}

/// `ψ_{i,j}(q)` from scratch: `ω(q) = q^{p^{N-1}} mod p^N` and `e(q)` by
/// exhaustive search for `(1+p)^e ≡ q/ω(q) mod p^n`.
fn psi_oracle(k: &Arc<PadicCtx>, n: u32, tame: u32, wild: u64, q: u64) -> CycElem {
    let p = k.p() as u64;
    let big_p = BigInt::from(p);
    let modulus = big_p.pow(PRECISION);
    let w = BigInt::from(q).modpow(&big_p.pow(PRECISION - 1), &modulus);
    let pn = p.pow(n);
    let w_small: u64 = (&w % BigInt::from(pn)).try_into().unwrap();
    let target = (0..pn).find(|t| (w_small * t) % pn == q % pn).unwrap();
    let e = (0..pn / p)
        .find(|e| BigInt::from(1 + p).modpow(&BigInt::from(*e), &BigInt::from(pn)) == BigInt::from(target))
        .unwrap();
    let omega = PadicScalar::from_int(k, w).pow(tame as u64);
    CycElem::monomial(&omega, n, (p * wild * e) % pn)
}

fn characters(rc: &Arc<RepContext>) -> Vec<ArtinRep> {
    enumerate_irreps(rc).unwrap().into_iter().filter(|e| e.is_one_dimensional()).collect()
}

fn thetas(rc: &Arc<RepContext>) -> Vec<ArtinRep> {
    enumerate_irreps(rc).unwrap().into_iter().filter(|e| !e.is_one_dimensional()).collect()
}

fn grid() -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    for p in [3u64, 5] {
        for n in [1u32, 2] {
            for q in [2u64, 7, 11] {
                if q != p {
                    out.push((p, n, q));
                }
            }
        }
    }
    out
}

fn lemma_closed_forms() -> Outcome {
    let mut checked = 0;
    for (p, n, q) in grid() {
        let k = ctx(p);
        let rc = RepContext::new(&k, n).unwrap();
        let dd = decomposition_data(q, p, n).unwrap();
        for x in [2i64, q as i64, 1 + p as i64] {
            let xs = PadicScalar::from_int(&k, x);
            for eta in characters(&rc) {
                let label = eta.label();
                let psi_f = psi_oracle(&k, n, label.tame, label.wild, q);
                ensure(eta.psi_at(q).same_value(&psi_f), || format!("psi({q}) mismatch for {label} at p={p} n={n}"))?;
                for (kind, c) in [(ModuleKind::N, x), (ModuleKind::M, q as i64 * x)] {
                    let expected = psi_f.clone() - CycElem::from_int(&k, n, c);
                    let spec = LocalModuleSpec::rank_one(dd.clone(), xs.clone(), kind).unwrap();
                    let got = evaluate(&spec, &eta).map_err(|e| e.to_string())?;
                    let ok = match got.value() {
                        Some(v) => v.same_value(&expected),
                        None => expected.is_zero(),
                    };
                    ensure(ok, || format!("{kind} closed form fails for {label}, p={p} n={n} q={q} x={x}"))?;
                    ensure(lemma_closed_form(kind, &psi_f, q, &xs).same_value(&expected), || {
                        "closed-form helper".into()
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} exact comparisons"))
}

fn theta_triviality() -> Outcome {
    let mut checked = 0;
    for (p, n, q) in grid() {
        let k = ctx(p);
        let rc = RepContext::new(&k, n).unwrap();
        let dd = decomposition_data(q, p, n).unwrap();
        let mut mats: Vec<Matrix<PadicScalar>> = [2i64, q as i64, 1 + p as i64]
            .iter()
            .map(|x| Matrix::from_rows(vec![vec![PadicScalar::from_int(&k, *x)]]))
            .collect();
        let f = fixture("11a1.json");
        if q != 11 {
            mats.push(p2_frobenius_matrix(&f, q, &k, TwistConvention::PaperDisplay).unwrap());
        }
        for x in mats {
            let nspec = LocalModuleSpec::new(dd.clone(), x.clone(), ModuleKind::N).unwrap();
            let mspec = nspec.with_kind(ModuleKind::M);
            let data = LocalErrorData::p2(&dd, x.clone()).unwrap();
            for eta in thetas(&rc) {
                let a = evaluate(&nspec, &eta).map_err(|e| e.to_string())?;
                let b = evaluate(&mspec, &eta).map_err(|e| e.to_string())?;
                ensure(same(&a, &b), || format!("N != M for {} at p={p} n={n} q={q}", eta.label()))?;
                let r = local_error_eval(&data, &eta).map_err(|e| e.to_string())?;
                ensure(r.value().is_some_and(|v| v.is_one()), || format!("local term not 1 for {}", eta.label()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} theta evaluations, N = M exactly"))
}

fn cycle_products() -> Outcome {
    let mut checked = 0;
    for (p, n, q) in grid().into_iter().chain([(3, 1, 2), (5, 3, 2)]) {
        let k = ctx(p);
        for orbit in frobenius_orbits(p as u32, n, q) {
            let v = cycle_product(&k, n, q, &orbit).map_err(|e| e.to_string())?;
            ensure(v.is_one(), || format!("orbit {orbit:?} at p={p} n={n} q={q} gives {v}"))?;
            // exact oracle over Q(ζ)
            let m = p.pow(n);
            let one = RatCyc::constant(p as u32, n, BigRational::one());
            let (mut num, mut den) = (one.clone(), one.clone());
            for &c in &orbit {
                num = num * (RatCyc::zeta_pow(p as u32, n, q * c % m) - one.clone());
                den = den * (RatCyc::zeta_pow(p as u32, n, c) - one.clone());
            }
            ensure(num == den, || format!("exact product differs on {orbit:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} orbits, all equal to 1"))
}

fn representation_sanity() -> Outcome {
    for (p, n) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2)] {
        let rc = RepContext::new(&ctx(p), n).unwrap();
        let irreps = enumerate_irreps(&rc).map_err(|e| e.to_string())?;
        let order = rc.group().order();
        let sum: u64 = irreps.iter().map(|e| (e.dimension() as u64).pow(2)).sum();
        ensure(sum == order, || format!("sum of squares {sum} != {order} at p={p} n={n}"))?;
        for eta in irreps.iter().filter(|e| !e.is_one_dimensional()) {
            let (plus, minus) = eta.complex_conjugation_signs().map_err(|e| e.to_string())?;
            ensure(plus == minus && plus + minus == eta.dimension(), || format!("d+- fails for {}", eta.label()))?;
            for q in [2u64, 7, 11].into_iter().filter(|q| *q != p) {
                let dd = decomposition_data(q, p, n).unwrap();
                ensure(eta.inertia_invariants_dim(&dd).unwrap() == 0, || {
                    format!("inertia invariants for {}", eta.label())
                })?;
            }
        }
        if (p, n) != (5, 2) {
            let g = CycElem::from_int(rc.padic(), n, order as i64);
            for (i, a) in irreps.iter().enumerate() {
                for (j, b) in irreps.iter().enumerate() {
                    let s = character_pairing(a, b).map_err(|e| e.to_string())?;
                    let ok = if i == j { s.same_value(&g) } else { s.is_zero() };
                    ensure(ok, || format!("pairing ({}, {}) at p={p} n={n}", a.label(), b.label()))?;
                }
            }
        }
    }
    Ok("completeness at four levels, orthogonality at three".into())
}

fn configs() -> Vec<(&'static str, FormData, i64, u64, u32)> {
    vec![
        ("headline n=1", fixture("11a1.json"), 11, 5, 1),
        ("headline n=2", fixture("11a1.json"), 11, 5, 2),
        ("P2 synthetic n=2", fixture("p2_synthetic.json"), 2, 5, 2),
        ("P1 delta=-1 n=2", fixture("p1_delta_minus.json"), 2, 5, 2),
    ]
}

fn all_pass(r: &VerificationReport) -> bool {
    r.summary.pass && r.records.iter().all(|x| x.status == RecordStatus::Pass) && r.exit_code() == 0
}

fn headline() -> Outcome {
    let mut lines = Vec::new();
    let opts = VerifyOptions { precision: PRECISION, ..Default::default() };
    for (name, f, a, p, n) in configs() {
        let t = Instant::now();
        let r = verify_functional_equation(&f, a, p, n, &opts).map_err(|e| e.to_string())?;
        let dt = t.elapsed();
        ensure(all_pass(&r), || format!("{name}: {}/{} pass", r.summary.passed, r.summary.total))?;
        ensure(dt < Duration::from_secs(60), || format!("{name} took {dt:?}"))?;
        lines.push(format!("{name} {}/{} in {:.2}s", r.summary.passed, r.summary.total, dt.as_secs_f64()));
    }
    // classification expected for each configuration
    let k = ctx(5);
    let cls =
        |f: &FormData, a| falsetate::classify::classify_primes(f, a, 5, 1, &k, TwistConvention::PaperDisplay).unwrap();
    ensure(cls(&fixture("11a1.json"), 11).p1 == vec![11], || "11 not in P1".into())?;
    ensure(cls(&fixture("p2_synthetic.json"), 2).p2 == vec![2], || "2 not in P2".into())?;
    ensure(cls(&fixture("p1_delta_minus.json"), 2).p1 == vec![2], || "2 not in P1".into())?;
    Ok(lines.join(", "))
}

fn degenerate_path() -> Outcome {
    let opts = VerifyOptions { precision: PRECISION, ..Default::default() };
    let mut hits = 0;
    for (f, a, p, n, q) in [(fixture("p1_delta_minus.json"), 2, 5, 1, 2u64), (fixture("11a1.json"), 11, 5, 1, 11)] {
        let k = ctx(p);
        let rc = RepContext::new(&k, n).unwrap();
        let delta = CycElem::from_int(&k, n, f.delta(q).unwrap() as i64);
        let r = verify_functional_equation(&f, a, p, n, &opts).map_err(|e| e.to_string())?;
        ensure(all_pass(&r), || format!("report fails for {}", f.label))?;
        for eta in characters(&rc) {
            if !eta.psi_at(q).same_value(&delta) {
                continue;
            }
            let rec = r.records.iter().find(|x| x.label == eta.label().to_string()).unwrap();
            ensure(rec.status == RecordStatus::Pass, || format!("{} not passing", rec.label))?;
            ensure(!rec.notes.is_empty(), || format!("{} has no cancellation note", rec.label))?;
            hits += 1;
        }
    }
    ensure(hits > 0, || "no character with psi(Frob) = delta".into())?;
    Ok(format!("{hits} degenerate characters handled by cancellation"))
}

fn frobenius_shift_invariance() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let opts = VerifyOptions { precision: PRECISION, ..Default::default() };
    let mut compared = 0;
    for (name, f, a, p, n) in configs() {
        let setup = setup_level(&f, a, p, n, &opts).map_err(|e| e.to_string())?;
        let irreps = enumerate_irreps(&setup.rc).unwrap();
        let base: Vec<Option<String>> = irreps
            .iter()
            .map(|e| evaluate_sides(&f, e, &setup.term, &setup.classification).map(|s| s.lhs.map(|v| v.to_string())))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        // five shifts per configuration, twenty in total
        for _ in 0..5 {
            let c = rng.gen_range(1..p.pow(n) as i64);
            let term = setup.term.with_frobenius_shift(c);
            for (eta, b) in irreps.iter().zip(&base) {
                let s = evaluate_sides(&f, eta, &term, &setup.classification).map_err(|e| e.to_string())?;
                let got = s.lhs.map(|v| v.to_string());
                ensure(&got == b, || format!("{name}: lhs for {} changes at c={c}", eta.label()))?;
                compared += 1;
            }
        }
    }
    Ok(format!("20 shifts, {compared} lhs values bit-identical"))
}

fn substrate() -> Outcome {
    for p in [3u64, 5] {
        let k = ctx(p);
        for n in 1..=3u32 {
            let v = (CycElem::zeta(&k, n) - CycElem::one(&k, n)).valuation().map_err(|e| e.to_string())?;
            let phi = (p.pow(n) - p.pow(n - 1)) as i64;
            ensure(v == Valuation::Finite(Rational64::new(1, phi)), || format!("v(zeta-1) = {v} at p={p} n={n}"))?;
        }
    }
    let k = ctx(5);
    let w = teichmuller(&k, 2).unwrap();
    let r = w.residue() % BigInt::from(25);
    ensure(r == BigInt::from(7), || format!("omega(2) = {r} mod 25"))?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(99);
    for i in 0..1000 {
        let (p, n) = [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (3, 3)][i % 5];
        let k = PadicCtx::new(p, 20).unwrap();
        let phi = (p.pow(n) - p.pow(n - 1)) as usize;
        let mut rand_elem = || {
            let coords: Vec<PadicScalar> =
                (0..phi).map(|_| PadicScalar::from_int(&k, rng.gen_range(-10_000..10_000))).collect();
            CycElem::from_coords(&k, n, &coords)
        };
        let (a, b, c) = (rand_elem(), rand_elem(), rand_elem());
        let ok = (a.clone() * b.clone()) * c.clone() == a.clone() * (b.clone() * c.clone())
            && a.clone() * (b.clone() + c.clone()) == a.clone() * b.clone() + a.clone() * c.clone()
            && a.clone() * b.clone() == b.clone() * a.clone()
            && (a.clone() - a.clone()).is_zero();
        ensure(ok, || format!("ring law fails on triple {i}"))?;
    }
    Ok("valuations, Teichmueller residue and 1000 ring-law triples".into())
}

fn empty_classification() -> Outcome {
    let opts = VerifyOptions { precision: PRECISION, ..Default::default() };
    let f = fixture("empty_class.json");
    let setup = setup_level(&f, 2, 5, 1, &opts).map_err(|e| e.to_string())?;
    ensure(setup.classification.p1.is_empty() && setup.classification.p2.is_empty(), || {
        "classification not empty".into()
    })?;
    for eta in enumerate_irreps(&setup.rc).unwrap() {
        let s = evaluate_sides(&f, &eta, &setup.term, &setup.classification).map_err(|e| e.to_string())?;
        ensure(s.lhs.as_ref().is_some_and(|v| v.is_one()), || format!("lhs != 1 for {}", eta.label()))?;
        ensure(s.rhs.is_one(), || format!("rhs != 1 for {}", eta.label()))?;
    }
    let r = verify_with_setup(&f, 2, 5, 1, &opts, &setup).map_err(|e| e.to_string())?;
    ensure(all_pass(&r), || "report does not pass".into())?;
    Ok(format!("{} representations, lhs = rhs = 1, exit 0", r.records.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "closed forms for characters", 10, lemma_closed_forms),
        (2, "theta evaluations are trivial", 30, theta_triviality),
        (3, "Frobenius cycle products", 1, cycle_products),
        (4, "representation completeness", 30, representation_sanity),
        (5, "identity on test configurations", 240, headline),
        (6, "degenerate Frobenius value", 10, degenerate_path),
        (7, "Frobenius lift independence", 30, frobenius_shift_invariance),
        (8, "p-adic and cyclotomic substrate", 10, substrate),
        (9, "empty classification", 1, empty_classification),
    ];
    let mut failures = 0;
    for (k, name, budget, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let dt = t.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(d) if dt <= budget as f64 => ("PASS", d),
            Ok(d) => ("FAIL", format!("over budget: {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {k} [{name}]: {status} ({dt:.2}s, budget {budget}s) {detail}");
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
