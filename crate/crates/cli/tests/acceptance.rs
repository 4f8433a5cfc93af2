//! Acceptance criteria, one PASS/FAIL line each. Every quantity the engine
//! derives is recomputed here from bare matrices where possible.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::Instant;

use couples_cli::document::{parse, to_canonical, Backend, Document};
use exact_couples::category::{
    canonical_bar, is_iso, is_strict, mediate_pullback, mediate_pushout, Category, NonInvertible,
    ProbeConfig, Sampler, Strictness,
};
use exact_couples::couple::{
    derive_both, iterate, Couple, Intermediates, IterateConfig, Report, Sides,
};
use exact_couples::filt::{shift_fixture, Filt};
use exact_couples::generators::{
    alpha_zero_couple, decorate, degenerate_couple, fixture_f1, lemma_suite, massey_couple,
    massey_fixture_complex, random_decorated, random_massey, trial_seed, Decoration, Lemma,
};
use exact_couples::linalg::Matrix;
use exact_couples::oracle::page_total;
use exact_couples::vect::Vect;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 0x5eed;
const VECT_COUPLES: usize = 200;
const LEMMA_TRIALS: usize = 500;
const CONES: usize = 500;
const BARS: usize = 500;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn rng(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, i))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "derived left and right couples are exact",
            derived_couples_are_exact,
        ),
        (
            "derived couples compute the cohomology of the differential",
            cohomology_identification,
        ),
        (
            "the comparison morphism is unique, satisfies its equations and is invertible",
            comparison_morphism,
        ),
        (
            "iterated derivation trees of depth three are complete",
            iterated_trees,
        ),
        (
            "the three strictness lemmas hold on random filtered instances",
            lemma_suites,
        ),
        (
            "cohomology dimensions equal nullity minus rank of the differential",
            cohomology_dimensions,
        ),
        (
            "derived Massey couples reproduce the spectral sequence pages",
            spectral_pages,
        ),
        (
            "pullback and pushout mediations exist exactly for commuting cones",
            mediations,
        ),
        (
            "canonical bars are bimorphisms and the shift fixture is not strict",
            bars_and_shift,
        ),
        (
            "the command line round-trips documents and reports exit codes",
            command_line,
        ),
    ];
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|p| Err(panic_message(p)));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {label}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {label}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panicked".into())
}

// ---------------------------------------------------------------------------
// Samples

fn vect_samples() -> &'static Vec<Couple<Vect>> {
    static SAMPLES: OnceLock<Vec<Couple<Vect>>> = OnceLock::new();
    SAMPLES.get_or_init(|| {
        (0..VECT_COUPLES)
            .into_par_iter()
            .map(|i| {
                random_massey(&mut rng(SEED, i), 3, 8)
                    .expect("random Massey couple")
                    .1
            })
            .collect()
    })
}

/// Trivially filtered Massey couples, random stacked decorations and the F1 fixture.
fn filt_samples() -> &'static Vec<Couple<Filt>> {
    static SAMPLES: OnceLock<Vec<Couple<Filt>>> = OnceLock::new();
    SAMPLES.get_or_init(|| {
        let mut out: Vec<Couple<Filt>> = (0..25)
            .into_par_iter()
            .map(|i| {
                let (_, c) =
                    random_massey(&mut rng(SEED + 1, i), 3, 7).expect("random Massey couple");
                decorate(&c, &Decoration::Trivial).expect("trivial decoration")
            })
            .collect();
        out.extend(
            (0..24)
                .into_par_iter()
                .map(|i| random_decorated(&mut rng(SEED + 2, i), 5).expect("random decoration"))
                .collect::<Vec<_>>(),
        );
        out.push(fixture_f1());
        out
    })
}

struct Derived<B: Backend> {
    parent: Couple<B>,
    report: Result<Report<B>, String>,
}

fn derive_all<B: Backend>(cat: &B, couples: &[Couple<B>]) -> Vec<Derived<B>> {
    couples
        .par_iter()
        .map(|c| Derived {
            parent: c.clone(),
            report: derive_both(cat, c, &ProbeConfig::default()).map_err(|e| e.to_string()),
        })
        .collect()
}

fn vect_reports() -> &'static Vec<Derived<Vect>> {
    static R: OnceLock<Vec<Derived<Vect>>> = OnceLock::new();
    R.get_or_init(|| derive_all(&Vect, vect_samples()))
}

fn filt_reports() -> &'static Vec<Derived<Filt>> {
    static R: OnceLock<Vec<Derived<Filt>>> = OnceLock::new();
    R.get_or_init(|| derive_all(&Filt, filt_samples()))
}

/// Runs `check` on every derivation of both sample sets, naming the first failure.
fn over_reports(
    check: fn(&Derived<Vect>) -> Result<(), String>,
    check_f: fn(&Derived<Filt>) -> Result<(), String>,
) -> Verdict {
    let (v, f) = (vect_reports(), filt_reports());
    for (i, d) in v.iter().enumerate() {
        check(d).map_err(|e| format!("vect couple {i}: {e}"))?;
    }
    for (i, d) in f.iter().enumerate() {
        check_f(d).map_err(|e| format!("filt couple {i}: {e}"))?;
    }
    let nonzero = |dims: Vec<usize>| dims.iter().filter(|&&d| d > 0).count();
    let ve = nonzero(
        v.iter()
            .filter_map(|d| d.report.as_ref().ok())
            .map(|r| r.left.couple.e().dim)
            .collect(),
    );
    let fe = nonzero(
        f.iter()
            .filter_map(|d| d.report.as_ref().ok())
            .map(|r| r.left.couple.e().dim())
            .collect(),
    );
    Ok(format!(
        "{} vect and {} filt couples, {ve} and {fe} with nonzero derived E",
        v.len(),
        f.len()
    ))
}

// ---------------------------------------------------------------------------
// Matrix oracles

fn mat<B: Backend>(f: &B::Morphism) -> &Matrix {
    B::matrix(f)
}

fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    a * b
}

/// `im a = ker b` as subspaces.
fn exact_at(a: &Matrix, b: &Matrix) -> bool {
    a.column_space() == b.nullspace()
}

fn linearly_exact(alpha: &Matrix, beta: &Matrix, gamma: &Matrix) -> Result<(), String> {
    for (x, y, rel) in [
        (alpha, beta, "im alpha = ker beta"),
        (beta, gamma, "im beta = ker gamma"),
        (gamma, alpha, "im gamma = ker alpha"),
    ] {
        if !exact_at(x, y) {
            return Err(format!("{rel} fails"));
        }
    }
    Ok(())
}

fn invertible(m: &Matrix) -> bool {
    m.is_square() && m.rank() == m.rows()
}

/// `Bᵀ ⊗ A`, the matrix of `X ↦ A X B` on column-stacked `X`.
fn kron_t(b: &Matrix, a: &Matrix) -> Matrix {
    let bt = b.transpose();
    let (p, q) = a.shape();
    let mut k = Matrix::zeros(bt.rows() * p, bt.cols() * q);
    for i in 0..bt.rows() {
        for j in 0..bt.cols() {
            k.set_block(i * p, j * q, &a.scale(&bt[(i, j)]));
        }
    }
    k
}

/// `(ρ′, σ′, σ″, ρ″)` from the two derivations.
fn left_right<B: Backend>(r: &Report<B>) -> [&B::Morphism; 4] {
    let (rho_p, sigma_p) = match &r.left.intermediates {
        Intermediates::Left { rho_p, sigma_p, .. } => (rho_p, sigma_p),
        Intermediates::Right { .. } => panic!("left derivation with right intermediates"),
    };
    let (sigma_pp, rho_pp) = match &r.right.intermediates {
        Intermediates::Right {
            sigma_pp, rho_pp, ..
        } => (sigma_pp, rho_pp),
        Intermediates::Left { .. } => panic!("right derivation with left intermediates"),
    };
    [rho_p, sigma_p, sigma_pp, rho_pp]
}

fn report<B: Backend>(d: &Derived<B>) -> Result<&Report<B>, String> {
    d.report.as_ref().map_err(|e| e.clone())
}

// ---------------------------------------------------------------------------
// Criteria

fn derived_couples_are_exact() -> Verdict {
    fn check<B: Backend>(d: &Derived<B>) -> Result<(), String> {
        let r = report(d)?;
        let parent_alpha_rank = mat::<B>(d.parent.alpha()).rank();
        for (side, dc) in [("left", &r.left), ("right", &r.right)] {
            let c = &dc.couple;
            linearly_exact(mat::<B>(c.alpha()), mat::<B>(c.beta()), mat::<B>(c.gamma()))
                .map_err(|e| format!("{side}: {e}"))?;
            if mat::<B>(c.alpha()).rows() != parent_alpha_rank {
                return Err(format!("{side}: D1 is not the image of alpha"));
            }
        }
        Ok(())
    }
    if filt_samples().len() < 50 {
        return Err("fewer than 50 filtered couples".into());
    }
    over_reports(check::<Vect>, check::<Filt>)
}

fn cohomology_identification() -> Verdict {
    fn check<B: Backend>(d: &Derived<B>) -> Result<(), String> {
        let r = report(d)?;
        let cmp = &r.comparison;
        let coh = &r.cohomology;
        for (name, iso) in [
            ("H- to E1-", &cmp.h_minus_iso),
            ("H+ to E1+", &cmp.h_plus_iso),
        ] {
            if !invertible(mat::<B>(iso)) {
                return Err(format!("{name} is not invertible"));
            }
        }
        let [rho_p, sigma_p, sigma_pp, rho_pp] = left_right::<B>(r);
        // compatibility with the canonical maps onto H⁻ and out of H⁺
        let u = mat::<B>(&cmp.e_rho_to_ker);
        if mul(mat::<B>(&coh.kerp), u) != *mat::<B>(rho_p) {
            return Err("rho' does not factor as ker d".into());
        }
        let down = mul(
            mat::<B>(&cmp.h_minus_iso),
            &mul(mat::<B>(&coh.cok_theta), u),
        );
        if down != *mat::<B>(sigma_p) {
            return Err("H- to E1- is not compatible with sigma'".into());
        }
        let v = mat::<B>(&cmp.cok_to_e_sigma);
        if mul(v, mat::<B>(&coh.cokp)) != *mat::<B>(sigma_pp) {
            return Err("sigma'' does not factor as cok d".into());
        }
        let up = mul(mat::<B>(rho_pp), mat::<B>(&cmp.h_plus_iso));
        if up != mul(v, mat::<B>(&coh.ker_tau)) {
            return Err("H+ to E1+ is not compatible with rho''".into());
        }
        Ok(())
    }
    over_reports(check::<Vect>, check::<Filt>)
}

fn comparison_morphism() -> Verdict {
    fn check<B: Backend>(d: &Derived<B>) -> Result<(), String> {
        let r = report(d)?;
        let om = &r.omega;
        if om.solution_family_dim != 0 {
            return Err(format!(
                "solution family of dimension {}",
                om.solution_family_dim
            ));
        }
        let [rho_p, sigma_p, sigma_pp, rho_pp] = left_right::<B>(r);
        let w = mat::<B>(&om.omega);
        let m = |f: &B::Morphism| mat::<B>(f).clone();
        if mul(&m(rho_pp), &mul(w, &m(sigma_p))) != mul(&m(sigma_pp), &m(rho_p)) {
            return Err("rho'' omega sigma' = sigma'' rho' fails".into());
        }
        if mul(w, &m(r.left.couple.beta())) != m(r.right.couple.beta()) {
            return Err("omega beta1- = beta1+ fails".into());
        }
        if m(r.left.couple.gamma()) != mul(&m(r.right.couple.gamma()), w) {
            return Err("gamma1- = gamma1+ omega fails".into());
        }
        // X ↦ ρ″ X σ′ is injective, so the solution is unique
        let k = kron_t(&m(sigma_p), &m(rho_pp));
        if k.rank() != k.cols() {
            return Err("rho'' X sigma' has a nontrivial solution family".into());
        }
        if !(w.is_injective() && w.is_surjective() && om.monic && om.epic) {
            return Err("omega is not monic and epic".into());
        }
        let certified =
            r.ker_partial_semistable.is_certified() || r.cok_partial_semistable.is_certified();
        if certified {
            let inv = om
                .inverse
                .as_ref()
                .ok_or("certified semistable but omega has no inverse")?;
            if mul(mat::<B>(inv), w) != Matrix::identity(w.cols()) {
                return Err("omega inverse is wrong".into());
            }
        }
        Ok(())
    }
    over_reports(check::<Vect>, check::<Filt>)
}

fn iterated_trees() -> Verdict {
    let config = IterateConfig {
        parallel: true,
        ..Default::default()
    };
    let massey = massey_couple(&massey_fixture_complex()).map_err(|e| e.to_string())?;
    let mut total = 0;
    for (name, c) in [
        ("degenerate", degenerate_couple()),
        ("alpha zero", alpha_zero_couple()),
        ("massey", massey),
    ] {
        let tree = iterate(&Vect, &c, 3, Sides::Both, &config);
        if !tree.is_complete() {
            return Err(format!("{name}: tree is incomplete"));
        }
        for k in 0..=3 {
            let n = tree.level(k).count();
            if n != 1 << k {
                return Err(format!("{name}: {n} nodes at depth {k}"));
            }
        }
        if let Some(bad) = tree.nodes.iter().find(|n| !n.certificate.all_hold()) {
            return Err(format!(
                "{name} node {:?}: {}",
                bad.path,
                bad.certificate.failed().join(", ")
            ));
        }
        for n in &tree.nodes {
            let c = &n.couple;
            linearly_exact(c.alpha().matrix(), c.beta().matrix(), c.gamma().matrix())
                .map_err(|e| format!("{name} node {:?}: {e}", n.path))?;
        }
        total += tree.nodes.len();
    }
    Ok(format!("3 trees, {total} nodes, 8 leaves each"))
}

fn lemma_suites() -> Verdict {
    let mut parts = Vec::new();
    for lemma in Lemma::ALL {
        let r = lemma_suite(&Filt, lemma, LEMMA_TRIALS, SEED)
            .map_err(|e| format!("{}: {e}", lemma.name()))?;
        if let Some(f) = r.failures.first() {
            return Err(format!(
                "{}: {} failures, first at trial {} (seed {}): {}",
                lemma.name(),
                r.failures.len(),
                f.trial,
                f.seed,
                f.conclusion
            ));
        }
        parts.push(format!("{} {}", lemma.name(), r.trials));
    }
    Ok(parts.join(", "))
}

fn cohomology_dimensions() -> Verdict {
    for (i, d) in vect_reports().iter().enumerate() {
        let r = report(d).map_err(|e| format!("vect couple {i}: {e}"))?;
        let partial = mul(d.parent.beta().matrix(), d.parent.gamma().matrix());
        let rank = partial.rank();
        let nullity = partial.nullspace().dim();
        let expected = nullity - rank;
        let (hm, hp) = (r.cohomology.h_minus.dim, r.cohomology.h_plus.dim);
        if hm != expected || hp != expected {
            return Err(format!(
                "vect couple {i}: H- {hm}, H+ {hp}, nullity - rank {expected}"
            ));
        }
    }
    Ok(format!("{} vect couples", vect_reports().len()))
}

fn spectral_pages() -> Verdict {
    let config = IterateConfig::default();
    let mut complexes = vec![massey_fixture_complex()];
    for i in 0..20 {
        complexes.push(
            random_massey(&mut rng(SEED + 3, i), 3, 8)
                .map_err(|e| e.to_string())?
                .0,
        );
    }
    let results: Vec<Result<(), String>> = complexes
        .par_iter()
        .enumerate()
        .map(|(i, fc)| {
            let cap = fc.capped();
            let c = massey_couple(fc).map_err(|e| e.to_string())?;
            let tree = iterate(&Vect, &c, 2, Sides::Both, &config);
            if !tree.is_complete() {
                return Err(format!("complex {i}: tree is incomplete"));
            }
            for k in 1..=2 {
                let page = page_total(&cap, k + 1);
                if let Some(n) = tree.level(k).find(|n| n.couple.e().dim != page) {
                    return Err(format!(
                        "complex {i} node {:?}: E has dimension {}, page {} has {page}",
                        n.path,
                        n.couple.e().dim,
                        k + 1
                    ));
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let cap = massey_fixture_complex().capped();
    Ok(format!(
        "fixture pages {} {} and {} random complexes",
        page_total(&cap, 2),
        page_total(&cap, 3),
        complexes.len() - 1
    ))
}

fn mediations() -> Verdict {
    let v = cone_trials(&Vect, SEED + 4)?;
    let f = cone_trials(&Filt, SEED + 5)?;
    Ok(format!("vect {v}, filt {f}"))
}

/// Commuting cones are built through a random `t`, so the mediation must be
/// `t`; perturbed cones that verifiably fail to commute must have none.
fn cone_trials<C: Sampler>(cat: &C, seed: u64) -> Result<String, String> {
    let outcomes: Vec<Result<(bool, bool), String>> = (0..CONES)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(seed, i);
            let obj = |r: &mut ChaCha8Rng| cat.random_object(r, 3);
            let (x, y, z, w) = (obj(&mut r), obj(&mut r), obj(&mut r), obj(&mut r));
            let e = |m: Result<C::Morphism, _>| {
                m.map_err(|e: exact_couples::category::CategoryError| e.to_string())
            };

            let f = cat.random_morphism(&mut r, &x, &z);
            let g = cat.random_morphism(&mut r, &y, &z);
            let pb = cat.pullback(&f, &g).map_err(|e| e.to_string())?;
            let t = cat.random_morphism(&mut r, &w, &pb.object);
            let (u, v) = (e(cat.compose(&pb.p1, &t))?, e(cat.compose(&pb.p2, &t))?);
            if mediate_pullback(cat, &pb, &u, &v).map_err(|e| format!("trial {i}: {e}"))? != t {
                return Err(format!("trial {i}: pullback mediation differs from t"));
            }
            let bump = cat.random_morphism(&mut r, &w, &x);
            let u2 = e(cat.add(&u, &bump))?;
            let broken_pb = e(cat.compose(&f, &u2))? != e(cat.compose(&g, &v))?;
            if broken_pb && mediate_pullback(cat, &pb, &u2, &v).is_ok() {
                return Err(format!("trial {i}: non-commuting cone was mediated"));
            }

            let f = cat.random_morphism(&mut r, &w, &x);
            let g = cat.random_morphism(&mut r, &w, &y);
            let po = cat.pushout(&f, &g).map_err(|e| e.to_string())?;
            let t = cat.random_morphism(&mut r, &po.object, &z);
            let (u, v) = (e(cat.compose(&t, &po.q1))?, e(cat.compose(&t, &po.q2))?);
            if mediate_pushout(cat, &po, &u, &v).map_err(|e| format!("trial {i}: {e}"))? != t {
                return Err(format!("trial {i}: pushout mediation differs from t"));
            }
            let bump = cat.random_morphism(&mut r, &x, &z);
            let u2 = e(cat.add(&u, &bump))?;
            let broken_po = e(cat.compose(&u2, &f))? != e(cat.compose(&v, &g))?;
            if broken_po && mediate_pushout(cat, &po, &u2, &v).is_ok() {
                return Err(format!("trial {i}: non-commuting cocone was mediated"));
            }
            Ok((broken_pb, broken_po))
        })
        .collect();
    let mut broken = (0, 0);
    for o in outcomes {
        let (a, b) = o?;
        broken.0 += a as usize;
        broken.1 += b as usize;
    }
    if broken.0 == 0 || broken.1 == 0 {
        return Err("no perturbed cone failed to commute".into());
    }
    Ok(format!(
        "{CONES} cones each way, {} and {} perturbed",
        broken.0, broken.1
    ))
}

fn bars_and_shift() -> Verdict {
    let bad: Vec<String> = (0..BARS)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = rng(SEED + 6, i);
            let x = Filt.random_object(&mut r, 4);
            let y = Filt.random_object(&mut r, 4);
            let f = Filt.random_morphism(&mut r, &x, &y);
            match canonical_bar(&Filt, &f) {
                Ok(fac) => (!invertible(fac.bar.matrix()))
                    .then(|| format!("trial {i}: bar is not a linear bijection")),
                Err(e) => Some(format!("trial {i}: {e}")),
            }
        })
        .collect();
    if let Some(b) = bad.first() {
        return Err(b.clone());
    }
    let s = shift_fixture();
    if !(Filt.is_monic(&s) && Filt.is_epic(&s)) {
        return Err("shift fixture is not a bimorphism".into());
    }
    if is_iso(&Filt, &s).map_err(|e| e.to_string())? {
        return Err("shift fixture is an isomorphism".into());
    }
    match is_strict(&Filt, &s).map_err(|e| e.to_string())? {
        Strictness::NotStrict {
            witness: NonInvertible::EscapesAt { level: 1 },
            ..
        } => {}
        other => return Err(format!("shift fixture verdict {other:?}")),
    }
    Ok(format!("{BARS} bars, shift fixture escapes at level 1"))
}

// ---------------------------------------------------------------------------
// Command line

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_couples"))
        .args(args)
        .output()
        .expect("run couples");
    let text =
        String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn command_line() -> Verdict {
    let dir = fixtures_dir();
    let names = [
        "zero.json",
        "degenerate.json",
        "alpha_zero.json",
        "zero_differential.json",
        "f1.json",
        "massey.json",
    ];
    for name in names {
        let path = dir.join(name);
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{name}: {e}"))?;
        let doc = parse(&text).map_err(|e| format!("{name}: {e}"))?;
        if to_canonical(&doc) != text {
            return Err(format!("{name} does not round-trip"));
        }
        for cmd in ["check", "cohomology"] {
            let (code, out) = run(&[cmd, &path_str(&path)]);
            if code != 0 {
                return Err(format!("{cmd} {name} exited {code}: {out}"));
            }
        }
    }

    let out = std::env::temp_dir().join(format!("couples-acceptance-{}.json", std::process::id()));
    let (code, text) = run(&[
        "derive",
        &path_str(&dir.join("massey.json")),
        "--depth",
        "2",
        "--out",
        &path_str(&out),
    ]);
    if code != 0 {
        return Err(format!("derive massey exited {code}: {text}"));
    }
    let written = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&out);
    let tree = parse(&written).map_err(|e| format!("tree document: {e}"))?;
    if to_canonical(&tree) != written {
        return Err("tree document does not round-trip".into());
    }
    match &tree {
        Document::Tree(t) if t.complete && t.nodes.len() == 7 => {}
        _ => return Err("tree document is not a complete depth-2 tree".into()),
    }

    let expectations = [
        (
            vec![
                "check".to_string(),
                path_str(&dir.join("invalid/not_exact.json")),
            ],
            1,
            "im beta = ker gamma",
        ),
        (
            vec![
                "check".to_string(),
                path_str(&dir.join("invalid/syntax.json")),
            ],
            2,
            "line 5, column 3",
        ),
        (
            vec![
                "check".to_string(),
                path_str(&dir.join("invalid/beta_not_respecting.json")),
            ],
            2,
            "morphisms.beta",
        ),
        (
            vec!["check".to_string(), path_str(&dir.join("missing.json"))],
            2,
            "",
        ),
        (
            vec![
                "derive".to_string(),
                path_str(&dir.join("zero.json")),
                "--side".into(),
                "up".into(),
            ],
            2,
            "",
        ),
    ];
    for (args, want, needle) in expectations {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, text) = run(&argv);
        if code != want || !text.contains(needle) {
            return Err(format!(
                "{} exited {code}, expected {want} mentioning {needle:?}: {text}",
                args.join(" ")
            ));
        }
    }
    Ok(format!(
        "{} fixtures, a tree document and 5 error cases",
        names.len()
    ))
}
