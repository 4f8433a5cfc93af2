//! Sources of exact couples and randomized lemma checks.
//!
//! * [`massey_couple`]: the exact couple of a filtered complex.
//! * [`decorate`]: lift a couple of vector spaces to filtered ones.
//! * small named fixtures;
//! * [`lemma_suite`]: hypothesis-forward random instances of three lemmas
//!   about strict morphisms, each followed by a check of the conclusion.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::category::{
    coimage, image, is_kernel, is_strict, quotient_equal, semistable_kernel, subobject_equal,
    Category, CategoryError, ProbeConfig, Sampler,
};
use crate::complex::{random_filtered_complex, FilteredComplex};
use crate::couple::{validate_couple, Couple, CoupleError};
use crate::filt::{
    first_violation, random_invertible, strict_failure_level, Filt, FiltMorphism, FiltObject,
};
use crate::linalg::{Matrix, Subquotient, Subspace};
use crate::vect::{Vect, VectMorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error(transparent)]
    Couple(#[from] CoupleError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("connecting map depends on the chosen lift (level {p}, degree {n})")]
    LiftDependence { p: usize, n: usize },
    #[error("decoration: {morphism} does not respect the filtrations at level {level}")]
    NotRespecting {
        morphism: &'static str,
        level: usize,
    },
    #[error("decoration breaks strictness: {morphism} fails at level {level}")]
    BreaksStrictness {
        morphism: &'static str,
        level: usize,
    },
    #[error("decoration: {0}")]
    Decoration(String),
    #[error("no instance satisfying the hypotheses of lemma {lemma} after {attempts} attempts")]
    Retries { lemma: Lemma, attempts: usize },
}

pub type Result<T, E = GeneratorError> = std::result::Result<T, E>;

// ---------------------------------------------------------------------------
// Massey couples

/// `H_n(F_p)` as a subquotient of `C_n`.
fn filtered_homology(fc: &FilteredComplex, p: usize, n: usize) -> Result<Subquotient> {
    let cycles = fc
        .step(p as isize, n)
        .intersection(&fc.d(n).nullspace())
        .map_err(internal)?;
    let bounds = fc.step(p as isize, n + 1).image(&fc.d(n + 1));
    Subquotient::new(&cycles, &bounds).map_err(internal)
}

/// `H_n(F_p / F_{p+1})`: chains of `F_p` with boundary in `F_{p+1}`, modulo
/// `F_{p+1}` and boundaries from `F_p`.
fn graded_homology(fc: &FilteredComplex, p: usize, n: usize) -> Result<(Subquotient, Subspace)> {
    let p = p as isize;
    let below = if n == 0 {
        Subspace::zero(0)
    } else {
        fc.step(p + 1, n - 1)
    };
    let relative_cycles = fc
        .step(p, n)
        .intersection(&below.preimage(&fc.d(n)))
        .map_err(internal)?;
    let killed = fc
        .step(p + 1, n)
        .sum(&fc.step(p, n + 1).image(&fc.d(n + 1)))
        .map_err(internal)?;
    Ok((
        Subquotient::new(&relative_cycles, &killed).map_err(internal)?,
        killed,
    ))
}

fn internal(e: impl fmt::Display) -> GeneratorError {
    GeneratorError::Internal(e.to_string())
}

fn offsets(sizes: &[Vec<usize>]) -> (Vec<Vec<usize>>, usize) {
    let mut total = 0;
    let table = sizes
        .iter()
        .map(|row| {
            row.iter()
                .map(|&s| {
                    let at = total;
                    total += s;
                    at
                })
                .collect()
        })
        .collect();
    (table, total)
}

/// The exact couple `D = ⊕ H_n(F_p)`, `E = ⊕ H_n(F_p / F_{p+1})` of a
/// filtered complex, with `α` induced by `F_{p+1} ⊆ F_p`, `β` by the
/// projections, and `γ` the connecting map `E_{p,n} → D_{p+1,n−1}`.
///
/// The couple is built on [`FilteredComplex::capped`], whose total homology
/// vanishes; otherwise `D` would need infinitely many copies of `H(C)` below
/// level 0 to be exact. The connecting map is computed on one lift per class
/// and then recomputed on a second, randomly perturbed lift.
pub fn massey_couple(fc: &FilteredComplex) -> Result<Couple<Vect>> {
    let cap = fc.capped();
    let levels = cap.levels();
    let degrees = cap.dims().len();

    let mut d_parts = Vec::with_capacity(levels);
    let mut e_parts = Vec::with_capacity(levels);
    for p in 0..levels {
        d_parts.push(
            (0..degrees)
                .map(|n| filtered_homology(&cap, p, n))
                .collect::<Result<Vec<_>>>()?,
        );
        e_parts.push(
            (0..degrees)
                .map(|n| graded_homology(&cap, p, n))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let d_sizes: Vec<Vec<usize>> = d_parts
        .iter()
        .map(|r| r.iter().map(Subquotient::dim).collect())
        .collect();
    let e_sizes: Vec<Vec<usize>> = e_parts
        .iter()
        .map(|r| r.iter().map(|(q, _)| q.dim()).collect())
        .collect();
    let (d_at, d_dim) = offsets(&d_sizes);
    let (e_at, e_dim) = offsets(&e_sizes);

    let mut alpha = Matrix::zeros(d_dim, d_dim);
    let mut beta = Matrix::zeros(e_dim, d_dim);
    let mut gamma = Matrix::zeros(d_dim, e_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_7373);
    let missing = || GeneratorError::Internal("representative outside its subquotient".into());

    for p in 0..levels {
        for n in 0..degrees {
            let reps = d_parts[p][n].representatives();
            if p >= 1 {
                let block = d_parts[p - 1][n].reduce(reps).ok_or_else(missing)?;
                alpha.set_block(d_at[p - 1][n], d_at[p][n], &block);
            }
            let block = e_parts[p][n].0.reduce(reps).ok_or_else(missing)?;
            beta.set_block(e_at[p][n], d_at[p][n], &block);

            if n == 0 || p + 1 >= levels {
                continue;
            }
            let (quotient, killed) = &e_parts[p][n];
            let lifts = quotient.representatives();
            let target = &d_parts[p + 1][n - 1];
            let block = target.reduce(&(&cap.d(n) * lifts)).ok_or_else(missing)?;
            let shift =
                killed.basis() * &crate::vect::random_entries(&mut rng, killed.dim(), lifts.cols());
            let other = target
                .reduce(&(&cap.d(n) * &(lifts + &shift)))
                .ok_or(GeneratorError::LiftDependence { p, n })?;
            if other != block {
                return Err(GeneratorError::LiftDependence { p, n });
            }
            gamma.set_block(d_at[p + 1][n - 1], e_at[p][n], &block);
        }
    }
    Ok(validate_couple(
        &Vect,
        VectMorphism::from_matrix(alpha),
        VectMorphism::from_matrix(beta),
        VectMorphism::from_matrix(gamma),
    )?)
}

/// A random filtered complex (three degrees, `levels` levels, total
/// dimension at most `max_total`) together with its Massey couple.
pub fn random_massey<R: Rng + ?Sized>(
    rng: &mut R,
    levels: usize,
    max_total: usize,
) -> Result<(FilteredComplex, Couple<Vect>)> {
    let fc = random_filtered_complex(rng, 3, levels, max_total);
    let c = massey_couple(&fc)?;
    Ok((fc, c))
}

// ---------------------------------------------------------------------------
// Fixtures

fn vect_couple(
    alpha: &[&[i64]],
    beta: &[&[i64]],
    gamma: &[&[i64]],
    d: usize,
    e: usize,
) -> Couple<Vect> {
    let m = |rows: &[&[i64]], r: usize, c: usize| {
        if rows.is_empty() {
            Matrix::zeros(r, c)
        } else {
            Matrix::from_i64(rows)
        }
    };
    validate_couple(
        &Vect,
        VectMorphism::from_matrix(m(alpha, d, d)),
        VectMorphism::from_matrix(m(beta, e, d)),
        VectMorphism::from_matrix(m(gamma, d, e)),
    )
    .expect("fixture couple is exact")
}

/// `D = E = 0`.
pub fn zero_couple() -> Couple<Vect> {
    vect_couple(&[], &[], &[], 0, 0)
}

/// `D = ℚ`, `E = 0`, `α = id`.
pub fn degenerate_couple() -> Couple<Vect> {
    vect_couple(&[&[1]], &[], &[], 1, 0)
}

/// `D = ℚ`, `E = ℚ²`, `α = 0`, `β = e₁`, `γ = e₂*`; here `∂ = [[0,1],[0,0]]`.
pub fn alpha_zero_couple() -> Couple<Vect> {
    vect_couple(&[&[0]], &[&[1], &[0]], &[&[0, 1]], 1, 2)
}

/// `α = β = γ = [[0,1],[0,0]]` on `ℚ²`; its differential is zero.
pub fn nilpotent_couple() -> Couple<Vect> {
    let n: &[&[i64]] = &[&[0, 1], &[0, 0]];
    vect_couple(n, n, n, 2, 2)
}

/// The filtered complex behind the shipped Massey fixture: three degrees,
/// filtration `F₀ ⊇ F₁ ⊇ F₂ ⊇ F₃ = 0`, total dimension 12.
pub fn massey_fixture_complex() -> FilteredComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(MASSEY_FIXTURE_SEED);
    loop {
        let fc = random_filtered_complex(&mut rng, 3, 3, 12);
        if fc.total_dim() == 12 {
            return fc;
        }
    }
}

const MASSEY_FIXTURE_SEED: u64 = 20;

/// Componentwise direct sum of two couples of vector spaces.
pub fn direct_sum(a: &Couple<Vect>, b: &Couple<Vect>) -> Couple<Vect> {
    let sum = |f: &VectMorphism, g: &VectMorphism| {
        VectMorphism::from_matrix(f.matrix().block_diag(g.matrix()))
    };
    validate_couple(
        &Vect,
        sum(a.alpha(), b.alpha()),
        sum(a.beta(), b.beta()),
        sum(a.gamma(), b.gamma()),
    )
    .expect("a sum of exact couples is exact")
}

/// The couple `(gα g⁻¹, hβ g⁻¹, gγ h⁻¹)` for invertible `g` on `D`, `h` on `E`.
pub fn transport(c: &Couple<Vect>, g: &Matrix, h: &Matrix) -> Couple<Vect> {
    let gi = g.inverse().expect("g invertible");
    let hi = h.inverse().expect("h invertible");
    let conj =
        |l: &Matrix, f: &VectMorphism, r: &Matrix| VectMorphism::from_matrix(&(l * f.matrix()) * r);
    validate_couple(
        &Vect,
        conj(g, c.alpha(), &gi),
        conj(h, c.beta(), &gi),
        conj(g, c.gamma(), &hi),
    )
    .expect("transport preserves exactness")
}

/// A couple together with filtrations on `D` and `E`; feed to [`decorate`].
#[derive(Clone, Debug)]
pub struct Stacked {
    pub couple: Couple<Vect>,
    pub d: FiltObject,
    pub e: FiltObject,
}

/// Direct sum of couples, the `i`-th filtered trivially and shifted by
/// `shifts[i]`, then moved into a generic basis by `g` on `D` and `h` on `E`.
pub fn stack(parts: &[(Couple<Vect>, usize)], g: &Matrix, h: &Matrix) -> Stacked {
    let mut couple = zero_couple();
    let mut d = FiltObject::trivial(0);
    let mut e = FiltObject::trivial(0);
    for (c, s) in parts {
        couple = direct_sum(&couple, c);
        d = d.direct_sum(&FiltObject::trivial(c.d().dim).shifted(*s));
        e = e.direct_sum(&FiltObject::trivial(c.e().dim).shifted(*s));
    }
    Stacked {
        couple: transport(&couple, g, h),
        d: d.transported(g),
        e: e.transported(h),
    }
}

/// Fixture F1: three elementary couples on levels 0, 1 and 2, in a
/// non-coordinate basis. `D` and `E` are four-dimensional with
/// `F₀ ⊋ F₁ ⊋ F₂ ⊋ F₃ = 0` on `D`.
pub fn fixture_f1_parts() -> Stacked {
    let g = Matrix::from_i64(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[1, 0, 0, 2]]);
    let h = Matrix::from_i64(&[&[1, 0, 1, 0], &[0, 1, 0, 0], &[2, 0, 1, 1], &[0, 0, 0, 1]]);
    stack(
        &[
            (alpha_zero_couple(), 0),
            (degenerate_couple(), 1),
            (nilpotent_couple(), 2),
        ],
        &g,
        &h,
    )
}

pub fn fixture_f1() -> Couple<Filt> {
    let s = fixture_f1_parts();
    decorate(&s.couple, &Decoration::Filtrations { d: s.d, e: s.e })
        .expect("fixture F1 is a strict filtered couple")
}

/// Decorates `α = [[0,1],[0,0]]`-type data so that `β` is not strict: `E`
/// gets the filtration `E ⊇ im β ⊇ 0` while `D` stays trivially filtered.
pub fn adversarial_decoration(c: &Couple<Vect>) -> Decoration {
    let e = c.e().dim;
    let im = c.beta().matrix().column_space();
    Decoration::Filtrations {
        d: FiltObject::trivial(c.d().dim),
        e: FiltObject::new(e, vec![Subspace::full(e), im, Subspace::zero(e)]).expect("nested"),
    }
}

// ---------------------------------------------------------------------------
// Decorations

#[derive(Clone, Debug)]
pub enum Decoration {
    /// `V ⊇ 0` on both objects.
    Trivial,
    /// Explicit filtrations of `D` and `E`.
    Filtrations { d: FiltObject, e: FiltObject },
}

/// Lifts a couple of vector spaces to filtered ones. The filtrations must be
/// respected by `α`, `β`, `γ`, and all three must stay strict.
pub fn decorate(c: &Couple<Vect>, scheme: &Decoration) -> Result<Couple<Filt>> {
    let (fd, fe) = match scheme {
        Decoration::Trivial => (
            FiltObject::trivial(c.d().dim),
            FiltObject::trivial(c.e().dim),
        ),
        Decoration::Filtrations { d, e } => (d.clone(), e.clone()),
    };
    if fd.dim() != c.d().dim || fe.dim() != c.e().dim {
        return Err(GeneratorError::Decoration(
            "filtration dimensions do not match the couple".into(),
        ));
    }
    let maps = [
        ("alpha", c.alpha(), &fd, &fd),
        ("beta", c.beta(), &fd, &fe),
        ("gamma", c.gamma(), &fe, &fd),
    ];
    let mut lifted = Vec::with_capacity(3);
    for (name, f, s, t) in maps {
        if let Some(level) = first_violation(f.matrix(), s, t) {
            return Err(GeneratorError::NotRespecting {
                morphism: name,
                level,
            });
        }
        lifted.push((
            name,
            FiltMorphism::new(s.clone(), t.clone(), f.matrix().clone())?,
        ));
    }
    for (name, m) in &lifted {
        if let Some(level) = strict_failure_level(m) {
            return Err(GeneratorError::BreaksStrictness {
                morphism: name,
                level,
            });
        }
    }
    let [alpha, beta, gamma] =
        <[_; 3]>::try_from(lifted.into_iter().map(|(_, m)| m).collect::<Vec<_>>())
            .expect("three maps");
    Ok(validate_couple(&Filt, alpha, beta, gamma)?)
}

/// A random filtered couple: two or three small Massey or elementary couples
/// on distinct filtration levels, moved into a random basis.
pub fn random_decorated<R: Rng + ?Sized>(rng: &mut R, max_total: usize) -> Result<Couple<Filt>> {
    let pieces = rng.gen_range(2..=3);
    let mut parts = Vec::with_capacity(pieces);
    for i in 0..pieces {
        let c = match rng.gen_range(0..5) {
            0 => degenerate_couple(),
            1 => alpha_zero_couple(),
            2 => nilpotent_couple(),
            _ => random_massey(rng, 2, max_total)?.1,
        };
        parts.push((c, i + rng.gen_range(0..=1)));
    }
    let dd: usize = parts.iter().map(|(c, _)| c.d().dim).sum();
    let de: usize = parts.iter().map(|(c, _)| c.e().dim).sum();
    let g = random_invertible(rng, dd);
    let h = random_invertible(rng, de);
    let s = stack(&parts, &g, &h);
    decorate(&s.couple, &Decoration::Filtrations { d: s.d, e: s.e })
}

// ---------------------------------------------------------------------------
// Lemma suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// `α = cok β` and `im β = ker(ρα)` imply `ρ` monic.
    First,
    /// `ρ` a kernel and `coim α = cok(ρβ)` imply `im β = ker(αρ)`.
    Second,
    /// Pushing a strict `x` with semistable image along any `s` gives a strict
    /// `y` whose image is again a semistable kernel.
    PushoutStrict,
}

impl Lemma {
    pub const ALL: [Lemma; 3] = [Lemma::First, Lemma::Second, Lemma::PushoutStrict];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::First => "first",
            Lemma::Second => "second",
            Lemma::PushoutStrict => "pushout_strict",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown lemma {s:?}"))
    }
}

/// A trial whose conclusion failed, with everything needed to replay it.
#[derive(Clone, Debug)]
pub struct LemmaFailure {
    pub trial: usize,
    pub seed: u64,
    pub conclusion: &'static str,
    pub instance: String,
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub trials: usize,
    /// Instances discarded because a re-verified hypothesis did not hold.
    pub discarded: usize,
    pub failures: Vec<LemmaFailure>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const MAX_ATTEMPTS: usize = 64;
const LEMMA_MAX_DIM: usize = 3;

/// Seed of trial `i` in a suite seeded with `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(i as u64)
        .rotate_left(17)
}

enum Trial {
    Held,
    Failed(&'static str, String),
}

/// Runs `trials` independent instances of `lemma`, in parallel, each with
/// its own derived seed.
pub fn lemma_suite<C: Sampler>(
    cat: &C,
    lemma: Lemma,
    trials: usize,
    seed: u64,
) -> Result<LemmaReport>
where
    C::Morphism: Send,
{
    let outcomes: Vec<Result<(usize, Trial)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            for attempt in 0..MAX_ATTEMPTS {
                let outcome = match lemma {
                    Lemma::First => first_trial(cat, &mut rng)?,
                    Lemma::Second => second_trial(cat, &mut rng)?,
                    Lemma::PushoutStrict => pushout_trial(cat, &mut rng)?,
                };
                if let Some(t) = outcome {
                    return Ok((attempt, t));
                }
            }
            Err(GeneratorError::Retries {
                lemma,
                attempts: MAX_ATTEMPTS,
            })
        })
        .collect();
    let mut report = LemmaReport {
        lemma,
        trials,
        discarded: 0,
        failures: Vec::new(),
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let (discarded, trial) = outcome?;
        report.discarded += discarded;
        if let Trial::Failed(conclusion, instance) = trial {
            report.failures.push(LemmaFailure {
                trial: i,
                seed: trial_seed(seed, i),
                conclusion,
                instance,
            });
        }
    }
    Ok(report)
}

/// `⟨m, t⟩ : X → M ⊕ Z` for a random bimorphism `m` and random `t`: monic,
/// and a kernel exactly when `m` is strict.
fn random_monic<C: Sampler, R: Rng + ?Sized>(
    cat: &C,
    rng: &mut R,
    x: &C::Object,
) -> Result<C::Morphism> {
    let m = cat.random_bimorphism(rng, x);
    if rng.gen_bool(0.3) {
        return Ok(m);
    }
    let z = cat.random_object(rng, 2);
    let t = cat.random_morphism(rng, x, &z);
    pair(cat, &m, &t)
}

/// `⟨f, g⟩ = i₁f + i₂g` into the biproduct of the targets.
fn pair<C: Category>(cat: &C, f: &C::Morphism, g: &C::Morphism) -> Result<C::Morphism> {
    let bp = cat.biproduct(&cat.target(f), &cat.target(g));
    let a = cat.compose(&bp.inj[0], f)?;
    let b = cat.compose(&bp.inj[1], g)?;
    Ok(cat.add(&a, &b)?)
}

fn first_trial<C: Sampler, R: Rng + ?Sized>(cat: &C, rng: &mut R) -> Result<Option<Trial>> {
    let a = cat.random_object(rng, LEMMA_MAX_DIM);
    let b = cat.random_object(rng, LEMMA_MAX_DIM);
    let beta = cat.random_morphism(rng, &a, &b);
    let alpha = cat.cokernel(&beta);
    let c = cat.target(&alpha);
    let rho = match rng.gen_range(0..3) {
        0 => cat.identity(&c),
        1 => {
            let y = cat.random_object(rng, LEMMA_MAX_DIM + 1);
            cat.random_morphism(rng, &c, &y)
        }
        _ => random_monic(cat, rng, &c)?,
    };
    let hypotheses = quotient_equal(cat, &alpha, &cat.cokernel(&beta))?.is_some()
        && subobject_equal(
            cat,
            &image(cat, &beta),
            &cat.kernel(&cat.compose(&rho, &alpha)?),
        )?
        .is_some();
    if !hypotheses {
        return Ok(None);
    }
    let kernel_is_zero = cat.is_zero_object(&cat.source(&cat.kernel(&rho)));
    Ok(Some(if cat.is_monic(&rho) && kernel_is_zero {
        Trial::Held
    } else {
        Trial::Failed(
            "rho is a monomorphism",
            format!("beta = {beta:?}\nrho = {rho:?}"),
        )
    }))
}

fn second_trial<C: Sampler, R: Rng + ?Sized>(cat: &C, rng: &mut R) -> Result<Option<Trial>> {
    let rho = if rng.gen_bool(0.5) {
        let x = cat.random_object(rng, LEMMA_MAX_DIM);
        let y = cat.random_object(rng, LEMMA_MAX_DIM);
        let g = cat.random_morphism(rng, &x, &y);
        cat.kernel(&g)
    } else {
        let b = cat.random_object(rng, LEMMA_MAX_DIM);
        let z = cat.random_object(rng, 2);
        let t = cat.random_morphism(rng, &b, &z);
        pair(cat, &cat.identity(&b), &t)?
    };
    let b = cat.source(&rho);
    let a = cat.random_object(rng, LEMMA_MAX_DIM);
    let beta = if rng.gen_bool(0.15) {
        cat.zero(&a, &b)
    } else {
        cat.random_morphism(rng, &a, &b)
    };
    let rho_beta = cat.compose(&rho, &beta)?;
    let q = cat.cokernel(&rho_beta);
    let m = random_monic(cat, rng, &cat.target(&q))?;
    let alpha = cat.compose(&m, &q)?;
    let hypotheses = is_kernel(cat, &rho)?
        && quotient_equal(cat, &coimage(cat, &alpha), &cat.cokernel(&rho_beta))?.is_some();
    if !hypotheses {
        return Ok(None);
    }
    let alpha_rho = cat.compose(&alpha, &rho)?;
    Ok(Some(
        if subobject_equal(cat, &image(cat, &beta), &cat.kernel(&alpha_rho))?.is_some() {
            Trial::Held
        } else {
            Trial::Failed(
                "im beta = ker(alpha rho)",
                format!("beta = {beta:?}\nrho = {rho:?}\nalpha = {alpha:?}"),
            )
        },
    ))
}

fn pushout_trial<C: Sampler, R: Rng + ?Sized>(cat: &C, rng: &mut R) -> Result<Option<Trial>> {
    let a = cat.random_object(rng, LEMMA_MAX_DIM);
    let x = match rng.gen_range(0..3) {
        // a cokernel followed by a split kernel
        0 => {
            let a0 = cat.random_object(rng, LEMMA_MAX_DIM);
            let f = cat.random_morphism(rng, &a0, &a);
            let c = cat.cokernel(&f);
            let z = cat.random_object(rng, 2);
            let t = cat.random_morphism(rng, &cat.target(&c), &z);
            let k = pair(cat, &cat.identity(&cat.target(&c)), &t)?;
            cat.compose(&k, &c)?
        }
        // a kernel
        1 => {
            let y = cat.random_object(rng, LEMMA_MAX_DIM);
            let g = cat.random_morphism(rng, &a, &y);
            cat.kernel(&g)
        }
        // any random morphism; the strictness check below decides
        _ => {
            let b = cat.random_object(rng, LEMMA_MAX_DIM);
            cat.random_morphism(rng, &a, &b)
        }
    };
    let probes = ProbeConfig {
        probes: 2,
        seed: rng.gen(),
        max_dim: 2,
    };
    if !is_strict(cat, &x)?.is_strict()
        || !semistable_kernel(cat, &image(cat, &x), &probes)?.holds()
    {
        return Ok(None);
    }
    let c = cat.random_object(rng, LEMMA_MAX_DIM);
    let s = cat.random_morphism(rng, &cat.source(&x), &c);
    let po = cat.pushout(&x, &s)?;
    let y = po.q2;
    if !is_strict(cat, &y)?.is_strict() {
        return Ok(Some(Trial::Failed(
            "y is strict",
            format!("x = {x:?}\ns = {s:?}\ny = {y:?}"),
        )));
    }
    let im = image(cat, &y);
    let verdict = match semistable_kernel(cat, &im, &probes) {
        Ok(v) => v.holds(),
        Err(CategoryError::NotAKernel) => false,
        Err(e) => return Err(e.into()),
    };
    Ok(Some(if verdict {
        Trial::Held
    } else {
        Trial::Failed(
            "im y is a semistable kernel",
            format!("x = {x:?}\ns = {s:?}\ny = {y:?}"),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couple::{derive, Side};
    use crate::oracle;

    #[test]
    fn elementary_fixtures_are_exact() {
        for c in [
            zero_couple(),
            degenerate_couple(),
            alpha_zero_couple(),
            nilpotent_couple(),
        ] {
            assert!(decorate(&c, &Decoration::Trivial).is_ok());
        }
    }

    #[test]
    fn massey_couple_of_an_acyclic_pair_is_zero() {
        // 0 → ℚ →id ℚ → 0 with the trivial filtration
        let fc = FilteredComplex::new(
            vec![1, 1],
            vec![Matrix::from_i64(&[&[1]])],
            vec![vec![Subspace::full(1); 2], vec![Subspace::zero(1); 2]],
        )
        .unwrap();
        let c = massey_couple(&fc).unwrap();
        assert_eq!((c.d().dim, c.e().dim), (0, 0));
    }

    #[test]
    fn massey_couple_of_zero_differential() {
        // d = 0, C_0 = ℚ², C_1 = ℚ, F_1 C_0 = ⟨e₁⟩, F_1 C_1 = 0
        let e1 = Subspace::span(&Matrix::from_i64(&[&[1], &[0]]));
        let fc = FilteredComplex::new(
            vec![2, 1],
            vec![Matrix::zeros(2, 1)],
            vec![
                vec![Subspace::full(2), Subspace::full(1)],
                vec![e1, Subspace::zero(1)],
                vec![Subspace::zero(2), Subspace::zero(1)],
            ],
        )
        .unwrap();
        let c = massey_couple(&fc).unwrap();
        // the cap contributes nothing to D: H(F'₀) = 0, H(F'_{p+1}) = F_p
        assert_eq!(c.d().dim, 3 + 1);
        // α maps H(F'₂) = F₁ injectively into H(F'₁) = C; rank α = dim F₁
        assert_eq!(c.alpha().matrix().rank(), 1);
        let (d_dim, e_dim) = oracle::couple_dims(&fc.capped());
        assert_eq!((c.d().dim, c.e().dim), (d_dim, e_dim));
    }

    #[test]
    fn massey_dimensions_match_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..8 {
            let (fc, c) = random_massey(&mut rng, 3, 6).unwrap();
            let cap = fc.capped();
            assert_eq!((c.d().dim, c.e().dim), oracle::couple_dims(&cap));
            let left = derive(&Vect, &c, Side::Left).unwrap();
            assert_eq!(left.couple.e().dim, oracle::page_total(&cap, 2));
        }
    }

    #[test]
    fn massey_fixture_shape() {
        let fc = massey_fixture_complex();
        assert_eq!(fc.total_dim(), 12);
        assert_eq!(fc.levels(), 4);
    }

    #[test]
    fn f1_is_strict_and_nontrivially_filtered() {
        let c = fixture_f1();
        assert!(c.d().dim() <= 6 && c.e().dim() <= 6);
        assert_eq!(c.d().len(), 4);
        for f in [c.alpha(), c.beta(), c.gamma()] {
            assert!(strict_failure_level(f).is_none());
        }
    }

    #[test]
    fn adversarial_decoration_is_rejected_with_a_level() {
        let c = alpha_zero_couple();
        let err = decorate(&c, &adversarial_decoration(&c)).unwrap_err();
        assert_eq!(
            err,
            GeneratorError::BreaksStrictness {
                morphism: "beta",
                level: 1
            }
        );
    }

    #[test]
    fn non_respecting_decoration_is_rejected() {
        // E shifted while D is not: γ = e₂* maps F₁E = E onto D ⊄ F₁D = 0
        let c = alpha_zero_couple();
        let scheme = Decoration::Filtrations {
            d: FiltObject::trivial(1),
            e: FiltObject::trivial(2).shifted(1),
        };
        assert_eq!(
            decorate(&c, &scheme).unwrap_err(),
            GeneratorError::NotRespecting {
                morphism: "gamma",
                level: 1
            }
        );
    }

    #[test]
    fn random_decorations_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            random_decorated(&mut rng, 4).unwrap();
        }
    }

    #[test]
    fn lemma_suites_in_vect_and_filt() {
        for lemma in Lemma::ALL {
            let r = lemma_suite(&Vect, lemma, 20, 4).unwrap();
            assert!(r.passed(), "{lemma}: {:?}", r.failures);
            let r = lemma_suite(&Filt, lemma, 20, 4).unwrap();
            assert!(r.passed(), "{lemma}: {:?}", r.failures);
        }
    }

    #[test]
    fn lemma_suite_is_deterministic() {
        let a = lemma_suite(&Filt, Lemma::First, 10, 77).unwrap();
        let b = lemma_suite(&Filt, Lemma::First, 10, 77).unwrap();
        assert_eq!(a.discarded, b.discarded);
    }
}
