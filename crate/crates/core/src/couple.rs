//! Exact couples and their derivation.
//!
//! An exact couple is `α: D → D`, `β: D → E`, `γ: E → D` with
//! `im α = ker β`, `im β = ker γ`, `im γ = ker α`. When `α` is strict it
//! splits as `α = ρσ` through `D₁ = Im α`, and two derived couples arise:
//!
//! * left: pull `ρ` back along `γ` to get `E_ρ`, then push out along `σ`;
//! * right: push out along `σ` first to get `E^σ`, then pull back along `ρ`.
//!
//! Their `E` objects are the left and right cohomology of `∂ = βγ`, joined
//! by the comparison morphism `ω` of [`omega`]. Every identity the
//! construction relies on is checked when the value is built, so a
//! [`DerivedCouple`] that exists is a certified one.

use std::fmt;

use thiserror::Error;

use crate::category::{
    canonical_bar, chain, coimage, factor_through_epi, factor_through_mono, image, invert,
    is_cokernel, is_kernel, is_strict, mediate_pullback, mediate_pushout, quotient_equal,
    semistable_cokernel, semistable_kernel, subobject_equal, Category, CategoryError, Mediation,
    NonInvertible, ProbeConfig, Sampler, Semistability, Strictness,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoupleError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("couple has the wrong shape: {0}")]
    Shape(&'static str),
    #[error("not exact: {0}")]
    NotExact(String),
    #[error("alpha is not strict: {0}")]
    AlphaNotStrict(NonInvertible),
    #[error("construction identity {0} does not hold")]
    IdentityFailed(&'static str),
    #[error("{side} derived couple is not exact: {detail}")]
    DerivedNotExact { side: Side, detail: String },
    #[error("not a differential: the square of the map is nonzero")]
    NotADifferential,
    #[error("cohomology comparison failed: {0}")]
    Comparison(&'static str),
    #[error("omega is not an isomorphism although {0} is semistable")]
    OmegaNotIso(&'static str),
    #[error("semistability refuted for {0}")]
    SemistabilityRefuted(&'static str),
}

pub type Result<T, E = CoupleError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

fn ensure_eq<M: PartialEq>(lhs: &M, rhs: &M, name: &'static str) -> Result<()> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(CoupleError::IdentityFailed(name))
    }
}

fn ensure_zero<C: Category>(cat: &C, f: &C::Morphism, name: &'static str) -> Result<()> {
    if cat.is_zero(f) {
        Ok(())
    } else {
        Err(CoupleError::IdentityFailed(name))
    }
}

/// A validated exact couple. Only [`validate_couple`] builds one.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCouple<O, M> {
    d: O,
    e: O,
    alpha: M,
    beta: M,
    gamma: M,
}

pub type Couple<C> = ExactCouple<<C as Category>::Object, <C as Category>::Morphism>;

impl<O, M> ExactCouple<O, M> {
    pub fn d(&self) -> &O {
        &self.d
    }
    pub fn e(&self) -> &O {
        &self.e
    }
    pub fn alpha(&self) -> &M {
        &self.alpha
    }
    pub fn beta(&self) -> &M {
        &self.beta
    }
    pub fn gamma(&self) -> &M {
        &self.gamma
    }
}

/// One of the three exactness conditions, checked both as an equality of
/// subobjects and as the equivalent equality of quotients.
#[derive(Clone, Debug)]
pub struct ExactnessCheck<M> {
    /// e.g. `im α = ker β`
    pub subobject_relation: &'static str,
    /// e.g. `cok α = coim β`
    pub quotient_relation: &'static str,
    pub image: M,
    pub kernel: M,
    /// `u` with `kernel ∘ u = image`.
    pub subobject_iso: Option<M>,
    /// `v` with `v ∘ cok = coim`.
    pub quotient_iso: Option<M>,
}

impl<M> ExactnessCheck<M> {
    pub fn holds(&self) -> bool {
        self.subobject_iso.is_some() && self.quotient_iso.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct ExactnessReport<M> {
    pub checks: Vec<ExactnessCheck<M>>,
}

impl<M> ExactnessReport<M> {
    pub fn is_exact(&self) -> bool {
        self.checks.iter().all(ExactnessCheck::holds)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.holds())
            .map(|c| c.subobject_relation)
            .collect()
    }
}

/// Checks the three exactness conditions of `(α, β, γ)`.
///
/// Each is decided twice, once as `im x = ker y` and once as `cok x = coim y`;
/// in a semiabelian category the two agree, so disagreement is reported as an
/// error rather than as a failed condition.
pub fn check_exactness<C: Category>(
    cat: &C,
    alpha: &C::Morphism,
    beta: &C::Morphism,
    gamma: &C::Morphism,
) -> Result<ExactnessReport<C::Morphism>> {
    let d = cat.source(alpha);
    let e = cat.target(beta);
    if cat.target(alpha) != d {
        return Err(CoupleError::Shape("alpha must be an endomorphism of D"));
    }
    if cat.source(beta) != d {
        return Err(CoupleError::Shape("beta must start at D"));
    }
    if cat.source(gamma) != e || cat.target(gamma) != d {
        return Err(CoupleError::Shape("gamma must go from E to D"));
    }
    let pairs = [
        (alpha, beta, "im alpha = ker beta", "cok alpha = coim beta"),
        (beta, gamma, "im beta = ker gamma", "cok beta = coim gamma"),
        (
            gamma,
            alpha,
            "im gamma = ker alpha",
            "cok gamma = coim alpha",
        ),
    ];
    let mut checks = Vec::with_capacity(3);
    for (x, y, sub_rel, quot_rel) in pairs {
        let im = image(cat, x);
        let ker = cat.kernel(y);
        let subobject_iso = subobject_equal(cat, &im, &ker)?;
        let quotient_iso = quotient_equal(cat, &cat.cokernel(x), &coimage(cat, y))?;
        if subobject_iso.is_some() != quotient_iso.is_some() {
            return Err(CoupleError::Comparison(
                "subobject and quotient forms of an exactness condition disagree",
            ));
        }
        checks.push(ExactnessCheck {
            subobject_relation: sub_rel,
            quotient_relation: quot_rel,
            image: im,
            kernel: ker,
            subobject_iso,
            quotient_iso,
        });
    }
    Ok(ExactnessReport { checks })
}

pub fn validate_couple<C: Category>(
    cat: &C,
    alpha: C::Morphism,
    beta: C::Morphism,
    gamma: C::Morphism,
) -> Result<Couple<C>> {
    let report = check_exactness(cat, &alpha, &beta, &gamma)?;
    if !report.is_exact() {
        return Err(CoupleError::NotExact(report.failures().join(", ")));
    }
    Ok(ExactCouple {
        d: cat.source(&alpha),
        e: cat.target(&beta),
        alpha,
        beta,
        gamma,
    })
}

/// `α = ρσ` with `ρ = im α` a kernel and `σ = bar ∘ coim α` a cokernel.
#[derive(Clone, Debug)]
pub struct StrictDecomposition<O, M> {
    pub d1: O,
    pub rho: M,
    pub sigma: M,
}

/// Splits a strict `α` through `D₁ = Im α` and checks `ρ = ker β`, `σ = cok γ`.
pub fn decompose_strict_alpha<C: Category>(
    cat: &C,
    c: &Couple<C>,
) -> Result<StrictDecomposition<C::Object, C::Morphism>> {
    let (factorization, bar_inverse) = match is_strict(cat, &c.alpha)? {
        Strictness::Strict {
            factorization,
            bar_inverse,
        } => (factorization, bar_inverse),
        Strictness::NotStrict { witness, .. } => return Err(CoupleError::AlphaNotStrict(witness)),
    };
    let _ = bar_inverse;
    let rho = factorization.im;
    let sigma = cat.compose(&factorization.bar, &factorization.coim)?;
    ensure_eq(&cat.compose(&rho, &sigma)?, &c.alpha, "rho sigma = alpha")?;
    if subobject_equal(cat, &rho, &cat.kernel(&c.beta))?.is_none() {
        return Err(CoupleError::IdentityFailed("rho = ker beta"));
    }
    if quotient_equal(cat, &sigma, &cat.cokernel(&c.gamma))?.is_none() {
        return Err(CoupleError::IdentityFailed("sigma = cok gamma"));
    }
    Ok(StrictDecomposition {
        d1: cat.source(&rho),
        rho,
        sigma,
    })
}

/// Objects and morphisms built on the way to a derived couple.
#[derive(Clone, Debug)]
pub enum Intermediates<O, M> {
    /// `E_ρ` is the pullback of `ρ` along `γ`; `E₁⁻` the pushout of `β′` along `σ`.
    Left {
        e_rho: O,
        rho_p: M,
        gamma_p: M,
        beta_p: M,
        sigma_p: M,
    },
    /// `E^σ` is the pushout of `β` along `σ`; `E₁⁺` the pullback of `ρ` along `γ″`.
    Right {
        e_sigma: O,
        sigma_pp: M,
        beta_pp: M,
        gamma_pp: M,
        rho_pp: M,
    },
}

/// Which hypotheses held for the couple a derivation started from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeriveCertificate {
    pub beta_strict: bool,
    pub gamma_strict: bool,
}

#[derive(Clone, Debug)]
pub struct DerivedCouple<O, M> {
    pub side: Side,
    pub couple: ExactCouple<O, M>,
    pub decomposition: StrictDecomposition<O, M>,
    pub intermediates: Intermediates<O, M>,
    pub certificate: DeriveCertificate,
}

pub type Derived<C> = DerivedCouple<<C as Category>::Object, <C as Category>::Morphism>;

/// One step of the derivation on the given side.
pub fn derive<C: Category>(cat: &C, c: &Couple<C>, side: Side) -> Result<Derived<C>> {
    let dec = decompose_strict_alpha(cat, c)?;
    let certificate = DeriveCertificate {
        beta_strict: is_strict(cat, &c.beta)?.is_strict(),
        gamma_strict: is_strict(cat, &c.gamma)?.is_strict(),
    };
    let (rho, sigma) = (&dec.rho, &dec.sigma);
    let zero_d1 = cat.zero(&dec.d1, &dec.d1);
    let alpha1 = cat.compose(sigma, rho)?;

    let (beta1, gamma1, e1, intermediates) = match side {
        Side::Left => {
            let pb = cat.pullback(&c.gamma, rho)?;
            let beta_p = mediate_pullback(cat, &pb, &c.beta, &cat.zero(&c.d, &dec.d1))?;
            let (rho_p, gamma_p) = (pb.p1, pb.p2);
            let po = cat.pushout(&beta_p, sigma)?;
            let (sigma_p, beta1) = (po.q1.clone(), po.q2.clone());
            let gamma1 = mediate_pushout(cat, &po, &gamma_p, &zero_d1)?;

            ensure_eq(&cat.compose(&rho_p, &beta_p)?, &c.beta, "rho' beta' = beta")?;
            ensure_zero(cat, &cat.compose(&gamma_p, &beta_p)?, "gamma' beta' = 0")?;
            ensure_eq(
                &cat.compose(&c.gamma, &rho_p)?,
                &cat.compose(rho, &gamma_p)?,
                "gamma rho' = rho gamma'",
            )?;
            ensure_eq(
                &cat.compose(&sigma_p, &beta_p)?,
                &cat.compose(&beta1, sigma)?,
                "sigma' beta' = beta1 sigma",
            )?;
            ensure_eq(
                &cat.compose(&gamma1, &sigma_p)?,
                &gamma_p,
                "gamma1 sigma' = gamma'",
            )?;
            ensure_zero(cat, &cat.compose(&gamma1, &beta1)?, "gamma1 beta1 = 0")?;
            if !is_kernel(cat, &rho_p)? {
                return Err(CoupleError::IdentityFailed("rho' is a kernel"));
            }
            if !is_cokernel(cat, &sigma_p)? {
                return Err(CoupleError::IdentityFailed("sigma' is a cokernel"));
            }
            (
                beta1,
                gamma1,
                po.object,
                Intermediates::Left {
                    e_rho: pb.object,
                    rho_p,
                    gamma_p,
                    beta_p,
                    sigma_p,
                },
            )
        }
        Side::Right => {
            let po = cat.pushout(&c.beta, sigma)?;
            let (sigma_pp, beta_pp) = (po.q1.clone(), po.q2.clone());
            let gamma_pp = mediate_pushout(cat, &po, &c.gamma, &cat.zero(&dec.d1, &c.d))?;
            let pb = cat.pullback(&gamma_pp, rho)?;
            let (rho_pp, gamma1) = (pb.p1.clone(), pb.p2.clone());
            let beta1 = mediate_pullback(cat, &pb, &beta_pp, &zero_d1)?;

            ensure_eq(
                &cat.compose(&gamma_pp, &sigma_pp)?,
                &c.gamma,
                "gamma'' sigma'' = gamma",
            )?;
            ensure_zero(
                cat,
                &cat.compose(&gamma_pp, &beta_pp)?,
                "gamma'' beta'' = 0",
            )?;
            ensure_eq(
                &cat.compose(&sigma_pp, &c.beta)?,
                &cat.compose(&beta_pp, sigma)?,
                "sigma'' beta = beta'' sigma",
            )?;
            ensure_eq(
                &cat.compose(rho, &gamma1)?,
                &cat.compose(&gamma_pp, &rho_pp)?,
                "rho gamma1 = gamma'' rho''",
            )?;
            ensure_eq(
                &cat.compose(&rho_pp, &beta1)?,
                &beta_pp,
                "rho'' beta1 = beta''",
            )?;
            ensure_zero(cat, &cat.compose(&gamma1, &beta1)?, "gamma1 beta1 = 0")?;
            if !is_kernel(cat, &rho_pp)? {
                return Err(CoupleError::IdentityFailed("rho'' is a kernel"));
            }
            if !is_cokernel(cat, &sigma_pp)? {
                return Err(CoupleError::IdentityFailed("sigma'' is a cokernel"));
            }
            (
                beta1,
                gamma1,
                pb.object,
                Intermediates::Right {
                    e_sigma: po.object,
                    sigma_pp,
                    beta_pp,
                    gamma_pp,
                    rho_pp,
                },
            )
        }
    };
    debug_assert_eq!(cat.target(&beta1), e1);
    let couple = validate_couple(cat, alpha1, beta1, gamma1).map_err(|e| match e {
        CoupleError::NotExact(detail) => CoupleError::DerivedNotExact { side, detail },
        other => other,
    })?;
    Ok(DerivedCouple {
        side,
        couple,
        decomposition: dec,
        intermediates,
        certificate,
    })
}

/// Left and right cohomology of a differential `∂` on `E`.
#[derive(Clone, Debug)]
pub struct CohomologyData<O, M> {
    pub partial: M,
    pub kerp: M,
    pub cokp: M,
    /// `θ: Im ∂ → Ker ∂`
    pub theta: M,
    /// `τ: Cok ∂ → Coim ∂`
    pub tau: M,
    /// `θ′: E → Ker ∂` with `(ker ∂) θ′ = ∂`
    pub thetap: M,
    /// `τ′: Cok ∂ → E` with `τ′ (cok ∂) = ∂`
    pub taup: M,
    pub cok_theta: M,
    pub ker_tau: M,
    /// `H⁻ = Cok θ`
    pub h_minus: O,
    /// `H⁺ = Ker τ`
    pub h_plus: O,
}

pub type Cohomology<C> = CohomologyData<<C as Category>::Object, <C as Category>::Morphism>;

pub fn cohomology<C: Category>(cat: &C, partial: &C::Morphism) -> Result<Cohomology<C>> {
    let e = cat.source(partial);
    if cat.target(partial) != e {
        return Err(CoupleError::Shape("a differential must be an endomorphism"));
    }
    if !cat.is_zero(&cat.compose(partial, partial)?) {
        return Err(CoupleError::NotADifferential);
    }
    let kerp = cat.kernel(partial);
    let cokp = cat.cokernel(partial);
    let im = image(cat, partial);
    let coim = coimage(cat, partial);
    let thetap = factor_through_mono(cat, &kerp, partial, "theta'")?;
    let taup = factor_through_epi(cat, &cokp, partial, "tau'")?;
    let theta = factor_through_mono(cat, &kerp, &im, "theta")?;
    let tau = factor_through_epi(cat, &cokp, &coim, "tau")?;
    let cok_theta = cat.cokernel(&theta);
    let ker_tau = cat.kernel(&tau);
    if quotient_equal(cat, &cok_theta, &cat.cokernel(&thetap))?.is_none() {
        return Err(CoupleError::Comparison("cok theta = cok theta'"));
    }
    if subobject_equal(cat, &ker_tau, &cat.kernel(&taup))?.is_none() {
        return Err(CoupleError::Comparison("ker tau = ker tau'"));
    }
    Ok(CohomologyData {
        h_minus: cat.target(&cok_theta),
        h_plus: cat.source(&ker_tau),
        partial: partial.clone(),
        kerp,
        cokp,
        theta,
        tau,
        thetap,
        taup,
        cok_theta,
        ker_tau,
    })
}

/// `∂ = βγ`
pub fn differential<C: Category>(cat: &C, c: &Couple<C>) -> Result<C::Morphism> {
    Ok(cat.compose(&c.beta, &c.gamma)?)
}

/// Identifications between the derived couples and the cohomology of `∂`.
#[derive(Clone, Debug)]
pub struct CohomologyComparison<M> {
    /// `u: E_ρ → Ker ∂` with `(ker ∂) u = ρ′`
    pub e_rho_to_ker: M,
    /// `v: Cok ∂ → E^σ` with `v (cok ∂) = σ″`
    pub cok_to_e_sigma: M,
    /// `H⁻ ≅ E₁⁻`, compatible with the canonical epimorphisms
    pub h_minus_iso: M,
    /// `H⁺ ≅ E₁⁺`, compatible with the canonical monomorphisms
    pub h_plus_iso: M,
}

fn left_parts<O, M>(dc: &DerivedCouple<O, M>) -> Result<(&O, &M, &M, &M, &M)> {
    match &dc.intermediates {
        Intermediates::Left {
            e_rho,
            rho_p,
            gamma_p,
            beta_p,
            sigma_p,
        } => Ok((e_rho, rho_p, gamma_p, beta_p, sigma_p)),
        Intermediates::Right { .. } => Err(CoupleError::Shape("expected a left derived couple")),
    }
}

fn right_parts<O, M>(dc: &DerivedCouple<O, M>) -> Result<(&O, &M, &M, &M, &M)> {
    match &dc.intermediates {
        Intermediates::Right {
            e_sigma,
            sigma_pp,
            beta_pp,
            gamma_pp,
            rho_pp,
        } => Ok((e_sigma, sigma_pp, beta_pp, gamma_pp, rho_pp)),
        Intermediates::Left { .. } => Err(CoupleError::Shape("expected a right derived couple")),
    }
}

/// Checks `θ′ = β′γ` and `τ′ = βγ″` (after identifying `E_ρ = Ker ∂` and
/// `E^σ = Cok ∂`) and finds the isomorphisms `H⁻ ≅ E₁⁻`, `H⁺ ≅ E₁⁺`.
pub fn check_cohomology_identification<C: Category>(
    cat: &C,
    parent: &Couple<C>,
    left: &Derived<C>,
    right: &Derived<C>,
    coh: &Cohomology<C>,
) -> Result<CohomologyComparison<C::Morphism>> {
    let (_, rho_p, _, beta_p, sigma_p) = left_parts(left)?;
    let (_, sigma_pp, _, gamma_pp, rho_pp) = right_parts(right)?;

    let u =
        subobject_equal(cat, rho_p, &coh.kerp)?.ok_or(CoupleError::Comparison("rho' = ker d"))?;
    let beta_p_gamma = cat.compose(beta_p, &parent.gamma)?;
    if chain(cat, &[&u, &beta_p_gamma])? != coh.thetap {
        return Err(CoupleError::Comparison("theta' = beta' gamma"));
    }
    let v = quotient_equal(cat, &coh.cokp, sigma_pp)?
        .ok_or(CoupleError::Comparison("sigma'' = cok d"))?;
    if chain(cat, &[&parent.beta, gamma_pp, &v])? != coh.taup {
        return Err(CoupleError::Comparison("tau' = beta gamma''"));
    }
    let h_minus_iso = quotient_equal(cat, &cat.compose(&coh.cok_theta, &u)?, sigma_p)?
        .ok_or(CoupleError::Comparison("H- = E1-"))?;
    let h_plus_iso = subobject_equal(cat, &cat.compose(&v, &coh.ker_tau)?, rho_pp)?
        .ok_or(CoupleError::Comparison("H+ = E1+"))?;
    Ok(CohomologyComparison {
        e_rho_to_ker: u,
        cok_to_e_sigma: v,
        h_minus_iso,
        h_plus_iso,
    })
}

/// The comparison morphism `ω: E₁⁻ → E₁⁺`.
#[derive(Clone, Debug)]
pub struct OmegaData<M> {
    pub omega: M,
    /// Dimension of the family of solutions of `ρ″ ω σ′ = σ″ ρ′`.
    pub solution_family_dim: usize,
    pub monic: bool,
    pub epic: bool,
    pub iso: bool,
    /// `Some(inverse)` when `ω` is an isomorphism.
    pub inverse: Option<M>,
}

impl<M> OmegaData<M> {
    pub fn unique(&self) -> bool {
        self.solution_family_dim == 0
    }
}

/// Solves `ρ″ ω σ′ = σ″ ρ′` and checks `ω β₁⁻ = β₁⁺`, `γ₁⁻ = γ₁⁺ ω`.
pub fn omega<C: Category>(
    cat: &C,
    left: &Derived<C>,
    right: &Derived<C>,
) -> Result<OmegaData<C::Morphism>> {
    let (_, rho_p, _, _, sigma_p) = left_parts(left)?;
    let (_, sigma_pp, _, _, rho_pp) = right_parts(right)?;
    let rhs = cat.compose(sigma_pp, rho_p)?;
    let through = cat.solve_after(rho_pp, &rhs)?;
    let (inner, inner_dim) = match through {
        Mediation::Unique(m) => (m, 0),
        other => {
            return Err(CategoryError::from_mediation(other, "omega: factor through rho''").into())
        }
    };
    let omega = match cat.solve_before(sigma_p, &inner)? {
        Mediation::Unique(m) => m,
        other => {
            return Err(CategoryError::from_mediation(other, "omega: factor through sigma'").into())
        }
    };
    ensure_eq(
        &chain(cat, &[rho_pp, &omega, sigma_p])?,
        &rhs,
        "rho'' omega sigma' = sigma'' rho'",
    )?;
    ensure_eq(
        &cat.compose(&omega, &left.couple.beta)?,
        &right.couple.beta,
        "omega beta1- = beta1+",
    )?;
    ensure_eq(
        &left.couple.gamma,
        &cat.compose(&right.couple.gamma, &omega)?,
        "gamma1- = gamma1+ omega",
    )?;
    let inverse = invert(cat, &omega)?.ok();
    Ok(OmegaData {
        monic: cat.is_monic(&omega),
        epic: cat.is_epic(&omega),
        iso: inverse.is_some(),
        inverse,
        solution_family_dim: inner_dim,
        omega,
    })
}

impl CategoryError {
    fn from_mediation<M>(m: Mediation<M>, context: &'static str) -> CategoryError {
        match m.into_unique(context) {
            Err(e) => e,
            Ok(_) => unreachable!("unique mediations are handled by the caller"),
        }
    }
}

/// Everything about one derivation step from a single couple.
#[derive(Clone, Debug)]
pub struct DerivationReport<O, M> {
    pub left: DerivedCouple<O, M>,
    pub right: DerivedCouple<O, M>,
    pub cohomology: CohomologyData<O, M>,
    pub comparison: CohomologyComparison<M>,
    pub omega: OmegaData<M>,
    /// The cohomology isomorphisms transported onto `ω`: `ω_H = (H⁺≅E₁⁺)⁻¹ ω (H⁻≅E₁⁻)`.
    pub omega_on_cohomology: M,
    pub ker_partial_semistable: Semistability<M>,
    pub cok_partial_semistable: Semistability<M>,
}

pub type Report<C> = DerivationReport<<C as Category>::Object, <C as Category>::Morphism>;

/// Derives both sides, computes the cohomologies and `ω`, and checks all of
/// their relations, including `(ker τ) ω (cok θ) = (cok ∂)(ker ∂)` and that
/// `ω` is invertible whenever `ker ∂` or `cok ∂` is semistable.
pub fn derive_both<C: Sampler>(cat: &C, c: &Couple<C>, probes: &ProbeConfig) -> Result<Report<C>> {
    let left = derive(cat, c, Side::Left)?;
    let right = derive(cat, c, Side::Right)?;
    let coh = cohomology(cat, &differential(cat, c)?)?;
    let comparison = check_cohomology_identification(cat, c, &left, &right, &coh)?;
    let om = omega(cat, &left, &right)?;

    let plus_back = invert(cat, &comparison.h_plus_iso)?
        .map_err(|_| CoupleError::Comparison("H+ = E1+ invertible"))?;
    let omega_h = chain(cat, &[&plus_back, &om.omega, &comparison.h_minus_iso])?;
    ensure_eq(
        &chain(cat, &[&coh.ker_tau, &omega_h, &coh.cok_theta])?,
        &cat.compose(&coh.cokp, &coh.kerp)?,
        "(ker tau) omega (cok theta) = (cok d)(ker d)",
    )?;

    let ker_ss = semistable_kernel(cat, &coh.kerp, probes)?;
    let cok_ss = semistable_cokernel(cat, &coh.cokp, probes)?;
    if !ker_ss.holds() {
        return Err(CoupleError::SemistabilityRefuted("ker d"));
    }
    if !cok_ss.holds() {
        return Err(CoupleError::SemistabilityRefuted("cok d"));
    }
    if ker_ss.is_certified() && !om.iso {
        return Err(CoupleError::OmegaNotIso("ker d"));
    }
    if cok_ss.is_certified() && !om.iso {
        return Err(CoupleError::OmegaNotIso("cok d"));
    }
    Ok(DerivationReport {
        left,
        right,
        cohomology: coh,
        comparison,
        omega: om,
        omega_on_cohomology: omega_h,
        ker_partial_semistable: ker_ss,
        cok_partial_semistable: cok_ss,
    })
}

/// Which children the iteration builds at each node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sides {
    Left,
    Right,
    Both,
}

impl Sides {
    fn list(self) -> &'static [Side] {
        match self {
            Sides::Left => &[Side::Left],
            Sides::Right => &[Side::Right],
            Sides::Both => &[Side::Left, Side::Right],
        }
    }
}

/// Hypotheses of iterated derivation as they were found at one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeCertificate {
    pub alpha_strict: bool,
    pub beta_strict: bool,
    pub gamma_strict: bool,
    /// Verdict label for `ker γ`.
    pub ker_gamma_semistable: &'static str,
    /// Verdict label for `cok β`.
    pub cok_beta_semistable: &'static str,
    /// Strictness of `α^k` for `k = 1, …`, as many as derivations remain below the node.
    pub alpha_power_strict: Vec<bool>,
}

impl NodeCertificate {
    /// All sufficient conditions for further derivation hold.
    pub fn all_hold(&self) -> bool {
        self.failed().is_empty()
    }

    /// Names of the conditions that do not hold.
    pub fn failed(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.alpha_strict, "alpha strict"),
            (self.beta_strict, "beta strict"),
            (self.gamma_strict, "gamma strict"),
            (
                self.ker_gamma_semistable != "refuted",
                "ker gamma semistable",
            ),
            (self.cok_beta_semistable != "refuted", "cok beta semistable"),
        ] {
            if !ok {
                out.push(name.to_string());
            }
        }
        for (k, ok) in self.alpha_power_strict.iter().enumerate() {
            if !ok {
                out.push(format!("alpha^{} strict", k + 1));
            }
        }
        out
    }
}

/// `ω` between the two children of a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaSummary {
    pub unique: bool,
    pub monic: bool,
    pub epic: bool,
    pub iso: bool,
}

#[derive(Clone, Debug)]
pub struct TreeNode<O, M> {
    /// Sequence of `L`/`R` from the root; empty for the root.
    pub path: String,
    pub couple: ExactCouple<O, M>,
    pub certificate: NodeCertificate,
    pub omega: Option<OmegaSummary>,
    /// Why the subtree below this node was not built.
    pub failure: Option<String>,
}

impl<O, M> TreeNode<O, M> {
    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

/// The derivation tree, nodes in breadth-first order.
#[derive(Clone, Debug)]
pub struct CoupleTree<O, M> {
    pub depth: usize,
    pub sides: Sides,
    pub nodes: Vec<TreeNode<O, M>>,
}

pub type Tree<C> = CoupleTree<<C as Category>::Object, <C as Category>::Morphism>;

impl<O, M> CoupleTree<O, M> {
    pub fn root(&self) -> &TreeNode<O, M> {
        &self.nodes[0]
    }

    pub fn level(&self, k: usize) -> impl Iterator<Item = &TreeNode<O, M>> {
        self.nodes.iter().filter(move |n| n.depth() == k)
    }

    pub fn node(&self, path: &str) -> Option<&TreeNode<O, M>> {
        self.nodes.iter().find(|n| n.path == path)
    }

    /// Every level has its full complement of nodes and no node failed.
    pub fn is_complete(&self) -> bool {
        let width = self.sides.list_len();
        (0..=self.depth).all(|k| self.level(k).count() == width.pow(k as u32))
            && self.nodes.iter().all(|n| n.failure.is_none())
    }
}

impl Sides {
    fn list_len(self) -> usize {
        self.list().len()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IterateConfig {
    pub probes: ProbeConfig,
    pub parallel: bool,
}

fn node_certificate<C: Sampler>(
    cat: &C,
    c: &Couple<C>,
    remaining: usize,
    probes: &ProbeConfig,
) -> Result<NodeCertificate> {
    let verdict = |r: std::result::Result<Semistability<C::Morphism>, CategoryError>| match r {
        Ok(v) => v.label(),
        Err(_) => "refuted",
    };
    let mut alpha_power_strict = Vec::new();
    let mut power = c.alpha.clone();
    for k in 1..=remaining.max(1) {
        if k > 1 {
            power = cat.compose(&c.alpha, &power)?;
        }
        alpha_power_strict.push(is_strict(cat, &power)?.is_strict());
    }
    Ok(NodeCertificate {
        alpha_strict: alpha_power_strict[0],
        beta_strict: is_strict(cat, &c.beta)?.is_strict(),
        gamma_strict: is_strict(cat, &c.gamma)?.is_strict(),
        ker_gamma_semistable: verdict(semistable_kernel(cat, &cat.kernel(&c.gamma), probes)),
        cok_beta_semistable: verdict(semistable_cokernel(cat, &cat.cokernel(&c.beta), probes)),
        alpha_power_strict,
    })
}

fn grow<C: Sampler>(
    cat: &C,
    c: Couple<C>,
    path: String,
    remaining: usize,
    sides: Sides,
    config: &IterateConfig,
) -> Vec<TreeNode<C::Object, C::Morphism>> {
    let mut node = TreeNode {
        path: path.clone(),
        certificate: match node_certificate(cat, &c, remaining, &config.probes) {
            Ok(cert) => cert,
            Err(e) => {
                return vec![TreeNode {
                    path,
                    certificate: NodeCertificate {
                        alpha_strict: false,
                        beta_strict: false,
                        gamma_strict: false,
                        ker_gamma_semistable: "refuted",
                        cok_beta_semistable: "refuted",
                        alpha_power_strict: vec![],
                    },
                    couple: c,
                    omega: None,
                    failure: Some(e.to_string()),
                }]
            }
        },
        couple: c,
        omega: None,
        failure: None,
    };
    if remaining == 0 {
        return vec![node];
    }
    let failed = node.certificate.failed();
    if !failed.is_empty() {
        node.failure = Some(format!("derivation hypotheses fail: {}", failed.join(", ")));
        return vec![node];
    }
    let children: Vec<Result<Derived<C>>> = match sides {
        Sides::Both if config.parallel => {
            let (l, r) = rayon::join(
                || derive(cat, &node.couple, Side::Left),
                || derive(cat, &node.couple, Side::Right),
            );
            vec![l, r]
        }
        _ => sides
            .list()
            .iter()
            .map(|&s| derive(cat, &node.couple, s))
            .collect(),
    };
    let mut derived = Vec::new();
    for child in children {
        match child {
            Ok(d) => derived.push(d),
            Err(e) => {
                node.failure = Some(e.to_string());
                return vec![node];
            }
        }
    }
    if let [l, r] = derived.as_slice() {
        match omega(cat, l, r) {
            Ok(o) => {
                node.omega = Some(OmegaSummary {
                    unique: o.unique(),
                    monic: o.monic,
                    epic: o.epic,
                    iso: o.iso,
                })
            }
            Err(e) => {
                node.failure = Some(e.to_string());
                return vec![node];
            }
        }
    }
    let grow_child = |d: Derived<C>| {
        let child_path = format!("{}{}", path, d.side.letter());
        grow(cat, d.couple, child_path, remaining - 1, sides, config)
    };
    let subtrees: Vec<Vec<TreeNode<C::Object, C::Morphism>>> =
        if config.parallel && derived.len() == 2 {
            let mut it = derived.into_iter();
            let (l, r) = (it.next().unwrap(), it.next().unwrap());
            let (a, b) = rayon::join(|| grow_child(l), || grow_child(r));
            vec![a, b]
        } else {
            derived.into_iter().map(grow_child).collect()
        };
    let mut nodes = vec![node];
    nodes.extend(subtrees.into_iter().flatten());
    nodes
}

/// Iterated derivation to the given depth, re-checking every hypothesis at
/// every node. A node whose derivation fails keeps its report and gets no
/// children.
pub fn iterate<C: Sampler>(
    cat: &C,
    c: &Couple<C>,
    depth: usize,
    sides: Sides,
    config: &IterateConfig,
) -> Tree<C> {
    let mut nodes = grow(cat, c.clone(), String::new(), depth, sides, config);
    nodes.sort_by(|a, b| (a.path.len(), &a.path).cmp(&(b.path.len(), &b.path)));
    CoupleTree {
        depth,
        sides,
        nodes,
    }
}

/// Checks that `bar` of a morphism is monic and epic (the semiabelian axiom).
pub fn bar_is_bimorphism<C: Category>(cat: &C, f: &C::Morphism) -> Result<bool> {
    let fac = canonical_bar(cat, f)?;
    Ok(cat.is_monic(&fac.bar) && cat.is_epic(&fac.bar))
}
