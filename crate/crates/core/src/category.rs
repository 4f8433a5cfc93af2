//! The preabelian category contract and the constructions that only use it:
//! images, coimages, the canonical morphism `Coim f → Im f`, strictness,
//! subobject and quotient comparison, pullbacks, pushouts and their
//! mediating morphisms, and semistability probes.
//!
//! Backends supply kernels, cokernels, biproducts and a linear "mediation
//! solver". Everything here is generic and decides properties by solving
//! for the morphisms a definition asks for, never by model-specific shortcuts.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("morphisms do not compose: {0}")]
    NotComposable(String),
    #[error("morphisms are not parallel: {0}")]
    NotParallel(String),
    #[error("{0}: expected a monomorphism")]
    NotMonic(&'static str),
    #[error("{0}: expected an epimorphism")]
    NotEpic(&'static str),
    #[error("not a kernel")]
    NotAKernel,
    #[error("not a cokernel")]
    NotACokernel,
    #[error("{0}: no mediating morphism exists")]
    NoMediation(&'static str),
    #[error(
        "{context}: mediating morphism not unique (solution family of dimension {family_dim})"
    )]
    NonUnique {
        context: &'static str,
        family_dim: usize,
    },
    #[error(
        "{context}: the linear solution is not a morphism (fails at filtration level {level})"
    )]
    Inadmissible { context: &'static str, level: usize },
    #[error("invalid data: {0}")]
    Invalid(String),
}

pub type Result<T, E = CategoryError> = std::result::Result<T, E>;

/// Structural facts a backend can vouch for without computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guarantees {
    pub abelian: bool,
    /// Kernels are stable under pushout and cokernels under pullback.
    pub quasiabelian: bool,
}

impl Guarantees {
    pub fn kernels_semistable(&self) -> bool {
        self.abelian || self.quasiabelian
    }

    pub fn cokernels_semistable(&self) -> bool {
        self.abelian || self.quasiabelian
    }
}

/// Outcome of solving for a morphism `x` in `a∘x = b` or `x∘a = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mediation<M> {
    Unique(M),
    /// Linear solutions exist but form a family of positive dimension.
    NonUnique {
        family_dim: usize,
    },
    /// The unique linear solution does not respect the structure of the category.
    Inadmissible {
        level: usize,
    },
    None,
}

impl<M> Mediation<M> {
    /// Dimension of the solution family, `None` when there is no solution.
    pub fn family_dim(&self) -> Option<usize> {
        match self {
            Mediation::Unique(_) => Some(0),
            Mediation::NonUnique { family_dim } => Some(*family_dim),
            Mediation::Inadmissible { .. } | Mediation::None => None,
        }
    }

    pub fn into_unique(self, context: &'static str) -> Result<M> {
        match self {
            Mediation::Unique(m) => Ok(m),
            Mediation::NonUnique { family_dim } => Err(CategoryError::NonUnique {
                context,
                family_dim,
            }),
            Mediation::Inadmissible { level } => {
                Err(CategoryError::Inadmissible { context, level })
            }
            Mediation::None => Err(CategoryError::NoMediation(context)),
        }
    }
}

/// `X ⊕ Y` with injections and projections, first summand first.
#[derive(Clone, Debug)]
pub struct Biproduct<O, M> {
    pub object: O,
    pub inj: [M; 2],
    pub proj: [M; 2],
}

/// A pullback square of the cospan `f: X → Z ← Y: g`, with `f∘p1 = g∘p2`.
#[derive(Clone, Debug)]
pub struct Pullback<O, M> {
    pub object: O,
    pub p1: M,
    pub p2: M,
    pub f: M,
    pub g: M,
}

/// A pushout square of the span `f: A → X, g: A → Y`, with `q1∘f = q2∘g`.
#[derive(Clone, Debug)]
pub struct Pushout<O, M> {
    pub object: O,
    pub q1: M,
    pub q2: M,
    pub f: M,
    pub g: M,
}

/// An additive category with kernels and cokernels whose hom-sets are
/// finite-dimensional, so universal properties can be mediated by solving.
pub trait Category: Sync {
    type Object: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Morphism: Clone + PartialEq + fmt::Debug + Send + Sync;

    /// Short kind tag used in documents and reports.
    fn kind(&self) -> &'static str;
    fn guarantees(&self) -> Guarantees;

    fn source(&self, f: &Self::Morphism) -> Self::Object;
    fn target(&self, f: &Self::Morphism) -> Self::Object;
    /// Dimension of the underlying vector space.
    fn dim(&self, x: &Self::Object) -> usize;

    fn zero_object(&self) -> Self::Object;
    fn identity(&self, x: &Self::Object) -> Self::Morphism;
    fn zero(&self, x: &Self::Object, y: &Self::Object) -> Self::Morphism;
    /// `g ∘ f`
    fn compose(&self, g: &Self::Morphism, f: &Self::Morphism) -> Result<Self::Morphism>;
    fn add(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Self::Morphism>;
    fn neg(&self, f: &Self::Morphism) -> Self::Morphism;
    fn is_zero(&self, f: &Self::Morphism) -> bool;

    fn kernel(&self, f: &Self::Morphism) -> Self::Morphism;
    fn cokernel(&self, f: &Self::Morphism) -> Self::Morphism;
    fn biproduct(
        &self,
        x: &Self::Object,
        y: &Self::Object,
    ) -> Biproduct<Self::Object, Self::Morphism>;

    fn is_monic(&self, f: &Self::Morphism) -> bool;
    fn is_epic(&self, f: &Self::Morphism) -> bool;

    /// Solves `a ∘ x = b` for `x: source(b) → source(a)`.
    fn solve_after(
        &self,
        a: &Self::Morphism,
        b: &Self::Morphism,
    ) -> Result<Mediation<Self::Morphism>>;
    /// Solves `x ∘ a = b` for `x: target(a) → target(b)`.
    fn solve_before(
        &self,
        a: &Self::Morphism,
        b: &Self::Morphism,
    ) -> Result<Mediation<Self::Morphism>>;

    /// Model-specific strictness test, cross-checked against [`is_strict`].
    fn is_strict_fast(&self, _f: &Self::Morphism) -> Option<bool> {
        None
    }

    fn is_zero_object(&self, x: &Self::Object) -> bool {
        self.dim(x) == 0
    }

    fn sub(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Self::Morphism> {
        self.add(f, &self.neg(g))
    }

    /// Realized as the kernel of `f∘π₁ − g∘π₂ : X ⊕ Y → Z`.
    fn pullback(
        &self,
        f: &Self::Morphism,
        g: &Self::Morphism,
    ) -> Result<Pullback<Self::Object, Self::Morphism>> {
        if self.target(f) != self.target(g) {
            return Err(CategoryError::NotParallel(
                "pullback needs a common target".into(),
            ));
        }
        let b = self.biproduct(&self.source(f), &self.source(g));
        let h = self.sub(&self.compose(f, &b.proj[0])?, &self.compose(g, &b.proj[1])?)?;
        let k = self.kernel(&h);
        Ok(Pullback {
            object: self.source(&k),
            p1: self.compose(&b.proj[0], &k)?,
            p2: self.compose(&b.proj[1], &k)?,
            f: f.clone(),
            g: g.clone(),
        })
    }

    /// Realized as the cokernel of `ι₁∘f − ι₂∘g : A → X ⊕ Y`.
    fn pushout(
        &self,
        f: &Self::Morphism,
        g: &Self::Morphism,
    ) -> Result<Pushout<Self::Object, Self::Morphism>> {
        if self.source(f) != self.source(g) {
            return Err(CategoryError::NotParallel(
                "pushout needs a common source".into(),
            ));
        }
        let b = self.biproduct(&self.target(f), &self.target(g));
        let h = self.sub(&self.compose(&b.inj[0], f)?, &self.compose(&b.inj[1], g)?)?;
        let c = self.cokernel(&h);
        Ok(Pushout {
            object: self.target(&c),
            q1: self.compose(&c, &b.inj[0])?,
            q2: self.compose(&c, &b.inj[1])?,
            f: f.clone(),
            g: g.clone(),
        })
    }
}

/// Random objects and morphisms, for probes and generators.
pub trait Sampler: Category {
    fn random_object<R: rand::Rng + ?Sized>(&self, rng: &mut R, max_dim: usize) -> Self::Object;
    fn random_morphism<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        source: &Self::Object,
        target: &Self::Object,
    ) -> Self::Morphism;

    /// A random morphism out of `x` that is monic and epic. Where every
    /// bimorphism is invertible the identity is as good as any.
    fn random_bimorphism<R: rand::Rng + ?Sized>(
        &self,
        _rng: &mut R,
        x: &Self::Object,
    ) -> Self::Morphism {
        self.identity(x)
    }
}

/// Composes right-to-left: `chain(cat, &[h, g, f]) = h∘g∘f`.
pub fn chain<C: Category>(cat: &C, morphisms: &[&C::Morphism]) -> Result<C::Morphism> {
    let (last, rest) = morphisms
        .split_last()
        .expect("chain of at least one morphism");
    rest.iter()
        .rev()
        .try_fold((*last).clone(), |acc, g| cat.compose(g, &acc))
}

pub fn image<C: Category>(cat: &C, f: &C::Morphism) -> C::Morphism {
    cat.kernel(&cat.cokernel(f))
}

pub fn coimage<C: Category>(cat: &C, f: &C::Morphism) -> C::Morphism {
    cat.cokernel(&cat.kernel(f))
}

/// Solves `m ∘ x = f` for a monic `m`.
pub fn factor_through_mono<C: Category>(
    cat: &C,
    m: &C::Morphism,
    f: &C::Morphism,
    context: &'static str,
) -> Result<C::Morphism> {
    cat.solve_after(m, f)?.into_unique(context)
}

/// Solves `x ∘ e = f` for an epic `e`.
pub fn factor_through_epi<C: Category>(
    cat: &C,
    e: &C::Morphism,
    f: &C::Morphism,
    context: &'static str,
) -> Result<C::Morphism> {
    cat.solve_before(e, f)?.into_unique(context)
}

/// `f = im ∘ bar ∘ coim`.
#[derive(Clone, Debug)]
pub struct Factorization<M> {
    pub coim: M,
    pub im: M,
    pub bar: M,
}

/// The canonical morphism `Coim f → Im f`, obtained from the two universal properties.
pub fn canonical_bar<C: Category>(cat: &C, f: &C::Morphism) -> Result<Factorization<C::Morphism>> {
    let im = image(cat, f);
    let coim = coimage(cat, f);
    let through_im = factor_through_mono(cat, &im, f, "factor through image")?;
    let bar = factor_through_epi(cat, &coim, &through_im, "factor through coimage")?;
    debug_assert!(chain(cat, &[&im, &bar, &coim]).is_ok_and(|g| g == *f));
    Ok(Factorization { coim, im, bar })
}

/// Why a morphism failed to be invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonInvertible {
    /// The underlying linear map is singular; no inverse exists even as a linear map.
    Singular,
    /// A linear inverse exists but escapes the structure at this filtration level.
    EscapesAt { level: usize },
}

impl fmt::Display for NonInvertible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonInvertible::Singular => write!(f, "not bijective"),
            NonInvertible::EscapesAt { level } => {
                write!(f, "inverse escapes the filtration at level {level}")
            }
        }
    }
}

/// Two-sided inverse of `f` in the category, or the reason none exists.
pub fn invert<C: Category>(
    cat: &C,
    f: &C::Morphism,
) -> Result<std::result::Result<C::Morphism, NonInvertible>> {
    let id_target = cat.identity(&cat.target(f));
    let right = match cat.solve_after(f, &id_target)? {
        Mediation::Unique(g) => g,
        Mediation::Inadmissible { level } => return Ok(Err(NonInvertible::EscapesAt { level })),
        Mediation::NonUnique { .. } | Mediation::None => return Ok(Err(NonInvertible::Singular)),
    };
    if cat.compose(&right, f)? != cat.identity(&cat.source(f)) {
        return Ok(Err(NonInvertible::Singular));
    }
    Ok(Ok(right))
}

pub fn is_iso<C: Category>(cat: &C, f: &C::Morphism) -> Result<bool> {
    Ok(invert(cat, f)?.is_ok())
}

/// Strictness verdict with its certificate.
#[derive(Clone, Debug)]
pub enum Strictness<M> {
    /// `bar` is an isomorphism; the inverse is the certificate.
    Strict {
        factorization: Factorization<M>,
        bar_inverse: M,
    },
    NotStrict {
        factorization: Factorization<M>,
        witness: NonInvertible,
    },
}

impl<M> Strictness<M> {
    pub fn is_strict(&self) -> bool {
        matches!(self, Strictness::Strict { .. })
    }

    pub fn factorization(&self) -> &Factorization<M> {
        match self {
            Strictness::Strict { factorization, .. }
            | Strictness::NotStrict { factorization, .. } => factorization,
        }
    }
}

/// `f` is strict iff its canonical `bar` is invertible in the category.
pub fn is_strict<C: Category>(cat: &C, f: &C::Morphism) -> Result<Strictness<C::Morphism>> {
    let factorization = canonical_bar(cat, f)?;
    Ok(match invert(cat, &factorization.bar)? {
        Ok(bar_inverse) => Strictness::Strict {
            factorization,
            bar_inverse,
        },
        Err(witness) => Strictness::NotStrict {
            factorization,
            witness,
        },
    })
}

/// For monics `m1, m2` into the same object: the isomorphism `u` with
/// `m2 ∘ u = m1` when they define the same subobject.
pub fn subobject_equal<C: Category>(
    cat: &C,
    m1: &C::Morphism,
    m2: &C::Morphism,
) -> Result<Option<C::Morphism>> {
    if cat.target(m1) != cat.target(m2) {
        return Err(CategoryError::NotParallel(
            "subobjects of different objects".into(),
        ));
    }
    if !cat.is_monic(m1) {
        return Err(CategoryError::NotMonic("subobject_equal"));
    }
    if !cat.is_monic(m2) {
        return Err(CategoryError::NotMonic("subobject_equal"));
    }
    let Mediation::Unique(u) = cat.solve_after(m2, m1)? else {
        return Ok(None);
    };
    let Mediation::Unique(v) = cat.solve_after(m1, m2)? else {
        return Ok(None);
    };
    debug_assert!(cat
        .compose(&v, &u)
        .is_ok_and(|vu| vu == cat.identity(&cat.source(m1))));
    Ok(Some(u))
}

/// For epics `e1, e2` out of the same object: the isomorphism `u` with
/// `u ∘ e1 = e2` when they define the same quotient.
pub fn quotient_equal<C: Category>(
    cat: &C,
    e1: &C::Morphism,
    e2: &C::Morphism,
) -> Result<Option<C::Morphism>> {
    if cat.source(e1) != cat.source(e2) {
        return Err(CategoryError::NotParallel(
            "quotients of different objects".into(),
        ));
    }
    if !cat.is_epic(e1) {
        return Err(CategoryError::NotEpic("quotient_equal"));
    }
    if !cat.is_epic(e2) {
        return Err(CategoryError::NotEpic("quotient_equal"));
    }
    let Mediation::Unique(u) = cat.solve_before(e1, e2)? else {
        return Ok(None);
    };
    let Mediation::Unique(_) = cat.solve_before(e2, e1)? else {
        return Ok(None);
    };
    Ok(Some(u))
}

/// A morphism is a kernel iff it represents the same subobject as `ker(cok f)`.
pub fn is_kernel<C: Category>(cat: &C, f: &C::Morphism) -> Result<bool> {
    if !cat.is_monic(f) {
        return Ok(false);
    }
    Ok(subobject_equal(cat, f, &image(cat, f))?.is_some())
}

pub fn is_cokernel<C: Category>(cat: &C, f: &C::Morphism) -> Result<bool> {
    if !cat.is_epic(f) {
        return Ok(false);
    }
    Ok(quotient_equal(cat, f, &coimage(cat, f))?.is_some())
}

/// The unique `w` with `p1∘w = u` and `p2∘w = v`.
pub fn mediate_pullback<C: Category>(
    cat: &C,
    pb: &Pullback<C::Object, C::Morphism>,
    u: &C::Morphism,
    v: &C::Morphism,
) -> Result<C::Morphism> {
    if cat.source(u) != cat.source(v) {
        return Err(CategoryError::NotParallel(
            "cone legs need a common source".into(),
        ));
    }
    let b = cat.biproduct(&cat.target(&pb.p1), &cat.target(&pb.p2));
    let pair = |x: &C::Morphism, y: &C::Morphism| -> Result<C::Morphism> {
        cat.add(&cat.compose(&b.inj[0], x)?, &cat.compose(&b.inj[1], y)?)
    };
    let legs = pair(&pb.p1, &pb.p2)?;
    let cone = pair(u, v)?;
    cat.solve_after(&legs, &cone)?
        .into_unique("pullback mediation")
}

/// The unique `w` with `w∘q1 = u` and `w∘q2 = v`.
pub fn mediate_pushout<C: Category>(
    cat: &C,
    po: &Pushout<C::Object, C::Morphism>,
    u: &C::Morphism,
    v: &C::Morphism,
) -> Result<C::Morphism> {
    if cat.target(u) != cat.target(v) {
        return Err(CategoryError::NotParallel(
            "cocone legs need a common target".into(),
        ));
    }
    let b = cat.biproduct(&cat.source(&po.q1), &cat.source(&po.q2));
    let copair = |x: &C::Morphism, y: &C::Morphism| -> Result<C::Morphism> {
        cat.add(&cat.compose(x, &b.proj[0])?, &cat.compose(y, &b.proj[1])?)
    };
    let legs = copair(&po.q1, &po.q2)?;
    let cocone = copair(u, v)?;
    cat.solve_before(&legs, &cocone)?
        .into_unique("pushout mediation")
}

/// Epistemic status of a semistability claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Semistability<M> {
    /// Guaranteed by the backend's structure; `probes` random checks also passed.
    Certified { probes: usize },
    /// No structural guarantee, but every probe passed.
    Probed { probes: usize },
    /// Pushing out (or pulling back) along `along` gave something that is not a kernel (cokernel).
    Refuted { along: M },
}

impl<M> Semistability<M> {
    pub fn holds(&self) -> bool {
        !matches!(self, Semistability::Refuted { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Semistability::Certified { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Semistability::Certified { .. } => "certified",
            Semistability::Probed { .. } => "probed",
            Semistability::Refuted { .. } => "refuted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub probes: usize,
    pub seed: u64,
    pub max_dim: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            probes: 0,
            seed: 0,
            max_dim: 3,
        }
    }
}

/// Is the kernel `f` stable under pushouts along arbitrary morphisms?
pub fn semistable_kernel<C: Sampler>(
    cat: &C,
    f: &C::Morphism,
    config: &ProbeConfig,
) -> Result<Semistability<C::Morphism>> {
    if !is_kernel(cat, f)? {
        return Err(CategoryError::NotAKernel);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let source = cat.source(f);
    for _ in 0..config.probes {
        let y = cat.random_object(&mut rng, config.max_dim);
        let s = cat.random_morphism(&mut rng, &source, &y);
        let po = cat.pushout(f, &s)?;
        if !is_kernel(cat, &po.q2)? {
            return Ok(Semistability::Refuted { along: s });
        }
    }
    Ok(if cat.guarantees().kernels_semistable() {
        Semistability::Certified {
            probes: config.probes,
        }
    } else {
        Semistability::Probed {
            probes: config.probes,
        }
    })
}

/// Is the cokernel `f` stable under pullbacks along arbitrary morphisms?
pub fn semistable_cokernel<C: Sampler>(
    cat: &C,
    f: &C::Morphism,
    config: &ProbeConfig,
) -> Result<Semistability<C::Morphism>> {
    if !is_cokernel(cat, f)? {
        return Err(CategoryError::NotACokernel);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let target = cat.target(f);
    for _ in 0..config.probes {
        let y = cat.random_object(&mut rng, config.max_dim);
        let s = cat.random_morphism(&mut rng, &y, &target);
        let pb = cat.pullback(f, &s)?;
        if !is_cokernel(cat, &pb.p2)? {
            return Ok(Semistability::Refuted { along: s });
        }
    }
    Ok(if cat.guarantees().cokernels_semistable() {
        Semistability::Certified {
            probes: config.probes,
        }
    } else {
        Semistability::Probed {
            probes: config.probes,
        }
    })
}
