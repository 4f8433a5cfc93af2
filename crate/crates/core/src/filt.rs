//! Finitely filtered finite-dimensional ℚ-vector spaces.
//!
//! Objects carry a decreasing filtration `V = F₀ ⊇ F₁ ⊇ … ⊇ F_k = 0`, and
//! morphisms are linear maps with `f(F_p) ⊆ F_p`. The category is
//! quasiabelian but not abelian: a morphism can be monic and epic without
//! being invertible, which is exactly where strictness matters.

use rand::Rng;

use crate::category::{Biproduct, Category, CategoryError, Guarantees, Mediation, Result, Sampler};
use crate::linalg::{Matrix, Subspace};
use crate::vect::random_entries;

/// A filtered space. Steps past the stored ones are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiltObject {
    dim: usize,
    steps: Vec<Subspace>,
}

impl FiltObject {
    /// Validates `steps[0] = ℚ^dim ⊇ steps[1] ⊇ … ⊇ steps[last] = 0` and
    /// drops redundant trailing zero steps.
    pub fn new(dim: usize, mut steps: Vec<Subspace>) -> Result<Self> {
        if steps.len() < 2 {
            return Err(CategoryError::Invalid(
                "a filtration needs at least two steps".into(),
            ));
        }
        if let Some(p) = steps.iter().position(|s| s.ambient_dim() != dim) {
            return Err(CategoryError::Invalid(format!(
                "step {p} lives in the wrong ambient space"
            )));
        }
        if !steps[0].is_full() {
            return Err(CategoryError::Invalid(
                "step 0 must be the whole space".into(),
            ));
        }
        if !steps.last().unwrap().is_zero() {
            return Err(CategoryError::Invalid("the last step must be zero".into()));
        }
        for p in 1..steps.len() {
            if !steps[p - 1].contains(&steps[p]).expect("same ambient") {
                return Err(CategoryError::Invalid(format!(
                    "step {p} is not contained in step {}",
                    p - 1
                )));
            }
        }
        while steps.len() > 2 && steps[steps.len() - 2].is_zero() {
            steps.pop();
        }
        Ok(FiltObject { dim, steps })
    }

    /// `V ⊇ 0`
    pub fn trivial(dim: usize) -> Self {
        FiltObject {
            dim,
            steps: vec![Subspace::full(dim), Subspace::zero(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored steps (at least two).
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    pub fn steps(&self) -> &[Subspace] {
        &self.steps
    }

    /// `F_p`, padded with zero past the end.
    pub fn step(&self, p: usize) -> Subspace {
        self.steps
            .get(p)
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.dim))
    }

    pub fn is_trivially_filtered(&self) -> bool {
        self.steps.len() == 2
    }

    /// `F'_p = F_{p−by}`, with `F_q = V` for `q < 0`.
    pub fn shifted(&self, by: usize) -> Self {
        let mut steps = vec![Subspace::full(self.dim); by];
        steps.extend(self.steps.iter().cloned());
        FiltObject::new(self.dim, steps).expect("shift preserves validity")
    }

    /// Stepwise direct sum.
    pub fn direct_sum(&self, other: &FiltObject) -> Self {
        let n = self.len().max(other.len());
        let steps = (0..n)
            .map(|p| Subspace::span(&self.step(p).basis().block_diag(other.step(p).basis())))
            .collect();
        FiltObject::new(self.dim + other.dim, steps).expect("sum of filtrations is a filtration")
    }

    /// Transports the filtration along an invertible matrix: `F'_p = g(F_p)`.
    pub fn transported(&self, g: &Matrix) -> Self {
        let steps = self.steps.iter().map(|s| s.image(g)).collect();
        FiltObject::new(self.dim, steps).expect("isomorphic image of a filtration")
    }

    /// Basis of `V` adapted to the filtration, one column per vector, with
    /// each vector's level (largest `p` with the vector in `F_p`).
    pub fn adapted_basis(&self) -> (Matrix, Vec<usize>) {
        let mut basis = Matrix::zeros(self.dim, 0);
        let mut levels = Vec::new();
        for p in (0..self.len() - 1).rev() {
            let extra = self.steps[p]
                .complement_in(&self.steps[p + 1])
                .expect("steps are nested");
            levels.extend(std::iter::repeat_n(p, extra.cols()));
            basis = basis.hstack(&extra);
        }
        (basis, levels)
    }
}

/// First level `p` at which `matrix · F_p(source) ⊄ F_p(target)`.
pub fn first_violation(matrix: &Matrix, source: &FiltObject, target: &FiltObject) -> Option<usize> {
    (1..source.len()).find(|&p| {
        !target
            .step(p)
            .contains_columns(&(matrix * source.step(p).basis()))
    })
}

/// A filtration-respecting linear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltMorphism {
    source: FiltObject,
    target: FiltObject,
    matrix: Matrix,
}

impl FiltMorphism {
    pub fn new(source: FiltObject, target: FiltObject, matrix: Matrix) -> Result<Self> {
        if matrix.shape() != (target.dim, source.dim) {
            return Err(CategoryError::Invalid(format!(
                "matrix is {}x{} but the morphism is {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.dim,
                target.dim
            )));
        }
        if let Some(level) = first_violation(&matrix, &source, &target) {
            return Err(CategoryError::Invalid(format!(
                "map does not respect the filtration at level {level}"
            )));
        }
        Ok(FiltMorphism {
            source,
            target,
            matrix,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn source(&self) -> &FiltObject {
        &self.source
    }

    pub fn target(&self) -> &FiltObject {
        &self.target
    }

    fn unchecked(source: FiltObject, target: FiltObject, matrix: Matrix) -> Self {
        debug_assert!(first_violation(&matrix, &source, &target).is_none());
        FiltMorphism {
            source,
            target,
            matrix,
        }
    }
}

/// The canonical non-strict bimorphism: the identity of `ℚ` from the
/// filtration `ℚ ⊇ 0` to the coarser `ℚ ⊇ ℚ ⊇ 0`.
pub fn shift_fixture() -> FiltMorphism {
    let source = FiltObject::trivial(1);
    let target = source.shifted(1);
    FiltMorphism::new(source, target, Matrix::identity(1))
        .expect("identity respects a coarser filtration")
}

/// Filtered vector spaces over ℚ.
#[derive(Clone, Copy, Debug, Default)]
pub struct Filt;

impl Filt {
    fn linear_mediation(
        sol: std::result::Result<crate::linalg::AffineSolution, crate::linalg::LinalgError>,
        source: &FiltObject,
        target: &FiltObject,
        transpose: bool,
    ) -> Mediation<FiltMorphism> {
        match sol {
            Err(_) => Mediation::None,
            Ok(s) if !s.is_unique() => Mediation::NonUnique {
                family_dim: s.family_dim(),
            },
            Ok(s) => {
                let x = if transpose {
                    s.particular.transpose()
                } else {
                    s.particular
                };
                match first_violation(&x, source, target) {
                    Some(level) => Mediation::Inadmissible { level },
                    None => Mediation::Unique(FiltMorphism::unchecked(
                        source.clone(),
                        target.clone(),
                        x,
                    )),
                }
            }
        }
    }
}

impl Category for Filt {
    type Object = FiltObject;
    type Morphism = FiltMorphism;

    fn kind(&self) -> &'static str {
        "filt"
    }

    fn guarantees(&self) -> Guarantees {
        Guarantees {
            abelian: false,
            quasiabelian: true,
        }
    }

    fn source(&self, f: &FiltMorphism) -> FiltObject {
        f.source.clone()
    }

    fn target(&self, f: &FiltMorphism) -> FiltObject {
        f.target.clone()
    }

    fn dim(&self, x: &FiltObject) -> usize {
        x.dim
    }

    fn zero_object(&self) -> FiltObject {
        FiltObject::trivial(0)
    }

    fn identity(&self, x: &FiltObject) -> FiltMorphism {
        FiltMorphism::unchecked(x.clone(), x.clone(), Matrix::identity(x.dim))
    }

    fn zero(&self, x: &FiltObject, y: &FiltObject) -> FiltMorphism {
        FiltMorphism::unchecked(x.clone(), y.clone(), Matrix::zeros(y.dim, x.dim))
    }

    fn compose(&self, g: &FiltMorphism, f: &FiltMorphism) -> Result<FiltMorphism> {
        if f.target != g.source {
            return Err(CategoryError::NotComposable(format!(
                "filtered objects differ (dims {} and {})",
                f.target.dim, g.source.dim
            )));
        }
        Ok(FiltMorphism::unchecked(
            f.source.clone(),
            g.target.clone(),
            &g.matrix * &f.matrix,
        ))
    }

    fn add(&self, f: &FiltMorphism, g: &FiltMorphism) -> Result<FiltMorphism> {
        if f.source != g.source || f.target != g.target {
            return Err(CategoryError::NotParallel("filt add".into()));
        }
        Ok(FiltMorphism::unchecked(
            f.source.clone(),
            f.target.clone(),
            &f.matrix + &g.matrix,
        ))
    }

    fn neg(&self, f: &FiltMorphism) -> FiltMorphism {
        FiltMorphism::unchecked(f.source.clone(), f.target.clone(), -&f.matrix)
    }

    fn is_zero(&self, f: &FiltMorphism) -> bool {
        f.matrix.is_zero()
    }

    /// `F_p(K) = K ∩ F_p(source)`, in coordinates of the canonical kernel basis.
    fn kernel(&self, f: &FiltMorphism) -> FiltMorphism {
        let k = f.matrix.nullspace();
        let steps = (0..f.source.len())
            .map(|p| {
                let meet = k.intersection(&f.source.step(p)).expect("same ambient");
                Subspace::span(
                    &k.coordinates(meet.basis())
                        .expect("meet lies in the kernel"),
                )
            })
            .collect();
        let object = FiltObject::new(k.dim(), steps).expect("induced filtration");
        FiltMorphism::unchecked(object, f.source.clone(), k.basis().clone())
    }

    /// `F_p(C) = π(F_p(target))`.
    fn cokernel(&self, f: &FiltMorphism) -> FiltMorphism {
        let pi = f.matrix.column_space().complement_projection();
        let steps = f.target.steps.iter().map(|s| s.image(&pi)).collect();
        let object = FiltObject::new(pi.rows(), steps).expect("quotient filtration");
        FiltMorphism::unchecked(f.target.clone(), object, pi)
    }

    fn biproduct(&self, x: &FiltObject, y: &FiltObject) -> Biproduct<FiltObject, FiltMorphism> {
        let sum = x.direct_sum(y);
        let n = sum.dim;
        let id = Matrix::identity(n);
        let first: Vec<usize> = (0..x.dim).collect();
        let second: Vec<usize> = (x.dim..n).collect();
        Biproduct {
            inj: [
                FiltMorphism::unchecked(x.clone(), sum.clone(), id.select_columns(&first)),
                FiltMorphism::unchecked(y.clone(), sum.clone(), id.select_columns(&second)),
            ],
            proj: [
                FiltMorphism::unchecked(sum.clone(), x.clone(), id.select_rows(&first)),
                FiltMorphism::unchecked(sum.clone(), y.clone(), id.select_rows(&second)),
            ],
            object: sum,
        }
    }

    fn is_monic(&self, f: &FiltMorphism) -> bool {
        f.matrix.is_injective()
    }

    fn is_epic(&self, f: &FiltMorphism) -> bool {
        f.matrix.is_surjective()
    }

    fn solve_after(&self, a: &FiltMorphism, b: &FiltMorphism) -> Result<Mediation<FiltMorphism>> {
        if a.target != b.target {
            return Err(CategoryError::NotParallel(
                "solve_after needs a common target".into(),
            ));
        }
        Ok(Self::linear_mediation(
            a.matrix.solve(&b.matrix),
            &b.source,
            &a.source,
            false,
        ))
    }

    fn solve_before(&self, a: &FiltMorphism, b: &FiltMorphism) -> Result<Mediation<FiltMorphism>> {
        if a.source != b.source {
            return Err(CategoryError::NotParallel(
                "solve_before needs a common source".into(),
            ));
        }
        let sol = a.matrix.transpose().solve(&b.matrix.transpose());
        Ok(Self::linear_mediation(sol, &a.target, &b.target, true))
    }

    /// `f` is strict iff `f(F_p(source)) = f(source) ∩ F_p(target)` for all `p`.
    fn is_strict_fast(&self, f: &FiltMorphism) -> Option<bool> {
        Some(strict_failure_level(f).is_none())
    }
}

/// First level where `f(F_p) ≠ im f ∩ F_p`.
pub fn strict_failure_level(f: &FiltMorphism) -> Option<usize> {
    let im = f.matrix.column_space();
    let n = f.source.len().max(f.target.len());
    (0..n).find(|&p| {
        let pushed = f.source.step(p).image(&f.matrix);
        let meet = im.intersection(&f.target.step(p)).expect("same ambient");
        pushed != meet
    })
}

/// A random invertible integer matrix.
pub(crate) fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let g = random_entries(rng, n, n);
        if g.rank() == n {
            return g;
        }
    }
}

impl Sampler for Filt {
    /// Random dimension and up to three levels, with steps in a random basis.
    fn random_object<R: Rng + ?Sized>(&self, rng: &mut R, max_dim: usize) -> FiltObject {
        let dim = rng.gen_range(0..=max_dim);
        let k = rng.gen_range(1..=3usize);
        let g = random_invertible(rng, dim);
        let levels: Vec<usize> = (0..dim).map(|_| rng.gen_range(0..k)).collect();
        let steps = (0..=k)
            .map(|p| {
                let cols: Vec<usize> = (0..dim).filter(|&i| levels[i] >= p).collect();
                Subspace::span(&g.select_columns(&cols))
            })
            .collect();
        FiltObject::new(dim, steps).expect("levels define a filtration")
    }

    /// Sends each adapted basis vector of level `p` to a random vector of `F_p(target)`.
    fn random_morphism<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        source: &FiltObject,
        target: &FiltObject,
    ) -> FiltMorphism {
        let (basis, levels) = source.adapted_basis();
        let mut images = Matrix::zeros(target.dim, 0);
        for &p in &levels {
            let step = target.step(p);
            let v = if rng.gen_bool(0.2) {
                Matrix::zeros(target.dim, 1)
            } else {
                step.basis() * &random_entries(rng, step.dim(), 1)
            };
            images = images.hstack(&v);
        }
        let matrix = &images * &basis.inverse().expect("adapted basis is a basis");
        FiltMorphism::new(source.clone(), target.clone(), matrix)
            .expect("sampled map respects filtrations")
    }

    /// The identity onto a coarser filtration (`x` shifted by 0, 1 or 2).
    fn random_bimorphism<R: Rng + ?Sized>(&self, rng: &mut R, x: &FiltObject) -> FiltMorphism {
        let coarse = x.shifted(rng.gen_range(0..=2));
        FiltMorphism::new(x.clone(), coarse, Matrix::identity(x.dim()))
            .expect("coarsening respects filtrations")
    }
}
