//! Finite-dimensional ℚ-vector spaces: the abelian backend.

use rand::Rng;

use crate::category::{Biproduct, Category, CategoryError, Guarantees, Mediation, Result, Sampler};
use crate::linalg::{rat, LinalgError, Matrix, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VectObject {
    pub dim: usize,
}

/// A linear map, stored as a `target.dim × source.dim` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectMorphism {
    source: VectObject,
    target: VectObject,
    matrix: Matrix,
}

impl VectMorphism {
    pub fn new(source: VectObject, target: VectObject, matrix: Matrix) -> Result<Self> {
        if matrix.shape() != (target.dim, source.dim) {
            return Err(CategoryError::Invalid(format!(
                "matrix is {}x{} but the morphism is {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.dim,
                target.dim
            )));
        }
        Ok(VectMorphism {
            source,
            target,
            matrix,
        })
    }

    pub fn from_matrix(matrix: Matrix) -> Self {
        VectMorphism {
            source: VectObject { dim: matrix.cols() },
            target: VectObject { dim: matrix.rows() },
            matrix,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// The category of finite-dimensional rational vector spaces.
#[derive(Clone, Copy, Debug, Default)]
pub struct Vect;

impl Category for Vect {
    type Object = VectObject;
    type Morphism = VectMorphism;

    fn kind(&self) -> &'static str {
        "vect"
    }

    fn guarantees(&self) -> Guarantees {
        Guarantees {
            abelian: true,
            quasiabelian: true,
        }
    }

    fn source(&self, f: &VectMorphism) -> VectObject {
        f.source
    }

    fn target(&self, f: &VectMorphism) -> VectObject {
        f.target
    }

    fn dim(&self, x: &VectObject) -> usize {
        x.dim
    }

    fn zero_object(&self) -> VectObject {
        VectObject { dim: 0 }
    }

    fn identity(&self, x: &VectObject) -> VectMorphism {
        VectMorphism::from_matrix(Matrix::identity(x.dim))
    }

    fn zero(&self, x: &VectObject, y: &VectObject) -> VectMorphism {
        VectMorphism::from_matrix(Matrix::zeros(y.dim, x.dim))
    }

    fn compose(&self, g: &VectMorphism, f: &VectMorphism) -> Result<VectMorphism> {
        if f.target != g.source {
            return Err(CategoryError::NotComposable(format!(
                "target dim {} vs source dim {}",
                f.target.dim, g.source.dim
            )));
        }
        Ok(VectMorphism::from_matrix(&g.matrix * &f.matrix))
    }

    fn add(&self, f: &VectMorphism, g: &VectMorphism) -> Result<VectMorphism> {
        if f.source != g.source || f.target != g.target {
            return Err(CategoryError::NotParallel("vect add".into()));
        }
        Ok(VectMorphism::from_matrix(&f.matrix + &g.matrix))
    }

    fn neg(&self, f: &VectMorphism) -> VectMorphism {
        VectMorphism::from_matrix(-&f.matrix)
    }

    fn is_zero(&self, f: &VectMorphism) -> bool {
        f.matrix.is_zero()
    }

    fn kernel(&self, f: &VectMorphism) -> VectMorphism {
        VectMorphism::from_matrix(f.matrix.nullspace().basis().clone())
    }

    fn cokernel(&self, f: &VectMorphism) -> VectMorphism {
        VectMorphism::from_matrix(f.matrix.column_space().complement_projection())
    }

    fn biproduct(&self, x: &VectObject, y: &VectObject) -> Biproduct<VectObject, VectMorphism> {
        let n = x.dim + y.dim;
        let id = Matrix::identity(n);
        let first: Vec<usize> = (0..x.dim).collect();
        let second: Vec<usize> = (x.dim..n).collect();
        Biproduct {
            object: VectObject { dim: n },
            inj: [
                VectMorphism::from_matrix(id.select_columns(&first)),
                VectMorphism::from_matrix(id.select_columns(&second)),
            ],
            proj: [
                VectMorphism::from_matrix(id.select_rows(&first)),
                VectMorphism::from_matrix(id.select_rows(&second)),
            ],
        }
    }

    fn is_monic(&self, f: &VectMorphism) -> bool {
        f.matrix.is_injective()
    }

    fn is_epic(&self, f: &VectMorphism) -> bool {
        f.matrix.is_surjective()
    }

    fn solve_after(&self, a: &VectMorphism, b: &VectMorphism) -> Result<Mediation<VectMorphism>> {
        if a.target != b.target {
            return Err(CategoryError::NotParallel(
                "solve_after needs a common target".into(),
            ));
        }
        Ok(linear_mediation(a.matrix.solve(&b.matrix), |x| {
            VectMorphism::new(b.source, a.source, x)
        }))
    }

    fn solve_before(&self, a: &VectMorphism, b: &VectMorphism) -> Result<Mediation<VectMorphism>> {
        if a.source != b.source {
            return Err(CategoryError::NotParallel(
                "solve_before needs a common source".into(),
            ));
        }
        let sol = a.matrix.transpose().solve(&b.matrix.transpose());
        Ok(linear_mediation(sol, |xt| {
            VectMorphism::new(a.target, b.target, xt.transpose())
        }))
    }

    fn is_strict_fast(&self, _f: &VectMorphism) -> Option<bool> {
        Some(true)
    }
}

fn linear_mediation<M>(
    sol: std::result::Result<crate::linalg::AffineSolution, LinalgError>,
    build: impl FnOnce(Matrix) -> Result<M>,
) -> Mediation<M> {
    match sol {
        Err(_) => Mediation::None,
        Ok(s) if !s.is_unique() => Mediation::NonUnique {
            family_dim: s.family_dim(),
        },
        Ok(s) => Mediation::Unique(build(s.particular).expect("solution has the solved-for shape")),
    }
}

/// Random integer entries in `-2..=2`, roughly a third of them zero.
pub(crate) fn random_entries<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(0.35) {
                continue;
            }
            let v = rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 };
            m[(i, j)] = rat(v);
        }
    }
    m
}

impl Sampler for Vect {
    fn random_object<R: Rng + ?Sized>(&self, rng: &mut R, max_dim: usize) -> VectObject {
        VectObject {
            dim: rng.gen_range(0..=max_dim),
        }
    }

    fn random_morphism<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        source: &VectObject,
        target: &VectObject,
    ) -> VectMorphism {
        VectMorphism::from_matrix(random_entries(rng, target.dim, source.dim))
    }
}

/// Inclusion of a subspace of `ℚ^n` as a morphism.
pub fn inclusion(s: &Subspace) -> VectMorphism {
    VectMorphism::from_matrix(s.basis().clone())
}
