//! Filtered chain complexes of finite-dimensional rational vector spaces.

use rand::Rng;

use crate::filt::random_invertible;
use crate::linalg::{rat, Matrix, Subspace};

/// `C_0 ← C_1 ← … ← C_N` with a finite decreasing filtration by subcomplexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    dims: Vec<usize>,
    /// `differentials[n - 1] = d_n : C_n → C_{n−1}` for `n = 1..=N`.
    differentials: Vec<Matrix>,
    /// `filtration[p][n] = F_p C_n`; `F_0 = C`, the last level is zero.
    filtration: Vec<Vec<Subspace>>,
}

impl FilteredComplex {
    pub fn new(
        dims: Vec<usize>,
        differentials: Vec<Matrix>,
        filtration: Vec<Vec<Subspace>>,
    ) -> Result<Self, String> {
        if dims.is_empty() {
            return Err("a complex needs at least one degree".into());
        }
        if differentials.len() + 1 != dims.len() {
            return Err(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                differentials.len()
            ));
        }
        for (i, d) in differentials.iter().enumerate() {
            let n = i + 1;
            if d.shape() != (dims[n - 1], dims[n]) {
                return Err(format!("d_{n} has the wrong shape"));
            }
        }
        for n in 2..dims.len() {
            if !(&differentials[n - 2] * &differentials[n - 1]).is_zero() {
                return Err(format!("d_{} d_{n} is not zero", n - 1));
            }
        }
        if filtration.len() < 2 {
            return Err("a filtration needs at least two levels".into());
        }
        for (p, level) in filtration.iter().enumerate() {
            if level.len() != dims.len() {
                return Err(format!(
                    "filtration level {p} has the wrong number of degrees"
                ));
            }
            for (n, s) in level.iter().enumerate() {
                if s.ambient_dim() != dims[n] {
                    return Err(format!("F_{p} C_{n} lives in the wrong space"));
                }
            }
        }
        let c = FilteredComplex {
            dims,
            differentials,
            filtration,
        };
        let last = c.filtration.len() - 1;
        for n in c.degrees() {
            if !c.filtration[0][n].is_full() {
                return Err(format!("F_0 C_{n} must be all of C_{n}"));
            }
            if !c.filtration[last][n].is_zero() {
                return Err(format!("the last filtration level of C_{n} must be zero"));
            }
            for p in 1..=last {
                if !c.filtration[p - 1][n]
                    .contains(&c.filtration[p][n])
                    .unwrap()
                {
                    return Err(format!("F_{p} C_{n} is not contained in F_{} C_{n}", p - 1));
                }
                if n >= 1
                    && !c.filtration[p][n - 1]
                        .contains_columns(&(&c.d(n) * c.filtration[p][n].basis()))
                {
                    return Err(format!("d_{n} does not preserve F_{p}"));
                }
            }
        }
        Ok(c)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn degrees(&self) -> std::ops::Range<usize> {
        0..self.dims.len()
    }

    /// Number of filtration levels, counting the final zero.
    pub fn levels(&self) -> usize {
        self.filtration.len()
    }

    pub fn dim(&self, n: isize) -> usize {
        if n < 0 {
            0
        } else {
            self.dims.get(n as usize).copied().unwrap_or(0)
        }
    }

    /// `d_n : C_n → C_{n−1}`, zero outside the stored range.
    pub fn d(&self, n: usize) -> Matrix {
        if n >= 1 && n < self.dims.len() {
            self.differentials[n - 1].clone()
        } else {
            Matrix::zeros(self.dim(n as isize - 1), self.dim(n as isize))
        }
    }

    pub fn differentials(&self) -> &[Matrix] {
        &self.differentials
    }

    pub fn filtration(&self) -> &[Vec<Subspace>] {
        &self.filtration
    }

    /// `F_p C_n` with `F_p = C` for `p ≤ 0` and `F_p = 0` past the last level.
    pub fn step(&self, p: isize, n: usize) -> Subspace {
        let dim = self.dim(n as isize);
        if n >= self.dims.len() {
            return Subspace::zero(0);
        }
        if p <= 0 {
            Subspace::full(dim)
        } else if (p as usize) < self.filtration.len() {
            self.filtration[p as usize][n].clone()
        } else {
            Subspace::zero(dim)
        }
    }

    /// The complex with the cone of its identity placed on top of the
    /// filtration: `C′_n = C_n ⊕ C_{n−1}`, `d′(a, b) = (da + b, −db)`,
    /// `F′_0 = C′` and `F′_{p+1} = F_p ⊕ 0`. The total complex becomes acyclic,
    /// which makes the exact couple of the filtration finite.
    pub fn capped(&self) -> FilteredComplex {
        let top = self.dims.len();
        let dims: Vec<usize> = (0..=top)
            .map(|n| self.dim(n as isize) + self.dim(n as isize - 1))
            .collect();
        let mut differentials = Vec::new();
        for n in 1..=top {
            let (a, b) = (self.dim(n as isize), self.dim(n as isize - 1));
            let (a1, b1) = (self.dim(n as isize - 1), self.dim(n as isize - 2));
            let mut m = Matrix::zeros(a1 + b1, a + b);
            m.set_block(0, 0, &self.d(n));
            m.set_block(0, a, &Matrix::identity(b));
            m.set_block(a1, a, &-&self.d(n - 1));
            differentials.push(m);
        }
        let mut filtration = vec![dims.iter().map(|&d| Subspace::full(d)).collect::<Vec<_>>()];
        for p in 0..self.levels() {
            filtration.push(
                (0..=top)
                    .map(|n| {
                        let b = self.dim(n as isize - 1);
                        let f = self.step(p as isize, n);
                        Subspace::span(&f.basis().vstack(&Matrix::zeros(b, f.dim())))
                    })
                    .collect(),
            );
        }
        FilteredComplex::new(dims, differentials, filtration)
            .expect("the capped complex is a filtered complex")
    }
}

/// A random filtered complex with `degrees` degrees, filtration levels
/// `0..levels` (so `F_levels = 0`) and total dimension at most `max_total`.
///
/// It is a direct sum of one- and two-dimensional pieces (a lone cycle, or
/// `x ↦ y` with `y` at least as deep in the filtration as `x`), conjugated
/// in every degree by a random invertible matrix so that neither `d` nor the
/// filtration is visible in coordinates. Nilpotency holds by construction.
pub fn random_filtered_complex<R: Rng + ?Sized>(
    rng: &mut R,
    degrees: usize,
    levels: usize,
    max_total: usize,
) -> FilteredComplex {
    assert!(degrees >= 1 && levels >= 1);
    let target = rng.gen_range(max_total.div_ceil(2)..=max_total);
    // per degree: the level of each basis vector
    let mut basis_levels: Vec<Vec<usize>> = vec![Vec::new(); degrees];
    // (degree n, index in C_n, index in C_{n−1})
    let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
    let mut total = 0;
    while total < target {
        if degrees >= 2 && target - total >= 2 && rng.gen_bool(0.7) {
            let n = rng.gen_range(1..degrees);
            let lx = rng.gen_range(0..levels);
            let ly = rng.gen_range(lx..levels);
            basis_levels[n].push(lx);
            basis_levels[n - 1].push(ly);
            arrows.push((n, basis_levels[n].len() - 1, basis_levels[n - 1].len() - 1));
            total += 2;
        } else {
            let n = rng.gen_range(0..degrees);
            basis_levels[n].push(rng.gen_range(0..levels));
            total += 1;
        }
    }
    let dims: Vec<usize> = basis_levels.iter().map(Vec::len).collect();
    let mut raw: Vec<Matrix> = (1..degrees)
        .map(|n| Matrix::zeros(dims[n - 1], dims[n]))
        .collect();
    for &(n, i, j) in &arrows {
        raw[n - 1][(j, i)] = rat(1);
    }
    let change: Vec<Matrix> = dims.iter().map(|&d| random_invertible(rng, d)).collect();
    let differentials = (1..degrees)
        .map(|n| {
            let inv = change[n].inverse().expect("invertible");
            &(&change[n - 1] * &raw[n - 1]) * &inv
        })
        .collect();
    let filtration = (0..=levels)
        .map(|p| {
            (0..degrees)
                .map(|n| {
                    let cols: Vec<usize> =
                        (0..dims[n]).filter(|&i| basis_levels[n][i] >= p).collect();
                    Subspace::span(&change[n].select_columns(&cols))
                })
                .collect()
        })
        .collect();
    FilteredComplex::new(dims, differentials, filtration).expect("generated complex is valid")
}
