//! Brute-force spectral sequence pages of a filtered complex.
//!
//! Computed straight from subspaces of the chain groups, with
//! `Z_r^{p,n} = {x ∈ F_p C_n : dx ∈ F_{p+r} C_{n−1}}` and
//! `E_r^{p,n} = Z_r^{p,n} / (Z_{r−1}^{p+1,n} + d Z_{r−1}^{p−r+1,n+1})`.
//! Nothing here goes through the categorical layer, so it serves as an
//! independent check on derived couples.

use std::collections::BTreeMap;

use crate::complex::FilteredComplex;
use crate::linalg::Subspace;

/// `Z_r^{p,n}`.
pub fn cycles(fc: &FilteredComplex, r: isize, p: isize, n: usize) -> Subspace {
    let d = fc.d(n);
    let target = if n == 0 {
        Subspace::zero(0)
    } else {
        fc.step(p + r, n - 1)
    };
    fc.step(p, n)
        .intersection(&target.preimage(&d))
        .expect("same ambient")
}

/// `B_r^{p,n} = Z_{r−1}^{p+1,n} + d Z_{r−1}^{p−r+1,n+1}`.
pub fn boundaries(fc: &FilteredComplex, r: isize, p: isize, n: usize) -> Subspace {
    let deeper = cycles(fc, r - 1, p + 1, n);
    let from_above = if n + 1 < fc.dims().len() {
        cycles(fc, r - 1, p - r + 1, n + 1).image(&fc.d(n + 1))
    } else {
        Subspace::zero(fc.dim(n as isize))
    };
    deeper.sum(&from_above).expect("same ambient")
}

/// `dim E_r^{p,n}` for every filtration level `p` and degree `n`, `r ≥ 1`.
pub fn page_dims(fc: &FilteredComplex, r: usize) -> BTreeMap<(usize, usize), usize> {
    assert!(r >= 1, "pages start at r = 1");
    let r = r as isize;
    let mut out = BTreeMap::new();
    for p in 0..fc.levels() {
        for n in fc.degrees() {
            let z = cycles(fc, r, p as isize, n);
            let b = boundaries(fc, r, p as isize, n);
            let b_in_z = b.intersection(&z).expect("same ambient");
            debug_assert_eq!(b_in_z, b, "B_r ⊆ Z_r");
            out.insert((p, n), z.dim() - b_in_z.dim());
        }
    }
    out
}

/// Sum of all entries of page `r`.
pub fn page_total(fc: &FilteredComplex, r: usize) -> usize {
    page_dims(fc, r).values().sum()
}

/// `dim H_n(F_p)` and `dim H_n(F_p / F_{p+1})`, summed over `p` and `n`:
/// the dimensions of `D` and `E` in the exact couple of the filtration.
pub fn couple_dims(fc: &FilteredComplex) -> (usize, usize) {
    let mut d_total = 0;
    let mut e_total = 0;
    for p in 0..fc.levels() as isize {
        for n in fc.degrees() {
            let z = fc
                .step(p, n)
                .intersection(&fc.d(n).nullspace())
                .expect("same ambient");
            let b = if n + 1 < fc.dims().len() {
                fc.step(p, n + 1).image(&fc.d(n + 1))
            } else {
                Subspace::zero(fc.dim(n as isize))
            };
            d_total += z.dim() - b.dim();
        }
    }
    for (_, v) in page_dims(fc, 1) {
        e_total += v;
    }
    (d_total, e_total)
}
