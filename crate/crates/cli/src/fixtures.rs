//! The shipped fixture documents, rebuilt from their generators.

use exact_couples::filt::Filt;
use exact_couples::generators::{
    alpha_zero_couple, degenerate_couple, fixture_f1, massey_fixture_complex, nilpotent_couple,
    zero_couple,
};
use exact_couples::vect::Vect;

use crate::commands::couple_document;
use crate::document::{ComplexDoc, Document};

/// `(file name, document)` for every file in the fixtures directory.
pub fn shipped() -> Vec<(&'static str, Document)> {
    vec![
        (
            "zero.json",
            Document::Couple(couple_document(&Vect, &zero_couple())),
        ),
        (
            "degenerate.json",
            Document::Couple(couple_document(&Vect, &degenerate_couple())),
        ),
        (
            "alpha_zero.json",
            Document::Couple(couple_document(&Vect, &alpha_zero_couple())),
        ),
        (
            "zero_differential.json",
            Document::Couple(couple_document(&Vect, &nilpotent_couple())),
        ),
        (
            "f1.json",
            Document::Couple(couple_document(&Filt, &fixture_f1())),
        ),
        (
            "massey.json",
            Document::Complex(ComplexDoc::from_complex(&massey_fixture_complex())),
        ),
    ]
}
