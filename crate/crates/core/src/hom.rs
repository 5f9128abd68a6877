//! Homomorphisms out of finitely presented groups and the injectivity test
//! through the only candidate inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{Mode, WordOracle};
use crate::presentation::Presentation;
use crate::stallings::fold_rank;
use crate::word::Word;

/// `true` iff every source relator maps to a target-trivial word. Budget
/// exhaustion of a semi-decision oracle surfaces as an error.
pub fn check_hom(source: &Presentation, images: &[Word], target: &dyn WordOracle) -> Result<bool> {
    if images.len() != source.rank() {
        return Err(Error::AlphabetMismatch);
    }
    for r in source.relators() {
        if !target.is_trivial(&r.substitute(images))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A verified homomorphism.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: Presentation,
    target_rank: usize,
    images: Vec<Word>,
}

impl GroupHom {
    pub fn new(source: Presentation, images: Vec<Word>, target: &dyn WordOracle) -> Result<Self> {
        if images.len() != source.rank() || images.iter().any(|w| w.max_generator().is_some_and(|g| g >= target.rank())) {
            return Err(Error::AlphabetMismatch);
        }
        for (i, r) in source.relators().iter().enumerate() {
            if !target.is_trivial(&r.substitute(&images))? {
                return Err(Error::NotAHomomorphism(i));
            }
        }
        Ok(GroupHom { source, target_rank: target.rank(), images })
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn eval(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }
}

/// A presentation of the image `f(H)` with the data linking it to `H`.
#[derive(Clone, Debug)]
pub struct ImageData {
    pub presentation: Presentation,
    /// Image generator `j` as a word in the symbols `f(x_i)`.
    pub expressions: Vec<Word>,
    /// `f(x_i)` as a word in the image generators.
    pub source_images: Vec<Word>,
}

/// Image data for a map into a free group, read off the folded graph of
/// the images: the image is free on the folding basis.
pub fn free_image(f: &GroupHom) -> ImageData {
    let g = fold_rank(f.target_rank(), f.images());
    let basis = g.basis().len();
    let source_images = f.images().iter().map(|w| g.member(w).expect("image lies in its own span")).collect();
    ImageData {
        presentation: Presentation::free(basis),
        expressions: g.basis_in_generators().to_vec(),
        source_images,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Injectivity {
    Injective,
    NotInjective,
    /// All relation checks of the candidate inverse were confirmed by
    /// consequence enumeration; nothing can refute injectivity in this mode.
    ConfirmedOnly,
    /// Semi-decision mode ran out of budget before confirming.
    Unknown,
}

/// Tests injectivity of `f` through the candidate inverse `ψ` sending image
/// generator `y_j` to `expressions[j]` read in the source generators.
/// `ψ` must kill every relator of the image presentation and satisfy
/// `ψ(f(x_i)) = x_i`. With a total source oracle this decides; otherwise
/// the required identities are searched for in the consequence stream of
/// the source, at most `budget` elements per identity.
pub fn is_injective(f: &GroupHom, wp_source: &dyn WordOracle, image: &ImageData, budget: u64) -> Result<Injectivity> {
    let src = f.source();
    if image.source_images.len() != src.rank() || image.expressions.len() != image.presentation.rank() {
        return Err(Error::AlphabetMismatch);
    }
    let mut required: Vec<Word> = image.presentation.relators().iter().map(|r| r.substitute(&image.expressions)).collect();
    for (i, w) in image.source_images.iter().enumerate() {
        required.push(w.substitute(&image.expressions).mul(&Word::gen(i).inverse()));
    }
    match wp_source.mode() {
        Mode::Total => {
            for w in &required {
                if !wp_source.is_trivial(w)? {
                    return Ok(Injectivity::NotInjective);
                }
            }
            Ok(Injectivity::Injective)
        }
        Mode::SemiDecision => {
            for w in &required {
                let core = w.cyclic_reduce().0;
                if core.is_empty() {
                    continue;
                }
                if !src.consequences().take(budget as usize).any(|c| c == core || c == *w) {
                    return Ok(Injectivity::Unknown);
                }
            }
            Ok(Injectivity::ConfirmedOnly)
        }
    }
}
