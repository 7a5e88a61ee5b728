pub mod catalog;
pub mod charclasses;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod ids;
pub mod jet;
pub mod linalg;
pub mod loops;
pub mod runner;
pub mod symbols;

pub use error::{Error, Result};

// The book's snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/characteristic-classes.md")]
    mod characteristic_classes {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/loops.md")]
    mod loops {}
    #[doc = include_str!("../../../book/src/runner.md")]
    mod runner {}
}
