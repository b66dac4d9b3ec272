//! Monadic Moore machines over finite sets, their clocks and behaviors, and
//! the filtered-probability machinery used to compare stochastic behaviors.
//!
//! Start with [`machine::MonadicSystem`] and [`clock`]; the guide in `book/`
//! walks through the same material with runnable snippets.

pub mod behavior;
pub mod clock;
pub mod error;
pub mod filtercat;
pub mod finprob;
pub mod foundation;
pub mod gen;
pub mod interface;
pub mod machine;

pub use error::{Error, Result};
pub use foundation::{ratio, Dist, FinMap, FinSet, Kernel, Label, MonadTag, MonadValue, Rational, Subset};
pub use interface::{Arena, Chart, Lens};
pub use machine::{EnumConfig, MonadicSystem, SystemMorphism};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/clocks.md")]
    mod clocks {}
    #[doc = include_str!("../../../book/src/behaviors.md")]
    mod behaviors {}
    #[doc = include_str!("../../../book/src/probability.md")]
    mod probability {}
    #[doc = include_str!("../../../book/src/filtered.md")]
    mod filtered {}
    #[doc = include_str!("../../../book/src/enumeration.md")]
    mod enumeration {}
}
