//! Exact computations with quantized cosine observables on the torus.
//!
//! All arithmetic happens in the cyclotomic field `Q(ζ_{4r})` containing
//! `t = e^{iπ/2r}`, so every identity below is checked with exact equality.
//!
//! - [`cyclotomic`]: field elements, quantum integers and the `X`-graded [`Scalar`].
//! - [`torus_space`]: the vector space `V(T²)` with basis `V^1, …, V^{r−1}`,
//!   its pairing and the S and T moves.
//! - [`observables`]: the operators `C(p,q)` and `S(p,q)` and their closed forms.
//! - [`tqft`]: continued fractions, move words, gluing, and the bracket of
//!   a torus link computed by the TQFT pipeline.
//! - [`nctorus`]: the star product on symbols, Weyl words and the clock and
//!   shift model of the noncommutative torus.
//!
//! ```
//! use qtorus::{observables::c_matrix, CycloContext};
//!
//! let ctx = CycloContext::new(5)?;
//! let t = ctx.t_power(1);
//! let lhs = &c_matrix(&ctx, 1, 0) * &c_matrix(&ctx, 0, 1);
//! let rhs = &c_matrix(&ctx, 1, 1).scale(&t.clone().into())
//!     + &c_matrix(&ctx, 1, -1).scale(&t.inv()?.into());
//! assert_eq!(lhs, rhs);
//! # Ok::<(), qtorus::Error>(())
//! ```

pub mod cyclotomic;
pub mod error;
pub mod linalg;
pub mod nctorus;
pub mod observables;
pub mod rational;
pub mod torus_space;
pub mod tqft;

pub use cyclotomic::{CycloContext, CycloElement, Scalar};
pub use error::{Error, Result};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cyclotomic.md")]
    mod cyclotomic {}
    #[doc = include_str!("../../../book/src/torus-space.md")]
    mod torus_space {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/nctorus.md")]
    mod nctorus {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
