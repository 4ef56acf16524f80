//! Team correlated equilibria of two-team zero-sum extensive-form games,
//! computed through public-node tree decompositions.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! 1. [`game`]: the game tree, validation and the per-team quotient view.
//! 2. [`generators`]: benchmark families and EFG-JSON input/output.
//! 3. [`decomposition`]: public nodes, bags and width statistics.
//! 4. [`feasible`]: locally feasible sets `X_C` per bag.
//! 5. [`lp`]: polytope descriptions and the saddle-point LP.
//! 6. [`solver`]: exact and float LP solving, plans, best responses and a
//!    brute-force oracle.
//!
//! [`pipeline::run`] chains all of them.
//!
//! ```
//! use teamdecomp::generators::make_kuhn;
//! use teamdecomp::pipeline::{run, Options};
//! use teamdecomp::solver::Mode;
//!
//! let game = make_kuhn(2, 1, 3).unwrap();
//! let report = run(&game, &Options { mode: Some(Mode::Exact), ..Options::default() }).unwrap();
//! assert_eq!(report.plus.sum_xc, 351);
//! assert_eq!(report.value.to_string(), "0/1");
//! ```

pub mod decomposition;
pub mod feasible;
pub mod game;
pub mod generators;
pub mod lp;
pub mod pipeline;
pub mod rational;
pub mod solver;
