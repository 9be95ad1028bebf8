//! Quantum Markov completions of marginal families on chordal graphs.
//!
//! Given reduced density operators on the cliques of a chordal graph,
//! [`markov::trace_criterion`] builds the logarithmic candidate
//! `T(R) = exp(Σ_C log ρ_C − Σ_S ν(S) log ρ_S)` and decides from `Tr T`
//! whether a quantum Markov completion exists. Around it:
//!
//! * [`operator`]: labeled operators, partial traces, certified states;
//! * [`info`]: entropies, conditional mutual information, global information;
//! * [`graph`]: chordal recognition, junction trees, separation;
//! * [`maxent`]: the maximum-entropy completion by dual descent;
//! * [`modular`]: relative modular operators, Petz recovery, intersection;
//! * [`pauli`]: anticommuting Pauli states with closed-form oracles.
//!
//! ```
//! use qmarkov::markov::{trace_criterion, Verdict};
//! use qmarkov::pauli::basic_qubit_family;
//!
//! let (family, _) = basic_qubit_family(0.6, 0.0).unwrap();
//! let report = trace_criterion(&family, None).unwrap();
//! assert_eq!(report.verdict, Verdict::MarkovFeasible);
//! ```

pub mod eig;
pub mod error;
pub mod graph;
pub mod info;
pub mod json;
pub mod layout;
pub mod markov;
pub mod maxent;
pub mod modular;
pub mod operator;
pub mod pauli;
pub mod quadrature;
pub mod random;
pub mod tol;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/information.md")]
    mod information {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/completions.md")]
    mod completions {}
    #[doc = include_str!("../../../book/src/pauli.md")]
    mod pauli {}
    #[doc = include_str!("../../../book/src/maxent.md")]
    mod maxent {}
    #[doc = include_str!("../../../book/src/modular.md")]
    mod modular {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
