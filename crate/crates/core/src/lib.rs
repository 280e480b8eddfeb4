//! Exact combinatorics of cyclic quotient surface singularities
//! `C^2 / (1/p)(1, q)`: Hirzebruch–Jung strings, eta invariants of the
//! boundary lens spaces, type T strings, and the quantity
//! `C(X) = 2 - b2(X) + 2/p - 3η` for Artin and non-Artin smoothings.
//!
//! All invariants are exact rationals. The only floating-point code is the
//! cotangent-sum eta oracle in [`eta::eta_cotangent`].

pub mod components;
pub mod eta;
pub mod exactnum;
pub mod hjres;
pub mod search;
pub mod type_t;

pub use components::{
    attach_family, c_invariant, family_minimal_graph, theorem_tables, ComponentError, ContractedInterval,
    FamilyClosedForm, FamilyReport, InvariantReport, ResolutionConfiguration,
};
pub use eta::{eta_cotangent, eta_exact, eta_type_t_closed_form, GroupElementRotation};
pub use exactnum::{cf_eval, mod_inverse, ExactError, Rational};
pub use hjres::{
    blow_down, blow_up, chain_to_quotient, hj_resolve, non_minimal_graph, non_minimal_sequence, reverse_chain,
    BlowUpSite, CyclicQuotient, HjError, ResolutionChain, Side,
};
pub use search::{render, scan, OutputFormat, SearchError, SearchMode, SearchQuery};
pub use type_t::{
    conjugate, enumerate_type_t, importprop_invariants, recognize_type_t, type_t_group, type_t_string, TypeTError,
    TypeTParams,
};
