//! Hauptmoduln of the genus-zero groups Gamma_0(N)+: exact q-series, the
//! Schwarzian differential equation, factorization of the polynomial of
//! singular moduli, and class-field bookkeeping at elliptic points.

pub mod elliptic_class;
pub mod exact;
pub mod factorizer;
pub mod hauptmodul;
pub mod mp;
pub mod pipeline;
pub mod radicals;
pub mod schwarzian_ode;
