//! A workbench for GL(3) Kloosterman sums and the analytic kernels that
//! accompany them in the GL(3) Kuznetsov formula.
//!
//! The crate has three layers:
//!
//! * **Exact arithmetic** — [`arith`] (modular inverses, CRT, factorization,
//!   divisor enumeration), [`cyclo`] (exact linear combinations of roots of
//!   unity with equality testing), [`kloosterman`] (classical sums
//!   `S(m,n;c)`), [`gl3`] (the long-Weyl-element sum `S(m1,m2,n1,n2;D1,D2)`
//!   by brute force and by Chinese remainder splitting), and [`decomp`]
//!   (a divisor-sum evaluation of `S(1,m,n,1;D1,D2)` that is checked for
//!   exact equality against brute force).
//! * **Bilinear experiments** — [`bilinear`] evaluates large-sieve-type
//!   bilinear forms in the sums over ranges of moduli and compares them
//!   against the expected envelope.
//! * **Numerics** — [`kernels`] evaluates the spectral measure, test
//!   functions, Bessel functions of complex (typically imaginary) order,
//!   the five double-Bessel integrals, and a Mellin–Barnes kernel, with
//!   cross-representation identity checks.

pub mod arith;
pub mod bilinear;
pub mod cyclo;
pub mod decomp;
pub mod gl3;
pub mod kernels;
pub mod kloosterman;

/// Compile and run every code block of the guide under `book/` as a
/// doc-test, so the guide cannot drift from the crate.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(exact_arithmetic, "../../../book/src/exact-arithmetic.md");
    chapter!(classical_sums, "../../../book/src/classical-sums.md");
    chapter!(rank_three_sums, "../../../book/src/rank-three-sums.md");
    chapter!(decomposition, "../../../book/src/decomposition.md");
    chapter!(bilinear_forms, "../../../book/src/bilinear-forms.md");
    chapter!(spectral_kernels, "../../../book/src/spectral-kernels.md");
    chapter!(command_line, "../../../book/src/command-line.md");
    chapter!(testing, "../../../book/src/testing.md");
}
