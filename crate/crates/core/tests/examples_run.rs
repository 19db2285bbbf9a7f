//! Every example doubles as a smoke test.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        #[path = $path]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().expect(concat!($path, " should run"));
        }
    };
}

example!(curves, "../examples/curves.rs");
example!(jacobian, "../examples/jacobian.rs");
example!(psi_kernel, "../examples/psi_kernel.rs");
example!(flattening, "../examples/flattening.rs");
example!(lemma1_chain, "../examples/lemma1_chain.rs");
example!(sm_shells, "../examples/sm_shells.rs");
example!(spectral_probe, "../examples/spectral_probe.rs");
example!(exponents, "../examples/exponents.rs");
example!(run_config, "../examples/run_config.rs");
