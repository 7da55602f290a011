macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(poisson_periodogram);
example!(multitaper_thomas);
example!(kernel_smoothing);
example!(rotational_average);
example!(isotropic_estimators);
example!(max_wavenumber);
example!(simulate_models);
example!(moment_oracles);
example!(bench_study);
example!(io_pipeline);
