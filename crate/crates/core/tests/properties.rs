use std::f64::consts::PI;

use proptest::prelude::*;
use toeplitz_spectra::eigensolve::full_spectrum;
use toeplitz_spectra::fraclap::{constants, cutoff_q, eig_approx, mode_vector, mu_tilde, phi_star};
use toeplitz_spectra::predictor::{levinson, verify_spectral_match};
use toeplitz_spectra::symbols::{parse_preset, AnySymbol, FourierSymbol, SymbolDoc, Symbol};
use toeplitz_spectra::toeplitz::dense_eigh_with_cap;
use toeplitz_spectra::{MatvecMode, ToeplitzMatrix};

/// Even trigonometric polynomial bounded below by `margin`.
fn positive_symbol() -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0..1.0f64, 1..6), 0.05..1.0f64).prop_map(|(tail, margin)| {
        let mass: f64 = tail.iter().map(|c| 2.0 * c.abs()).sum();
        std::iter::once(mass + margin).chain(tail).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_matvec_matches_naive(coeffs in prop::collection::vec(-2.0..2.0f64, 1..40), n in 1usize..300, seed in 0u64..1000) {
        let sym = FourierSymbol::new(coeffs, f64::INFINITY).unwrap();
        let t = ToeplitzMatrix::build(&sym, n).unwrap();
        let x: Vec<f64> = (0..t.size()).map(|i| ((i as u64 * 2654435761 + seed) % 1000) as f64 / 500.0 - 1.0).collect();
        let a = t.matvec(&x, MatvecMode::Naive).unwrap();
        let b = t.matvec(&x, MatvecMode::Fft).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() < 1e-11 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn predictor_reproduces_autocovariances(coeffs in positive_symbol(), m in 1usize..24) {
        let sym = FourierSymbol::new(coeffs, f64::INFINITY).unwrap();
        let autocov = sym.first_column(m).unwrap();
        let k = levinson(&autocov).unwrap();
        prop_assert!(k.reflection.iter().all(|r| r.abs() < 1.0));
        prop_assert!(k.zero_free_check(1024).zero_free);
        prop_assert!(verify_spectral_match(&k, &autocov).unwrap().max_deviation < 1e-9);
    }

    #[test]
    fn dense_eigenpairs_are_consistent(coeffs in positive_symbol(), n in 2usize..60) {
        let sym = FourierSymbol::new(coeffs, f64::INFINITY).unwrap();
        let t = ToeplitzMatrix::build(&sym, n).unwrap();
        let d = dense_eigh_with_cap(&t, 4096, true).unwrap();
        prop_assert!(d.residual_norm < 1e-11 * t.norm_inf().max(1.0));
        prop_assert!(d.orthogonality < 1e-11);
        prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        // Eigenvalues of T_N(h) lie inside the range of h.
        let (lo, hi) = (0..512).map(|i| sym.value(PI * i as f64 / 511.0)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        prop_assert!(d.eigenvalues[0] > lo - 1e-9 && d.eigenvalues[n] < hi + 1e-9);
    }

    #[test]
    fn approximation_identity(alpha in 0.05..0.95f64, k in 1usize..200, n in 256usize..8192) {
        prop_assume!((alpha - 0.5).abs() > 1e-3);
        let c = constants(alpha).unwrap();
        let e = eig_approx(&c, 1.0, n, k).unwrap();
        let lhs = e.approx * (n as f64).powf(2.0 * alpha);
        prop_assert!((lhs - mu_tilde(alpha, k)).abs() <= 1e-13 * mu_tilde(alpha, k));
        prop_assert!(e.bound > 0.0 && c.bound(k + 1, n) < e.bound && c.bound(k, 2 * n) < e.bound);
    }

    #[test]
    fn mode_vectors_are_bounded_and_scale(alpha in 0.05..0.95f64, k in 1usize..50, c0 in 0.1..5.0f64) {
        let n = 64;
        let z = mode_vector(alpha, c0, n, k);
        let scale = c0 / (n as f64).sqrt();
        prop_assert!(z.raw.iter().all(|v| v.abs() <= scale + 1e-15));
        let norm: f64 = z.normalized.iter().map(|v| v * v).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!(phi_star(alpha, k, 0.3).abs() <= 1.0);
    }

    #[test]
    fn cutoff_is_monotone(a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(cutoff_q(lo) <= cutoff_q(hi));
        prop_assert!((0.0..=1.0).contains(&cutoff_q(a)));
    }

    #[test]
    fn symbol_documents_round_trip(coeffs in prop::collection::vec(-3.0..3.0f64, 1..10)) {
        let s = AnySymbol::Fourier(FourierSymbol::new(coeffs.clone(), f64::INFINITY).unwrap());
        let text = serde_json::to_string(&s.to_doc()).unwrap();
        let doc: SymbolDoc = serde_json::from_str(&text).unwrap();
        let back = AnySymbol::from_doc(&doc, 0).unwrap();
        prop_assert_eq!(back.as_symbol().first_column(coeffs.len() + 2).unwrap(), s.as_symbol().first_column(coeffs.len() + 2).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tridiagonal_spectrum_is_exact(n in 2usize..48) {
        let f = parse_preset("tridiag", 0).unwrap().as_loop().unwrap();
        let r = full_spectrum(&f, n).unwrap();
        prop_assert_eq!(r.records.len(), n + 1);
        for rec in &r.records {
            let exact = 2.0 - 2.0 * (rec.k as f64 * PI / (n + 2) as f64).cos();
            prop_assert!((rec.lambda - exact).abs() < 1e-12);
            prop_assert!(rec.gamma.abs() < 1e-10);
        }
    }
}

#[test]
fn spectrum_is_shift_equivariant() {
    // Adding a constant to f shifts every eigenvalue and leaves γ unchanged.
    let base = parse_preset("loop1", 0).unwrap().as_loop().unwrap();
    let shifted = FourierSymbol::new(vec![1.375 + 3.0, -0.75, 0.0625], f64::INFINITY).unwrap();
    let shifted = toeplitz_spectra::SimpleLoopSymbol::from_fourier(shifted).unwrap();
    let a = full_spectrum(&base, 40).unwrap();
    let b = full_spectrum(&shifted, 40).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert!((y.lambda - x.lambda - 3.0).abs() < 1e-12);
        assert!((y.gamma - x.gamma).abs() < 1e-9);
    }
}
