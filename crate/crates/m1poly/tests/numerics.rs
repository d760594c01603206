use m1poly::draws::draw_rng;
use m1poly::numerics::{
    gamma_ratio, hyp_pfq, laguerre, mu_factorial, mu_number, pochhammer, CompensatedSum,
    SeriesPolicy,
};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::RngExt;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Terminating `pFq` summed term by term in exact rational arithmetic,
/// together with the sum of the absolute terms.
fn hyp_exact(num: &[f64], den: &[f64], x: f64, terms: usize) -> (f64, f64) {
    let (num, den, x) = (
        num.iter().map(|&v| rat(v)).collect::<Vec<_>>(),
        den.iter().map(|&v| rat(v)).collect::<Vec<_>>(),
        rat(x),
    );
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut abs_sum = BigRational::zero();
    for k in 0..terms {
        sum += &term;
        abs_sum += term.abs();
        let kk = BigRational::from_integer(k.into());
        for a in &num {
            term *= a + &kk;
        }
        for b in &den {
            term /= b + &kk;
        }
        term = term * &x / (&kk + BigRational::one());
        if term.is_zero() {
            break;
        }
    }
    (sum.to_f64().unwrap(), abs_sum.to_f64().unwrap())
}

#[test]
fn terminating_hyp_matches_exact_rational_sum() {
    let policy = SeriesPolicy::default();
    let mut worst = 0.0f64;
    for i in 0..300 {
        let mut rng = draw_rng(11, i);
        let m = rng.random_range(0..=12usize);
        let p = rng.random_range(1..=4usize);
        let q = rng.random_range(0..=3usize);
        // dyadic parameters keep the rational arithmetic small
        let dyadic = |rng: &mut rand_chacha::ChaCha8Rng| (rng.random_range(1..=64) as f64) / 16.0;
        let mut num = vec![-(m as f64)];
        num.extend((1..p).map(|_| dyadic(&mut rng)));
        let den: Vec<f64> = (0..q).map(|_| dyadic(&mut rng)).collect();
        let x = if rng.random_bool(0.5) {
            1.0
        } else {
            -(rng.random_range(1..=32) as f64) / 16.0
        };
        let got = hyp_pfq(&num, &den, x, &policy).unwrap();
        let (want, scale) = hyp_exact(&num, &den, x, m + 1);
        worst = worst.max((got - want).abs() / scale);
    }
    assert!(
        worst <= 1e-13,
        "worst error relative to the absolute term sum {worst:e}"
    );
}

#[test]
fn spec_examples() {
    let policy = SeriesPolicy::default();
    assert_eq!(pochhammer(0.5, 3).unwrap(), 1.875);
    assert_eq!(mu_number(1, 0.5), 2.0);
    assert!(
        (hyp_pfq(&[-2.0, 1.0, 1.0], &[2.0, 2.0], 1.0, &policy).unwrap() - 11.0 / 18.0).abs()
            < 1e-15
    );
    assert!((laguerre(2, 0.0, 1.0).unwrap() + 0.5).abs() < 1e-15);
    assert!((gamma_ratio(&[0.5], &[1.5]).unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(hyp_pfq(&[0.3, 1.7], &[2.2], 0.0, &policy).unwrap(), 1.0);
}

#[test]
fn compensated_sum_keeps_small_terms() {
    let mut acc = CompensatedSum::new();
    for t in [1.0, 1e100, 1.0, -1e100] {
        acc.add(t);
    }
    assert_eq!(acc.value(), 2.0);
}

proptest! {
    #[test]
    fn pochhammer_step(a in -20.0f64..20.0, n in 0usize..50) {
        let (p, q) = (pochhammer(a, n), pochhammer(a, n + 1));
        if let (Ok(p), Ok(q)) = (p, q) {
            let want = p * (a + n as f64);
            prop_assert!((q - want).abs() <= 1e-13 * want.abs().max(1e-300));
        }
    }

    #[test]
    fn mu_factorial_pochhammer_form(mu in 0.05f64..4.0, k in 0usize..=20) {
        let k_fact: f64 = (1..=k).map(|v| v as f64).product();
        let four_k = 4f64.powi(k as i32);
        let even = four_k * k_fact * pochhammer(mu + 0.5, k).unwrap();
        let odd = 2.0 * (mu + 0.5) * four_k * k_fact * pochhammer(mu + 1.5, k).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        prop_assert!(rel(mu_factorial(2 * k, mu).unwrap(), even) <= 1e-12);
        prop_assert!(rel(mu_factorial(2 * k + 1, mu).unwrap(), odd) <= 1e-12);
    }

    #[test]
    fn laguerre_three_term(alpha in -0.9f64..5.0, x in 0.0f64..20.0, n in 1usize..40) {
        let l = |k| laguerre(k, alpha, x).unwrap();
        let (lm, l0, lp) = (l(n - 1), l(n), l(n + 1));
        let nf = n as f64;
        let lhs = (nf + 1.0) * lp;
        let rhs = (2.0 * nf + alpha + 1.0 - x) * l0 - (nf + alpha) * lm;
        // relative to the magnitude of the recurrence terms
        let scale = lhs.abs().max(((2.0 * nf + alpha + 1.0 - x) * l0).abs()).max(((nf + alpha) * lm).abs());
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale.max(1e-300));
    }
}
