use rfqho_core::operator::{
    compose_factorization, fourier_image, fourier_remainder, normal_order, remainder_closed_form,
    reverted_factorization, scaled_factorization, OpExpr, OpWord,
};
use rfqho_core::rational::{int, rat};
use rfqho_core::spectral::{ground_state, symbol_derivative};
use rfqho_core::Rational;

fn samples() -> Vec<(Rational, Rational)> {
    vec![
        (int(1), int(2)),
        (rat(3, 2), int(1)),
        (int(2), int(2)),
        (rat(1, 2), rat(5, 3)),
        (rat(7, 4), rat(1, 3)),
    ]
}

#[test]
fn two_index_remainders_at_sample_points() {
    for (delta, gamma) in samples() {
        let f = compose_factorization(&delta, &gamma).unwrap();
        assert_eq!(f.remainder, remainder_closed_form(&delta, &gamma), "ε_γδ at ({delta}, {gamma})");
        let rev = reverted_factorization(&delta, &gamma).unwrap();
        assert_eq!(rev, remainder_closed_form(&gamma, &delta), "ε_δγ at ({delta}, {gamma})");
    }
}

#[test]
fn reverted_example() {
    let rev = reverted_factorization(&int(1), &int(2)).unwrap();
    assert_eq!(rev.to_string(), "1/2·D^(-1/2) + x·D^(1/2) - x·D^(1)");
}

#[test]
fn equal_indices_reduce_to_one_index_remainder() {
    for alpha in [int(1), rat(3, 2), int(2), rat(2, 5)] {
        let (_, _, eps) = scaled_factorization(&alpha).unwrap();
        let inv = int(1) / &alpha;
        let fwd = compose_factorization(&alpha, &alpha).unwrap().remainder.scale(&inv);
        let rev = reverted_factorization(&alpha, &alpha).unwrap().scale(&inv);
        assert_eq!(fwd, eps);
        assert_eq!(rev, eps);
        assert_eq!(eps, OpExpr::word(OpWord::new(rat(1, 2), 0, &alpha / int(2) - int(1))));
    }
}

#[test]
fn four_factor_products_are_bracket_independent() {
    let w = [OpWord::d(rat(3, 4)), OpWord::x(), OpWord::d(rat(-1, 3)), OpWord::new(int(2), 2, int(0))];
    let flat = normal_order(&w);
    let left = &(&normal_order(&w[..2]) * &normal_order(&w[2..3])) * &OpExpr::word(w[3].clone());
    let right = &OpExpr::word(w[0].clone()) * &normal_order(&w[1..]);
    assert_eq!(flat, left);
    assert_eq!(flat, right);
}

#[test]
fn k_space_image_and_symbol_derivative() {
    assert_eq!(symbol_derivative(&rat(3, 2)), (rat(3, 2), rat(1, 2)));
    for (delta, gamma) in samples() {
        for theta in [int(0), int(1), rat(1, 3)] {
            let eps = compose_factorization(&delta, &gamma).unwrap().remainder;
            assert_eq!(fourier_image(&eps, &theta).unwrap(), fourier_remainder(&gamma, &delta, &theta).unwrap());
        }
    }
}

#[test]
fn k_space_remainder_on_states() {
    let op = fourier_remainder(&int(2), &int(1), &int(0)).unwrap();
    let phi0 = ground_state(&rat(3, 2)).unwrap();
    for k in [-1.2, 0.5, 2.0] {
        let v = op.apply(&phi0, k).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
    }
}
