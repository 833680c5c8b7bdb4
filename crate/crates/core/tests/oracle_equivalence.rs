mod support;

use support::oracle::{check_case, oracle_series};

use gevrey_core::{gevrey_jet, time_jet, NumericMode, PdeModel, Sigma};
use rug::Rational;

#[test]
fn fifty_random_cases_match() {
    for seed in 0..50 {
        check_case(seed).unwrap();
    }
}

#[test]
fn oracle_reproduces_hand_values() {
    let phi = gevrey_jet(&Sigma::from_u32(1).unwrap(), 6, 2, NumericMode::Exact).unwrap();
    let v = oracle_series(&PdeModel::kp1_5(Rational::new()), &phi, None, 1, 0, 0);
    assert_eq!(v[1], -121);
    let v = oracle_series(&PdeModel::kp1_5(Rational::from(1)), &phi, None, 1, 0, 0);
    assert_eq!(v[1], -127);
}

#[test]
fn prescribed_data_matches_oracle_to_j3() {
    let model = PdeModel::kp1_5(Rational::new());
    let phi = gevrey_jet(&Sigma::from_u32(1).unwrap(), 18, 6, NumericMode::Exact).unwrap();
    let tj = time_jet(&model, &phi, 3).unwrap();
    let want = oracle_series(&model, &phi, None, 3, 0, 0);
    for (j, w) in want.iter().enumerate() {
        assert_eq!(tj.value(j, 0, 0).unwrap().as_rational(), Some(w));
    }
}
