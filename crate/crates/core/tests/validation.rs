use rfqho_core::hermite::{creation_multiplier, RFHermite};
use rfqho_core::validate::{Status, Validator};

// H̃_{n+1} = 2s·H̃_n + H̃_n' (wrong sign on the derivative)
fn broken_ladder(h: &RFHermite) -> RFHermite {
    let next = &(&creation_multiplier() * h.expr()) + &h.expr().differentiate();
    RFHermite::from_parts(h.n() + 1, next)
}

#[test]
fn sign_error_in_ladder_is_caught() {
    let v = Validator::with_ladder(broken_ladder);
    let r = v.ladder_rodrigues();
    assert_eq!(r.status, Status::Fail);
    assert!(!r.items.is_empty());
    assert_eq!(v.classical_reduction().status, Status::Fail);
}

#[test]
fn default_ladder_passes() {
    assert_eq!(Validator::default().ladder_rodrigues().status, Status::Pass);
}

#[test]
fn report_serializes() {
    let v = Validator::default();
    let (family, h4) = v.printed_family();
    assert_eq!(family.status, Status::Pass);
    assert_eq!(h4.status, Status::Informational);
    assert!(h4.detail.contains("13/2·α^2 - 7·α"));
    assert!(h4.detail.contains("7·α^2 - 8·α"));
}
