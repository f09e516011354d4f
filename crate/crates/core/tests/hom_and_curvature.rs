use koszul_perturb::connection::{build_connection, CurvatureInput};
use koszul_perturb::hom::{p_gv, p_t, EndElement};
use koszul_perturb::rng::stream;
use koszul_perturb::{Error, GradedElement, ModelConfig, Monomial, Rational};

fn mono(s0: u8, a: u8, b: u8) -> Monomial {
    Monomial::from_masks(0, [s0, 0, 0, 0], a, b)
}

fn end(config: ModelConfig, m: Monomial, c: i64) -> EndElement {
    EndElement::new(GradedElement::monomial(config, m, Rational::from_int(c)))
}

#[test]
fn homotopies_on_v_squared_e() {
    let c = ModelConfig::new(1, 0, 4).unwrap();
    let f = end(c, mono(2, 0, 1), 1);
    assert_eq!(p_t(&f).unwrap(), end(c, mono(1, 1, 1), 1));
    assert_eq!(p_gv(&f).unwrap(), end(c, mono(1, 0, 0), -1));
}

#[test]
fn generic_curvature_is_obstructed() {
    let c = ModelConfig::new(2, 2, 4).unwrap();
    let obstructed = (0..10u64).any(|s| {
        let r = CurvatureInput::random_generic(2, 2, &mut stream(s, "generic"));
        !r.is_integrable(c).unwrap()
            && matches!(build_connection(&r, c, 2), Err(Error::Precondition(msg)) if msg.contains("obstruction"))
    });
    assert!(obstructed);
}

#[test]
fn integrable_curvature_builds() {
    let c = ModelConfig::new(2, 3, 4).unwrap();
    for s in 0..5u64 {
        let r = CurvatureInput::random_integrable(2, 3, &mut stream(s, "integrable"));
        assert!(r.is_integrable(c).unwrap());
        build_connection(&r, c, 2).unwrap();
    }
}

#[test]
fn curvature_json_round_trip() {
    let r = CurvatureInput::random_integrable(2, 3, &mut stream(3, "json"));
    let back = CurvatureInput::from_json(&r.to_json()).unwrap();
    assert_eq!(back.to_json(), r.to_json());
    assert!(CurvatureInput::from_json(r#"{"d":1,"e":1,"entries":[{"w":0,"i":1,"j":1,"k":1,"c":"1"}]}"#).is_err());
}
