use bddts::format::model_from_value;
use bddts::saturation::is_saturated;

#[test]
fn exported_models_load_back() {
    let door = include_str!("../../core/data/door.feature");
    let r: serde_json::Value = serde_json::from_str(&bddts_web::saturate_scenario(door)).unwrap();
    let b = model_from_value(r["model"].clone()).unwrap();
    assert!(b.saturated && is_saturated(&b, &b.domain().unwrap()).unwrap());

    let denied = include_str!("../../core/data/door_denied.feature");
    let r: serde_json::Value = serde_json::from_str(&bddts_web::compose_scenarios(door, denied)).unwrap();
    let c = model_from_value(r["model"].clone()).unwrap();
    assert_eq!(r["locations"], c.locations.len());
    assert!(c.locations.iter().any(|l| l.name == "(2,⊥)"));
}
