use wavecone::appendix::reproduce_appendix;

#[test]
fn all_five_claims_hold() {
    let rep = reproduce_appendix(50, 0).unwrap();
    for (claim, ok) in rep.verdicts() {
        assert!(ok, "{claim}: {}", rep.to_json());
    }
    assert_eq!(rep.searches.len(), 2);
    assert_eq!(rep.to_json()["verdicts"].as_array().unwrap().len(), 5);
}

#[test]
fn third_order_search_finds_both_potentials() {
    use wavecone::dsl::{builtin, BuiltinParams};
    use wavecone::potential::potentials_of_order;
    let load = |n: &str| builtin(n, &BuiltinParams::default()).unwrap().0;
    let a = load("appendix_A");
    let b1 = load("appendix_B1");
    let b2 = load("appendix_B2");
    let s = potentials_of_order(&a, 3, 0, Some(b1.dim_from())).unwrap();
    assert!(s.potential_exists, "{}", s.to_json());
    assert!(s.contains(&b1).unwrap());
    assert!(s.contains(&b2).unwrap());
}
