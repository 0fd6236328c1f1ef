use wavecone::dsl::{builtin, parse_operator, BuiltinParams, OperatorSource};
use wavecone::nulllag::{
    murat_check, potential_to_jet_map, solve_null_lagrangians, solve_null_lagrangians_with, SolveOptions,
};
use wavecone::operator::sampling::{random_rational, rng};
use wavecone::operator::{constant_rank_check, RankVerdict};
use wavecone::polyalg::RationalMatrix;

fn params(n: usize, rows: Option<usize>) -> BuiltinParams {
    BuiltinParams { n: Some(n), rows, ..Default::default() }
}

fn random_complement(t: &RationalMatrix, dim: usize, rank: usize, seed: u64) -> RationalMatrix {
    let mut g = rng(seed);
    loop {
        let cols: Vec<Vec<_>> = (0..rank).map(|_| (0..dim).map(|_| random_rational(&mut g)).collect()).collect();
        let c = RationalMatrix::from_columns(&cols, dim);
        if (t * &c).rank() == rank {
            return c;
        }
    }
}

#[test]
fn f_space_is_independent_of_the_complement() {
    for (name, p) in [("div", params(2, Some(2))), ("divcurl", params(2, None)), ("symgrad", params(2, None))] {
        let (_, b) = builtin(name, &p).unwrap();
        let b = b.unwrap();
        let reference = solve_null_lagrangians(&b, 2).unwrap();
        let map = potential_to_jet_map(&b).unwrap();
        for seed in 0..3 {
            let c = random_complement(&map.t, map.jet.dim(), map.rank, seed);
            let opts = SolveOptions { complement: Some(c), ..Default::default() };
            let alt = solve_null_lagrangians_with(&b, 2, &opts).unwrap();
            assert_eq!(alt.f_space_dim, reference.f_space_dim, "{name}, seed {seed}");
            for e in &alt.elements {
                assert!(reference.contains(&e.f).unwrap());
            }
        }
    }
}

#[test]
fn emitted_null_lagrangians_pass_the_murat_test() {
    let cases = [
        ("div", params(2, Some(2))),
        ("divcurl", params(2, None)),
        ("divcurl", params(3, None)),
        ("hessian", params(2, None)),
        ("hessian", params(3, None)),
        ("curl", params(3, Some(3))),
    ];
    for (name, p) in cases {
        let (a, b) = builtin(name, &p).unwrap();
        let b = b.unwrap();
        let top = b.symbol.n().min(b.dim_v());
        for s in 2..=top {
            let basis = solve_null_lagrangians(&b, s).unwrap();
            assert!(basis.f_space_dim <= basis.c_space_dim);
            for e in &basis.elements {
                let rep = murat_check(&e.f, &a, 4, 11).unwrap();
                assert!(rep.passed, "{name} s={s}: {}", e.f.render("v"));
            }
        }
    }
}

#[test]
fn gradients_of_three_vectors_give_all_minors() {
    // 3x3 gradients: 9 quadratic minors and the cubic determinant.
    let (_, b) = builtin("curl", &params(3, Some(3))).unwrap();
    let b = b.unwrap();
    assert_eq!(solve_null_lagrangians(&b, 2).unwrap().f_space_dim, 9);
    assert_eq!(solve_null_lagrangians(&b, 3).unwrap().f_space_dim, 1);
}

#[test]
fn div_curl_in_three_dimensions() {
    let (_, b) = builtin("divcurl", &params(3, None)).unwrap();
    let basis = solve_null_lagrangians(&b.unwrap(), 2).unwrap();
    assert_eq!(basis.f_space_dim, 1);
}

#[test]
fn non_constant_rank_caveat() {
    // Kernels are nontrivial only on three lines, so random frequencies
    // mostly miss them and the Murat test says little; the rank check is what
    // flags the operator.
    let src = OperatorSource::new(
        "operator tartar { vars = 2; from = 3; order = 1; symbol = [[d1, 0, 0], [0, d2, 0], [0, 0, d1 + d2]]; }",
        "tartar.op",
    );
    let a = parse_operator(&src).unwrap();
    let rank = constant_rank_check(&a, 50, 0).unwrap();
    assert_eq!(rank.verdict, RankVerdict::NotConstant);
    let f = wavecone::dsl::parse_polynomial("v1*v2 + v3^2", 3, "v").unwrap();
    let rep = murat_check(&f, &a, 3, 0).unwrap();
    assert!(rep.discarded > rep.evaluations, "{:?}", rep);
}
