mod common;

use cartan::dsl;
use cartan::involution::{chart_equations, chart_values, Chart};
use cartan::prolong::{iterate_prolongation, prolong, restrict, torsion, Stop};
use cartan::{cartan_test, Error, ExteriorSystem, Scalar};
use common::*;

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn immersion_prolongs_to_the_three_parameter_family() {
    let doc = fixture("immersion");
    let sys = doc.system().unwrap();
    let pr = prolong(sys, Some(&names(&["a", "b", "c"]))).unwrap();
    assert_eq!(pr.parameters, names(&["a", "b", "c"]));
    assert_eq!(pr.parameter_unknowns, names(&["a_gt1_w1", "a_gt1_w2", "a_gt2_w1"]));
    let want = fixture("immersion-prolonged");
    let want_sys = want.system().unwrap();
    assert_eq!(pr.system.generators(), want_sys.generators());
    assert_eq!(pr.system.manifold().coframe(), want_sys.manifold().coframe());
    assert_eq!(pr.torsion.len(), 1);
    assert_eq!(pr.torsion[0].value, scalar_in(&want, "s/2 - R33 - K - a**2 - b*c"));
}

#[test]
fn chart_of_the_prolonged_immersion_has_rows_a_b_c_minus_a() {
    let doc = fixture("immersion");
    let pr = prolong(doc.system().unwrap(), Some(&names(&["a", "b", "c"]))).unwrap();
    let sol: std::collections::BTreeMap<_, _> = pr.solution.iter().cloned().collect();
    let m = pr.system.manifold();
    let s = |e: &str| dsl::parse_scalar(m, e).unwrap();
    assert_eq!(sol["a_gt1_w1"], s("a"));
    assert_eq!(sol["a_gt1_w2"], s("b"));
    assert_eq!(sol["a_gt2_w1"], s("c"));
    assert_eq!(sol["a_gt2_w2"], s("-a"));
    assert_eq!(sol["a_gt3_w1"], s("0"));
    assert_eq!(sol["a_gt3_w2"], s("0"));
    assert_eq!(sol["a_gt3_g"], s("1"));
}

#[test]
fn torsion_ignores_generator_order() {
    let doc = fixture("immersion-prolonged");
    let sys = doc.system().unwrap();
    let mut gens = sys.generators().to_vec();
    gens.reverse();
    let rev = ExteriorSystem::new(
        "rev",
        sys.manifold().clone(),
        gens,
        sys.p(),
        sys.independence().to_vec(),
    )
    .unwrap();
    let a: Vec<Scalar> = torsion(sys).unwrap().into_iter().map(|t| t.value).collect();
    let b: Vec<Scalar> = torsion(&rev).unwrap().into_iter().map(|t| t.value).collect();
    assert_eq!(a, b);
}

#[test]
fn lagrangian_prolongation_is_symmetric_and_involutive() {
    let doc = fixture("lagrangian-n2");
    let sys = doc.system().unwrap();
    let pr = prolong(sys, None).unwrap();
    assert_eq!(pr.parameters.len(), 3);
    assert!(pr.torsion.is_empty());
    let sol: std::collections::BTreeMap<_, _> = pr.solution.iter().cloned().collect();
    assert_eq!(sol["a_dy1_dx2"], sol["a_dy2_dx1"]);
    let a = cartan::involution::find_integral_element(sys, &doc.point(), 1).unwrap();
    let values = chart_values(&Chart::new(sys), &a);
    let mut pt = doc.point();
    for (p, u) in pr.parameters.iter().zip(&pr.parameter_unknowns) {
        pt.insert(p.clone(), values[u].clone());
    }
    let r = cartan_test(&pr.system, &pt, None, 1).unwrap();
    assert!(r.involutive);
}

#[test]
fn involutive_fixtures_prolong_without_torsion() {
    for name in ["harmonic", "webs", "frobenius", "trivial-5", "plane-curves"] {
        let doc = fixture(name);
        let pr = prolong(doc.system().unwrap(), None).unwrap();
        assert!(pr.torsion.is_empty(), "{name}: {:?}", pr.torsion);
    }
}

#[test]
fn webs_prolongation_has_six_parameters() {
    let doc = fixture("webs");
    let pr = prolong(doc.system().unwrap(), None).unwrap();
    assert_eq!(pr.parameters.len(), 6);
    assert_eq!(pr.system.dim(), 12);
}

fn frobenius_family(alpha: i64, beta: i64) -> String {
    format!(
        "manifold R3 {{ coordinates x y z; }}\n\
         system f on R3 {{ p = 2; independence = dx dy; generator dz - {alpha}*y*dx - {beta}*x*dy; }}\n\
         point {{ x = 1; y = 2; z = 0; }}\n"
    )
}

#[test]
fn frobenius_family_is_integrable_exactly_on_the_diagonal() {
    for alpha in -3..=3 {
        for beta in -3..=3 {
            let doc = dsl::parse(&frobenius_family(alpha, beta)).unwrap();
            let sys = doc.system().unwrap();
            let r = cartan_test(sys, &doc.point(), None, 0);
            let pr = prolong(sys, None);
            if alpha == beta {
                let r = r.unwrap();
                assert_eq!(r.characters, vec![1, 0, 0]);
                assert!(r.involutive);
                assert!(pr.unwrap().torsion.is_empty());
            } else {
                assert!(matches!(r, Err(Error::NoIntegralElement(_))), "{alpha} {beta}: {r:?}");
                assert!(matches!(pr, Err(Error::NoIntegralElement(_))), "{alpha} {beta}");
            }
        }
    }
}

#[test]
fn prolonged_generators_vanish_on_solved_graphs() {
    for name in ["harmonic", "lagrangian-n2", "frobenius"] {
        let doc = fixture(name);
        let sys = doc.system().unwrap();
        let pr = prolong(sys, None).unwrap();
        let eqs = chart_equations(sys);
        let bindings = pr.solution.iter().cloned().collect();
        for e in &eqs.equations {
            assert!(e.substitute(&bindings).unwrap().is_zero(), "{name}: {e}");
        }
    }
}

#[test]
fn restricting_by_zero_changes_nothing() {
    let doc = fixture("immersion-prolonged");
    let sys = doc.system().unwrap();
    assert_eq!(&restrict(sys, &Scalar::zero(), "c").unwrap(), sys);
}

#[test]
fn restricting_by_a_quadratic_in_the_target_fails() {
    let doc = fixture("immersion-prolonged");
    let sys = doc.system().unwrap();
    let eq = scalar_in(&doc, "a**2 - 1");
    assert!(matches!(restrict(sys, &eq, "a"), Err(Error::NotSolvable(_))));
}

#[test]
fn restricting_needs_a_coordinate_outside_the_independence_condition() {
    let doc = fixture("immersion-prolonged");
    let sys = doc.system().unwrap();
    let eq = scalar_in(&doc, "K - 1");
    assert!(matches!(restrict(sys, &eq, "K"), Err(Error::NotSolvable(_))));
    assert!(matches!(restrict(sys, &eq, "c"), Err(Error::NotSolvable(_))));
}

#[test]
fn iteration_endpoints() {
    let h = fixture("harmonic");
    let it = iterate_prolongation(h.system().unwrap(), &h.point(), 3, 1).unwrap();
    assert_eq!(it.stop, Stop::Involutive);
    assert_eq!(it.reports.len(), 1);

    let im = fixture("immersion");
    let it = iterate_prolongation(im.system().unwrap(), &im.point(), 3, 1).unwrap();
    assert!(matches!(it.stop, Stop::Torsion(ref t) if t.len() == 1));
    assert_eq!(it.system.dim(), 12);

    let it = iterate_prolongation(im.system().unwrap(), &im.point(), 0, 1).unwrap();
    assert_eq!(it.stop, Stop::MaxSteps);
}
