use std::collections::HashSet;

use ndescent::elliptic::Curve;
use ndescent::job::{run, JobSpec};
use ndescent::Tower;

fn job(text: &str) -> JobSpec {
    serde_json::from_str(text).unwrap()
}

/// `#E(F_p)/nE(F_p)` by listing `E(F_p)` and its `n`-th multiples.
fn quotient_order(p: u64, a4: i64, a6: i64, n: i64) -> usize {
    let curve = Curve::new(&Tower::new(p), a4, a6).unwrap();
    let pts = curve.points_over(&curve.tower().prime());
    let image: HashSet<_> = pts.iter().map(|q| curve.mul(n, q)).collect();
    pts.len() / image.len()
}

#[test]
fn all_classes_matches_the_quotient_group() {
    for (p, a4, a6) in [(7, 0, 2), (11, 1, 3), (13, 0, 2)] {
        let r = run(&job(&format!(
            r#"{{"p":{p},"a4":{a4},"a6":{a6},"n":3,"classes":"all-classes","method":"hesse","verify":"fast"}}"#
        )))
        .unwrap();
        assert_eq!(r.classes.len(), quotient_order(p, a4, a6, 3), "p={p}");
        assert!(r.passed(), "p={p}");
    }
}

#[test]
fn trivial_class_is_consistent_across_methods() {
    let r = run(&job(
        r#"{"p":13,"a4":2,"a6":5,"n":3,"classes":{"point":"infinity"},"method":"all","seed":2}"#,
    ))
    .unwrap();
    assert!(r.passed());
    let c = &r.classes[0];
    assert_eq!(c.cross.get("invariants_agree"), Some(&true));
    assert_eq!(c.cross.get("counts_agree"), Some(&true));
    let h = c.methods.hesse.as_ref().unwrap();
    assert_eq!(h.candidates.len(), h.nu);
    assert_eq!(h.cubic, c.methods.flex.as_ref().unwrap().cubic);
}

#[test]
fn explicit_rho_round_trips_through_the_report() {
    let first = run(&job(
        r#"{"p":7,"a4":3,"a6":2,"n":3,"classes":"all-classes","method":"segre","seed":6}"#,
    ))
    .unwrap();
    let setup = ndescent::pipeline::Setup::new(7, 3, 2, 3, 6).unwrap();
    let reps = ndescent::etale::kummer_representatives(&setup.curve, 3);
    let class = setup.etale.class_from_point(&reps[1], 6).unwrap();
    let spec = serde_json::to_string(&setup.etale.class_spec(&class)).unwrap();
    let second = run(&job(&format!(
        r#"{{"p":7,"a4":3,"a6":2,"n":3,"classes":{{"rho":{spec}}},"method":"segre","seed":6}}"#
    )))
    .unwrap();
    assert!(second.passed());
    assert_eq!(second.classes[0].rho_digest, first.classes[1].rho_digest);
}

#[test]
fn even_n_runs_segre_only() {
    let r = run(&job(
        r#"{"p":11,"a4":1,"a6":3,"n":2,"classes":"all-classes"}"#,
    ))
    .unwrap();
    assert!(r.passed());
    assert_eq!(r.classes.len(), quotient_order(11, 1, 3, 2));
    for c in &r.classes {
        assert!(c.methods.hesse.is_none() && c.methods.flex.is_none());
        let s = c.methods.segre.as_ref().unwrap();
        assert_eq!(s.checks.get("quadric_zeros"), Some(&true));
    }
}
