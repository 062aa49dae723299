//! Generate, classify, compare: every descriptor on every small context.

use semifeq::feq::classify::to_complex_vec;
use semifeq::feq::dalembert::Descriptor;
use semifeq::feq::{Classifier, E2Class};
use semifeq::oracle::{all_contexts, family_instances, Generated, GRID};
use semifeq::{Context, ContextFile, Scalar};

const TOL: f64 = 1e-8;

#[test]
fn generated_solutions_classify_back() {
    let mut checked = 0;
    for (i, ctx) in all_contexts(3).iter().enumerate() {
        let cl = Classifier::new(ctx);
        for (d, res) in family_instances(ctx, &GRID) {
            match (d, res) {
                (Descriptor::E1(d), Ok(Generated::Dalembert(f, g, h))) => {
                    let class = cl.classify_e1(&to_complex_vec(&f), &to_complex_vec(&g), &to_complex_vec(&h), TOL);
                    assert!(cl.agrees_with(&class, &d, TOL), "context {i}: {d:?} classified as {class:?}");
                    checked += 1;
                }
                (Descriptor::E2(d), Ok(Generated::Sine(k, l))) => {
                    let class = cl.classify_e2(&to_complex_vec(&k), &to_complex_vec(&l), TOL);
                    assert_eq!(class.tag(), d.tag(), "context {i}: {d:?}");
                    checked += 1;
                }
                (_, Err(_)) => {}
                (d, Ok(_)) => panic!("generator answered the wrong equation for {d:?}"),
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn zero_k_is_its_own_stratum() {
    let ctx = Context::plain(semifeq::semigroup::catalog::cyclic_group(3));
    let cl = Classifier::new(&ctx);
    let z = to_complex_vec(&vec![Scalar::zero(); 3]);
    let l = to_complex_vec(&[Scalar::from_int(4), Scalar::from_int(-1), Scalar::one()]);
    assert!(matches!(cl.classify_e2(&z, &l, TOL), E2Class::KZero));
}

#[test]
fn context_files_round_trip() {
    for ctx in all_contexts(3) {
        let text = serde_json::to_string(&ctx.to_file()).unwrap();
        let back = Context::from_file(serde_json::from_str::<ContextFile>(&text).unwrap()).unwrap();
        assert_eq!(back.semigroup, ctx.semigroup);
        assert_eq!(back.sigma, ctx.sigma);
        assert_eq!(back.mu.scalars(), ctx.mu.scalars());
    }
}
