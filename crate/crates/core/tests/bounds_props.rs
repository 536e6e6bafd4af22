use hyperramsey::bounds::{
    builtin_rules, compute_table, extend_rules, pasting_rule, seed_facts, BoundTable,
    ExtendOutcome, Justification, LiftStyle, Limits, RejectReason, SeedFact, SeedKind,
};
use num_bigint::BigUint;

fn wide_table() -> BoundTable {
    let limits = Limits {
        k_min: 2,
        k_max: 9,
        p_max: 14,
        q_max: 14,
    };
    let mut facts = seed_facts(&limits, &[]).unwrap();
    facts.push(SeedFact::assumed(4, 5, 5, 34));
    compute_table(&facts, &builtin_rules(), limits)
}

#[test]
fn every_cell_replays() {
    let t = wide_table();
    let mut n = 0;
    for ((k, p, q), v) in t.cells() {
        let fact = t.fact(k, p, q).unwrap();
        assert_eq!(&fact.value, v);
        assert_eq!(fact.replay(t.rules()).unwrap(), *v, "r_{k}({p},{q})");
        n += 1;
    }
    assert!(n > 500);
}

#[test]
fn table_is_symmetric_monotone_and_above_the_floor() {
    let t = wide_table();
    let l = t.limits();
    for ((k, p, q), v) in t.cells() {
        assert!(*v >= BigUint::from(p.max(q)), "r_{k}({p},{q}) = {v}");
        if p > k && q > k {
            assert!(*v >= BigUint::from(k + 1));
        }
        if q <= l.p_max && p <= l.q_max {
            assert_eq!(t.value(k, q, p), Some(v), "r_{k}({p},{q}) vs r_{k}({q},{p})");
        }
        if p > k {
            assert!(t.value(k, p - 1, q).unwrap() <= v);
        }
        if q > k {
            assert!(t.value(k, p, q - 1).unwrap() <= v);
        }
    }
}

#[test]
fn recomputing_from_the_output_changes_nothing() {
    let t = wide_table();
    let facts: Vec<SeedFact> = t
        .cells()
        .map(|((k, p, q), v)| SeedFact {
            k,
            p,
            q,
            value: v.clone(),
            kind: SeedKind::Assumed,
        })
        .collect();
    let again = compute_table(&facts, &builtin_rules(), t.limits());
    let a: Vec<_> = t.cells().collect();
    let b: Vec<_> = again.cells().collect();
    assert_eq!(a, b);
    let mut t2 = t.clone();
    assert!(!t2.saturate());
}

#[test]
fn factors_are_at_least_two_whenever_a_rule_applies() {
    for rule in builtin_rules() {
        for k in 2..=30 {
            for p in k..=k + 12 {
                for q in k..=k + 40 {
                    if rule.applies(k, p, q) {
                        assert!(rule.factor.eval(k, p, q) >= 2, "{} at ({k},{p},{q})", rule.id);
                    }
                }
            }
        }
    }
}

#[test]
fn without_the_certificate_k4_stays_small() {
    let limits = Limits {
        k_min: 4,
        k_max: 4,
        p_max: 8,
        q_max: 8,
    };
    let facts = seed_facts(&limits, &[]).unwrap();
    let t = compute_table(&facts, &builtin_rules(), limits);
    assert_eq!(t.value(4, 5, 5), Some(&BigUint::from(5u32)));
    assert!(t.value(4, 8, 8).unwrap() < &BigUint::from(194041u32));
}

#[test]
fn extension_installs_a_verified_rule_for_k26() {
    let ExtendOutcome::Installed(rule) = extend_rules(26, 10_000_000).unwrap() else {
        panic!("k = 26 bases should be solvable");
    };
    assert!(rule.reverify().unwrap());
    let Justification::Witnesses(ws) = &rule.justification else {
        panic!("extended rule must carry witnesses");
    };
    assert_eq!(
        ws.iter().map(|w| (w.p, w.q, w.d)).collect::<Vec<_>>(),
        [(28, 28, 27), (29, 28, 28)]
    );
    assert!(rule.applies(26, 28, 28));
    assert!(!rule.applies(26, 28, 27));
    assert!(!rule.applies(27, 29, 29));

    let limits = Limits {
        k_min: 26,
        k_max: 26,
        p_max: 30,
        q_max: 30,
    };
    let facts = seed_facts(&limits, &[]).unwrap();
    let base = compute_table(&facts, &builtin_rules(), limits);
    let mut rules = builtin_rules();
    rules.push(rule);
    let ext = compute_table(&facts, &rules, limits);
    assert!(ext.value(26, 29, 29) > base.value(26, 29, 29));
    let f = ext.fact(26, 29, 29).unwrap();
    assert_eq!(f.replay(ext.rules()).unwrap(), f.value);
}

#[test]
fn exhausted_budget_installs_nothing() {
    let out = extend_rules(30, 1).unwrap();
    assert!(matches!(
        out,
        ExtendOutcome::Rejected {
            reason: RejectReason::BudgetExceeded { .. },
            ..
        }
    ));
}

#[test]
fn k9_off_diagonal_base_is_rejected_as_unsat() {
    let out = pasting_rule(9, LiftStyle::OffDiagonal, 10_000_000).unwrap();
    assert!(matches!(
        out,
        ExtendOutcome::Rejected {
            k: 9,
            p: 11,
            q: 10,
            d: 10,
            reason: RejectReason::Unsat
        }
    ));
}
