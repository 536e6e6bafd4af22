use hyperramsey::pasting::{
    build_pasting_cnf, closed_form_coloring, crossing_domain, decode_coloring,
    verify_pasting_coloring, ClosedForm, Color, PcvColoring,
};
use hyperramsey::pcv::Pcv;
use hyperramsey::sat::{solve_complete, Assignment, CompleteOutcome};
use hyperramsey::Error;

/// All 2^m colorings of the crossing members of `V_k(d)`.
fn all_colorings(k: u32, d: u32) -> Vec<PcvColoring> {
    let dom = crossing_domain(k, d);
    (0u32..1 << dom.len())
        .map(|mask| {
            let entries = dom.iter().enumerate().map(|(i, v)| {
                let c = if mask >> i & 1 == 1 { Color::Blue } else { Color::Red };
                (v.clone(), c)
            });
            PcvColoring::new(k, entries).unwrap()
        })
        .collect()
}

fn subsets(n: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for v in start..n {
            if n - v < size - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, size, cur, f);
            cur.pop();
        }
    }
    rec(0, n, size, &mut Vec::new(), f);
}

/// Materializes `d` blocks of `b` vertices, colors each crossing k-subset by
/// the vector of its block counts, and checks every p-subset with block
/// intersections at most p-2 for a blue crossing edge and every q-subset with
/// intersections at most q-1 for a red one.
fn graph_level_valid(chi: &PcvColoring, k: u32, p: u32, q: u32, d: u32, b: u32) -> bool {
    let n = (d * b) as usize;
    let block = |v: usize| v / b as usize;
    let edge_color = |e: &[usize]| -> Option<Color> {
        let mut counts = vec![0u32; d as usize];
        for &v in e {
            counts[block(v)] += 1;
        }
        let pcv = Pcv::from_counts(&counts).unwrap();
        if pcv.is_crossing() {
            Some(chi.get(&pcv).unwrap())
        } else {
            None
        }
    };
    for (size, cap, wanted) in [(p, p - 2, Color::Blue), (q, q - 1, Color::Red)] {
        let mut ok = true;
        subsets(n, size as usize, &mut |s| {
            if !ok {
                return;
            }
            let mut counts = vec![0u32; d as usize];
            for &v in s {
                counts[block(v)] += 1;
            }
            if counts.iter().any(|&c| c > cap) {
                return;
            }
            let mut found = false;
            subsets(s.len(), k as usize, &mut |idx| {
                if !found {
                    let e: Vec<usize> = idx.iter().map(|&i| s[i]).collect();
                    found = edge_color(&e) == Some(wanted);
                }
            });
            ok = found;
        });
        if !ok {
            return false;
        }
    }
    true
}

#[test]
fn vector_verdict_matches_graph_level_oracle() {
    let b = 4;
    let mut checked = 0;
    for (k, ps, qs) in [(3, 4..=6, 4..=5), (4, 5..=6, 5..=5)] {
        for d in 2..=3 {
            for chi in all_colorings(k, d) {
                for p in ps.clone() {
                    for q in qs.clone() {
                        let fast = verify_pasting_coloring(&chi, p, q, d).unwrap().is_valid();
                        let slow = graph_level_valid(&chi, k, p, q, d, b);
                        assert_eq!(fast, slow, "k={k} p={p} q={q} d={d} chi={:?}", chi.entries());
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 50);
}

/// Small instances whose CNF builds (an empty clause is a build error).
fn small_instances() -> Vec<(u32, u32, u32, u32)> {
    let mut out = Vec::new();
    for k in 3..=5 {
        for p in k + 1..=k + 3 {
            for q in k + 1..=k + 3 {
                for d in 2..=4 {
                    out.push((k, p, q, d));
                }
            }
        }
    }
    out
}

fn assignment_from_mask(n: usize, mask: u32) -> Assignment {
    Assignment::new((0..n).map(|i| mask >> i & 1 == 1).collect())
}

#[test]
fn cnf_satisfaction_matches_verification() {
    for (k, p, q, d) in small_instances() {
        let (inst, cnf) = match build_pasting_cnf(k, p, q, d) {
            Ok(x) => x,
            Err(Error::EmptyClause { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let n = inst.variable_count();
        if n > 12 {
            continue;
        }
        for mask in 0u32..1 << n {
            let a = assignment_from_mask(n, mask);
            let chi = decode_coloring(&inst, &a).unwrap();
            let valid = verify_pasting_coloring(&chi, p, q, d).unwrap().is_valid();
            assert_eq!(cnf.is_satisfied_by(&a), valid, "({k},{p},{q},{d}) mask {mask:b}");
        }
    }
}

#[test]
fn solved_colorings_verify_and_lift() {
    let mut solved = 0;
    for (k, p, q, d) in small_instances() {
        let Ok((inst, cnf)) = build_pasting_cnf(k, p, q, d) else {
            continue;
        };
        let CompleteOutcome::Sat(a) = solve_complete(&cnf, 1_000_000) else {
            continue;
        };
        let chi = decode_coloring(&inst, &a).unwrap();
        assert!(verify_pasting_coloring(&chi, p, q, d).unwrap().is_valid());
        for p2 in p..=p + 3 {
            for q2 in q..=q + 3 {
                assert!(
                    verify_pasting_coloring(&chi, p2, q2, d).unwrap().is_valid(),
                    "({k},{p},{q},{d}) does not lift to ({p2},{q2})"
                );
            }
        }
        solved += 1;
    }
    assert!(solved > 10);
}

#[test]
fn closed_forms_lift() {
    let cases = [
        (closed_form_coloring(ClosedForm::Chi1).unwrap(), 6, 5, 2),
        (closed_form_coloring(ClosedForm::Chi2).unwrap(), 6, 7, 5),
    ];
    for (chi, p, q, d) in cases {
        for p2 in p..=p + 3 {
            for q2 in q..=q + 3 {
                assert!(verify_pasting_coloring(&chi, p2, q2, d).unwrap().is_valid());
            }
        }
    }
}

#[test]
fn two_divide_parameters() {
    for k in 4..=20 {
        let chi = closed_form_coloring(ClosedForm::TwoDivide(k)).unwrap();
        let q = if k % 2 == 0 { k + 1 } else { k + 2 };
        assert!(
            verify_pasting_coloring(&chi, k + 2, q, 2).unwrap().is_valid(),
            "two_divide({k})"
        );
    }
}

#[test]
fn large_q_sweep() {
    let mut checked = 0;
    for k in 4..=12 {
        for q in k + 1..=4 * k {
            let d = (q - 1) / (k - 2);
            if d < 3 {
                continue;
            }
            let chi = closed_form_coloring(ClosedForm::LargeQ { k, d }).unwrap();
            assert!(
                verify_pasting_coloring(&chi, k + 2, q, d).unwrap().is_valid(),
                "large_q k={k} q={q} d={d}"
            );
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn coloring_text_round_trips() {
    for (k, p, q, d) in small_instances() {
        let Ok((inst, cnf)) = build_pasting_cnf(k, p, q, d) else {
            continue;
        };
        if let CompleteOutcome::Sat(a) = solve_complete(&cnf, 1_000_000) {
            let chi = decode_coloring(&inst, &a).unwrap();
            let text = chi.to_text(d);
            let (back, d2) = PcvColoring::parse(&text).unwrap();
            assert_eq!((back, d2), (chi, d));
        }
    }
}
