//! Randomized law checking across the crate: permutation algebra, spec
//! parsing and canonicalization, heredity, table consistency, and
//! certificate tamper detection.

use std::collections::HashSet;

use permsort_core::classes::ClassHandle;
use permsort_core::engine::{self, BfsOptions, DistanceTable};
use permsort_core::perm::Perm;
use permsort_core::sorters::{verify_certificate, SortCertificate, Sorter};
use permsort_core::Error;
use proptest::prelude::*;

fn perm_strategy(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Perm> {
    sizes
        .prop_flat_map(|n| Just((1..=n as u16).collect::<Vec<u16>>()).prop_shuffle())
        .prop_map(|v| Perm::new(v).expect("shuffled values form a permutation"))
}

/// Random well-formed spec text: named leaves and avoidance bases under a
/// few layers of symmetry, closure, and union constructors.
fn spec_strategy() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec![
        "inc",
        "dec",
        "L",
        "F",
        "R",
        "RR",
        "PBT",
        "Bub",
        "T",
        "Pan",
        "Ins",
        "Av(321)",
        "Av(231,312)",
        "Av(321,3412)",
        "grid([inc,dec])",
        "grid([inc],[inc])",
        "fringe(2)",
        "rfringe(2)",
    ])
    .prop_map(String::from);
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| format!("rev({s})")),
            inner.clone().prop_map(|s| format!("comp({s})")),
            inner.clone().prop_map(|s| format!("inv({s})")),
            inner.clone().prop_map(|s| format!("flip({s})")),
            inner.clone().prop_map(|s| format!("sumcl({s})")),
            inner.clone().prop_map(|s| format!("skewcl({s})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("union({a},{b})")),
        ]
    })
}

/// Drops the point at `idx`, compressing the remaining values back to a
/// permutation: the one-point patterns heredity quantifies over.
fn delete_point(p: &Perm, idx: usize) -> Perm {
    let removed = p.at(idx + 1) as u16;
    let vals: Vec<u16> = p
        .values()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &v)| if v > removed { v - 1 } else { v })
        .collect();
    Perm::new(vals).expect("deleting a point leaves a permutation")
}

proptest! {
    #[test]
    fn composition_laws(
        a in perm_strategy(1..=7),
        seed in any::<u64>(),
    ) {
        // Derive b and c of the same size from the seed so the triple is
        // uniform without a custom strategy.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let shuffle = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut v: Vec<u16> = (1..=a.len() as u16).collect();
            for i in (1..v.len()).rev() {
                let j = rand::Rng::gen_range(rng, 0..=i);
                v.swap(i, j);
            }
            Perm::new(v).unwrap()
        };
        let b = shuffle(&mut rng);
        let c = shuffle(&mut rng);
        let n = a.len();

        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert_eq!(a.compose(&Perm::identity(n)), a.clone());
        prop_assert_eq!(Perm::identity(n).compose(&a), a.clone());
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert!(a.inverse().compose(&a).is_identity());
        prop_assert_eq!(a.inverse().inverse(), a.clone());
        // Antihomomorphism: inverting swaps the factors.
        prop_assert_eq!(a.compose(&b).inverse(), b.inverse().compose(&a.inverse()));
    }

    #[test]
    fn symmetry_laws(p in perm_strategy(1..=9)) {
        prop_assert_eq!(p.reverse().reverse(), p.clone());
        prop_assert_eq!(p.complement().complement(), p.clone());
        prop_assert_eq!(p.flip().flip(), p.clone());
        prop_assert_eq!(
            p.reverse().complement(),
            p.complement().reverse()
        );
        // Reversal before inversion is complementation after it.
        prop_assert_eq!(p.reverse().inverse(), p.inverse().complement());

        let n = p.len() as u64;
        prop_assert_eq!(p.inversions(), p.inverse().inversions());
        prop_assert_eq!(p.reverse().inversions(), n * (n - 1) / 2 - p.inversions());
        prop_assert_eq!(p.total_cyclic_distance(), p.reverse().total_cyclic_distance());
    }

    #[test]
    fn sum_laws(a in perm_strategy(1..=5), b in perm_strategy(1..=5)) {
        let s = a.direct_sum(&b);
        prop_assert_eq!(s.len(), a.len() + b.len());
        prop_assert!(s.contains(&a));
        prop_assert!(s.contains(&b));

        // The finest decomposition concatenates across a direct sum.
        let mut parts = a.sum_components();
        parts.extend(b.sum_components());
        prop_assert_eq!(s.sum_components(), parts);

        let k = a.skew_sum(&b);
        let mut parts = a.skew_components();
        parts.extend(b.skew_components());
        prop_assert_eq!(k.skew_components(), parts);

        // Skew and direct sums are each other's mirror images.
        prop_assert_eq!(
            a.complement().direct_sum(&b.complement()).complement(),
            a.skew_sum(&b)
        );
    }

    #[test]
    fn text_round_trips(p in perm_strategy(1..=12)) {
        let display: Perm = p.to_string().parse().expect("display text reparses");
        prop_assert_eq!(display, p.clone());
        let token: Perm = p.to_token().parse().expect("token text reparses");
        prop_assert_eq!(token, p);
    }

    #[test]
    fn specs_parse_canonicalize_and_stay_hereditary(spec in spec_strategy()) {
        let c = ClassHandle::parse(&spec).expect("generated specs parse");

        // Canonicalization is idempotent and preserves membership.
        let canon = c.canonical_string();
        let c2 = ClassHandle::parse(canon).expect("canonical form reparses");
        prop_assert_eq!(c2.canonical_string(), canon);

        let level4: HashSet<Perm> = c.level(4).iter().cloned().collect();
        for p in ClassHandle::parse("all").unwrap().level(4).iter() {
            prop_assert_eq!(c.member(p), level4.contains(p), "{} on {}", spec, p);
            prop_assert_eq!(c2.member(p), level4.contains(p), "{} on {}", canon, p);
        }

        // Heredity: every one-point deletion of a member is a member.
        for p in c.level(5).iter() {
            for idx in 0..5 {
                prop_assert!(c.member(&delete_point(p, idx)), "{} loses {} from {}", spec, idx, p);
            }
        }
    }

    #[test]
    fn tampered_certificates_are_rejected(
        p in perm_strategy(2..=8),
        which in 0usize..8,
        kind in 0usize..4,
        at in any::<prop::sample::Index>(),
    ) {
        let sorter = Sorter::ALL[which];
        let good = sorter.sort(&p);
        prop_assert!(verify_certificate(&good).is_ok());

        let mut bad = good.clone();
        match kind {
            0 if !bad.steps.is_empty() => {
                let i = at.index(bad.steps.len());
                bad.steps.remove(i);
            }
            1 if !bad.steps.is_empty() => {
                let i = at.index(bad.steps.len());
                let again = bad.steps[i].clone();
                bad.steps.insert(i, again);
            }
            2 if !bad.steps.is_empty() => {
                // Swapping two entries of one step changes it, so the
                // product no longer reaches the identity even when the
                // mangled step stays inside the class.
                let i = at.index(bad.steps.len());
                let mut vals = bad.steps[i].values().to_vec();
                let j = at.index(vals.len() - 1);
                vals.swap(j, j + 1);
                bad.steps[i] = Perm::new(vals).unwrap();
            }
            _ => {
                // Steps sort the original input, not this one.
                let mut vals = bad.input.values().to_vec();
                vals.swap(0, 1);
                bad.input = Perm::new(vals).unwrap();
            }
        }
        if bad == good {
            // Identity input with a step tamper selected: nothing to break.
            return Ok(());
        }
        prop_assert!(
            matches!(verify_certificate(&bad), Err(Error::Verification(_))),
            "{} tamper {} escaped detection", sorter.token(), kind
        );
    }
}

/// Distance-table sanity against the step semantics: applying one class
/// member changes the sorting time by at most one, every positive time has
/// a predecessor one step cheaper, and the recovered optimal step sequence
/// is a valid certificate of exactly that length.
#[test]
fn tables_agree_with_step_semantics() {
    let opts = BfsOptions::default();
    for spec in ["Bub", "F", "T", "R", "Ins", "grid([inc,inc])"] {
        let class = ClassHandle::parse(spec).unwrap();
        let n = 5;
        let table = DistanceTable::build(&class, n, &opts).unwrap();
        let gens: Vec<Perm> = class
            .level(n)
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        for p in ClassHandle::parse("all").unwrap().level(n).iter() {
            let st = table.sorting_time(p).unwrap();
            let neighbor_times: Vec<Option<u32>> = gens
                .iter()
                .map(|g| table.sorting_time(&p.compose(g)).unwrap())
                .collect();
            match st {
                Some(0) => assert!(p.is_identity()),
                Some(d) => {
                    for t in neighbor_times.iter().flatten() {
                        assert!(d <= t + 1, "{spec}: {p} jumps from {t} to {d}");
                    }
                    assert!(
                        neighbor_times.iter().flatten().any(|&t| t == d - 1),
                        "{spec}: {p} at time {d} has no cheaper neighbor"
                    );

                    let steps = table
                        .shortest_steps(&class, p)
                        .unwrap()
                        .expect("finite time implies a sequence");
                    assert_eq!(steps.len() as u32, d);
                    verify_certificate(&SortCertificate {
                        input: p.clone(),
                        class: spec.to_string(),
                        steps,
                    })
                    .unwrap();
                }
                None => {
                    // Unsortable states are closed under steps.
                    assert!(neighbor_times.iter().all(Option::is_none), "{spec}: {p}");
                }
            }
        }
        // The histogram counts exactly the reachable states.
        let reachable: u64 = table.distance_histogram().iter().sum();
        assert_eq!(reachable, table.generated_order());
    }
}

/// The counting floor never exceeds the exact worst case on sortable
/// classes (randomized spot check on the named ones).
#[test]
fn counting_floor_spot_check() {
    let opts = BfsOptions::default();
    for spec in ["Bub", "Ins", "F", "Pan", "L", "PBT"] {
        let class = ClassHandle::parse(spec).unwrap();
        for n in 3..=6 {
            let w = engine::wst(&class, n, &opts).unwrap().unwrap();
            let floor = engine::counting_lower_bound(n, class.level_size(n)).unwrap();
            assert!(w as u64 >= floor, "{spec} n={n}");
        }
    }
}
