//! Replays the explicit index-lowering chains across the recursive family:
//! every member at index i >= 2 descends by recorded Cremona moves to the
//! member at i - 2, and independently passes the reduction certifier.

use staircap::cohomology::{CohomClass, QuasiPerfect};
use staircap::cremona::is_exceptional;
use staircap::exact::rat_int;
use staircap::families::{a_vector, index_lowering_trace};

fn family_class(i: i64, n: u32) -> CohomClass {
    let v = a_vector(i, n).unwrap();
    QuasiPerfect::new(
        v.a.to_biguint().unwrap(),
        v.b.to_biguint().unwrap(),
        v.c.to_biguint().unwrap(),
        v.d.to_biguint().unwrap(),
    )
    .unwrap()
    .class()
}

#[test]
fn lowering_chains_replay_across_the_family_grid() {
    for n in 1..=5u32 {
        for i in 2..=6u32 {
            let trace = index_lowering_trace(i, n).unwrap();
            assert!(trace.start.same_element(&family_class(i64::from(i), n).to_cp2()));
            assert!(trace.end.same_element(&family_class(i64::from(i) - 2, n)));
            let replayed = trace
                .replay()
                .unwrap_or_else(|e| panic!("lowering (i={i}, n={n}) does not replay: {e}"));
            assert!(replayed.same_element(&trace.end));
            assert_eq!(replayed.chern_number(), rat_int(1));
            assert_eq!(replayed.self_intersection(), rat_int(-1));
        }
    }
}

#[test]
fn repeated_lowering_reaches_the_base_members() {
    // Descending from i = 6 lands on (1,0;1) after three steps; from i = 5
    // on (n,1;W(2n+1,1)) after two.
    for n in 1..=5u32 {
        for (top, base) in [(6u32, 0i64), (5, 1)] {
            let mut i = top;
            while i >= 2 {
                assert!(index_lowering_trace(i, n).unwrap().replay().is_ok());
                i -= 2;
            }
            assert_eq!(i64::from(i), base);
        }
        assert!(family_class(0, n).same_element(&QuasiPerfect::new(1u32, 0u32, 1u32, 1u32)
            .unwrap()
            .class()));
    }
}

#[test]
fn lowered_endpoints_pass_the_reduction_certifier() {
    for n in 1..=5u32 {
        for i in 2..=6u32 {
            let class = family_class(i64::from(i), n);
            let cert = is_exceptional(&class)
                .unwrap_or_else(|e| panic!("A(i={i}, n={n}) rejected: {e:?}"));
            assert!(cert.replay().is_ok());
        }
    }
}

#[test]
fn lowering_requires_a_reducible_index() {
    assert!(index_lowering_trace(0, 3).is_err());
    assert!(index_lowering_trace(1, 3).is_err());
    assert!(index_lowering_trace(2, 0).is_err());
}
