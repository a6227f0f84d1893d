mod common;

use common::laws::{run_law, LAWS};

macro_rules! law_tests {
    ($($name:ident => $idx:expr),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                let law = &LAWS[$idx];
                if let Err(e) = run_law(law, 1000) {
                    panic!("{}: {e}", law.0);
                }
            }
        )*
    };
}

law_tests! {
    join_commutative => 0,
    join_associative => 1,
    join_idempotent => 2,
    leq_reflexive => 3,
    leq_antisymmetric => 4,
    leq_transitive => 5,
    join_is_upper_bound => 6,
    meet_is_lower_bound => 7,
    leq_agrees_with_join => 8,
    widen_over_approximates => 9,
    widening_chains_stabilize => 10,
}
