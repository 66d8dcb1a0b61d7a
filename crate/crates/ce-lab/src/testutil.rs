//! Shared fixtures for unit and integration tests.

use crate::games::GameInstance;
use crate::rational::rat_int;

pub use crate::labeling::random_sign_labeling;

/// u_1 = 1 iff v_1 = v_2, u_2 = 1 - u_1.
pub fn matching_pennies() -> GameInstance {
    let mut u1 = Vec::new();
    let mut u2 = Vec::new();
    for bits in 0u32..4 {
        let agree = (bits & 1) == (bits >> 1 & 1);
        u1.push(if agree { rat_int(1) } else { rat_int(0) });
        u2.push(if agree { rat_int(0) } else { rat_int(1) });
    }
    GameInstance::from_table(2, vec![u1, u2]).unwrap()
}

/// u_1 = u_2 = 1 iff v_1 = v_2.
pub fn coordination_game() -> GameInstance {
    let row: Vec<_> = (0u32..4)
        .map(|bits| {
            if (bits & 1) == (bits >> 1 & 1) {
                rat_int(1)
            } else {
                rat_int(0)
            }
        })
        .collect();
    GameInstance::from_table(2, vec![row.clone(), row]).unwrap()
}
