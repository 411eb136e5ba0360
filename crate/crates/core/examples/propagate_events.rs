//! Flows the door-key robot under constant controls and reports the guard
//! that stops each motion.

use sabpi::propagate::propagate;
use sabpi::scenarios;

fn main() -> anyhow::Result<()> {
    let s = scenarios::bundled("door_key")?;
    let moves: [([f64; 2], f64); 4] = [([1.0, 0.0], 1.0), ([1.0, 0.0], 5.0), ([0.0, 1.0], 8.0), ([-0.3, 1.0], 8.0)];
    for (u, t) in moves {
        let r = propagate(&s, &s.x0, s.m0, &u, t);
        println!(
            "u = {u:?} for {t} s: {:?} after {:.6} s at ({:.4}, {:.4})",
            r.outcome, r.t_actual, r.x_end[0], r.x_end[1]
        );
    }
    Ok(())
}
