use diamond_core::info::{binary_entropy, DiscreteJointDist};
use diamond_core::typicality::{PackingExperiment, TypicalityConfig};
use std::time::Instant;

fn bsc(q: f64) -> DiscreteJointDist {
    DiscreteJointDist::new(
        vec!["U".into(), "Y".into()],
        vec![2, 2],
        vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0],
    )
    .unwrap()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let q: f64 = args[1].parse().unwrap();
    let n: usize = args[2].parse().unwrap();
    let eps: f64 = args[3].parse().unwrap();
    let trials: u32 = args[4].parse().unwrap();
    let seed: u64 = args[5].parse().unwrap();
    let i = 1.0 - binary_entropy(q);
    let mk = |rate: f64| PackingExperiment {
        joint: bsc(q),
        codeword_vars: vec!["U".into()],
        rates: vec![rate],
        config: TypicalityConfig { epsilon: eps, n },
        trials,
        seed,
    };
    let t0 = Instant::now();
    let below = mk(0.9 * i).run().unwrap();
    let t1 = t0.elapsed().as_secs_f64();
    let above = mk(1.1 * i).run().unwrap();
    let t2 = t0.elapsed().as_secs_f64() - t1;
    println!(
        "q={q} n={n} eps={eps} trials={trials} seed={seed}: below={:.3} ({t1:.1}s) above={:.3} ({t2:.1}s) {}",
        below.mean,
        above.mean,
        if below.mean <= 0.15 && above.mean >= 0.85 { "PASS" } else { "fail" }
    );
}
