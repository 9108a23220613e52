use assistrl::envs::FourTankEnv;
use assistrl::ppo::{ppo_train, PpoConfig};
use assistrl::schedule::BetaSchedule;
use std::time::Instant;

fn main() {
    let env = FourTankEnv::new().unwrap();
    let config = PpoConfig {
        hidden_sizes: vec![64, 64],
        rollout_min_steps: 512,
        ..PpoConfig::default()
    };
    let ta = BetaSchedule::linear(0.5, 3000).unwrap();
    let base = BetaSchedule::constant_zero();
    let t0 = Instant::now();
    for (label, sched) in [("TA", &ta), ("base", &base)] {
        let r = ppo_train(&env, sched, &config, 20_000, 0, 0).unwrap();
        let first_full = r.records.iter().position(|x| x.steps == 100);
        let full_count = r.records.iter().filter(|x| x.steps == 100).count();
        println!("{label}: first_full={first_full:?} total_full={full_count}");
        for chunk in r.records.chunks(2500) {
            let s: f64 = chunk.iter().map(|x| x.steps as f64).sum::<f64>() / chunk.len() as f64;
            print!(" [{:>5}] {:>5.1}", chunk[0].episode, s);
        }
        println!();
    }
    println!("elapsed {:.1}s", t0.elapsed().as_secs_f64());
}
