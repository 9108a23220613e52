//! On-policy rollout storage and generalized advantage estimation.

/// One collected transition. The reward is already blended with the beta of
/// the episode that produced it; `done` marks the episode boundary (terminal
/// or horizon), which GAE treats as absorbing.
#[derive(Debug, Clone)]
pub struct RolloutRecord {
    pub state: Vec<f64>,
    pub raw_action: Vec<f64>,
    pub log_prob: f64,
    pub reward: f64,
    pub value: f64,
    pub done: bool,
    pub beta: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RolloutBuffer {
    records: Vec<RolloutRecord>,
}

impl RolloutBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: RolloutRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }

    pub fn records(&self) -> &[RolloutRecord] {
        &self.records
    }
}

/// Backward GAE recursion per episode segment:
/// `delta_t = r_t + gamma * v(s_{t+1}) * (1 - done) - v(s_t)` and
/// `adv_t = delta_t + gamma * lambda * (1 - done) * adv_{t+1}`.
/// Returns `(advantages, value_targets)` with `target = adv + v(s)`.
pub fn gae_compute(buffer: &RolloutBuffer, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let records = buffer.records();
    let n = records.len();
    let mut advantages = vec![0.0; n];
    let mut carry = 0.0;
    for t in (0..n).rev() {
        let rec = &records[t];
        let not_done = if rec.done { 0.0 } else { 1.0 };
        let next_value = if rec.done || t + 1 == n {
            0.0
        } else {
            records[t + 1].value
        };
        let delta = rec.reward + gamma * next_value * not_done - rec.value;
        carry = delta + gamma * lambda * not_done * carry;
        advantages[t] = carry;
    }
    let targets = advantages
        .iter()
        .zip(records)
        .map(|(a, r)| a + r.value)
        .collect();
    (advantages, targets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(reward: f64, value: f64, done: bool) -> RolloutRecord {
        RolloutRecord {
            state: vec![0.0],
            raw_action: vec![0.0],
            log_prob: 0.0,
            reward,
            value,
            done,
            beta: 0.0,
        }
    }

    #[test]
    fn lambda_zero_reduces_to_one_step_deltas() {
        let mut buf = RolloutBuffer::new();
        buf.push(record(1.0, 0.3, false));
        buf.push(record(-0.5, 0.7, false));
        buf.push(record(2.0, -0.1, true));
        let gamma = 0.9;
        let (adv, _) = gae_compute(&buf, gamma, 0.0);
        let r = buf.records();
        assert!((adv[0] - (1.0 + gamma * 0.7 - 0.3)).abs() < 1e-14);
        assert!((adv[1] - (-0.5 + gamma * -0.1 - 0.7)).abs() < 1e-14);
        assert!((adv[2] - (2.0 - -0.1)).abs() < 1e-14);
        let _ = r;
    }

    #[test]
    fn monte_carlo_limit_gives_suffix_sums() {
        // gamma = lambda = 1 and zero values: the advantage is the sum of the
        // remaining episode rewards.
        let mut buf = RolloutBuffer::new();
        for (r, done) in [(1.0, false), (2.0, false), (4.0, true), (8.0, false), (16.0, true)] {
            buf.push(record(r, 0.0, done));
        }
        let (adv, targets) = gae_compute(&buf, 1.0, 1.0);
        assert_eq!(adv, vec![7.0, 6.0, 4.0, 24.0, 16.0]);
        assert_eq!(adv, targets);
    }

    #[test]
    fn three_step_hand_recursion() {
        // gamma = lambda = 0.5, values (0.2, 0.4, 0.6), rewards (1, 2, 3),
        // single episode ending at t = 2.
        let mut buf = RolloutBuffer::new();
        buf.push(record(1.0, 0.2, false));
        buf.push(record(2.0, 0.4, false));
        buf.push(record(3.0, 0.6, true));
        let (adv, targets) = gae_compute(&buf, 0.5, 0.5);
        let d2 = 3.0 - 0.6;
        let d1 = 2.0 + 0.5 * 0.6 - 0.4;
        let d0 = 1.0 + 0.5 * 0.4 - 0.2;
        let a2 = d2;
        let a1 = d1 + 0.25 * a2;
        let a0 = d0 + 0.25 * a1;
        assert!((adv[2] - a2).abs() < 1e-14);
        assert!((adv[1] - a1).abs() < 1e-14);
        assert!((adv[0] - a0).abs() < 1e-14);
        assert!((targets[0] - (a0 + 0.2)).abs() < 1e-14);
    }

    #[test]
    fn episode_boundary_stops_credit_flow() {
        let mut buf = RolloutBuffer::new();
        buf.push(record(0.0, 0.0, true));
        buf.push(record(100.0, 0.0, true));
        let (adv, _) = gae_compute(&buf, 1.0, 1.0);
        // The second episode's reward must not leak into the first.
        assert_eq!(adv[0], 0.0);
        assert_eq!(adv[1], 100.0);
    }
}
