use crate::scalar::Real;

/// One environment's time-ordered slice of a rollout.
#[derive(Clone, Copy, Debug)]
pub struct GaeStream<'a, T> {
    pub rewards: &'a [T],
    /// `V(x_t)` at every step.
    pub values: &'a [T],
    pub dones: &'a [bool],
    pub truncated: &'a [bool],
    /// `V` of the final observation of a time-limited episode; read only
    /// where `truncated` is set.
    pub truncation_values: &'a [T],
    /// `V(x_{T+1})` after the last step.
    pub bootstrap: T,
}

/// Backward recursion `A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}`
/// with `delta_t = r_t + gamma V_next (1 - terminal_t) - V(x_t)`.
///
/// A truncated step bootstraps from its own final-state value instead of
/// zero; the recursion still stops at every episode boundary.
pub fn gae_stream<T: Real>(s: GaeStream<T>, gamma: T, lambda: T) -> Vec<T> {
    let n = s.rewards.len();
    let mut adv = vec![T::zero(); n];
    let mut next_adv = T::zero();
    for t in (0..n).rev() {
        let next_value = if s.truncated[t] {
            s.truncation_values[t]
        } else if t + 1 < n {
            s.values[t + 1]
        } else {
            s.bootstrap
        };
        let terminal = s.dones[t] && !s.truncated[t];
        let continues = if terminal { T::zero() } else { T::one() };
        let delta = s.rewards[t] + gamma * next_value * continues - s.values[t];
        let carry = if s.dones[t] { T::zero() } else { gamma * lambda * next_adv };
        adv[t] = delta + carry;
        next_adv = adv[t];
    }
    adv
}

/// Standardizes to zero mean and unit (population) standard deviation.
/// A standard deviation below `1e-8` is replaced by `1e-8`.
pub fn normalize_in_place<T: Real>(values: &mut [T]) {
    if values.is_empty() {
        return;
    }
    let n = T::from_usize(values.len()).unwrap();
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    let std = var.sqrt().max(T::lit(1e-8));
    for v in values.iter_mut() {
        *v = (*v - mean) / std;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit double sum: A_t = sum_l (gamma lambda)^l delta_{t+l}, truncated at
    /// the first episode boundary.
    fn explicit(s: &GaeStream<f64>, gamma: f64, lambda: f64) -> Vec<f64> {
        let n = s.rewards.len();
        let delta: Vec<f64> = (0..n)
            .map(|t| {
                let next = if s.truncated[t] {
                    s.truncation_values[t]
                } else if t + 1 < n {
                    s.values[t + 1]
                } else {
                    s.bootstrap
                };
                let cont = if s.dones[t] && !s.truncated[t] { 0.0 } else { 1.0 };
                s.rewards[t] + gamma * next * cont - s.values[t]
            })
            .collect();
        (0..n)
            .map(|t| {
                let mut acc = 0.0;
                for l in 0..(n - t) {
                    acc += (gamma * lambda).powi(l as i32) * delta[t + l];
                    if s.dones[t + l] {
                        break;
                    }
                }
                acc
            })
            .collect()
    }

    #[test]
    fn handcrafted_three_steps() {
        let r = [1.0, 1.0, 1.0];
        let v = [0.5, 0.5, 0.5];
        let f = [false; 3];
        let s = GaeStream {
            rewards: &r,
            values: &v,
            dones: &f,
            truncated: &f,
            truncation_values: &[0.0; 3],
            bootstrap: 0.5,
        };
        let got = gae_stream(s, 0.9, 0.8);
        let want = explicit(&s, 0.9, 0.8);
        // delta = 1 + 0.45 - 0.5 = 0.95 every step.
        let d: f64 = 0.95;
        let x: f64 = 0.72;
        let hand = [d * (1.0 + x + x * x), d * (1.0 + x), d];
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-15);
            assert!((got[i] - hand[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn lambda_zero_is_td_residual() {
        let r = [0.3, -1.0, 2.0, 0.1];
        let v = [0.2, 0.4, -0.1, 0.7];
        let dones = [false, true, false, false];
        let tr = [false; 4];
        let s = GaeStream {
            rewards: &r,
            values: &v,
            dones: &dones,
            truncated: &tr,
            truncation_values: &[0.0; 4],
            bootstrap: 1.5,
        };
        let a = gae_stream(s, 0.99, 0.0);
        assert_eq!(a[0], 0.3 + 0.99 * 0.4 - 0.2);
        assert_eq!(a[1], -1.0 - 0.4);
        assert_eq!(a[3], 0.1 + 0.99 * 1.5 - 0.7);
    }

    #[test]
    fn normalize_three_points() {
        let mut a = [1.0f64, 2.0, 3.0];
        normalize_in_place(&mut a);
        assert!((a[0] + 1.224744871391589).abs() < 1e-12);
        assert!(a[1].abs() < 1e-15);
        assert!((a[2] - 1.224744871391589).abs() < 1e-12);
    }

    #[test]
    fn normalize_constant_goes_to_zero() {
        let mut a = [0.7f64; 16];
        normalize_in_place(&mut a);
        assert!(a.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn spliced_episodes_do_not_leak() {
        // Two independent terminal episodes, spliced, give the same advantages
        // as each computed alone.
        let (r1, v1) = ([1.0, 0.5, -0.2], [0.1, 0.3, 0.2]);
        let (r2, v2) = ([0.4, 0.9], [-0.5, 0.6]);
        let d1 = [false, false, true];
        let d2 = [false, false];
        let alone1 = gae_stream(
            GaeStream {
                rewards: &r1,
                values: &v1,
                dones: &d1,
                truncated: &[false; 3],
                truncation_values: &[0.0; 3],
                bootstrap: 123.0,
            },
            0.97,
            0.9,
        );
        let alone2 = gae_stream(
            GaeStream {
                rewards: &r2,
                values: &v2,
                dones: &d2,
                truncated: &[false; 2],
                truncation_values: &[0.0; 2],
                bootstrap: 0.25,
            },
            0.97,
            0.9,
        );
        let r: Vec<f64> = r1.iter().chain(&r2).copied().collect();
        let v: Vec<f64> = v1.iter().chain(&v2).copied().collect();
        let d: Vec<bool> = d1.iter().chain(&d2).copied().collect();
        let spliced = gae_stream(
            GaeStream {
                rewards: &r,
                values: &v,
                dones: &d,
                truncated: &[false; 5],
                truncation_values: &[0.0; 5],
                bootstrap: 0.25,
            },
            0.97,
            0.9,
        );
        assert_eq!(&spliced[..3], &alone1[..]);
        assert_eq!(&spliced[3..], &alone2[..]);
        // Terminal step: delta = r - V.
        assert_eq!(alone1[2], -0.2 - 0.2);
    }

    #[test]
    fn truncation_bootstraps_from_final_state() {
        let r = [1.0, 2.0];
        let v = [0.0, 0.0];
        let dones = [true, false];
        let trunc = [true, false];
        let a = gae_stream(
            GaeStream {
                rewards: &r,
                values: &v,
                dones: &dones,
                truncated: &trunc,
                truncation_values: &[10.0, 0.0],
                bootstrap: 0.0,
            },
            0.5,
            1.0,
        );
        assert_eq!(a[0], 1.0 + 0.5 * 10.0);
        assert_eq!(a[1], 2.0);
    }
}
