/// Adam with bias correction and an exponentially decaying step size
/// `lr(epoch) = lr0 * decay^epoch`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub lr0: f64,
    pub decay: f64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        Self {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            lr0: 1e-3,
            decay: 0.99,
        }
    }

    pub fn with_schedule(mut self, lr0: f64, decay: f64) -> Self {
        self.lr0 = lr0;
        self.decay = decay;
        self
    }

    pub fn learning_rate(&self, epoch: usize) -> f64 {
        self.lr0 * self.decay.powi(epoch as i32)
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], epoch: usize) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.t += 1;
        let lr = self.learning_rate(epoch);
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_signed_learning_rate() {
        let mut adam = AdamState::new(3);
        let mut p = vec![1.0, 1.0, 1.0];
        adam.step(&mut p, &[0.5, -2.0, 1e3], 0);
        for (pi, s) in p.iter().zip([-1.0, 1.0, -1.0]) {
            assert!((pi - (1.0 + s * 1e-3)).abs() < 1e-10);
        }
        assert_eq!(adam.t, 1);
    }

    #[test]
    fn zero_gradient_is_noop() {
        let mut adam = AdamState::new(2);
        let mut p = vec![0.25, -3.0];
        adam.step(&mut p, &[0.0, 0.0], 0);
        assert_eq!(p, vec![0.25, -3.0]);
    }

    #[test]
    fn second_identical_step_not_larger() {
        let mut adam = AdamState::new(4);
        let g = [0.3, -1e-4, 7.0, 1e-9];
        let mut p = vec![0.0; 4];
        adam.step(&mut p, &g, 0);
        let first = p.clone();
        adam.step(&mut p, &g, 0);
        for i in 0..4 {
            let d2 = (p[i] - first[i]).abs();
            assert!(d2 <= first[i].abs() * (1.0 + 1e-12), "{i}: {d2} vs {}", first[i]);
        }
    }

    #[test]
    fn decay_schedule() {
        let adam = AdamState::new(1);
        assert_eq!(adam.learning_rate(0), 1e-3);
        assert!((adam.learning_rate(2) - 1e-3 * 0.9801).abs() < 1e-18);
    }
}
