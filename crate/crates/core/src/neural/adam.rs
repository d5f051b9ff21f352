//! Adam optimizer with bias-corrected moments, applied element-wise
//! over the parameter tensors.

use crate::neural::params::LstmStackParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First/second moment estimates plus the step counter.
pub struct AdamState {
    config: AdamConfig,
    m: LstmStackParams,
    v: LstmStackParams,
    step_count: u64,
}

impl AdamState {
    pub fn new(template: &LstmStackParams) -> Self {
        Self::with_config(template, AdamConfig::default())
    }

    pub fn with_config(template: &LstmStackParams, config: AdamConfig) -> Self {
        Self {
            config,
            m: template.zeros_like(),
            v: template.zeros_like(),
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One standard Adam update.
    pub fn step(&mut self, params: &mut LstmStackParams, grads: &LstmStackParams) {
        self.step_count += 1;
        let t = self.step_count as i32;
        let c = &self.config;
        let bc1 = 1.0 - c.beta1.powi(t);
        let bc2 = 1.0 - c.beta2.powi(t);

        let mut p_tensors = params.tensors_mut();
        let g_tensors = grads.tensors();
        let mut m_tensors = self.m.tensors_mut();
        let mut v_tensors = self.v.tensors_mut();
        for idx in 0..g_tensors.len() {
            let p = &mut p_tensors[idx];
            let g = g_tensors[idx];
            let m = &mut m_tensors[idx];
            let v = &mut v_tensors[idx];
            for k in 0..g.len() {
                m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
                v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                p[k] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::params::HeadKind;
    use approx::assert_relative_eq;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut p = LstmStackParams::zeros(1, &[2], 1, HeadKind::Linear);
        p.head.b[0] = 0.5;
        let before = p.clone();
        let grads = p.zeros_like();
        let mut adam = AdamState::new(&p);
        adam.step(&mut p, &grads);
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_magnitude_is_about_learning_rate() {
        // at t = 1 the bias corrections cancel and the update is
        // -lr * g / (|g| + eps'), i.e. a signed step of about lr
        let mut p = LstmStackParams::zeros(1, &[1], 1, HeadKind::Linear);
        let mut grads = p.zeros_like();
        grads.head.b[0] = 3.7;
        let mut adam = AdamState::new(&p);
        adam.step(&mut p, &grads);
        assert_relative_eq!(p.head.b[0], -0.001, epsilon = 1e-6);
    }

    #[test]
    fn three_steps_match_hand_recurrence_on_quadratic() {
        // independently hand-rolled Adam recurrence on f(w) = w^2
        let cfg = AdamConfig::default();
        let (mut w, mut m, mut v) = (1.0f64, 0.0f64, 0.0f64);
        let mut expected = Vec::new();
        for t in 1..=3 {
            let g = 2.0 * w;
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            let mh = m / (1.0 - cfg.beta1.powi(t));
            let vh = v / (1.0 - cfg.beta2.powi(t));
            w -= cfg.learning_rate * mh / (vh.sqrt() + cfg.epsilon);
            expected.push(w);
        }
        assert_relative_eq!(expected[2], 0.997000096065, epsilon = 1e-9);

        let mut p = LstmStackParams::zeros(1, &[1], 1, HeadKind::Linear);
        p.head.b[0] = 1.0;
        let mut adam = AdamState::new(&p);
        for t in 0..3 {
            let mut grads = p.zeros_like();
            grads.head.b[0] = 2.0 * p.head.b[0];
            adam.step(&mut p, &grads);
            assert_relative_eq!(p.head.b[0], expected[t], epsilon = 1e-12);
        }
    }
}
