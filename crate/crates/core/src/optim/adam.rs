/// Adaptive-moment gradient descent over a flat parameter vector.
#[derive(Debug, Clone)]
pub(crate) struct Adam {
    step_size: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    beta1_t: f64,
    beta2_t: f64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub(crate) fn new(n_params: usize, step_size: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            step_size,
            beta1,
            beta2,
            eps: 1e-8,
            beta1_t: 1.0,
            beta2_t: 1.0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    /// One bias-corrected update. `params` and `grads` must be in the same order
    /// on every call.
    pub(crate) fn step<'a, P, G>(&mut self, params: P, grads: G)
    where
        P: IntoIterator<Item = &'a mut f64>,
        G: IntoIterator<Item = f64>,
    {
        self.beta1_t *= self.beta1;
        self.beta2_t *= self.beta2;
        let c1 = 1.0 - self.beta1_t;
        let c2 = 1.0 - self.beta2_t;
        for (((x, g), m), v) in params
            .into_iter()
            .zip(grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *x -= self.step_size * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
