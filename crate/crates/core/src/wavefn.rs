use std::fmt;
use std::sync::Arc;

/// Real position-space wavefunction together with an interval outside of
/// which its probability mass is negligible.
#[derive(Clone)]
pub struct Wavefunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
}

impl Wavefunction {
    pub fn new<F>(f: F, support: (f64, f64)) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Wavefunction {
            f: Arc::new(f),
            support,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Same function multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = Arc::clone(&self.f);
        Wavefunction {
            f: Arc::new(move |x| factor * f(x)),
            support: self.support,
        }
    }
}

impl fmt::Debug for Wavefunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Wavefunction")
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}
