//! Integrands over the unit cube with known integrals and integrability class.

use std::fmt;
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type NormFn = Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>;

/// An evaluation rule on [0,1]^d together with its exact integral and the
/// largest p for which it belongs to L^p (`f64::INFINITY` when all p work;
/// for the singular entries membership holds strictly below `p_star`).
#[derive(Clone)]
pub struct Integrand {
    name: String,
    dimension: usize,
    eval: EvalFn,
    exact_integral: f64,
    p_star: f64,
    lp_norm: NormFn,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("exact_integral", &self.exact_integral)
            .field("p_star", &self.p_star)
            .finish()
    }
}

impl Integrand {
    pub fn new(
        name: &str,
        dimension: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        exact_integral: f64,
        p_star: f64,
        lp_norm: impl Fn(f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        Integrand {
            name: name.to_string(),
            dimension,
            eval: Arc::new(eval),
            exact_integral,
            p_star,
            lp_norm: Arc::new(lp_norm),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn exact_integral(&self) -> f64 {
        self.exact_integral
    }

    /// Largest p such that the integrand is in L^p (sup; may be infinite).
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// ||f||_p when a closed form (or registered oracle value) exists.
    pub fn lp_norm(&self, p: f64) -> Option<f64> {
        (self.lp_norm)(p)
    }

    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        (self.eval)(x)
    }

    /// alpha*f + beta*g with the exact integral combined linearly.
    pub fn linear_combination(alpha: f64, f: &Integrand, beta: f64, g: &Integrand) -> Integrand {
        assert_eq!(f.dimension, g.dimension, "dimension mismatch");
        let fe = f.eval.clone();
        let ge = g.eval.clone();
        Integrand {
            name: format!("{}*{} + {}*{}", alpha, f.name, beta, g.name),
            dimension: f.dimension,
            eval: Arc::new(move |x| alpha * fe(x) + beta * ge(x)),
            exact_integral: alpha * f.exact_integral + beta * g.exact_integral,
            p_star: f.p_star.min(g.p_star),
            lp_norm: Arc::new(|_| None),
        }
    }

    /// |f|. The exact integral is ||f||_1 when registered, NaN otherwise.
    pub fn abs(f: &Integrand) -> Integrand {
        let fe = f.eval.clone();
        let l1 = f.lp_norm(1.0).unwrap_or(f64::NAN);
        Integrand {
            name: format!("|{}|", f.name),
            dimension: f.dimension,
            eval: Arc::new(move |x| fe(x).abs()),
            exact_integral: l1,
            p_star: f.p_star,
            lp_norm: Arc::new(|_| None),
        }
    }
}
