use crate::float::Float;

/// A point in phase space with `D` configuration dimensions.
///
/// Plain data; the owning system decides whether `q` is inside its domain.
/// Constructors reject non-finite components, which keeps NaN out of every
/// downstream reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint<F, const D: usize> {
    pub q: [F; D],
    pub p: [F; D],
}

pub type PhasePoint1<F> = PhasePoint<F, 1>;
pub type PhasePoint2<F> = PhasePoint<F, 2>;

impl<F: Float, const D: usize> PhasePoint<F, D> {
    pub fn new(q: [F; D], p: [F; D]) -> Self {
        let z = Self { q, p };
        debug_assert!(z.is_finite(), "phase point must be finite: {z:?}");
        z
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.p.iter()).all(|c| c.is_finite())
    }

    /// |p|^2 / (2m)
    #[inline]
    pub fn kinetic_energy(&self, mass: F) -> F {
        let p2: F = self.p.iter().map(|&pi| pi * pi).sum();
        p2 / (F::lit(2.0) * mass)
    }

    #[inline]
    pub fn speed(&self, mass: F) -> F {
        let p2: F = self.p.iter().map(|&pi| pi * pi).sum();
        p2.sqrt() / mass
    }

    /// Momentum-reversed copy (used for backward flights).
    #[inline]
    pub fn reversed(&self) -> Self {
        let mut p = self.p;
        for pi in &mut p {
            *pi = -*pi;
        }
        Self { q: self.q, p }
    }

    pub fn q_f64(&self) -> Vec<f64> {
        self.q.iter().map(|&c| c.as_f64()).collect()
    }

    pub fn p_f64(&self) -> Vec<f64> {
        self.p.iter().map(|&c| c.as_f64()).collect()
    }
}
