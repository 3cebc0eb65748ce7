//! Desymmetrized (quarter) stadium billiard with a sum-of-Gaussians driving
//! potential.
//!
//! Domain: x >= 0, y >= 0, y <= r for x <= l, and (x-l)^2 + y^2 <= r^2 for
//! x > l. The four boundary faces are the two symmetry walls (x = 0, y = 0),
//! the straight top wall (y = r, x <= l), and the quarter arc of radius r
//! centered at (l, 0). The top wall joins the arc tangentially at (l, r), so
//! only the three right-angle corners need the two-face corner rule.

use super::{System, CORNER_TOL};
use crate::error::{Error, Result};
use crate::float::Float;
use crate::phase::{PhasePoint, PhasePoint2};

/// Free flight gives up after this many reflections in a single call; only
/// near-tangent arc chatter can get close, and such trajectories are counted
/// against the failure budget instead of looping forever.
const FLIGHT_REFLECTIONS_MAX: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StadiumGeometry<F> {
    radius: F,
    length: F,
    /// Absolute slack admitting boundary points into the closed domain.
    eps: F,
}

impl<F: Float> StadiumGeometry<F> {
    pub fn new(radius: F, length: F) -> Result<Self> {
        for (name, v) in [("radius", radius), ("length", length)] {
            if !(v.is_finite() && v > F::zero()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        let eps = F::lit(1e-12) * radius.max(length).max(F::one());
        Ok(Self {
            radius,
            length,
            eps,
        })
    }

    #[inline]
    pub fn radius(&self) -> F {
        self.radius
    }

    #[inline]
    pub fn length(&self) -> F {
        self.length
    }

    /// l*r + pi r^2 / 4
    pub fn area(&self) -> F {
        self.length * self.radius
            + F::PI() * self.radius * self.radius / F::lit(4.0)
    }

    /// Closed domain (boundary points included, up to an absolute slack that
    /// absorbs roundoff in intersection arithmetic).
    #[inline]
    pub fn contains(&self, q: &[F; 2]) -> bool {
        let (x, y) = (q[0], q[1]);
        if !(x >= -self.eps && y >= -self.eps) {
            return false;
        }
        if x <= self.length {
            y <= self.radius + self.eps
        } else {
            let dx = x - self.length;
            // (r + eps)^2 to first order
            dx * dx + y * y
                <= self.radius * self.radius + F::lit(2.0) * self.radius * self.eps
        }
    }

    /// Time to the first boundary hit along the straight ray q + v t, if the
    /// ray meets a face it is approaching. Faces the ray recedes from are not
    /// candidates, so the face just reflected off is never re-hit at t = 0.
    fn next_wall(&self, q: &[F; 2], v: &[F; 2]) -> Option<F> {
        let (x, y) = (q[0], q[1]);
        let (vx, vy) = (v[0], v[1]);
        let r = self.radius;
        let l = self.length;
        let mut best: Option<F> = None;
        let mut consider = |t: F| {
            if best.map_or(true, |b| t < b) {
                best = Some(t);
            }
        };

        if vx < F::zero() {
            consider((-x / vx).max(F::zero()));
        }
        if vy < F::zero() {
            consider((-y / vy).max(F::zero()));
        }
        if vy > F::zero() {
            let t = ((r - y) / vy).max(F::zero());
            if x + vx * t <= l {
                consider(t);
            }
        }
        // Quarter arc: outgoing root of |q + v t - (l, 0)| = r.
        let cx = x - l;
        let a = vx * vx + vy * vy;
        if a > F::zero() {
            let b = F::lit(2.0) * (cx * vx + y * vy);
            let c = cx * cx + y * y - r * r;
            let disc = b * b - F::lit(4.0) * a * c;
            if disc > F::zero() {
                let t = ((-b + disc.sqrt()) / (F::lit(2.0) * a)).max(F::zero());
                let hx = x + vx * t;
                let hy = y + vy * t;
                if hx >= l - self.eps && hy >= -self.eps {
                    consider(t);
                }
            }
        }
        best
    }

    /// Specular reflection at the face(s) nearest to z.q. All faces within
    /// `CORNER_TOL` of the nearest one are applied, which reflects both
    /// momentum components at the three right-angle corners.
    pub fn reflect_at(&self, z: &mut PhasePoint2<F>) {
        let (x, y) = (z.q[0], z.q[1]);
        let r = self.radius;
        let l = self.length;
        let ct = F::lit(CORNER_TOL) * r.max(l).max(F::one());
        let inf = F::infinity();

        let d_left = x.abs();
        let d_bottom = y.abs();
        let (d_top, d_arc, nx, ny) = if x <= l {
            ((r - y).abs(), inf, F::zero(), F::zero())
        } else {
            let dx = x - l;
            let rho = (dx * dx + y * y).sqrt();
            (inf, (r - rho).abs(), dx / rho, y / rho)
        };
        let dmin = d_left.min(d_bottom).min(d_top).min(d_arc);
        let cut = dmin + ct;

        if d_left <= cut {
            z.p[0] = -z.p[0];
        }
        if d_bottom <= cut {
            z.p[1] = -z.p[1];
        }
        if d_top <= cut {
            z.p[1] = -z.p[1];
        }
        if d_arc <= cut {
            let pn = z.p[0] * nx + z.p[1] * ny;
            let two = F::lit(2.0);
            z.p[0] -= two * pn * nx;
            z.p[1] -= two * pn * ny;
        }
    }

    /// Exact segment-by-segment free flight for duration s >= 0 at speed
    /// |p|/m. A flight ending exactly on a wall returns the reflected state.
    fn flight(&self, z: &PhasePoint2<F>, s: F, mass: F) -> Result<PhasePoint2<F>> {
        let mut z = *z;
        let mut rem = s;
        let mut bounces = 0usize;
        loop {
            let v = [z.p[0] / mass, z.p[1] / mass];
            match self.next_wall(&z.q, &v) {
                None => {
                    z.q[0] += v[0] * rem;
                    z.q[1] += v[1] * rem;
                    return Ok(z);
                }
                Some(t_hit) => {
                    if t_hit > rem {
                        z.q[0] += v[0] * rem;
                        z.q[1] += v[1] * rem;
                        return Ok(z);
                    }
                    z.q[0] += v[0] * t_hit;
                    z.q[1] += v[1] * t_hit;
                    self.reflect_at(&mut z);
                    rem -= t_hit;
                    bounces += 1;
                    if bounces > FLIGHT_REFLECTIONS_MAX {
                        return Err(Error::NumericalFailure {
                            context: "free-flight reflection limit",
                            t: (s - rem).as_f64(),
                            q: z.q_f64(),
                            p: z.p_f64(),
                        });
                    }
                }
            }
        }
    }
}

/// Sum of identical isotropic Gaussians in 2D:
/// V(q) = strength/(2 pi width^2) * sum_i exp(-|q - c_i|^2 / (2 width^2)).
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPotential<F> {
    strength: F,
    width: F,
    centers: Vec<[F; 2]>,
    norm: F,
    inv_w2: F,
}

impl<F: Float> GaussianPotential<F> {
    pub fn new(strength: F, width: F, centers: Vec<[F; 2]>) -> Result<Self> {
        if !(strength.is_finite() && strength >= F::zero()) {
            return Err(Error::InvalidParameter {
                name: "strength",
                reason: format!("must be finite and non-negative, got {strength}"),
            });
        }
        if !(width.is_finite() && width > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "width",
                reason: format!("must be finite and positive, got {width}"),
            });
        }
        if centers.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "centers",
                reason: "must be finite".into(),
            });
        }
        let norm = strength / (F::lit(2.0) * F::PI() * width * width);
        let inv_w2 = F::one() / (width * width);
        Ok(Self {
            strength,
            width,
            centers,
            norm,
            inv_w2,
        })
    }

    #[inline]
    pub fn strength(&self) -> F {
        self.strength
    }

    #[inline]
    pub fn width(&self) -> F {
        self.width
    }

    pub fn centers(&self) -> &[[F; 2]] {
        &self.centers
    }

    #[inline]
    pub fn value(&self, q: &[F; 2]) -> F {
        let half = F::lit(0.5);
        let mut s = F::zero();
        for c in &self.centers {
            let dx = q[0] - c[0];
            let dy = q[1] - c[1];
            s += (-half * (dx * dx + dy * dy) * self.inv_w2).exp();
        }
        self.norm * s
    }

    #[inline]
    pub fn grad(&self, q: &[F; 2]) -> [F; 2] {
        let half = F::lit(0.5);
        let mut gx = F::zero();
        let mut gy = F::zero();
        for c in &self.centers {
            let dx = q[0] - c[0];
            let dy = q[1] - c[1];
            let e = (-half * (dx * dx + dy * dy) * self.inv_w2).exp();
            gx += dx * e;
            gy += dy * e;
        }
        let f = -self.norm * self.inv_w2;
        [f * gx, f * gy]
    }
}

/// Quarter-stadium billiard driven by a Gaussian-sum potential.
#[derive(Clone, Debug)]
pub struct StadiumSystem<F> {
    geometry: StadiumGeometry<F>,
    potential: GaussianPotential<F>,
    mass: F,
}

impl<F: Float> StadiumSystem<F> {
    pub fn new(
        geometry: StadiumGeometry<F>,
        potential: GaussianPotential<F>,
        mass: F,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be finite and positive, got {mass}"),
            });
        }
        for c in potential.centers() {
            if !geometry.contains(c) {
                return Err(Error::InvalidParameter {
                    name: "centers",
                    reason: format!(
                        "potential center ({}, {}) outside the billiard",
                        c[0], c[1]
                    ),
                });
            }
        }
        Ok(Self {
            geometry,
            potential,
            mass,
        })
    }

    pub fn geometry(&self) -> &StadiumGeometry<F> {
        &self.geometry
    }

    pub fn potential(&self) -> &GaussianPotential<F> {
        &self.potential
    }
}

impl<F: Float> System<F, 2> for StadiumSystem<F> {
    #[inline]
    fn mass(&self) -> F {
        self.mass
    }

    #[inline]
    fn has_walls(&self) -> bool {
        true
    }

    #[inline]
    fn contains(&self, q: &[F; 2]) -> bool {
        self.geometry.contains(q)
    }

    #[inline]
    fn base_potential(&self, _q: &[F; 2]) -> F {
        F::zero()
    }

    #[inline]
    fn base_potential_grad(&self, _q: &[F; 2]) -> [F; 2] {
        [F::zero(); 2]
    }

    #[inline]
    fn perturbation(&self, q: &[F; 2]) -> F {
        self.potential.value(q)
    }

    #[inline]
    fn perturbation_grad(&self, q: &[F; 2]) -> [F; 2] {
        self.potential.grad(q)
    }

    fn flow_h0(&self, z: &PhasePoint<F, 2>, s: F) -> Result<PhasePoint<F, 2>> {
        if s >= F::zero() {
            self.geometry.flight(z, s, self.mass)
        } else {
            // Backward flight via momentum reversal.
            let fwd = self.geometry.flight(&z.reversed(), -s, self.mass)?;
            Ok(fwd.reversed())
        }
    }

    fn reflect(&self, z: &mut PhasePoint<F, 2>) {
        self.geometry.reflect_at(z);
    }

    fn bounds(&self) -> Option<([F; 2], [F; 2])> {
        Some((
            [F::zero(), F::zero()],
            [
                self.geometry.length + self.geometry.radius,
                self.geometry.radius,
            ],
        ))
    }
}

/// Reference driven stadium: r = l = 1, m = 1/2, four Gaussian wells of
/// strength 180 and width 0.1.
pub fn reference_stadium<F: Float>() -> StadiumSystem<F> {
    let geometry = StadiumGeometry::new(F::one(), F::one()).expect("valid geometry");
    let centers = vec![
        [F::lit(0.2), F::lit(0.4)],
        [F::lit(0.67), F::lit(0.5)],
        [F::lit(0.5), F::lit(0.15)],
        [F::lit(0.3), F::lit(0.75)],
    ];
    let potential =
        GaussianPotential::new(F::lit(180.0), F::lit(0.1), centers).expect("valid potential");
    StadiumSystem::new(geometry, potential, F::lit(0.5)).expect("valid system")
}
