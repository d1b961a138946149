//! Rational maps r = p/q and their evaluation in both charts of the sphere.
//!
//! Everything downstream works with the logarithmic derivative
//! L = r'/r = N/(pq), N = p'q - pq'.  Near infinity the chart u = 1/z is
//! used; polynomials are evaluated there through their reversed coefficient
//! vectors so that no huge powers are formed.

use crate::error::{Error, Result};
use crate::poly::{coprime, wronskian_numerator, Polynomial};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct RationalMap {
    p: Polynomial,
    q: Polynomial,
    n: usize,
    numerator: Polynomial, // N = p'q - pq'
    p_rev: Polynomial,
    q_rev: Polynomial,
    n_rev: Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// The finite plane, coordinate z.
    Z,
    /// The chart at infinity, coordinate u = 1/z.
    U,
}

/// A position on the sphere, tagged with the chart it is expressed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPos {
    pub chart: Chart,
    pub w: Complex64,
}

impl ChartPos {
    pub fn z(w: Complex64) -> ChartPos {
        ChartPos { chart: Chart::Z, w }
    }

    pub fn u(w: Complex64) -> ChartPos {
        ChartPos { chart: Chart::U, w }
    }

    /// Finite-plane coordinate; `None` at the point at infinity.
    pub fn to_z(self) -> Option<Complex64> {
        match self.chart {
            Chart::Z => Some(self.w),
            Chart::U => {
                if self.w.norm() == 0.0 {
                    None
                } else {
                    Some(Complex64::new(1.0, 0.0) / self.w)
                }
            }
        }
    }
}

impl RationalMap {
    /// Builds the map, checking coprimality of (p, q) and n >= 1.
    pub fn new(p: Polynomial, q: Polynomial) -> Result<RationalMap> {
        let dp = p.degree().ok_or(Error::DegreeTooSmall)?;
        let dq = q
            .degree()
            .ok_or_else(|| Error::Input("q must be nonzero".into()))?;
        let n = dp.max(dq);
        if n < 1 {
            return Err(Error::DegreeTooSmall);
        }
        let scale = 1.0f64
            .max(p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max))
            .max(q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max));
        if dp >= 1 && dq >= 1 && !coprime(&p, &q, 1e-9 * scale)? {
            let rp = p.roots(1e-12)?;
            let rq = q.roots(1e-12)?;
            let mut near = Complex64::new(0.0, 0.0);
            let mut best = f64::INFINITY;
            for a in &rp.roots {
                for b in &rq.roots {
                    let d = (a.location - b.location).norm();
                    if d < best {
                        best = d;
                        near = a.location;
                    }
                }
            }
            return Err(Error::NotCoprime { near });
        }
        let numerator = wronskian_numerator(&p, &q);
        let p_rev = p.reversed();
        let q_rev = q.reversed();
        let n_rev = numerator.reversed();
        Ok(RationalMap {
            p,
            q,
            n,
            numerator,
            p_rev,
            q_rev,
            n_rev,
        })
    }

    /// Polynomial case r = p.
    pub fn polynomial(p: Polynomial) -> Result<RationalMap> {
        RationalMap::new(p, Polynomial::constant(Complex64::new(1.0, 0.0)))
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn is_polynomial(&self) -> bool {
        self.q.degree() == Some(0)
    }

    /// N = p'q - pq'.
    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn deg_p(&self) -> usize {
        self.p.degree().unwrap()
    }

    pub fn deg_q(&self) -> usize {
        self.q.degree().unwrap()
    }

    /// deg(pq).
    pub fn deg_pq(&self) -> usize {
        self.deg_p() + self.deg_q()
    }

    pub fn deg_numerator(&self) -> Option<usize> {
        self.numerator.degree()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.p.eval(z) / self.q.eval(z)
    }

    /// r at a chart position; at u = 0 this is the limit value at infinity.
    pub fn eval_chart(&self, pos: ChartPos) -> Complex64 {
        match pos.chart {
            Chart::Z => self.eval(pos.w),
            Chart::U => {
                let u = pos.w;
                let base = self.p_rev.eval(u) / self.q_rev.eval(u);
                let k = self.deg_q() as i32 - self.deg_p() as i32;
                base * u.powi(k)
            }
        }
    }

    /// log |r| at a chart position; -inf at zeros of r, +inf at poles.
    pub fn log_abs(&self, pos: ChartPos) -> f64 {
        match pos.chart {
            Chart::Z => self.p.eval(pos.w).norm().ln() - self.q.eval(pos.w).norm().ln(),
            Chart::U => {
                let u = pos.w;
                let k = self.deg_q() as f64 - self.deg_p() as f64;
                k * u.norm().ln() + self.p_rev.eval(u).norm().ln()
                    - self.q_rev.eval(u).norm().ln()
            }
        }
    }

    /// Logarithmic derivative in the chart of `pos`: L(z) = N/(pq) in the
    /// finite chart, and M(u) = d/du log r(1/u) = -u^(k-2) Nrev/(prev qrev)
    /// at infinity, with k = deg(pq) - deg N.
    pub fn log_deriv(&self, pos: ChartPos) -> Complex64 {
        match pos.chart {
            Chart::Z => {
                let z = pos.w;
                self.numerator.eval(z) / (self.p.eval(z) * self.q.eval(z))
            }
            Chart::U => {
                let u = pos.w;
                let dn = match self.numerator.degree() {
                    Some(d) => d,
                    None => return Complex64::new(0.0, 0.0),
                };
                let k = (self.deg_pq() - dn) as i32;
                let base = self.n_rev.eval(u) / (self.p_rev.eval(u) * self.q_rev.eval(u));
                -base * u.powi(k - 2)
            }
        }
    }

    /// Zeros of r on the sphere as distinct points (n_z of the limit laws).
    pub fn distinct_zero_count(&self) -> Result<usize> {
        let finite = if self.deg_p() >= 1 {
            self.p.roots(1e-12)?.roots.len()
        } else {
            0
        };
        Ok(finite + usize::from(self.deg_q() > self.deg_p()))
    }

    /// Poles of r on the sphere as distinct points (n_p of the limit laws).
    pub fn distinct_pole_count(&self) -> Result<usize> {
        let finite = if self.deg_q() >= 1 {
            self.q.roots(1e-12)?.roots.len()
        } else {
            0
        };
        Ok(finite + usize::from(self.deg_p() > self.deg_q()))
    }

    /// Scale the map by 1/c, shifting every lemniscate level by c.
    pub fn scaled_by(&self, c: f64) -> Result<RationalMap> {
        RationalMap::new(
            self.p.scale(Complex64::new(1.0 / c, 0.0)),
            self.q.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn frac_z2m1_z2p1() -> RationalMap {
        RationalMap::new(
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            Polynomial::from_real(&[1.0, 0.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn rejects_shared_roots() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let q = Polynomial::from_real(&[0.0, 1.0, 1.0]);
        assert!(matches!(
            RationalMap::new(p, q),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn numerator_of_fig1_example() {
        let r = frac_z2m1_z2p1();
        assert_eq!(r.numerator(), &Polynomial::from_real(&[0.0, 4.0]));
    }

    #[test]
    fn chart_consistency() {
        let r = frac_z2m1_z2p1();
        let z = c(3.0, 1.5);
        let u = C::new(1.0, 0.0) / z;
        assert!((r.eval(z) - r.eval_chart(ChartPos::u(u))).norm() < 1e-12);
        assert!((r.log_abs(ChartPos::z(z)) - r.log_abs(ChartPos::u(u))).abs() < 1e-12);
        // chain rule: M(u) = -L(1/u)/u^2
        let l = r.log_deriv(ChartPos::z(z));
        let m = r.log_deriv(ChartPos::u(u));
        assert!((m + l / (u * u)).norm() < 1e-9 * l.norm().max(1.0));
    }

    #[test]
    fn value_at_infinity() {
        let r = frac_z2m1_z2p1();
        let v = r.eval_chart(ChartPos::u(c(0.0, 0.0)));
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_and_pole_counts() {
        let r = frac_z2m1_z2p1();
        assert_eq!(r.distinct_zero_count().unwrap(), 2);
        assert_eq!(r.distinct_pole_count().unwrap(), 2);

        let p = RationalMap::polynomial(Polynomial::from_real(&[4.0, 0.0, -5.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.distinct_zero_count().unwrap(), 4);
        assert_eq!(p.distinct_pole_count().unwrap(), 1);
    }
}
