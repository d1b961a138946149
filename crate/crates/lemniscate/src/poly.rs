//! Complex polynomial arithmetic and root finding.
//!
//! Coefficients are stored in ascending degree order with an exactly nonzero
//! leading coefficient; the zero polynomial is the empty coefficient vector.
//! Roots are found all at once by Aberth–Ehrlich simultaneous iteration and
//! then clustered into multiple roots, since downstream consumers need exact
//! integer multiplicities.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-degree coefficients, trimming exact
    /// trailing zeros.
    pub fn new(mut coeffs: Vec<Complex64>) -> Polynomial {
        while coeffs
            .last()
            .map_or(false, |c| c.re == 0.0 && c.im == 0.0)
        {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Polynomial {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Polynomial {
        Polynomial::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Monic product of (z - root) over the given roots, scaled by `leading`.
    pub fn from_roots(roots: &[Complex64], leading: Complex64) -> Polynomial {
        let mut coeffs = vec![leading];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Polynomial::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs
            .last()
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Magnitude bound sum |c_k| |z|^k, used as the scale for relative
    /// residual tests.
    pub fn eval_magnitude(&self, z: Complex64) -> f64 {
        let az = z.norm();
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * az + c.norm();
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (k as f64 + 1.0))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Polynomial {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    /// Coefficients reversed: z^deg * p(1/z). Used by the chart at infinity.
    pub fn reversed(&self) -> Polynomial {
        let mut c = self.coeffs.clone();
        c.reverse();
        Polynomial::new(c)
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Polynomial::new(out)
    }

    /// All complex roots with multiplicities.  `tol` is the relative residual
    /// target; clustering uses the default relative radius.
    pub fn roots(&self, tol: f64) -> Result<RootSet> {
        self.roots_clustered(tol, crate::tol::Tolerances::default().root_cluster)
    }

    pub fn roots_clustered(&self, tol: f64, cluster_rel: f64) -> Result<RootSet> {
        let deg = self.degree().ok_or(Error::DegreeTooSmall)?;
        if deg < 1 {
            return Err(Error::DegreeTooSmall);
        }

        // Exact roots at the origin: strip leading zero coefficients.
        let zero_mult = self
            .coeffs
            .iter()
            .take_while(|c| c.re == 0.0 && c.im == 0.0)
            .count();
        let reduced = Polynomial::new(self.coeffs[zero_mult..].to_vec());

        let mut raw = aberth(&reduced, tol, 400)?;
        raw.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(zero_mult));

        let scale = raw.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let cluster_tolerance = cluster_rel * scale;
        let roots = cluster_roots(&raw, cluster_tolerance, self);
        debug_assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), deg);
        Ok(RootSet {
            roots,
            cluster_tolerance,
        })
    }
}

/// Wronskian-style numerator p'q - pq', computed as the double sum
/// sum_{i+j=m+1} (i-j) p_i q_j so that symmetric top terms cancel exactly and
/// antisymmetry in (p, q) holds bit for bit.
pub fn wronskian_numerator(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() || q.is_zero() {
        return Polynomial::zero();
    }
    let dp = p.coeffs().len();
    let dq = q.coeffs().len();
    if dp + dq < 3 {
        return Polynomial::zero();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); dp + dq - 2];
    // antisymmetrized accumulation: swapping (p, q) negates every term
    // exactly, and the i = j diagonal (the would-be top term for equal
    // degrees) never enters at all
    for i in 1..dp.max(dq) {
        for j in 0..i {
            if i + j == 0 || i + j > dp + dq - 2 {
                continue;
            }
            let m = i + j - 1;
            let f = (i - j) as f64;
            let term = p.coeff(i) * q.coeff(j) - p.coeff(j) * q.coeff(i);
            out[m] += term * f;
        }
    }
    Polynomial::new(out)
}

/// True iff no root of `p` lies within `tol` of a root of `q`.
pub fn coprime(p: &Polynomial, q: &Polynomial, tol: f64) -> Result<bool> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Input("coprime: p and q must be nonzero".into()));
    }
    if p.degree() == Some(0) || q.degree() == Some(0) {
        return Ok(true);
    }
    let rp = p.roots(1e-12)?;
    let rq = q.roots(1e-12)?;
    for a in &rp.roots {
        for b in &rq.roots {
            if (a.location - b.location).norm() <= tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub location: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub cluster_tolerance: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn locations(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.roots.iter().map(|r| r.location)
    }

    pub fn min_distance_to(&self, z: Complex64) -> f64 {
        self.roots
            .iter()
            .map(|r| (r.location - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Aberth–Ehrlich simultaneous iteration.  All roots are polished at once;
/// multiple roots converge linearly but are rescued by clustering.
fn aberth(p: &Polynomial, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let deg = p.degree().unwrap();
    if deg == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    let dp = p.derivative();

    // Fujiwara bound on root moduli, used to scale the initial circle.
    let lead = p.leading().norm();
    let mut bound = 0.0f64;
    for k in 0..deg {
        let t = (p.coeff(k).norm() / lead).powf(1.0 / (deg - k) as f64);
        bound = bound.max(t);
    }
    let radius = 1.0 + bound;

    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| {
            // irrational angular offset breaks conjugate-symmetry stalls
            let angle = 2.0 * std::f64::consts::PI * j as f64 / deg as f64 + 0.61803398875;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let mut worst = f64::INFINITY;
    for iter in 0..max_iter {
        let mut moved = 0.0f64;
        worst = 0.0;
        for i in 0..deg {
            let pv = p.eval(z[i]);
            let scale = p.eval_magnitude(z[i]).max(f64::MIN_POSITIVE);
            worst = worst.max(pv.norm() / scale);
            let dv = dp.eval(z[i]);
            let newton = if dv.norm() == 0.0 {
                // sitting on a critical point; nudge off it
                Complex64::new(1e-8 * (1.0 + z[i].norm()), 0.0)
            } else {
                pv / dv
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let step = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if worst <= tol {
            return Ok(z);
        }
        if moved < 1e-16 * radius && iter > 10 {
            // stalled; accept if residuals are reasonable
            if worst <= tol.max(1e-10) {
                return Ok(z);
            }
        }
    }
    if worst <= tol.max(1e-9) {
        return Ok(z);
    }
    Err(Error::RootsDidNotConverge {
        iterations: max_iter,
        residual: worst,
        best: z,
    })
}

/// Single-linkage clustering of raw iterates into multiple roots, followed by
/// a Newton polish of each cluster center on the (k-1)-th derivative, where a
/// k-fold root is simple.
fn cluster_roots(raw: &[Complex64], cluster_tolerance: f64, p: &Polynomial) -> Vec<Root> {
    let n = raw.len();
    let mut assigned = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        assigned[i] = id;
        let mut members = vec![i];
        let mut frontier = vec![i];
        while let Some(a) = frontier.pop() {
            for b in 0..n {
                if assigned[b] == usize::MAX && (raw[a] - raw[b]).norm() <= cluster_tolerance {
                    assigned[b] = id;
                    members.push(b);
                    frontier.push(b);
                }
            }
        }
        clusters.push(members);
    }

    let mut out: Vec<Root> = clusters
        .iter()
        .map(|members| {
            let k = members.len();
            let mut center = members
                .iter()
                .map(|&i| raw[i])
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
                / k as f64;
            if k >= 2 {
                center = polish_multiple(p, center, k, cluster_tolerance).unwrap_or(center);
            }
            Root {
                location: center,
                multiplicity: k,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .unwrap()
    });
    out
}

/// Newton on p^(k-1), which has a simple root at an exact k-fold root of p.
fn polish_multiple(
    p: &Polynomial,
    start: Complex64,
    k: usize,
    radius: f64,
) -> Option<Complex64> {
    let g = p.nth_derivative(k - 1);
    let dg = g.derivative();
    let mut z = start;
    for _ in 0..30 {
        let gv = g.eval(z);
        let dv = dg.eval(z);
        if dv.norm() < 1e-300 {
            return None;
        }
        let step = gv / dv;
        z -= step;
        if (z - start).norm() > 4.0 * radius {
            return None;
        }
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    // p = z^4 - 5 z^2 + 4 = (z^2-1)(z^2-4)
    fn quartic() -> Polynomial {
        Polynomial::from_real(&[4.0, 0.0, -5.0, 0.0, 1.0])
    }

    #[test]
    fn eval_examples() {
        let p = quartic();
        assert_eq!(p.eval(c(1.0, 0.0)), c(0.0, 0.0));
        assert_eq!(p.eval(c(0.0, 0.0)), c(4.0, 0.0));
        // (i^2-1)(i^2-4) = (-2)(-5) = 10
        assert!((p.eval(c(0.0, 1.0)) - c(10.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn derivative_examples() {
        let p = quartic();
        let d = p.derivative();
        assert_eq!(d, Polynomial::from_real(&[0.0, -10.0, 0.0, 4.0]));
        assert!(Polynomial::constant(c(3.0, 0.0)).derivative().is_zero());
        assert_eq!(
            Polynomial::from_real(&[1.0, 0.0, 1.0]).derivative(),
            Polynomial::from_real(&[0.0, 2.0])
        );
    }

    #[test]
    fn wronskian_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let q = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(wronskian_numerator(&p, &q), Polynomial::from_real(&[0.0, 4.0]));

        let p2 = Polynomial::from_real(&[-4.0, 0.0, 1.0]);
        assert_eq!(
            wronskian_numerator(&p2, &q),
            Polynomial::from_real(&[0.0, 10.0])
        );

        // q = 1 reduces to p'
        let one = Polynomial::constant(c(1.0, 0.0));
        assert_eq!(wronskian_numerator(&quartic(), &one), quartic().derivative());
    }

    #[test]
    fn wronskian_equal_degrees_cancels_exactly() {
        // leading terms of p'q and pq' must cancel exactly, not to rounding
        let p = Polynomial::new(vec![c(-1.0, 0.3), c(0.1, 0.0), c(1.7, -0.2)]);
        let q = Polynomial::new(vec![c(1.0, 0.0), c(-0.4, 1.1), c(0.9, 0.5)]);
        let n = wronskian_numerator(&p, &q);
        assert!(n.degree().unwrap() <= 2);
    }

    #[test]
    fn roots_examples() {
        let r = Polynomial::from_real(&[1.0, 0.0, 1.0]).roots(1e-12).unwrap();
        let mut locs: Vec<C> = r.locations().collect();
        locs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((locs[0] - c(0.0, -1.0)).norm() < 1e-10);
        assert!((locs[1] - c(0.0, 1.0)).norm() < 1e-10);

        // 4z^3 - 10z = 2z(2z^2-5)
        let r = Polynomial::from_real(&[0.0, -10.0, 0.0, 4.0])
            .roots(1e-12)
            .unwrap();
        let mut locs: Vec<C> = r.locations().collect();
        locs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let s = (2.5f64).sqrt();
        assert!((locs[0] - c(-s, 0.0)).norm() < 1e-10);
        assert!(locs[1].norm() < 1e-10);
        assert!((locs[2] - c(s, 0.0)).norm() < 1e-10);

        // (z-1)^2
        let r = Polynomial::from_real(&[1.0, -2.0, 1.0]).roots(1e-12).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert_eq!(r.roots[0].multiplicity, 2);
        assert!((r.roots[0].location - c(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn roots_rejects_constants() {
        assert!(Polynomial::constant(c(2.0, 0.0)).roots(1e-12).is_err());
        assert!(Polynomial::zero().roots(1e-12).is_err());
    }

    #[test]
    fn coprime_examples() {
        let a = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let b = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        assert!(coprime(&a, &b, 1e-8).unwrap());

        let shared = Polynomial::from_real(&[0.0, 1.0, 1.0]); // z(z+1)
        assert!(!coprime(&a, &shared, 1e-8).unwrap());

        let z = Polynomial::from_real(&[0.0, 1.0]);
        let one = Polynomial::constant(c(1.0, 0.0));
        assert!(coprime(&z, &one, 1e-8).unwrap());
    }

    #[test]
    fn high_multiplicity_cluster() {
        // (z-i)^3 (z+2); iterates around a triple root stall at radius
        // ~(eps)^(1/3), so the clustering radius must be widened beyond the
        // double-root default
        let p = Polynomial::from_roots(&[c(0.0, 1.0), c(0.0, 1.0), c(0.0, 1.0), c(-2.0, 0.0)], c(1.0, 0.0));
        let r = p.roots_clustered(1e-12, 1e-4).unwrap();
        assert_eq!(r.roots.len(), 2);
        let triple = r.roots.iter().find(|r| r.multiplicity == 3).unwrap();
        assert!((triple.location - c(0.0, 1.0)).norm() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeff() -> impl Strategy<Value = C> {
            (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C::new(re, im))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            // reconstructing prod (z - root) reproduces monic coefficients
            #[test]
            fn roots_reconstruct(coeffs in proptest::collection::vec(coeff(), 3..9)) {
                let mut cs = coeffs;
                let lead = cs.last_mut().unwrap();
                if lead.norm() < 0.3 {
                    *lead = C::new(1.0, 0.0);
                }
                let p = Polynomial::new(cs);
                prop_assume!(p.degree().map_or(false, |d| d >= 2));
                let monic = p.scale(C::new(1.0, 0.0) / p.leading());
                let roots = match p.roots(1e-12) {
                    Ok(r) => r,
                    Err(_) => return Err(TestCaseError::reject("no convergence")),
                };
                let mut all = Vec::new();
                for r in &roots.roots {
                    for _ in 0..r.multiplicity {
                        all.push(r.location);
                    }
                }
                let rebuilt = Polynomial::from_roots(&all, C::new(1.0, 0.0));
                let scale = monic.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
                for k in 0..monic.coeffs().len() {
                    prop_assert!((rebuilt.coeff(k) - monic.coeff(k)).norm() <= 1e-8 * scale);
                }
            }

            // derivative matches central finite difference
            #[test]
            fn derivative_matches_fd(coeffs in proptest::collection::vec(coeff(), 2..8),
                                     re in -1.0..1.0f64, im in -1.0..1.0f64) {
                let p = Polynomial::new(coeffs);
                prop_assume!(p.degree().map_or(false, |d| d >= 1));
                let z = C::new(re, im);
                let h = 1e-6;
                let fd = (p.eval(z + C::new(h, 0.0)) - p.eval(z - C::new(h, 0.0))) / (2.0 * h);
                let ex = p.derivative().eval(z);
                let scale = ex.norm().max(1.0);
                prop_assert!((fd - ex).norm() <= 1e-5 * scale);
            }

            // antisymmetry is exact, not approximate
            #[test]
            fn wronskian_antisymmetric(a in proptest::collection::vec(coeff(), 1..6),
                                       b in proptest::collection::vec(coeff(), 1..6)) {
                let p = Polynomial::new(a);
                let q = Polynomial::new(b);
                let n1 = wronskian_numerator(&p, &q);
                let n2 = wronskian_numerator(&q, &p);
                prop_assert_eq!(n1.coeffs().len(), n2.coeffs().len());
                for k in 0..n1.coeffs().len() {
                    prop_assert_eq!(n1.coeff(k), -n2.coeff(k));
                }
            }
        }
    }
}
