//! Truncated Taylor-jet arithmetic.
//!
//! A [`Jet`] holds Taylor coefficients `f(x0), f'(x0), f''(x0)/2!, ...` of a
//! function about a point. The Riccati recursion consumes jets because each
//! level differentiates the previous one; composing coefficient jets with
//! the jet of the inverse Liouville map x(xi) gives exact endpoint
//! derivatives of the transformed potential for analytic coefficient
//! representations.

use num_complex::Complex64;

/// Taylor coefficients about a fixed point, complex-valued.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// `coeffs[k] = f^(k)(x0) / k!`
    pub coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// Jet of a constant.
    pub fn constant(v: Complex64, len: usize) -> Self {
        let mut coeffs = vec![Complex64::default(); len];
        if len > 0 {
            coeffs[0] = v;
        }
        Self { coeffs }
    }

    /// From real derivative values f, f', f'', ... (not divided by k!).
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                Complex64::new(d / fact, 0.0)
            })
            .collect();
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value at the expansion point.
    pub fn value(&self) -> Complex64 {
        self.coeffs.first().copied().unwrap_or_default()
    }

    /// k-th derivative value at the expansion point.
    pub fn derivative(&self, k: usize) -> Complex64 {
        match self.coeffs.get(k) {
            None => Complex64::default(),
            Some(&c) => {
                let mut fact = 1.0;
                for i in 1..=k {
                    fact *= i as f64;
                }
                c * fact
            }
        }
    }

    /// Jet of the derivative; one order shorter.
    pub fn differentiate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        Self {
            coeffs: (0..n).map(|k| self.coeffs[k] + other.coeffs[k]).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Cauchy product truncated to the shorter length.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        let mut coeffs = vec![Complex64::default(); n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Reciprocal jet; requires a nonzero leading coefficient.
    pub fn recip(&self) -> Self {
        let n = self.len();
        let mut coeffs = vec![Complex64::default(); n];
        let a0 = self.coeffs[0];
        coeffs[0] = 1.0 / a0;
        for k in 1..n {
            let mut acc = Complex64::default();
            for j in 1..=k {
                acc += self.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = -acc / a0;
        }
        Self { coeffs }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// Square-root jet with the branch fixed by sqrt of the leading value.
    pub fn sqrt(&self) -> Self {
        let n = self.len();
        let mut coeffs = vec![Complex64::default(); n];
        let s0 = self.coeffs[0].sqrt();
        coeffs[0] = s0;
        for k in 1..n {
            let mut acc = Complex64::default();
            for j in 1..k {
                acc += coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = (self.coeffs[k] - acc) / (2.0 * s0);
        }
        Self { coeffs }
    }

    /// Composition self(g(t)) where g is a jet in t with g(0) equal to the
    /// expansion point of self, i.e. `g.coeffs[0]` is ignored.
    pub fn compose(&self, inner: &Self) -> Self {
        let n = self.len().min(inner.len());
        // Horner in the shifted inner jet
        let mut shifted = inner.clone();
        shifted.coeffs[0] = Complex64::default();
        let mut acc = Jet::constant(Complex64::default(), n);
        for &c in self.coeffs.iter().take(n).rev() {
            acc = acc.mul(&shifted);
            acc.coeffs[0] += c;
        }
        acc
    }
}

/// Taylor jet of the solution of x'(t) = h(x(t)) about t = 0 with x(0) = x0.
/// `h_jet` is the jet of h about x0, in powers of (x - x0). Standard
/// Taylor-ODE recurrence: once x(t) is known to order m, h(x(t)) is correct
/// to order m and its order-m coefficient divided by m + 1 is the next
/// coefficient of x.
pub fn ode_jet(x0: Complex64, h_jet: &Jet, len: usize) -> Jet {
    let mut x = Jet::constant(x0, len.min(h_jet.len()));
    for m in 0..x.len().saturating_sub(1) {
        let hx = h_jet.compose(&x);
        x.coeffs[m + 1] = hx.coeffs[m] / (m as f64 + 1.0);
    }
    x
}
