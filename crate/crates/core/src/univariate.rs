//! Univariate polynomials over ℚ, just enough to decide convexity.

use num::{One, Signed, Zero};

use crate::rational::Rational;

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    fn scale(&self, f: &Rational) -> UniPoly {
        UniPoly::new(self.0.iter().map(|c| c * f).collect())
    }

    fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &UniPoly, i: usize| p.0.get(i).cloned().unwrap_or_else(Rational::zero);
        UniPoly::new((0..n).map(|i| get(self, i) - get(other, i)).collect())
    }

    fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    /// Euclidean division `(quotient, remainder)`; `divisor` must be non-zero.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd)];
        let lead = divisor.lead();
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let f = rem.last().expect("non-empty") / &lead;
            for (i, c) in divisor.0.iter().enumerate() {
                rem[shift + i] -= &f * c;
            }
            quot[shift] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's squarefree decomposition: `self = c · Π f_i^i`, returns `[f_1, f_2, …]`.
    fn squarefree_factors(&self) -> Vec<UniPoly> {
        let d = self.derivative();
        let mut a = self.gcd(&d);
        let mut b = self.div_rem(&a).0;
        let mut c = d.div_rem(&a).0;
        let mut out = Vec::new();
        loop {
            let diff = c.sub(&b.derivative());
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            a = b.gcd(&diff);
            out.push(a.clone());
            b = b.div_rem(&a).0;
            c = diff.div_rem(&a).0;
        }
        out
    }

    /// Number of distinct real roots (Sturm's theorem); zero polynomial → 0.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        let changes = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
        let at_pos_inf: Vec<bool> = seq.iter().map(|p| p.lead().is_positive()).collect();
        let at_neg_inf: Vec<bool> = seq
            .iter()
            .map(|p| p.lead().is_positive() == (p.degree().unwrap_or(0) % 2 == 0))
            .collect();
        changes(at_neg_inf) - changes(at_pos_inf)
    }

    /// Whether `self ≥ 0` on all of ℝ.
    pub fn is_nonnegative(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) if d % 2 == 1 => false,
            Some(_) if self.lead().is_negative() => false,
            Some(_) => {
                // Sign changes happen exactly at roots of odd multiplicity.
                self.squarefree_factors()
                    .iter()
                    .step_by(2)
                    .all(|f| f.count_real_roots() == 0)
            }
        }
    }

    /// Convex with degree ≥ 2, which for polynomials means strictly convex.
    pub fn is_strictly_convex(&self) -> bool {
        self.degree().is_some_and(|d| d >= 2) && self.derivative().derivative().is_nonnegative()
    }
}
