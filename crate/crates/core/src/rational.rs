//! Exact derivatives of rational functions of the form `N(ρ) / B(ρ)^m`
//! with integer coefficients.

/// Integer polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(pub Vec<i128>);

impl IntPoly {
    pub fn derivative(&self) -> IntPoly {
        IntPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as i128)
                .collect(),
        )
        .trimmed()
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return IntPoly(Vec::new());
        }
        let mut out = vec![0i128; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly(out).trimmed()
    }

    pub fn scale(&self, s: i128) -> IntPoly {
        IntPoly(self.0.iter().map(|c| c * s).collect()).trimmed()
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &IntPoly, i: usize| p.0.get(i).copied().unwrap_or(0);
        IntPoly((0..n).map(|i| get(self, i) - get(other, i)).collect()).trimmed()
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        (0..e).fold(IntPoly(vec![1]), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    fn trimmed(mut self) -> IntPoly {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }
}

/// `numerator / base^power`.
///
/// Differentiation applies the quotient rule and cancels the common factor
/// `base^(power-1)`, so the denominator stays a power of `base`:
///
/// ```text
/// (N / B^m)' = (N' B - m N B') / B^(m+1)
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCoeff {
    pub numerator: IntPoly,
    pub base: IntPoly,
    pub power: u32,
}

impl RationalCoeff {
    pub fn derivative(&self) -> RationalCoeff {
        let lhs = self.numerator.derivative().mul(&self.base);
        let rhs = self
            .numerator
            .mul(&self.base.derivative())
            .scale(self.power as i128);
        RationalCoeff {
            numerator: lhs.sub(&rhs),
            base: self.base.clone(),
            power: self.power + 1,
        }
    }

    /// `[f, f', f'', ...]` up to order `max_order`.
    pub fn derivatives(&self, max_order: usize) -> Vec<RationalCoeff> {
        let mut out = vec![self.clone()];
        for _ in 0..max_order {
            let next = out.last().unwrap().derivative();
            out.push(next);
        }
        out
    }

    pub fn denominator(&self) -> IntPoly {
        self.base.pow(self.power)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.numerator.eval(x) / self.base.eval(x).powi(self.power as i32)
    }
}

/// `a(ρ) = (1 - ρ³) / (1 + ρ)³`, weight of the triple product.
pub fn triple_weight() -> RationalCoeff {
    RationalCoeff {
        numerator: IntPoly(vec![1, 0, 0, -1]),
        base: IntPoly(vec![1, 1]),
        power: 3,
    }
}

/// `b(ρ) = ρ / (1 + ρ)²`, weight of the pair products.
pub fn pair_weight() -> RationalCoeff {
    RationalCoeff {
        numerator: IntPoly(vec![0, 1]),
        base: IntPoly(vec![1, 1]),
        power: 2,
    }
}
