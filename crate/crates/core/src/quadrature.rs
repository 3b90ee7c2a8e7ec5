//! Gauss–Legendre rules on the reference interval `[0, 1]` and square `[0, 1]^2`.

/// One-dimensional rule on `[0, 1]`; weights sum to 1.
#[derive(Clone, Debug)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    /// Three-point Gauss–Legendre rule, exact through degree 5.
    pub fn gauss3() -> Self {
        let offset = 0.5 * (3.0f64 / 5.0).sqrt();
        LineRule {
            points: vec![0.5 - offset, 0.5, 0.5 + offset],
            weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

/// Tensor-product rule on the unit square; weights sum to 1.
#[derive(Clone, Debug)]
pub struct CellRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl CellRule {
    pub fn tensor(rule: &LineRule) -> Self {
        let mut points = Vec::with_capacity(rule.len() * rule.len());
        let mut weights = Vec::with_capacity(rule.len() * rule.len());
        for (xi, wx) in rule.iter() {
            for (eta, wy) in rule.iter() {
                points.push((xi, eta));
                weights.push(wx * wy);
            }
        }
        CellRule { points, weights }
    }

    pub fn gauss3() -> Self {
        Self::tensor(&LineRule::gauss3())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss3_integrates_quintics_exactly() {
        let rule = LineRule::gauss3();
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for k in 0..=5 {
            let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(k)).sum();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((approx - exact).abs() < 1e-15, "degree {k}");
        }
        let sixth: f64 = rule.iter().map(|(x, w)| w * x.powi(6)).sum();
        assert!((sixth - 1.0 / 7.0).abs() > 1e-6);
    }

    #[test]
    fn cell_rule_weights_sum_to_one() {
        let rule = CellRule::gauss3();
        assert_eq!(rule.len(), 9);
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let approx: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&(x, y), w)| w * x.powi(5) * y.powi(4))
            .sum();
        assert!((approx - 1.0 / 30.0).abs() < 1e-15);
    }
}
