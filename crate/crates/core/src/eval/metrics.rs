//! Accuracy, chance-corrected agreement and the McNemar statistic.

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("random agreement r = {0} must lie in [0, 1)")]
    BadChance(f64),
    #[error("McNemar statistic is undefined when b + c = 0")]
    NoDiscordance,
    #[error("paired outcome lists differ in length")]
    Unpaired,
}

/// Fraction of `true` outcomes; an empty list scores 0.
pub fn accuracy(outcomes: &[bool]) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|&&b| b).count() as f64 / outcomes.len() as f64
}

/// Cohen's kappa `(a - r) / (1 - r)`.
pub fn kappa(a: f64, r: f64) -> Result<f64, MetricError> {
    if !(0.0..1.0).contains(&r) {
        return Err(MetricError::BadChance(r));
    }
    Ok((a - r) / (1.0 - r))
}

/// `(b - c)^2 / (b + c)`. Works on counts or on proportions.
pub fn mcnemar(b: f64, c: f64) -> Result<f64, MetricError> {
    if b + c <= 0.0 {
        return Err(MetricError::NoDiscordance);
    }
    Ok((b - c) * (b - c) / (b + c))
}

/// Discordant pairs of two systems over the same tasks: (tasks only the
/// first gets wrong, tasks only the second gets wrong).
pub fn discordant(first: &[bool], second: &[bool]) -> Result<(usize, usize), MetricError> {
    if first.len() != second.len() {
        return Err(MetricError::Unpaired);
    }
    let b = first.iter().zip(second).filter(|(&x, &y)| !x && y).count();
    let c = first.iter().zip(second).filter(|(&x, &y)| x && !y).count();
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kappa_examples() {
        assert_abs_diff_eq!(kappa(0.973, 0.00048).unwrap(), 0.972, epsilon = 1e-3);
        assert_abs_diff_eq!(kappa(0.9, 1.0 / 26.0).unwrap(), 0.896, epsilon = 1e-3);
        assert_eq!(kappa(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(kappa(1.0, 0.5).unwrap(), 1.0);
        assert!(kappa(0.5, 1.0).is_err());
        assert!(kappa(0.5, -0.1).is_err());
    }

    #[test]
    fn mcnemar_examples() {
        assert_eq!(mcnemar(4.0, 4.0).unwrap(), 0.0);
        assert_eq!(mcnemar(1.0, 3.0).unwrap(), 1.0);
        assert_eq!(mcnemar(3.0, 1.0).unwrap(), mcnemar(1.0, 3.0).unwrap());
        assert!(mcnemar(0.0, 0.0).is_err());
    }

    #[test]
    fn discordant_counts() {
        let a = [true, true, false, false, true];
        let b = [true, false, true, false, false];
        assert_eq!(discordant(&a, &b).unwrap(), (1, 2));
        assert!(discordant(&a, &b[..2]).is_err());
    }

    #[test]
    fn accuracy_ignores_order() {
        assert_eq!(accuracy(&[true, false, false, true]), 0.5);
        assert_eq!(accuracy(&[false, true, true, false]), 0.5);
        assert_eq!(accuracy(&[]), 0.0);
    }
}
