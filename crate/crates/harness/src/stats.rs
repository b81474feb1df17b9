//! Summary statistics over matched seeds.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Two-sided Student-t confidence interval of the mean as `(low, high)`.
pub fn mean_ci(xs: &[f64], level: f64) -> (f64, f64) {
    let (mean, sd) = mean_std(xs);
    if xs.len() < 2 {
        return (mean, mean);
    }
    let df = (xs.len() - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, df).expect("positive dof").inverse_cdf(0.5 + level / 2.0);
    let half = t * sd / (xs.len() as f64).sqrt();
    (mean - half, mean + half)
}

/// `100 (a - ref) / |ref|`; zero when both vanish.
pub fn improvement_pct(a: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::NAN
        }
    } else {
        100.0 * (a - reference) / reference.abs()
    }
}
