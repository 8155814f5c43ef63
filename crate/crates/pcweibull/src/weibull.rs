//! Weibull distribution under both parameterizations, and the right-censored
//! log-likelihood with covariates entering the scale through a log link.
//!
//! Parameterization 1: f1(y) = a y^(a-1) l exp(-l y^a)        (rate-like scale)
//! Parameterization 2: f2(y) = (a/l) (y/l)^(a-1) exp(-(y/l)^a) (time-scale)
//!
//! Inference always uses parameterization 2 with lambda_i = exp(x_i . beta);
//! parameterization 1 is kept for the density/hazard utilities.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{find_root, make_rng, RootBracket};

/// Which of the two density forms a parameter pair refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    P1,
    P2,
}

/// Shape/scale pair tagged with its parameterization.
#[derive(Debug, Clone, Copy)]
pub struct WeibullParams {
    pub alpha: f64,
    pub lambda: f64,
    pub parameterization: Parameterization,
}

impl WeibullParams {
    pub fn new(alpha: f64, lambda: f64, parameterization: Parameterization) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("shape must be > 0, got {alpha}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("scale must be > 0, got {lambda}")));
        }
        Ok(Self {
            alpha,
            lambda,
            parameterization,
        })
    }

    pub fn p1(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(alpha, lambda, Parameterization::P1)
    }

    pub fn p2(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(alpha, lambda, Parameterization::P2)
    }
}

fn check_time(y: f64) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("time must be > 0, got {y}")));
    }
    Ok(())
}

/// Log-density at y.
pub fn log_density(y: f64, p: &WeibullParams) -> Result<f64> {
    check_time(y)?;
    let a = p.alpha;
    let l = p.lambda;
    Ok(match p.parameterization {
        Parameterization::P1 => a.ln() + (a - 1.0) * y.ln() + l.ln() - l * y.powf(a),
        Parameterization::P2 => {
            let z = y / l;
            a.ln() - l.ln() + (a - 1.0) * z.ln() - z.powf(a)
        }
    })
}

/// Density at y.
pub fn density(y: f64, p: &WeibullParams) -> Result<f64> {
    Ok(log_density(y, p)?.exp())
}

/// Log of the survival function at y.
pub fn log_survival(y: f64, p: &WeibullParams) -> Result<f64> {
    check_time(y)?;
    let a = p.alpha;
    let l = p.lambda;
    Ok(match p.parameterization {
        Parameterization::P1 => -l * y.powf(a),
        Parameterization::P2 => -(y / l).powf(a),
    })
}

/// Survival function S(y) = P(Y > y).
pub fn survival(y: f64, p: &WeibullParams) -> Result<f64> {
    Ok(log_survival(y, p)?.exp())
}

/// Hazard h(y) = f(y)/S(y).
pub fn hazard(y: f64, p: &WeibullParams) -> Result<f64> {
    check_time(y)?;
    let a = p.alpha;
    let l = p.lambda;
    Ok(match p.parameterization {
        Parameterization::P1 => a * l * y.powf(a - 1.0),
        Parameterization::P2 => a * l.powf(-a) * y.powf(a - 1.0),
    })
}

/// Right-censored survival data with a covariate matrix (row per subject).
#[derive(Debug, Clone)]
pub struct SurvivalDataset {
    times: Vec<f64>,
    events: Vec<u8>,
    covariates: Vec<Vec<f64>>,
}

impl SurvivalDataset {
    pub fn new(times: Vec<f64>, events: Vec<u8>, covariates: Vec<Vec<f64>>) -> Result<Self> {
        let n = times.len();
        if events.len() != n || covariates.len() != n {
            return Err(Error::Dataset(format!(
                "length mismatch: {n} times, {} events, {} covariate rows",
                events.len(),
                covariates.len()
            )));
        }
        if n == 0 {
            return Err(Error::Dataset("empty dataset".into()));
        }
        let k = covariates[0].len();
        for (i, row) in covariates.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dataset(format!(
                    "covariate row {i} has {} columns, expected {k}",
                    row.len()
                )));
            }
        }
        for (i, &t) in times.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Dataset(format!("time at row {i} must be > 0, got {t}")));
            }
        }
        for (i, &d) in events.iter().enumerate() {
            if d > 1 {
                return Err(Error::Dataset(format!("event at row {i} must be 0 or 1, got {d}")));
            }
        }
        Ok(Self {
            times,
            events,
            covariates,
        })
    }

    /// Intercept-only dataset (single all-ones covariate column).
    pub fn intercept_only(times: Vec<f64>, events: Vec<u8>) -> Result<Self> {
        let n = times.len();
        Self::new(times, events, vec![vec![1.0]; n])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_covariates(&self) -> usize {
        self.covariates[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn events(&self) -> &[u8] {
        &self.events
    }

    pub fn covariates(&self) -> &[Vec<f64>] {
        &self.covariates
    }

    pub fn n_events(&self) -> usize {
        self.events.iter().filter(|&&d| d == 1).count()
    }

    /// Dataset with covariate columns permuted (used by invariance tests).
    pub fn with_permuted_columns(&self, order: &[usize]) -> Result<Self> {
        let k = self.n_covariates();
        if order.len() != k {
            return Err(Error::Shape(format!("permutation length {} != {k}", order.len())));
        }
        let covariates = self
            .covariates
            .iter()
            .map(|row| order.iter().map(|&j| row[j]).collect())
            .collect();
        Self::new(self.times.clone(), self.events.clone(), covariates)
    }

    /// Read the CSV interchange format: header `time,event,x1,...,xK`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = rdr.headers().map_err(|e| Error::Csv {
                row: 0,
                message: e.to_string(),
            })?;
            if headers.len() < 2 || &headers[0] != "time" || &headers[1] != "event" {
                return Err(Error::Csv {
                    row: 0,
                    message: format!(
                        "expected header starting with `time,event`, got `{}`",
                        headers.iter().collect::<Vec<_>>().join(",")
                    ),
                });
            }
        }
        let mut times = Vec::new();
        let mut events = Vec::new();
        let mut covariates = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::Csv {
                row,
                message: e.to_string(),
            })?;
            let parse = |idx: usize| -> Result<f64> {
                record[idx].trim().parse::<f64>().map_err(|_| Error::Csv {
                    row,
                    message: format!("column {} is not a number: `{}`", idx + 1, &record[idx]),
                })
            };
            let t = parse(0)?;
            let d = parse(1)?;
            if d != 0.0 && d != 1.0 {
                return Err(Error::Csv {
                    row,
                    message: format!("event must be 0 or 1, got {d}"),
                });
            }
            let mut xs = Vec::with_capacity(record.len() - 2);
            for j in 2..record.len() {
                xs.push(parse(j)?);
            }
            times.push(t);
            events.push(d as u8);
            covariates.push(xs);
        }
        // no explicit covariates -> intercept-only
        if !covariates.is_empty() && covariates[0].is_empty() {
            for row in covariates.iter_mut() {
                row.push(1.0);
            }
        }
        Self::new(times, events, covariates)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    /// Write the CSV interchange format.
    pub fn to_csv_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let k = self.n_covariates();
        let mut header = vec!["time".to_string(), "event".to_string()];
        for j in 1..=k {
            header.push(format!("x{j}"));
        }
        wtr.write_record(&header).map_err(|e| Error::Csv {
            row: 0,
            message: e.to_string(),
        })?;
        for i in 0..self.len() {
            let mut rec = vec![format!("{}", self.times[i]), format!("{}", self.events[i])];
            for x in &self.covariates[i] {
                rec.push(format!("{x}"));
            }
            wtr.write_record(&rec).map_err(|e| Error::Csv {
                row: i + 1,
                message: e.to_string(),
            })?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.to_csv_writer(file)
    }
}

/// Censored log-likelihood (parameterization 2, lambda_i = exp(x_i . beta)).
pub fn censored_loglik(alpha: f64, beta: &[f64], data: &SurvivalDataset) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("shape must be > 0, got {alpha}")));
    }
    if beta.len() != data.n_covariates() {
        return Err(Error::Shape(format!(
            "beta has {} coefficients but data has {} covariates",
            beta.len(),
            data.n_covariates()
        )));
    }
    let mut total = 0.0;
    for i in 0..data.len() {
        let eta: f64 = data.covariates[i]
            .iter()
            .zip(beta)
            .map(|(x, b)| x * b)
            .sum();
        let y = data.times[i];
        // log f2 = ln a - ln l + (a-1) ln(y/l) - (y/l)^a, with ln l = eta
        let log_z = y.ln() - eta;
        let z_pow = (alpha * log_z).exp();
        let term = if data.events[i] == 1 {
            alpha.ln() - eta + (alpha - 1.0) * log_z - z_pow
        } else {
            -z_pow
        };
        // -inf is a legitimate zero-likelihood value at extreme parameters
        if term.is_nan() {
            return Err(Error::Numeric {
                context: format!("censored_loglik at observation {i} (alpha={alpha})"),
            });
        }
        total += term;
    }
    Ok(total)
}

/// Simulated dataset: inverse-CDF Weibull draws (parameterization 2) with
/// lambda_i = exp(x_i . beta), plus independent exponential censoring times
/// whose rate is calibrated so the expected censored fraction matches
/// `censor_rate`.
pub fn simulate(
    alpha: f64,
    beta: &[f64],
    covariates: Vec<Vec<f64>>,
    censor_rate: f64,
    seed: u64,
) -> Result<SurvivalDataset> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("shape must be > 0, got {alpha}")));
    }
    if !(0.0..1.0).contains(&censor_rate) {
        return Err(Error::Domain(format!(
            "censor_rate must be in [0, 1), got {censor_rate}"
        )));
    }
    let n = covariates.len();
    if n == 0 {
        return Err(Error::Dataset("need at least one subject".into()));
    }
    let k = covariates[0].len();
    if beta.len() != k {
        return Err(Error::Shape(format!(
            "beta has {} coefficients but covariates have {k} columns",
            beta.len()
        )));
    }
    let lambdas: Vec<f64> = covariates
        .iter()
        .map(|row| row.iter().zip(beta).map(|(x, b)| x * b).sum::<f64>().exp())
        .collect();

    let censor_rate_param = if censor_rate > 0.0 {
        Some(calibrate_censoring_rate(alpha, &lambdas, censor_rate)?)
    } else {
        None
    };

    let mut rng = make_rng(seed);
    let mut times = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    for &lambda in &lambdas {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let y = lambda * (-u.ln()).powf(1.0 / alpha);
        match censor_rate_param {
            Some(rate) => {
                let u2: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let c = -u2.ln() / rate;
                if c < y {
                    times.push(c.max(f64::MIN_POSITIVE));
                    events.push(0);
                } else {
                    times.push(y.max(f64::MIN_POSITIVE));
                    events.push(1);
                }
            }
            None => {
                times.push(y.max(f64::MIN_POSITIVE));
                events.push(1);
            }
        }
    }
    SurvivalDataset::new(times, events, covariates)
}

/// Simulate with an intercept-only design of size n.
pub fn simulate_intercept_only(
    alpha: f64,
    lambda: f64,
    n: usize,
    censor_rate: f64,
    seed: u64,
) -> Result<SurvivalDataset> {
    simulate(alpha, &[lambda.ln()], vec![vec![1.0]; n], censor_rate, seed)
}

// P(censored) for one subject under Exp(rate) censoring is
// 1 - E[exp(-rate * Y)], the Laplace transform of the Weibull; averaged over
// subjects and solved for the rate by bracketed root finding.
fn calibrate_censoring_rate(alpha: f64, lambdas: &[f64], target: f64) -> Result<f64> {
    let cfg = crate::numerics::QuadratureConfig {
        abs_tol: 1e-9,
        rel_tol: 1e-9,
        max_subdivisions: 200,
    };
    let expected_censored = |rate: f64| -> f64 {
        let mut total = 0.0;
        for &lambda in lambdas {
            // integral of (1 - e^{-rate y}) f2(y) dy via z = (y/lambda)^alpha
            let p = crate::numerics::integrate(
                |z: f64| {
                    let y = lambda * z.powf(1.0 / alpha);
                    (1.0 - (-rate * y).exp()) * (-z).exp()
                },
                0.0,
                f64::INFINITY,
                &cfg,
            )
            .unwrap_or(f64::NAN);
            total += p;
        }
        total / lambdas.len() as f64
    };
    let mut lo = 1e-8;
    let mut hi = 1.0;
    while expected_censored(hi) < target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Domain("cannot calibrate censoring rate".into()));
        }
    }
    while expected_censored(lo) > target {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(Error::Domain("cannot calibrate censoring rate".into()));
        }
    }
    let bracket = RootBracket::new(lo, hi, 1e-10)?;
    find_root(|r| expected_censored(r) - target, bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_pinned_values() {
        let p = WeibullParams::p2(1.0, 1.0).unwrap();
        assert_relative_eq!(density(1.0, &p).unwrap(), (-1.0f64).exp(), epsilon = 1e-12);
        let p = WeibullParams::p1(1.0, 1.0).unwrap();
        assert_relative_eq!(density(2.0, &p).unwrap(), (-2.0f64).exp(), epsilon = 1e-12);
        let p = WeibullParams::p2(2.0, 1.0).unwrap();
        assert_relative_eq!(density(1.0, &p).unwrap(), 2.0 * (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn survival_pinned_values() {
        let p = WeibullParams::p2(1.0, 1.0).unwrap();
        assert_relative_eq!(survival(1e-12, &p).unwrap(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(survival(1.0, &p).unwrap(), (-1.0f64).exp(), epsilon = 1e-12);
        let p = WeibullParams::p2(2.0, 1.0).unwrap();
        assert_relative_eq!(survival(2.0, &p).unwrap(), (-4.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn hazard_pinned_values() {
        let p = WeibullParams::p2(1.0, 1.0).unwrap();
        for y in [0.3, 1.0, 5.0] {
            assert_relative_eq!(hazard(y, &p).unwrap(), 1.0, epsilon = 1e-12);
        }
        let p = WeibullParams::p2(2.0, 1.0).unwrap();
        assert_relative_eq!(hazard(3.0, &p).unwrap(), 6.0, epsilon = 1e-12);
        let p = WeibullParams::p2(0.5, 1.0).unwrap();
        assert!(hazard(1.0, &p).unwrap() > hazard(4.0, &p).unwrap());
        assert_relative_eq!(hazard(1.0, &p).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(hazard(4.0, &p).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn hazard_times_survival_is_density() {
        for &param in &[Parameterization::P1, Parameterization::P2] {
            for &alpha in &[0.5, 1.0, 2.3] {
                for &lambda in &[0.5, 1.0, 3.0] {
                    let p = WeibullParams::new(alpha, lambda, param).unwrap();
                    for &y in &[0.1, 0.7, 1.9, 4.2] {
                        let lhs = hazard(y, &p).unwrap() * survival(y, &p).unwrap();
                        let rhs = density(y, &p).unwrap();
                        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
                    }
                }
            }
        }
    }

    #[test]
    fn parameterizations_agree_under_reparameterization() {
        // P1 with rate lambda' = lambda^(-alpha) equals P2 with scale lambda
        for &alpha in &[0.5, 1.3, 4.0] {
            for &lambda in &[0.4, 1.0, 2.5] {
                let p2 = WeibullParams::p2(alpha, lambda).unwrap();
                let p1 = WeibullParams::p1(alpha, lambda.powf(-alpha)).unwrap();
                for &y in &[0.2, 1.0, 3.7] {
                    let d1 = density(y, &p1).unwrap();
                    let d2 = density(y, &p2).unwrap();
                    assert!((d1 - d2).abs() <= 1e-12 * d2.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let cfg = crate::numerics::QuadratureConfig::default();
        for &alpha in &[0.5, 1.0, 1.5, 3.0] {
            let p = WeibullParams::p2(alpha, 1.0).unwrap();
            let mass = crate::numerics::integrate(
                |y| if y > 0.0 { density(y, &p).unwrap_or(0.0) } else { 0.0 },
                0.0,
                f64::INFINITY,
                &cfg,
            )
            .unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "alpha={alpha}: mass={mass}");
        }
    }

    #[test]
    fn hazard_monotonicity() {
        let grid: Vec<f64> = (1..60).map(|i| i as f64 * 0.25).collect();
        let check = |alpha: f64, ord: std::cmp::Ordering| {
            let p = WeibullParams::p2(alpha, 1.0).unwrap();
            for w in grid.windows(2) {
                let h0 = hazard(w[0], &p).unwrap();
                let h1 = hazard(w[1], &p).unwrap();
                assert_eq!(h1.partial_cmp(&h0).unwrap(), ord, "alpha={alpha}");
            }
        };
        check(0.7, std::cmp::Ordering::Less);
        check(1.0, std::cmp::Ordering::Equal);
        check(1.8, std::cmp::Ordering::Greater);
    }

    #[test]
    fn loglik_pinned_values() {
        let data = SurvivalDataset::intercept_only(vec![1.0, 2.0], vec![1, 1]).unwrap();
        assert_relative_eq!(censored_loglik(1.0, &[0.0], &data).unwrap(), -3.0, epsilon = 1e-12);

        let data = SurvivalDataset::intercept_only(vec![1.0, 2.0], vec![1, 0]).unwrap();
        assert_relative_eq!(censored_loglik(1.0, &[0.0], &data).unwrap(), -3.0, epsilon = 1e-12);

        let data = SurvivalDataset::intercept_only(vec![1.0], vec![1]).unwrap();
        assert_relative_eq!(
            censored_loglik(2.0, &[0.0], &data).unwrap(),
            (2.0f64 * (-1.0f64).exp()).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn loglik_all_events_is_sum_of_log_densities() {
        let data = simulate_intercept_only(1.7, 2.0, 50, 0.0, 11).unwrap();
        let ll = censored_loglik(1.7, &[2.0f64.ln()], &data).unwrap();
        let p = WeibullParams::p2(1.7, 2.0).unwrap();
        let direct: f64 = data.times().iter().map(|&y| log_density(y, &p).unwrap()).sum();
        assert_relative_eq!(ll, direct, epsilon = 1e-10);
    }

    #[test]
    fn loglik_shape_mismatch() {
        let data = SurvivalDataset::intercept_only(vec![1.0], vec![1]).unwrap();
        assert!(matches!(
            censored_loglik(1.0, &[0.0, 0.0], &data),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn simulate_means() {
        let data = simulate_intercept_only(1.0, 1.0, 100_000, 0.0, 5).unwrap();
        let mean: f64 = data.times().iter().sum::<f64>() / data.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean={mean}");

        let data = simulate_intercept_only(2.0, 1.0, 100_000, 0.0, 6).unwrap();
        let mean: f64 = data.times().iter().sum::<f64>() / data.len() as f64;
        let expected = (std::f64::consts::PI).sqrt() / 2.0; // Gamma(1.5)
        assert!((mean - expected).abs() < 0.02, "mean={mean}");
    }

    #[test]
    fn simulate_censoring_calibration() {
        let data = simulate_intercept_only(1.4, 1.5, 10_000, 0.3, 9).unwrap();
        let frac = 1.0 - data.n_events() as f64 / data.len() as f64;
        assert!((frac - 0.3).abs() < 0.03, "censored fraction {frac}");
    }

    #[test]
    fn simulate_rejects_bad_censor_rate() {
        assert!(simulate_intercept_only(1.0, 1.0, 10, 1.0, 1).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let data = simulate(
            1.2,
            &[0.3, -0.5],
            (0..20).map(|i| vec![1.0, (i % 3) as f64]).collect(),
            0.2,
            13,
        )
        .unwrap();
        let mut buf = Vec::new();
        data.to_csv_writer(&mut buf).unwrap();
        let back = SurvivalDataset::from_csv_reader(&buf[..]).unwrap();
        assert_eq!(back.len(), data.len());
        assert_eq!(back.events(), data.events());
        for i in 0..data.len() {
            assert_relative_eq!(back.times()[i], data.times()[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_malformed_rows() {
        let bad_header = "t,event\n1.0,1\n";
        assert!(matches!(
            SurvivalDataset::from_csv_reader(bad_header.as_bytes()),
            Err(Error::Csv { row: 0, .. })
        ));
        let bad_event = "time,event\n1.0,2\n";
        assert!(matches!(
            SurvivalDataset::from_csv_reader(bad_event.as_bytes()),
            Err(Error::Csv { row: 1, .. })
        ));
        let bad_number = "time,event,x1\n1.0,1,oops\n";
        assert!(matches!(
            SurvivalDataset::from_csv_reader(bad_number.as_bytes()),
            Err(Error::Csv { row: 1, .. })
        ));
    }
}
