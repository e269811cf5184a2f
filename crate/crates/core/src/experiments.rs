//! Monte Carlo and exhaustive verification harness.
//!
//! Collision experiments stratify results by |T| because every success
//! formula is conditioned on it. Solution-count statistics run
//! exhaustively over all l wherever N^k fits the budget, so means,
//! variances, and covariances are exact population values.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{build_tilde_basis, enumerate_basis, BasisSelection, RotationSpec};
use crate::error::{Error, Result};
use crate::params::DihedralParams;
use crate::rng::{derive_seed, stream_rng, DOMAIN_INSTANCE, DOMAIN_MEASURE, DOMAIN_ORACLE, DOMAIN_TRIAL};
use crate::simulator::{
    algorithm1, algorithm2, dcsp_measure, prob_in_c, DcspParams, Verdict,
};
use crate::state::DenseState;
use crate::subset_sum::{mask_dot, random_instance};
use crate::unitary::{build_uc, build_us, AssignmentStrategy};

/// Which collision algorithm a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionAlgorithm {
    /// Full standard-basis measurement after the basis change (alg1).
    StandardBasis,
    /// Indicator-qubit measurement (alg2).
    IndicatorBit,
}

/// Which unitary family drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitaryFamily {
    Canonical,
    /// Canonical basis, randomly permuted standard targets.
    RandomPermutation,
    /// The adversarial flat-sum basis. Inputs are pinned to the first
    /// canonical solution of their block, the case the construction
    /// degrades.
    Hat,
    /// Seeded random rotations of each m >= 1 span.
    Tilde,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub n: u64,
    pub k: usize,
    pub algorithm: CollisionAlgorithm,
    pub family: UnitaryFamily,
    pub trials: usize,
    pub seed: u64,
    /// Acceptance width in binomial standard errors.
    pub sigma_tolerance: f64,
}

impl ExperimentConfig {
    pub fn new(
        n: u64,
        k: usize,
        algorithm: CollisionAlgorithm,
        family: UnitaryFamily,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trial count must be >= 1".into()));
        }
        Ok(Self {
            n,
            k,
            algorithm,
            family,
            trials,
            seed,
            sigma_tolerance: 3.0,
        })
    }
}

/// Aggregated results for one |T| stratum.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub t_size: usize,
    pub trials: usize,
    pub successes: usize,
    pub empirical: f64,
    /// Success formula for exact families, lower bound for tilde ones.
    pub predicted: f64,
    pub lower_bound: bool,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    /// "uniform" or "first-solution" (hat runs pin the witness).
    pub witness_convention: &'static str,
    pub cells: Vec<CellSummary>,
    pub overall_pass: bool,
}

/// Predicted success rate (or lower bound) per stratum.
pub fn predicted_success(
    algorithm: CollisionAlgorithm,
    family: UnitaryFamily,
    t: usize,
) -> (f64, bool) {
    let t = t as f64;
    match (algorithm, family) {
        (CollisionAlgorithm::StandardBasis, UnitaryFamily::Canonical)
        | (CollisionAlgorithm::StandardBasis, UnitaryFamily::RandomPermutation) => {
            ((t - 1.0) / t, false)
        }
        (CollisionAlgorithm::StandardBasis, UnitaryFamily::Hat) => {
            (2.0 * (t - 1.0) / (t * t), false)
        }
        (CollisionAlgorithm::IndicatorBit, UnitaryFamily::Canonical)
        | (CollisionAlgorithm::IndicatorBit, UnitaryFamily::RandomPermutation) => {
            ((2.0 / t) * (1.0 - 1.0 / t), false)
        }
        // Tilde families only promise the one-branch lower bound.
        (CollisionAlgorithm::StandardBasis, UnitaryFamily::Tilde)
        | (CollisionAlgorithm::IndicatorBit, UnitaryFamily::Tilde)
        | (CollisionAlgorithm::IndicatorBit, UnitaryFamily::Hat) => {
            ((1.0 / t) * (1.0 - 1.0 / t), true)
        }
    }
}

/// Build the basis and unitaries for a family and run `trials` sampled
/// collisions, stratified by |T|.
pub fn collision_success_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let params = DihedralParams::new(config.n, config.k)?;
    let basis = match config.family {
        UnitaryFamily::Canonical | UnitaryFamily::RandomPermutation => {
            enumerate_basis(&params, BasisSelection::All)?
        }
        UnitaryFamily::Hat => build_tilde_basis(&params, &RotationSpec::Hat)?,
        UnitaryFamily::Tilde => build_tilde_basis(
            &params,
            &RotationSpec::Random {
                seed: derive_seed(config.seed, DOMAIN_INSTANCE, 0),
            },
        )?,
    };
    let pin_witness = config.family == UnitaryFamily::Hat;

    enum Unit {
        Standard(crate::unitary::BasisChangeUnitary),
        Indicator(crate::unitary::IndicatorUnitary),
    }
    let unit = match config.algorithm {
        CollisionAlgorithm::StandardBasis => {
            let strategy = match config.family {
                UnitaryFamily::RandomPermutation => AssignmentStrategy::RandomPermutation {
                    seed: derive_seed(config.seed, DOMAIN_INSTANCE, 1),
                },
                UnitaryFamily::Hat => AssignmentStrategy::Adversarial,
                _ => AssignmentStrategy::Canonical,
            };
            Unit::Standard(build_us(basis, strategy)?)
        }
        CollisionAlgorithm::IndicatorBit => Unit::Indicator(build_uc(basis)?),
    };

    let outcomes: Vec<Result<(usize, bool)>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(config.seed, DOMAIN_TRIAL, trial as u64);
            let (l, mut b, p) = random_instance(&params, &mut rng);
            let block_basis = match &unit {
                Unit::Standard(u) => u.basis(),
                Unit::Indicator(u) => u.basis(),
            };
            if pin_witness {
                let l_value = params.ints_value(&l)?;
                b = block_basis.block(l_value, p)[0].support[0].0;
            }
            let out = match &unit {
                Unit::Standard(u) => algorithm1(&l, b, u, &mut rng)?,
                Unit::Indicator(u) => algorithm2(&l, b, u, &mut rng)?,
            };
            Ok((out.t_size, out.success))
        })
        .collect();

    // Deterministic reduction in trial order.
    let mut counts: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for out in outcomes {
        let (t, success) = out?;
        let cell = counts.entry(t).or_insert((0, 0));
        cell.0 += 1;
        cell.1 += usize::from(success);
    }

    let mut cells = Vec::new();
    let mut overall_pass = true;
    for (t, (trials, successes)) in counts {
        let empirical = successes as f64 / trials as f64;
        let (predicted, lower_bound) = predicted_success(config.algorithm, config.family, t);
        let std_error = (predicted * (1.0 - predicted) / trials as f64).sqrt();
        let width = config.sigma_tolerance * std_error;
        let pass = if lower_bound {
            empirical >= predicted - width - 1e-12
        } else {
            (empirical - predicted).abs() <= width + 1e-12
        };
        overall_pass &= pass;
        cells.push(CellSummary {
            t_size: t,
            trials,
            successes,
            empirical,
            predicted,
            lower_bound,
            std_error,
            pass,
        });
    }

    Ok(ExperimentSummary {
        config: config.clone(),
        witness_convention: if pin_witness { "first-solution" } else { "uniform" },
        cells,
        overall_pass,
    })
}

/// How solution-count statistics are gathered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TStatsMode {
    /// Population values over every l in Z_N^k.
    Exhaustive,
    /// Monte Carlo over `trials` uniform draws of l.
    Sampled { trials: usize },
}

/// Statistics of |T_{l, b.l}| - 1 over l.
#[derive(Debug, Clone, Serialize)]
pub struct TStats {
    pub n: u64,
    pub k: usize,
    pub witness: u32,
    pub mode: TStatsMode,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub max: u64,
    /// (|T| - 1 value, occurrences), ascending.
    pub histogram: Vec<(u64, u64)>,
    pub predicted_mean: f64,
    pub predicted_variance: f64,
}

/// Closed-form population mean of |T| - 1: (2^k - 1)/N.
pub fn predicted_t_mean(n: u64, k: usize) -> f64 {
    ((1u64 << k) - 1) as f64 / n as f64
}

/// Closed-form population variance: (2^k - 1)(1/N - 1/N^2).
pub fn predicted_t_variance(n: u64, k: usize) -> f64 {
    ((1u64 << k) - 1) as f64 * (1.0 / n as f64 - 1.0 / (n as f64 * n as f64))
}

/// Count solutions of (l, b.l) for every mask via one incremental pass.
/// `sums` is scratch of size 2^k.
fn t_size_for(l: &[u64], b: u32, n: u64, sums: &mut [u64]) -> u64 {
    let k = l.len();
    sums[0] = 0;
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = (sums[mask & (mask - 1)] + l[k - 1 - low]) % n;
    }
    let p = sums[b as usize];
    sums.iter().filter(|&&s| s == p).count() as u64
}

/// Gather |T| - 1 statistics for a fixed witness b.
pub fn t_statistics(
    n: u64,
    k: usize,
    witness: u32,
    mode: TStatsMode,
    budget: usize,
    seed: u64,
) -> Result<TStats> {
    if k > crate::subset_sum::ENUMERATION_MAX_K {
        return Err(Error::ResourceLimit(format!(
            "k = {k} over the enumeration cap"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("N must be >= 2".into()));
    }
    let mut histogram: std::collections::BTreeMap<u64, u64> = Default::default();
    let mut sums = vec![0u64; 1 << k];
    let mut count = 0usize;
    let mut s1: u128 = 0;
    let mut s2: u128 = 0;
    let mut max = 0u64;

    let mut record = |t: u64, histogram: &mut std::collections::BTreeMap<u64, u64>| {
        let x = t - 1;
        *histogram.entry(x).or_insert(0) += 1;
        s1 += x as u128;
        s2 += (x as u128) * (x as u128);
        max = max.max(x);
    };

    match mode {
        TStatsMode::Exhaustive => {
            let mut total: u128 = 1;
            for _ in 0..k {
                total *= n as u128;
                if total > budget as u128 {
                    return Err(Error::ResourceLimit(format!(
                        "exhaustive scan over N^k = {n}^{k} exceeds the budget {budget}"
                    )));
                }
            }
            // Odometer over l in Z_N^k, register k fastest.
            let mut l = vec![0u64; k];
            loop {
                record(t_size_for(&l, witness, n, &mut sums), &mut histogram);
                count += 1;
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    l[pos] += 1;
                    if l[pos] < n {
                        break;
                    }
                    l[pos] = 0;
                }
                if l.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
        TStatsMode::Sampled { trials } => {
            if trials == 0 {
                return Err(Error::InvalidArgument("trials must be >= 1".into()));
            }
            let mut rng = stream_rng(seed, DOMAIN_INSTANCE, 2);
            let params = DihedralParams::with_budget(n, k, usize::MAX)?;
            for _ in 0..trials {
                let (l, _, _) = random_instance(&params, &mut rng);
                record(t_size_for(&l, witness, n, &mut sums), &mut histogram);
                count += 1;
            }
        }
    }

    let mean = s1 as f64 / count as f64;
    let variance = s2 as f64 / count as f64 - mean * mean;
    Ok(TStats {
        n,
        k,
        witness,
        mode,
        count,
        mean,
        variance,
        max,
        histogram: histogram.into_iter().collect(),
        predicted_mean: predicted_t_mean(n, k),
        predicted_variance: predicted_t_variance(n, k),
    })
}

impl TStats {
    /// Fraction of l with |T| - 1 >= mean + t.
    pub fn tail_mass(&self, t: f64) -> f64 {
        let threshold = self.mean + t;
        let hits: u64 = self
            .histogram
            .iter()
            .filter(|&&(x, _)| x as f64 >= threshold)
            .map(|&(_, c)| c)
            .sum();
        hits as f64 / self.count as f64
    }
}

/// Chebyshev tail bound Var/t^2 with the closed-form variance.
pub fn chebyshev_bound(n: u64, k: usize, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    Ok(predicted_t_variance(n, k) / (t * t))
}

/// Exact covariances of the solution indicators over exhaustive l.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub n: u64,
    pub k: usize,
    pub witness: u32,
    pub pairs: usize,
    pub max_abs_covariance: f64,
    /// Max |P(X_{b'} = 1) - 1/N| over the sampled masks.
    pub max_marginal_deviation: f64,
}

/// For sampled distinct pairs (b', b'') both != b, compute the exact
/// covariance of their solution indicators over all l in Z_N^k.
pub fn covariance_check(
    n: u64,
    k: usize,
    witness: u32,
    pair_count: usize,
    budget: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    if k > crate::subset_sum::ENUMERATION_MAX_K || k < 2 {
        return Err(Error::InvalidArgument(
            "covariance check needs 2 <= k <= 24".into(),
        ));
    }
    let mut total: u128 = 1;
    for _ in 0..k {
        total *= n as u128;
        if total > budget as u128 {
            return Err(Error::ResourceLimit(format!(
                "exhaustive scan over N^k = {n}^{k} exceeds the budget {budget}"
            )));
        }
    }
    let total = total as u64;

    // Sample distinct unordered pairs, capped by availability.
    let others: Vec<u32> = (0..1u32 << k).filter(|&m| m != witness).collect();
    let available = others.len() * (others.len() - 1) / 2;
    let want = pair_count.min(available);
    let mut rng = stream_rng(seed, DOMAIN_INSTANCE, 3);
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(want);
    let mut seen = std::collections::BTreeSet::new();
    while pairs.len() < want {
        let a = others[rng.random_range(0..others.len())];
        let b = others[rng.random_range(0..others.len())];
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            pairs.push(key);
        }
    }

    let mut joint = vec![0u64; pairs.len()];
    let mut single: std::collections::BTreeMap<u32, u64> = Default::default();
    for &(a, b) in &pairs {
        single.entry(a).or_insert(0);
        single.entry(b).or_insert(0);
    }

    let mut sums = vec![0u64; 1 << k];
    let mut l = vec![0u64; k];
    loop {
        sums[0] = 0;
        for mask in 1..sums.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = (sums[mask & (mask - 1)] + l[k - 1 - low]) % n;
        }
        let p = sums[witness as usize];
        for (count, &(a, b)) in joint.iter_mut().zip(&pairs) {
            if sums[a as usize] == p && sums[b as usize] == p {
                *count += 1;
            }
        }
        for (&mask, count) in single.iter_mut() {
            if sums[mask as usize] == p {
                *count += 1;
            }
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            l[pos] += 1;
            if l[pos] < n {
                break;
            }
            l[pos] = 0;
        }
        if l.iter().all(|&x| x == 0) {
            break;
        }
    }

    let mut max_abs_cov = 0.0f64;
    for (hits, &(a, b)) in joint.iter().zip(&pairs) {
        let pa = single[&a] as f64 / total as f64;
        let pb = single[&b] as f64 / total as f64;
        let pab = *hits as f64 / total as f64;
        max_abs_cov = max_abs_cov.max((pab - pa * pb).abs());
    }
    let max_marginal_deviation = single
        .values()
        .map(|&c| (c as f64 / total as f64 - 1.0 / n as f64).abs())
        .fold(0.0f64, f64::max);

    Ok(CovarianceReport {
        n,
        k,
        witness,
        pairs: pairs.len(),
        max_abs_covariance: max_abs_cov,
        max_marginal_deviation,
    })
}

/// Confusion data for the coset-space measurement.
#[derive(Debug, Clone, Serialize)]
pub struct DcspConfusion {
    pub n: u64,
    pub k: usize,
    pub kprime: usize,
    /// Exact ||Pi_C c||^2 extrema over the checked coset states.
    pub coset_projection_min: f64,
    pub coset_projection_max: f64,
    pub coset_states_checked: usize,
    /// |B0| / (2N)^k, the exact acceptance rate on uniform standard input.
    pub uniform_accept_exact: f64,
    pub uniform_accept_empirical: f64,
    pub uniform_trials: usize,
    /// 1 / 2^{k'+1}.
    pub bound: f64,
    pub b0_count: usize,
}

/// Exact coset-input column plus a sampled uniform-standard-input column.
pub fn dcsp_confusion(dcsp: &DcspParams, trials: usize, seed: u64) -> Result<DcspConfusion> {
    let params = &dcsp.params;
    let b0 = enumerate_basis(params, BasisSelection::B0)?;
    let family_size = params.int_dim() * params.n() as usize;

    // Exact projection of every coset state (or a sample when the family
    // is large).
    let check_all = family_size <= 4096;
    let specs: Vec<crate::basis::CosetStateSpec> = if check_all {
        let mut v = Vec::with_capacity(family_size);
        for d in 0..params.n() {
            for xv in 0..params.int_dim() {
                v.push(crate::basis::CosetStateSpec::new(d, params.ints_from_value(xv)));
            }
        }
        v
    } else {
        let mut rng = stream_rng(seed, DOMAIN_ORACLE, 0);
        (0..trials)
            .map(|_| {
                let d = rng.random_range(0..params.n());
                let xs = (0..params.k()).map(|_| rng.random_range(0..params.n())).collect();
                crate::basis::CosetStateSpec::new(d, xs)
            })
            .collect()
    };
    let projections: Vec<Result<f64>> = specs
        .par_iter()
        .map(|spec| {
            let c = crate::basis::build_coset_state(spec, params)?;
            prob_in_c(&c, &b0)
        })
        .collect();
    let mut coset_min = f64::INFINITY;
    let mut coset_max: f64 = 0.0;
    for p in projections {
        let p = p?;
        coset_min = coset_min.min(p);
        coset_max = coset_max.max(p);
    }

    // Sampled uniform standard-basis inputs.
    let accepts: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, DOMAIN_MEASURE, trial as u64);
            let z = rng.random_range(0..params.full_dim());
            let mut state = DenseState::zero(params);
            state.amplitudes_mut()[z] = num_complex::Complex64::ONE;
            let m = dcsp_measure(&state, &b0, &mut rng)?;
            Ok(matches!(m.verdict, Verdict::InC))
        })
        .collect();
    let mut hits = 0usize;
    for a in accepts {
        hits += usize::from(a?);
    }

    Ok(DcspConfusion {
        n: params.n(),
        k: params.k(),
        kprime: dcsp.kprime,
        coset_projection_min: coset_min,
        coset_projection_max: coset_max,
        coset_states_checked: specs.len(),
        uniform_accept_exact: b0.len() as f64 / params.full_dim() as f64,
        uniform_accept_empirical: hits as f64 / trials as f64,
        uniform_trials: trials,
        bound: dcsp.false_accept_bound(),
        b0_count: b0.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exhaustive_t_stats_match_closed_forms() {
        // k=3, N=4 over 64 values of l: mean 7/4, variance 21/16.
        let s = t_statistics(4, 3, 0b111, TStatsMode::Exhaustive, 1 << 24, 0).unwrap();
        assert_eq!(s.count, 64);
        assert_abs_diff_eq!(s.mean, 1.75, epsilon = 1e-12);
        assert_abs_diff_eq!(s.variance, 21.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.mean, s.predicted_mean, epsilon = 1e-12);
        assert_abs_diff_eq!(s.variance, s.predicted_variance, epsilon = 1e-12);
        // The witness itself always solves, so |T| >= 1 everywhere.
        assert!(s.histogram.iter().map(|&(_, c)| c).sum::<u64>() == 64);
    }

    #[test]
    fn witness_choice_does_not_move_the_moments() {
        for witness in [0b000u32, 0b101, 0b111] {
            let s = t_statistics(4, 3, witness, TStatsMode::Exhaustive, 1 << 24, 0).unwrap();
            assert_abs_diff_eq!(s.mean, 1.75, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let mode = TStatsMode::Sampled { trials: 500 };
        let a = t_statistics(4, 4, 0b1111, mode, 1 << 24, 9).unwrap();
        let b = t_statistics(4, 4, 0b1111, mode, 1 << 24, 9).unwrap();
        assert_eq!(a.histogram, b.histogram);
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(
            t_statistics(16, 8, 0, TStatsMode::Exhaustive, 1 << 24, 0),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn chebyshev_examples() {
        let b = chebyshev_bound(4, 3, 10.0).unwrap();
        assert_abs_diff_eq!(b, 0.013125, epsilon = 1e-12);
        assert!(chebyshev_bound(4, 3, 1e9).unwrap() < 1e-15);
        assert!(chebyshev_bound(4, 3, 0.0).is_err());
    }

    #[test]
    fn tail_mass_below_chebyshev() {
        let s = t_statistics(4, 3, 0b111, TStatsMode::Exhaustive, 1 << 24, 0).unwrap();
        for t in [1.0, 2.0, 5.0, 10.0] {
            assert!(s.tail_mass(t) <= chebyshev_bound(4, 3, t).unwrap() + 1e-12);
        }
    }

    #[test]
    fn covariances_vanish_and_marginals_are_exact() {
        let r = covariance_check(4, 3, 0b111, 21, 1 << 24, 1).unwrap();
        assert_eq!(r.pairs, 21);
        assert!(r.max_abs_covariance <= 1e-9);
        assert!(r.max_marginal_deviation <= 1e-12);
    }

    #[test]
    fn pair_count_capped_by_availability() {
        // k=2: only 3 masks differ from the witness, so 3 pairs exist.
        let r = covariance_check(2, 2, 0b11, 20, 1 << 24, 2).unwrap();
        assert_eq!(r.pairs, 3);
    }

    #[test]
    fn collision_experiment_canonical() {
        let config = ExperimentConfig::new(
            4,
            4,
            CollisionAlgorithm::StandardBasis,
            UnitaryFamily::Canonical,
            2000,
            7,
        )
        .unwrap();
        let summary = collision_success_experiment(&config).unwrap();
        assert!(summary.overall_pass);
        assert_eq!(summary.witness_convention, "uniform");
        let total: usize = summary.cells.iter().map(|c| c.trials).sum();
        assert_eq!(total, 2000);
    }

    #[test]
    fn collision_experiment_is_reproducible() {
        let config = ExperimentConfig::new(
            4,
            3,
            CollisionAlgorithm::IndicatorBit,
            UnitaryFamily::Tilde,
            500,
            11,
        )
        .unwrap();
        let a = collision_success_experiment(&config).unwrap();
        let b = collision_success_experiment(&config).unwrap();
        let aj = serde_json::to_string(&a).unwrap();
        let bj = serde_json::to_string(&b).unwrap();
        assert_eq!(aj, bj);
    }

    #[test]
    fn hat_runs_pin_the_witness() {
        let config = ExperimentConfig::new(
            4,
            4,
            CollisionAlgorithm::StandardBasis,
            UnitaryFamily::Hat,
            1000,
            3,
        )
        .unwrap();
        let summary = collision_success_experiment(&config).unwrap();
        assert_eq!(summary.witness_convention, "first-solution");
        assert!(summary.overall_pass);
    }

    #[test]
    fn binomial_convergence_at_two_trial_counts() {
        for trials in [2000usize, 8000] {
            let config = ExperimentConfig::new(
                4,
                4,
                CollisionAlgorithm::IndicatorBit,
                UnitaryFamily::Canonical,
                trials,
                13,
            )
            .unwrap();
            let summary = collision_success_experiment(&config).unwrap();
            assert!(summary.overall_pass, "failed at {trials} trials");
        }
    }

    #[test]
    fn confusion_matrix_at_acceptance_params() {
        let dcsp = DcspParams::new(4, 1).unwrap();
        let c = dcsp_confusion(&dcsp, 400, 17).unwrap();
        assert!(c.coset_projection_min >= 1.0 - 1e-10);
        assert!(c.uniform_accept_exact <= c.bound);
        let sigma =
            (c.uniform_accept_exact * (1.0 - c.uniform_accept_exact) / c.uniform_trials as f64)
                .sqrt();
        assert!((c.uniform_accept_empirical - c.uniform_accept_exact).abs() <= 3.0 * sigma);
    }
}
