//! Query-model tolerant tester.
//!
//! The tester never sees `f` directly. It asks a [`QueryOracle`] for single
//! values and every answer is counted. A coefficient sieve finds the heavy
//! Fourier coefficients of `f` but only exposes the evaluations of the
//! corresponding characters on sample points, never the characters
//! themselves. The tester recovers the characters up to an unknown change of
//! basis from those evaluations, estimates their coefficients, and compares
//! against an approximator of `g` under every element of `GL_n(F_2)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{self, check_dim, MatrixF2, MAX_ENUM_DIM};
use crate::fourier::{chi, wht, BooleanFunction};
use crate::lp::approx_spectral_norm;

/// Multiplier in the sample count `C (t / omega)^2 ln(40 k_max)`.
pub const SAMPLE_CONSTANT: f64 = 288.0;

/// Point-evaluation access to a hidden function, with a query counter.
pub struct QueryOracle {
    f: BooleanFunction,
    count: u64,
}

impl QueryOracle {
    pub fn new(f: BooleanFunction) -> Self {
        Self { f, count: 0 }
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// `f(x)`; costs one query.
    pub fn query(&mut self, x: u32) -> i8 {
        self.count += 1;
        self.f.value(x)
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// `m` labeled examples: the values of `k` hidden characters and of `f` on
/// each sample point.
#[derive(Clone, Debug)]
pub struct SieveOutput {
    pub points: Vec<u32>,
    /// `columns[j][i] = chi_{S_j}(points[i])`.
    pub columns: Vec<Vec<i8>>,
    pub fvals: Vec<i8>,
    /// Queries spent by the sieve, including the `m` reads of `fvals`.
    pub queries: u64,
    /// Whether the sieve read the whole truth table instead of sampling.
    pub exhaustive: bool,
    labels: Vec<u32>,
}

impl SieveOutput {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn q(&self, i: usize, j: usize) -> i8 {
        self.columns[j][i]
    }

    /// The characters behind the columns. Only for differential testing;
    /// the tester does not use them.
    #[doc(hidden)]
    pub fn hidden_labels(&self) -> &[u32] {
        &self.labels
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SieveConfig {
    /// Overall failure probability the per-node sample sizes are set for.
    pub failure: f64,
    /// Read the full table once whenever a single sampled estimate would
    /// cost at least `2^n` queries.
    pub exhaustive_fallback: bool,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            failure: 0.01,
            exhaustive_fallback: true,
        }
    }
}

/// Which characters [`exact_sieve_debug`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactSieveMode {
    /// `|f^(S)| >= theta`.
    Strict,
    /// `|f^(S)| >= theta / 2`.
    Loose,
}

/// Upper bound `ceil(4 / theta^2)` on the number of emitted characters.
pub fn max_columns(theta: f64) -> usize {
    (4.0 / (theta * theta)).ceil() as usize
}

// Sample sizes for the prefix-weight and coefficient estimates.
struct SieveSizes {
    weight: u64,
    coefficient: u64,
    cap: usize,
}

fn hoeffding(accuracy: f64, failure: f64) -> u64 {
    (2.0 * (2.0 / failure).ln() / (accuracy * accuracy)).ceil() as u64
}

fn sieve_sizes(n: usize, theta: f64, failure: f64) -> SieveSizes {
    let cap = max_columns(theta);
    let nodes = (2 * n * cap + cap) as f64;
    let per_node = failure / nodes;
    SieveSizes {
        weight: hoeffding(theta * theta / 4.0, per_node),
        coefficient: hoeffding(theta / 8.0, per_node),
        cap,
    }
}

/// Worst-case query count of the sampling sieve, not counting `fvals`.
pub fn sieve_query_bound(n: usize, theta: f64, config: &SieveConfig) -> u64 {
    let s = sieve_sizes(n, theta, config.failure);
    let sampled = 2 * s.weight * (2 * n * s.cap) as u64 + s.coefficient * s.cap as u64;
    if config.exhaustive_fallback && 2 * s.weight >= 1 << n {
        1 << n
    } else {
        sampled
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside (0, 1]"
        )));
    }
    Ok(())
}

fn emit(
    oracle: &mut QueryOracle,
    points: &[u32],
    labels: Vec<u32>,
    start: u64,
    exhaustive: bool,
) -> SieveOutput {
    let columns = labels
        .iter()
        .map(|&s| points.iter().map(|&x| chi(s, x)).collect())
        .collect();
    let fvals = points.iter().map(|&x| oracle.query(x)).collect();
    SieveOutput {
        points: points.to_vec(),
        columns,
        fvals,
        queries: oracle.count() - start,
        exhaustive,
        labels,
    }
}

fn exact_labels(oracle: &mut QueryOracle, threshold: f64) -> Vec<u32> {
    let n = oracle.n();
    let table: Vec<i8> = (0..1u32 << n).map(|x| oracle.query(x)).collect();
    let f = BooleanFunction::from_table(n, table).expect("table of the right length");
    let spectrum = wht(&f);
    (0..1u32 << n)
        .filter(|&s| spectrum.coefficient_f64(s).abs() >= threshold)
        .collect()
}

/// Kushilevitz-Mansour style search for the characters with large
/// coefficients, followed by emitting their evaluations on `points`.
///
/// With probability at least `1 - config.failure` every `S` with
/// `|f^(S)| >= theta` is kept and every kept `S` has `|f^(S)| >= theta / 2`.
pub fn implicit_sieve_with<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    points: &[u32],
    theta: f64,
    config: &SieveConfig,
    rng: &mut R,
) -> Result<SieveOutput> {
    check_theta(theta)?;
    let n = oracle.n();
    let start = oracle.count();
    let sizes = sieve_sizes(n, theta, config.failure);

    if config.exhaustive_fallback && 2 * sizes.weight >= 1 << n {
        let mut labels = exact_labels(oracle, 0.75 * theta);
        labels.shuffle(rng);
        return Ok(emit(oracle, points, labels, start, true));
    }

    // prefixes are the low `level` bits of S
    let keep = theta * theta / 2.0;
    let mut prefixes = vec![0u32];
    for level in 1..=n {
        let low = (1u32 << level) - 1;
        let mut scored = Vec::new();
        for &p in &prefixes {
            for child in [p, p | 1 << (level - 1)] {
                let mut acc = 0i64;
                for _ in 0..sizes.weight {
                    let z = rng.gen::<u32>() & !low & ((1 << n) - 1) as u32;
                    let u = rng.gen::<u32>() & low;
                    let v = rng.gen::<u32>() & low;
                    let prod = oracle.query(u | z) * oracle.query(v | z) * chi(child, u ^ v);
                    acc += prod as i64;
                }
                let est = acc as f64 / sizes.weight as f64;
                if est >= keep {
                    scored.push((child, est));
                }
            }
        }
        truncate_by_score(&mut scored, sizes.cap);
        prefixes = scored.into_iter().map(|(p, _)| p).collect();
    }

    let mut found = Vec::new();
    for &s in &prefixes {
        let mut acc = 0i64;
        for _ in 0..sizes.coefficient {
            let x = rng.gen::<u32>() & ((1 << n) - 1) as u32;
            acc += (oracle.query(x) * chi(s, x)) as i64;
        }
        let est = acc as f64 / sizes.coefficient as f64;
        if est.abs() >= 0.75 * theta {
            found.push((s, est.abs()));
        }
    }
    truncate_by_score(&mut found, sizes.cap);
    let mut labels: Vec<u32> = found.into_iter().map(|(s, _)| s).collect();
    labels.shuffle(rng);
    Ok(emit(oracle, points, labels, start, false))
}

fn truncate_by_score(scored: &mut Vec<(u32, f64)>, cap: usize) {
    if scored.len() > cap {
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(cap);
        scored.sort_by_key(|e| e.0);
    }
}

/// [`implicit_sieve_with`] under the default configuration.
pub fn implicit_sieve<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    points: &[u32],
    theta: f64,
    rng: &mut R,
) -> Result<SieveOutput> {
    implicit_sieve_with(oracle, points, theta, &SieveConfig::default(), rng)
}

/// Deterministic sieve from the full spectrum. Reads all `2^n` values.
pub fn exact_sieve_debug(
    oracle: &mut QueryOracle,
    points: &[u32],
    theta: f64,
    mode: ExactSieveMode,
) -> Result<SieveOutput> {
    check_theta(theta)?;
    let start = oracle.count();
    let threshold = match mode {
        ExactSieveMode::Strict => theta,
        ExactSieveMode::Loose => theta / 2.0,
    };
    let labels = exact_labels(oracle, threshold);
    Ok(emit(oracle, points, labels, start, true))
}

/// Why no usable basis was found among the columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoBasis {
    /// Two columns are equal as evaluations, so their characters cannot be
    /// told apart.
    DuplicateColumns(usize, usize),
    /// The columns span more than [`f2::MAX_DIM`] dimensions.
    RankTooLarge(usize),
}

/// Pivot columns and the expression of every column in terms of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnBasis {
    /// `B`, in column order.
    pub pivots: Vec<usize>,
    /// Bit `i` of `combos[j]` is set iff pivot `i` takes part in column `j`.
    pub combos: Vec<u32>,
}

impl ColumnBasis {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn column_bits(col: &[i8]) -> Vec<u64> {
    let mut words = vec![0u64; col.len().div_ceil(64)];
    for (i, &v) in col.iter().enumerate() {
        if v < 0 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

/// Gaussian elimination over `F_2^m` on the columns, reading `-1` as 1.
///
/// Products of columns are sums of their bit vectors, so a column is a
/// product of pivot columns exactly when it lies in their span. An all-`+1`
/// column is the empty product.
pub fn find_column_basis(columns: &[Vec<i8>]) -> std::result::Result<ColumnBasis, NoBasis> {
    struct Row {
        bits: Vec<u64>,
        pivot: usize,
        combo: u32,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut pivots = Vec::new();
    let mut combos = Vec::with_capacity(columns.len());
    for (j, col) in columns.iter().enumerate() {
        let mut bits = column_bits(col);
        let mut combo = 0u32;
        for row in &rows {
            if bits[row.pivot / 64] >> (row.pivot % 64) & 1 == 1 {
                for (b, r) in bits.iter_mut().zip(&row.bits) {
                    *b ^= r;
                }
                combo ^= row.combo;
            }
        }
        match bits.iter().position(|&w| w != 0) {
            None => combos.push(combo),
            Some(w) => {
                if pivots.len() == f2::MAX_DIM {
                    return Err(NoBasis::RankTooLarge(pivots.len() + 1));
                }
                let pivot = w * 64 + bits[w].trailing_zeros() as usize;
                let own = 1u32 << pivots.len();
                pivots.push(j);
                combos.push(own);
                rows.push(Row {
                    bits,
                    pivot,
                    combo: combo ^ own,
                });
            }
        }
    }
    for j in 0..combos.len() {
        if let Some(i) = combos[..j].iter().position(|&c| c == combos[j]) {
            return Err(NoBasis::DuplicateColumns(i, j));
        }
    }
    Ok(ColumnBasis { pivots, combos })
}

/// `T_j`: pivot `i` becomes `e_{i+1}`, other columns the matching sum.
pub fn relabel_columns(basis: &ColumnBasis) -> Vec<u32> {
    basis.combos.clone()
}

/// `r_j = (1/m) sum_i f(x_i) Q[i][j]`.
pub fn estimate_coefficients(so: &SieveOutput) -> Vec<f64> {
    let m = so.m() as f64;
    so.columns
        .iter()
        .map(|col| {
            let s: i64 = col
                .iter()
                .zip(&so.fvals)
                .map(|(&q, &f)| (q * f) as i64)
                .sum();
            s as f64 / m
        })
        .collect()
}

/// `max_A sum_j r_j G^(A^T T_j)` over `GL_n(F_2)`, with the first maximizer in
/// enumeration order. `ghat` is the dense coefficient vector of `G`.
pub fn correlation_search(
    n: usize,
    labels: &[u32],
    r: &[f64],
    ghat: &[f64],
) -> Result<(f64, MatrixF2)> {
    check_dim("correlation search", n, MAX_ENUM_DIM)?;
    if labels.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: r.len(),
        });
    }
    if ghat.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            got: ghat.len(),
        });
    }
    if labels.iter().any(|&t| t >> n != 0) {
        return Err(Error::InvalidParameter("label outside F_2^n".into()));
    }
    let slices: Vec<(f64, MatrixF2)> = (1u32..1 << n)
        .into_par_iter()
        .map(|first| {
            let mut best = f64::NEG_INFINITY;
            let mut best_m = MatrixF2::identity(n);
            for a in f2::enumerate_gl_with_first_row(n, first).expect("valid row") {
                let at = a.transpose();
                let corr: f64 = labels
                    .iter()
                    .zip(r)
                    .map(|(&t, &rj)| rj * ghat[at.apply(t) as usize])
                    .sum();
                if corr > best {
                    best = corr;
                    best_m = a;
                }
            }
            (best, best_m)
        })
        .collect();
    let mut best = slices[0];
    for s in &slices[1..] {
        if s.0 > best.0 {
            best = *s;
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SieveMode {
    Implicit(SieveConfig),
    /// [`exact_sieve_debug`] in loose mode.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TesterParams {
    pub epsilon: f64,
    pub omega: f64,
    pub alpha: f64,
    /// Upper bound on `||g||_{1,alpha}`.
    pub t: f64,
    pub seed: u64,
    pub sieve: SieveMode,
}

impl TesterParams {
    pub fn new(epsilon: f64, omega: f64, alpha: f64, t: f64, seed: u64) -> Result<Self> {
        let p = Self {
            epsilon,
            omega,
            alpha,
            t,
            seed,
            sieve: SieveMode::Implicit(SieveConfig::default()),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need epsilon >= 0 and omega in (0, 1] (got {}, {})",
                self.epsilon, self.omega
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha <= self.omega / 4.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must lie in [0, omega / 4]",
                self.alpha
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t = {} must be positive",
                self.t
            )));
        }
        Ok(())
    }

    /// `theta = omega / (12 t)`.
    pub fn theta(&self) -> f64 {
        self.omega / (12.0 * self.t)
    }

    /// `m = ceil(C (t / omega)^2 ln(40 k_max))`.
    pub fn sample_count(&self) -> usize {
        let k_max = max_columns(self.theta()) as f64;
        let ratio = self.t / self.omega;
        (SAMPLE_CONSTANT * ratio * ratio * (40.0 * k_max).ln()).ceil() as usize
    }

    pub fn accept_threshold(&self) -> f64 {
        1.0 - 2.0 * self.epsilon - self.omega / 2.0
    }

    pub fn reject_threshold(&self) -> f64 {
        1.0 - 2.0 * self.epsilon - 1.5 * self.omega
    }

    /// `m` plus the sieve's worst case.
    pub fn query_budget(&self, n: usize) -> u64 {
        let m = self.sample_count() as u64;
        let sieve = match self.sieve {
            SieveMode::Implicit(cfg) => sieve_query_bound(n, self.theta(), &cfg),
            SieveMode::Exact => 1 << n,
        };
        m + sieve
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailReason {
    NoBasis,
    GapCorrelation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TesterVerdict {
    Accept,
    Reject,
    Fail(FailReason),
}

#[derive(Clone, Debug)]
pub struct TesterReport {
    pub verdict: TesterVerdict,
    pub queries: u64,
    /// `None` when no basis was found.
    pub max_correlation: Option<f64>,
    pub m: usize,
    pub k: usize,
    pub rank: usize,
    pub theta: f64,
}

/// Decides `delta_L(f, g) <= epsilon` versus `>= epsilon + omega` from
/// queries to `f`.
pub fn run_query_tester(
    oracle: &mut QueryOracle,
    g: &BooleanFunction,
    params: &TesterParams,
) -> Result<TesterReport> {
    params.validate()?;
    let n = g.n();
    if oracle.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: oracle.n(),
        });
    }
    check_dim("query tester", n, MAX_ENUM_DIM)?;
    let norm = approx_spectral_norm(g, params.alpha)?;
    if params.t < norm.value - 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "t = {} is below ||g||_(1,alpha) = {}",
            params.t, norm.value
        )));
    }
    let ghat: Vec<f64> = (0..1u32 << n)
        .map(|s| norm.witness.coefficient(s))
        .collect();

    let start = oracle.count();
    let theta = params.theta();
    let m = params.sample_count();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let points: Vec<u32> = (0..m)
        .map(|_| rng.gen::<u32>() & ((1u64 << n) - 1) as u32)
        .collect();
    let so = match params.sieve {
        SieveMode::Implicit(cfg) => implicit_sieve_with(oracle, &points, theta, &cfg, &mut rng)?,
        SieveMode::Exact => exact_sieve_debug(oracle, &points, theta, ExactSieveMode::Loose)?,
    };
    let mut report = TesterReport {
        verdict: TesterVerdict::Fail(FailReason::NoBasis),
        queries: 0,
        max_correlation: None,
        m,
        k: so.k(),
        rank: 0,
        theta,
    };
    let basis = match find_column_basis(&so.columns) {
        Ok(b) if b.rank() <= n => b,
        _ => {
            report.queries = oracle.count() - start;
            return Ok(report);
        }
    };
    report.rank = basis.rank();
    let labels = relabel_columns(&basis);
    let r = estimate_coefficients(&so);
    let (corr, _) = correlation_search(n, &labels, &r, &ghat)?;
    report.max_correlation = Some(corr);
    report.verdict = if corr >= params.accept_threshold() {
        TesterVerdict::Accept
    } else if corr <= params.reject_threshold() {
        TesterVerdict::Reject
    } else {
        TesterVerdict::Fail(FailReason::GapCorrelation)
    };
    report.queries = oracle.count() - start;
    Ok(report)
}
