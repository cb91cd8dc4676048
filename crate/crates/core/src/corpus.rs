//! Function generators, the truth-table file format, and certified promise
//! pairs for the protocol and tester harnesses.
//!
//! File format: line 1 is `n=<int>`, line 2 holds `2^n` characters from
//! `{+, -}`; the character at position `i` is the value at the point with
//! integer encoding `i`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{self, check_dim, MatrixF2, VectorF2, MAX_DIM, MAX_ENUM_DIM};
use crate::fourier::{compose, linear_distance, BooleanFunction};
use crate::Rational;

/// Draws allowed per far pair before [`build_promise_corpus`] gives up.
pub const FAR_DRAW_LIMIT: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Parity(u32),
    And,
    /// Requires odd `n`.
    Majority,
    Random(u64),
    Ball(u32),
    BallFamily(MatrixF2),
    FromFile(PathBuf),
}

impl GeneratorSpec {
    pub fn generate(&self, n: usize) -> Result<BooleanFunction> {
        match self {
            GeneratorSpec::Parity(s) => BooleanFunction::parity(n, *s),
            GeneratorSpec::And => {
                let all = (1u32 << n) - 1;
                BooleanFunction::from_predicate(n, |x| x == all)
            }
            GeneratorSpec::Majority => {
                if n.is_multiple_of(2) {
                    return Err(Error::InvalidParameter(format!(
                        "majority needs odd n, got {n}"
                    )));
                }
                BooleanFunction::from_predicate(n, |x| x.count_ones() as usize > n / 2)
            }
            GeneratorSpec::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                BooleanFunction::from_predicate(n, |_| rng.gen())
            }
            GeneratorSpec::Ball(a) => gen_ball(n, *a),
            GeneratorSpec::BallFamily(m) => {
                if m.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: m.n(),
                    });
                }
                compose(&gen_ball(n, 0)?, m)
            }
            GeneratorSpec::FromFile(path) => {
                let f = read_function_file(path)?;
                if f.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: f.n(),
                    });
                }
                Ok(f)
            }
        }
    }
}

/// Indicator of the Hamming ball of radius 1 around `a`: `-1` iff
/// `|x + a| <= 1`.
pub fn gen_ball(n: usize, a: u32) -> Result<BooleanFunction> {
    let a = VectorF2::new(n, a)?.bits();
    BooleanFunction::from_predicate(n, |x| (x ^ a).count_ones() <= 1)
}

/// Number of distinct functions `I_{1,0} o M`: the ball around 0 is fixed
/// exactly by the permutation matrices, so this is `|GL_n| / n!`.
pub fn ball_family_size(n: usize) -> BigUint {
    let fact: BigUint = (1..=n as u64).product();
    f2::gl_order(n) / fact
}

/// `count` distinct functions `I_{1,0} o M` with their matrices. The first
/// member is `I_{1,0}` itself.
pub fn gen_ball_family(
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(MatrixF2, BooleanFunction)>> {
    check_dim("ball family", n, MAX_ENUM_DIM)?;
    let available = ball_family_size(n);
    if BigUint::from(count) > available {
        return Err(Error::Refused(format!(
            "{count} members requested but only {available} distinct ones exist for n = {n}"
        )));
    }
    let base = gen_ball(n, 0)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut push = |m: MatrixF2, out: &mut Vec<(MatrixF2, BooleanFunction)>| {
        let f = compose(&base, &m).expect("invertible");
        if seen.insert(f.table().to_vec()) {
            out.push((m, f));
        }
    };
    if count == 0 {
        return Ok(out);
    }
    push(MatrixF2::identity(n), &mut out);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if BigUint::from(2 * count) > available {
        // dense request: walk the whole group in random order
        let mut all: Vec<MatrixF2> = f2::enumerate_gl(n)?.collect();
        all.shuffle(&mut rng);
        for m in all {
            if out.len() == count {
                break;
            }
            push(m, &mut out);
        }
    } else {
        while out.len() < count {
            push(f2::random_gl(n, &mut rng), &mut out);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Close,
    Far,
}

/// A pair on one side of the promise, with the exact linear distance.
#[derive(Clone, Debug)]
pub struct PromisePair {
    pub f: BooleanFunction,
    pub g: BooleanFunction,
    pub epsilon: f64,
    pub omega: f64,
    pub side: Side,
    pub certified_distance: Rational,
    /// Draws it took to find the pair.
    pub draws: usize,
}

impl PromisePair {
    /// Whether the certificate satisfies the promise for this side.
    pub fn satisfies_promise(&self) -> bool {
        let d = self.certified_distance;
        let d = *d.numer() as f64 / *d.denom() as f64;
        match self.side {
            Side::Close => d <= self.epsilon + 1e-12,
            Side::Far => d >= self.epsilon + self.omega - 1e-12,
        }
    }
}

// Random table whose density of -1 entries is itself uniform in [0, 1].
fn biased_function(n: usize, rng: &mut ChaCha8Rng) -> BooleanFunction {
    let p: f64 = rng.gen();
    BooleanFunction::from_predicate(n, |_| rng.gen_bool(p)).expect("valid n")
}

fn flip_points(f: &mut BooleanFunction, flips: usize, rng: &mut ChaCha8Rng) {
    let mut points: Vec<u32> = (0..f.len() as u32).collect();
    points.shuffle(rng);
    for &x in &points[..flips] {
        f.flip(x);
    }
}

fn close_pair(n: usize, epsilon: f64, omega: f64, rng: &mut ChaCha8Rng) -> Result<PromisePair> {
    let f = biased_function(n, rng);
    let m = f2::random_gl(n, rng);
    let mut g = compose(&f, &m)?;
    let max_flips = (epsilon * (1u32 << n) as f64).floor() as usize;
    flip_points(&mut g, rng.gen_range(0..=max_flips), rng);
    let certified_distance = linear_distance(&f, &g)?.distance;
    Ok(PromisePair {
        f,
        g,
        epsilon,
        omega,
        side: Side::Close,
        certified_distance,
        draws: 1,
    })
}

// Candidates alternate between an independent table and the negation of a
// renamed copy of f with a few flips; the latter reaches large linear
// distances that independent tables almost never do at small n.
fn far_pair(n: usize, epsilon: f64, omega: f64, rng: &mut ChaCha8Rng) -> Result<PromisePair> {
    let target = epsilon + omega;
    let size = 1usize << n;
    let mut f = biased_function(n, rng);
    for draw in 1..=FAR_DRAW_LIMIT {
        if draw % 20 == 0 {
            f = biased_function(n, rng);
        }
        let g = if draw % 2 == 1 {
            biased_function(n, rng)
        } else {
            let mut g = compose(&f, &f2::random_gl(n, rng))?.negate();
            flip_points(&mut g, rng.gen_range(0..=size / 8), rng);
            g
        };
        let d = linear_distance(&f, &g)?.distance;
        if *d.numer() as f64 >= (target - 1e-12) * *d.denom() as f64 {
            return Ok(PromisePair {
                f,
                g,
                epsilon,
                omega,
                side: Side::Far,
                certified_distance: d,
                draws: draw,
            });
        }
    }
    Err(Error::Refused(format!(
        "no pair with linear distance >= {target} in {FAR_DRAW_LIMIT} draws at n = {n}"
    )))
}

/// `per_side` close pairs followed by `per_side` far pairs, every one
/// certified by the exact linear distance. Deterministic in `seed`.
pub fn build_promise_corpus(
    n: usize,
    epsilon: f64,
    omega: f64,
    per_side: usize,
    seed: u64,
) -> Result<Vec<PromisePair>> {
    if !(1..=4).contains(&n) {
        return Err(Error::DimensionOutOfRange {
            what: "promise corpus",
            n,
            min: 1,
            max: 4,
        });
    }
    if !(epsilon >= 0.0 && omega > 0.0 && epsilon + omega <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need epsilon >= 0, omega > 0, epsilon + omega <= 1 (got {epsilon}, {omega})"
        )));
    }
    (0..2 * per_side)
        .into_par_iter()
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            if i < per_side {
                close_pair(n, epsilon, omega, &mut rng)
            } else {
                far_pair(n, epsilon, omega, &mut rng)
            }
        })
        .collect()
}

/// Renders `f` in the file format, trailing newline included.
pub fn format_function(f: &BooleanFunction) -> String {
    let mut out = String::with_capacity(f.len() + 8);
    writeln!(out, "n={}", f.n()).expect("writing to a string");
    for &v in f.table() {
        out.push(if v > 0 { '+' } else { '-' });
    }
    out.push('\n');
    out
}

pub fn parse_function(text: &str) -> Result<BooleanFunction> {
    let err = |line, column, msg: String| Error::Parse { line, column, msg };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| err(1, 1, "empty input".into()))?;
    let digits = header
        .strip_prefix("n=")
        .ok_or_else(|| err(1, 1, format!("expected `n=<int>`, found {header:?}")))?;
    let n: usize = digits
        .parse()
        .map_err(|_| err(1, 3, format!("invalid dimension {digits:?}")))?;
    if n == 0 || n > MAX_DIM {
        return Err(err(1, 3, format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    let body = lines
        .next()
        .ok_or_else(|| err(2, 1, "missing truth table".into()))?;
    let mut table = Vec::with_capacity(1 << n);
    for (i, c) in body.chars().enumerate() {
        match c {
            '+' => table.push(1),
            '-' => table.push(-1),
            other => return Err(err(2, i + 1, format!("illegal character {other:?}"))),
        }
    }
    if table.len() != 1 << n {
        return Err(err(
            2,
            table.len() + 1,
            format!(
                "table has {} entries, expected {}",
                table.len(),
                1usize << n
            ),
        ));
    }
    for (k, rest) in lines.enumerate() {
        if !rest.trim().is_empty() {
            return Err(err(3 + k, 1, "unexpected content after the table".into()));
        }
    }
    BooleanFunction::from_table(n, table)
}

pub fn read_function_file(path: impl AsRef<Path>) -> Result<BooleanFunction> {
    parse_function(&std::fs::read_to_string(path)?)
}

pub fn write_function_file(f: &BooleanFunction, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_function(f))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{spectral_norm, wht};

    #[test]
    fn ball_examples() {
        assert_eq!(
            gen_ball(1, 0).unwrap(),
            BooleanFunction::constant(1, -1).unwrap()
        );
        let b = gen_ball(4, 0).unwrap();
        assert_eq!(b.minus_count(), 5);
        assert_eq!(spectral_norm(&wht(&b)), Rational::new(7, 2));
    }

    #[test]
    fn ball_shift_is_affine() {
        for a in 0..16 {
            assert_eq!(
                gen_ball(4, a).unwrap(),
                gen_ball(4, 0).unwrap().shift(a).unwrap()
            );
        }
    }

    #[test]
    fn generators() {
        assert_eq!(
            GeneratorSpec::And.generate(2).unwrap(),
            BooleanFunction::from_predicate(2, |x| x == 3).unwrap()
        );
        let maj = GeneratorSpec::Majority.generate(3).unwrap();
        assert_eq!(maj.minus_count(), 4);
        assert_eq!(maj.value(0b011), -1);
        assert_eq!(maj.value(0b100), 1);
        assert!(GeneratorSpec::Majority.generate(4).is_err());
        assert_eq!(
            GeneratorSpec::Random(3).generate(5).unwrap(),
            GeneratorSpec::Random(3).generate(5).unwrap()
        );
        let m = MatrixF2::identity(3);
        assert_eq!(
            GeneratorSpec::BallFamily(m).generate(3).unwrap(),
            gen_ball(3, 0).unwrap()
        );
    }

    #[test]
    fn ball_family_members() {
        let fam = gen_ball_family(3, 2, 1).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[0].1, gen_ball(3, 0).unwrap());
        assert_ne!(fam[0].1, fam[1].1);
        let norm = spectral_norm(&wht(&fam[0].1));
        assert_eq!(spectral_norm(&wht(&fam[1].1)), norm);
        for (m, f) in &fam {
            assert_eq!(*f, compose(&gen_ball(3, 0).unwrap(), m).unwrap());
        }
    }

    #[test]
    fn ball_family_limits() {
        assert_eq!(ball_family_size(3), BigUint::from(28u32));
        let all = gen_ball_family(3, 28, 2).unwrap();
        assert_eq!(all.len(), 28);
        assert!(matches!(gen_ball_family(3, 29, 2), Err(Error::Refused(_))));
    }

    #[test]
    fn file_round_trip() {
        let f = GeneratorSpec::Random(9).generate(4).unwrap();
        let text = format_function(&f);
        assert_eq!(parse_function(&text).unwrap(), f);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_function_file(&f, &path).unwrap();
        assert_eq!(read_function_file(&path).unwrap(), f);
    }

    #[test]
    fn parse_index_convention() {
        let f = parse_function("n=2\n++-+\n").unwrap();
        assert_eq!(f.value(0b10), -1);
        assert_eq!(f.minus_count(), 1);
    }

    #[test]
    fn parse_errors() {
        let pos = |text: &str| match parse_function(text) {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        };
        assert_eq!(pos(""), (1, 1));
        assert_eq!(pos("m=2\n++++\n"), (1, 1));
        assert_eq!(pos("n=x\n++++\n"), (1, 3));
        assert_eq!(pos("n=2\n+++\n"), (2, 4));
        assert_eq!(pos("n=2\n+++++\n"), (2, 6));
        assert_eq!(pos("n=2\n++0+\n"), (2, 3));
        assert_eq!(pos("n=2\n"), (2, 1));
        assert_eq!(pos("n=2\n++++\nextra\n"), (3, 1));
    }

    #[test]
    fn corpus_certificates() {
        let corpus = build_promise_corpus(3, 0.1, 0.2, 5, 11).unwrap();
        assert_eq!(corpus.len(), 10);
        for (i, p) in corpus.iter().enumerate() {
            assert_eq!(p.side, if i < 5 { Side::Close } else { Side::Far });
            assert!(p.satisfies_promise());
            assert_eq!(
                linear_distance(&p.f, &p.g).unwrap().distance,
                p.certified_distance
            );
        }
        let again = build_promise_corpus(3, 0.1, 0.2, 5, 11).unwrap();
        assert!(corpus
            .iter()
            .zip(&again)
            .all(|(a, b)| a.f == b.f && a.g == b.g));
    }

    #[test]
    fn zero_flips_certify_zero() {
        let corpus = build_promise_corpus(2, 0.0, 0.5, 3, 4).unwrap();
        for p in corpus.iter().filter(|p| p.side == Side::Close) {
            assert_eq!(p.certified_distance, Rational::from_integer(0));
        }
    }

    #[test]
    fn corpus_rejects_bad_input() {
        assert!(build_promise_corpus(5, 0.1, 0.2, 1, 0).is_err());
        assert!(build_promise_corpus(3, 0.5, 0.6, 1, 0).is_err());
    }
}
