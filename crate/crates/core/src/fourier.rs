//! Truth tables, the Walsh-Hadamard transform and distances between Boolean
//! functions.
//!
//! Spectra are kept as integers scaled by `2^n`, and every distance is an
//! exact rational, so identities such as Parseval hold with equality.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{self, check_dim, MatrixF2, VectorF2, MAX_DIM, MAX_ENUM_DIM};
use crate::Rational;

/// Largest dimension for [`affine_distance`].
pub const MAX_AFFINE_DIM: usize = 4;

/// `chi_S(x) = (-1)^{<S, x>}`.
#[inline]
pub fn chi(s: u32, x: u32) -> i8 {
    if f2::dot(s, x) {
        -1
    } else {
        1
    }
}

/// [`chi`] on checked vectors.
pub fn chi_vec(s: &VectorF2, x: &VectorF2) -> Result<i8> {
    if s.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: x.dim(),
        });
    }
    Ok(chi(s.bits(), x.bits()))
}

/// A function `F_2^n -> {-1, +1}` stored as a dense truth table indexed by the
/// integer encoding of the input.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<i8>,
}

impl BooleanFunction {
    pub fn from_table(n: usize, table: Vec<i8>) -> Result<Self> {
        check_dim("boolean function", n, MAX_DIM)?;
        if table.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: table.len(),
            });
        }
        if let Some(pos) = table.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter(format!(
                "table entry {pos} is {}, expected +1 or -1",
                table[pos]
            )));
        }
        Ok(Self { n, table })
    }

    /// Builds a function from a predicate; `true` maps to `-1`.
    pub fn from_predicate(n: usize, mut is_minus: impl FnMut(u32) -> bool) -> Result<Self> {
        check_dim("boolean function", n, MAX_DIM)?;
        let table = (0..1u32 << n)
            .map(|x| if is_minus(x) { -1 } else { 1 })
            .collect();
        Ok(Self { n, table })
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        check_dim("boolean function", n, MAX_DIM)?;
        if value != 1 && value != -1 {
            return Err(Error::InvalidParameter(format!(
                "constant {value} is not +/-1"
            )));
        }
        Ok(Self {
            n,
            table: vec![value; 1 << n],
        })
    }

    /// The character `chi_S`.
    pub fn parity(n: usize, s: u32) -> Result<Self> {
        let v = VectorF2::new(n, s)?;
        Self::from_predicate(n, |x| f2::dot(v.bits(), x))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    #[inline]
    pub fn value(&self, x: u32) -> i8 {
        self.table[x as usize]
    }

    pub fn negate(&self) -> Self {
        Self {
            n: self.n,
            table: self.table.iter().map(|v| -v).collect(),
        }
    }

    /// `x -> f(x + a)`.
    pub fn shift(&self, a: u32) -> Result<Self> {
        VectorF2::new(self.n, a)?;
        Ok(Self {
            n: self.n,
            table: (0..self.len() as u32).map(|x| self.value(x ^ a)).collect(),
        })
    }

    /// Flips the value at `x`.
    pub fn flip(&mut self, x: u32) {
        self.table[x as usize] = -self.table[x as usize];
    }

    /// Number of inputs mapped to `-1`.
    pub fn minus_count(&self) -> usize {
        self.table.iter().filter(|&&v| v < 0).count()
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, ", self.n)?;
        for &v in &self.table {
            write!(f, "{}", if v > 0 { '+' } else { '-' })?;
        }
        write!(f, ")")
    }
}

/// Fourier coefficients scaled by `2^n`: `coeffs[S] = 2^n * f^(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<i64>,
}

impl Spectrum {
    pub fn new(n: usize, coeffs: Vec<i64>) -> Result<Self> {
        check_dim("spectrum", n, MAX_DIM)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: coeffs.len(),
            });
        }
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The unscaled coefficient `f^(S)`.
    pub fn coefficient(&self, s: u32) -> Rational {
        Rational::new(self.coeffs[s as usize], 1i64 << self.n)
    }

    pub fn coefficient_f64(&self, s: u32) -> f64 {
        self.coeffs[s as usize] as f64 / (1u64 << self.n) as f64
    }

    /// `sum_S coeffs[S]^2`, which equals `4^n` for a Boolean source.
    pub fn sum_of_squares(&self) -> i128 {
        self.coeffs.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    /// The spectrum as a real function with unscaled coefficients.
    pub fn to_real(&self) -> RealFunction {
        let scale = (1u64 << self.n) as f64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(s, &c)| (s as u32, c as f64 / scale))
            .collect();
        RealFunction { n: self.n, coeffs }
    }
}

/// In-place unnormalized Walsh-Hadamard butterfly.
fn butterfly<T>(data: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let len = data.len();
    let mut h = 1;
    while h < len {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// Fast Walsh-Hadamard transform: `coeffs[S] = sum_x f(x) chi_S(x)`.
pub fn wht(f: &BooleanFunction) -> Spectrum {
    let mut coeffs: Vec<i64> = f.table.iter().map(|&v| v as i64).collect();
    butterfly(&mut coeffs);
    Spectrum { n: f.n, coeffs }
}

/// Dense transform of real values; `out[S] = sum_x values[x] chi_S(x)`.
pub(crate) fn wht_f64(values: &mut [f64]) {
    butterfly(values);
}

/// Inverts [`wht`], failing when the spectrum is not that of a `+/-1` table.
pub fn inverse_wht(s: &Spectrum) -> Result<BooleanFunction> {
    let mut values = s.coeffs.clone();
    butterfly(&mut values);
    let scale = 1i64 << s.n;
    let table = values
        .iter()
        .map(|&v| match v {
            v if v == scale => Ok(1),
            v if v == -scale => Ok(-1),
            _ => Err(Error::NotBoolean),
        })
        .collect::<Result<Vec<i8>>>()?;
    Ok(BooleanFunction { n: s.n, table })
}

/// `||f||_1 = sum_S |f^(S)|`, exact.
pub fn spectral_norm(s: &Spectrum) -> Rational {
    let total: i64 = s.coeffs.iter().map(|c| c.abs()).sum();
    Rational::new(total, 1i64 << s.n)
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

fn mismatches(f: &BooleanFunction, g: &BooleanFunction) -> usize {
    f.table.iter().zip(&g.table).filter(|(a, b)| a != b).count()
}

/// Fraction of inputs on which `f` and `g` differ.
pub fn hamming_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<Rational> {
    same_dim(f.n, g.n)?;
    Ok(Rational::new(mismatches(f, g) as i64, 1i64 << f.n))
}

/// `sum_S f^(S) g^(S)`, exact. For Boolean sources this is `1 - 2 delta(f,g)`.
pub fn correlation_via_spectrum(sf: &Spectrum, sg: &Spectrum) -> Result<Rational> {
    same_dim(sf.n, sg.n)?;
    let dot: i64 = sf.coeffs.iter().zip(&sg.coeffs).map(|(a, b)| a * b).sum();
    Ok(Rational::new(dot, 1i64 << (2 * sf.n)))
}

/// `(f o M)(x) = f(Mx)`.
pub fn compose(f: &BooleanFunction, m: &MatrixF2) -> Result<BooleanFunction> {
    same_dim(f.n, m.n())?;
    if !m.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let image = m.image_table();
    Ok(BooleanFunction {
        n: f.n,
        table: image.iter().map(|&y| f.value(y)).collect(),
    })
}

/// Result of a minimization over `GL_n(F_2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMatch {
    pub distance: Rational,
    /// First minimizer in enumeration order.
    pub matrix: MatrixF2,
}

/// Result of a minimization over `GL_n(F_2) x F_2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMatch {
    pub distance: Rational,
    pub matrix: MatrixF2,
    pub shift: VectorF2,
}

// Mismatch count of x -> f(Mx + shift) against g, walking inputs in Gray
// code order so each image costs one xor. Stops early once `bound` is reached.
fn composed_mismatches(
    f: &BooleanFunction,
    g: &BooleanFunction,
    columns: &[u32],
    shift: u32,
    bound: usize,
) -> usize {
    let size = f.len() as u32;
    let mut count = 0;
    let mut image = shift;
    let mut prev_gray = 0u32;
    for i in 0..size {
        let gray = i ^ (i >> 1);
        if i > 0 {
            let changed = (gray ^ prev_gray).trailing_zeros() as usize;
            image ^= columns[changed];
        }
        prev_gray = gray;
        if f.value(image) != g.value(gray) {
            count += 1;
            if count >= bound {
                return count;
            }
        }
    }
    count
}

fn columns_of(m: &MatrixF2) -> Vec<u32> {
    (0..m.n()).map(|j| m.column(j)).collect()
}

/// `delta_L(f, g) = min_M delta(f o M, g)`, by exhaustive search over
/// `GL_n(F_2)`. Returns the first minimizer in enumeration order.
pub fn linear_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<LinearMatch> {
    same_dim(f.n, g.n)?;
    let n = f.n;
    check_dim("linear distance", n, MAX_ENUM_DIM)?;
    let slices: Vec<(usize, MatrixF2)> = (1u32..1 << n)
        .into_par_iter()
        .map(|first| {
            let mut best = usize::MAX;
            let mut best_m = MatrixF2::identity(n);
            for m in f2::enumerate_gl_with_first_row(n, first).expect("valid row") {
                let c = composed_mismatches(f, g, &columns_of(&m), 0, best);
                if c < best {
                    best = c;
                    best_m = m;
                    if best == 0 {
                        break;
                    }
                }
            }
            (best, best_m)
        })
        .collect();
    // slices are in enumeration order; min_by_key keeps the first minimum
    let (count, matrix) = slices
        .into_iter()
        .min_by_key(|(c, _)| *c)
        .expect("GL_n is non-empty");
    Ok(LinearMatch {
        distance: Rational::new(count as i64, 1i64 << n),
        matrix,
    })
}

/// Minimum of `delta(x -> f(Mx + a), g)` over invertible `M` and shifts `a`.
pub fn affine_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<AffineMatch> {
    same_dim(f.n, g.n)?;
    let n = f.n;
    check_dim("affine distance", n, MAX_AFFINE_DIM)?;
    let mut best = usize::MAX;
    let mut best_m = MatrixF2::identity(n);
    let mut best_a = 0u32;
    'outer: for m in f2::enumerate_gl(n)? {
        let cols = columns_of(&m);
        for a in 0..1u32 << n {
            let c = composed_mismatches(f, g, &cols, a, best);
            if c < best {
                best = c;
                best_m = m;
                best_a = a;
                if best == 0 {
                    break 'outer;
                }
            }
        }
    }
    Ok(AffineMatch {
        distance: Rational::new(best as i64, 1i64 << n),
        matrix: best_m,
        shift: VectorF2::from_raw(n, best_a),
    })
}

/// A real valued function given by a sparse Fourier expansion
/// `p(x) = sum_S coeffs[S] chi_S(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFunction {
    n: usize,
    coeffs: BTreeMap<u32, f64>,
}

impl RealFunction {
    pub fn new(n: usize, coeffs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        check_dim("real function", n, MAX_DIM)?;
        let mut map = BTreeMap::new();
        for (s, c) in coeffs {
            VectorF2::new(n, s)?;
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coefficient of {s:#x} is {c}"
                )));
            }
            if c != 0.0 {
                *map.entry(s).or_insert(0.0) += c;
            }
        }
        map.retain(|_, c| *c != 0.0);
        Ok(Self { n, coeffs: map })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.coeffs
    }

    pub fn coefficient(&self, s: u32) -> f64 {
        self.coeffs.get(&s).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: u32) -> f64 {
        self.coeffs
            .iter()
            .map(|(&s, &c)| c * chi(s, x) as f64)
            .sum()
    }

    /// Values at every point, indexed by the input encoding.
    pub fn evaluate_all(&self) -> Vec<f64> {
        let mut dense = vec![0.0; 1 << self.n];
        for (&s, &c) in &self.coeffs {
            dense[s as usize] = c;
        }
        wht_f64(&mut dense);
        dense
    }

    /// `||p||_1`, the sum of absolute coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    /// `x -> p(Mx)`, whose coefficient at `M^T S` is `p^(S)`.
    pub fn compose(&self, m: &MatrixF2) -> Result<RealFunction> {
        same_dim(self.n, m.n())?;
        let t = m.transpose();
        RealFunction::new(self.n, self.coeffs.iter().map(|(&s, &c)| (t.apply(s), c)))
    }
}

/// Pointwise sign of `p`, with `sign(0) = +1`.
pub fn sign_function(p: &RealFunction) -> BooleanFunction {
    // exact pointwise sums keep ties at zero exactly zero
    let table = (0..1u32 << p.n)
        .map(|x| if p.eval(x) < 0.0 { -1 } else { 1 })
        .collect();
    BooleanFunction { n: p.n, table }
}

/// Sign of an integer-weighted sum of characters, with `sign(0) = +1`.
pub fn sign_of_weighted_parities(n: usize, terms: &[(u32, i64)]) -> Result<BooleanFunction> {
    check_dim("boolean function", n, MAX_DIM)?;
    let mut dense = vec![0i64; 1 << n];
    for &(s, w) in terms {
        VectorF2::new(n, s)?;
        dense[s as usize] += w;
    }
    butterfly(&mut dense);
    Ok(BooleanFunction {
        n,
        table: dense.iter().map(|&v| if v < 0 { -1 } else { 1 }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn and2() -> BooleanFunction {
        BooleanFunction::from_predicate(2, |x| x == 0b11).unwrap()
    }

    fn random_fn(n: usize, rng: &mut ChaCha8Rng) -> BooleanFunction {
        BooleanFunction::from_predicate(n, |_| rng.gen()).unwrap()
    }

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    // direct O(4^n) transform
    fn naive_wht(f: &BooleanFunction) -> Vec<i64> {
        (0..f.len() as u32)
            .map(|s| {
                (0..f.len() as u32)
                    .map(|x| (f.value(x) * chi(s, x)) as i64)
                    .sum()
            })
            .collect()
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(0, 0b1011), 1);
        assert_eq!(chi(0b1, 0b1), -1);
        assert_eq!(chi(0b11, 0b11), 1);
        let s = VectorF2::new(2, 1).unwrap();
        let x = VectorF2::new(3, 1).unwrap();
        assert!(chi_vec(&s, &x).is_err());
    }

    #[test]
    fn wht_examples() {
        let one = BooleanFunction::constant(3, 1).unwrap();
        let s = wht(&one);
        assert_eq!(s.coeffs()[0], 8);
        assert!(s.coeffs()[1..].iter().all(|&c| c == 0));

        let p = BooleanFunction::parity(3, 0b110).unwrap();
        let s = wht(&p);
        for (i, &c) in s.coeffs().iter().enumerate() {
            assert_eq!(c, if i == 0b110 { 8 } else { 0 });
        }

        assert_eq!(wht(&and2()).coeffs(), &[2, 2, 2, -2]);
        assert_eq!(naive_wht(&and2()), vec![2, 2, 2, -2]);
    }

    #[test]
    fn wht_matches_naive_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=6 {
            let f = random_fn(n, &mut rng);
            assert_eq!(wht(&f).coeffs(), naive_wht(&f).as_slice());
        }
    }

    #[test]
    fn inverse_wht_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let f = random_fn(n, &mut rng);
            assert_eq!(inverse_wht(&wht(&f)).unwrap(), f);
        }
        let mut c = vec![0i64; 8];
        c[0] = 8;
        let s = Spectrum::new(3, c).unwrap();
        assert_eq!(
            inverse_wht(&s).unwrap(),
            BooleanFunction::constant(3, 1).unwrap()
        );
        let zero = Spectrum::new(3, vec![0; 8]).unwrap();
        assert_eq!(inverse_wht(&zero), Err(Error::NotBoolean));
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(
            spectral_norm(&wht(&BooleanFunction::parity(4, 5).unwrap())),
            r(1, 1)
        );
        assert_eq!(spectral_norm(&wht(&and2())), r(2, 1));
        let ball = BooleanFunction::from_predicate(4, |x| x.count_ones() <= 1).unwrap();
        assert_eq!(spectral_norm(&wht(&ball)), r(7, 2));
    }

    #[test]
    fn distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_fn(4, &mut rng);
        assert_eq!(hamming_distance(&f, &f).unwrap(), r(0, 1));
        assert_eq!(hamming_distance(&f, &f.negate()).unwrap(), r(1, 1));
        let x1 = BooleanFunction::parity(2, 0b01).unwrap();
        let x2 = BooleanFunction::parity(2, 0b10).unwrap();
        assert_eq!(hamming_distance(&x1, &x2).unwrap(), r(1, 2));
        let other = random_fn(3, &mut rng);
        assert!(hamming_distance(&f, &other).is_err());
    }

    #[test]
    fn correlation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_fn(5, &mut rng);
        let sf = wht(&f);
        assert_eq!(correlation_via_spectrum(&sf, &sf).unwrap(), r(1, 1));
        assert_eq!(
            correlation_via_spectrum(&sf, &wht(&f.negate())).unwrap(),
            r(-1, 1)
        );
        let x1 = wht(&BooleanFunction::parity(2, 0b01).unwrap());
        let x2 = wht(&BooleanFunction::parity(2, 0b10).unwrap());
        assert_eq!(correlation_via_spectrum(&x1, &x2).unwrap(), r(0, 1));
    }

    #[test]
    fn compose_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_fn(3, &mut rng);
        assert_eq!(compose(&f, &MatrixF2::identity(3)).unwrap(), f);

        for _ in 0..20 {
            let m = f2::random_gl(3, &mut rng);
            let t = rng.gen_range(0..8u32);
            let composed = compose(&BooleanFunction::parity(3, t).unwrap(), &m).unwrap();
            let expected = BooleanFunction::parity(3, m.transpose().apply(t)).unwrap();
            assert_eq!(composed, expected);
        }

        let swap = MatrixF2::from_rows(2, &[0b10, 0b01]).unwrap();
        assert_eq!(compose(&and2(), &swap).unwrap(), and2());

        assert_eq!(compose(&f, &MatrixF2::zero(3)), Err(Error::NotInvertible));
    }

    #[test]
    fn linear_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_fn(3, &mut rng);
        let m = f2::random_gl(3, &mut rng);
        let g = compose(&f, &m).unwrap();
        assert_eq!(linear_distance(&f, &g).unwrap().distance, r(0, 1));

        let x1 = BooleanFunction::parity(2, 0b01).unwrap();
        let x12 = BooleanFunction::parity(2, 0b11).unwrap();
        assert_eq!(linear_distance(&x1, &x12).unwrap().distance, r(0, 1));
        assert_eq!(
            linear_distance(&x1, &x1.negate()).unwrap().distance,
            r(1, 2)
        );

        let big = random_fn(6, &mut rng);
        assert!(matches!(
            linear_distance(&big, &big),
            Err(Error::DimensionOutOfRange { .. })
        ));
    }

    #[test]
    fn linear_distance_reports_first_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let f = random_fn(3, &mut rng);
            let g = random_fn(3, &mut rng);
            let found = linear_distance(&f, &g).unwrap();
            let mut best: Option<(Rational, MatrixF2)> = None;
            for m in f2::enumerate_gl(3).unwrap() {
                let d = hamming_distance(&compose(&f, &m).unwrap(), &g).unwrap();
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, m));
                }
            }
            let (d, m) = best.unwrap();
            assert_eq!(found.distance, d);
            assert_eq!(found.matrix, m);
        }
    }

    #[test]
    fn affine_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_fn(4, &mut rng);
        let shifted = f.shift(0b1010).unwrap();
        assert_eq!(affine_distance(&f, &shifted).unwrap().distance, r(0, 1));

        let x1 = BooleanFunction::parity(2, 0b01).unwrap();
        let m = affine_distance(&x1, &x1.negate()).unwrap();
        assert_eq!(m.distance, r(0, 1));

        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let f = random_fn(n, &mut rng);
            let g = random_fn(n, &mut rng);
            let a = affine_distance(&f, &g).unwrap();
            assert!(a.distance <= linear_distance(&f, &g).unwrap().distance);
            // the reported pair attains the distance
            let mapped = BooleanFunction::from_predicate(n, |x| {
                f.value(a.matrix.apply(x) ^ a.shift.bits()) < 0
            })
            .unwrap();
            assert_eq!(hamming_distance(&mapped, &g).unwrap(), a.distance);
        }

        let big = random_fn(5, &mut rng);
        assert!(affine_distance(&big, &big).is_err());
    }

    #[test]
    fn sign_function_examples() {
        let p = RealFunction::new(3, [(0b101, 0.5)]).unwrap();
        assert_eq!(
            sign_function(&p),
            BooleanFunction::parity(3, 0b101).unwrap()
        );
        assert_eq!(
            sign_function(&RealFunction::zero(2)),
            BooleanFunction::constant(2, 1).unwrap()
        );
        let p = RealFunction::new(2, [(0b01, 1.0), (0b10, 1.0), (0b11, -1.0)]).unwrap();
        let values: Vec<f64> = (0..4).map(|x| p.eval(x)).collect();
        assert_eq!(values, vec![1.0, 1.0, 1.0, -3.0]);
        assert_eq!(sign_function(&p), and2());
    }

    #[test]
    fn weighted_parities_agree_with_sign_function() {
        let terms = [(0b01u32, 1i64), (0b10, 1), (0b11, -1)];
        assert_eq!(sign_of_weighted_parities(2, &terms).unwrap(), and2());
        // tie at zero everywhere
        let tie = [(0b01u32, 1i64), (0b01, -1)];
        assert_eq!(
            sign_of_weighted_parities(2, &tie).unwrap(),
            BooleanFunction::constant(2, 1).unwrap()
        );
    }

    #[test]
    fn evaluate_all_matches_pointwise() {
        let p = RealFunction::new(3, [(0, 0.25), (0b011, -0.5), (0b110, 1.5)]).unwrap();
        let dense = p.evaluate_all();
        for x in 0..8u32 {
            assert!((dense[x as usize] - p.eval(x)).abs() < 1e-12);
        }
    }
}
