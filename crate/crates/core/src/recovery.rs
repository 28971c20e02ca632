//! Greedy sparse recovery: least squares on a fixed support, OMP (cold or
//! warm-started) and centralized SOMP.
//!
//! All selections break ties towards the lowest atom index and compare
//! magnitudes exactly, so every kernel is deterministic for fixed inputs.

use crate::signal_model::SupportSet;
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Estimated support `Ŝ`, kept sorted by atom index.
pub type SupportEstimate = SupportSet;

/// Relative column-norm threshold below which a column is treated as lying
/// in the span of the columns before it.
const RANK_TOL: f64 = 1e-10;
/// Residual level, relative to `‖y‖`, at which greedy selection stops.
const RESIDUAL_TOL: f64 = 1e-12;

/// Support, fitted coefficients and fit quality.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub support: SupportEstimate,
    /// Coefficients aligned with `support`.
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    /// The selected columns were (numerically) rank deficient; the
    /// coefficients are the minimum-norm least-squares solution.
    pub degenerate: bool,
    /// The residual vanished before the target sparsity and the support was
    /// padded with the lowest-index unused atoms.
    pub filled: bool,
}

impl RecoveryResult {
    /// Dense `L̂`-length coefficient vector.
    pub fn dense(&self, num_atoms: usize) -> CVector {
        let mut w = CVector::zeros(num_atoms);
        for (&idx, &v) in self.support.iter().zip(&self.coefficients) {
            w[idx] = v;
        }
        w
    }
}

/// What greedy selection does when the residual vanishes early.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Completion {
    /// Pad with lowest-index unused atoms so exactly `L` indices come back.
    #[default]
    Exact,
    /// Return the shorter support.
    StopEarly,
}

fn check_support(support: &SupportSet, num_atoms: usize) -> Result<()> {
    match support.iter().last() {
        Some(&max) if max >= num_atoms => Err(Error::Dimension(format!(
            "support index {max} out of range for {num_atoms} atoms"
        ))),
        _ => Ok(()),
    }
}

fn check_measurement(a: &CMatrix, y: &CVector) -> Result<()> {
    if a.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "sensing matrix has {} rows, measurement has {} entries",
            a.nrows(),
            y.len()
        )));
    }
    Ok(())
}

/// Householder reflector annihilating `x[1..]`. Returns `(v, beta, alpha)`
/// with `(I - beta v vᴴ) x = alpha e₁`.
fn householder(x: &[Complex64]) -> (Vec<Complex64>, f64, Complex64) {
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (vec![Complex64::new(0.0, 0.0); x.len()], 0.0, Complex64::new(0.0, 0.0));
    }
    let phase = if x[0].norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        x[0] / x[0].norm()
    };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    (v, 2.0 / vnorm2, alpha)
}

fn apply_reflector(v: &[Complex64], beta: f64, target: &mut [Complex64]) {
    let dot: Complex64 = v.iter().zip(target.iter()).map(|(vi, ti)| vi.conj() * ti).sum();
    let scale = dot * beta;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= vi * scale;
    }
}

/// Solves `min_x ‖y − A_S x‖₂` over the columns of `A` indexed by `support`.
///
/// Uses a Householder QR of `A_S`. When `A_S` is numerically rank deficient
/// (or has more columns than rows) the minimum-norm solution is returned
/// and `degenerate` is set.
pub fn least_squares_on_support(a: &CMatrix, y: &CVector, support: &SupportEstimate) -> Result<RecoveryResult> {
    check_measurement(a, y)?;
    check_support(support, a.ncols())?;
    let m = a.nrows();
    let s = support.len();
    if s == 0 {
        return Ok(RecoveryResult {
            support: support.clone(),
            coefficients: Vec::new(),
            residual_norm: y.norm(),
            degenerate: false,
            filled: false,
        });
    }

    let a_s = a.select_columns(support.as_slice());
    let max_col = a_s.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut degenerate = s > m || max_col == 0.0;
    let mut coefficients = Vec::new();

    if !degenerate {
        // Columns of `r` hold A_S in column-major order; factor in place.
        let mut r: Vec<Vec<Complex64>> = a_s.column_iter().map(|c| c.iter().copied().collect()).collect();
        let mut b: Vec<Complex64> = y.iter().copied().collect();
        for j in 0..s {
            let (v, beta, alpha) = householder(&r[j][j..]);
            if alpha.norm() <= RANK_TOL * max_col {
                degenerate = true;
                break;
            }
            for col in r.iter_mut().skip(j + 1) {
                apply_reflector(&v, beta, &mut col[j..]);
            }
            apply_reflector(&v, beta, &mut b[j..]);
            r[j][j] = alpha;
        }
        if !degenerate {
            let mut x = vec![Complex64::new(0.0, 0.0); s];
            for i in (0..s).rev() {
                let mut acc = b[i];
                for (j, xj) in x.iter().enumerate().skip(i + 1) {
                    acc -= r[j][i] * xj;
                }
                x[i] = acc / r[i][i];
            }
            coefficients = x;
        }
    }

    if degenerate {
        let svd = a_s.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let x = svd
            .solve(y, RANK_TOL * sigma_max.max(f64::MIN_POSITIVE))
            .map_err(|e| Error::Dimension(e.to_string()))?;
        coefficients = x.iter().copied().collect();
    }

    let fitted = &a_s * CVector::from_column_slice(&coefficients);
    Ok(RecoveryResult {
        support: support.clone(),
        coefficients,
        residual_norm: (y - fitted).norm(),
        degenerate,
        filled: false,
    })
}

/// Orthonormal basis of the selected columns, grown one column at a time by
/// Gram-Schmidt with one re-orthogonalisation pass.
struct Projector {
    basis: Vec<CVector>,
    degenerate: bool,
}

impl Projector {
    fn new() -> Self {
        Self {
            basis: Vec::new(),
            degenerate: false,
        }
    }

    /// Adds `column` and returns the new basis vector, or `None` if it lies
    /// in the current span.
    fn push(&mut self, column: CVector) -> Option<&CVector> {
        let norm0 = column.norm();
        let mut v = column;
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.dotc(&v);
                v.axpy(-c, q, Complex64::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if norm <= RANK_TOL * norm0 || norm == 0.0 {
            self.degenerate = true;
            return None;
        }
        v.unscale_mut(norm);
        self.basis.push(v);
        self.basis.last()
    }
}

fn deflate(residual: &mut CVector, q: &CVector) {
    let c = q.dotc(residual);
    residual.axpy(-c, q, Complex64::new(1.0, 0.0));
}

/// Index of the largest score among atoms not yet selected; lowest index on
/// ties.
fn argmax_unselected(scores: impl Iterator<Item = f64>, selected: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if selected[i] {
            continue;
        }
        match best {
            Some((_, b)) if !(s > b) => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

fn fill_lowest(support: &mut SupportSet, selected: &mut [bool], target: usize) {
    for (i, sel) in selected.iter_mut().enumerate() {
        if support.len() >= target {
            break;
        }
        if !*sel {
            *sel = true;
            support.insert(i);
        }
    }
}

fn check_sparsity(sparsity: usize, num_atoms: usize, initial: &SupportSet) -> Result<()> {
    if sparsity > num_atoms {
        return Err(Error::Config(format!(
            "target sparsity {sparsity} exceeds the {num_atoms} atoms"
        )));
    }
    if initial.len() > sparsity {
        return Err(Error::Config(format!(
            "initial support has {} indices, more than the target sparsity {sparsity}",
            initial.len()
        )));
    }
    check_support(initial, num_atoms)
}

/// Orthogonal matching pursuit to exactly `sparsity` atoms, starting from
/// `initial` (pass an empty set for a cold start).
pub fn omp(a: &CMatrix, y: &CVector, sparsity: usize, initial: &SupportEstimate) -> Result<RecoveryResult> {
    omp_with(a, y, sparsity, initial, Completion::Exact)
}

/// [`omp`] with explicit control over early termination.
pub fn omp_with(
    a: &CMatrix,
    y: &CVector,
    sparsity: usize,
    initial: &SupportEstimate,
    completion: Completion,
) -> Result<RecoveryResult> {
    check_measurement(a, y)?;
    check_sparsity(sparsity, a.ncols(), initial)?;

    let y_norm = y.norm();
    let mut selected = vec![false; a.ncols()];
    let mut support = initial.clone();
    let mut projector = Projector::new();
    let mut residual = y.clone();
    let mut filled = false;

    for &idx in initial {
        selected[idx] = true;
        if let Some(q) = projector.push(a.column(idx).into_owned()) {
            deflate(&mut residual, q);
        }
    }

    while support.len() < sparsity {
        if residual.norm() < RESIDUAL_TOL * y_norm {
            if completion == Completion::Exact {
                fill_lowest(&mut support, &mut selected, sparsity);
                filled = true;
            }
            break;
        }
        let correlations = a.ad_mul(&residual);
        let Some(best) = argmax_unselected(correlations.iter().map(|c| c.norm()), &selected) else {
            break;
        };
        selected[best] = true;
        support.insert(best);
        if let Some(q) = projector.push(a.column(best).into_owned()) {
            deflate(&mut residual, q);
        }
    }

    let mut result = least_squares_on_support(a, y, &support)?;
    result.degenerate |= projector.degenerate;
    result.filled = filled;
    Ok(result)
}

/// Output of [`somp`]: one shared support and each user's fit on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SompResult {
    pub support: SupportEstimate,
    pub per_user: Vec<RecoveryResult>,
}

/// Simultaneous OMP over the measurements of every user, all observed
/// through the same sensing matrix. Each step picks the atom maximising
/// `Σ_k |aᵢᴴ r_k|`.
pub fn somp(a: &CMatrix, ys: &[CVector], sparsity: usize) -> Result<SompResult> {
    if ys.is_empty() {
        return Err(Error::Config("SOMP needs at least one user".into()));
    }
    for y in ys {
        check_measurement(a, y)?;
    }
    check_sparsity(sparsity, a.ncols(), &SupportSet::new())?;

    let total_norm: f64 = ys.iter().map(|y| y.norm()).sum();
    let mut residuals = CMatrix::from_columns(ys);
    let mut selected = vec![false; a.ncols()];
    let mut support = SupportSet::new();
    let mut projector = Projector::new();
    let mut filled = false;

    while support.len() < sparsity {
        let residual_sum: f64 = residuals.column_iter().map(|r| r.norm()).sum();
        if residual_sum < RESIDUAL_TOL * total_norm {
            fill_lowest(&mut support, &mut selected, sparsity);
            filled = true;
            break;
        }
        let correlations = a.ad_mul(&residuals);
        let scores = correlations.row_iter().map(|row| row.iter().map(|c| c.norm()).sum::<f64>());
        let Some(best) = argmax_unselected(scores, &selected) else {
            break;
        };
        selected[best] = true;
        support.insert(best);
        if let Some(q) = projector.push(a.column(best).into_owned()) {
            for mut r in residuals.column_iter_mut() {
                let c = q.dotc(&r);
                r.axpy(-c, q, Complex64::new(1.0, 0.0));
            }
        }
    }

    let per_user = ys
        .iter()
        .map(|y| {
            let mut res = least_squares_on_support(a, y, &support)?;
            res.degenerate |= projector.degenerate;
            res.filled = filled;
            Ok(res)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SompResult { support, per_user })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_model::complex_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMatrix {
        CMatrix::from_fn(m, n, |_, _| complex_normal(rng, 1.0))
    }

    fn normalized_columns(mut a: CMatrix) -> CMatrix {
        for mut col in a.column_iter_mut() {
            let n = col.norm();
            col.unscale_mut(n);
        }
        a
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn empty_support_returns_measurement_as_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 6, 10);
        let y = CVector::from_fn(6, |_, _| complex_normal(&mut rng, 1.0));
        let r = least_squares_on_support(&a, &y, &SupportSet::new()).unwrap();
        assert!(r.coefficients.is_empty());
        assert_eq!(r.residual_norm, y.norm());
    }

    #[test]
    fn consistent_system_solved_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 20, 30);
        let s = SupportSet::from([2, 11, 19, 25]);
        let x0: Vec<Complex64> = (0..4).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let y = a.select_columns(s.as_slice()) * CVector::from_column_slice(&x0);
        let r = least_squares_on_support(&a, &y, &s).unwrap();
        for (got, want) in r.coefficients.iter().zip(&x0) {
            assert!((got - want).norm() < 1e-10);
        }
        assert!(!r.degenerate);
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 20, 5);
        let y = CVector::from_fn(20, |_, _| complex_normal(&mut rng, 1.0));
        let s = SupportSet::from([0, 1, 2, 3, 4]);
        let r = least_squares_on_support(&a, &y, &s).unwrap();
        let gram = a.ad_mul(&a);
        let oracle = gram.try_inverse().unwrap() * a.ad_mul(&y);
        for (got, want) in r.coefficients.iter().zip(oracle.iter()) {
            assert!((got - want).norm() < 1e-8);
        }
    }

    #[test]
    fn residual_is_orthogonal_to_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 15, 40);
            let y = CVector::from_fn(15, |_, _| complex_normal(&mut rng, 3.0));
            let s: SupportSet = rand::seq::index::sample(&mut rng, 40, 6).into_iter().collect();
            let r = least_squares_on_support(&a, &y, &s).unwrap();
            let resid = &y - a.select_columns(s.as_slice()) * CVector::from_column_slice(&r.coefficients);
            for &i in &s {
                assert!(a.column(i).dotc(&resid).norm() <= 1e-8 * y.norm());
            }
        }
    }

    #[test]
    fn rank_deficient_support_gives_min_norm_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = random_matrix(&mut rng, 8, 4);
        let dup = a.column(0).into_owned();
        a.set_column(3, &dup);
        let y = CVector::from_fn(8, |_, _| complex_normal(&mut rng, 1.0));
        let s = SupportSet::from([0, 1, 2, 3]);
        let r = least_squares_on_support(&a, &y, &s).unwrap();
        assert!(r.degenerate);
        // Minimum norm splits the duplicated column's weight evenly.
        assert!((r.coefficients[0] - r.coefficients[3]).norm() < 1e-9);
        let full = least_squares_on_support(&a, &y, &SupportSet::from([0, 1, 2])).unwrap();
        assert!((r.residual_norm - full.residual_norm).abs() < 1e-9);
        assert!((r.coefficients[0] * 2.0 - full.coefficients[0]).norm() < 1e-9);
    }

    #[test]
    fn wide_support_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 3, 6);
        let y = CVector::from_fn(3, |_, _| complex_normal(&mut rng, 1.0));
        let r = least_squares_on_support(&a, &y, &SupportSet::from([0, 1, 2, 3])).unwrap();
        assert!(r.degenerate);
        assert!(r.residual_norm < 1e-10);
    }

    #[test]
    fn one_sparse_exact_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = normalized_columns(random_matrix(&mut rng, 12, 30));
        let y = a.column(5) * c(3.0);
        let r = omp(&a, &y, 1, &SupportSet::new()).unwrap();
        assert_eq!(r.support.as_slice(), &[5]);
        assert!((r.coefficients[0] - c(3.0)).norm() < 1e-12);
    }

    #[test]
    fn warm_start_from_true_support_is_saturated() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 12, 30);
        let s = SupportSet::from([4, 9, 22]);
        let y = a.select_columns(s.as_slice()) * CVector::from_column_slice(&[c(1.0), c(-2.0), c(0.5)]);
        let r = omp(&a, &y, 3, &s).unwrap();
        assert_eq!(r.support, s);
        assert!(r.residual_norm < 1e-10 * y.norm());
        assert!(!r.filled);
    }

    #[test]
    fn early_residual_fills_or_stops() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 12, 30);
        let y = a.column(7) * c(2.0);
        let exact = omp(&a, &y, 3, &SupportSet::new()).unwrap();
        assert!(exact.filled);
        assert_eq!(exact.support.as_slice(), &[0, 1, 7]);
        let short = omp_with(&a, &y, 3, &SupportSet::new(), Completion::StopEarly).unwrap();
        assert_eq!(short.support.as_slice(), &[7]);
        assert!(!short.filled);
    }

    #[test]
    fn zero_measurement_breaks_ties_low() {
        let a = CMatrix::identity(4, 6);
        let y = CVector::zeros(4);
        let r = omp(&a, &y, 2, &SupportSet::new()).unwrap();
        assert_eq!(r.support.as_slice(), &[0, 1]);
    }

    #[test]
    fn invalid_omp_inputs() {
        let a = CMatrix::identity(4, 6);
        let y = CVector::zeros(4);
        assert!(omp(&a, &y, 7, &SupportSet::new()).is_err());
        assert!(omp(&a, &y, 1, &SupportSet::from([0, 1])).is_err());
        assert!(omp(&a, &y, 2, &SupportSet::from([9])).is_err());
        assert!(omp(&a, &CVector::zeros(3), 1, &SupportSet::new()).is_err());
        assert!(somp(&a, &[], 1).is_err());
    }

    #[test]
    fn residual_never_increases_and_no_reselection() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = normalized_columns(random_matrix(&mut rng, 16, 50));
        let y = CVector::from_fn(16, |_, _| complex_normal(&mut rng, 1.0));
        let mut prev = f64::INFINITY;
        let mut last = SupportSet::new();
        for l in 1..=8 {
            let r = omp(&a, &y, l, &SupportSet::new()).unwrap();
            assert_eq!(r.support.len(), l);
            assert!(last.is_subset(&r.support));
            assert!(r.residual_norm <= prev + 1e-12);
            for &i in &r.support {
                let resid = &y - a.select_columns(r.support.as_slice())
                    * CVector::from_column_slice(&r.coefficients);
                assert!(a.column(i).dotc(&resid).norm() <= 1e-8 * y.norm());
            }
            prev = r.residual_norm;
            last = r.support;
        }
    }

    #[test]
    fn somp_single_user_is_omp() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = normalized_columns(random_matrix(&mut rng, 10, 40));
            let y = CVector::from_fn(10, |_, _| complex_normal(&mut rng, 1.0));
            let single = omp(&a, &y, 4, &SupportSet::new()).unwrap();
            let joint = somp(&a, std::slice::from_ref(&y), 4).unwrap();
            assert_eq!(joint.support, single.support);
            assert_eq!(joint.per_user[0], single);
        }
    }

    #[test]
    fn somp_recovers_shared_support_when_omp_does() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = normalized_columns(random_matrix(&mut rng, 20, 60));
        let truth = SupportSet::from([3, 17, 31, 44, 58]);
        let ys: Vec<CVector> = (0..10)
            .map(|_| {
                let x: Vec<Complex64> = (0..5).map(|_| complex_normal(&mut rng, 1.0)).collect();
                a.select_columns(truth.as_slice()) * CVector::from_column_slice(&x)
            })
            .collect();
        let omp_all_exact = ys
            .iter()
            .all(|y| omp(&a, y, 5, &SupportSet::new()).unwrap().support == truth);
        let joint = somp(&a, &ys, 5).unwrap();
        if omp_all_exact {
            assert_eq!(joint.support, truth);
        }
        assert_eq!(joint.support, truth);
        for r in &joint.per_user {
            assert!(r.residual_norm < 1e-10);
        }
    }
}
