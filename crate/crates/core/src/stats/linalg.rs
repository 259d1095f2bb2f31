//! Householder QR for tall column-major systems.
//!
//! Columns are processed in their given order without pivoting. A column whose
//! remaining norm (after projecting out the columns already accepted) falls
//! below `RANK_TOL` times its original norm is declared dependent and left out
//! of the factorization, which lets callers either report the dependency or
//! simply work with the kept subset.

pub(crate) const RANK_TOL: f64 = 1e-10;

pub(crate) struct Qr {
    /// Indices (into the input columns) that entered the factorization.
    pub kept: Vec<usize>,
    /// Dependent input columns, each with the kept columns it is a
    /// combination of.
    pub dependent: Vec<(usize, Vec<usize>)>,
    /// Upper-triangular factor, `kept.len()` square, row-major.
    pub r: Vec<Vec<f64>>,
    reflectors: Vec<Vec<f64>>,
}

fn norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow on large housing values.
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Applies `I - 2 v vᵀ / vᵀv` (v unit-normalised already) to `z[k..]`.
fn reflect(v: &[f64], k: usize, z: &mut [f64]) {
    let tail = &mut z[k..];
    let s = 2.0 * dot(v, tail);
    for (zi, vi) in tail.iter_mut().zip(v) {
        *zi -= s * vi;
    }
}

impl Qr {
    pub fn decompose(columns: &[&[f64]]) -> Qr {
        let n = columns.first().map_or(0, |c| c.len());
        let mut work: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();
        let orig_norms: Vec<f64> = columns.iter().map(|c| norm(c)).collect();
        let mut qr = Qr {
            kept: Vec::new(),
            dependent: Vec::new(),
            r: Vec::new(),
            reflectors: Vec::new(),
        };

        for j in 0..work.len() {
            let k = qr.kept.len();
            let tail_norm = if k < n { norm(&work[j][k..]) } else { 0.0 };
            if orig_norms[j] == 0.0 || tail_norm <= RANK_TOL * orig_norms[j] {
                let coefs = qr.solve_r(&work[j][..k]);
                let scale = coefs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                let combo = coefs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| scale > 0.0 && c.abs() > 1e-8 * scale)
                    .map(|(i, _)| qr.kept[i])
                    .collect();
                qr.dependent.push((j, combo));
                continue;
            }

            let x0 = work[j][k];
            let alpha = if x0 >= 0.0 { -tail_norm } else { tail_norm };
            let mut v: Vec<f64> = work[j][k..].to_vec();
            v[0] -= alpha;
            let vn = norm(&v);
            for vi in &mut v {
                *vi /= vn;
            }
            for col in work.iter_mut().skip(j) {
                reflect(&v, k, col);
            }
            // Rows 0..=k of the transformed column form the new R column.
            for (i, row) in qr.r.iter_mut().enumerate() {
                row.push(work[j][i]);
            }
            let mut new_row = vec![0.0; k];
            new_row.push(alpha);
            qr.r.push(new_row);
            qr.reflectors.push(v);
            qr.kept.push(j);
        }
        qr
    }

    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    /// `Qᵀ y`.
    pub fn apply_qt(&self, y: &[f64]) -> Vec<f64> {
        let mut z = y.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            reflect(v, k, &mut z);
        }
        z
    }

    /// Solves `R x = b` by back substitution, where `b.len()` may be smaller
    /// than the rank (leading block only).
    pub fn solve_r(&self, b: &[f64]) -> Vec<f64> {
        let k = b.len();
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| self.r[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / self.r[i][i];
        }
        x
    }

    /// Least-squares coefficients for the kept columns.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let z = self.apply_qt(y);
        self.solve_r(&z[..self.rank()])
    }

    /// Diagonal of `(RᵀR)⁻¹ = R⁻¹R⁻ᵀ`.
    pub fn inverse_gram_diagonal(&self) -> Vec<f64> {
        let k = self.rank();
        // Columns of R⁻¹ via back substitution against unit vectors.
        let mut rinv = vec![vec![0.0; k]; k];
        for c in 0..k {
            let mut e = vec![0.0; c + 1];
            e[c] = 1.0;
            let col = self.solve_r(&e);
            for (i, v) in col.into_iter().enumerate() {
                rinv[i][c] = v;
            }
        }
        (0..k)
            .map(|i| rinv[i].iter().map(|v| v * v).sum())
            .collect()
    }
}
