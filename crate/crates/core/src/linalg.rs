//! Dense complex Gaussian elimination with partial pivoting for small fixed-size systems.

use num_complex::Complex64;

/// Pivots below this fraction of the largest matrix entry count as singular.
const PIVOT_TOLERANCE: f64 = 1e-14;

pub type Matrix<const R: usize, const C: usize> = [[Complex64; C]; R];

/// Solves `a · x = b` and returns `(x, det(a))`, or `None` if `a` is numerically singular.
pub fn solve<const N: usize, const R: usize>(
    mut a: Matrix<N, N>,
    mut b: Matrix<N, R>,
) -> Option<(Matrix<N, R>, Complex64)> {
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !(scale.is_finite() && scale > 0.0) {
        return None;
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..N {
        let (pivot_row, pivot_norm) =
            (col..N)
                .map(|r| (r, a[r][col].norm()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if !(pivot_norm > PIVOT_TOLERANCE * scale) {
            return None;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            b.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for r in col + 1..N {
            let factor = a[r][col] / pivot;
            if factor == Complex64::default() {
                continue;
            }
            for c in col..N {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            for c in 0..R {
                let v = b[col][c];
                b[r][c] -= factor * v;
            }
        }
    }
    let mut x = [[Complex64::default(); R]; N];
    for r in (0..N).rev() {
        for c in 0..R {
            let mut acc = b[r][c];
            for k in r + 1..N {
                acc -= a[r][k] * x[k][c];
            }
            x[r][c] = acc / a[r][r];
        }
    }
    Some((x, det))
}

/// Exact sum as (rounded, error).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Unevaluated double-double accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let (s, e) = two_sum(self.hi, v);
        self.hi = s;
        self.lo += e;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.lo += a.mul_add(b, -p);
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// b − a·x with every product and sum carried in double-double precision.
fn residual_compensated<const N: usize, const R: usize>(
    a: &Matrix<N, N>,
    x: &Matrix<N, R>,
    b: &Matrix<N, R>,
) -> Matrix<N, R> {
    let mut out = [[Complex64::default(); R]; N];
    for i in 0..N {
        for c in 0..R {
            let mut re = Compensated::default();
            let mut im = Compensated::default();
            re.add(b[i][c].re);
            im.add(b[i][c].im);
            for k in 0..N {
                let (p, q) = (a[i][k], x[k][c]);
                re.add_product(-p.re, q.re);
                re.add_product(p.im, q.im);
                im.add_product(-p.re, q.im);
                im.add_product(-p.im, q.re);
            }
            out[i][c] = Complex64::new(re.value(), im.value());
        }
    }
    out
}

/// [`solve`] followed by `steps` rounds of iterative refinement with compensated residuals.
///
/// Elimination alone loses about log10(cond a) digits; near a high-Q mechanical resonance
/// that is 7 or more. Each refinement round recovers roughly 16 − log10(cond a) of them.
pub fn solve_refined<const N: usize, const R: usize>(
    a: Matrix<N, N>,
    b: Matrix<N, R>,
    steps: usize,
) -> Option<(Matrix<N, R>, Complex64)> {
    let (mut x, det) = solve(a, b)?;
    for _ in 0..steps {
        let r = residual_compensated(&a, &x, &b);
        let (dx, _) = solve(a, r)?;
        for (row, drow) in x.iter_mut().zip(dx) {
            for (v, d) in row.iter_mut().zip(drow) {
                *v += d;
            }
        }
    }
    Some((x, det))
}

pub fn mul<const N: usize, const M: usize, const R: usize>(
    a: &Matrix<N, M>,
    b: &Matrix<M, R>,
) -> Matrix<N, R> {
    let mut out = [[Complex64::default(); R]; N];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..M).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}
