//! Sparse least squares by Golub–Kahan bidiagonalisation (LSQR, Paige &
//! Saunders). Started from zero it converges to the minimum-norm solution
//! of `min ||Ax - b||`.

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Duplicate `(row, col)` entries are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0; nrows + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            assert!(r < nrows && c < ncols, "triplet out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// `y += A x`
    pub fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yr += acc;
        }
    }

    /// `x += Aᵀ y`
    pub fn tmul_add(&self, y: &[f64], x: &mut [f64]) {
        for (r, &yr) in y.iter().enumerate().take(self.nrows) {
            for k in self.indptr[r]..self.indptr[r + 1] {
                x[self.indices[k]] += self.values[k] * yr;
            }
        }
    }

    pub fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = b.iter().map(|v| -v).collect();
        self.mul_add(x, &mut r);
        r
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LsqrOptions {
    pub atol: f64,
    pub btol: f64,
    pub conlim: f64,
    pub iter_lim: usize,
}

impl LsqrOptions {
    /// Tolerances at machine precision with a generous iteration cap.
    pub fn tight(n: usize) -> Self {
        LsqrOptions {
            atol: 1e-16,
            btol: 1e-16,
            conlim: 1e16,
            iter_lim: 20 * n + 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    ZeroSolution,
    Consistent,
    LeastSquares,
    IllConditioned,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LsqrOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
    pub residual_norm: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scale(v: &mut [f64], s: f64) {
    for x in v {
        *x *= s;
    }
}

pub fn lsqr(a: &CsrMatrix, b: &[f64], opts: LsqrOptions) -> LsqrOutcome {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m);
    let eps = f64::EPSILON;
    let ctol = if opts.conlim > 0.0 { 1.0 / opts.conlim } else { 0.0 };

    let mut x = vec![0.0; n];
    let mut u = b.to_vec();
    let mut beta = norm(&u);
    let mut v = vec![0.0; n];
    let mut alpha = 0.0;
    if beta > 0.0 {
        scale(&mut u, 1.0 / beta);
        a.tmul_add(&u, &mut v);
        alpha = norm(&v);
    }
    if alpha > 0.0 {
        scale(&mut v, 1.0 / alpha);
    }
    let mut w = v.clone();

    let mut rhobar = alpha;
    let mut phibar = beta;
    let bnorm = beta;
    let mut rnorm = beta;
    if alpha * beta == 0.0 {
        return LsqrOutcome {
            x,
            iterations: 0,
            stop: StopReason::ZeroSolution,
            residual_norm: rnorm,
        };
    }

    let mut anorm: f64 = 0.0;
    let mut ddnorm = 0.0;
    let mut xxnorm = 0.0;
    let mut z = 0.0;
    let mut cs2 = -1.0;
    let mut sn2 = 0.0;
    let mut stop = StopReason::IterationLimit;
    let mut itn = 0;

    while itn < opts.iter_lim {
        itn += 1;
        // u = A v - alpha u
        scale(&mut u, -alpha);
        a.mul_add(&v, &mut u);
        beta = norm(&u);
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
            anorm = (anorm * anorm + alpha * alpha + beta * beta).sqrt();
            // v = Aᵀ u - beta v
            scale(&mut v, -beta);
            a.tmul_add(&u, &mut v);
            alpha = norm(&v);
            if alpha > 0.0 {
                scale(&mut v, 1.0 / alpha);
            }
        }

        let rho = rhobar.hypot(beta);
        let cs = rhobar / rho;
        let sn = beta / rho;
        let theta = sn * alpha;
        rhobar = -cs * alpha;
        let phi = cs * phibar;
        phibar *= sn;
        let tau = sn * phi;

        let t1 = phi / rho;
        let t2 = -theta / rho;
        let mut dk_sq = 0.0;
        for i in 0..n {
            let wi = w[i];
            dk_sq += (wi / rho) * (wi / rho);
            x[i] += t1 * wi;
            w[i] = v[i] + t2 * wi;
        }
        ddnorm += dk_sq;

        let delta = sn2 * rho;
        let gambar = -cs2 * rho;
        let rhs = phi - delta * z;
        let zbar = rhs / gambar;
        let xnorm = (xxnorm + zbar * zbar).sqrt();
        let gamma = gambar.hypot(theta);
        cs2 = gambar / gamma;
        sn2 = theta / gamma;
        z = rhs / gamma;
        xxnorm += z * z;

        let acond = anorm * ddnorm.sqrt();
        rnorm = phibar.abs();
        let arnorm = alpha * tau.abs();

        let test1 = rnorm / bnorm;
        let test2 = arnorm / (anorm * rnorm + eps);
        let test3 = 1.0 / (acond + eps);
        let t1 = test1 / (1.0 + anorm * xnorm / bnorm);
        let rtol = opts.btol + opts.atol * anorm * xnorm / bnorm;

        if 1.0 + test3 <= 1.0 || test3 <= ctol {
            stop = StopReason::IllConditioned;
            break;
        }
        if 1.0 + test2 <= 1.0 || test2 <= opts.atol {
            stop = StopReason::LeastSquares;
            break;
        }
        if 1.0 + t1 <= 1.0 || test1 <= rtol {
            stop = StopReason::Consistent;
            break;
        }
        if alpha == 0.0 || beta == 0.0 {
            stop = if beta == 0.0 {
                StopReason::Consistent
            } else {
                StopReason::LeastSquares
            };
            break;
        }
    }

    LsqrOutcome {
        x,
        iterations: itn,
        stop,
        residual_norm: rnorm,
    }
}

/// LSQR followed by refinement sweeps on the residual, each solving for a
/// correction with another LSQR run.
pub fn lsqr_refined(a: &CsrMatrix, b: &[f64], sweeps: usize) -> Vec<f64> {
    let opts = LsqrOptions::tight(a.ncols().max(a.nrows()));
    let mut x = lsqr(a, b, opts).x;
    for _ in 0..sweeps {
        let r = a.residual(&x, b);
        // correction solves A d ≈ -r; only the range component of r matters
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let mut g = vec![0.0; a.ncols()];
        a.tmul_add(&neg, &mut g);
        if norm(&g) <= 1e-15 * (1.0 + norm(b)) {
            break;
        }
        let d = lsqr(a, &neg, opts).x;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += di;
        }
    }
    x
}
