use super::{ComplexMatrix, LinalgError, C64};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Eigenvalues with multiplicity, via Householder reduction to Hessenberg form
/// followed by single-shift complex QR with Wilkinson shifts.
///
/// A subdiagonal entry is deflated once it falls below `tol` (floored at
/// machine epsilon) relative to its neighbouring diagonal entries. Output is
/// sorted by descending real part, then descending imaginary part.
pub fn spectrum(m: &ComplexMatrix, tol: f64) -> Result<Vec<C64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "spectrum",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = m.clone();
    hessenberg(&mut h);
    let eps = tol.max(f64::EPSILON);
    let scale = h.frobenius_norm();

    let mut eig = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        // locate the top of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(LinalgError::NoConvergence {
                algorithm: "hessenberg qr",
                iterations: MAX_ITER_PER_EIGENVALUE,
            });
        }
        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.3 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    eig[0] = h[(0, 0)];
    eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(eig)
}

fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H
        for j in 0..n {
            let dot: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        // H <- H (I - 2vv*)
        for i in 0..n {
            let dot: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let r1 = mid + disc;
    let r2 = mid - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Explicit shifted QR step on the block `lo..=hi` using Givens rotations.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let nrm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if nrm == 0.0 {
            (1.0, C64::new(0.0, 0.0))
        } else if a.norm() == 0.0 {
            (0.0, C64::new(1.0, 0.0))
        } else {
            (a.norm() / nrm, (a / a.norm()) * b.conj() / nrm)
        };
        // rows k, k+1 <- G rows, G = [[c, s], [-s̄, c]]
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    // columns k, k+1 <- columns G*
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Collapses values within `merge_tol` of each other (single linkage) to
/// their centroid. Cluster centroids of a perturbed multiple eigenvalue are
/// far more accurate than the individual members.
pub fn distinct_values(values: &[C64], merge_tol: f64) -> Vec<C64> {
    let n = values.len();
    let mut cluster: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= merge_tol {
                let (a, b) = (find(&mut cluster, i), find(&mut cluster, j));
                if a != b {
                    cluster[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut sums: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut cluster, i);
        match sums.iter_mut().find(|(r, _, _)| *r == root) {
            Some(entry) => {
                entry.1 += values[i];
                entry.2 += 1;
            }
            None => sums.push((root, values[i], 1)),
        }
    }
    sums.into_iter().map(|(_, s, k)| s / k as f64).collect()
}

/// Hausdorff distance between two finite point sets in the complex plane.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
