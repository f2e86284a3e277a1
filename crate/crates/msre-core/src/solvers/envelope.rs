//! Lower envelope of shifted parabolas (the quadratic distance transform).
//!
//! Computes `out[i] = min_j f[j] + c·(x[i] − p[j])²` for strictly increasing
//! source positions `p` and increasing query points `x` in O(|p| + |x|),
//! instead of the O(|p|·|x|) direct scan. The selected minimizer's value is
//! evaluated with the same expression a direct scan would use, so envelope
//! and scan agree to the last bit whenever the minimizer is unique.

use alloc::vec;
use alloc::vec::Vec;

/// `out[i] = min_j f[j] + c·(x[i] − p[j])²`; `f` entries may be `+∞`
/// (skipped). Returns false if every `f[j]` is infinite.
pub fn quad_envelope(c: f64, p: &[f64], f: &[f64], x: &[f64], out: &mut [f64]) -> bool {
    debug_assert_eq!(p.len(), f.len());
    debug_assert_eq!(x.len(), out.len());
    debug_assert!(c > 0.0);
    let m = p.len();
    // hull[k] = index of the k-th parabola of the envelope; z[k] = left
    // boundary of the interval where it is minimal
    let mut hull: Vec<usize> = Vec::with_capacity(m);
    let mut z: Vec<f64> = vec![0.0; m + 1];
    for j in 0..m {
        if f[j] == f64::INFINITY {
            continue;
        }
        if hull.is_empty() {
            hull.push(j);
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            continue;
        }
        // intersection of parabola j with the current hull top k:
        // s = (f_j + c p_j² − f_k − c p_k²) / (2c (p_j − p_k))
        loop {
            let k = *hull.last().unwrap();
            let s = ((f[j] + c * p[j] * p[j]) - (f[k] + c * p[k] * p[k]))
                / (2.0 * c * (p[j] - p[k]));
            if s <= z[hull.len() - 1] && hull.len() > 1 {
                hull.pop();
                continue;
            }
            z[hull.len()] = s;
            z[hull.len() + 1] = f64::INFINITY;
            hull.push(j);
            break;
        }
    }
    if hull.is_empty() {
        out.fill(f64::INFINITY);
        return false;
    }
    let mut k = 0usize;
    for (i, &q) in x.iter().enumerate() {
        while k + 1 < hull.len() && z[k + 1] < q {
            k += 1;
        }
        let j = hull[k];
        let d = q - p[j];
        out[i] = f[j] + c * d * d;
    }
    true
}
