//! Discrete mollification with a radial bump kernel.

use super::domain::Domain;
use super::scalar::ScalarField;
use crate::error::{CzError, Result};

/// Result of a mollification: the smoothed field plus the width of the
/// boundary margin on which the full kernel did not fit. Inside the margin
/// the kernel was clipped and renormalized, so those values are usable but
/// not a clean convolution.
#[derive(Clone, Debug)]
pub struct Mollified {
    pub field: ScalarField<Domain>,
    pub margin: usize,
}

impl Mollified {
    /// True when the full kernel fit around the node.
    pub fn is_valid(&self, flat: usize) -> bool {
        let d = self.field.grid();
        d.nodes_to_boundary(d.multi(flat)) >= self.margin
    }
}

/// Smooth radial profile `exp(-1/(1 - s^2))` on `s in [0,1)`, zero outside.
fn bump_profile(s2: f64) -> f64 {
    if s2 < 1.0 {
        (-1.0 / (1.0 - s2)).exp()
    } else {
        0.0
    }
}

/// Convolve with the normalized bump kernel supported in `B_eps`.
/// Requires `eps >= 2h` so the kernel is resolved; kernel weights are
/// renormalized to sum exactly 1.
pub fn mollify(w: &ScalarField<Domain>, eps: f64) -> Result<Mollified> {
    let domain = w.grid().clone();
    let h = domain.h();
    if !eps.is_finite() || eps < 2.0 * h {
        return Err(CzError::KernelUnresolved { eps, h });
    }
    let n = domain.n();
    let m = domain.m();
    // strictly inside B_eps, so the per-axis reach is at most ceil(eps/h)-1
    let reach = (eps / h).ceil() as i64 - 1;

    // offsets and weights of the kernel, fixed iteration order
    let width = (2 * reach + 1) as usize;
    let mut offsets: Vec<([i64; 3], f64)> = Vec::new();
    let mut total = 0.0;
    for c in 0..width.pow(n as u32) {
        let mut rem = c;
        let mut o = [0i64; 3];
        for a in (0..n).rev() {
            o[a] = (rem % width) as i64 - reach;
            rem /= width;
        }
        let mut s2 = 0.0;
        for a in 0..n {
            let d = o[a] as f64 * h / eps;
            s2 += d * d;
        }
        let wgt = bump_profile(s2);
        if wgt > 0.0 {
            offsets.push((o, wgt));
            total += wgt;
        }
    }
    for (_, wgt) in offsets.iter_mut() {
        *wgt /= total;
    }

    let margin = reach as usize;
    let v = w.values();
    let mut out = vec![0.0; v.len()];
    for flat in 0..domain.node_count() {
        let idx = domain.multi(flat);
        if domain.nodes_to_boundary(idx) >= margin {
            let mut acc = 0.0;
            for &(o, wgt) in &offsets {
                let mut j = [0usize; 3];
                for a in 0..n {
                    j[a] = (idx[a] as i64 + o[a]) as usize;
                }
                acc += wgt * v[domain.flat(j)];
            }
            out[flat] = acc;
        } else {
            // clipped kernel, renormalized over in-box offsets
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for &(o, wgt) in &offsets {
                let mut j = [0usize; 3];
                let mut inside = true;
                for a in 0..n {
                    let i = idx[a] as i64 + o[a];
                    if i < 0 || i >= m as i64 {
                        inside = false;
                        break;
                    }
                    j[a] = i as usize;
                }
                if inside {
                    acc += wgt * v[domain.flat(j)];
                    wsum += wgt;
                }
            }
            out[flat] = acc / wsum;
        }
    }

    Ok(Mollified {
        field: ScalarField::from_values(domain, out)?,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_below_resolution_errors() {
        let d = Domain::unit_lab(1, 33).unwrap();
        let w = ScalarField::constant(d.clone(), 1.0).unwrap();
        assert!(matches!(
            mollify(&w, d.h()),
            Err(CzError::KernelUnresolved { .. })
        ));
    }

    #[test]
    fn constants_are_reproduced_exactly() {
        let d = Domain::unit_lab(2, 33).unwrap();
        let w = ScalarField::constant(d, 2.5).unwrap();
        let sm = mollify(&w, 0.5).unwrap();
        for flat in 0..sm.field.grid().node_count() {
            assert!((sm.field.value(flat) - 2.5).abs() < 1e-13);
        }
    }

    #[test]
    fn affine_fields_pass_through_on_valid_region() {
        // radial kernel has zero first moment
        let d = Domain::unit_lab(2, 33).unwrap();
        let w = ScalarField::from_fn(d, |x| x[0]).unwrap();
        let sm = mollify(&w, 0.5).unwrap();
        for flat in 0..sm.field.grid().node_count() {
            if sm.is_valid(flat) {
                let x1 = sm.field.grid().node_coords(flat)[0];
                assert!(
                    (sm.field.value(flat) - x1).abs() < 1e-12,
                    "affine through kernel at x1={x1}"
                );
            }
        }
    }

    #[test]
    fn smoothing_error_is_second_order_in_eps() {
        // Taylor: (w * eta_eps)(x) - w(x) = c eps^2 w''(x) + O(eps^4)
        let d = Domain::unit_lab(1, 2049).unwrap();
        let w = ScalarField::from_fn(d.clone(), |x| x[0].sin()).unwrap();
        let err = |eps: f64| -> f64 {
            let sm = mollify(&w, eps).unwrap();
            let mut worst = 0.0f64;
            for flat in 0..d.node_count() {
                if sm.is_valid(flat) {
                    let x1 = d.node_coords(flat)[0];
                    worst = worst.max((sm.field.value(flat) - x1.sin()).abs());
                }
            }
            worst
        };
        let e1 = err(0.4);
        let e2 = err(0.2);
        let rate = e1 / e2;
        assert!(
            (3.0..6.0).contains(&rate),
            "O(eps^2) contraction, got {e1} -> {e2} (rate {rate})"
        );
    }
}
