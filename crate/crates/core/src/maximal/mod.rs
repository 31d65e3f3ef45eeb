//! Hardy-Littlewood and 2-sharp maximal operators over discrete radius
//! ladders, elliptic (balls) and parabolic (cubes).
//!
//! All maximal values use the squared convention: the 2-sharp operator
//! returns `sup_r avg_{B_r(x)} |w - mean|^2` with no square root, and the
//! Hardy-Littlewood variant returns `sup_r avg_{B_r(x)} |w|^2`, so the
//! pointwise domination `sharp <= hl` holds term by term within one
//! quadrature.

pub mod backend;
pub mod stencil;

use crate::error::{CzError, Result};
use crate::fields::domain::{Domain, Grid, SpaceTimeDomain};
use crate::fields::region::{region_nodes, Region};
use crate::fields::scalar::ScalarField;
use crate::fields::tensor::{component_weight, sym_components, SymTensorField};

pub use backend::Backend;
pub use stencil::MaximalGeometry;

pub const GEOMETRIC_FACTOR: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Geometric,
    Dense,
}

impl std::str::FromStr for LadderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "geometric" => Ok(LadderKind::Geometric),
            "dense" => Ok(LadderKind::Dense),
            other => Err(format!(
                "unknown radius ladder '{other}' (expected geometric or dense)"
            )),
        }
    }
}

/// Increasing list of ball radii over which the suprema are taken. Radii
/// start at `2h` so every ball resolves at least five nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusSet {
    radii: Vec<f64>,
}

impl RadiusSet {
    pub fn from_radii(radii: Vec<f64>, h: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(CzError::InvalidRadiusSet("no radii".into()));
        }
        let min_r = 2.0 * h * (1.0 - 1e-12);
        for pair in radii.windows(2) {
            if pair[1] <= pair[0] {
                return Err(CzError::InvalidRadiusSet(
                    "radii must be strictly increasing".into(),
                ));
            }
        }
        if radii[0] < min_r {
            return Err(CzError::InvalidRadiusSet(format!(
                "minimum radius {} is below 2h = {}",
                radii[0],
                2.0 * h
            )));
        }
        Ok(Self { radii })
    }

    /// Geometric ladder `2h * 1.25^j` capped at `r_max`.
    pub fn geometric(h: f64, r_max: f64) -> Result<Self> {
        let mut radii = Vec::new();
        let mut r = 2.0 * h;
        while r <= r_max {
            radii.push(r);
            r *= GEOMETRIC_FACTOR;
        }
        Self::from_radii(radii, h)
    }

    /// Every multiple of `h` from `2h` up to `r_max` (oracle tests).
    pub fn dense(h: f64, r_max: f64) -> Result<Self> {
        let kmax = (r_max / h).floor() as usize;
        let radii = (2..=kmax).map(|k| k as f64 * h).collect();
        Self::from_radii(radii, h)
    }

    pub fn for_domain(space: &Domain, kind: LadderKind) -> Result<Self> {
        match kind {
            LadderKind::Geometric => Self::geometric(space.h(), space.half_width()),
            LadderKind::Dense => Self::dense(space.h(), space.half_width()),
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn admissible_at<G: MaximalGeometry>(&self, grid: &G, flat: usize) -> Vec<f64> {
        self.radii
            .iter()
            .copied()
            .filter(|&r| grid.admissible(flat, r))
            .collect()
    }

    pub fn max_admissible_at<G: MaximalGeometry>(&self, grid: &G, flat: usize) -> Option<f64> {
        self.admissible_at(grid, flat).last().copied()
    }
}

/// Scalar or symmetric-tensor input to a maximal operator. Tensor fields
/// contribute per component with Frobenius weights.
pub enum MaximalInput<'a, G: Grid> {
    Scalar(&'a ScalarField<G>),
    Tensor(&'a SymTensorField<G>),
}

impl<'a, G: Grid> From<&'a ScalarField<G>> for MaximalInput<'a, G> {
    fn from(w: &'a ScalarField<G>) -> Self {
        MaximalInput::Scalar(w)
    }
}

impl<'a, G: Grid> From<&'a SymTensorField<G>> for MaximalInput<'a, G> {
    fn from(w: &'a SymTensorField<G>) -> Self {
        MaximalInput::Tensor(w)
    }
}

impl<'a, G: Grid> MaximalInput<'a, G> {
    fn grid(&self) -> &G {
        match self {
            MaximalInput::Scalar(w) => w.grid(),
            MaximalInput::Tensor(w) => w.grid(),
        }
    }

    fn channels(&self) -> Vec<(&'a [f64], f64)> {
        match self {
            MaximalInput::Scalar(w) => vec![(w.values(), 1.0)],
            MaximalInput::Tensor(w) => {
                let comps = sym_components(w.grid().space().n());
                (0..comps.len())
                    .map(|c| (w.channel(c), component_weight(comps[c])))
                    .collect()
            }
        }
    }
}

/// Result of a maximal-operator evaluation at a list of points. Points with
/// no admissible radius are flagged invalid (never silently zero).
#[derive(Clone, Debug)]
pub struct MaximalField<G: Grid> {
    grid: G,
    points: Vec<usize>,
    values: Vec<f64>,
    argmax: Vec<f64>,
    valid: Vec<bool>,
}

impl<G: Grid> MaximalField<G> {
    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.valid[i]
    }

    /// Value at the i-th point, `None` when no radius was admissible.
    pub fn value(&self, i: usize) -> Option<f64> {
        self.valid[i].then(|| self.values[i])
    }

    /// Radius attaining the supremum at the i-th point.
    pub fn argmax(&self, i: usize) -> Option<f64> {
        self.valid[i].then(|| self.argmax[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<(f64, f64)>)> + '_ {
        (0..self.len()).map(|i| {
            (
                self.points[i],
                self.valid[i].then(|| (self.values[i], self.argmax[i])),
            )
        })
    }

    /// Max value over valid points; `None` if no point is valid.
    pub fn max_value(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.len() {
            if self.valid[i] {
                best = Some(best.map_or(self.values[i], |b| b.max(self.values[i])));
            }
        }
        best
    }

    /// Expand to full-grid channels (value, argmax) with NaN at nodes that
    /// were not evaluated or are invalid; the serialization layout.
    pub fn to_grid_channels(&self) -> (Vec<f64>, Vec<f64>) {
        let mut v = vec![f64::NAN; self.grid.node_count()];
        let mut a = vec![f64::NAN; self.grid.node_count()];
        for i in 0..self.len() {
            if self.valid[i] {
                v[self.points[i]] = self.values[i];
                a[self.points[i]] = self.argmax[i];
            }
        }
        (v, a)
    }
}

fn check_points<G: Grid>(grid: &G, points: &[usize]) -> Result<()> {
    if let Some(&bad) = points.iter().find(|&&p| p >= grid.node_count()) {
        return Err(CzError::InvalidInput(format!(
            "evaluation point {bad} outside grid with {} nodes",
            grid.node_count()
        )));
    }
    Ok(())
}

fn eval<G: MaximalGeometry>(
    w: MaximalInput<'_, G>,
    points: &[usize],
    rs: &RadiusSet,
    backend: Backend,
    centered: bool,
) -> Result<MaximalField<G>> {
    let grid = w.grid().clone();
    check_points(&grid, points)?;
    let chans = w.channels();
    let slices = backend::eval_radius_slices(&grid, &chans, points, rs.radii(), backend, centered);
    let npts = points.len();
    let mut values = vec![f64::NAN; npts];
    let mut argmax = vec![f64::NAN; npts];
    let mut valid = vec![false; npts];
    // ascending radii; strict improvement only, so ties resolve to the
    // smaller radius
    for (ri, slice) in slices.iter().enumerate() {
        let r = rs.radii()[ri];
        for pi in 0..npts {
            if slice.admissible[pi] {
                let v = slice.values[pi];
                if !valid[pi] || v > values[pi] {
                    values[pi] = v;
                    argmax[pi] = r;
                    valid[pi] = true;
                }
            }
        }
    }
    Ok(MaximalField {
        grid,
        points: points.to_vec(),
        values,
        argmax,
        valid,
    })
}

/// 2-sharp maximal function: per point, the sup over admissible radii of the
/// mean-square oscillation over the ball (or parabolic cube).
pub fn sharp_maximal_2<'a, G: MaximalGeometry + 'a>(
    w: impl Into<MaximalInput<'a, G>>,
    points: &[usize],
    rs: &RadiusSet,
    backend: Backend,
) -> Result<MaximalField<G>> {
    eval(w.into(), points, rs, backend, true)
}

/// Hardy-Littlewood variant with the squared-mean convention:
/// `sup_r avg_{B_r(x)} |w|^2`.
pub fn hl_maximal<'a, G: MaximalGeometry + 'a>(
    w: impl Into<MaximalInput<'a, G>>,
    points: &[usize],
    rs: &RadiusSet,
    backend: Backend,
) -> Result<MaximalField<G>> {
    eval(w.into(), points, rs, backend, false)
}

/// Parabolic 2-sharp maximal function (suprema over parabolic cubes). Same
/// engine as `sharp_maximal_2`; named separately for call-site clarity.
pub fn sharp_maximal_2_parabolic<'a>(
    w: impl Into<MaximalInput<'a, SpaceTimeDomain>>,
    points: &[usize],
    rs: &RadiusSet,
    backend: Backend,
) -> Result<MaximalField<SpaceTimeDomain>> {
    sharp_maximal_2(w, points, rs, backend)
}

/// Compensated (Kahan) accumulator; keeps million-node region sums accurate
/// enough for the variance-identity cross-check.
#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Mean-square oscillation of `w` over one region:
/// `avg_reg |w - mean_reg w|^2`, computed by the two-pass formula and checked
/// against the convolution identity `avg w^2 - (avg w)^2` to 1e-10 relative.
pub fn local_oscillation2<'a, G: Grid + 'a>(
    w: impl Into<MaximalInput<'a, G>>,
    region: &Region,
) -> Result<f64> {
    let input = w.into();
    let nodes = region_nodes(input.grid(), region)?;
    let count = nodes.len() as f64;
    let mut direct_total = 0.0;
    let mut ident_total = 0.0;
    let mut scale = 0.0;
    for (vals, weight) in input.channels() {
        let mut s1 = Kahan::default();
        let mut s2 = Kahan::default();
        for &i in &nodes {
            let x = vals[i];
            s1.add(x);
            s2.add(x * x);
        }
        let mean = s1.sum / count;
        let mut dev2 = Kahan::default();
        for &i in &nodes {
            let d = vals[i] - mean;
            dev2.add(d * d);
        }
        direct_total += weight * (dev2.sum / count);
        ident_total += weight * (s2.sum / count - mean * mean);
        scale += weight * (s2.sum / count);
    }
    let tol = 1e-10 * direct_total.abs().max(ident_total.abs()) + 1e-12 * scale.max(1e-300);
    if (direct_total - ident_total).abs() > tol {
        return Err(CzError::VarianceIdentity {
            direct: direct_total,
            identity: ident_total,
        });
    }
    Ok(direct_total)
}
