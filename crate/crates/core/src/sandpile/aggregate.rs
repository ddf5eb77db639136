//! Sandpile aggregation on a square window of the planar lattice: `n`
//! chips at the origin over a constant background.
//!
//! The background height is `h = -H` for hole depth `H`; a site fires when
//! it holds at least four chips. Stabilization runs in-place scans over
//! the active bounding box, alternating scan direction so avalanches
//! cascade within a single pass; the abelian property guarantees the
//! final heights and odometer do not depend on the order. The parallel
//! backend splits the box into row bands with per-band halo buffers for
//! chips crossing a band boundary. The window doubles whenever the fired
//! set reaches its edge, so no chip is ever lost.

use super::EngineError;

#[derive(Debug, Clone, Copy)]
pub struct AggregateParams {
    /// Chips dropped on the origin.
    pub chips: u64,
    /// Hole depth `H`; the background height is `-H` and must be at most
    /// 2 for the background itself to be stable.
    pub hole_depth: i64,
    /// Initial window radius.
    pub window: usize,
    /// Hard cap on the window radius reached by doubling.
    pub window_cap: usize,
}

impl AggregateParams {
    pub fn new(chips: u64, hole_depth: i64) -> Self {
        AggregateParams {
            chips,
            hole_depth,
            window: 64,
            window_cap: 4096,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AggregateResult {
    pub radius: i64,
    pub heights: Vec<i64>,
    pub odometer: Vec<u64>,
    pub total_firings: u64,
    pub passes: u64,
}

impl AggregateResult {
    pub fn dim(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    pub fn index(&self, x: i64, y: i64) -> usize {
        let d = self.dim() as i64;
        ((y + self.radius) * d + (x + self.radius)) as usize
    }

    pub fn in_window(&self, x: i64, y: i64) -> bool {
        x.abs() <= self.radius && y.abs() <= self.radius
    }

    pub fn fired_at(&self, x: i64, y: i64) -> bool {
        self.in_window(x, y) && self.odometer[self.index(x, y)] > 0
    }

    pub fn height_at(&self, x: i64, y: i64) -> i64 {
        self.heights[self.index(x, y)]
    }

    pub fn fired_count(&self) -> usize {
        self.odometer.iter().filter(|&&c| c > 0).count()
    }

    /// Bounding box (min_x, max_x, min_y, max_y) of the fired set.
    pub fn fired_bbox(&self) -> Option<(i64, i64, i64, i64)> {
        let mut bbox: Option<(i64, i64, i64, i64)> = None;
        for y in -self.radius..=self.radius {
            for x in -self.radius..=self.radius {
                if self.fired_at(x, y) {
                    let b = bbox.get_or_insert((x, x, y, y));
                    b.0 = b.0.min(x);
                    b.1 = b.1.max(x);
                    b.2 = b.2.min(y);
                    b.3 = b.3.max(y);
                }
            }
        }
        bbox
    }

    /// When the fired set is exactly the centered square of side `2r+1`,
    /// returns `r`.
    pub fn exact_square_radius(&self) -> Option<i64> {
        let (x0, x1, y0, y1) = self.fired_bbox()?;
        if x0 != -x1 || y0 != -y1 || x1 != y1 {
            return None;
        }
        let r = x1;
        for y in -r..=r {
            for x in -r..=r {
                if !self.fired_at(x, y) {
                    return None;
                }
            }
        }
        Some(r)
    }

    /// Whether the open discrete ball of radius `r` is contained in the
    /// fired set.
    pub fn contains_ball(&self, r: f64) -> bool {
        if r <= 0.0 {
            return true;
        }
        let bound = r.ceil() as i64;
        let rr = r * r;
        for y in -bound..=bound {
            for x in -bound..=bound {
                if ((x * x + y * y) as f64) < rr && !self.fired_at(x, y) {
                    return false;
                }
            }
        }
        true
    }
}

/// Aggregation with the default backend: band-parallel passes when the
/// `parallel` feature is enabled, sequential passes otherwise.
pub fn aggregate(params: &AggregateParams) -> Result<AggregateResult, EngineError> {
    #[cfg(feature = "parallel")]
    {
        aggregate_parallel(params)
    }
    #[cfg(not(feature = "parallel"))]
    {
        aggregate_sequential(params)
    }
}

pub fn aggregate_sequential(params: &AggregateParams) -> Result<AggregateResult, EngineError> {
    run_windows(params, false)
}

#[cfg(feature = "parallel")]
pub fn aggregate_parallel(params: &AggregateParams) -> Result<AggregateResult, EngineError> {
    run_windows(params, true)
}

#[cfg(not(feature = "parallel"))]
fn run_windows(params: &AggregateParams, _parallel: bool) -> Result<AggregateResult, EngineError> {
    run_windows_impl(params, |w| w.stabilize_sequential())
}

#[cfg(feature = "parallel")]
fn run_windows(params: &AggregateParams, parallel: bool) -> Result<AggregateResult, EngineError> {
    if parallel {
        run_windows_impl(params, |w| w.stabilize_parallel())
    } else {
        run_windows_impl(params, |w| w.stabilize_sequential())
    }
}

fn run_windows_impl(
    params: &AggregateParams,
    stabilize: impl Fn(&mut Window) -> WindowOutcome,
) -> Result<AggregateResult, EngineError> {
    if params.hole_depth < -2 {
        return Err(EngineError::WindowOverflow(0)); // unstable background
    }
    let mut radius = params.window.max(2);
    loop {
        let mut w = Window::new(radius as i64, params)?;
        match stabilize(&mut w) {
            WindowOutcome::Stable => {
                return Ok(AggregateResult {
                    radius: w.radius,
                    heights: w.heights,
                    odometer: w.odometer,
                    total_firings: w.total_firings,
                    passes: w.passes,
                })
            }
            WindowOutcome::HitBoundary => {
                let next = radius * 2;
                if next > params.window_cap {
                    return Err(EngineError::WindowOverflow(radius));
                }
                radius = next;
            }
        }
    }
}

enum WindowOutcome {
    Stable,
    HitBoundary,
}

/// Inclusive scan box in array coordinates.
#[derive(Debug, Clone, Copy)]
struct Bbox {
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
}

impl Bbox {
    fn expand(&self, limit: usize) -> Bbox {
        Bbox {
            r0: self.r0.saturating_sub(1),
            r1: (self.r1 + 1).min(limit),
            c0: self.c0.saturating_sub(1),
            c1: (self.c1 + 1).min(limit),
        }
    }

    fn join(&mut self, other: &Bbox) {
        self.r0 = self.r0.min(other.r0);
        self.r1 = self.r1.max(other.r1);
        self.c0 = self.c0.min(other.c0);
        self.c1 = self.c1.max(other.c1);
    }
}

struct Window {
    radius: i64,
    dim: usize,
    heights: Vec<i64>,
    odometer: Vec<u64>,
    total_firings: u64,
    passes: u64,
}

impl Window {
    fn new(radius: i64, params: &AggregateParams) -> Result<Self, EngineError> {
        let dim = (2 * radius + 1) as usize;
        let background = -params.hole_depth;
        let mut heights = vec![background; dim * dim];
        let center = (radius * (2 * radius + 1) + radius) as usize;
        let n = i64::try_from(params.chips).map_err(|_| EngineError::CounterOverflow)?;
        heights[center] = heights[center]
            .checked_add(n)
            .ok_or(EngineError::CounterOverflow)?;
        Ok(Window {
            radius,
            dim,
            heights,
            odometer: vec![0; dim * dim],
            total_firings: 0,
            passes: 0,
        })
    }

    fn center_bbox(&self) -> Bbox {
        let c = self.radius as usize;
        Bbox {
            r0: c,
            r1: c,
            c0: c,
            c1: c,
        }
    }

    fn stabilize_sequential(&mut self) -> WindowOutcome {
        let dim = self.dim;
        let mut scan = self.center_bbox();
        loop {
            self.passes += 1;
            let forward = self.passes % 2 == 1;
            scan = scan.expand(dim - 1);
            let outcome = pass_rows(
                &mut self.heights,
                &mut self.odometer,
                dim,
                scan,
                0,
                forward,
                &mut None,
                &mut None,
            );
            match outcome {
                PassOutcome::Boundary => return WindowOutcome::HitBoundary,
                PassOutcome::Quiet => return WindowOutcome::Stable,
                PassOutcome::Fired { bbox, firings } => {
                    self.total_firings += firings;
                    scan = bbox;
                }
            }
        }
    }

    #[cfg(feature = "parallel")]
    fn stabilize_parallel(&mut self) -> WindowOutcome {
        use rayon::prelude::*;
        // Below this many rows per band the rayon dispatch costs more than
        // the pass itself.
        const MIN_BAND_ROWS: usize = 96;
        let dim = self.dim;
        let threads = rayon::current_num_threads().max(1);
        let mut scan = self.center_bbox();
        loop {
            self.passes += 1;
            let forward = self.passes % 2 == 1;
            scan = scan.expand(dim - 1);
            let span = scan.r1 - scan.r0 + 1;
            let outcome = if threads == 1 || span < 2 * MIN_BAND_ROWS {
                pass_rows(
                    &mut self.heights,
                    &mut self.odometer,
                    dim,
                    scan,
                    0,
                    forward,
                    &mut None,
                    &mut None,
                )
            } else {
                let r0 = scan.r0;
                let band_rows = ((span + threads - 1) / threads).max(MIN_BAND_ROWS);
                let heights_region = &mut self.heights[r0 * dim..(scan.r1 + 1) * dim];
                let odometer_region = &mut self.odometer[r0 * dim..(scan.r1 + 1) * dim];
                let results: Vec<(PassOutcome, Vec<i64>, Vec<i64>, usize, usize)> =
                    heights_region
                        .par_chunks_mut(band_rows * dim)
                        .zip(odometer_region.par_chunks_mut(band_rows * dim))
                        .enumerate()
                        .map(|(b, (hband, oband))| {
                            let first = r0 + b * band_rows;
                            let nrows = hband.len() / dim;
                            let band_scan = Bbox {
                                r0: first,
                                r1: first + nrows - 1,
                                c0: scan.c0,
                                c1: scan.c1,
                            };
                            let mut up = Some(vec![0i64; dim]);
                            let mut down = Some(vec![0i64; dim]);
                            let out = pass_rows(
                                hband, oband, dim, band_scan, first, forward, &mut up, &mut down,
                            );
                            (out, up.unwrap(), down.unwrap(), first, nrows)
                        })
                        .collect();
                let mut fired_bbox: Option<Bbox> = None;
                let mut firings = 0u64;
                let mut boundary = false;
                for (out, up, down, first, nrows) in results {
                    match out {
                        PassOutcome::Boundary => boundary = true,
                        PassOutcome::Quiet => {}
                        PassOutcome::Fired { bbox, firings: f } => {
                            firings += f;
                            match fired_bbox.as_mut() {
                                Some(acc) => acc.join(&bbox),
                                None => fired_bbox = Some(bbox),
                            }
                        }
                    }
                    if first > 0 {
                        let target = (first - 1) * dim;
                        for (c, &q) in up.iter().enumerate() {
                            if q != 0 {
                                self.heights[target + c] += q;
                            }
                        }
                    }
                    let below = first + nrows;
                    if below < dim {
                        let target = below * dim;
                        for (c, &q) in down.iter().enumerate() {
                            if q != 0 {
                                self.heights[target + c] += q;
                            }
                        }
                    }
                }
                if boundary {
                    PassOutcome::Boundary
                } else {
                    match fired_bbox {
                        Some(bbox) => PassOutcome::Fired { bbox, firings },
                        None => PassOutcome::Quiet,
                    }
                }
            };
            match outcome {
                PassOutcome::Boundary => return WindowOutcome::HitBoundary,
                PassOutcome::Quiet => return WindowOutcome::Stable,
                PassOutcome::Fired { bbox, firings } => {
                    self.total_firings += firings;
                    scan = bbox;
                }
            }
        }
    }
}

enum PassOutcome {
    Quiet,
    Boundary,
    Fired { bbox: Bbox, firings: u64 },
}

/// One in-place pass over `scan` within a slice that starts at global row
/// `slice_first_row`. Fired chips cascade within the pass. Contributions
/// that would leave the slice go to the `up`/`down` halo buffers when
/// present; when absent the slice is the whole window and the halo is
/// unreachable. A fire on the window edge (global row/column 0 or dim-1)
/// reports a boundary hit.
#[allow(clippy::too_many_arguments)]
fn pass_rows(
    heights: &mut [i64],
    odometer: &mut [u64],
    dim: usize,
    scan: Bbox,
    slice_first_row: usize,
    forward: bool,
    up: &mut Option<Vec<i64>>,
    down: &mut Option<Vec<i64>>,
) -> PassOutcome {
    let nrows = heights.len() / dim;
    let last_global = slice_first_row + nrows - 1;
    let r0 = scan.r0.max(slice_first_row);
    let r1 = scan.r1.min(last_global);
    if r0 > r1 {
        return PassOutcome::Quiet;
    }
    let mut fired: Option<Bbox> = None;
    let mut firings = 0u64;
    let total_rows = r1 - r0 + 1;
    for step in 0..total_rows {
        let gr = if forward { r0 + step } else { r1 - step };
        let lr = gr - slice_first_row;
        let base = lr * dim;
        let mut step_col = |c: usize,
                            heights: &mut [i64],
                            odometer: &mut [u64],
                            fired: &mut Option<Bbox>,
                            firings: &mut u64|
         -> bool {
            let i = base + c;
            if heights[i] < 4 {
                return true;
            }
            // window edge cells must not fire
            if gr == 0 || c == 0 {
                return false;
            }
            let q = heights[i] / 4;
            heights[i] -= 4 * q;
            if c + 1 < dim {
                heights[i + 1] += q;
            }
            heights[i - 1] += q;
            if lr + 1 < nrows {
                heights[i + dim] += q;
            } else if let Some(d) = down.as_mut() {
                d[c] += q;
            }
            if lr > 0 {
                heights[i - dim] += q;
            } else if let Some(u) = up.as_mut() {
                u[c] += q;
            }
            odometer[i] += q as u64;
            *firings += q as u64;
            match fired.as_mut() {
                Some(b) => {
                    b.r0 = b.r0.min(gr);
                    b.r1 = b.r1.max(gr);
                    b.c0 = b.c0.min(c);
                    b.c1 = b.c1.max(c);
                }
                None => {
                    *fired = Some(Bbox {
                        r0: gr,
                        r1: gr,
                        c0: c,
                        c1: c,
                    })
                }
            }
            true
        };
        if forward {
            for c in scan.c0..=scan.c1 {
                if (gr == dim - 1 || c == dim - 1) && heights[base + c] >= 4 {
                    return PassOutcome::Boundary;
                }
                if !step_col(c, heights, odometer, &mut fired, &mut firings) {
                    return PassOutcome::Boundary;
                }
            }
        } else {
            for c in (scan.c0..=scan.c1).rev() {
                if (gr == dim - 1 || c == dim - 1) && heights[base + c] >= 4 {
                    return PassOutcome::Boundary;
                }
                if !step_col(c, heights, odometer, &mut fired, &mut firings) {
                    return PassOutcome::Boundary;
                }
            }
        }
    }
    match fired {
        Some(bbox) => PassOutcome::Fired { bbox, firings },
        None => PassOutcome::Quiet,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_chips_fire_nothing() {
        let r = aggregate(&AggregateParams::new(0, 0)).unwrap();
        assert_eq!(r.fired_count(), 0);
        assert_eq!(r.exact_square_radius(), None);
    }

    #[test]
    fn small_pile_conserves_chips() {
        let r = aggregate(&AggregateParams::new(16, 0)).unwrap();
        assert!(r.fired_at(0, 0));
        let total: i64 = (-5..=5)
            .flat_map(|y| (-5..=5).map(move |x| (x, y)))
            .map(|(x, y)| r.height_at(x, y))
            .sum();
        assert_eq!(total, 16);
        assert!((-5..=5).all(|y| (-5..=5).all(|x| r.height_at(x, y) < 4)));
    }

    #[test]
    fn square_on_full_background() {
        let r = aggregate(&AggregateParams::new(1000, -2)).unwrap();
        assert!(r.exact_square_radius().is_some());
    }

    #[test]
    fn hole_background_absorbs() {
        let r = aggregate(&AggregateParams::new(3, 3)).unwrap();
        assert_eq!(r.fired_count(), 0);
        assert_eq!(r.height_at(0, 0), 0);
    }

    #[test]
    fn window_cap_errors() {
        let mut p = AggregateParams::new(100_000, -2);
        p.window = 4;
        p.window_cap = 8;
        assert!(matches!(aggregate(&p), Err(EngineError::WindowOverflow(_))));
    }

    #[test]
    fn sequential_and_default_agree() {
        let p = AggregateParams::new(5000, 0);
        let a = aggregate(&p).unwrap();
        let b = aggregate_sequential(&p).unwrap();
        assert_eq!(a.heights, b.heights);
        assert_eq!(a.odometer, b.odometer);
    }
}
