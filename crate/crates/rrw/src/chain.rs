//! Exact evolution of the discrete master equation for the restricted
//! random walker, first-return-time extraction, a seeded Monte Carlo
//! simulator, and a tridiagonal mean-first-passage solver.
//!
//! The walker lives on `{0, 1, ..., L}` and attempts a move at site `n`
//! with probability `g(n) = (n/L)^a`, going up or down with probability
//! `g(n)/2` each.  The bulk update is
//!
//! ```text
//! p'(n) = p(n) + g(n-1)/2 p(n-1) + g(n+1)/2 p(n+1) - g(n) p(n)
//! ```
//!
//! Site 0 absorbs (`g(0) = 0`, mass only accumulates).  Site L reflects by
//! deleting the upward channel: the walker moves down with probability
//! `g(L)/2` and stays with `1 - g(L)/2`, which conserves probability
//! without modifying the `n = L - 1` row.
//!
//! Mass is monitored, never renormalized: a drift beyond `1e-12` is a
//! kernel bug and surfaces as an error.

use crate::error::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Absolute tolerance on `|sum p - 1|`.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Steps between full mass-conservation scans in the long-horizon drivers.
/// (Drift is cumulative, so a periodic scan loses no faults; the single-step
/// [`step_distribution`] checks unconditionally.)
const CHECK_INTERVAL: u64 = 4096;

/// Behaviour of the top boundary.  Only the half-reflect rule is defined:
/// at `n = L` the upward channel of the process is deleted and the walker
/// moves down with probability `g(L)/2`, staying otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopBoundary {
    #[default]
    HalfReflect,
}

/// The model: exponent `a`, system size `L`, top boundary rule.  The single
/// source of truth for `g(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSpec {
    a: f64,
    size: usize,
    top: TopBoundary,
}

impl WalkSpec {
    /// Requires `0 <= a < 2` and `L >= 2`.  `a = 0` is admitted as the
    /// simple-walk baseline; `a = 2` is excluded (the continuum order
    /// `1/(2-a)` diverges).
    pub fn new(a: f64, size: usize) -> Result<Self> {
        if !a.is_finite() || !(0.0..2.0).contains(&a) {
            return Err(Error::InvalidParameter(format!(
                "exponent a must lie in [0, 2), got {a}"
            )));
        }
        if size < 2 {
            return Err(Error::InvalidParameter(format!(
                "system size must be >= 2, got {size}"
            )));
        }
        Ok(Self {
            a,
            size,
            top: TopBoundary::HalfReflect,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.a
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn top_boundary(&self) -> TopBoundary {
        self.top
    }

    /// Move-attempt probability `g(n) = (n/L)^a`.
    ///
    /// `g(0)` is exactly 0 for every `a` including `a = 0` (absorption wins
    /// the `0^0` ambiguity) and `g(L)` is exactly 1.
    pub fn hop_probability(&self, n: usize) -> f64 {
        debug_assert!(n <= self.size);
        if n == 0 {
            0.0
        } else if n == self.size {
            1.0
        } else {
            (n as f64 / self.size as f64).powf(self.a)
        }
    }
}

/// Probability vector over sites `{0..L}` at a discrete time step.
///
/// The absorbed mass at site 0 is held in a compensated accumulator so that
/// hundreds of millions of tiny increments do not drift; the interior sites
/// live in a vector with ghost zeros at both ends (index 0 and L+1).
#[derive(Debug, Clone)]
pub struct ProbState {
    interior: Vec<f64>,
    absorbed: f64,
    absorbed_c: f64,
    step: u64,
}

impl ProbState {
    /// All mass on one site.  `site = 0` places it on the absorber.
    pub fn point_mass(spec: &WalkSpec, site: usize) -> Result<Self> {
        if site > spec.size() {
            return Err(Error::InvalidParameter(format!(
                "site {site} outside 0..={}",
                spec.size()
            )));
        }
        let mut interior = vec![0.0; spec.size() + 2];
        let mut absorbed = 0.0;
        if site == 0 {
            absorbed = 1.0;
        } else {
            interior[site] = 1.0;
        }
        Ok(Self {
            interior,
            absorbed,
            absorbed_c: 0.0,
            step: 0,
        })
    }

    /// Probability at site `n` (`n = 0` is the absorbed mass).
    pub fn site(&self, n: usize) -> f64 {
        if n == 0 {
            self.absorbed
        } else {
            self.interior[n]
        }
    }

    pub fn absorbed(&self) -> f64 {
        self.absorbed
    }

    pub fn time_step(&self) -> u64 {
        self.step
    }

    /// Compensated total mass over all sites including the absorber.
    pub fn total_mass(&self) -> f64 {
        let (sum, comp) = neumaier(&self.interior);
        sum + (comp + self.absorbed_c) + self.absorbed
    }

    fn absorb(&mut self, inc: f64) {
        // Kahan step: the absorber receives ~1e-10-relative increments for
        // 1e8 steps; naive accumulation would drift past the tolerance.
        let y = inc - self.absorbed_c;
        let t = self.absorbed + y;
        self.absorbed_c = (t - self.absorbed) - y;
        self.absorbed = t;
    }

    fn verify(&self) -> Result<()> {
        let total = self.total_mass();
        if !total.is_finite() {
            return Err(Error::NonFinite { step: self.step });
        }
        let drift = (total - 1.0).abs();
        if drift > MASS_TOLERANCE {
            return Err(Error::MassConservation {
                step: self.step,
                drift,
            });
        }
        Ok(())
    }
}

fn neumaier(xs: &[f64]) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    (sum, comp)
}

/// Reusable evolution kernel: precomputed hop weights and a scratch buffer,
/// O(L) per step with no allocation.
///
/// `step` applies one master-equation update into a fresh buffer (no
/// in-place aliasing) and returns the absorbed increment `g(1)/2 * p(1)`.
/// It performs no invariant checks; the drivers and [`step_distribution`]
/// do.
pub struct Evolver {
    half_g: Vec<f64>,
    stay: Vec<f64>,
    scratch: Vec<f64>,
    size: usize,
}

impl Evolver {
    pub fn new(spec: &WalkSpec) -> Self {
        let l = spec.size();
        let mut half_g = vec![0.0; l + 2];
        let mut stay = vec![0.0; l + 2];
        for n in 1..=l {
            let g = spec.hop_probability(n);
            half_g[n] = 0.5 * g;
            stay[n] = 1.0 - g;
        }
        stay[l] = 1.0 - half_g[l]; // half-reflect: upward channel removed
        Self {
            half_g,
            stay,
            scratch: vec![0.0; l + 2],
            size: l,
        }
    }

    pub fn step(&mut self, state: &mut ProbState) -> f64 {
        let l = self.size;
        let p = &state.interior;
        let out = &mut self.scratch;
        let hg = &self.half_g;
        let stay = &self.stay;
        assert!(p.len() == l + 2 && out.len() == l + 2 && hg.len() == l + 2 && stay.len() == l + 2);
        for n in 1..=l {
            out[n] = stay[n] * p[n] + hg[n - 1] * p[n - 1] + hg[n + 1] * p[n + 1];
        }
        out[0] = 0.0;
        out[l + 1] = 0.0;
        let inflow = hg[1] * p[1];
        std::mem::swap(&mut state.interior, &mut self.scratch);
        state.absorb(inflow);
        state.step += 1;
        inflow
    }
}

/// One master-equation step as a pure function, with the mass-conservation
/// check applied.  For long evolutions prefer [`return_distribution`] or an
/// explicit [`Evolver`], which reuse buffers.
pub fn step_distribution(spec: &WalkSpec, state: &ProbState) -> Result<ProbState> {
    let mut next = state.clone();
    Evolver::new(spec).step(&mut next);
    next.verify()?;
    Ok(next)
}

/// Discrete first-return-time distribution `P_R(0, s)` for `s = 1..=s_max`,
/// with the captured (absorbed) mass over that horizon.
#[derive(Debug, Clone)]
pub struct ReturnSeries {
    values: Vec<f64>,
    captured: f64,
}

impl ReturnSeries {
    /// Wrap an explicit distribution (used for synthetic series); the
    /// captured mass is its compensated sum.
    pub fn from_values(values: Vec<f64>) -> Self {
        let (s, c) = neumaier(&values);
        Self {
            values,
            captured: s + c,
        }
    }

    pub(crate) fn with_captured(values: Vec<f64>, captured: f64) -> Self {
        Self { values, captured }
    }

    pub fn horizon(&self) -> u64 {
        self.values.len() as u64
    }

    /// `P_R(0, s)`, 1-based in `s`.
    pub fn value(&self, s: u64) -> f64 {
        self.values[s as usize - 1]
    }

    /// All values, index `i` holding `s = i + 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn captured_mass(&self) -> f64 {
        self.captured
    }
}

fn drive<F: FnMut(u64, f64)>(spec: &WalkSpec, s_max: u64, mut on_step: F) -> Result<f64> {
    let mut evolver = Evolver::new(spec);
    let mut state = ProbState::point_mass(spec, 1)?;
    for s in 1..=s_max {
        let inc = evolver.step(&mut state);
        on_step(s, inc);
        if s % CHECK_INTERVAL == 0 {
            state.verify()?;
        }
    }
    state.verify()?;
    Ok(state.absorbed())
}

/// Evolve the master equation from `p(1) = 1` and record the absorbed
/// increment at every step: `p_r(s+1) = p(0, s+1) - p(0, s)`, which the
/// kernel produces directly as the boundary inflow `g(1)/2 * p(1, s)`.
/// In particular `p_r(1) = g(1)/2` exactly.
pub fn return_distribution(spec: &WalkSpec, s_max: u64) -> Result<ReturnSeries> {
    if s_max == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    let mut values = Vec::with_capacity(s_max as usize);
    let captured = drive(spec, s_max, |_, inc| values.push(inc))?;
    Ok(ReturnSeries::with_captured(values, captured))
}

/// Captured (absorbed) mass at each requested step, without storing the
/// full series.  `checkpoints` must be strictly increasing.
pub fn captured_mass_at(spec: &WalkSpec, checkpoints: &[u64]) -> Result<Vec<f64>> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be non-empty and strictly increasing".into(),
        ));
    }
    let s_max = *checkpoints.last().unwrap();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut evolver = Evolver::new(spec);
    let mut state = ProbState::point_mass(spec, 1)?;
    let mut next = 0usize;
    for s in 1..=s_max {
        evolver.step(&mut state);
        if s % CHECK_INTERVAL == 0 {
            state.verify()?;
        }
        if s == checkpoints[next] {
            out.push(state.absorbed());
            next += 1;
        }
    }
    state.verify()?;
    Ok(out)
}

/// Expected number of steps to first reach site 0 from every start site.
#[derive(Debug, Clone)]
pub struct MeanReturn {
    t: Vec<f64>,
}

impl MeanReturn {
    /// `t(n)`, with `t(0) = 0`.
    pub fn expected_steps(&self, n: usize) -> f64 {
        self.t[n]
    }

    /// `<s_R> = t(1)`: the mean first-return time from the launch site.
    pub fn from_first_site(&self) -> f64 {
        self.t[1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }
}

/// Solve the mean-first-passage system exactly (Thomas algorithm):
///
/// ```text
/// t(0) = 0
/// g(n) t(n) = 1 + g(n)/2 (t(n+1) + t(n-1)),   1 <= n <= L-1
/// g(L)/2 t(L) = 1 + g(L)/2 t(L-1)
/// ```
pub fn mean_return_exact(spec: &WalkSpec) -> Result<MeanReturn> {
    let l = spec.size();
    // Divide row n by g(n) > 0: (-1/2, 1, -1/2) bulk rows, (-1/2, 1/2) top.
    let rhs = |n: usize| 1.0 / spec.hop_probability(n);
    let mut c = vec![0.0; l + 1]; // modified super-diagonal
    let mut d = vec![0.0; l + 1]; // modified right-hand side
    c[1] = -0.5;
    d[1] = rhs(1);
    for n in 2..l {
        let denom = 1.0 + 0.5 * c[n - 1];
        c[n] = -0.5 / denom;
        d[n] = (rhs(n) + 0.5 * d[n - 1]) / denom;
    }
    let denom = 0.5 + 0.5 * c[l - 1];
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::InvalidParameter(
            "mean-return system is singular".into(),
        ));
    }
    d[l] = (rhs(l) + 0.5 * d[l - 1]) / denom;

    let mut t = vec![0.0; l + 1];
    t[l] = d[l];
    for n in (1..l).rev() {
        t[n] = d[n] - c[n] * t[n + 1];
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    if (1..=l).any(|n| t[n] <= t[n - 1]) {
        return Err(Error::InvalidParameter(
            "mean return times not strictly increasing".into(),
        ));
    }
    Ok(MeanReturn { t })
}

// Monte Carlo: walkers consume one u64 per step.  The top bit picks the
// direction, the low 63 bits decide the move attempt against a fixed
// threshold, so trajectories are bit-reproducible for a given seed.
const DIRECTION_BIT: u64 = 1 << 63;
const ROLL_MASK: u64 = DIRECTION_BIT - 1;
const WALKER_BLOCK: u64 = 1 << 16;

/// Empirical first-return histogram from `n_walkers` independent
/// trajectories started at `n = 1`, normalized by `n_walkers`.
///
/// Walkers are processed in fixed blocks of 65536, each on its own ChaCha8
/// stream derived from `seed`, so the output is byte-identical for a given
/// seed regardless of how blocks are scheduled.
pub fn simulate_walkers(
    spec: &WalkSpec,
    n_walkers: u64,
    s_max: u64,
    seed: u64,
) -> Result<ReturnSeries> {
    if n_walkers == 0 || s_max == 0 {
        return Err(Error::InvalidParameter(
            "need at least one walker and one step".into(),
        ));
    }
    let l = spec.size();
    // thresholds: move iff roll < g(n) * 2^63 (exactly 2^63 at n = L).
    let thresh: Vec<u64> = (0..=l)
        .map(|n| (spec.hop_probability(n) * DIRECTION_BIT as f64).round() as u64)
        .collect();

    let mut hist = vec![0u64; s_max as usize + 1];
    let mut absorbed = 0u64;
    let blocks = n_walkers.div_ceil(WALKER_BLOCK);
    for block in 0..blocks {
        let walkers = WALKER_BLOCK.min(n_walkers - block * WALKER_BLOCK);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        for _ in 0..walkers {
            let mut pos = 1usize;
            for s in 1..=s_max {
                let r = rng.next_u64();
                if (r & ROLL_MASK) < thresh[pos] {
                    if r & DIRECTION_BIT == 0 {
                        pos -= 1;
                    } else if pos < l {
                        pos += 1;
                    }
                    // pos == l with an upward draw: channel deleted, stay.
                }
                if pos == 0 {
                    hist[s as usize] += 1;
                    absorbed += 1;
                    break;
                }
            }
        }
    }
    let norm = n_walkers as f64;
    let values = hist[1..].iter().map(|&c| c as f64 / norm).collect();
    Ok(ReturnSeries::with_captured(values, absorbed as f64 / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state_from(spec: &WalkSpec, p: &[f64]) -> ProbState {
        let mut st = ProbState::point_mass(spec, 1).unwrap();
        st.interior.iter_mut().for_each(|v| *v = 0.0);
        st.absorbed = p[0];
        for (n, &v) in p.iter().enumerate().skip(1) {
            st.interior[n] = v;
        }
        st
    }

    fn dense(st: &ProbState, l: usize) -> Vec<f64> {
        (0..=l).map(|n| st.site(n)).collect()
    }

    #[test]
    fn spec_validation() {
        assert!(WalkSpec::new(2.0, 100).is_err());
        assert!(WalkSpec::new(-0.1, 100).is_err());
        assert!(WalkSpec::new(1.0, 1).is_err());
        assert!(WalkSpec::new(0.0, 2).is_ok());
    }

    #[test]
    fn hop_probability_values() {
        let spec = WalkSpec::new(1.0, 100).unwrap();
        assert_eq!(spec.hop_probability(50), 0.5);
        assert_eq!(spec.hop_probability(0), 0.0);
        assert_eq!(spec.hop_probability(100), 1.0);

        let spec = WalkSpec::new(0.75, 16).unwrap();
        assert_eq!(spec.hop_probability(16), 1.0);

        let spec = WalkSpec::new(1.25, 100).unwrap();
        let expect = 100f64.powf(-1.25);
        assert!((spec.hop_probability(1) - expect).abs() < 1e-18);
        assert!((expect - 3.1622776601683794e-3).abs() < 1e-15);

        // a = 0 keeps the absorbing convention g(0) = 0.
        let spec = WalkSpec::new(0.0, 8).unwrap();
        assert_eq!(spec.hop_probability(0), 0.0);
        assert_eq!(spec.hop_probability(1), 1.0);
    }

    #[test]
    fn step_by_hand_small_linear() {
        // L = 2, a = 1: g(1) = 1/2, g(2) = 1, half-reflect top.
        let spec = WalkSpec::new(1.0, 2).unwrap();
        let st = state_from(&spec, &[0.0, 1.0, 0.0]);
        let next = step_distribution(&spec, &st).unwrap();
        assert_eq!(dense(&next, 2), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn step_by_hand_simple_walk() {
        // L = 3, a = 0: g(n) = 1 for n >= 1.
        let spec = WalkSpec::new(0.0, 3).unwrap();
        let st = state_from(&spec, &[0.0, 1.0, 0.0, 0.0]);
        let next = step_distribution(&spec, &st).unwrap();
        assert_eq!(dense(&next, 3), vec![0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn absorbed_mass_is_invariant() {
        let spec = WalkSpec::new(0.9, 5).unwrap();
        let st = ProbState::point_mass(&spec, 0).unwrap();
        let next = step_distribution(&spec, &st).unwrap();
        assert_eq!(next.absorbed(), 1.0);
        assert_eq!(next.total_mass(), 1.0);
    }

    /// Independent oracle: evolve the full dense transition matrix by naive
    /// matrix-vector products and compare site by site.
    #[test]
    fn dense_matrix_oracle() {
        for &(a, l) in &[(0.0, 4usize), (0.5, 7), (1.0, 9), (1.3, 5), (1.9, 6)] {
            let spec = WalkSpec::new(a, l).unwrap();
            // column-stochastic matrix m[to][from]
            let mut m = vec![vec![0.0f64; l + 1]; l + 1];
            m[0][0] = 1.0;
            for from in 1..=l {
                let g = spec.hop_probability(from);
                m[from - 1][from] += 0.5 * g;
                if from < l {
                    m[from + 1][from] += 0.5 * g;
                    m[from][from] += 1.0 - g;
                } else {
                    m[from][from] += 1.0 - 0.5 * g;
                }
            }
            let mut reference = vec![0.0; l + 1];
            reference[1] = 1.0;
            let mut st = ProbState::point_mass(&spec, 1).unwrap();
            let mut ev = Evolver::new(&spec);
            for step in 0..60 {
                let next: Vec<f64> = (0..=l)
                    .map(|to| (0..=l).map(|from| m[to][from] * reference[from]).sum())
                    .collect();
                reference = next;
                ev.step(&mut st);
                for n in 0..=l {
                    assert!(
                        (st.site(n) - reference[n]).abs() < 1e-12,
                        "a={a} L={l} step={step} site={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn first_step_return_probability() {
        let spec = WalkSpec::new(1.0, 100).unwrap();
        let series = return_distribution(&spec, 10).unwrap();
        assert_eq!(series.value(1), 0.005);
    }

    /// Catalan first passage for the unrestricted simple walk:
    /// `p_r(2k-1) = C_{k-1} / 2^(2k-1)`, zero at even steps.  L = 64 keeps
    /// the top boundary out of reach for s <= 11.
    #[test]
    fn catalan_oracle_simple_walk() {
        let spec = WalkSpec::new(0.0, 64).unwrap();
        let series = return_distribution(&spec, 11).unwrap();
        let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0];
        for k in 1..=6u32 {
            let s = 2 * k as u64 - 1;
            let expect = catalan[k as usize - 1] / 2f64.powi(2 * k as i32 - 1);
            assert!(
                (series.value(s) - expect).abs() < 1e-15,
                "s={s}: {} vs {expect}",
                series.value(s)
            );
            if s + 1 <= series.horizon() {
                assert_eq!(series.value(s + 1), 0.0);
            }
        }
    }

    #[test]
    fn captured_mass_matches_absorbed_and_increments() {
        let spec = WalkSpec::new(1.0, 30).unwrap();
        let series = return_distribution(&spec, 5_000).unwrap();
        let direct: f64 = series.values().iter().sum();
        assert!((series.captured_mass() - direct).abs() < 1e-12);
        assert!(series.captured_mass() <= 1.0 + MASS_TOLERANCE);
        // monotone accumulation: all increments nonnegative
        assert!(series.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn captured_mass_checkpoints_agree_with_series() {
        let spec = WalkSpec::new(0.8, 25).unwrap();
        let series = return_distribution(&spec, 2_000).unwrap();
        let caps = captured_mass_at(&spec, &[100, 500, 2_000]).unwrap();
        for (i, &s) in [100u64, 500, 2_000].iter().enumerate() {
            let prefix: f64 = series.values()[..s as usize].iter().sum();
            assert!((caps[i] - prefix).abs() < 1e-12);
        }
        assert!(caps[0] <= caps[1] && caps[1] <= caps[2]);
    }

    #[test]
    fn mean_return_two_site_hand_solve() {
        let spec = WalkSpec::new(0.0, 2).unwrap();
        let mr = mean_return_exact(&spec).unwrap();
        assert!((mr.from_first_site() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mean_return_simple_walk_telescoped() {
        // Half-reflect top gives t(1) = 2L for a = 0.
        for &l in &[2usize, 5, 17, 100, 1000] {
            let spec = WalkSpec::new(0.0, l).unwrap();
            let mr = mean_return_exact(&spec).unwrap();
            let expect = 2.0 * l as f64;
            assert!(
                (mr.from_first_site() - expect).abs() < expect * 1e-12,
                "L={l}: {}",
                mr.from_first_site()
            );
        }
    }

    /// Telescoping the difference equation gives the closed form
    /// `t(1) = 2 sum_{m=1..L} (L/m)^a`, an independent route to the same
    /// quantity as the tridiagonal solve.
    #[test]
    fn mean_return_matches_closed_form_sum() {
        for &a in &[0.0, 0.5, 1.0, 1.5, 1.9] {
            for &l in &[2usize, 13, 200, 4096] {
                let spec = WalkSpec::new(a, l).unwrap();
                let mr = mean_return_exact(&spec).unwrap();
                let lf = l as f64;
                let closed: f64 = (1..=l).rev().map(|m| 2.0 * (lf / m as f64).powf(a)).sum();
                let rel = (mr.from_first_site() - closed).abs() / closed;
                assert!(rel < 1e-11, "a={a} L={l}: rel={rel:e}");
            }
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let spec = WalkSpec::new(1.0, 20).unwrap();
        let one = simulate_walkers(&spec, 100_000, 4_000, 7).unwrap();
        let two = simulate_walkers(&spec, 100_000, 4_000, 7).unwrap();
        assert_eq!(one.values(), two.values());
        assert_eq!(one.captured_mass(), two.captured_mass());
        let other = simulate_walkers(&spec, 100_000, 4_000, 8).unwrap();
        assert_ne!(one.values(), other.values());
    }

    #[test]
    fn simulation_first_step_frequency() {
        // p_r(1) = g(1)/2 = 0.01 at a = 1, L = 50; 3 sigma binomial band.
        let spec = WalkSpec::new(1.0, 50).unwrap();
        let n = 1_000_000u64;
        let series = simulate_walkers(&spec, n, 25_000, 123).unwrap();
        let p = 0.01;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (series.value(1) - p).abs() < 3.0 * sigma,
            "{} vs {p} (sigma {sigma:e})",
            series.value(1)
        );
    }

    #[test]
    fn simulation_matches_master_equation_bins() {
        let spec = WalkSpec::new(0.0, 64).unwrap();
        let n = 1_000_000u64;
        let s_max = 2_000u64;
        let mc = simulate_walkers(&spec, n, s_max, 42).unwrap();
        let exact = return_distribution(&spec, s_max).unwrap();
        let mut bad = 0usize;
        for s in 1..=s_max {
            let p = exact.value(s);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            if (mc.value(s) - p).abs() > 4.0 * sigma.max(1e-12) {
                bad += 1;
            }
        }
        // >= 99% of bins within 4 binomial standard errors
        assert!(
            (bad as f64) < 0.01 * s_max as f64,
            "{bad} bins out of band"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Mass conservation and positivity over random short evolutions.
        #[test]
        fn mass_conserved_and_nonnegative(a in 0.0f64..1.99, l in 2usize..40, steps in 1u64..200) {
            let spec = WalkSpec::new(a, l).unwrap();
            let mut st = ProbState::point_mass(&spec, 1).unwrap();
            let mut ev = Evolver::new(&spec);
            let mut prev_absorbed = 0.0;
            for _ in 0..steps {
                ev.step(&mut st);
                prop_assert!((st.total_mass() - 1.0).abs() < MASS_TOLERANCE);
                prop_assert!(st.interior.iter().all(|&p| p >= 0.0));
                // absorption monotone in s
                prop_assert!(st.absorbed() >= prev_absorbed);
                prev_absorbed = st.absorbed();
            }
        }

        /// Mean return times strictly increase in the start site.
        #[test]
        fn mean_return_strictly_increasing(a in 0.0f64..1.99, l in 2usize..60) {
            let spec = WalkSpec::new(a, l).unwrap();
            let mr = mean_return_exact(&spec).unwrap();
            for n in 1..=l {
                prop_assert!(mr.expected_steps(n) > mr.expected_steps(n - 1));
            }
        }
    }
}
