use super::{f2p, EigResult, F2PConfig, RunHistory};
use crate::error::{Error, Result};
use crate::filter::IntervalSpec;
use crate::linalg::{Block, SparseSymMatrix};
use crate::solver::SolverConfig;

/// Windows are split into this many equal parts when picking the next upper
/// end.
const SUBDIVISIONS: usize = 10;

/// Output of [`sweep_interval`].
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    /// `(a_w, b_w)` of every window, in order.
    pub windows: Vec<(f64, f64)>,
    /// Raw result of each window.
    pub per_window: Vec<EigResult>,
    pub histories: Vec<RunHistory>,
    /// Deduplicated eigenpairs inside `(a, b)`, decreasing.
    pub union: EigResult,
}

/// Two eigenvalues from different windows are the same eigenvalue.
pub(crate) fn same_eigenvalue(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(1.0)
}

/// Smallest grid point `a_w + j h`, `h = (b_w - a_w) / 10`, strictly above
/// `lam`, capped at `b_w`.
pub(crate) fn next_upper(a_w: f64, b_w: f64, lam: f64) -> f64 {
    let h = (b_w - a_w) / SUBDIVISIONS as f64;
    let grid = |j: usize| if j == SUBDIVISIONS { b_w } else { a_w + j as f64 * h };
    let mut j = (((lam - a_w) / h).floor() + 1.0).clamp(1.0, SUBDIVISIONS as f64) as usize;
    // grid points within rounding of `lam` count as equal to it
    let eps = 1e-12 * h;
    while j < SUBDIVISIONS && grid(j) <= lam + eps {
        j += 1;
    }
    while j > 1 && grid(j - 1) > lam + eps {
        j -= 1;
    }
    grid(j)
}

/// Finds all eigenvalues in `(a, b)` by sliding a window of width `b - a`
/// downwards, applying [`f2p`] to each window.
///
/// After a window returns `l_1 >= ... >= l_k`, the next window ends at the
/// right end of the tenth-subinterval holding `l_k`. The sweep stops once a
/// window returns nothing, fewer than `num_out` pairs, or a pair at or below
/// `a`.
pub fn sweep_interval(
    a: &SparseSymMatrix,
    lo: f64,
    hi: f64,
    cfg: &F2PConfig,
    radius: f64,
    solver: &SolverConfig,
) -> Result<SweepOutcome> {
    let delta = hi - lo;
    IntervalSpec::new(lo, hi, radius)?;
    let n = a.n();
    let mut out = SweepOutcome {
        windows: Vec::new(),
        per_window: Vec::new(),
        histories: Vec::new(),
        union: EigResult::empty(n),
    };
    let mut collected: Vec<(f64, Vec<f64>, f64)> = Vec::new();
    let mut b_w = hi;
    let mut prev_ends: Option<(f64, f64)> = None;

    for w in 0u64.. {
        let a_w = b_w - delta;
        let spec = IntervalSpec::new(a_w, b_w, radius)?;
        let wcfg = F2PConfig {
            seed: cfg.seed.wrapping_add(w),
            ..cfg.clone()
        };
        let (res, hist) = f2p(a, &wcfg, &spec, solver)?;
        log::info!(
            "sweep window {w}: ({a_w:.6}, {b_w:.6}) -> {} eigenvalues",
            res.len()
        );
        out.windows.push((a_w, b_w));
        out.histories.push(hist);

        for k in 0..res.len() {
            let v = res.values[k];
            if !(v > lo && v < hi) {
                continue;
            }
            let r = res.residuals[k];
            match collected.iter_mut().find(|(x, _, _)| same_eigenvalue(*x, v)) {
                Some(slot) if r < slot.2 => *slot = (v, res.vectors.col(k).to_vec(), r),
                Some(_) => {}
                None => collected.push((v, res.vectors.col(k).to_vec(), r)),
            }
        }

        let ends = res.values.first().copied().zip(res.values.last().copied());
        let found = res.len();
        out.per_window.push(res);
        let Some((lead, last)) = ends else { break };
        if last <= lo || found < cfg.num_out {
            break;
        }
        if let Some((prev_lead, prev)) = prev_ends {
            if same_eigenvalue(lead, prev_lead) || last > prev || same_eigenvalue(last, prev) {
                return Err(Error::NonProgress(last));
            }
        }
        prev_ends = Some((lead, last));
        b_w = next_upper(a_w, b_w, last);
    }

    collected.sort_by(|x, y| y.0.total_cmp(&x.0));
    let cols: Vec<Vec<f64>> = collected.iter().map(|c| c.1.clone()).collect();
    out.union = EigResult {
        values: collected.iter().map(|c| c.0).collect(),
        vectors: Block::from_columns(n, &cols)?,
        residuals: collected.iter().map(|c| c.2).collect(),
    };
    Ok(out)
}
