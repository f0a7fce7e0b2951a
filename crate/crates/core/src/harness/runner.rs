//! Cached, contraction-checked solves at single parameter points.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::cache::{cache_key, CacheEntry, SolutionCache};
use super::config::ExperimentConfig;
use super::HarnessError;
use crate::fem::{norm_h, norm_l, solve_ns, Discretization};
use crate::geometry::{Forcing, PullbackFields};

/// Picard iteration counts and the worst increment ratio seen so far.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PicardStats {
    pub solves: usize,
    pub cache_hits: usize,
    /// Linear solves per point → number of points.
    pub iteration_histogram: BTreeMap<u64, usize>,
    /// Largest ‖u_{n+2} − u_{n+1}‖ / ‖u_{n+1} − u_n‖ over all points.
    pub worst_ratio: f64,
}

impl PicardStats {
    pub fn max_iterations(&self) -> u64 {
        self.iteration_histogram.keys().next_back().copied().unwrap_or(0)
    }

    pub fn summary(&self) -> String {
        format!(
            "{} solves ({} cached), Picard iterations {:?}, worst increment ratio {:.3e}",
            self.solves, self.cache_hits, self.iteration_histogram, self.worst_ratio
        )
    }
}

/// Solves the configured problem at parameter points, consulting the cache
/// and rejecting any Picard run whose increments fail to shrink.
pub struct Solver {
    disc: Arc<Discretization>,
    fields: PullbackFields,
    tol: f64,
    max_iter: usize,
    scope: String,
    cache: Option<SolutionCache>,
    stats: Mutex<PicardStats>,
}

impl Solver {
    pub fn new(cfg: &ExperimentConfig, cache: Option<SolutionCache>) -> Result<Self, HarnessError> {
        cfg.validate()?;
        let disc = Discretization::new(cfg.mesh.m, cfg.solver.discretization())?;
        let fields = PullbackFields::new(
            cfg.family.clone(),
            Forcing::Manufactured { scale: cfg.solver.force_scale },
            cfg.solver.convection,
        );
        Ok(Self {
            disc,
            fields,
            tol: cfg.solver.tol,
            max_iter: cfg.solver.max_iter,
            scope: cfg.solve_scope(),
            cache,
            stats: Mutex::new(PicardStats::default()),
        })
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn stats(&self) -> PicardStats {
        self.stats.lock().expect("stats lock").clone()
    }

    fn record(&self, y: &[f64], e: &CacheEntry, hit: bool) -> Result<(), HarnessError> {
        let ratios: Vec<f64> = e.increments.windows(2).map(|w| w[1] / w[0]).collect();
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        {
            let mut s = self.stats.lock().expect("stats lock");
            s.solves += 1;
            s.cache_hits += usize::from(hit);
            *s.iteration_histogram.entry(e.iterations).or_default() += 1;
            s.worst_ratio = s.worst_ratio.max(worst);
        }
        log::debug!("y = {y:?}: {} Picard solves, increments {:?}", e.iterations, e.increments);
        if ratios.iter().any(|r| !(*r < 1.0)) {
            return Err(HarnessError::NonContraction { y: y.to_vec(), increments: e.increments.clone() });
        }
        Ok(())
    }

    pub fn solve(&self, y: &[f64]) -> Result<CacheEntry, HarnessError> {
        let key = self.cache.as_ref().map(|_| cache_key(&self.scope, y));
        if let (Some(c), Some(k)) = (&self.cache, &key) {
            if let Some(e) = c.get(k) {
                self.record(y, &e, true)?;
                return Ok(e);
            }
        }
        let sol = solve_ns(&self.disc, &self.fields, y, self.tol, self.max_iter)?;
        let mesh = &self.disc.mesh;
        let entry = CacheEntry {
            norm_u: norm_h(mesh, &sol.u),
            norm_p: norm_l(mesh, &sol.p),
            iterations: sol.iterations as u64,
            increments: sol.increments,
            u: sol.u,
            p: sol.p,
        };
        self.record(y, &entry, false)?;
        if let (Some(c), Some(k)) = (&self.cache, &key) {
            c.put(k, &entry)?;
        }
        Ok(entry)
    }
}
