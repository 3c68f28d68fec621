//! Many graphs at once. With the `parallel` feature the work is spread over
//! a rayon pool; results keep input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cfg::Cfg;
use crate::error::PipelineError;
use crate::plan::{run_pipeline, Analysis};

pub fn map_batch<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_batch_sequential(items, f)
    }
}

pub fn map_batch_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn analyze_batch(cfgs: &[Cfg]) -> Vec<Result<Analysis, PipelineError>> {
    map_batch(cfgs, run_pipeline)
}

pub fn analyze_batch_sequential(cfgs: &[Cfg]) -> Vec<Result<Analysis, PipelineError>> {
    map_batch_sequential(cfgs, run_pipeline)
}
