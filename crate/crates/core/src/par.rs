//! Execution strategy for the data-parallel loops of the crate.
//!
//! Every parallel loop has a sequential twin; results never depend on the
//! strategy. Without the `parallel` feature, [`Execution::Parallel`] silently
//! runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when parallel loops will actually fan out: the feature is on,
    /// the strategy asks for it and the pool has more than one thread.
    pub fn is_parallel(self) -> bool {
        self == Execution::Parallel && pool_is_wide()
    }
}

#[cfg(feature = "parallel")]
fn pool_is_wide() -> bool {
    rayon::current_num_threads() > 1
}

#[cfg(not(feature = "parallel"))]
fn pool_is_wide() -> bool {
    false
}

/// Runs `body` with the parallel branch when enabled, else the sequential one.
macro_rules! if_rayon {
    ($exec:expr, $par:expr, $seq:expr) => {{
        #[cfg(feature = "parallel")]
        {
            if $exec.is_parallel() {
                $par
            } else {
                $seq
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = $exec;
            $seq
        }
    }};
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if_rayon!(
        exec,
        items.par_iter().map(&f).collect(),
        items.iter().map(&f).collect()
    )
}

/// Applies `f` to every element; stops early and returns `None` if any call does.
pub fn try_for_each_mut<T, F>(exec: Execution, items: &mut [T], min_len: usize, f: F) -> Option<()>
where
    T: Send,
    F: Fn(&mut T) -> Option<()> + Sync + Send,
{
    if items.len() < min_len {
        return items.iter_mut().try_for_each(&f);
    }
    if_rayon!(
        exec,
        items
            .par_iter_mut()
            .with_min_len(min_len / 4 + 1)
            .try_for_each(&f),
        items.iter_mut().try_for_each(&f)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order_under_both_strategies() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[31], 961);
    }

    #[test]
    fn try_for_each_mut_short_circuits() {
        let mut xs: Vec<i32> = (0..500).collect();
        let r = try_for_each_mut(Execution::Parallel, &mut xs, 8, |x| {
            *x += 1;
            (*x != 250).then_some(())
        });
        assert!(r.is_none());
        let mut ys: Vec<i32> = (0..500).collect();
        assert!(try_for_each_mut(Execution::Sequential, &mut ys, 8, |y| {
            *y *= 2;
            Some(())
        })
        .is_some());
        assert_eq!(ys[499], 998);
    }

    /// The host may have a single core; force a wide pool so the rayon
    /// branches run and must agree with the sequential ones.
    #[cfg(feature = "parallel")]
    #[test]
    fn wide_pool_matches_sequential() {
        use crate::snf::{smith_normal_form_with, SnfOptions};
        use crate::tower::{analyze_tower, TowerSpec};
        use crate::voltage::{derive, voltage_laplacian, VoltageAssignment};

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let va = VoltageAssignment::single_voltage_complete(4, 2).unwrap();
        let l = crate::jacobian::laplacian(&derive(&va, 5).unwrap().graph);
        let seq = |execution| TowerSpec {
            execution,
            ..TowerSpec::new(va.clone(), 4)
        };
        let (snf, tower, det) = pool.install(|| {
            assert!(Execution::Parallel.is_parallel());
            let snf = smith_normal_form_with(&l, SnfOptions::default());
            let tower = analyze_tower(&seq(Execution::Parallel)).unwrap();
            let det = voltage_laplacian(&va).determinant_with(Execution::Parallel);
            (snf, tower, det)
        });
        let sequential = SnfOptions {
            execution: Execution::Sequential,
            ..Default::default()
        };
        assert_eq!(snf, smith_normal_form_with(&l, sequential));
        assert_eq!(tower, analyze_tower(&seq(Execution::Sequential)).unwrap());
        assert_eq!(
            det,
            voltage_laplacian(&va).determinant_with(Execution::Sequential)
        );
    }
}
