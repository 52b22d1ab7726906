use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{self, GridAxis};
use crate::model::ScenarioParams;

use super::{helstrom_one_shot, BoundReport};

/// One-shot report at every point of a rectangular grid, in grid order.
///
/// Axes override the corresponding fields of `base`; an `m` axis is ignored.
/// Points are evaluated independently, so the output does not depend on the
/// number of worker threads.
pub fn advantage_sweep(base: &ScenarioParams, axes: &[GridAxis]) -> Result<Vec<BoundReport>> {
    let points = grid::points(axes)?;
    let params: Vec<ScenarioParams> = points
        .iter()
        .map(|p| grid::apply(base, p))
        .collect::<Result<_>>()?;
    params.par_iter().map(helstrom_one_shot).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioKind;

    #[test]
    fn grid_rows_and_flags() {
        let base = ScenarioParams::new(ScenarioKind::Asymmetric, 0.0, 0.5, 0.5).unwrap();
        let axes = ["k:0.5:1:3".parse().unwrap(), "p1:0.1:0.9:5".parse().unwrap()];
        let rows = advantage_sweep(&base, &axes).unwrap();
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[0].params.k, 0.5);
        assert_eq!(rows[0].params.p1, 0.1);
        assert_eq!(rows[14].params.k, 1.0);
        // p1 = 0.1 and 0.3 lie below 1/3.
        for r in &rows {
            assert_eq!(r.forbidden, r.params.p1 < 1.0 / 3.0, "{:?}", r.params);
        }
    }

    #[test]
    fn sweep_validates_points() {
        let base = ScenarioParams::new(ScenarioKind::Symmetric, 1.0, 0.5, 0.5).unwrap();
        assert!(advantage_sweep(&base, &["p1:0.5:1.5:3".parse().unwrap()]).is_err());
        assert!(advantage_sweep(&base, &[]).is_err());
    }
}
