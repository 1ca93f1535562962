//! The BSC figure: the lower bound, the symmetric genie bound, sphere
//! packing, the straight line and the amended bound, uniform input and a
//! binary side output.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use classic_bounds::{interior_grid, straight_line_bound, BscLowerBoundParams};
use numeric_kernels::OptimizerConfig;

use crate::spec::{ChannelSpec, RateUnit};
use crate::suite::{run_suite, Bound};
use crate::table::{CurveTable, Flag};
use crate::CliError;

pub const FIGURE_RATES: usize = 20;

pub fn figure_bsc(p: f64, cfg: &OptimizerConfig) -> Result<CurveTable, CliError> {
    let params = BscLowerBoundParams::new(p).map_err(|source| CliError::Bound { bound: "figure".into(), source })?;
    let rates = interior_grid(params.capacity(), FIGURE_RATES);
    let spec = ChannelSpec::bsc(p, rates, cfg.clone()).map_err(|source| CliError::Bound { bound: "figure".into(), source })?;
    let which: BTreeSet<Bound> = [Bound::Lb, Bound::BarSym, Bound::Sp, Bound::SlSp, Bound::B].into();
    let mut table = run_suite(&spec, &which)?;
    let (_, tangent) = straight_line_bound(&spec.channel, &spec.metric, &spec.rates, cfg)
        .map_err(|source| CliError::Bound { bound: "E_sl_sp".into(), source })?;
    table.flags.extend(improvement_flags(&table, tangent.rate));
    Ok(table)
}

/// Strict improvement of the symmetric genie bound below the tangency rate.
fn improvement_flags(table: &CurveTable, tangent_rate: f64) -> Vec<Flag> {
    let (Some(sym), Some(sl), Some(b), Some(sp)) =
        (table.column("E_bar_sym"), table.column("E_sl_sp"), table.column("E_B"), table.column("E_sp"))
    else {
        return Vec::new();
    };
    let best = table
        .rates
        .iter()
        .enumerate()
        .filter(|(_, &r)| r < tangent_rate)
        .map(|(k, _)| (k, sl[k] - sym[k]))
        .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
            Some(a) if a.1 >= cur.1 => Some(a),
            _ => Some(cur),
        });
    let Some((k, margin)) = best else {
        return vec![Flag { name: "E_bar_sym < E_sl_sp below R*".into(), ok: false, detail: "no grid rate below R*".into() }];
    };
    let r = table.rates[k];
    vec![
        Flag {
            name: "E_bar_sym < E_sl_sp below R*".into(),
            ok: margin > 0.0,
            detail: format!("margin {margin:.6e} at R={r:.6} (R*={tangent_rate:.6})"),
        },
        Flag { name: "E_bar_sym < E_B at that rate".into(), ok: sym[k] < b[k], detail: format!("margin {:.6e}", b[k] - sym[k]) },
        Flag { name: "E_bar_sym < E_sp at that rate".into(), ok: sym[k] < sp[k], detail: format!("margin {:.6e}", sp[k] - sym[k]) },
    ]
}

/// Writes `figure_bsc.csv` (nats) and `figure_bsc.dat` (bits) into `dir`.
pub fn write_figure(table: &CurveTable, dir: &Path) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv = dir.join("figure_bsc.csv");
    fs::write(&csv, table.to_csv()).map_err(io(&csv))?;
    let dat = dir.join("figure_bsc.dat");
    fs::write(&dat, table.in_unit(RateUnit::Bits).to_plot_data()).map_err(io(&dat))?;
    Ok(())
}
