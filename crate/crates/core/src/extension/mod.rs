//! Extension-operator side: `L^6` norms of `T f` through the convolution
//! identity, `L^2(sigma)` norms, the Foschi constant and Gaussian trial ratios.

mod foschi;
mod norms;
mod trial;

pub use foschi::{
    constants_report, foschi_constant, gaussian_ratio_oracle, holder_cap, ConstantsReport,
};
pub use norms::{
    extension_l6, extension_l6_norm, holder_bound_check, l2_norm, ratio_sweep, weighted_density_f,
    HolderCheck, L6Estimate, NormGrid, SweepRow,
};
pub use trial::TrialFunction;

use std::io::Write;

use crate::fmt::sig17;

/// CSV `delta,ratio,foschi,gap`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "delta,ratio,foschi,gap")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            sig17(r.delta),
            sig17(r.ratio),
            sig17(r.foschi),
            sig17(r.gap)
        )?;
    }
    Ok(())
}
