//! Scan the kernel dimension of the TKS system on the round 3-sphere.

use flowspin::clifford::CliffordRep;
use flowspin::frame::FlowGeometry;
use flowspin::tks::{default_grid, scan_params, write_scan_csv};
use flowspin::zoo::round_s3;

fn main() -> flowspin::error::Result<()> {
    let mf = round_s3()?;
    let geo = FlowGeometry::new(&mf)?;
    let rep = CliffordRep::new(3)?;
    let rows = scan_params(&geo, &rep, &default_grid(), &default_grid())?;
    let hits: Vec<_> = rows.into_iter().filter(|r| r.kernel_dim > 0).collect();
    write_scan_csv(&hits, std::io::stdout().lock())?;
    Ok(())
}
