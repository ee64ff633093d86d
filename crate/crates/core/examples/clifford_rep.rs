//! Build the complex spinor representation in dimensions 2..=7 and check the relations.

use flowspin::clifford::CliffordRep;
use flowspin::linalg::{c, eye, max_abs};

fn main() -> flowspin::error::Result<()> {
    for n in 2..=7 {
        let rep = CliffordRep::new(n)?;
        let s = rep.spinor_dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let anti = rep.gamma(j) * rep.gamma(k) + rep.gamma(k) * rep.gamma(j);
                let want = if j == k { eye(s) * c(-2.0) } else { eye(s) * c(0.0) };
                worst = worst.max(max_abs(&(anti - want)));
            }
        }
        let (pp, pm) = rep.xi_projectors();
        println!(
            "n = {n}: spinors C^{s}, rank Sigma+ = {}, volume sign {:?}, relation defect {worst:.1e}",
            pp.trace().re.round(),
            rep.volume_sign()
        );
        assert!(max_abs(&(&pp + &pm - eye(s))) < 1e-12);
    }
    Ok(())
}
