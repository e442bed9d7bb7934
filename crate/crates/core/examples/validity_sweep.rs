//! Random qubit and qutrit evolutions: every bound against the first-passage time.

use qsl_lab::scenario::{sweep_instance, sweep_report};

fn main() -> qsl_lab::Result<()> {
    for dim in [2, 3] {
        let (mut valid, mut ordered, n) = (0, 0, 100);
        let mut tightest: f64 = 0.0;
        for i in 0..n {
            let inst = sweep_instance(dim, 42, i)?;
            let rep = sweep_report(&inst, 1e-11)?;
            valid += (rep.valid(1e-8) == Some(true)) as usize;
            ordered += rep.ordered(1e-8) as usize;
            tightest = tightest.max(rep.tl / rep.actual_time.unwrap_or(f64::INFINITY));
        }
        println!(
            "dim {dim}: valid {valid}/{n}, ordered {ordered}/{n}, largest tl/actual {tightest:.4}"
        );
    }
    Ok(())
}
