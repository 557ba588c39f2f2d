//! File formats, reports, box quadrature, the verification suite and the
//! command-line front end for [`nonholo_core`].
//!
//! Reports are JSON and trajectories CSV; both carry the schema tag
//! [`SCHEMA`].

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod quadrature;
pub mod report;
pub mod system;
pub mod trajectory_csv;
pub mod verify;

pub use error::{Error, Result};

pub const SCHEMA: &str = "nonholo/1";

/// Rayon pool sized by `NONHOLO_THREADS` when set, the default otherwise.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("NONHOLO_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Usage(format!("NONHOLO_THREADS=`{v}` is not a positive integer")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Usage(e.to_string()))
}

/// Unit vector in the plane orthogonal to `n` at angle `theta` from a fixed
/// reference direction.
pub fn tangent_velocity(n: &[f64; 3], theta: f64) -> [f64; 3] {
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let nn = dot(n, n).sqrt();
    let nh = n.map(|v| v / nn);
    let a = if nh[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let k = dot(&a, &nh);
    let e1: [f64; 3] = std::array::from_fn(|i| a[i] - k * nh[i]);
    let l = dot(&e1, &e1).sqrt();
    let e1 = e1.map(|v| v / l);
    let e2 = [
        nh[1] * e1[2] - nh[2] * e1[1],
        nh[2] * e1[0] - nh[0] * e1[2],
        nh[0] * e1[1] - nh[1] * e1[0],
    ];
    std::array::from_fn(|i| theta.cos() * e1[i] + theta.sin() * e2[i])
}
