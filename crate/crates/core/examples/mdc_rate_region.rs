//! Compression rates of a pair of descriptions and the convex upper bounds the
//! optimizer works with.

use fronthaul_mdc::channel::{received_covariance, sample_channel, ChannelSizes, Geometry, PowerSplit};
use fronthaul_mdc::error::Result;
use fronthaul_mdc::linalg::HermitianMatrix;
use fronthaul_mdc::rate_region::{g_individual, g_sum, surrogate_g1, surrogate_gsum, LinearizationPoint, MdcQuantizer};

fn main() -> Result<()> {
    let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 316.2, 4)?;
    let sigma_y = received_covariance(&ch);
    let at = LinearizationPoint {
        split: PowerSplit::even(2, ch.power()),
        quantizer: MdcQuantizer::scaled_identity(2, 1.0),
    };

    println!("{:>6} {:>6} | {:>8} {:>8} | {:>8} {:>8}", "omega", "omega0", "g1", "g1~", "g_sum", "g_sum~");
    for &w in &[0.25, 1.0, 4.0] {
        for &w0 in &[0.1, 1.0, 10.0] {
            let q = MdcQuantizer::new(HermitianMatrix::scaled_identity(2, w), HermitianMatrix::scaled_identity(2, w0))?;
            println!(
                "{w:>6} {w0:>6} | {:>8.4} {:>8.4} | {:>8.4} {:>8.4}",
                g_individual(&sigma_y, &q)?,
                surrogate_g1(&q, &at, &sigma_y)?,
                g_sum(&sigma_y, &q)?,
                surrogate_gsum(&q, &at, &sigma_y)?,
            );
        }
    }
    // The bounds touch the exact rates at the expansion point (omega = omega0 = 1).
    Ok(())
}
