//! Layer rates of one random channel as the power split moves from all
//! layer 2 to all layer 1.
//!
//! cargo run --example channel_rates -- [snr_db] [seed]

use fronthaul_mdc::channel::{layer1_sum_rate, layer2_sum_rate, pd_sum_rate, sample_channel, ChannelSizes, Geometry, PowerSplit};
use fronthaul_mdc::linalg::HermitianMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(25.0);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let power = 10f64.powf(snr_db / 10.0);
    let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, power, seed)?;
    let omega = HermitianMatrix::scaled_identity(2, 0.1);

    println!("SNR {snr_db} dB, seed {seed}, quantization noise 0.1 I on both descriptions");
    println!("unquantized sum-rate  {:.4}", pd_sum_rate(&ch, &HermitianMatrix::zeros(2))?);
    println!("quantized sum-rate    {:.4}\n", pd_sum_rate(&ch, &omega)?);
    println!("{:>8} {:>10} {:>10} {:>10}", "P1/P", "f1", "f2", "f1+f2");
    for i in 0..=10 {
        let frac = i as f64 / 10.0;
        let split = PowerSplit::from_layer1(vec![frac * power; 2], power)?;
        let f1 = layer1_sum_rate(&ch, &split, &omega)?;
        let f2 = layer2_sum_rate(&ch, &split, &omega)?;
        println!("{frac:>8.1} {f1:>10.4} {f2:>10.4} {:>10.4}", f1 + f2);
    }
    Ok(())
}
