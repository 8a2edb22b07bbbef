//! Gray-mapped QAM over AWGN with maximum-likelihood demapping.

use cdu_jcas::modem::{build_constellation, demap_ml};
use cdu_jcas::scene::complex_gaussian;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cdu_jcas::Result<()> {
    let symbols = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("order  Es/N0 dB        BER        SER");
    for order in [4usize, 16, 64] {
        let c = build_constellation(order)?;
        for snr_db in [6.0, 10.0, 14.0, 18.0] {
            let n0 = c.average_energy() / 10f64.powf(snr_db / 10.0);
            let (mut bit_err, mut sym_err) = (0usize, 0usize);
            for _ in 0..symbols {
                let label = rng.random_range(0..order);
                let y = c.points()[label] + complex_gaussian(&mut rng, n0);
                let (got, _) = demap_ml(y, &c)?;
                if got != label {
                    sym_err += 1;
                    bit_err += c
                        .bits_of(got)
                        .zip(c.bits_of(label))
                        .filter(|(a, b)| a != b)
                        .count();
                }
            }
            println!(
                "{order:>5}  {snr_db:>8.1}  {:>9.3e}  {:>9.3e}",
                bit_err as f64 / (symbols * c.bits_per_symbol()) as f64,
                sym_err as f64 / symbols as f64
            );
        }
    }
    Ok(())
}
