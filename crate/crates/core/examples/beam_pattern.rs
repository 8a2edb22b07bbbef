//! Steering vector and least-squares beam of the 8x8 base-station array,
//! pointed at the default target, with an azimuth cut of the pattern.

use std::f64::consts::PI;

use cdu_jcas::array::{
    ls_transmit_beamformer, sensing_receive_beamformer, steering_element, Angle2D, ArrayGeometry,
};
use cdu_jcas::scene::{OfdmNumerology, Scene};
use cdu_jcas::C64;

fn main() -> cdu_jcas::Result<()> {
    let nm = OfdmNumerology::default();
    let geom = ArrayGeometry::half_wavelength(8, 8, nm.wavelength_m())?;
    let scene = Scene::default();
    let target = scene.target_direction(0)?;
    println!(
        "target at azimuth {:.3} deg, elevation {:.3} deg",
        target.azimuth_rad.to_degrees(),
        target.elevation_rad.to_degrees()
    );
    println!("a[1,2] = {:.6}", steering_element(&geom, target, 1, 2)?);

    let tx = ls_transmit_beamformer(&geom, target, C64::new(1.0, 0.0))?;
    let rx = sensing_receive_beamformer(&tx);
    println!(
        "tx gain toward target  {:.3e}",
        tx.transmit_gain(&geom, target)
    );
    println!(
        "rx gain toward target  {:.3e}",
        rx.receive_gain(&geom, target)
    );

    // cut through boresight in the plane that contains the target; negative
    // angles lie on the opposite azimuth
    println!("\ncut through the target plane, angle from boresight (power, dB)");
    let phi = target.azimuth_rad;
    let opposite = if phi < 0.0 { phi + PI } else { phi - PI };
    for step in -30..=30 {
        let theta = step as f64 * 1.0f64.to_radians();
        let dir = if theta >= 0.0 {
            Angle2D::new(phi, theta)?
        } else {
            Angle2D::new(opposite, -theta)?
        };
        let g = tx.transmit_gain(&geom, dir).norm_sqr();
        let db = 10.0 * g.max(1e-6).log10();
        let bar = "#".repeat(((db + 40.0).max(0.0) / 1.5) as usize);
        println!("{:>6.1} deg {db:>7.1} {bar}", theta.to_degrees());
    }
    Ok(())
}
