//! Propagation paths of the default scene and the per-element channel they
//! produce on the time-frequency grid.

use cdu_jcas::array::{ls_transmit_beamformer, ArrayGeometry};
use cdu_jcas::scene::{
    comm_channel, derive_paths, partition_paths, sensing_channel, OfdmNumerology, Scene,
};
use cdu_jcas::C64;

fn main() -> cdu_jcas::Result<()> {
    let nm = OfdmNumerology::default();
    let scene = Scene {
        nlos_paths: true,
        ..Scene::default()
    };
    let paths = derive_paths(&scene, &nm, 11)?;

    println!(
        "{:<12} {:>10} {:>10} {:>12} {:>10} {:>11}",
        "kind", "az_rx deg", "el_rx deg", "delay ns", "doppler Hz", "|b|"
    );
    for p in &paths {
        println!(
            "{:<12} {:>10.3} {:>10.3} {:>12.4} {:>10.2} {:>11.4e}",
            format!("{:?}", p.kind),
            p.angle_rx.azimuth_rad.to_degrees(),
            p.angle_rx.elevation_rad.to_degrees(),
            p.delay_s * 1e9,
            p.doppler_hz,
            p.amplitude.norm()
        );
    }
    println!(
        "target range {:.5} m, user range {:.4} m",
        scene.target_range_m(0),
        scene.user_range_m()
    );

    let bs = ArrayGeometry::half_wavelength(8, 8, nm.wavelength_m())?;
    let user = ArrayGeometry::half_wavelength(1, 1, nm.wavelength_m())?;
    let one = C64::new(1.0, 0.0);
    let (sensing_paths, comm_paths) = partition_paths(&paths);
    let beam = ls_transmit_beamformer(&bs, scene.target_direction(0)?, one)?;
    let user_beam = ls_transmit_beamformer(&user, comm_paths[0].angle_tx, one)?;
    let hs = sensing_channel(&sensing_paths, &beam, &bs, &nm)?;
    let hc = comm_channel(&comm_paths, &user_beam, &bs, &user, &nm, 0, nm.num_symbols)?;

    let mut cell = vec![C64::new(0.0, 0.0); bs.num_elements()];
    println!("\nsubcarrier  |h_S[n,0]|^2      |h_C[n,0]|^2");
    for n in [0, 1, 2, 64, 127] {
        hs.response_into(n, 0, &mut cell);
        let ps: f64 = cell.iter().map(|z| z.norm_sqr()).sum();
        hc.response_into(n, 0, &mut cell);
        let pc: f64 = cell.iter().map(|z| z.norm_sqr()).sum();
        println!("{n:>10}  {ps:.4e}  {pc:.4e}");
    }
    Ok(())
}
