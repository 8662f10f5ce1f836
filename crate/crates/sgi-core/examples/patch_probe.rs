use sgi_core::field::{FieldModel, FieldProfile, LineParity, QuadraticFieldPatch};
use sgi_core::units::BOHR_PER_MICRON;
use sgi_core::PhysParams;

fn main() {
    let p = PhysParams::silver();
    let delta = p.delta;
    let m = FieldModel::new(
        FieldProfile::default(),
        LineParity::Aligned,
        0.722201 * BOHR_PER_MICRON,
        2.1630760e-4,
    )
    .unwrap();
    // Lab y at t = 3T/8 (splitting force near its peak).
    let y_lab = p.y0 + p.v_y * 0.375 * p.t_total;
    println!("y_lab = {} um", y_lab / BOHR_PER_MICRON);
    let patch = QuadraticFieldPatch::build(&m, [0.0, y_lab, 0.0], 4.75 * delta).unwrap();
    println!("{:>6} {:>16} {:>16} {:>12} {:>16} {:>16}",
        "z/d", "|B|_exact", "|B|_patch", "rel_err", "dBdz_exact", "dBdz_patch");
    for i in -6..=6 {
        let z = i as f64 * 0.5 * delta;
        let r = [0.0, y_lab, z];
        let (n_ex, g_ex) = m.norm_and_gradient(r).unwrap();
        let (bp, _) = patch.field_and_grad_norm_sq(r);
        let n_p = (bp[0] * bp[0] + bp[1] * bp[1] + bp[2] * bp[2]).sqrt();
        // patch gradient of |B| along z via jacobian
        let jp = patch.jacobian(r);
        let gz_p = (bp[0] * jp[0][2] + bp[1] * jp[1][2] + bp[2] * jp[2][2]) / n_p;
        println!("{:>6.1} {:>16.12e} {:>16.12e} {:>12.3e} {:>16.8e} {:>16.8e}",
            i as f64 * 0.5, n_ex, n_p, (n_p - n_ex).abs() / n_ex, g_ex[2], gz_p);
    }
}
